from .scenario import GridSpec, Scenario, load_scenario
from .divergence import (
    SliceDimensionReport,
    TrendReport,
    check_hypotheses,
    divergence_study,
    slice_dimension_study,
)
from .sweeps import (
    CrossCheckReport,
    SweepReport,
    WitnessReport,
    angle_sweep,
    content_density_cross_check,
    rectangle_witness_study,
    random_angles,
)
from .runner import resolve_output_dir, run_scenario

__all__ = [
    'GridSpec',
    'Scenario',
    'load_scenario',
    'TrendReport',
    'SliceDimensionReport',
    'check_hypotheses',
    'divergence_study',
    'slice_dimension_study',
    'SweepReport',
    'CrossCheckReport',
    'WitnessReport',
    'angle_sweep',
    'content_density_cross_check',
    'rectangle_witness_study',
    'random_angles',
    'resolve_output_dir',
    'run_scenario',
]
