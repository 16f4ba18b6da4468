from .direction import Direction
from .projected_ifs import (
    ProjectedIFS,
    attractor_extent,
    deduplicate_maps,
    project_ifs,
    project_onto,
)
from .frame import Frame
from .conditions import (
    Coincidence,
    Fails,
    Holds,
    NoCoincidence,
    check_condition_B,
    check_condition_B_prime,
)
from .overlaps import detect_exact_overlaps
from .density import (
    DensityDiagnostic,
    DensityHistogram,
    density_boundedness_diagnostic,
    estimate_projection_length,
    pushforward_density,
)

__all__ = [
    'Direction',
    'ProjectedIFS',
    'Frame',
    'project_ifs',
    'project_onto',
    'attractor_extent',
    'deduplicate_maps',
    'NoCoincidence',
    'Coincidence',
    'Holds',
    'Fails',
    'check_condition_B',
    'check_condition_B_prime',
    'detect_exact_overlaps',
    'DensityHistogram',
    'DensityDiagnostic',
    'pushforward_density',
    'density_boundedness_diagnostic',
    'estimate_projection_length',
]
