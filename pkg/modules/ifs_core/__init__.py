from .types import IFS, Cylinder, Rect, Similitude, Word
from .moran import solve_moran
from .cylinders import (
    CylinderSet,
    compose,
    compose_word,
    enumerate_level,
    enumerate_partition,
    partition_set,
    sample_words,
    stopping_partition,
)
from .geometry import (
    NotSeparatedAtDepth,
    Separated,
    attractor_bbox,
    check_strong_separation,
    measure_separation_constant,
)
from .sampler import sample_natural_measure
from .presets import diagonal_pair, four_corner, full_square, preset_by_name, product_cantor

__all__ = [
    'IFS',
    'Cylinder',
    'CylinderSet',
    'Rect',
    'Similitude',
    'Word',
    'solve_moran',
    'compose',
    'compose_word',
    'enumerate_level',
    'enumerate_partition',
    'partition_set',
    'sample_words',
    'stopping_partition',
    'Separated',
    'NotSeparatedAtDepth',
    'attractor_bbox',
    'check_strong_separation',
    'measure_separation_constant',
    'sample_natural_measure',
    'four_corner',
    'product_cantor',
    'diagonal_pair',
    'full_square',
    'preset_by_name',
]
