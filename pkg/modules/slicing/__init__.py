from .cover import SliceCover, slice_cover
from .packing import Packing, dyadic_rungs, pack_premeasure, validate_packing
from .dimension import SliceDimensionEstimate, box_dimension_slice, hausdorff_content_slice

__all__ = [
    'SliceCover',
    'slice_cover',
    'Packing',
    'dyadic_rungs',
    'pack_premeasure',
    'validate_packing',
    'SliceDimensionEstimate',
    'box_dimension_slice',
    'hausdorff_content_slice',
]
