from .constants import LemmaConstants, find_constants, minimal_k
from .construction import RectCheckReport, RectPair, build_rect_pair, verify_rect_pair
from .selection import rectangle_packing, vitali_select

__all__ = [
    'LemmaConstants',
    'find_constants',
    'minimal_k',
    'RectPair',
    'RectCheckReport',
    'build_rect_pair',
    'verify_rect_pair',
    'vitali_select',
    'rectangle_packing',
]
