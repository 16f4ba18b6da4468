from .errors import BudgetExceeded, FractalSlicerError, ValidationError
from .file_utils import OutputManager
from .intervals import merge_intervals, union_length
from .serialization import (
    decode_scalar,
    dump_ifs,
    encode_scalar,
    format_float,
    ifs_from_dict,
    ifs_to_dict,
    load_ifs,
    parse_ifs_argument,
    parse_number_list,
    to_jsonable,
)

__all__ = [
    'FractalSlicerError',
    'ValidationError',
    'BudgetExceeded',
    'OutputManager',
    'merge_intervals',
    'union_length',
    'encode_scalar',
    'decode_scalar',
    'format_float',
    'ifs_to_dict',
    'ifs_from_dict',
    'load_ifs',
    'dump_ifs',
    'parse_ifs_argument',
    'parse_number_list',
    'to_jsonable',
]
