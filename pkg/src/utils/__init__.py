"""
Utility modules for geo-sublinear.
"""

from .logger import get_logger, setup_root_logger, parse_level
from .errors import (
    GeoSublinearError,
    DatasetParseError,
    RefusalError,
    UsageError,
    DigestMismatchError,
)
from .rng import RngStream
from .selection import (
    safe_ceil,
    safe_floor,
    exclusion_count,
    top_t,
    kth_largest,
    kth_smallest,
    argmax_lowest,
)
from .parallel import resolve_workers, ordered_map, THREADS_ENV_VAR
from .file_utils import (
    ensure_directory,
    ensure_parent,
    file_exists,
    detect_format,
    truth_sidecar_path,
)

__all__ = [
    'get_logger',
    'setup_root_logger',
    'parse_level',
    'GeoSublinearError',
    'DatasetParseError',
    'RefusalError',
    'UsageError',
    'DigestMismatchError',
    'RngStream',
    'safe_ceil',
    'safe_floor',
    'exclusion_count',
    'top_t',
    'kth_largest',
    'kth_smallest',
    'argmax_lowest',
    'resolve_workers',
    'ordered_map',
    'THREADS_ENV_VAR',
    'ensure_directory',
    'ensure_parent',
    'file_exists',
    'detect_format',
    'truth_sidecar_path',
]
