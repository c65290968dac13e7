"""
Data models for geo-sublinear.
"""

from .point_set import (
    PointSet,
    PlantedTruth,
    OutlierInstance,
    uniform_sample,
    stack_point_sets,
    DENSE_DIMENSION_THRESHOLD,
)
from .dataset_loader import (
    DatasetLoader,
    load_dense,
    load_sparse,
    save_dense,
    save_sparse,
    save_truth,
    load_truth,
)
from .config_model import (
    CoreSetConfig,
    SamplingConfig,
    OutlierConfig,
    HybridConfig,
    MexConfig,
    OracleConfig,
    RuntimeConfig,
    SolverConfig,
)
from .params_model import StabilityParams, BiCriteriaParams
from .solution_model import (
    Center,
    Ball,
    CoreSetState,
    RadiusInterval,
    KBallUnion,
    Slab,
    HalfSpaceMargin,
    TwoClassMargin,
    Candidate,
    StabilityBound,
    HybridResult,
    OracleResult,
    GilbertResult,
)
from .report_model import RunTrace, SolveReport, to_jsonable, REPORT_SCHEMA

__all__ = [
    'PointSet',
    'PlantedTruth',
    'OutlierInstance',
    'uniform_sample',
    'stack_point_sets',
    'DENSE_DIMENSION_THRESHOLD',
    'DatasetLoader',
    'load_dense',
    'load_sparse',
    'save_dense',
    'save_sparse',
    'save_truth',
    'load_truth',
    'CoreSetConfig',
    'SamplingConfig',
    'OutlierConfig',
    'HybridConfig',
    'MexConfig',
    'OracleConfig',
    'RuntimeConfig',
    'SolverConfig',
    'StabilityParams',
    'BiCriteriaParams',
    'Center',
    'Ball',
    'CoreSetState',
    'RadiusInterval',
    'KBallUnion',
    'Slab',
    'HalfSpaceMargin',
    'TwoClassMargin',
    'Candidate',
    'StabilityBound',
    'HybridResult',
    'OracleResult',
    'GilbertResult',
    'RunTrace',
    'SolveReport',
    'to_jsonable',
    'REPORT_SCHEMA',
]
