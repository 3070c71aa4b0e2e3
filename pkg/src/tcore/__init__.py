"""Exact arithmetic for t-core partition statistics and n-point functions."""

from tcore._rat import QQ, parse_rat, rat, rat_str
from tcore.cyclo import Cyclo
from tcore.partitions import (
    MayaWindow,
    conjugate,
    enumerate_t_cores,
    hook_lengths,
    is_t_core,
    maya,
    partition_from_maya,
    partitions_of,
    t_core_product_series,
    t_core_size_series,
)
from tcore.npoint import (
    NPointResult,
    SetPartition,
    SValue,
    bloch_okounkov_F,
    brute_force_Ft,
    closed_Ft,
    closed_Ft_r,
    correlation_expansion,
    partition_moment,
    qdeformed_Z_product,
    qdeformed_Z_sum,
    qdeformed_Zn_sum,
    set_partitions,
)
from tcore.qseries import BiSeries, HalfExp, QSeries, half, qdiv, qexp, qlog
from tcore.quadext import SqrtExt, sqrt_field
from tcore.symfunc import (
    SpecPoint,
    hook_pair_product_series,
    schur_hook_eval,
    schur_pair_sum_series,
    skew_schur,
    topological_vertex,
)
from tcore.theta import (
    ThetaArg,
    eisenstein,
    jfunc,
    level_series,
    macmahon,
    theta3,
    vartheta,
)

__all__ = [
    "QQ",
    "parse_rat",
    "rat",
    "rat_str",
    "Cyclo",
    "MayaWindow",
    "conjugate",
    "enumerate_t_cores",
    "hook_lengths",
    "is_t_core",
    "maya",
    "partition_from_maya",
    "partitions_of",
    "t_core_product_series",
    "t_core_size_series",
    "NPointResult",
    "SetPartition",
    "SValue",
    "bloch_okounkov_F",
    "brute_force_Ft",
    "closed_Ft",
    "closed_Ft_r",
    "correlation_expansion",
    "partition_moment",
    "qdeformed_Z_product",
    "qdeformed_Z_sum",
    "qdeformed_Zn_sum",
    "set_partitions",
    "BiSeries",
    "HalfExp",
    "QSeries",
    "half",
    "qdiv",
    "qexp",
    "qlog",
    "SqrtExt",
    "sqrt_field",
    "SpecPoint",
    "hook_pair_product_series",
    "schur_hook_eval",
    "schur_pair_sum_series",
    "skew_schur",
    "topological_vertex",
    "ThetaArg",
    "eisenstein",
    "jfunc",
    "level_series",
    "macmahon",
    "theta3",
    "vartheta",
]
