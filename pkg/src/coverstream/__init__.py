"""Multi-pass streaming set cover: solvers, exact baselines, and adversarial generators."""
from .baselines import OracleResult, exact_cover, offline_greedy
from .edifice import (
    AlgebraicEdifice,
    EdificeParams,
    MergedEdifice,
    make_wide,
    rainbow_merge,
    similarity_classes,
    variety_points,
    verify_edifice,
)
from .estimators import (
    ExactCover,
    NaiveProgressiveGreedy,
    OfflineGreedy,
    PartialCover,
    ProgressiveGreedy,
    check_instance,
)
from .exceptions import CoverstreamError
from .finitefield import Field, field_new
from .generators import (
    dichotomy_check,
    encode_mpj,
    mpj_generate,
    partial_reduction,
    sandwich_check,
    tightness_instance,
)
from .instance import (
    Certificate,
    Instance,
    MeteredStream,
    SpaceMeter,
    parse_instance,
    read_instance,
    verify_certificate,
    write_instance,
)
from .solvers import er_pass, partial_cover_solve, partial_select, prog_greedy, prog_greedy_naive

__version__ = "0.1.0"

__all__ = [
    "OracleResult",
    "exact_cover",
    "offline_greedy",
    "AlgebraicEdifice",
    "EdificeParams",
    "MergedEdifice",
    "make_wide",
    "rainbow_merge",
    "similarity_classes",
    "variety_points",
    "verify_edifice",
    "ExactCover",
    "NaiveProgressiveGreedy",
    "OfflineGreedy",
    "PartialCover",
    "ProgressiveGreedy",
    "check_instance",
    "CoverstreamError",
    "Field",
    "field_new",
    "dichotomy_check",
    "encode_mpj",
    "mpj_generate",
    "partial_reduction",
    "sandwich_check",
    "tightness_instance",
    "Certificate",
    "Instance",
    "MeteredStream",
    "SpaceMeter",
    "parse_instance",
    "read_instance",
    "verify_certificate",
    "write_instance",
    "er_pass",
    "partial_cover_solve",
    "partial_select",
    "prog_greedy",
    "prog_greedy_naive",
]
