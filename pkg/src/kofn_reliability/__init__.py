"""Reliability of k-out-of-n storage systems with deterministic repair.

Exponential disk failures, fixed repair duration, serial or parallel repair.
Provides the Laplace-Stieltjes transform of the time to data loss, exact and
asymptotic MTDL, the CDF by numerical inversion, and a Monte Carlo oracle.
"""

from kofn_reliability.baselines import (
    ExponentialRepairParams,
    mtdl_angus,
    mtdl_chen,
    mtdl_det_approx,
    mtdl_exp_approx,
    mtdl_exponential_chain,
)
from kofn_reliability.errors import (
    ConditioningError,
    ConsistencyError,
    InversionError,
    NumericalError,
    ParameterError,
    RangeError,
    ReliabilityError,
)
from kofn_reliability.inversion import ReliabilityCurve, invert_cdf, reliability_at
from kofn_reliability.kernels import (
    Discipline,
    KernelMatrix,
    SystemParams,
    build_kernel_matrix,
    kernel_lst,
    kernel_time_domain,
)
from kofn_reliability.simulator import (
    RepairModel,
    SimulationResult,
    estimate_cdf,
    estimate_mtdl,
    simulate_one,
    substream,
)
from kofn_reliability.transform import (
    AbsorptionTransform,
    EmbeddedChain,
    Method,
    absorption_lst,
    mtdl,
    mtdl_embedded_chain,
    mtdl_lst_derivative,
)

__version__ = "0.1.0"

__all__ = [
    "AbsorptionTransform",
    "ConditioningError",
    "ConsistencyError",
    "Discipline",
    "EmbeddedChain",
    "ExponentialRepairParams",
    "InversionError",
    "KernelMatrix",
    "Method",
    "NumericalError",
    "ParameterError",
    "RangeError",
    "ReliabilityCurve",
    "ReliabilityError",
    "RepairModel",
    "SimulationResult",
    "SystemParams",
    "absorption_lst",
    "build_kernel_matrix",
    "estimate_cdf",
    "estimate_mtdl",
    "invert_cdf",
    "kernel_lst",
    "kernel_time_domain",
    "mtdl",
    "mtdl_angus",
    "mtdl_chen",
    "mtdl_det_approx",
    "mtdl_embedded_chain",
    "mtdl_exp_approx",
    "mtdl_exponential_chain",
    "mtdl_lst_derivative",
    "reliability_at",
    "simulate_one",
    "substream",
]
