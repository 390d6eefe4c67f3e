"""Time-to-data-loss transform and mean time to data loss (MTDL).

``absorption_lst`` evaluates ``P(s) = E[exp(-s T)]`` for the time ``T`` from
the all-working state to data loss. Three routes are available:

* ``LINEAR_SOLVE`` eliminates the first-passage system ``(I - Q) h = b``
  in O(n-k). The serial system is tridiagonal and the parallel one is an
  arrowhead; both are reduced stage by stage. The elimination carries
  ``1 - G`` alongside every passage transform ``G``, so the pivots are
  sums of nonnegative terms near ``s = 0`` and never differences of
  numbers close to one.
* ``DETERMINANT_RATIO`` is the product of the forward kernels divided by
  ``det(I - Q)`` from a dense LU factorization. It is kept for validation.
* ``SIMPLIFIED_PARALLEL`` is the closed-form arrowhead reduction, available
  for the parallel discipline only.

The MTDL is computed from the embedded Markov-renewal chain in real
arithmetic. ``mtdl_lst_derivative`` gives an independent value as
``-P'(0)`` by complex-step differentiation.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum

import numpy as np

from kofn_reliability.errors import ConditioningError, ConsistencyError, ParameterError
from kofn_reliability.kernels import (
    Discipline,
    SystemParams,
    build_kernel_matrix,
    check_frequency,
    kernel_lst,
    repair_target,
    stage,
)

EPS = sys.float_info.epsilon
MTDL_CROSSCHECK_RTOL = 1e-6


class Method(str, Enum):
    LINEAR_SOLVE = "linear_solve"
    DETERMINANT_RATIO = "determinant_ratio"
    SIMPLIFIED_PARALLEL = "simplified_parallel"


@dataclass(frozen=True)
class AbsorptionTransform:
    """Callable ``s -> P(s)`` bound to a system, discipline and method."""

    params: SystemParams
    discipline: Discipline
    method: Method = Method.LINEAR_SOLVE

    def __post_init__(self) -> None:
        object.__setattr__(self, "discipline", Discipline.parse(self.discipline))
        object.__setattr__(self, "method", Method(self.method))
        if self.method is Method.SIMPLIFIED_PARALLEL and self.discipline is not Discipline.PARALLEL:
            raise ParameterError("the simplified closed form applies to parallel repair only")

    def __call__(self, s: complex) -> complex:
        return absorption_lst(self.params, self.discipline, s, self.method)


def _checked(value: complex, what: str) -> complex:
    if value == 0 or not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ConditioningError(f"{what} is zero or not finite ({value!r})")
    return value


def _serial_solve(params: SystemParams, s: complex) -> complex:
    # g: transform of the passage time i -> i+1; c = 1 - g
    first = stage(params, 0, s)
    g, c = first.up, first.leak
    product = g
    for i in range(1, params.absorbing):
        st = stage(params, i, s)
        pivot = _checked(st.not_down + st.down * c, f"pivot of state {i}")
        g = st.up / pivot
        c = (st.leak + st.down * c) / pivot
        product *= g
    return product


def _parallel_solve(params: SystemParams, s: complex) -> complex:
    # f: transform of the first passage 0 -> j; e = 1 - f
    first = stage(params, 0, s)
    f, e = first.up, first.leak
    for j in range(1, params.absorbing):
        st = stage(params, j, s)
        pivot = _checked(st.not_down + st.down * e, f"pivot of state {j}")
        f, e = f * st.up / pivot, (e + f * st.leak) / pivot
    return f


def _determinant_ratio(params: SystemParams, discipline: Discipline, s: complex) -> complex:
    kernel = build_kernel_matrix(params, discipline, s)
    system = np.eye(params.absorbing, dtype=complex) - kernel.transient_block()
    det = np.linalg.det(system)
    scale = np.linalg.norm(system, ord=np.inf)
    if not np.isfinite(det) or abs(det) <= 1e3 * EPS * scale:
        raise ConditioningError(
            f"det(I - Q) = {det:.3e} is numerically singular at s = {s!r}"
        )
    numerator = 1 + 0j
    for i in params.transient_states:
        numerator *= kernel[(i, i + 1)]
    return complex(numerator / det)


def _simplified_parallel(params: SystemParams, s: complex) -> complex:
    up = [kernel_lst(params, Discipline.PARALLEL, i, i + 1, s) for i in params.transient_states]
    denom = 1 + 0j
    prefix = 1 + 0j
    for j in range(1, params.absorbing):
        prefix *= up[j - 1]
        denom -= prefix * kernel_lst(params, Discipline.PARALLEL, j, 0, s)
    _checked(denom, "closed-form denominator")
    return math.prod(up, start=1 + 0j) / denom


def absorption_lst(
    params: SystemParams,
    discipline: Discipline | str,
    s: complex,
    method: Method | str = Method.LINEAR_SOLVE,
) -> complex:
    """LST of the time to data loss, ``E[exp(-s T)]``, at ``Re(s) >= 0``."""
    discipline = Discipline.parse(discipline)
    method = Method(method)
    s = check_frequency(s)
    if method is Method.LINEAR_SOLVE:
        if discipline is Discipline.SERIAL:
            return _serial_solve(params, s)
        return _parallel_solve(params, s)
    if method is Method.DETERMINANT_RATIO:
        return _determinant_ratio(params, discipline, s)
    if discipline is not Discipline.PARALLEL:
        raise ParameterError("the simplified closed form applies to parallel repair only")
    return _simplified_parallel(params, s)


def mtdl_lst_derivative(
    params: SystemParams,
    discipline: Discipline | str,
    method: Method | str = Method.LINEAR_SOLVE,
) -> float:
    """``-P'(0)`` by complex-step differentiation, ``-Im P(ih) / h``."""
    h = 1e-30 * params.n * params.failure_rate
    value = -absorption_lst(params, discipline, complex(0.0, h), method).imag / h
    if not (math.isfinite(value) and value > 0.0):
        raise ConditioningError(f"complex-step MTDL is not a positive finite number ({value!r})")
    return value


@dataclass(frozen=True)
class EmbeddedChain:
    """Embedded jump chain with mean sojourn times (Markov-renewal view).

    ``up[i]`` and ``down[i]`` are the probabilities that the sojourn in ``i``
    ends in a failure or a completed repair; ``sojourn[i]`` is its mean
    length. ``down[0]`` is zero.
    """

    params: SystemParams
    discipline: Discipline
    up: tuple[float, ...]
    down: tuple[float, ...]
    sojourn: tuple[float, ...]

    @classmethod
    def build(cls, params: SystemParams, discipline: Discipline | str) -> "EmbeddedChain":
        discipline = Discipline.parse(discipline)
        up, down, sojourn = [1.0], [0.0], [1.0 / (params.n * params.failure_rate)]
        for i in range(1, params.absorbing):
            rate = params.working(i) * params.failure_rate
            x = rate * params.repair_time
            p_up = -math.expm1(-x)
            up.append(p_up)
            down.append(math.exp(-x))
            sojourn.append(p_up / rate)
        return cls(params, discipline, tuple(up), tuple(down), tuple(sojourn))

    def transition_matrix(self) -> np.ndarray:
        """Dense jump-chain matrix over all ``n-k+2`` states (absorbing row empty)."""
        m = self.params.absorbing
        p = np.zeros((m + 1, m + 1))
        for i in range(m):
            p[i, i + 1] = self.up[i]
            if i:
                p[i, repair_target(self.discipline, i)] += self.down[i]
        return p

    def mean_absorption_time(self) -> float:
        """Solve ``m_i = tau_i + sum_j p_ij m_j`` and return ``m_0``."""
        if self.discipline is Discipline.SERIAL:
            # passage time i -> i+1 accumulates; absorption needs every rung
            rung = self.sojourn[0]
            total = rung
            for i in range(1, self.params.absorbing):
                rung = (self.sojourn[i] + self.down[i] * rung) / self.up[i]
                total += rung
        else:
            total = self.sojourn[0]
            for j in range(1, self.params.absorbing):
                total = (total + self.sojourn[j]) / self.up[j]
        if not (math.isfinite(total) and total > 0.0):
            raise ConditioningError(f"embedded-chain MTDL is not a positive finite number ({total!r})")
        return total


def mtdl_embedded_chain(params: SystemParams, discipline: Discipline | str) -> float:
    """Exact MTDL from the Markov-renewal first-passage equations."""
    return EmbeddedChain.build(params, discipline).mean_absorption_time()


def mtdl(params: SystemParams, discipline: Discipline | str, validate: bool = False) -> float:
    """Mean time to data loss.

    With ``validate`` set, the complex-step value is computed as well and a
    relative disagreement above 1e-6 raises ``ConsistencyError``.
    """
    value = mtdl_embedded_chain(params, discipline)
    if validate:
        check = mtdl_lst_derivative(params, discipline)
        if abs(check - value) > MTDL_CROSSCHECK_RTOL * value:
            raise ConsistencyError(
                f"MTDL cross-check failed: embedded chain {value!r}, -P'(0) {check!r}"
            )
    return value
