"""Closed-form MTDL baselines.

Exact sums for exponentially distributed repair (serial and parallel), their
leading-order monomials, and the small ``lam * t_rep`` asymptote of the
deterministic-repair models. Factorials are never formed on their own; every
ratio is accumulated as a running product so intermediate values stay in
range as long as the result does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from kofn_reliability.errors import ParameterError, RangeError
from kofn_reliability.kernels import Discipline, SystemParams

MAX_N = 170


@dataclass(frozen=True)
class ExponentialRepairParams:
    """k-out-of-n system whose repairs take ``Exp(repair_rate)`` time.

    ``repair_rate = 0`` is accepted as the no-repair limit.
    """

    n: int
    k: int
    failure_rate: float
    repair_rate: float

    def __post_init__(self) -> None:
        for name in ("n", "k"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ParameterError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not 0 < self.k < self.n:
            raise ParameterError(f"need 0 < k < n, got n={self.n}, k={self.k}")
        lam, mu = float(self.failure_rate), float(self.repair_rate)
        if not (math.isfinite(lam) and lam > 0.0):
            raise ParameterError(f"failure_rate must be positive and finite, got {lam!r}")
        if not (math.isfinite(mu) and mu >= 0.0):
            raise ParameterError(f"repair_rate must be nonnegative and finite, got {mu!r}")
        object.__setattr__(self, "failure_rate", lam)
        object.__setattr__(self, "repair_rate", mu)

    @classmethod
    def matching(cls, params: SystemParams) -> "ExponentialRepairParams":
        """Exponential model with the same mean repair time, ``mu = 1/t_rep``."""
        return cls(params.n, params.k, params.failure_rate, 1.0 / params.repair_time)


def _check_n(n: int) -> None:
    if n > MAX_N:
        raise RangeError(f"n = {n} exceeds the supported maximum of {MAX_N}")


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise RangeError(f"{what} overflows binary64")
    return value


def _double_sum(p: ExponentialRepairParams, parallel: bool) -> float:
    _check_n(p.n)
    lam, mu = p.failure_rate, p.repair_rate
    total = 0.0
    for l in range(p.n - p.k + 1):
        # term(i) = mu^i lam^-(i+1) (n-l-i-1)! / (n-l)!  [times i! when parallel]
        term = 1.0 / (lam * (p.n - l))
        inner = term
        for i in range(p.n - p.k - l):
            term *= mu / (lam * (p.n - l - i - 1))
            if parallel:
                term *= i + 1
            inner += term
        total += inner
    return _finite(total, "MTDL sum")


def mtdl_chen(p: ExponentialRepairParams) -> float:
    """Exact MTDL for serial exponential repair."""
    return _double_sum(p, parallel=False)


def mtdl_angus(p: ExponentialRepairParams) -> float:
    """Exact MTDL for parallel exponential repair."""
    return _double_sum(p, parallel=True)


def mtdl_exp_approx(p: ExponentialRepairParams, discipline: Discipline | str) -> float:
    """Leading term ``(k-1)!/n! * mu^(n-k) / lam^(n-k+1)``, times ``(n-k)!`` if parallel."""
    discipline = Discipline.parse(discipline)
    _check_n(p.n)
    ratio = p.repair_rate / p.failure_rate
    value = 1.0 / (p.n * p.failure_rate)
    for j in range(p.k, p.n):
        value *= ratio / j
    if discipline is Discipline.PARALLEL:
        for j in range(2, p.n - p.k + 1):
            value *= j
    return _finite(value, "approximation")


def mtdl_det_approx(params: SystemParams) -> float:
    """Small ``lam t_rep`` asymptote ``(k-1)!/(n! lam) (lam t_rep)^-(n-k)``.

    Shared by both repair disciplines.
    """
    _check_n(params.n)
    x = params.failure_rate * params.repair_time
    value = 1.0 / (params.n * params.failure_rate)
    for j in range(params.k, params.n):
        value /= j * x
    return _finite(value, "approximation")


def mtdl_exponential_chain(p: ExponentialRepairParams, discipline: Discipline | str) -> float:
    """Exact MTDL of the exponential-repair chain with a single repair timer.

    A completed repair moves ``i -> i-1`` (serial, equal to ``mtdl_chen``) or
    ``i -> 0`` (parallel). This is the process the simulator runs in its
    exponential mode.
    """
    discipline = Discipline.parse(discipline)
    lam, mu = p.failure_rate, p.repair_rate
    rung = total = 1.0 / (p.n * lam)
    for i in range(1, p.n - p.k + 1):
        rate = (p.n - i) * lam
        up, sojourn = rate / (rate + mu), 1.0 / (rate + mu)
        if discipline is Discipline.SERIAL:
            rung = (sojourn + (mu / (rate + mu)) * rung) / up
            total += rung
        else:
            total = (total + sojourn) / up
    return _finite(total, "MTDL")
