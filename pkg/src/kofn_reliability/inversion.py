"""Time-domain CDF of the time to data loss by numerical Laplace inversion.

The CDF ``F`` has the ordinary Laplace transform ``P(s)/s``. It is inverted
with the Euler algorithm in the Abate-Whitt unified framework::

    F(t) ~ 10^(M/3) / t * sum_{k=0}^{2M} eta_k Re[ Fhat(beta_k / t) ]

    beta_k = M ln(10) / 3 + i pi k
    eta_k  = (-1)^k xi_k,  xi_0 = 1/2,  xi_k = 1 (1 <= k <= M),
    xi_2M  = 2^-M,  xi_{2M-j} = xi_{2M-j+1} + 2^-M C(M, j) (0 < j < M)

The weights taper the alternating Fourier series as a binomial (Euler)
average of its partial sums ``S_M .. S_2M``, so the same evaluations also
give two order ``M-1`` averages over ``S_M .. S_2M-1`` and
``S_M+1 .. S_2M``. Their difference is the oscillation diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from kofn_reliability.errors import InversionError, ParameterError
from kofn_reliability.kernels import Discipline, SystemParams
from kofn_reliability.transform import absorption_lst

INVERSION_TOL = 1e-6
SPREAD_LIMIT = 1e-3
# about 0.6 M significant digits; 12 leaves a decade of margin below 1e-6
DEFAULT_TERMS = max(1, math.ceil((-math.log10(INVERSION_TOL) + 1) / 0.6))


@dataclass(frozen=True)
class CurvePoint:
    t: float
    cdf: float

    @property
    def reliability(self) -> float:
        return 1.0 - self.cdf


@dataclass(frozen=True)
class ReliabilityCurve:
    params: SystemParams
    discipline: Discipline
    points: tuple[CurvePoint, ...]
    method: str = "euler"
    terms: int = DEFAULT_TERMS

    @property
    def times(self) -> np.ndarray:
        return np.array([p.t for p in self.points])

    @property
    def cdf(self) -> np.ndarray:
        return np.array([p.cdf for p in self.points])

    @property
    def reliability(self) -> np.ndarray:
        return 1.0 - self.cdf


def euler_weights(terms: int) -> tuple[float, np.ndarray]:
    """Return ``(real abscissa scale, eta_0..eta_2M)`` for ``M = terms``."""
    m = terms
    xi = np.ones(2 * m + 1)
    xi[0] = 0.5
    xi[2 * m] = 2.0**-m
    for j in range(1, m):
        xi[2 * m - j] = xi[2 * m - j + 1] + 2.0**-m * math.comb(m, j)
    signs = np.where(np.arange(2 * m + 1) % 2 == 0, 1.0, -1.0)
    return m * math.log(10.0) / 3.0, signs * xi


def _binomial_average(partial: np.ndarray, order: int, start: int) -> float:
    weights = np.array([math.comb(order, j) for j in range(order + 1)]) * 2.0**-order
    return float(weights @ partial[start : start + order + 1])


def euler_invert(
    transform: Callable[[complex], complex], t: float, terms: int = DEFAULT_TERMS
) -> tuple[float, float]:
    """Invert an ordinary Laplace transform at ``t > 0``.

    Returns ``(value, spread)`` where ``spread`` is the gap between the two
    lower-order Euler averages of the same partial sums.
    """
    if not t > 0.0:
        raise ParameterError(f"Euler inversion needs t > 0, got {t!r}")
    a, _ = euler_weights(terms)
    scale = 10.0 ** (terms / 3.0) / t
    ks = np.arange(2 * terms + 1)
    series = np.array([transform(complex(a, math.pi * k) / t).real for k in ks])
    series *= np.where(ks % 2 == 0, 1.0, -1.0)
    series[0] *= 0.5
    partial = np.cumsum(series) * scale
    value = _binomial_average(partial, terms, terms)
    spread = abs(
        _binomial_average(partial, terms - 1, terms) - _binomial_average(partial, terms - 1, terms + 1)
    )
    return value, spread


def _check_grid(t_grid: Sequence[float]) -> list[float]:
    grid = [float(t) for t in t_grid]
    if not grid:
        raise ParameterError("time grid is empty")
    if any(not math.isfinite(t) or t < 0.0 for t in grid):
        raise ParameterError("time grid must hold finite nonnegative values")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ParameterError("time grid must be strictly increasing")
    return grid


def cdf_at(
    params: SystemParams, discipline: Discipline | str, t: float, terms: int = DEFAULT_TERMS
) -> float:
    """Unclamped ``P(T <= t)``; raises ``InversionError`` on an unstable series."""
    discipline = Discipline.parse(discipline)
    if t == 0.0:
        return 0.0

    def transform(s: complex) -> complex:
        return absorption_lst(params, discipline, s) / s

    value, spread = euler_invert(transform, t, terms)
    if not math.isfinite(value) or spread > SPREAD_LIMIT:
        raise InversionError(
            f"inversion at t={t!r} is unstable (partial-sum spread {spread:.3e})"
        )
    return value


def invert_cdf(
    params: SystemParams,
    discipline: Discipline | str,
    t_grid: Sequence[float],
    terms: int = DEFAULT_TERMS,
) -> ReliabilityCurve:
    """CDF of the time to data loss on ``t_grid``, clamped to ``[0, 1]``."""
    discipline = Discipline.parse(discipline)
    grid = _check_grid(t_grid)
    points = tuple(
        CurvePoint(t, min(1.0, max(0.0, cdf_at(params, discipline, t, terms)))) for t in grid
    )
    return ReliabilityCurve(params, discipline, points, terms=terms)


def reliability_at(
    params: SystemParams, discipline: Discipline | str, t: float, terms: int = DEFAULT_TERMS
) -> float:
    """Survival probability ``P(T > t)``."""
    t = float(t)
    if not (math.isfinite(t) and t >= 0.0):
        raise ParameterError(f"time must be finite and nonnegative, got {t!r}")
    return min(1.0, max(0.0, 1.0 - cdf_at(params, Discipline.parse(discipline), t, terms)))
