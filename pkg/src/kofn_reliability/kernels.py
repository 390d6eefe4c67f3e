"""Semi-Markov state space and one-step kernels of the k-out-of-n repair models.

States are indexed by the number of failed disks, ``0 .. n-k+1``. State
``n-k+1`` is absorbing (data loss) and has no outgoing kernels. From a
transient state ``i >= 1`` the process either loses another disk before the
deterministic repair timer of length ``repair_time`` expires, or the repair
completes and the process moves to ``i-1`` (serial) or ``0`` (parallel).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from kofn_reliability.errors import ParameterError


class Discipline(str, Enum):
    """Repair discipline."""

    SERIAL = "serial"
    PARALLEL = "parallel"

    @classmethod
    def parse(cls, value: "Discipline | str") -> "Discipline":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError(f"unknown repair discipline {value!r}") from None


@dataclass(frozen=True)
class SystemParams:
    """Storage system of ``n`` disks that loses data once ``n-k+1`` have failed.

    ``failure_rate`` is the per-disk rate and ``repair_time`` the fixed repair
    duration; both must use the same time unit.
    """

    n: int
    k: int
    failure_rate: float
    repair_time: float

    def __post_init__(self) -> None:
        for name in ("n", "k"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ParameterError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not 0 < self.k < self.n:
            raise ParameterError(f"need 0 < k < n, got n={self.n}, k={self.k}")
        for name in ("failure_rate", "repair_time"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def absorbing(self) -> int:
        """Index of the data-loss state, ``n-k+1``."""
        return self.n - self.k + 1

    @property
    def transient_states(self) -> range:
        return range(self.absorbing)

    def working(self, i: int) -> int:
        """Number of working disks in state ``i``."""
        return self.n - i

    def scaled(self, factor: float) -> "SystemParams":
        """Same system with time rescaled: rates times ``factor``, durations divided."""
        return SystemParams(self.n, self.k, self.failure_rate * factor, self.repair_time / factor)


def repair_target(discipline: Discipline, i: int) -> int:
    """State entered when the repair running in state ``i`` completes."""
    return i - 1 if discipline is Discipline.SERIAL else 0


def one_minus_exp_neg(z: complex) -> complex:
    """``1 - exp(-z)`` without cancellation for small ``|z|``.

    Real arguments go through ``expm1``; complex ones use
    ``1 - e^{-x} cos y = 2 sin^2(y/2) - cos(y) expm1(-x)`` so that tiny
    imaginary parts (complex-step evaluation) survive intact.
    """
    if isinstance(z, complex):
        x, y = z.real, z.imag
        if y != 0.0:
            real = 2.0 * math.sin(0.5 * y) ** 2 - math.cos(y) * math.expm1(-x)
            return complex(real, math.exp(-x) * math.sin(y))
        z = x
    return complex(-math.expm1(-z))


@dataclass(frozen=True)
class Stage:
    """Transform-domain quantities of one transient state at a frequency ``s``.

    ``up`` and ``down`` are the failure and repair kernels. ``not_down`` is
    ``1 - down`` and ``leak`` is ``1 - up - down``; both are evaluated in
    closed form so that near ``s = 0`` no complementary probability is
    obtained by subtraction.
    """

    up: complex
    down: complex
    not_down: complex
    leak: complex


def check_frequency(s: complex) -> complex:
    s = complex(s)
    if not (cmath.isfinite(s)):
        raise ParameterError(f"frequency must be finite, got {s!r}")
    if s.real < 0.0:
        raise ParameterError(f"kernels require Re(s) >= 0, got {s!r}")
    return s


def stage(params: SystemParams, i: int, s: complex) -> Stage:
    """Kernel quantities leaving transient state ``i`` at frequency ``s``.

    For ``i = 0`` there is no repair: ``down`` is zero and ``up`` is the
    exponential LST ``n lam / (s + n lam)``.
    """
    rate = params.working(i) * params.failure_rate
    if i == 0:
        denom = s + rate
        return Stage(up=rate / denom, down=0j, not_down=1 + 0j, leak=s / denom)
    z = (rate + s) * params.repair_time
    not_down = one_minus_exp_neg(z)
    down = cmath.exp(-z) if isinstance(z, complex) and z.imag else complex(math.exp(-z.real))
    frac = rate / (rate + s)
    return Stage(up=frac * not_down, down=down, not_down=not_down, leak=not_down * (s / (rate + s)))


def _check_source(params: SystemParams, i: int) -> None:
    if isinstance(i, bool) or int(i) != i or not 0 <= i <= params.absorbing:
        raise ParameterError(f"state {i!r} outside 0..{params.absorbing}")
    if i == params.absorbing:
        raise ParameterError(f"state {i} is absorbing and has no outgoing transitions")


def kernel_lst(
    params: SystemParams, discipline: Discipline | str, i: int, j: int, s: complex
) -> complex:
    """Laplace-Stieltjes transform of the one-step kernel ``Q_ij`` at ``s``."""
    discipline = Discipline.parse(discipline)
    _check_source(params, i)
    s = check_frequency(s)
    if j == i + 1:
        return stage(params, i, s).up
    if i >= 1 and j == repair_target(discipline, i):
        return stage(params, i, s).down
    return 0j


def kernel_time_domain(
    params: SystemParams, discipline: Discipline | str, i: int, j: int, t: float
) -> float:
    """Probability that the first transition out of ``i`` goes to ``j`` within ``t``."""
    discipline = Discipline.parse(discipline)
    _check_source(params, i)
    t = float(t)
    if not t >= 0.0:
        raise ParameterError(f"time must be nonnegative, got {t!r}")
    rate = params.working(i) * params.failure_rate
    if j == i + 1:
        horizon = t if i == 0 else min(t, params.repair_time)
        return -math.expm1(-rate * horizon)
    if i >= 1 and j == repair_target(discipline, i):
        return math.exp(-rate * params.repair_time) if t >= params.repair_time else 0.0
    return 0.0


@dataclass(frozen=True)
class KernelMatrix:
    """Sparse kernel ``Q*(s)`` over the states ``0 .. n-k+1``."""

    params: SystemParams
    discipline: Discipline
    s: complex
    entries: dict[tuple[int, int], complex] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.params.absorbing + 1

    def __getitem__(self, key: tuple[int, int]) -> complex:
        return self.entries.get(key, 0j)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def pattern(self) -> set[tuple[int, int]]:
        return set(self.entries)

    def row_sum(self, i: int) -> complex:
        return sum((v for (r, _), v in self.entries.items() if r == i), 0j)

    def transient_block(self):
        """Dense ``(n-k+1) x (n-k+1)`` block of transitions among transient states."""
        import numpy as np

        m = self.params.absorbing
        block = np.zeros((m, m), dtype=complex)
        for (i, j), value in self.entries.items():
            if j < m:
                block[i, j] = value
        return block


def build_kernel_matrix(
    params: SystemParams, discipline: Discipline | str, s: complex
) -> KernelMatrix:
    """Evaluate every structurally nonzero kernel entry at ``s``."""
    discipline = Discipline.parse(discipline)
    s = check_frequency(s)
    entries: dict[tuple[int, int], complex] = {}
    for i in params.transient_states:
        entries[(i, i + 1)] = kernel_lst(params, discipline, i, i + 1, s)
        if i >= 1:
            target = repair_target(discipline, i)
            entries[(i, target)] = kernel_lst(params, discipline, i, target, s)
    return KernelMatrix(params=params, discipline=discipline, s=s, entries=entries)
