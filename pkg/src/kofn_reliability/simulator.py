"""Monte Carlo discrete-event oracle for the time to data loss.

Each trial walks the failed-disk count directly. In a repairing state both a
failure delay and a repair delay are drawn; the earlier one wins and the
loser is discarded, which is exactly the repair re-initialization rule.
Trial ``i`` draws from its own Philox stream keyed by ``(seed, i)``, so a
result depends only on ``(params, discipline, model, trials, seed)`` and not
on how trials are spread over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from kofn_reliability.errors import ParameterError
from kofn_reliability.kernels import Discipline, SystemParams

_BLOCK = 64
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class RepairModel:
    """Deterministic repair of length ``t_rep``, or ``Exp(repair_rate)`` repair."""

    repair_rate: float | None = None

    def __post_init__(self) -> None:
        if self.repair_rate is not None:
            mu = float(self.repair_rate)
            if not (math.isfinite(mu) and mu > 0.0):
                raise ParameterError(f"exponential repair needs a positive rate, got {mu!r}")
            object.__setattr__(self, "repair_rate", mu)

    @classmethod
    def deterministic(cls) -> "RepairModel":
        return cls(None)

    @classmethod
    def exponential(cls, repair_rate: float) -> "RepairModel":
        return cls(repair_rate)

    @property
    def is_deterministic(self) -> bool:
        return self.repair_rate is None

    @property
    def tag(self) -> str:
        return "det" if self.is_deterministic else f"exp(mu={self.repair_rate!r})"


DETERMINISTIC = RepairModel.deterministic()


class Stream:
    """Counter-based uniform stream for one trial, consumed in blocks."""

    def __init__(self, seed: int, index: int) -> None:
        key = (seed & _SEED_MASK) | ((index & _SEED_MASK) << 64)
        self._gen = np.random.Generator(np.random.Philox(key=key))
        self._buf: list[float] = []

    def uniform(self) -> float:
        """Uniform on the open interval (0, 1)."""
        while True:
            if not self._buf:
                self._buf = self._gen.random(_BLOCK).tolist()
                self._buf.reverse()
            u = self._buf.pop()
            if u > 0.0:
                return u

    def exponential(self, rate: float) -> float:
        return -math.log(self.uniform()) / rate


def substream(seed: int, index: int) -> Stream:
    return Stream(seed, index)


def simulate_one(
    params: SystemParams,
    discipline: Discipline | str,
    model: RepairModel,
    stream: Stream,
) -> float:
    """One realization of the time to data loss."""
    discipline = Discipline.parse(discipline)
    lam, n, lost = params.failure_rate, params.n, params.absorbing
    parallel = discipline is Discipline.PARALLEL
    elapsed, state = 0.0, 0
    while state < lost:
        failure = stream.exponential((n - state) * lam)
        if state == 0:
            elapsed += failure
            state = 1
            continue
        if model.is_deterministic:
            repair = params.repair_time
        else:
            repair = stream.exponential(model.repair_rate)
        if failure < repair:
            elapsed += failure
            state += 1
        else:
            elapsed += repair
            state = 0 if parallel else state - 1
    return elapsed


def _run_block(params, discipline, model, seed, start, stop) -> list[float]:
    return [simulate_one(params, discipline, model, substream(seed, i)) for i in range(start, stop)]


def sample_times(
    params: SystemParams,
    discipline: Discipline | str,
    model: RepairModel,
    trials: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """Absorption times of trials ``0 .. trials-1`` in trial order."""
    discipline = Discipline.parse(discipline)
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise ParameterError(f"trials must be a positive integer, got {trials!r}")
    if int(seed) != seed or not 0 <= seed <= _SEED_MASK:
        raise ParameterError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    trials, seed = int(trials), int(seed)
    if workers <= 1 or trials < 2 * workers:
        return np.array(_run_block(params, discipline, model, seed, 0, trials))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_block, params, discipline, model, seed, int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:])
        ]
        blocks = [f.result() for f in futures]
    return np.array([t for block in blocks for t in block])


@dataclass(frozen=True)
class SimulationResult:
    trials: int
    mean: float
    std_error: float
    seed: int
    discipline: Discipline
    model: RepairModel
    samples: np.ndarray | None = None

    def z_score(self, expected: float) -> float:
        return (self.mean - expected) / self.std_error


def estimate_mtdl(
    params: SystemParams,
    discipline: Discipline | str,
    model: RepairModel = DETERMINISTIC,
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    keep_samples: bool = False,
) -> SimulationResult:
    """Sample mean and standard error of the time to data loss."""
    if isinstance(trials, bool) or int(trials) != trials or trials < 2:
        raise ParameterError(f"need at least 2 trials for a standard error, got {trials!r}")
    discipline = Discipline.parse(discipline)
    times = sample_times(params, discipline, model, trials, seed, workers)
    return SimulationResult(
        trials=int(trials),
        mean=float(times.mean()),
        std_error=float(times.std(ddof=1) / math.sqrt(trials)),
        seed=int(seed),
        discipline=discipline,
        model=model,
        samples=times if keep_samples else None,
    )


@dataclass(frozen=True)
class EmpiricalCdf:
    times: tuple[float, ...]
    values: tuple[float, ...]
    trials: int
    seed: int

    def sup_distance(self, other: Sequence[float]) -> float:
        return float(np.max(np.abs(np.asarray(self.values) - np.asarray(other, dtype=float))))


def empirical_cdf(samples: np.ndarray, t_grid: Sequence[float]) -> np.ndarray:
    ordered = np.sort(samples)
    return np.searchsorted(ordered, np.asarray(t_grid, dtype=float), side="right") / len(ordered)


def estimate_cdf(
    params: SystemParams,
    discipline: Discipline | str,
    model: RepairModel,
    t_grid: Sequence[float],
    trials: int,
    seed: int,
    workers: int = 1,
) -> EmpiricalCdf:
    """Fraction of trials with ``T <= t`` at each grid point."""
    grid = [float(t) for t in t_grid]
    if not grid or any(not math.isfinite(t) or t < 0.0 for t in grid):
        raise ParameterError("time grid must be nonempty, finite and nonnegative")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ParameterError("time grid must be strictly increasing")
    times = sample_times(params, discipline, model, trials, seed, workers)
    values = empirical_cdf(times, grid)
    return EmpiricalCdf(tuple(grid), tuple(float(v) for v in values), int(trials), int(seed))
