"""Cross-method consistency checks run by ``kofn-rel validate``."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable

from kofn_reliability.baselines import (
    ExponentialRepairParams,
    mtdl_angus,
    mtdl_chen,
    mtdl_det_approx,
    mtdl_exp_approx,
)
from kofn_reliability.errors import ReliabilityError
from kofn_reliability.kernels import Discipline, SystemParams
from kofn_reliability.transform import (
    Method,
    absorption_lst,
    mtdl_embedded_chain,
    mtdl_lst_derivative,
)

DEFAULT_NS = (2, 3, 5, 10)
DEFAULT_PRODUCTS = (0.01, 0.1, 1.0, 5.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}"


def grid(ns: Iterable[int] = DEFAULT_NS, products: Iterable[float] = DEFAULT_PRODUCTS, rate: float = 1.0):
    """All ``SystemParams`` with ``n`` in ``ns``, every valid ``k`` and ``lam t_rep`` in ``products``."""
    products = tuple(products)
    for n in ns:
        for k in range(1, n):
            for x in products:
                yield SystemParams(n, k, rate, x / rate)


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def check_normalization(cases) -> CheckResult:
    worst = max(
        abs(absorption_lst(p, d, 0.0) - 1.0) for p in cases for d in Discipline
    )
    return CheckResult("normalization", worst <= 1e-10, f"max |P(0)-1| = {worst:.2e}")


def check_method_agreement(cases, points: int = 20, seed: int = 2024) -> CheckResult:
    rng = random.Random(seed)
    worst = 0.0
    for p in cases:
        top = 10.0 * p.n * p.failure_rate
        for d in Discipline:
            methods = [Method.DETERMINANT_RATIO]
            if d is Discipline.PARALLEL:
                methods.append(Method.SIMPLIFIED_PARALLEL)
            for _ in range(points):
                s = complex(rng.uniform(0.0, top), rng.uniform(-top, top))
                ref = absorption_lst(p, d, s)
                for m in methods:
                    worst = max(worst, _rel(ref, absorption_lst(p, d, s, m)))
    return CheckResult("method-agreement", worst <= 1e-10, f"max relative gap = {worst:.2e}")


def check_mtdl_crosscheck(cases) -> CheckResult:
    worst = max(
        _rel(mtdl_embedded_chain(p, d), mtdl_lst_derivative(p, d)) for p in cases for d in Discipline
    )
    return CheckResult("mtdl-crosscheck", worst <= 1e-6, f"max relative gap = {worst:.2e}")


def check_parallel_dominates(cases) -> CheckResult:
    bad = []
    for p in cases:
        serial = mtdl_embedded_chain(p, Discipline.SERIAL)
        parallel = mtdl_embedded_chain(p, Discipline.PARALLEL)
        if p.n - p.k == 1:
            ok = _rel(serial, parallel) <= 1e-12
        else:
            ok = parallel >= serial
        if not ok:
            bad.append((p.n, p.k, p.repair_time))
    return CheckResult("parallel>=serial", not bad, f"{len(bad)} violations")


def repair_resolvable(p: SystemParams) -> bool:
    """Whether a repair can complete with probability visible in binary64.

    Beyond this the MTDL equals the no-repair mean to the last bit and no
    longer moves with ``t_rep``.
    """
    return p.k * p.failure_rate * p.repair_time < 27.0


def check_monotonicity(cases) -> CheckResult:
    bad = 0
    for p in cases:
        for d in Discipline:
            base = mtdl_embedded_chain(p, d)
            slower = mtdl_embedded_chain(SystemParams(p.n, p.k, p.failure_rate, p.repair_time * 1.5), d)
            flakier = mtdl_embedded_chain(SystemParams(p.n, p.k, p.failure_rate * 1.5, p.repair_time), d)
            in_trep = slower < base if repair_resolvable(p) else slower <= base
            bad += not (in_trep and flakier < base)
    return CheckResult("monotonicity", bad == 0, f"{bad} violations")


def check_deterministic_asymptote() -> CheckResult:
    rate = 4.0
    gaps = {}
    for d in Discipline:
        gaps[d] = []
        for x in (1e-1, 1e-2, 1e-3, 1e-4):
            p = SystemParams(10, 6, rate, x / rate)
            gaps[d].append(abs(mtdl_embedded_chain(p, d) / mtdl_det_approx(p) - 1.0))
    ok = all(
        g[2] < 0.05 and g[3] < 0.01 and all(a > b for a, b in zip(g, g[1:])) for g in gaps.values()
    )
    detail = ", ".join(f"{d.value}: {g[2]:.2e}@1e-3 {g[3]:.2e}@1e-4" for d, g in gaps.items())
    return CheckResult("deterministic-asymptote", ok, detail)


def check_exponential_baselines() -> CheckResult:
    p = ExponentialRepairParams(10, 6, 4.0, 4.0e4)
    ratio = mtdl_angus(p) / mtdl_chen(p)
    ok = abs(ratio / math.factorial(p.n - p.k) - 1.0) < 0.02
    return CheckResult("angus/chen-ratio", ok, f"ratio = {ratio:.6g} vs (n-k)! = 24")


def check_approximation_identity(cases) -> CheckResult:
    worst = max(
        _rel(mtdl_det_approx(p), mtdl_exp_approx(ExponentialRepairParams.matching(p), Discipline.SERIAL))
        for p in cases
    )
    return CheckResult("approx-identity", worst <= 1e-12, f"max relative gap = {worst:.2e}")


def check_chen_asymptotics() -> CheckResult:
    errors = []
    for ratio in (1e2, 1e3, 1e4):
        p = ExponentialRepairParams(10, 6, 4.0, 4.0 * ratio)
        errors.append(abs(mtdl_chen(p) / mtdl_exp_approx(p, Discipline.SERIAL) - 1.0))
    ok = all(a > b for a, b in zip(errors, errors[1:]))
    return CheckResult("chen-asymptotics", ok, "errors " + ", ".join(f"{e:.2e}" for e in errors))


def run_checks(cases=None) -> list[CheckResult]:
    """Run every check; a check that raises is reported as failed."""
    cases = list(grid()) if cases is None else list(cases)
    suite: list[tuple[str, Callable[[], CheckResult]]] = [
        ("normalization", lambda: check_normalization(cases)),
        ("method-agreement", lambda: check_method_agreement(cases)),
        ("mtdl-crosscheck", lambda: check_mtdl_crosscheck(cases)),
        ("parallel>=serial", lambda: check_parallel_dominates(cases)),
        ("monotonicity", lambda: check_monotonicity(cases)),
        ("deterministic-asymptote", check_deterministic_asymptote),
        ("angus/chen-ratio", check_exponential_baselines),
        ("approx-identity", lambda: check_approximation_identity(cases)),
        ("chen-asymptotics", check_chen_asymptotics),
    ]
    results = []
    for name, run in suite:
        try:
            results.append(run())
        except ReliabilityError as exc:
            results.append(CheckResult(name, False, f"raised {type(exc).__name__}: {exc}"))
    return results
