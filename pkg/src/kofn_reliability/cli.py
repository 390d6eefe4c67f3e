"""Command-line front end.

Exit status: 0 success, 1 validation failure, 2 usage error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from kofn_reliability.baselines import (
    ExponentialRepairParams,
    mtdl_angus,
    mtdl_chen,
    mtdl_det_approx,
    mtdl_exp_approx,
    mtdl_exponential_chain,
)
from kofn_reliability.errors import NumericalError, ParameterError, ReliabilityError
from kofn_reliability.inversion import invert_cdf
from kofn_reliability.kernels import Discipline, SystemParams
from kofn_reliability.simulator import DETERMINISTIC, RepairModel, estimate_mtdl
from kofn_reliability.transform import mtdl_embedded_chain, mtdl_lst_derivative
from kofn_reliability.validation import run_checks

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(ReliabilityError):
    pass


# --------------------------------------------------------------------------
# output


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def render(columns: Sequence[str], records: list[dict], fmt: str, meta: dict) -> str:
    if fmt == "json":
        doc = dict(meta)
        doc["records"] = [{c: r.get(c) for c in columns} for r in records]
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for r in records:
        writer.writerow([_csv_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# argument handling


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (math.isfinite(value) and value > 0.0):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text!r}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _system_flags(p: argparse.ArgumentParser, trep: bool = True) -> None:
    p.add_argument("--n", type=_positive_int, required=True, help="number of disks")
    p.add_argument("--k", type=_positive_int, required=True, help="disks needed to recover data")
    p.add_argument("--lambda", dest="lam", type=_positive_float, required=True,
                   help="per-disk failure rate (1/unit)")
    if trep:
        p.add_argument("--trep", type=_positive_float, help="deterministic repair time (unit)")


def _output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default: standard output)")
    p.add_argument("--unit", default="year", help="time unit label echoed in the output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kofn-rel",
        description="Reliability of k-out-of-n storage with deterministic repair.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mtdl", help="mean time to data loss")
    _system_flags(p)
    p.add_argument("--discipline", choices=("serial", "parallel", "both"), default="both")
    p.add_argument("--model", choices=("det", "exp"), default="det")
    p.add_argument("--mu", type=_positive_float, help="exponential repair rate (model=exp)")
    _output_flags(p)

    p = sub.add_parser("curve", help="CDF of the time to data loss")
    _system_flags(p)
    p.add_argument("--discipline", choices=("serial", "parallel"), required=True)
    p.add_argument("--tmax", type=_positive_float, required=True)
    p.add_argument("--points", type=_positive_int, required=True)
    _output_flags(p)

    p = sub.add_parser("sweep", help="MTDL against repair time (log-spaced)")
    _system_flags(p, trep=False)
    p.add_argument("--trep-min", type=_positive_float, required=True)
    p.add_argument("--trep-max", type=_positive_float, required=True)
    p.add_argument("--sweep-points", type=_positive_int, default=41)
    _output_flags(p)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the MTDL")
    _system_flags(p)
    p.add_argument("--discipline", choices=("serial", "parallel", "both"), default="both")
    p.add_argument("--model", choices=("det", "exp"), default="det")
    p.add_argument("--mu", type=_positive_float)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--workers", type=_positive_int, default=1)
    _output_flags(p)

    p = sub.add_parser("validate", help="run the cross-method consistency suite")
    p.add_argument("--n", dest="ns", type=_positive_int, action="append",
                   help="disk counts of the grid (repeatable)")
    p.add_argument("--product", dest="products", type=_positive_float, action="append",
                   help="lambda*t_rep values of the grid (repeatable)")
    p.add_argument("--out", default=None)
    return parser


def _disciplines(choice: str) -> list[Discipline]:
    return list(Discipline) if choice == "both" else [Discipline(choice)]


def _system(args, need_trep: bool = True) -> SystemParams | None:
    if not 0 < args.k < args.n:
        raise UsageError(f"need 0 < k < n, got n={args.n}, k={args.k}")
    if args.trep is None:
        if need_trep:
            raise UsageError("--trep is required")
        return None
    return SystemParams(args.n, args.k, args.lam, args.trep)


def _exp_params(args) -> ExponentialRepairParams | None:
    if args.model == "exp":
        if args.mu is None:
            raise UsageError("--mu is required with --model exp")
        return ExponentialRepairParams(args.n, args.k, args.lam, args.mu)
    if args.mu is not None:
        raise UsageError("--mu only applies with --model exp")
    return None


def _meta(command: str, args, **extra) -> dict:
    meta = {"command": command, "unit": args.unit, "n": args.n, "k": args.k, "lambda": args.lam}
    meta.update(extra)
    return meta


# --------------------------------------------------------------------------
# commands

MTDL_COLUMNS = (
    "discipline", "model", "trep", "mu", "mtdl_exact", "mtdl_lst", "approx", "mtdl_exp_exact", "unit",
)


def cmd_mtdl(args) -> str:
    exp = _exp_params(args)
    params = _system(args, need_trep=exp is None)
    records = []
    for d in _disciplines(args.discipline):
        rec: dict[str, Any] = {"discipline": d.value, "model": args.model, "unit": args.unit,
                               "trep": args.trep, "mu": args.mu}
        if params is not None:
            rec["mtdl_exact"] = mtdl_embedded_chain(params, d)
            rec["mtdl_lst"] = mtdl_lst_derivative(params, d)
            rec["approx"] = mtdl_det_approx(params)
        if exp is not None:
            rec["mtdl_exp_exact"] = mtdl_chen(exp) if d is Discipline.SERIAL else mtdl_angus(exp)
            rec["approx"] = mtdl_exp_approx(exp, d)
        records.append(rec)
    return render(MTDL_COLUMNS, records, args.format, _meta("mtdl", args))


def cmd_curve(args) -> str:
    params = _system(args)
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    grid = np.linspace(0.0, args.tmax, args.points)
    curve = invert_cdf(params, args.discipline, grid.tolist())
    records = [{"t": p.t, "cdf": p.cdf, "reliability": p.reliability} for p in curve.points]
    meta = _meta("curve", args, trep=args.trep, discipline=args.discipline,
                 method=curve.method, terms=curve.terms)
    return render(("t", "cdf", "reliability"), records, args.format, meta)


SWEEP_COLUMNS = ("trep", "mtdl_det_serial", "mtdl_det_parallel", "mtdl_exp_serial", "approx")


def sweep_records(n: int, k: int, lam: float, trep_min: float, trep_max: float, points: int) -> list[dict]:
    """One row per log-spaced repair time, ascending."""
    records = []
    for trep in np.geomspace(trep_min, trep_max, points).tolist():
        params = SystemParams(n, k, lam, trep)
        records.append({
            "trep": trep,
            "mtdl_det_serial": mtdl_embedded_chain(params, Discipline.SERIAL),
            "mtdl_det_parallel": mtdl_embedded_chain(params, Discipline.PARALLEL),
            "mtdl_exp_serial": mtdl_chen(ExponentialRepairParams.matching(params)),
            "approx": mtdl_det_approx(params),
        })
    return records


def cmd_sweep(args) -> str:
    if not 0 < args.k < args.n:
        raise UsageError(f"need 0 < k < n, got n={args.n}, k={args.k}")
    if not args.trep_min < args.trep_max:
        raise UsageError("--trep-min must be below --trep-max")
    if args.sweep_points < 2:
        raise UsageError("--sweep-points must be at least 2")
    records = sweep_records(args.n, args.k, args.lam, args.trep_min, args.trep_max, args.sweep_points)
    return render(SWEEP_COLUMNS, records, args.format, _meta("sweep", args))


SIMULATE_COLUMNS = (
    "discipline", "model", "trials", "seed", "mean", "std_error", "analytic", "z", "unit",
)


def cmd_simulate(args) -> str:
    if args.trials < 2:
        raise UsageError("--trials must be at least 2")
    exp = _exp_params(args)
    params = _system(args, need_trep=exp is None)
    if params is None:
        # exponential mode never reads the repair time
        params = SystemParams(args.n, args.k, args.lam, 1.0)
    model = DETERMINISTIC if exp is None else RepairModel.exponential(exp.repair_rate)
    records = []
    for d in _disciplines(args.discipline):
        result = estimate_mtdl(params, d, model, args.trials, args.seed, args.workers)
        analytic = mtdl_embedded_chain(params, d) if exp is None else mtdl_exponential_chain(exp, d)
        records.append({
            "discipline": d.value, "model": args.model, "trials": result.trials, "seed": result.seed,
            "mean": result.mean, "std_error": result.std_error, "analytic": analytic,
            "z": result.z_score(analytic), "unit": args.unit,
        })
    return render(SIMULATE_COLUMNS, records, args.format,
                  _meta("simulate", args, trep=args.trep, mu=args.mu))


def cmd_validate(args) -> tuple[str, int]:
    from kofn_reliability.validation import DEFAULT_NS, DEFAULT_PRODUCTS, grid

    cases = list(grid(args.ns or DEFAULT_NS, args.products or DEFAULT_PRODUCTS))
    results = run_checks(cases)
    failed = sum(not r.passed for r in results)
    lines = [r.line() for r in results]
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n", EXIT_VALIDATION if failed else EXIT_OK


COMMANDS = {"mtdl": cmd_mtdl, "curve": cmd_curve, "sweep": cmd_sweep, "simulate": cmd_simulate}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            text, status = cmd_validate(args)
        else:
            text, status = COMMANDS[args.command](args), EXIT_OK
    except (UsageError, ParameterError) as exc:
        parser.print_usage(sys.stderr)
        print(f"kofn-rel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ReliabilityError) as exc:
        print(f"kofn-rel: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    emit(text, args.out)
    return status


if __name__ == "__main__":
    sys.exit(main())
