"""Command-line front end: analyze | pmf | simulate | sweep | plan.

Results go to stdout (or ``--output``) as CSV (default) or a single JSON
object. Exit codes: 0 success, 2 invalid usage or parameters, 3 internal
consistency failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict

from . import __version__
from .absorption import cycle_length_pmf, expected_cycle_length, update_rate
from .accuracy import emse
from .aoi_series import nsaoi, second_moment_tail_bound, smallest_truncation
from .errors import ConsistencyError, TruncationLimit
from .model import validate_params
from .montecarlo import SimConfig, aggregate, replicate, simulate
from .planner import min_update_rate, sweep

log = logging.getLogger("threshold_aoi")


def _clean(x):
    """JSON-safe value: non-finite floats become null."""
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _cell(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else ""
    return str(x)


def render(fmt, command, parameters, result, columns, rows) -> str:
    if fmt == "json":
        envelope = {"command": command, "tool_version": __version__,
                    "parameters": parameters, "result": result}
        return json.dumps(_clean(envelope), indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _nsaoi_or_best(params, epsilon):
    try:
        return nsaoi(params, epsilon), False
    except TruncationLimit as exc:
        log.warning("%s; reporting the best interval reached", exc)
        return exc.best, True


def cmd_analyze(args):
    params = validate_params(args.p, args.q, args.T)
    bounded, truncated = _nsaoi_or_best(params, args.epsilon)
    row = {
        "lambda": update_rate(params),
        "expected_cycle_length": expected_cycle_length(params),
        "nsaoi": bounded.value,
        "nsaoi_lower": bounded.lower,
        "nsaoi_upper": bounded.upper,
        "ls": bounded.l_s,
        "emse": emse(params),
        "periodic": params.periodic,
        "truncated": truncated,
    }
    parameters = {"p": params.p, "q": params.q, "T": params.T, "epsilon": args.epsilon}
    return parameters, row, list(row), [row]


def pmf_length(params, epsilon) -> int:
    """Smallest ``l_max`` whose certified PMF second-moment tail is below ``epsilon``."""
    return smallest_truncation(lambda n: second_moment_tail_bound(params, n), epsilon)


def cmd_pmf(args):
    params = validate_params(args.p, args.q, args.T)
    epsilon = None
    if args.lmax is not None:
        if args.lmax < 1:
            raise ValueError(f"--lmax must be >= 1, got {args.lmax}")
        l_max = args.lmax
    else:
        epsilon = 1e-9 if args.epsilon is None else args.epsilon
        if not epsilon > 0:
            raise ValueError(f"--epsilon must be positive, got {epsilon}")
        l_max = pmf_length(params, epsilon)
    pmf = cycle_length_pmf(params, l_max)
    cum = pmf.cumulative()
    rows = [{"l": int(l), "probability": float(pr), "cumulative": float(c)}
            for l, pr, c in zip(pmf.lengths, pmf.probabilities, cum)]
    result = {"l_max": l_max, "tail_mass_bound": second_moment_tail_bound(params, l_max),
              "rows": rows}
    parameters = {"p": params.p, "q": params.q, "T": params.T,
                  "lmax": args.lmax, "epsilon": epsilon}
    return parameters, result, ["l", "probability", "cumulative"], rows


SIM_COLUMNS = ["replication", "seed", "slots_run", "warmup_slots", "measured_slots",
               "cycles_completed", "partial_cycle_slots", "empirical_update_rate",
               "empirical_nsaoi", "empirical_mse", "mean_cycle_length",
               "stderr_update_rate", "stderr_nsaoi", "stderr_mse",
               "stderr_mean_cycle_length"]


def cmd_simulate(args):
    params = validate_params(args.p, args.q, args.T)
    if args.replications < 1:
        raise ValueError(f"--replications must be >= 1, got {args.replications}")
    config = SimConfig(params, seed=args.seed, horizon_slots=args.slots,
                       target_cycles=args.cycles, warmup_slots=args.warmup,
                       debug=args.debug)
    if args.replications == 1:
        reports = [simulate(config)]
    else:
        reports = replicate(config, args.replications)
    rows = []
    for i, rep in enumerate(reports):
        d = asdict(rep)
        d["replication"] = i
        d["cycle_histogram"] = {str(k): v for k, v in sorted(rep.cycle_histogram.items())}
        rows.append(d)
    result = {"reports": [{k: r[k] for k in SIM_COLUMNS + ["cycle_histogram"]} for r in rows]}
    if len(reports) > 1:
        result["aggregate"] = aggregate(reports)
    parameters = {"p": params.p, "q": params.q, "T": params.T, "seed": args.seed,
                  "slots": args.slots, "cycles": args.cycles,
                  "warmup": config.warmup_slots, "replications": args.replications}
    return parameters, result, SIM_COLUMNS, rows


SWEEP_COLUMNS = ["T", "lambda", "nsaoi", "nsaoi_lower", "nsaoi_upper", "ls", "emse", "periodic"]


def sweep_record(row):
    return {"T": row.T, "lambda": row.lambda_, "nsaoi": row.nsaoi.value,
            "nsaoi_lower": row.nsaoi.lower, "nsaoi_upper": row.nsaoi.upper,
            "ls": row.nsaoi.l_s, "emse": row.emse, "periodic": row.periodic,
            "truncated": row.truncated}


def cmd_sweep(args):
    rows = [sweep_record(r) for r in sweep(args.p, args.q, args.tmin, args.tmax, args.epsilon)]
    parameters = {"p": args.p, "q": args.q, "tmin": args.tmin, "tmax": args.tmax,
                  "epsilon": args.epsilon}
    return parameters, {"rows": rows}, SWEEP_COLUMNS, rows


def cmd_plan(args):
    res = min_update_rate(args.p, args.q, args.nsaoi_max, args.emse_max,
                          args.tmax, args.epsilon)
    row = {"feasible": res.feasible, "chosen_T": res.chosen_T,
           "lambda_min": res.lambda_min, "binding_constraint": res.binding_constraint}
    result = dict(row, feasible_T=list(res.feasible_T), gaps=list(res.gaps))
    parameters = {"p": args.p, "q": args.q, "nsaoi_max": args.nsaoi_max,
                  "emse_max": args.emse_max, "tmax": args.tmax, "epsilon": args.epsilon}
    return parameters, result, list(row), [row]


def _positive_float(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--output", metavar="FILE", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="threshold-aoi", parents=[common],
        description="Update rate, AoI and estimation error of a threshold-triggered sensor.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def walk_args(p, with_T=True):
        p.add_argument("--p", type=float, required=True, help="probability of a +1 step")
        p.add_argument("--q", type=float, required=True, help="probability of a -1 step")
        if with_T:
            p.add_argument("--T", type=int, required=True, help="update threshold")

    a = sub.add_parser("analyze", parents=[common], help="rate, NSAoI and EMSE for one T")
    walk_args(a)
    a.add_argument("--epsilon", type=_positive_float, default=1e-6)
    a.set_defaults(func=cmd_analyze)

    m = sub.add_parser("pmf", parents=[common], help="cycle-length distribution")
    walk_args(m)
    g = m.add_mutually_exclusive_group()
    g.add_argument("--lmax", type=int)
    g.add_argument("--epsilon", type=_positive_float)
    m.set_defaults(func=cmd_pmf)

    s = sub.add_parser("simulate", parents=[common], help="seeded Monte Carlo run")
    walk_args(s)
    s.add_argument("--seed", type=int, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--slots", type=int)
    g.add_argument("--cycles", type=int)
    s.add_argument("--warmup", type=int)
    s.add_argument("--replications", type=int, default=1)
    s.add_argument("--debug", action="store_true", help="check per-cycle invariants")
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", parents=[common], help="tabulate metrics over a range of T")
    walk_args(w, with_T=False)
    w.add_argument("--tmin", type=int, required=True)
    w.add_argument("--tmax", type=int, required=True)
    w.add_argument("--epsilon", type=_positive_float, default=1e-6)
    w.set_defaults(func=cmd_sweep)

    n = sub.add_parser("plan", parents=[common], help="minimum update rate under ceilings")
    walk_args(n, with_T=False)
    n.add_argument("--nsaoi-max", type=float, required=True)
    n.add_argument("--emse-max", type=float, required=True)
    n.add_argument("--tmax", type=int, default=64)
    n.add_argument("--epsilon", type=_positive_float, default=1e-6)
    n.set_defaults(func=cmd_plan)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help, --version
        return exc.code
    fmt = getattr(args, "format", "csv")
    try:
        parameters, result, columns, rows = args.func(args)
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    text = render(fmt, args.command, parameters, result, columns, rows)
    output = getattr(args, "output", None)
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
