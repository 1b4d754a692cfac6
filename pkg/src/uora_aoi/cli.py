"""Command-line entry point: analyze | simulate | optimize | sweep | roots."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

import numpy as np

from .analytics import average_aoi
from .bounds import aaoi_lower_bound_m0, approx_lower_bound, stationary_roots
from .combinatorics import ConsistencyError
from .config import ConfigError, NetworkConfig, load_scenario
from .optimizer import efficient_search_alg1, efficient_search_alg2, exhaustive_search
from .simulator import (DEFAULT_REPLICATIONS, DEFAULT_SLOTS, DEFAULT_WARMUP, SimConfig,
                        run_simulation)
from .steady_state import DegenerateDistributionError, FixedPointError, SingularSystemError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3

ANALYTIC_COLUMNS = ["n", "l", "lambda", "eocw_min", "m", "q", "rho",
                    "e_v", "e_v2", "e_k", "e_k2", "e_s", "aaoi"]
SIM_COLUMNS = ["sim_aaoi", "sim_ci95", "sim_q", "sim_rho"]
SWEEP_PARAMETERS = ("lambda", "eocw_min", "m", "n_stas", "w0_exponent")

log = logging.getLogger(__name__)


class UsageError(Exception):
    pass


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return "%.10g" % value
    return value


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def render(rows: list[dict], columns: list[str], header: dict, fmt: str,
           extra: dict | None = None) -> str:
    if fmt == "json":
        doc = {"config": header, "rows": rows}
        if extra:
            doc.update(extra)
        return json.dumps(_jsonable(doc), indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(_jsonable(header), sort_keys=True) + "\n")
    for key, value in (extra or {}).items():
        buf.write(f"# {key}: {json.dumps(_jsonable(value))}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def resolve_config(args, eocw_default: int | None = None,
                   fill: dict | None = None) -> NetworkConfig:
    """Scenario file values, overridden by any flags given on the command line.

    ``fill`` supplies values for keys that neither source provides.
    """
    doc = load_scenario(args.config) if args.config else {}
    flags = {"n_stas": args.n, "n_rus": args.l, "arrival_rate": args.lam,
             "eocw_min": args.eocw_min, "m": args.m}
    doc.update({k: v for k, v in flags.items() if v is not None})
    if "arrival_rate" not in doc:
        doc["arrival_rate"] = 1.0
    if "m" not in doc:
        doc["m"] = 0
    if "eocw_min" not in doc and eocw_default is not None:
        doc["eocw_min"] = eocw_default
    for key, value in (fill or {}).items():
        doc.setdefault(key, value)
    return NetworkConfig.from_dict(doc)


def analytic_row(config: NetworkConfig) -> tuple[dict, np.ndarray]:
    b = average_aoi(config)
    row = {"n": config.n_stas, "l": config.n_rus, "lambda": config.arrival_rate,
           "eocw_min": config.eocw_min, "m": config.m, "q": b.steady.q, "rho": b.steady.rho,
           "e_v": b.ev, "e_v2": b.ev2, "e_k": b.ek, "e_k2": b.ek2, "e_s": b.es, "aaoi": b.aaoi}
    return row, b.steady.mu


def _sim_config(args, config: NetworkConfig) -> SimConfig:
    return SimConfig(network=config, slots=args.slots, warmup=args.warmup, seed=args.seed,
                     policy=args.policy, replications=args.reps, workers=args.workers)


def cmd_analyze(args) -> int:
    config = resolve_config(args)
    row, mu = analytic_row(config)
    _emit(args, render([row], ANALYTIC_COLUMNS, config.to_dict(), args.format,
                       extra={"mu": mu}))
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = resolve_config(args)
    sim = _sim_config(args, config)
    stats = run_simulation(sim)
    row = {"n": config.n_stas, "l": config.n_rus, "lambda": config.arrival_rate,
           "eocw_min": config.eocw_min, "m": config.m, "policy": sim.policy,
           "slots": sim.slots, "warmup": sim.warmup, "seed": sim.seed,
           "reps": sim.replications, **stats.summary()}
    columns = list(row)
    header = {**config.to_dict(), "policy": sim.policy, "slots": sim.slots,
              "warmup": sim.warmup, "seed": sim.seed, "reps": sim.replications}
    extra = {"active_count_hist": stats.active_count_hist} if args.format == "json" else None
    _emit(args, render([row], columns, header, args.format, extra=extra))
    return EXIT_OK


def cmd_optimize(args) -> int:
    config = resolve_config(args, eocw_default=0)
    n, l, lam = config.n_stas, config.n_rus, config.arrival_rate
    if args.method == "exhaustive":
        result = exhaustive_search(n, l, lam)
    elif args.method == "alg1":
        if lam != 1.0:
            raise UsageError("alg1 applies to generate-at-will traffic (lambda = 1)")
        result = efficient_search_alg1(n, l)
    else:
        result = efficient_search_alg2(n, l, lam)
    rows = [{"method": result.method, "w0": e.w0, "eocw_min": int(math.log2(e.w0)), "m": e.m,
             "aaoi": e.aaoi, "best": (e.w0, e.m) == (result.w0_star, result.m_star)}
            for e in result.evaluations]
    summary = {"w0_star": result.w0_star, "m_star": result.m_star,
               "predicted_aaoi": result.predicted_aaoi, "evaluations": len(rows),
               "edge_of_range": result.edge_of_range,
               "failed": [list(f) for f in result.failed]}
    header = {"n_stas": n, "n_rus": l, "arrival_rate": lam, "method": args.method}
    _emit(args, render(rows, ["method", "w0", "eocw_min", "m", "aaoi", "best"], header,
                       args.format, extra={"result": summary}))
    return EXIT_OK


def sweep_values(start: float, stop: float, step: float, integral: bool) -> list:
    if step <= 0:
        raise UsageError("--step must be positive")
    if start > stop:
        raise UsageError("--from must not exceed --to")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    values = [round(start + k * step, 12) for k in range(count)]
    if integral:
        if any(not float(v).is_integer() for v in values):
            raise UsageError("integer parameters need integral --from/--step")
        values = [int(v) for v in values]
    return values


def _swept(base: NetworkConfig, parameter: str, value) -> NetworkConfig:
    if parameter == "lambda":
        return base.replace(arrival_rate=float(value))
    if parameter in ("eocw_min", "w0_exponent"):
        return base.replace(eocw_min=value)
    if parameter == "m":
        return base.replace(max_backoff_level=value)
    return base.replace(n_stas=value)


def cmd_sweep(args) -> int:
    values = sweep_values(args.start, args.stop, args.step, args.param != "lambda")
    key = {"lambda": "arrival_rate", "w0_exponent": "eocw_min"}.get(args.param, args.param)
    base = resolve_config(args, eocw_default=0, fill={key: values[0]})
    with_bound = args.param == "w0_exponent"
    if with_bound and (base.m != 0 or base.arrival_rate != 1.0):
        raise UsageError("w0_exponent sweeps the m = 0, lambda = 1 bound; use eocw_min otherwise")
    configs = [_swept(base, args.param, v) for v in values]
    rows = []
    for config in configs:
        row, _ = analytic_row(config)
        if with_bound:
            row["aaoi_lb"] = aaoi_lower_bound_m0(config.n_stas, config.n_rus, config.w0)
        if args.simulate:
            stats = run_simulation(_sim_config(args, config))
            row.update({k: stats.summary()[k] for k in SIM_COLUMNS})
        rows.append(row)
    columns = ANALYTIC_COLUMNS + (["aaoi_lb"] if with_bound else [])
    columns += SIM_COLUMNS if args.simulate else []
    header = {**base.to_dict(), "sweep": args.param, "from": args.start, "to": args.stop,
              "step": args.step}
    if args.simulate:
        header.update(policy=args.policy, slots=args.slots, warmup=args.warmup,
                      seed=args.seed, reps=args.reps)
    _emit(args, render(rows, columns, header, args.format))
    return EXIT_OK


def cmd_roots(args) -> int:
    if args.n is None or args.l is None:
        raise UsageError("roots needs --n and --l")
    n, l = args.n, args.l
    if n < 2 or l < 2:
        raise UsageError("roots needs n >= 2 and l >= 2")
    roots = stationary_roots(n, l)
    grid = np.unique(np.concatenate([np.logspace(0, args.max_exponent * math.log10(2),
                                                 args.points),
                                     1.0 + l * np.arange(1, (2**args.max_exponent - 1) // l + 1)]))
    rows = [{"w": w, "lb_bar": aaoi_lower_bound_m0(n, l, float(w)),
             "lb_hat": approx_lower_bound(n, l, float(w), exact_power=True),
             "lb_tilde": approx_lower_bound(n, l, float(w))} for w in grid]
    summary = {"regime": roots.regime, "b": roots.b_coeff, "r1": roots.r1, "r2": roots.r2,
               "r3": roots.r3}
    _emit(args, render(rows, ["w", "lb_bar", "lb_hat", "lb_tilde"], {"n_stas": n, "n_rus": l},
                       args.format, extra={"roots": summary}))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario file; flags override its values")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--n", type=int, help="number of STAs")
    common.add_argument("--l", type=int, help="number of RA RUs")
    common.add_argument("--lambda", dest="lam", type=float, help="per-slot arrival rate")
    common.add_argument("--eocw-min", dest="eocw_min", type=int)
    common.add_argument("--m", type=int, help="maximum backoff level")
    common.add_argument("-v", "--verbose", action="store_true")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--policy", choices=("uora", "rr", "ma", "round-robin", "max-aoi"),
                     default="uora")
    sim.add_argument("--slots", type=int, default=DEFAULT_SLOTS)
    sim.add_argument("--warmup", type=int, default=DEFAULT_WARMUP)
    sim.add_argument("--seed", type=int, default=1)
    sim.add_argument("--reps", type=int, default=DEFAULT_REPLICATIONS)
    sim.add_argument("--workers", type=int, default=1)

    parser = _Parser(prog="uora-aoi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("analyze", parents=[common], help="analytic steady state and AAoI")
    sub.add_parser("simulate", parents=[common, sim], help="slot-level Monte Carlo")
    p = sub.add_parser("optimize", parents=[common], help="search (W0, m)")
    p.add_argument("--method", choices=("exhaustive", "alg1", "alg2"), default="exhaustive")
    p = sub.add_parser("sweep", parents=[common, sim], help="one row per parameter value")
    p.add_argument("--param", choices=SWEEP_PARAMETERS, required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--simulate", action="store_true", help="add simulated columns")
    p = sub.add_parser("roots", parents=[common], help="stationary points and bound curves")
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--max-exponent", type=int, default=9)
    return parser


COMMANDS = {"analyze": cmd_analyze, "simulate": cmd_simulate, "optimize": cmd_optimize,
            "sweep": cmd_sweep, "roots": cmd_roots}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except (FixedPointError, SingularSystemError, DegenerateDistributionError,
            ConsistencyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (ConfigError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

if __name__ == "__main__":
    sys.exit(main())
