"""Command-line front end.

Every subcommand writes either CSV (header row, floats in shortest
round-trip form) or JSON matching ``schemas/output.schema.json``.  Output
depends only on the arguments, never on ``--workers``.

Exit status: 0 on success, 1 on a runtime failure (or a failed ``accept``),
2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__, oracles
from .acceptance import PROFILES, run_suite
from .empirical import RegimeSpec, grid_values, path_from_arrays, sup_norm, uniform_grid
from .engine import ReinforcementParams, advance_to, init, iter_checkpoints, snapshot
from .errors import ReinforcedEPError
from .harness import McPlan, Report, growth_check, run_plan, to_jsonable, yule_frequency_check
from .limits import estimate_xp, sample_bp_bridge, sample_brownian_bridge
from .rng import child_seed, replicate_seed
from .walks import StepSpec, regime_report

SEED_ENV = "REINFORCED_EP_SEED"


# ------------------------------------------------------------ argument types

def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < p < 1.0:
        raise argparse.ArgumentTypeError(f"p must lie strictly between 0 and 1, got {text}")
    return p


def _positive_int(text: str) -> int:
    """Accepts plain integers and exact powers like ``1e6``."""
    try:
        v = int(text)
    except ValueError:
        try:
            f = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if not f.is_integer():
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        v = int(f)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return v


def _int_list(text: str) -> list[int]:
    return [_positive_int(t) for t in text.split(",") if t]


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    return _seed(raw)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None,
                        help=f"master seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")
    common.add_argument("--out", default="-", help="output file, '-' for stdout (default)")
    common.add_argument("--timing", action="store_true",
                        help="include wall times in JSON reports (breaks byte-identical output)")
    common.add_argument("--workers", type=_positive_int, default=1,
                        help="worker threads; output does not depend on it (default 1)")

    parser = argparse.ArgumentParser(prog="reinforced-ep",
                                     description="Simon's reinforcement scheme and its empirical processes.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("simulate", parents=[common], help="cluster snapshots of one run")
    s.add_argument("--p", type=_probability, required=True)
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--checkpoints", type=_int_list, default=None,
                   help="comma-separated ascending steps (default: n)")
    s.add_argument("--replicates", type=_positive_int, default=1)

    s = sub.add_parser("moments", parents=[common], help="exact E[S^2(k)] for k = 1..n")
    s.add_argument("--p", type=_probability, required=True)
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--method", choices=("closed_form", "recursion"), default="closed_form")

    s = sub.add_parser("empirical", parents=[common], help="rescaled empirical process on a grid")
    s.add_argument("--p", type=_probability, required=True)
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--grid", type=_positive_int, default=2048, help="grid points (default 2048)")

    s = sub.add_parser("bridge", parents=[common], help="Brownian bridge or jump-bridge samples")
    s.add_argument("--kind", choices=("brownian", "bp"), default="brownian")
    s.add_argument("--p", type=_probability, default=None, help="reinforcement parameter (bp only)")
    s.add_argument("--n", type=_positive_int, default=10**5, help="steps used to estimate jump sizes (bp only)")
    s.add_argument("--grid", type=_positive_int, default=2048)
    s.add_argument("--replicates", type=_positive_int, default=1, help="number of sample paths")

    s = sub.add_parser("regime-scan", parents=[common], help="growth exponent of E[S^2] over checkpoints")
    s.add_argument("--p", type=_probability, required=True)
    s.add_argument("--checkpoints", type=_int_list, default=[10**3, 10**4, 10**5, 10**6])
    s.add_argument("--replicates", type=_positive_int, default=200)
    s.add_argument("--expected", type=float, default=None,
                   help="target slope (default: 1 for p <= 1/2, 2p above)")
    s.add_argument("--tolerance", type=float, default=0.05)

    s = sub.add_parser("yule", parents=[common], help="cluster-size frequencies against Yule-Simon")
    s.add_argument("--p", type=_probability, required=True)
    s.add_argument("--n", type=_positive_int, default=10**5)
    s.add_argument("--replicates", type=_positive_int, default=200)
    s.add_argument("--k-max", type=_positive_int, default=5)

    s = sub.add_parser("walk", parents=[common], help="variance of the rescaled elephant random walk")
    s.add_argument("--p", type=_probability, required=True)
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--replicates", type=_positive_int, default=1000)

    s = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    s.add_argument("--profile", choices=PROFILES, default="quick")
    s.add_argument("--only", type=_int_list, default=None, help="comma-separated criterion numbers")
    return parser


# ------------------------------------------------------------------ output

def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return json.dumps(v, sort_keys=True)


def _table_text(fmt: str, command: str, columns: list[str], rows: list[list], meta: dict) -> str:
    if fmt == "json":
        doc = {"command": command, "columns": columns,
               "rows": [[to_jsonable(v) for v in r] for r in rows], "meta": to_jsonable(meta)}
        return json.dumps(doc, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


_REPORT_COLUMNS = ["test", "statistic", "estimate", "target", "tolerance", "pass"]


def _reports_text(fmt: str, command: str, reports: list[Report], extra: Optional[dict] = None,
                  timing: bool = False) -> str:
    """Reports as JSON, or one CSV row each.

    Wall time is the one field that changes between identical runs; it is
    written as null unless ``timing`` is set, and never appears in CSV.
    """
    if fmt == "json":
        dicts = [r.to_dict() for r in reports]
        if not timing:
            for d in dicts:
                d["wall_time"] = None
        doc = {"command": command, "passed": all(r.passed for r in reports), "reports": dicts}
        doc.update(extra or {})
        return json.dumps(doc, sort_keys=True) + "\n"
    rows = [[d[c] for c in _REPORT_COLUMNS] for d in (r.to_dict() for r in reports)]
    return _table_text("csv", command, _REPORT_COLUMNS, rows, {})


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------- commands

def _cmd_simulate(a) -> tuple[str, int]:
    cps = a.checkpoints or [a.n]
    if max(cps) > a.n:
        a.n = max(cps)
    rows = []
    for r in range(a.replicates):
        seed = a.seed if a.replicates == 1 else replicate_seed(a.seed, r)
        state = init(ReinforcementParams(a.p, a.n, seed))
        for st in iter_checkpoints(state, cps):
            snap = snapshot(st)
            hist = [[int(k), int(c)] for k, c in sorted(snap.histogram_dict().items())]
            rows.append([r, snap.step, snap.innovations, snap.s2, snap.max_count, hist])
    cols = ["replicate", "step", "innovations", "s2", "max_cluster", "histogram"]
    return _table_text(a.format, "simulate", cols, rows, {"p": a.p, "seed": a.seed}), 0


def _cmd_moments(a) -> tuple[str, int]:
    table = oracles.moment_table(a.p, a.n, a.method)
    rows = [[k, table.entries[k]] for k in sorted(table.entries)]
    return _table_text(a.format, "moments", ["n", "expected_s2"], rows, {"p": a.p, "method": a.method}), 0


def _cmd_empirical(a) -> tuple[str, int]:
    spec = RegimeSpec(a.p)
    norm = spec.scale(a.n)
    st = advance_to(init(ReinforcementParams(a.p, a.n, a.seed)), a.n)
    values, counts = st.values, st.counts
    xs = uniform_grid(a.grid)
    g = grid_values(values, counts, norm, a.grid)
    path = path_from_arrays(values, counts, a.n, norm)
    sup = sup_norm(path)
    meta = {"p": a.p, "n": a.n, "seed": a.seed, "norm": norm, "regime": spec.regime, "sup_norm": sup}
    if a.format == "json":
        meta["jumps"] = [[x, w] for x, w in zip(path.locations.tolist(), path.weights.tolist())]
    if a.format == "csv":
        sys.stderr.write(f"sup_norm={sup!r}\n")
    return _table_text(a.format, "empirical", ["x", "value"], [[x, v] for x, v in zip(xs, g)], meta), 0


def _cmd_bridge(a) -> tuple[str, int]:
    rows = []
    meta = {"kind": a.kind, "grid": a.grid, "seed": a.seed}
    if a.kind == "bp":
        if a.p is None:
            raise ReinforcedEPError("--kind bp needs --p")
        xp = estimate_xp(ReinforcementParams(a.p, a.n, child_seed(a.seed, "jump-sizes")))
        meta.update(p=a.p, n=a.n, jumps=int(xp.entries.size), sum_squares=xp.sum_squares())
    for r in range(a.replicates):
        seed = replicate_seed(a.seed, r)
        b = sample_bp_bridge(xp, a.grid, seed) if a.kind == "bp" else sample_brownian_bridge(a.grid, seed)
        rows.extend([r, x, v] for x, v in zip(b.grid, b.values))
    return _table_text(a.format, "bridge", ["sample", "x", "value"], rows, meta), 0


def _cmd_regime_scan(a) -> tuple[str, int]:
    expected = a.expected if a.expected is not None else max(1.0, 2.0 * a.p)
    r = growth_check(a.p, a.checkpoints, a.replicates, a.seed, expected, a.tolerance, a.workers)
    return _reports_text(a.format, "regime-scan", [r], timing=a.timing), 0


def _cmd_yule(a) -> tuple[str, int]:
    r = yule_frequency_check(a.p, a.n, a.replicates, a.k_max, a.seed, workers=a.workers)
    return _reports_text(a.format, "yule", [r], timing=a.timing), 0


def _cmd_walk(a) -> tuple[str, int]:
    """CSV: the walk endpoint of every replicate.  JSON: the regime report."""
    spec = StepSpec.plus_minus_one()
    if a.format == "csv":
        plan = McPlan(ReinforcementParams(a.p, a.n, 0), a.replicates, (a.n,), "walk_endpoint", a.seed,
                      step_spec=spec)
        ends = run_plan(plan, a.workers).values()
        return _table_text("csv", "walk", ["replicate", "n", "S_hat"],
                           [[r, a.n, v] for r, v in enumerate(ends)], {}), 0
    r = regime_report(a.p, spec, a.n, a.replicates, a.seed, a.workers)
    return _reports_text("json", "walk", [r], timing=a.timing), 0


def _cmd_accept(a) -> tuple[str, int]:
    reports = run_suite(a.profile, a.workers, a.only,
                        echo=lambda line: (sys.stderr.write(line + "\n"), sys.stderr.flush()))
    ok = all(r.passed for r in reports)
    return _reports_text(a.format, "accept", reports, {"profile": a.profile}, a.timing), 0 if ok else 1


_COMMANDS = {"simulate": _cmd_simulate, "moments": _cmd_moments, "empirical": _cmd_empirical,
             "bridge": _cmd_bridge, "regime-scan": _cmd_regime_scan, "yule": _cmd_yule,
             "walk": _cmd_walk, "accept": _cmd_accept}


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse and validate; exits with status 2 on a usage error."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        try:
            args.seed = _default_seed()
        except argparse.ArgumentTypeError as exc:
            parser.error(f"${SEED_ENV}: {exc}")
    return args


def dispatch(args: argparse.Namespace) -> int:
    try:
        text, status = _COMMANDS[args.command](args)
        _emit(text, args.out)
    except (ReinforcedEPError, OSError) as exc:
        sys.stderr.write(f"reinforced-ep: error: {exc}\n")
        return 1
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    return dispatch(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
