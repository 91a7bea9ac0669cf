"""Command-line front end.

Exit codes: 0 success, 2 usage or input error, 3 computational error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import perturbation as pt
from .errors import ComputationError, QWSearchError
from .graphs import build_family, full_hamiltonian, load_edge_list
from .quotient import equitable_partition, family_quotient, lift, quotient, superposition_state
from .spectral import eigh, evolve_many, overlap_sweep, spectral_gap, success_curve

VERIFY_MAX_VERTICES = 4096
VERIFY_TOL = 1e-10
TABLE1_DEFAULT = list(range(10, 101, 10))


class UsageError(Exception):
    pass


def _common(parser: argparse.ArgumentParser, gamma: bool = True) -> None:
    parser.add_argument("--family", choices=["complete", "simplex", "hypercube", "file"], required=True)
    parser.add_argument("--size", type=int, help="N, M or n depending on the family")
    parser.add_argument("--input", type=Path, help="edge-list file for --family file")
    parser.add_argument("--marked", type=int)
    parser.add_argument("--adjacency", action="store_true",
                        help="use -gamma*A even for non-regular graphs")
    if gamma:
        parser.add_argument("--gamma", type=float)
    parser.add_argument("--format", choices=["csv", "json"], default=None)
    parser.add_argument("--output", type=Path)


def _split_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cutoff", type=float)
    parser.add_argument("--mask", type=str, help='positions sent to h1, e.g. "0,1;2,3"')
    parser.add_argument("--gamma-min", type=float)
    parser.add_argument("--gamma-max", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwsearch",
        description="Continuous-time quantum walk search: symmetry reduction and perturbative analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("family", help="print the reduced Hamiltonian")
    _common(p)

    p = sub.add_parser("sweep", help="eigenstate overlaps with |s> and |a> over a gamma grid")
    _common(p, gamma=False)
    p.add_argument("--gamma-min", type=float, required=True)
    p.add_argument("--gamma-max", type=float, required=True)
    p.add_argument("--gamma-steps", type=int, default=200)
    p.add_argument("--k", type=int, default=2)

    p = sub.add_parser("evolve", help="success probability curve from |s>")
    _common(p)
    p.add_argument("--t-max", type=float)
    p.add_argument("--points", type=int, default=1024)

    p = sub.add_parser("critical-gamma", help="jumping rate making h0 degenerate")
    _common(p, gamma=False)
    _split_flags(p)

    p = sub.add_parser("table1", help="hypercube critical gamma table")
    p.add_argument("--n", type=str, help="comma-separated dimensions (default 10,20,...,100)")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--output", type=Path)

    p = sub.add_parser("perturb", help="perturbative runtime report")
    _common(p, gamma=False)
    _split_flags(p)
    p.add_argument("--tol", type=float, default=1e-6, help="relative degeneracy tolerance")
    p.add_argument("--points", type=int, default=1024)

    p = sub.add_parser("verify", help="full-space vs reduced-space evolution check")
    _common(p)
    p.add_argument("--t-max", type=float)
    p.add_argument("--points", type=int, default=64)
    return parser


def _graph(args):
    if args.family == "file":
        if args.input is None:
            raise UsageError("--family file requires --input")
        g = load_edge_list(args.input.read_text())
    else:
        if args.size is None:
            raise UsageError(f"--family {args.family} requires --size")
        g = build_family(args.family, args.size)
    if args.marked is not None:
        g = g.with_marked(args.marked)
    return g


def _quotient(args):
    if args.family != "file" and args.size is None:
        raise UsageError(f"--family {args.family} requires --size")
    if args.family == "hypercube" and args.marked in (None, 0):
        return family_quotient("hypercube", args.size)
    return quotient(_graph(args))


def _form(args) -> str:
    return "adjacency" if args.adjacency else "auto"


def _require_gamma(args) -> float:
    if args.gamma is None:
        raise UsageError("--gamma is required")
    if not args.gamma > 0:
        raise UsageError("--gamma must be positive")
    return args.gamma


def _parse_mask(text: str):
    positions = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        try:
            i, j = (int(x) for x in item.split(","))
        except ValueError:
            raise UsageError(f"bad mask entry {item!r}; expected 'i,j'") from None
        positions.append((i, j))
    return positions


def _split_spec(args) -> pt.SplitSpec:
    mask = _parse_mask(args.mask) if args.mask else None
    kind = "custom" if args.family == "file" else args.family
    return pt.default_split(kind, cutoff=args.cutoff, mask=mask)


def _bracket(args, q):
    if args.gamma_min is None and args.gamma_max is None:
        return None
    deg = q.max_degree
    lo = args.gamma_min if args.gamma_min is not None else 0.1 / deg
    hi = args.gamma_max if args.gamma_max is not None else 10.0 / deg
    return (lo, hi)


def _fmt(x) -> str:
    return repr(float(x))


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_family(args) -> tuple[str, int]:
    H = _quotient(args).hamiltonian(_require_gamma(args), _form(args))
    if args.format == "json":
        return _json(H.to_dict()), 0
    return _csv([[_fmt(x) for x in row] for row in H.entries]), 0


def cmd_sweep(args) -> tuple[str, int]:
    if args.gamma_steps < 1:
        raise UsageError("--gamma-steps must be positive")
    q = _quotient(args)
    grid = np.linspace(args.gamma_min, args.gamma_max, args.gamma_steps)
    table = overlap_sweep(q, grid, args.k, _form(args))
    if args.format == "json":
        return _json({"columns": table.header(), "rows": list(table.rows())}), 0
    return table.to_csv(), 0


def cmd_evolve(args) -> tuple[str, int]:
    q = _quotient(args)
    H = q.hamiltonian(_require_gamma(args), _form(args))
    dec = eigh(H)
    t_max = args.t_max
    if t_max is None:
        gap = spectral_gap(dec)
        if not gap > 0:
            raise UsageError("no spectral gap to size the window; pass --t-max")
        t_max = 2 * math.pi / gap
    res = success_curve(dec, superposition_state(q), 0, t_max, args.points)
    if args.format == "json":
        return _json({
            "gamma": H.gamma,
            "t_max": t_max,
            "peak_time": res.peak_time,
            "peak_probability": res.peak_probability,
            "times": res.times.tolist(),
            "success_probability": res.success_probability.tolist(),
        }), 0
    return res.to_csv(), 0


def cmd_critical_gamma(args) -> tuple[str, int]:
    q = _quotient(args)
    spec = _split_spec(args)
    crit = pt.find_critical_gamma(q, spec, _bracket(args, q), form=_form(args))
    if args.format == "csv":
        return _csv([["gamma_c"], [_fmt(crit.gamma_c)]]), 0
    return _json({
        "gamma_c": crit.gamma_c,
        "crossings": crit.crossings,
        "warnings": list(crit.warnings),
    }), 0


def cmd_table1(args) -> tuple[str, int]:
    if args.n:
        try:
            ns = [int(x) for x in args.n.split(",") if x.strip()]
        except ValueError:
            raise UsageError("--n expects comma-separated integers") from None
    else:
        ns = TABLE1_DEFAULT
    if any(n < 2 for n in ns):
        raise UsageError("table1 needs n >= 2")
    rows = pt.table1_column(ns)
    if args.format == "json":
        return _json([
            {"n": r.n, "one_over_actual_eig": r.one_over_actual_eig, "one_over_n": r.one_over_n}
            for r in rows
        ]), 0
    return "n,one_over_actual_eig,one_over_n\n" + "".join(r.csv_line() + "\n" for r in rows), 0


def cmd_perturb(args) -> tuple[str, int]:
    q = _quotient(args)
    spec = _split_spec(args)
    report = pt.perturbative_runtime_report(
        args.family, args.size, spec,
        quotient_=q, bracket=_bracket(args, q), degeneracy_tol=args.tol,
        points=args.points, form=_form(args),
    )
    code = 3 if "error" in report else 0
    if args.format == "csv":
        rows = [["field", "value"]]
        rows += [[k, "" if v is None else (_fmt(v) if isinstance(v, float) else v)]
                 for k, v in report.items() if k not in ("warnings", "error")]
        return _csv(rows), code
    return _json(report), code


def cmd_verify(args) -> tuple[str, int]:
    g = _graph(args)
    if g.num_vertices > VERIFY_MAX_VERTICES:
        raise UsageError(f"graph has {g.num_vertices} vertices; verify is limited to {VERIFY_MAX_VERTICES}")
    gamma = args.gamma if args.gamma is not None else 1.0 / max(1, int(g.degree_list.max()))
    if not gamma > 0:
        raise UsageError("--gamma must be positive")
    p = equitable_partition(g)
    red = quotient(g, p).hamiltonian(gamma, _form(args))
    full = full_hamiltonian(g, gamma, _form(args))
    t_max = args.t_max if args.t_max is not None else math.pi * math.sqrt(g.num_vertices)
    times = np.linspace(0.0, t_max, args.points)
    s_red = superposition_state(p)
    full_states = evolve_many(full, lift(p, s_red), times)
    red_states = evolve_many(red, s_red, times)
    p_full = np.abs(full_states[:, g.marked]) ** 2
    p_red = np.abs(red_states[:, 0]) ** 2
    curve_dev = float(np.max(np.abs(p_full - p_red)))
    # the full state must also stay in the class-uniform subspace
    leak = float(np.max(np.abs(full_states - np.array([lift(p, r) for r in red_states]))))
    deviation = max(curve_dev, leak)
    ok = deviation <= VERIFY_TOL
    report = {
        "family": args.family,
        "size": args.size,
        "num_vertices": g.num_vertices,
        "reduced_dimension": p.num_classes,
        "gamma": gamma,
        "points": args.points,
        "t_max": t_max,
        "max_probability_deviation": curve_dev,
        "max_state_deviation": leak,
        "tolerance": VERIFY_TOL,
        "passed": ok,
    }
    if args.format == "csv":
        rows = [["field", "value"]] + [[k, v] for k, v in report.items()]
        return _csv(rows), 0 if ok else 3
    return _json(report), 0 if ok else 3


COMMANDS = {
    "family": cmd_family,
    "sweep": cmd_sweep,
    "evolve": cmd_evolve,
    "critical-gamma": cmd_critical_gamma,
    "table1": cmd_table1,
    "perturb": cmd_perturb,
    "verify": cmd_verify,
}

def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qwsearch: error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"qwsearch: computation failed: {exc}", file=sys.stderr)
        return 3
    except QWSearchError as exc:
        print(f"qwsearch: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qwsearch: error: {exc}", file=sys.stderr)
        return 2
    if args.output is not None:
        args.output.write_text(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            sys.stdout = None
    return code


if __name__ == "__main__":
    sys.exit(main())
