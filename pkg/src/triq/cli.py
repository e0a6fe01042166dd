"""Command line front end.

Subcommands: gen, verify, scan, orbit, matrices.  Every command writes a
JSON report (sorted keys) to stdout or ``--out``.  Exit codes: 0 success,
1 property failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from triq import __version__
from triq.algebra import QQ, PrimeField, format_polynomial, parse_rational
from triq.checks import run_suite
from triq.dynamics import (
    OrbitStatus,
    degenerate_bases,
    orbit,
    scan_points,
    threads_from_env,
    DEFAULT_BIT_BUDGET,
)
from triq.exceptions import TriqError, UnsupportedField
from triq.picard import (
    BETA,
    GENERATORS,
    ORDERED_PAIRS,
    PICARD_CAVEAT,
    IntMatrix3,
    char_poly_composite,
    composite_matrix,
    dynamical_degree,
    generator_sum,
    polarization_solve,
)
from triq.specfile import generate, parse_spec, serialize
from triq.variety import AxisPair, TriPoint, is_on_variety

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _point_json(P: TriPoint) -> list:
    return [[str(c) for c in part.coords] for part in P]


def _load(args):
    spec = parse_spec(args.spec)
    if getattr(args, "p", None):
        spec = spec.reduced(PrimeField(args.p))
    return spec


def _base(command: str, args, spec=None) -> dict:
    rep = {"command": command, "version": __version__}
    if spec is not None:
        rep["spec"] = spec.echo()
    if getattr(args, "seed", None) is not None:
        rep["seed"] = args.seed
    return rep


# --------------------------------------------------------------------------
# commands: each returns (report-or-text, exit code)
# --------------------------------------------------------------------------


def cmd_gen(args):
    field = PrimeField(args.p) if args.p else QQ
    spec = generate(args.seed, field, args.sparsity, args.kind, args.name)
    return serialize(spec), EXIT_OK


def cmd_verify(args):
    spec = _load(args) if args.spec else None
    generators = None
    if args.mutate_matrices:
        # harness sanity: a wrong constant must make the run fail
        rows = [list(r) for r in GENERATORS[1].rows]
        rows[1][0] += 1
        generators = dict(GENERATORS)
        generators[1] = IntMatrix3(rows)
    rep = _base("verify", args, spec)
    rep["trials"] = args.trials
    rep["involution_trials"] = args.involution_trials
    rep.update(run_suite(spec, seed=args.seed, trials=args.trials,
                         involution_trials=args.involution_trials,
                         force_oracle=args.force_oracle, generators=generators))
    return rep, EXIT_OK if rep["ok"] else EXIT_FAIL


def cmd_scan(args):
    spec = _load(args)
    if not isinstance(spec.field, PrimeField):
        raise UnsupportedField("scan needs a prime field (use --p to reduce a Q spec)")
    A, B = spec.A, spec.B
    threads = threads_from_env()
    rep = _base("scan", args, spec)
    rep["mode"] = args.mode
    if args.mode == "points":
        pts = scan_points(A, B, threads=threads, force=args.force_oracle)
        rep["count"] = len(pts)
        rep["points"] = [_point_json(P) for P in pts]
    else:
        per_pair = {}
        for pair in AxisPair:
            bases = degenerate_bases(A, B, pair, threads=threads, force=args.force_oracle)
            per_pair[pair.value] = {
                "count": len(bases),
                "bases": [[[str(c) for c in u.coords], [str(c) for c in v.coords]] for u, v in bases],
            }
        p = spec.field.p
        rep["base_size"] = (p * p + p + 1) ** 2
        rep["degenerate"] = per_pair
    return rep, EXIT_OK


def _parse_start(tokens) -> list:
    vals = []
    for tok in tokens:
        vals += [t for t in tok.replace(",", " ").split() if t]
    if len(vals) != 9:
        raise TriqError(f"--start needs 9 coordinates, got {len(vals)}")
    return [parse_rational(v) for v in vals]


def cmd_orbit(args):
    spec = _load(args)
    if len(args.map) != 2 or not set(args.map) <= set("123") or args.map[0] == args.map[1]:
        raise TriqError(f"--map must be two distinct digits from 1..3, got {args.map!r}")
    i, j = int(args.map[0]), int(args.map[1])
    A, B = spec.A, spec.B
    if args.start:
        P = TriPoint.from_coords(spec.field, _parse_start(args.start))
    elif isinstance(spec.field, PrimeField):
        pts = scan_points(A, B, threads=threads_from_env())
        if not pts:
            raise TriqError("X has no points over this field; pass --start")
        P = pts[0]
    else:
        raise TriqError("--start is required over Q")
    rep = _base("orbit", args, spec)
    rep["map"] = f"{i}{j}"
    rep["start"] = _point_json(P)
    rep["max_steps"] = args.max_steps
    if not is_on_variety(A, B, P):
        rep["status"] = "NotOnVariety"
        rep["points"] = []
        return rep, EXIT_OK
    rec = orbit(A, B, i, j, P, args.max_steps, bit_budget=args.bit_budget)
    rep["status"] = rec.status.value
    rep["length"] = len(rec.points)
    rep["points"] = [_point_json(Q) for Q in rec.points]
    if rec.status is OrbitStatus.CYCLE:
        rep["cycle"] = {"entry": rec.cycle_entry, "period": rec.period}
    if rec.exit_step is not None:
        rep["exit"] = {"step": rec.exit_step, "reason": rec.exit_reason}
    if args.report_heights:
        if spec.field.is_finite:
            rep["heights"] = None
        else:
            hs = rec.heights
            ratios = [None if a == 0 else round(b / a, 6) for a, b in zip(hs, hs[1:])]
            rep["heights"] = {"bits": hs, "successive_ratios": ratios, "note": "exploratory"}
    return rep, EXIT_OK


def cmd_matrices(args):
    rep = _base("matrices", args)
    rep["generators"] = {str(i): GENERATORS[i].tolist() for i in (1, 2, 3)}
    rep["composites"] = {f"{i}{j}": composite_matrix(i, j).tolist() for i, j in ORDERED_PAIRS}
    rep["char_polys"] = {f"{i}{j}": str(char_poly_composite(i, j)) for i, j in ORDERED_PAIRS}
    dd = dynamical_degree(1, 2)
    rep["dynamical_degree"] = {
        "exact": str(dd.exact),
        "approx": repr(dd.approx),
        "minimal_polynomial": format_polynomial((1, -14, 1)),
        "norm_growth": [[n, round(v, 9)] for n, v in dd.convergence],
    }
    d, r = polarization_solve()
    rep["polarization"] = {
        "d": d,
        "weights": [str(c) for c in r],
        "generator_sum": generator_sum().tolist(),
    }
    rep["caveat"] = PICARD_CAVEAT
    rep["beta"] = str(BETA)
    return rep, EXIT_OK


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="triq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"triq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec_required=False):
        p.add_argument("--spec", required=spec_required, help="coefficient file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte stability)")

    g = sub.add_parser("gen", help="generate a seeded random coefficient file")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--p", type=int, help="prime modulus (default: rationals)")
    g.add_argument("--sparsity", type=float, default=1.0, help="fraction of nonzero coefficients")
    g.add_argument("--kind", choices=("random", "product"), default="random",
                   help="'product' makes Q = L * L' (every fiber degenerate)")
    g.add_argument("--name")
    g.add_argument("--out")

    v = sub.add_parser("verify", help="run the property suite")
    common(v)
    v.add_argument("--p", type=int, help="reduce the coefficients modulo this prime first")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--involution-trials", type=int, default=500)
    v.add_argument("--force-oracle", action="store_true")
    v.add_argument("--mutate-matrices", action="store_true", help="corrupt a matrix constant (harness check)")

    s = sub.add_parser("scan", help="enumerate X(F_p) or its degenerate fibers")
    common(s, spec_required=True)
    s.add_argument("--p", type=int, help="reduce the coefficients modulo this prime first")
    s.add_argument("--mode", choices=("points", "degenerate"), default="points")
    s.add_argument("--force-oracle", action="store_true", help="allow p > 31")

    o = sub.add_parser("orbit", help="iterate a composite sigma_i o sigma_j")
    common(o, spec_required=True)
    o.add_argument("--p", type=int, help="reduce the coefficients modulo this prime first")
    o.add_argument("--map", default="12", help="two digits ij for sigma_i o sigma_j")
    o.add_argument("--start", nargs="+", help="9 coordinates x0 x1 x2 y0 y1 y2 z0 z1 z2")
    o.add_argument("--max-steps", type=int, default=100)
    o.add_argument("--bit-budget", type=int, default=DEFAULT_BIT_BUDGET)
    o.add_argument("--report-heights", action="store_true")

    m = sub.add_parser("matrices", help="pullback matrices, dynamical degree, polarization")
    m.add_argument("--out")
    m.add_argument("--timing", action="store_true")
    return parser


COMMANDS = {
    "gen": cmd_gen,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "orbit": cmd_orbit,
    "matrices": cmd_matrices,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        result, code = COMMANDS[args.command](args)
    except (TriqError, ValueError, OSError) as exc:
        sys.stderr.write(f"triq {args.command}: {exc}\n")
        return EXIT_USAGE
    if isinstance(result, dict):
        if getattr(args, "timing", False):
            result["timing_seconds"] = round(time.perf_counter() - started, 6)
        result = dump_report(result)
    _emit(result, getattr(args, "out", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
