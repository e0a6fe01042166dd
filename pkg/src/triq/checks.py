"""Property suite run by ``triq verify``.

Every check returns a :class:`CheckResult` with pass/fail counts and a few
failure samples.  Randomness comes from a single ``random.Random(seed)``
consumed in a fixed order, so reports are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Optional

from triq.algebra import PrimeField, spectral_radius_exact
from triq.dynamics import (
    BRUTE_FORCE_MAX_P,
    DegenerateFiber,
    fiber_points_bruteforce,
    random_plane_point,
    random_point,
    random_point_on_L,
    sigma,
)
from triq.exceptions import SigmaUndefined
from triq.picard import (
    BETA,
    EXPECTED_CHAR_POLY,
    GENERATORS,
    ORDERED_PAIRS,
    REFERENCE_COMPOSITES,
    IntMatrix3,
    char_poly_composite,
    composite_matrix,
    generator_sum,
    polarization_solve,
)
from triq.exceptions import NoPositivePolarization
from triq.variety import (
    AxisPair,
    TriPoint,
    congruence_residual,
    eval_L,
    eval_Q,
    fiber_forms,
    is_on_variety,
    partial_L,
    partial_Q,
)

MAX_SAMPLES = 5
SAMPLE_HEIGHT_BITS = 4096


@dataclass
class CheckResult:
    passed: int = 0
    failed: int = 0
    skipped: Optional[str] = None
    samples: list = dc_field(default_factory=list)

    def record(self, ok: bool, detail=None) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if detail is not None and len(self.samples) < MAX_SAMPLES:
                self.samples.append(str(detail))

    def as_dict(self) -> dict:
        out = {"passed": self.passed, "failed": self.failed}
        if self.skipped:
            out["skipped"] = self.skipped
        if self.samples:
            out["failure_samples"] = self.samples
        return out


def _assemble(pair: AxisPair, u, v, w) -> TriPoint:
    parts = [None, None, None]
    parts[pair.fixed[0]], parts[pair.fixed[1]], parts[pair.moving] = u, v, w
    return TriPoint(*parts)


def check_regrouping(spec, rng, trials: int) -> dict:
    A, B, f = spec.A, spec.B, spec.field
    res_L, res_Q = CheckResult(), CheckResult()
    for _ in range(trials):
        for pair in AxisPair:
            u, v, w = (random_plane_point(f, rng) for _ in range(3))
            P = _assemble(pair, u, v, w)
            c = w.coords
            lhs = f.coerce(sum(partial_L(A, pair, u, v, k) * c[k] for k in range(3)))
            res_L.record(lhs == eval_L(A, P), (pair.value, str(P)))
            q = sum(partial_Q(B, pair, u, v, k, n) * c[k] * c[n] for k in range(3) for n in range(k, 3))
            res_Q.record(f.coerce(q) == eval_Q(B, P), (pair.value, str(P)))
    return {"regrouping_L": res_L, "regrouping_Q": res_Q}


def check_bihomogeneity(spec, rng, trials: int) -> CheckResult:
    A, B, f = spec.A, spec.B, spec.field
    res = CheckResult()
    for _ in range(trials):
        pair = rng.choice(list(AxisPair))
        u, v = random_plane_point(f, rng), random_plane_point(f, rng)
        lam, mu = f.random_element(rng, nonzero=True), f.random_element(rng, nonzero=True)
        base = fiber_forms(A, B, pair, u, v)
        moved = fiber_forms(A, B, pair, u.scaled(lam), v.scaled(mu))
        factor = f.coerce(lam ** 4 * mu ** 4)
        ok = all(f.coerce(g * factor) == g2 for g, g2 in zip(base.G, moved.G)) and all(
            f.coerce(base.H[key] * factor) == moved.H[key] for key in base.H
        )
        res.record(ok, (pair.value, str(u), str(v), str(lam), str(mu)))
    return res


def check_congruence(spec, rng, trials: int) -> CheckResult:
    A, B = spec.A, spec.B
    res = CheckResult()
    for _ in range(trials):
        P = random_point_on_L(A, rng, rng.choice(list(AxisPair)))
        for pair in AxisPair:
            for pivot in range(3):
                r = congruence_residual(A, B, pair, pivot, P)
                res.record(r == 0, (pair.value, pivot, str(P), str(r)))
    return res


def sample_points(spec, rng, count: int, budget: int = 4000) -> list:
    """Up to ``count`` distinct points of X.

    Random fiber solves first; over Q, where rational points are sparse,
    the sample is grown by applying the involutions to points already found.
    """
    A, B = spec.A, spec.B
    found: dict = {}
    for _ in range(budget):
        if len(found) >= count:
            break
        P = random_point(A, B, rng, tries=1, bound=3)
        if P is not None:
            found.setdefault(P.key, P)
    frontier = list(found.values())
    while len(found) < count and frontier:
        nxt = []
        for P in frontier:
            for i in (1, 2, 3):
                try:
                    Q = sigma(A, B, i, P)
                except SigmaUndefined:
                    continue
                if Q.key not in found and (spec.field.is_finite or Q.height_bits() <= SAMPLE_HEIGHT_BITS):
                    found[Q.key] = Q
                    nxt.append(Q)
        frontier = nxt
    return list(found.values())[:count]


def check_involution(spec, points: list) -> dict:
    A, B = spec.A, spec.B
    inv, closure, fiber = CheckResult(), CheckResult(), CheckResult()
    degenerate = 0
    for P in points:
        for i in (1, 2, 3):
            try:
                Q = sigma(A, B, i, P)
            except DegenerateFiber:
                degenerate += 1
                continue
            pair = AxisPair.for_map(i)
            closure.record(is_on_variety(A, B, Q), (i, str(P), str(Q)))
            fiber.record(Q.fixed(pair) == P.fixed(pair), (i, str(P), str(Q)))
            try:
                back = sigma(A, B, i, Q)
            except SigmaUndefined as exc:
                inv.record(False, (i, str(P), type(exc).__name__))
                continue
            inv.record(back == P, (i, str(P), str(back)))
    if not points:
        for r in (inv, closure, fiber):
            r.skipped = "no points of X found"
    return {"involution": inv, "closure": closure, "fiber_preservation": fiber,
            "_degenerate_skips": degenerate}


def check_oracle(spec, points: list, force: bool) -> CheckResult:
    A, B, f = spec.A, spec.B, spec.field
    res = CheckResult()
    if not isinstance(f, PrimeField):
        res.skipped = "oracle needs a prime field"
        return res
    if f.p > BRUTE_FORCE_MAX_P and not force:
        res.skipped = f"p > {BRUTE_FORCE_MAX_P} (use --force-oracle)"
        return res
    for P in points:
        for i in (1, 2, 3):
            pair = AxisPair.for_map(i)
            u, v = P.fixed(pair)
            if fiber_forms(A, B, pair, u, v).all_vanish(f):
                continue
            fiber = fiber_points_bruteforce(A, B, pair, u, v, force=force)
            others = [Q for Q in fiber if Q != P]
            expected = others[0] if len(others) == 1 else (P if not others else None)
            got = sigma(A, B, i, P)
            res.record(expected is not None and got == expected, (i, str(P), str(got), len(fiber)))
    return res


def matrix_suite(generators=None) -> dict:
    gens = generators or GENERATORS
    ident = IntMatrix3.identity()
    res = {
        "generator_involutive": CheckResult(),
        "composition_law": CheckResult(),
        "reference_composites": CheckResult(),
        "char_poly": CheckResult(),
        "spectral_radius": CheckResult(),
        "polarization": CheckResult(),
    }
    for i in (1, 2, 3):
        res["generator_involutive"].record(gens[i] @ gens[i] == ident, f"M{i}^2 != I")
    polys = {}
    for i, j in ORDERED_PAIRS:
        M = composite_matrix(i, j, gens)
        res["composition_law"].record(M @ composite_matrix(j, i, gens) == ident, f"M{i}{j} M{j}{i} != I")
        res["reference_composites"].record(M == REFERENCE_COMPOSITES[(i, j)], f"sigma_{i}{j}^* = {M}")
        cp = char_poly_composite(i, j, gens)
        polys[f"{i}{j}"] = str(cp)
        res["char_poly"].record(cp == EXPECTED_CHAR_POLY, f"{i}{j}: {cp}")
        try:
            rho = spectral_radius_exact(M)
            res["spectral_radius"].record(rho == BETA, f"{i}{j}: {rho}")
        except Exception as exc:  # noqa: BLE001 - any failure is report content
            res["spectral_radius"].record(False, f"{i}{j}: {exc}")
    try:
        d, r = polarization_solve(gens)
        S = generator_sum(gens)
        ok = d == 9 and r == (1, 1, 1) and S @ (1, 1, 1) == (9, 9, 9)
        res["polarization"].record(ok, f"d={d}, r={r}")
    except NoPositivePolarization as exc:
        res["polarization"].record(False, str(exc))
    out = {name: r.as_dict() for name, r in res.items()}
    out["char_polys"] = polys
    return out


def run_suite(spec, *, seed: int, trials: int, involution_trials: int,
              force_oracle: bool = False, generators=None) -> dict:
    """All properties for ``spec`` (or only the matrix suite when spec is None)."""
    rng = random.Random(seed)
    props: dict = {}
    if spec is not None:
        props.update(check_regrouping(spec, rng, trials))
        props["bihomogeneity"] = check_bihomogeneity(spec, rng, trials)
        props["congruence_residual"] = check_congruence(spec, rng, trials)
        points = sample_points(spec, rng, involution_trials)
        inv = check_involution(spec, points)
        degenerate = inv.pop("_degenerate_skips")
        props.update(inv)
        props["oracle_equivalence"] = check_oracle(spec, points, force_oracle)
        sampled = {"points": len(points), "degenerate_fiber_skips": degenerate}
    else:
        sampled = None
    matrices = matrix_suite(generators)
    properties = {name: r.as_dict() for name, r in props.items()}
    failures = sum(r["failed"] for r in properties.values()) + sum(
        v["failed"] for k, v in matrices.items() if k != "char_polys"
    )
    return {
        "properties": properties,
        "matrix_suite": matrices,
        "sampled": sampled,
        "total_failures": failures,
        "ok": failures == 0,
    }
