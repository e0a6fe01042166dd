"""The involutions sigma_1, sigma_2, sigma_3, their composites, and orbits.

sigma_i swaps the two points of the fiber of the projection that forgets
one factor.  The second point is found from the first with Vieta's
relations on the binary quadratic cut out on the fiber line, so no square
roots (and no field extensions) are ever needed.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from triq.algebra import Field, PrimeField
from triq.exceptions import (
    DegenerateFiber,
    FieldMismatch,
    NotOnVariety,
    SigmaUndefined,
    UnsupportedField,
)
from triq.variety import (
    AxisPair,
    CoefficientTensorA,
    CoefficientTensorB,
    FiberForms,
    ProjectivePoint2,
    TriPoint,
    _complement,
    _conic_matrix,
    _line_vector,
    eval_L,
    eval_Q,
    fiber_forms,
)

BRUTE_FORCE_MAX_P = 31
DEFAULT_BIT_BUDGET = 10**6


def _require_small_prime(field: Field, force: bool = False) -> int:
    if not isinstance(field, PrimeField):
        raise UnsupportedField("exhaustive enumeration needs a prime field")
    if field.p > BRUTE_FORCE_MAX_P and not force:
        raise UnsupportedField(f"p = {field.p} exceeds {BRUTE_FORCE_MAX_P}; pass force=True")
    return field.p


def projective_plane(field: PrimeField) -> list:
    """All points of P^2(F_p), normalized, in lexicographic order."""
    p = field.p
    pts = [(0, 0, 1)] + [(0, 1, c) for c in range(p)] + [(1, b, c) for b in range(p) for c in range(p)]
    return [ProjectivePoint2(field, c) for c in pts]


def threads_from_env(default: int = 1) -> int:
    raw = os.environ.get("TRIQ_THREADS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


# --------------------------------------------------------------------------
# The involutions
# --------------------------------------------------------------------------


def _pick_pivot(field: Field, L: tuple) -> Optional[int]:
    return next((k for k in range(3) if not field.is_zero(L[k])), None)


def conjugate_on_fiber(field: Field, forms: FiberForms, w: tuple, pivot: Optional[int] = None):
    """Other intersection point of the fiber line and conic through ``w``.

    Returns the (unnormalized) moving coordinates, or None when ``w`` is
    not a root of the fiber quadratic (only possible off the variety).
    """
    L = forms.L
    if pivot is None:
        pivot = _pick_pivot(field, L)
        if pivot is None:
            return None
    elif field.is_zero(L[pivot]):
        raise ValueError(f"pivot {pivot} has vanishing line coefficient")
    i, j = _complement(pivot)
    qa, qb, qc = forms.G[j], forms.H[(i, j)], forms.G[i]
    s, t = w[i], w[j]
    zero = field.is_zero
    if not zero(qa):
        if zero(t):
            return None
        s2, t2 = -(qa * s + qb * t), qa * t
    elif zero(t):
        # roots are (1:0) and (-qc:qb)
        if zero(qb) and zero(qc):
            return None
        s2, t2 = -qc, qb
    else:
        if zero(qb):
            return None
        s2, t2 = 1, 0
    wk = -(L[i] * s2 + L[j] * t2) * field.inv(L[pivot])
    out = [None, None, None]
    out[i], out[j], out[pivot] = s2, t2, wk
    return tuple(field.coerce(c) for c in out)


def sigma(A: CoefficientTensorA, B: CoefficientTensorB, i: int, P: TriPoint,
          *, pivot: Optional[int] = None) -> TriPoint:
    """Apply sigma_i to P.

    Raises NotOnVariety when P is not on X and DegenerateFiber when P lies
    outside the domain U_i (its fiber is positive dimensional).  Ramification
    points (double roots) are fixed.  ``pivot`` overrides the choice of the
    line coordinate that is eliminated; by default the smallest index with a
    nonzero line coefficient.
    """
    pair = AxisPair.for_map(i)
    f = A.field
    if P.field != f:
        raise FieldMismatch(f"point over {P.field}, variety over {f}")
    u, v = P.fixed(pair)
    forms = fiber_forms(A, B, pair, u, v)
    w = P[pair.moving].coords
    if not (f.is_zero(forms.line_at(f, w)) and f.is_zero(forms.conic_at(f, w))):
        raise NotOnVariety(f"{P} is not on X", map_index=i)
    if forms.all_vanish(f):
        raise DegenerateFiber(f"fiber of p_{i} through {P} is degenerate", map_index=i)
    new = conjugate_on_fiber(f, forms, w, pivot)
    if new is None:
        raise NotOnVariety(f"{P} is not a root of its fiber quadratic", map_index=i)
    return P.with_factor(pair.moving, ProjectivePoint2(f, new))


def composite(A: CoefficientTensorA, B: CoefficientTensorB, i: int, j: int, P: TriPoint) -> TriPoint:
    """sigma_ij = sigma_i o sigma_j: sigma_j first, then sigma_i."""
    if i == j:
        raise ValueError("composite needs two distinct maps")
    for stage, k in ((1, j), (2, i)):
        try:
            P = sigma(A, B, k, P)
        except SigmaUndefined as exc:
            exc.stage = stage
            raise
    return P


# --------------------------------------------------------------------------
# Exhaustive enumeration over small prime fields
# --------------------------------------------------------------------------


def fiber_points_bruteforce(A: CoefficientTensorA, B: CoefficientTensorB, pair: AxisPair,
                            u: ProjectivePoint2, v: ProjectivePoint2, *, force: bool = False) -> list:
    """Every point of X over (u, v), found by trying all of P^2(F_p)."""
    f = A.field
    _require_small_prime(f, force)
    f1, f2 = pair.fixed
    out = []
    for w in projective_plane(f):
        parts = [None, None, None]
        parts[f1], parts[f2], parts[pair.moving] = u, v, w
        P = TriPoint(*parts)
        if f.is_zero(eval_L(A, P)) and f.is_zero(eval_Q(B, P)):
            out.append(P)
    return out


def _plane_array(field: PrimeField) -> np.ndarray:
    return np.array([pt.coords for pt in projective_plane(field)], dtype=np.int64)


def _scan_slice(A, B, plane, plane_arr, xs) -> list:
    f = A.field
    p = f.p
    out = []
    for x in xs:
        for y in plane:
            Lv = np.array(_line_vector(A, AxisPair.XY, x, y), dtype=np.int64)
            on_line = (plane_arr @ Lv) % p == 0
            if not on_line.any():
                continue
            C = _conic_matrix(B, AxisPair.XY, x, y).astype(np.int64)
            W = plane_arr[on_line]
            on_conic = (((W @ C) % p) * W).sum(axis=1) % p == 0
            for idx in np.flatnonzero(on_line)[on_conic]:
                out.append(TriPoint(x, y, plane[idx]))
    return out


def scan_points(A: CoefficientTensorA, B: CoefficientTensorB, *, threads: Optional[int] = None,
                force: bool = False) -> list:
    """All points of X(F_p) in lexicographic order.

    The outer enumeration over the x factor is split across ``threads``
    workers (default: ``TRIQ_THREADS`` or 1); the merged result is sorted
    by normal form, so the output does not depend on scheduling.
    """
    f = A.field
    _require_small_prime(f, force)
    plane = projective_plane(f)
    plane_arr = _plane_array(f)
    threads = threads or threads_from_env()
    if threads <= 1:
        return _scan_slice(A, B, plane, plane_arr, plane)
    chunks = [plane[t::threads] for t in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda xs: _scan_slice(A, B, plane, plane_arr, xs), chunks))
    merged = [pt for part in parts for pt in part]
    merged.sort(key=lambda P: P.key)
    return merged


def degenerate_bases(A: CoefficientTensorA, B: CoefficientTensorB, pair: AxisPair, *,
                     threads: Optional[int] = None, force: bool = False) -> list:
    """All base pairs (u, v) over F_p whose fiber for ``pair`` is degenerate."""
    f = A.field
    _require_small_prime(f, force)
    plane = projective_plane(f)

    def work(us):
        return [(u, v) for u in us for v in plane if fiber_forms(A, B, pair, u, v).all_vanish(f)]

    threads = threads or threads_from_env()
    if threads <= 1:
        return work(plane)
    chunks = [plane[t::threads] for t in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(work, chunks))
    merged = [b for part in parts for b in part]
    merged.sort(key=lambda b: b[0].key + b[1].key)
    return merged


# --------------------------------------------------------------------------
# Solving fibers directly (quadratic formula) and sampling points
# --------------------------------------------------------------------------


def solve_fiber(A: CoefficientTensorA, B: CoefficientTensorB, pair: AxisPair,
                u: ProjectivePoint2, v: ProjectivePoint2) -> list:
    """Points of X over (u, v) rational over the base field, sorted.

    Uses the quadratic formula with the field's square root, so it works
    over Q and over large prime fields.  Raises DegenerateFiber for
    positive-dimensional fibers.
    """
    f = A.field
    forms = fiber_forms(A, B, pair, u, v)
    if forms.all_vanish(f):
        raise DegenerateFiber(f"fiber over ({u}, {v}) is degenerate")
    k = _pick_pivot(f, forms.L)
    i, j = _complement(k)
    qa, qb, qc = forms.G[j], forms.H[(i, j)], forms.G[i]
    roots = []
    if f.is_zero(qa):
        roots.append((1, 0))
        if not f.is_zero(qb):
            roots.append((-qc, qb))
    else:
        disc = f.coerce(qb * qb - 4 * qa * qc)
        r = f.sqrt(disc)
        if r is None:
            return []
        for sgn in (1, -1):
            roots.append((-qb + sgn * r, 2 * qa))
    f1, f2 = pair.fixed
    pts = set()
    for s, t in roots:
        w = [None, None, None]
        w[i], w[j] = s, t
        w[k] = -(forms.L[i] * s + forms.L[j] * t) * f.inv(forms.L[k])
        parts = [None, None, None]
        parts[f1], parts[f2], parts[pair.moving] = u, v, ProjectivePoint2(f, w)
        pts.add(TriPoint(*parts))
    return sorted(pts, key=lambda P: P.key)


def random_plane_point(field: Field, rng, bound: int = 9) -> ProjectivePoint2:
    while True:
        c = [field.random_element(rng, bound=bound) for _ in range(3)]
        if any(not field.is_zero(t) for t in c):
            return ProjectivePoint2(field, c)


def random_point_on_L(A: CoefficientTensorA, rng, pair: AxisPair = AxisPair.XY) -> TriPoint:
    """A random point of V(L) (not necessarily on V(Q))."""
    f = A.field
    while True:
        u, v = random_plane_point(f, rng), random_plane_point(f, rng)
        L = _line_vector(A, pair, u, v)
        k = _pick_pivot(f, L)
        if k is None:
            w = random_plane_point(f, rng)
        else:
            i, j = _complement(k)
            s, t = f.random_element(rng), f.random_element(rng)
            if f.is_zero(s) and f.is_zero(t):
                continue
            coords = [None, None, None]
            coords[i], coords[j] = s, t
            coords[k] = -(L[i] * s + L[j] * t) * f.inv(L[k])
            w = ProjectivePoint2(f, coords)
        parts = [None, None, None]
        parts[pair.fixed[0]], parts[pair.fixed[1]], parts[pair.moving] = u, v, w
        return TriPoint(*parts)


def random_point(A: CoefficientTensorA, B: CoefficientTensorB, rng, *, tries: int = 2000,
                 bound: int = 9) -> Optional[TriPoint]:
    """A random point of X, or None if ``tries`` fiber solves all fail."""
    f = A.field
    for _ in range(tries):
        u, v = random_plane_point(f, rng, bound), random_plane_point(f, rng, bound)
        try:
            pts = solve_fiber(A, B, AxisPair.XY, u, v)
        except DegenerateFiber:
            continue
        if pts:
            return rng.choice(pts)
    return None


# --------------------------------------------------------------------------
# Orbits
# --------------------------------------------------------------------------


class OrbitStatus(enum.Enum):
    MAX_STEPS = "MaxStepsReached"
    CYCLE = "CycleDetected"
    LEFT_DOMAIN = "LeftDomain"
    BUDGET_EXHAUSTED = "BudgetExhausted"


@dataclass
class OrbitRecord:
    """Points P_0, P_1, ... with P_{n+1} = sigma_ij(P_n) and how iteration stopped.

    For CYCLE, ``points[cycle_entry]`` is revisited after ``period`` steps.
    For LEFT_DOMAIN and BUDGET_EXHAUSTED, ``exit_step`` is the step that
    failed and ``exit_reason`` says why.
    """

    points: list
    status: OrbitStatus
    cycle_entry: Optional[int] = None
    period: Optional[int] = None
    exit_step: Optional[int] = None
    exit_reason: Optional[str] = None
    heights: list = dc_field(default_factory=list)


def orbit(A: CoefficientTensorA, B: CoefficientTensorB, i: int, j: int, P: TriPoint,
          max_steps: int, *, bit_budget: int = DEFAULT_BIT_BUDGET) -> OrbitRecord:
    if i == j:
        raise ValueError("orbit needs two distinct maps")
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    exact_q = not A.field.is_finite
    points = [P]
    heights = [P.height_bits()] if exact_q else []
    seen = {P.key: 0}
    for step in range(1, max_steps + 1):
        try:
            P = composite(A, B, i, j, P)
        except SigmaUndefined as exc:
            reason = f"{type(exc).__name__} at stage {exc.stage} (sigma_{exc.map_index})"
            return OrbitRecord(points, OrbitStatus.LEFT_DOMAIN, exit_step=step,
                               exit_reason=reason, heights=heights)
        prev = seen.get(P.key)
        if prev is not None:
            return OrbitRecord(points, OrbitStatus.CYCLE, cycle_entry=prev,
                               period=step - prev, heights=heights)
        if exact_q:
            bits = P.height_bits()
            if bits > bit_budget:
                return OrbitRecord(points, OrbitStatus.BUDGET_EXHAUSTED, exit_step=step,
                                   exit_reason=f"height {bits} bits exceeds budget {bit_budget}",
                                   heights=heights)
            heights.append(bits)
        seen[P.key] = step
        points.append(P)
    return OrbitRecord(points, OrbitStatus.MAX_STEPS, heights=heights)
