"""Members X = V(L) ∩ V(Q) of the family in P^2 x P^2 x P^2.

``L`` is the (1,1,1)-form with coefficients ``a[i, j, k]`` and ``Q`` the
(2,2,2)-form with coefficients ``b[i, j, k, l, m, n]`` (monomial
``x_i x_l y_j y_m z_k z_n``).  Fixing two of the three factors leaves a
line ``sum_k L_k w_k = 0`` and a conic ``sum Q_kn w_k w_n = 0`` in the
remaining plane; the G/H forms below are the coefficients of that conic
after eliminating one moving coordinate with the line.

Index conventions for an :class:`AxisPair`: ``u`` and ``v`` are the
coordinates of the two fixed factors in the order of the pair's name
(``xz`` means ``u = x``, ``v = z``) and ``w`` is the moving factor.
"""

from __future__ import annotations

import enum
import itertools
import math
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from triq.algebra import QQ, Field, PrimeField
from triq.exceptions import BadIndex, FieldMismatch, PreconditionViolated

AXES = "xyz"


class AxisPair(enum.Enum):
    """Which two factors are held fixed; the third one moves."""

    XY = "xy"
    XZ = "xz"
    YZ = "yz"

    @property
    def fixed(self) -> tuple:
        return tuple(AXES.index(c) for c in self.value)

    @property
    def moving(self) -> int:
        return 3 - sum(self.fixed)

    @property
    def projection(self) -> int:
        """Index of the projection p_i whose fibers this pair describes."""
        return {AxisPair.YZ: 1, AxisPair.XZ: 2, AxisPair.XY: 3}[self]

    @classmethod
    def for_map(cls, i: int) -> AxisPair:
        """sigma_1 fixes (y, z), sigma_2 fixes (x, z), sigma_3 fixes (x, y)."""
        try:
            return {1: cls.YZ, 2: cls.XZ, 3: cls.XY}[i]
        except KeyError:
            raise BadIndex(f"map index must be 1, 2 or 3, got {i!r}") from None

    def __str__(self):
        return self.value


def _complement(k: int) -> tuple:
    """The two indices of {0, 1, 2} other than k, ascending."""
    return tuple(t for t in range(3) if t != k)


# --------------------------------------------------------------------------
# Points
# --------------------------------------------------------------------------


class ProjectivePoint2:
    """A point of P^2 over ``field``.

    With ``normalize=True`` (the default) the coordinates are rescaled so
    that the first nonzero entry is 1 over F_p; over Q they become coprime
    integers with positive leading entry.  Unnormalized points keep their
    coordinates as given (useful for checking homogeneity); equality always
    compares normalized forms.
    """

    __slots__ = ("field", "coords", "normalized", "_key")

    def __init__(self, field: Field, coords: Sequence, normalize: bool = True):
        vals = tuple(field.coerce(c) for c in coords)
        if len(vals) != 3:
            raise ValueError(f"P^2 point needs 3 coordinates, got {len(vals)}")
        if all(field.is_zero(c) for c in vals):
            raise ValueError("(0:0:0) is not a projective point")
        canon = _normal_form(field, vals)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", canon if normalize else vals)
        object.__setattr__(self, "normalized", normalize)
        object.__setattr__(self, "_key", canon)

    def __setattr__(self, name, value):
        raise AttributeError("ProjectivePoint2 is immutable")

    @property
    def key(self) -> tuple:
        return self._key

    def normalize(self) -> ProjectivePoint2:
        return self if self.normalized else ProjectivePoint2(self.field, self._key)

    def scaled(self, lam) -> ProjectivePoint2:
        """Same projective point with every coordinate multiplied by ``lam`` (unnormalized)."""
        lam = self.field.coerce(lam)
        if self.field.is_zero(lam):
            raise ValueError("scaling by zero")
        return ProjectivePoint2(self.field, [c * lam for c in self.coords], normalize=False)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint2):
            return NotImplemented
        return self.field == other.field and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"ProjectivePoint2({self.field}, {self})"

    def __str__(self):
        return "(" + ":".join(str(c) for c in self.coords) + ")"


def _normal_form(field: Field, vals: tuple) -> tuple:
    if isinstance(field, PrimeField):
        p = field.p
        lead = next(c for c in vals if c % p)
        inv = pow(lead, -1, p)
        return tuple(c * inv % p for c in vals)
    fr = [Fraction(c) for c in vals]
    den = math.lcm(*(f.denominator for f in fr))
    ints = [int(f * den) for f in fr]
    g = math.gcd(*ints)
    ints = [c // g for c in ints]
    if next(c for c in ints if c) < 0:
        ints = [-c for c in ints]
    return tuple(ints)


class TriPoint(NamedTuple):
    """A point of P^2 x P^2 x P^2."""

    x: ProjectivePoint2
    y: ProjectivePoint2
    z: ProjectivePoint2

    @classmethod
    def from_coords(cls, field: Field, coords: Sequence) -> TriPoint:
        """Build from 9 coordinates ``x0 x1 x2 y0 y1 y2 z0 z1 z2``."""
        coords = list(coords)
        if len(coords) != 9:
            raise ValueError(f"expected 9 coordinates, got {len(coords)}")
        return cls(*(ProjectivePoint2(field, coords[3 * t:3 * t + 3]) for t in range(3)))

    @property
    def field(self) -> Field:
        f = self.x.field
        if self.y.field != f or self.z.field != f:
            raise FieldMismatch("TriPoint components over different fields")
        return f

    def factor(self, axis: int) -> ProjectivePoint2:
        return self[axis]

    def with_factor(self, axis: int, pt: ProjectivePoint2) -> TriPoint:
        parts = list(self)
        parts[axis] = pt
        return TriPoint(*parts)

    def fixed(self, pair: AxisPair) -> tuple:
        f1, f2 = pair.fixed
        return self[f1], self[f2]

    @property
    def key(self) -> tuple:
        return self.x.key + self.y.key + self.z.key

    def normalize(self) -> TriPoint:
        return TriPoint(self.x.normalize(), self.y.normalize(), self.z.normalize())

    def height_bits(self) -> int:
        """Bit size of the largest normalized coordinate (over Q)."""
        return max(abs(int(c)).bit_length() for c in self.key)

    def __str__(self):
        return f"({self.x},{self.y},{self.z})"


# --------------------------------------------------------------------------
# Coefficient tensors
# --------------------------------------------------------------------------


def _dense(field: Field, data, shape: tuple, label: str) -> np.ndarray:
    if isinstance(data, Mapping):
        arr = field.array(np.zeros(shape, dtype=object))
        for idx, val in data.items():
            idx = tuple(idx)
            if len(idx) != len(shape) or any(not 0 <= t < 3 for t in idx):
                raise IndexError(f"bad {label} index {idx}")
            arr[idx] = field.coerce(val)
        return arr
    arr = field.array(np.asarray(data, dtype=object))
    if arr.shape != shape:
        raise ValueError(f"{label} must have shape {shape}, got {arr.shape}")
    return arr


def _is_zero_array(field: Field, arr: np.ndarray) -> bool:
    return all(field.is_zero(v) for v in arr.reshape(-1))


class CoefficientTensorA:
    """The 27 coefficients of the (1,1,1)-form L."""

    def __init__(self, field: Field, data):
        self.field = field
        self.array = _dense(field, data, (3, 3, 3), "A")
        if _is_zero_array(field, self.array):
            raise ValueError("L is identically zero")
        self.array.setflags(write=False)
        # (fixed1, fixed2, moving) axis order per pair
        self._by_pair = {
            pair: np.ascontiguousarray(self.array.transpose(*pair.fixed, pair.moving)).reshape(3, 9)
            for pair in AxisPair
        }

    def entries(self) -> Iterable:
        """Nonzero ``((i, j, k), value)`` in lexicographic order."""
        for idx in itertools.product(range(3), repeat=3):
            v = self.array[idx]
            if not self.field.is_zero(v):
                yield idx, self.field.scalar(v)

    def __eq__(self, other):
        if not isinstance(other, CoefficientTensorA):
            return NotImplemented
        return self.field == other.field and list(self.entries()) == list(other.entries())

    def __repr__(self):
        return f"CoefficientTensorA({self.field}, {dict(self.entries())})"


class CoefficientTensorB:
    """Coefficients of the (2,2,2)-form Q, symmetrized under (i,j,k) <-> (l,m,n).

    ``b'[i,j,k,l,m,n] = (b[i,j,k,l,m,n] + b[l,m,n,i,j,k]) / 2`` leaves Q
    unchanged and makes every partial coefficient well defined.
    """

    def __init__(self, field: Field, data):
        self.field = field
        raw = _dense(field, data, (3,) * 6, "B")
        half = field.coerce(Fraction(1, 2))
        sym = field.reduce((raw + raw.transpose(3, 4, 5, 0, 1, 2)) * half)
        if _is_zero_array(field, sym):
            raise ValueError("Q is identically zero")
        self.array = sym
        self.array.setflags(write=False)
        # rows: fixed1 index pair, cols: fixed2 index pair, last: moving index pair
        self._by_pair = {}
        for pair in AxisPair:
            f1, f2 = pair.fixed
            m = pair.moving
            t = sym.transpose(f1, f1 + 3, f2, f2 + 3, m, m + 3)
            self._by_pair[pair] = np.ascontiguousarray(t).reshape(9, 81)

    @classmethod
    def from_product(cls, first: CoefficientTensorA, second: CoefficientTensorA) -> CoefficientTensorB:
        """Q = L1 * L2 for two (1,1,1)-forms."""
        if first.field != second.field:
            raise FieldMismatch("factors over different fields")
        f = first.field
        prod = f.reduce(np.multiply.outer(first.array, second.array))
        return cls(f, prod)

    def entries(self) -> Iterable:
        for idx in itertools.product(range(3), repeat=6):
            v = self.array[idx]
            if not self.field.is_zero(v):
                yield idx, self.field.scalar(v)

    def __eq__(self, other):
        if not isinstance(other, CoefficientTensorB):
            return NotImplemented
        return self.field == other.field and list(self.entries()) == list(other.entries())

    def __repr__(self):
        return f"CoefficientTensorB({self.field}, {len(list(self.entries()))} nonzero)"


# --------------------------------------------------------------------------
# Form evaluation
# --------------------------------------------------------------------------


def _check_field(field: Field, *points) -> None:
    for pt in points:
        if pt.field != field:
            raise FieldMismatch(f"point over {pt.field}, coefficients over {field}")


def _vec(field: Field, pt: ProjectivePoint2) -> np.ndarray:
    return np.array(pt.coords, dtype=field.dtype)


def _line_vector(A: CoefficientTensorA, pair: AxisPair, u, v) -> tuple:
    f = A.field
    uu = _vec(f, u)
    vv = _vec(f, v)
    part = f.reduce(uu @ A._by_pair[pair]).reshape(3, 3)
    return tuple(f.scalar(c) for c in f.reduce(vv @ part))


def _conic_matrix(B: CoefficientTensorB, pair: AxisPair, u, v) -> np.ndarray:
    """Symmetric C with Q(u, v, w) = w^T C w."""
    f = B.field
    uu = f.reduce(np.outer(_vec(f, u), _vec(f, u)).reshape(9))
    vv = f.reduce(np.outer(_vec(f, v), _vec(f, v)).reshape(9))
    part = f.reduce(uu @ B._by_pair[pair]).reshape(9, 9)
    return f.reduce(vv @ part).reshape(3, 3)


class FiberForms(NamedTuple):
    """Everything about the fiber over a fixed pair (u, v).

    ``L[k]`` are the line coefficients, ``Q[k][n]`` the conic coefficients
    (diagonal: coefficient of w_k^2; off-diagonal: full coefficient of
    w_k w_n), ``G[k]`` the three G forms and ``H[(i, j)]`` the three H
    forms with i < j.
    """

    L: tuple
    Q: tuple
    G: tuple
    H: dict

    def line_at(self, field: Field, w: Sequence):
        return field.scalar(field.reduce(sum(c * t for c, t in zip(self.L, w))))

    def conic_at(self, field: Field, w: Sequence):
        Q = self.Q
        total = sum(Q[k][n] * w[k] * w[n] for k in range(3) for n in range(k, 3))
        return field.scalar(field.reduce(total))

    def all_vanish(self, field: Field) -> bool:
        return all(field.is_zero(g) for g in self.G) and all(field.is_zero(h) for h in self.H.values())


def fiber_forms(A: CoefficientTensorA, B: CoefficientTensorB, pair: AxisPair,
                u: ProjectivePoint2, v: ProjectivePoint2) -> FiberForms:
    f = A.field
    if B.field != f:
        raise FieldMismatch("A and B over different fields")
    _check_field(f, u, v)
    Lv = _line_vector(A, pair, u, v)
    C = _conic_matrix(B, pair, u, v)
    Qm = tuple(
        tuple(f.scalar(C[k, n] if k == n else 2 * C[k, n]) for n in range(3)) for k in range(3)
    )
    red = f.scalar if f is QQ else (lambda t: t % f.p)
    G = []
    for k in range(3):
        i, j = _complement(k)
        Li, Lj = Lv[i], Lv[j]
        G.append(red(Li * Li * Qm[j][j] - Li * Lj * Qm[i][j] + Lj * Lj * Qm[i][i]))
    H = {}
    for i, j in ((0, 1), (0, 2), (1, 2)):
        (k,) = (t for t in range(3) if t not in (i, j))
        Li, Lj, Lk = Lv[i], Lv[j], Lv[k]
        H[(i, j)] = red(2 * Li * Lj * Qm[k][k] - Li * Lk * Qm[j][k]
                        - Lj * Lk * Qm[i][k] + Lk * Lk * Qm[i][j])
    return FiberForms(Lv, Qm, tuple(G), H)


def eval_L(A: CoefficientTensorA, P: TriPoint):
    """L(x, y, z)."""
    _check_field(A.field, *P)
    f = A.field
    Lv = _line_vector(A, AxisPair.XY, P.x, P.y)
    return f.scalar(f.reduce(sum(c * w for c, w in zip(Lv, P.z.coords))))


def eval_Q(B: CoefficientTensorB, P: TriPoint):
    """Q(x, y, z)."""
    _check_field(B.field, *P)
    f = B.field
    C = _conic_matrix(B, AxisPair.XY, P.x, P.y)
    w = P.z.coords
    total = sum(C[k, n] * w[k] * w[n] for k in range(3) for n in range(3))
    return f.scalar(f.reduce(total))


def partial_L(A: CoefficientTensorA, pair: AxisPair, u: ProjectivePoint2,
              v: ProjectivePoint2, k: int):
    """Coefficient of w_k in L(u, v, w)."""
    if k not in (0, 1, 2):
        raise IndexError(k)
    _check_field(A.field, u, v)
    return _line_vector(A, pair, u, v)[k]


def partial_Q(B: CoefficientTensorB, pair: AxisPair, u: ProjectivePoint2,
              v: ProjectivePoint2, k: int, n: int):
    """Coefficient of w_k w_n in Q(u, v, w).

    For k != n this is the full cross coefficient, i.e. both orders summed.
    """
    if k not in (0, 1, 2) or n not in (0, 1, 2):
        raise IndexError((k, n))
    f = B.field
    _check_field(f, u, v)
    C = _conic_matrix(B, pair, u, v)
    return f.scalar(f.reduce(C[k, n] if k == n else 2 * C[k, n]))


def g_form(A: CoefficientTensorA, B: CoefficientTensorB, pair: AxisPair, k: int,
           u: ProjectivePoint2, v: ProjectivePoint2):
    """G_k: the conic evaluated at the point of the line with w_k = 0.

    Bihomogeneous of bidegree (4, 4) in (u, v).
    """
    if k not in (0, 1, 2):
        raise IndexError(k)
    return fiber_forms(A, B, pair, u, v).G[k]


def h_form(A: CoefficientTensorA, B: CoefficientTensorB, pair: AxisPair, i: int, j: int,
           u: ProjectivePoint2, v: ProjectivePoint2):
    """H_{i,j}, symmetric in (i, j)."""
    if i == j or i not in (0, 1, 2) or j not in (0, 1, 2):
        raise IndexError((i, j))
    return fiber_forms(A, B, pair, u, v).H[(min(i, j), max(i, j))]


def is_on_variety(A: CoefficientTensorA, B: CoefficientTensorB, P: TriPoint) -> bool:
    f = A.field
    if B.field != f:
        raise FieldMismatch("A and B over different fields")
    return f.is_zero(eval_L(A, P)) and f.is_zero(eval_Q(B, P))


def fiber_degenerate(A: CoefficientTensorA, B: CoefficientTensorB, pair: AxisPair,
                     u: ProjectivePoint2, v: ProjectivePoint2) -> bool:
    """True iff the fiber over (u, v) is positive dimensional.

    Decided by the vanishing of all three G and all three H forms.
    """
    return fiber_forms(A, B, pair, u, v).all_vanish(A.field)


def congruence_residual(A: CoefficientTensorA, B: CoefficientTensorB, pair: AxisPair,
                        pivot: int, P: TriPoint):
    """``L_k^2 Q(P) - (G_j w_i^2 + H_ij w_i w_j + G_i w_j^2)`` for pivot k.

    Zero for every P on V(L); raises PreconditionViolated otherwise.
    """
    f = A.field
    if not f.is_zero(eval_L(A, P)):
        raise PreconditionViolated("point is not on V(L)")
    if pivot not in (0, 1, 2):
        raise IndexError(pivot)
    u, v = P.fixed(pair)
    forms = fiber_forms(A, B, pair, u, v)
    w = P[pair.moving].coords
    i, j = _complement(pivot)
    lk = forms.L[pivot]
    rhs = forms.G[j] * w[i] * w[i] + forms.H[(i, j)] * w[i] * w[j] + forms.G[i] * w[j] * w[j]
    return f.scalar(f.reduce(lk * lk * eval_Q(B, P) - rhs))


class Variety:
    """A member X^{A,B}: thin convenience wrapper over the module functions."""

    def __init__(self, A: CoefficientTensorA, B: CoefficientTensorB, name: str | None = None):
        if A.field != B.field:
            raise FieldMismatch("A and B over different fields")
        self.A = A
        self.B = B
        self.name = name

    @property
    def field(self) -> Field:
        return self.A.field

    def contains(self, P: TriPoint) -> bool:
        return is_on_variety(self.A, self.B, P)

    def fiber_forms(self, pair: AxisPair, u, v) -> FiberForms:
        return fiber_forms(self.A, self.B, pair, u, v)

    def fiber_degenerate(self, pair: AxisPair, u, v) -> bool:
        return fiber_degenerate(self.A, self.B, pair, u, v)

    def point(self, *coords) -> TriPoint:
        if len(coords) == 1:
            coords = coords[0]
        return TriPoint.from_coords(self.field, coords)

    def __repr__(self):
        return f"Variety({self.name or '?'} over {self.field})"
