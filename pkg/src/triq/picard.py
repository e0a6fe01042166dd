"""Action of the involutions on the span of D_x, D_y, D_z in Pic(X) ⊗ R.

Matrices use the column convention: column t is the image of the t-th
basis divisor (D_x, D_y, D_z).  With this convention the pullback of a
composite reverses the order, ``(sigma_i o sigma_j)^* = sigma_j^* sigma_i^*``,
so ``composite_matrix(i, j) == M_j @ M_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import sympy

from triq.algebra import (
    Cubic,
    IntMatrix3,
    QuadraticSurd,
    char_poly_3x3,
    mat_pow,
    spectral_radius_exact,
)
from triq.exceptions import BadIndex, NoPositivePolarization

BASIS = ("D_x", "D_y", "D_z")

# sigma_i^* fixes the two classes pulled back from the base of p_i and sends
# the third divisor D to 4*(sum of the other two) - D.
GENERATORS = {
    1: IntMatrix3(((-1, 0, 0), (4, 1, 0), (4, 0, 1))),
    2: IntMatrix3(((1, 4, 0), (0, -1, 0), (0, 4, 1))),
    3: IntMatrix3(((1, 0, 4), (0, 1, 4), (0, 0, -1))),
}

# Independently computed composite matrices keyed by the ordered pair (i, j).
# Reference data for the matrix suite.
REFERENCE_COMPOSITES = {
    (2, 1): IntMatrix3(((-1, -4, 0), (4, 15, 0), (4, 20, 1))),
    (1, 3): IntMatrix3(((15, 0, 4), (20, 1, 4), (-4, 0, -1))),
    (1, 2): IntMatrix3(((15, 4, 0), (-4, -1, 0), (20, 4, 1))),
    (2, 3): IntMatrix3(((1, 20, 4), (0, 15, 4), (0, -4, -1))),
    (3, 1): IntMatrix3(((-1, 0, -4), (4, 1, 20), (4, 0, 15))),
    (3, 2): IntMatrix3(((1, 4, 20), (0, -1, -4), (0, 4, 15))),
}

EXPECTED_CHAR_POLY = Cubic(-15, 15, -1)
BETA = QuadraticSurd(7, 4)
PICARD_CAVEAT = (
    "dynamical degree equals the spectral radius on span(D_x, D_y, D_z); "
    "this is the first dynamical degree only if the Picard number of X is 3 (not verified)"
)

PullbackMatrix = IntMatrix3
ORDERED_PAIRS = tuple(permutations((1, 2, 3), 2))


@dataclass(frozen=True)
class DivisorClass:
    """n_x D_x + n_y D_y + n_z D_z."""

    nx: int
    ny: int
    nz: int

    def __iter__(self):
        return iter((self.nx, self.ny, self.nz))

    def __add__(self, other: DivisorClass) -> DivisorClass:
        return DivisorClass(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        return DivisorClass(*(a - b for a, b in zip(self, other)))

    def __neg__(self) -> DivisorClass:
        return DivisorClass(-self.nx, -self.ny, -self.nz)

    def __mul__(self, c: int) -> DivisorClass:
        return DivisorClass(c * self.nx, c * self.ny, c * self.nz)

    __rmul__ = __mul__

    def __str__(self):
        terms = [f"{c}{name}" for c, name in zip(self, BASIS) if c]
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def _check_index(i) -> None:
    if i not in GENERATORS:
        raise BadIndex(f"map index must be 1, 2 or 3, got {i!r}")


def pullback_matrix(i: int, generators=None) -> PullbackMatrix:
    _check_index(i)
    return (generators or GENERATORS)[i]


def composite_matrix(i: int, j: int, generators=None) -> PullbackMatrix:
    """Matrix of (sigma_i o sigma_j)^*."""
    _check_index(i)
    _check_index(j)
    if i == j:
        raise BadIndex("composite needs two distinct maps")
    return pullback_matrix(j, generators) @ pullback_matrix(i, generators)


def apply_pullback(m: PullbackMatrix, D: DivisorClass) -> DivisorClass:
    return DivisorClass(*(m @ tuple(D)))


def char_poly_composite(i: int, j: int, generators=None) -> Cubic:
    return char_poly_3x3(composite_matrix(i, j, generators))


@dataclass(frozen=True)
class DynamicalDegree:
    exact: object
    approx: float
    convergence: tuple  # (n, ||M^n||_inf ** (1/n))
    caveat: str = PICARD_CAVEAT


def norm_growth(M: IntMatrix3, n_max: int) -> tuple:
    """(n, ||M^n||_inf^(1/n)) for n = 1..n_max."""
    out = []
    P = IntMatrix3.identity()
    for n in range(1, n_max + 1):
        P = P @ M
        out.append((n, P.inf_norm() ** (1.0 / n)))
    return tuple(out)


def dynamical_degree(i: int, j: int, n_max: int = 25, generators=None) -> DynamicalDegree:
    """Spectral radius of the composite pullback, with a norm-growth table.

    Iterates pull back as matrix powers, so rho((M^n)) ^ (1/n) is constant
    and the limsup is the spectral radius itself.
    """
    M = composite_matrix(i, j, generators)
    rho = spectral_radius_exact(M)
    return DynamicalDegree(rho, float(rho), norm_growth(M, n_max))


def polarization_solve(generators=None) -> tuple:
    """Degree d > 3 and positive weights r with sum_i M_i r = d r.

    Returns ``(d, (r_x, r_y, r_z))`` with r normalized to r_x = 1.
    """
    gens = generators or GENERATORS
    S = gens[1] + gens[2] + gens[3]
    cubic = char_poly_3x3(S)
    candidates = [d for d in cubic.integer_roots() if d > 3]
    Ssym = sympy.Matrix(S.tolist())
    for d in sorted(candidates, reverse=True):
        for vec in (Ssym - d * sympy.eye(3)).nullspace():
            vals = [Fraction(int(sympy.numer(c)), int(sympy.denom(c))) for c in vec]
            if vals[0] == 0:
                continue
            r = tuple(c / vals[0] for c in vals)
            if all(c > 0 for c in r):
                return d, r
    raise NoPositivePolarization(f"no eigenvalue > 3 of {S} admits a positive eigenvector")


def generator_sum(generators=None) -> IntMatrix3:
    gens = generators or GENERATORS
    return gens[1] + gens[2] + gens[3]


def iterate_spectrum(M: IntMatrix3, n: int) -> list:
    """Exact roots of the characteristic polynomial of M^n."""
    return char_poly_3x3(mat_pow(M, n)).roots_exact()
