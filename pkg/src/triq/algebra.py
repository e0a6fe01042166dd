"""Exact scalar arithmetic and 3x3 integer matrix utilities.

Two base fields are supported: the rationals (scalars are
:class:`fractions.Fraction`) and prime fields F_p with p odd (scalars are
plain ``int`` values in ``[0, p)``).  The field objects know how to coerce,
invert and reduce scalars and numpy arrays of scalars; the hot evaluation
paths in :mod:`triq.variety` work on those raw representations.
:class:`PrimeFieldElement` is the standalone value type for F_p arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Sequence, Union

import numpy as np
import sympy
from sympy.ntheory import sqrt_mod

from triq.exceptions import (
    BadField,
    DivisionByZero,
    FieldMismatch,
    NonPrimeModulus,
    UnsupportedSpectrum,
)

Rational = Fraction

# int64 evaluation is safe while 9 * p**2 stays below 2**63
_INT64_MODULUS_LIMIT = 1 << 30


class PrimeFieldElement:
    """Immutable element of F_p."""

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        object.__setattr__(self, "modulus", int(modulus))
        object.__setattr__(self, "value", int(value) % self.modulus)

    def __setattr__(self, name, value):
        raise AttributeError("PrimeFieldElement is immutable")

    def _coerce(self, other) -> int:
        if isinstance(other, PrimeFieldElement):
            if other.modulus != self.modulus:
                raise FieldMismatch(f"F_{self.modulus} vs F_{other.modulus}")
            return other.value
        if isinstance(other, int):
            return other % self.modulus
        if isinstance(other, Fraction):
            den = other.denominator % self.modulus
            if den == 0:
                raise DivisionByZero(f"denominator {other.denominator} vanishes mod {self.modulus}")
            return other.numerator * pow(den, -1, self.modulus) % self.modulus
        return NotImplemented

    def _make(self, value: int) -> PrimeFieldElement:
        return PrimeFieldElement(value, self.modulus)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._make(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._make(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._make(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._make(self.value * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * self._make(o).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._make(o) * self.inverse()

    def __neg__(self):
        return self._make(-self.value)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return self._make(pow(self.value, n, self.modulus))

    def inverse(self) -> PrimeFieldElement:
        if self.value == 0:
            raise DivisionByZero(f"0 has no inverse in F_{self.modulus}")
        return self._make(pow(self.value, -1, self.modulus))

    def __eq__(self, other):
        if isinstance(other, PrimeFieldElement):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"PrimeFieldElement({self.value}, {self.modulus})"

    def __str__(self):
        return f"{self.value} mod {self.modulus}"


def field_inverse(x):
    """Multiplicative inverse of a Rational/int or a PrimeFieldElement."""
    if isinstance(x, PrimeFieldElement):
        return x.inverse()
    if isinstance(x, (int, Fraction)):
        if x == 0:
            raise DivisionByZero("0 has no inverse in Q")
        return 1 / Fraction(x)
    raise TypeError(f"unsupported scalar {x!r}")


def parse_rational(text: str) -> Fraction:
    """Parse a decimal integer or ``num/den``; raises ValueError."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        n, d = int(num), int(den)
        if d == 0:
            raise ValueError("zero denominator")
        return Fraction(n, d)
    return Fraction(int(text))


def is_prime(n: int) -> bool:
    return n > 1 and bool(sympy.isprime(n))


# --------------------------------------------------------------------------
# Base fields
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalField:
    """The field Q.  Scalars are Fractions; normalized points use ints."""

    characteristic = 0
    is_finite = False

    @property
    def descriptor(self) -> str:
        return "Q"

    @property
    def dtype(self):
        return object

    def __str__(self):
        return "Q"

    def coerce(self, value) -> Fraction:
        if isinstance(value, PrimeFieldElement):
            raise FieldMismatch("cannot lift an F_p element to Q")
        if isinstance(value, str):
            return parse_rational(value)
        if isinstance(value, (int, Fraction, _RationalABC)):
            return Fraction(value)
        if isinstance(value, np.integer):
            return Fraction(int(value))
        raise TypeError(f"cannot coerce {value!r} into Q")

    scalar = coerce

    def is_zero(self, x) -> bool:
        return x == 0

    def inv(self, x) -> Fraction:
        if x == 0:
            raise DivisionByZero("0 has no inverse in Q")
        return 1 / Fraction(x)

    def array(self, values) -> np.ndarray:
        arr = np.empty(np.shape(values), dtype=object)
        flat = arr.reshape(-1)
        for idx, v in enumerate(np.asarray(values, dtype=object).reshape(-1)):
            flat[idx] = self.coerce(v)
        return arr

    def reduce(self, arr):
        return arr

    def sqrt(self, x) -> Fraction | None:
        """A square root of ``x`` in Q, or None."""
        x = Fraction(x)
        if x < 0:
            return None
        rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if rn * rn == x.numerator and rd * rd == x.denominator:
            return Fraction(rn, rd)
        return None

    def random_element(self, rng, nonzero=False, bound=9) -> Fraction:
        while True:
            v = rng.randint(-bound, bound)
            if v or not nonzero:
                return Fraction(v)


QQ = RationalField()


@dataclass(frozen=True)
class PrimeField:
    """F_p for an odd prime p.  Scalars are ints in ``[0, p)``."""

    p: int
    is_finite = True

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise NonPrimeModulus(f"modulus {self.p!r} is not prime")
        if self.p < 3:
            raise BadField("characteristic 2 is not supported")

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def descriptor(self) -> str:
        return f"Fp:{self.p}"

    @property
    def dtype(self):
        return np.int64 if self.p < _INT64_MODULUS_LIMIT else object

    def __str__(self):
        return f"F_{self.p}"

    def coerce(self, value) -> int:
        if isinstance(value, PrimeFieldElement):
            if value.modulus != self.p:
                raise FieldMismatch(f"F_{value.modulus} element used over F_{self.p}")
            return value.value
        if isinstance(value, str):
            value = parse_rational(value)
        if isinstance(value, (bool, np.integer)):
            value = int(value)
        if isinstance(value, int):
            return value % self.p
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise DivisionByZero(f"denominator {value.denominator} vanishes mod {self.p}")
            return value.numerator * pow(den, -1, self.p) % self.p
        raise TypeError(f"cannot coerce {value!r} into F_{self.p}")

    def scalar(self, value) -> int:
        return int(value) % self.p

    def element(self, value) -> PrimeFieldElement:
        return PrimeFieldElement(self.coerce(value), self.p)

    def is_zero(self, x) -> bool:
        return x % self.p == 0

    def inv(self, x) -> int:
        x %= self.p
        if x == 0:
            raise DivisionByZero(f"0 has no inverse in F_{self.p}")
        return pow(x, -1, self.p)

    def array(self, values) -> np.ndarray:
        src = np.asarray(values, dtype=object)
        out = np.empty(src.shape, dtype=self.dtype)
        flat = out.reshape(-1)
        for idx, v in enumerate(src.reshape(-1)):
            flat[idx] = self.coerce(v)
        return out

    def reduce(self, arr):
        return arr % self.p

    def sqrt(self, x) -> int | None:
        x %= self.p
        if x == 0:
            return 0
        return sqrt_mod(x, self.p)

    def random_element(self, rng, nonzero=False, bound=None) -> int:
        return rng.randrange(1 if nonzero else 0, self.p)

    def elements(self) -> range:
        return range(self.p)


Field = Union[RationalField, PrimeField]


def parse_field(descriptor: str) -> Field:
    """``"Q"``, ``"Fp:101"`` or ``"Fp 101"`` to a field object."""
    text = descriptor.strip()
    if text in ("Q", "QQ"):
        return QQ
    head, _, rest = text.replace(":", " ").partition(" ")
    if head != "Fp" or not rest.strip():
        raise BadField(f"unknown field descriptor {descriptor!r}")
    try:
        p = int(rest.strip())
    except ValueError:
        raise BadField(f"bad modulus in {descriptor!r}") from None
    return PrimeField(p)


# --------------------------------------------------------------------------
# Q(sqrt 3)
# --------------------------------------------------------------------------


class QuadraticSurd:
    """Exact ``a + b*sqrt(3)`` with rational a, b."""

    RADICAND = 3
    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticSurd is immutable")

    @classmethod
    def _lift(cls, other):
        if isinstance(other, QuadraticSurd):
            return other
        if isinstance(other, (int, Fraction)):
            return cls(other, 0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else QuadraticSurd(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else QuadraticSurd(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        r = self.RADICAND
        return QuadraticSurd(self.a * o.a + r * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b)

    def conjugate(self) -> QuadraticSurd:
        return QuadraticSurd(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.RADICAND * self.b * self.b

    def inverse(self) -> QuadraticSurd:
        n = self.norm()
        if n == 0:
            raise DivisionByZero("inverse of zero in Q(sqrt 3)")
        c = self.conjugate()
        return QuadraticSurd(c.a / n, c.b / n)

    def __truediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QuadraticSurd(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(3)."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: the larger of a^2 and 3b^2 wins
        return sa if self.a * self.a > self.RADICAND * self.b * self.b else sb

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return (self - o).sign()

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b, self.RADICAND))

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        if (self.a >= 0) == (self.b >= 0) or self.a == 0 or self.b == 0:
            return float(self.a) + float(self.b) * math.sqrt(self.RADICAND)
        # opposite signs cancel; divide the norm by the conjugate instead
        c = self.conjugate()
        return float(self.norm()) / (float(c.a) + float(c.b) * math.sqrt(self.RADICAND))

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        b_abs = abs(self.b)
        coef = "" if b_abs == 1 else str(b_abs)
        surd = f"{coef}√{self.RADICAND}"
        if self.a == 0:
            return ("-" if self.b < 0 else "") + surd
        return f"{self.a}{'-' if self.b < 0 else '+'}{surd}"


# --------------------------------------------------------------------------
# 3x3 integer matrices and their characteristic polynomials
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IntMatrix3:
    """Exact 3x3 integer matrix, stored row-major as nested tuples."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("IntMatrix3 needs exactly 3x3 entries")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls) -> IntMatrix3:
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @classmethod
    def zero(cls) -> IntMatrix3:
        return cls(((0, 0, 0), (0, 0, 0), (0, 0, 0)))

    @classmethod
    def diagonal(cls, d0, d1, d2) -> IntMatrix3:
        return cls(((d0, 0, 0), (0, d1, 0), (0, 0, d2)))

    def __getitem__(self, idx):
        r, c = idx
        return self.rows[r][c]

    def column(self, t: int) -> tuple:
        return tuple(row[t] for row in self.rows)

    def tolist(self) -> list:
        return [list(r) for r in self.rows]

    def __matmul__(self, other):
        if isinstance(other, IntMatrix3):
            cols = [other.column(t) for t in range(3)]
            return IntMatrix3(tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.rows
            ))
        vec = tuple(other)
        if len(vec) != 3:
            raise ValueError("expected a 3-vector")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.rows)

    def __add__(self, other: IntMatrix3) -> IntMatrix3:
        return IntMatrix3(tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)
        ))

    def __sub__(self, other: IntMatrix3) -> IntMatrix3:
        return self + other.scale(-1)

    def scale(self, c: int) -> IntMatrix3:
        return IntMatrix3(tuple(tuple(c * a for a in r) for r in self.rows))

    def __pow__(self, n: int) -> IntMatrix3:
        return mat_pow(self, n)

    def trace(self) -> int:
        return self.rows[0][0] + self.rows[1][1] + self.rows[2][2]

    def det(self) -> int:
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def inf_norm(self) -> int:
        return max(sum(abs(v) for v in row) for row in self.rows)

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(v) for v in r) + "]" for r in self.rows) + "]"


def mat_pow(M: IntMatrix3, n: int) -> IntMatrix3:
    """Exact M**n by repeated squaring."""
    if n < 0:
        raise ValueError("negative exponent")
    result, base = IntMatrix3.identity(), M
    while n:
        if n & 1:
            result = result @ base
        base = base @ base
        n >>= 1
    return result


@dataclass(frozen=True)
class Cubic:
    """Monic integer cubic ``x^3 + c2 x^2 + c1 x + c0``."""

    c2: int
    c1: int
    c0: int

    @property
    def coefficients(self) -> tuple:
        """Coefficients from the leading term down."""
        return (1, self.c2, self.c1, self.c0)

    def __call__(self, x):
        return ((x + self.c2) * x + self.c1) * x + self.c0

    def at_matrix(self, M: IntMatrix3) -> IntMatrix3:
        """Evaluate at a matrix (Horner)."""
        eye = IntMatrix3.identity()
        acc = M + eye.scale(self.c2)
        acc = acc @ M + eye.scale(self.c1)
        return acc @ M + eye.scale(self.c0)

    def integer_roots(self) -> list:
        """Distinct integer roots (all rational roots of a monic integer cubic)."""
        if self.c0 == 0:
            roots = {0}
            # x * (x^2 + c2 x + c1)
            roots.update(_quadratic_integer_roots(self.c2, self.c1))
            return sorted(roots)
        cands = sympy.divisors(abs(self.c0))
        return sorted({s * d for d in cands for s in (1, -1) if self(s * d) == 0})

    def deflate(self, r: int) -> tuple:
        """Quotient by (x - r) as monic quadratic coefficients (p, q)."""
        if self(r) != 0:
            raise ValueError(f"{r} is not a root")
        p = self.c2 + r
        q = self.c1 + r * p
        return p, q

    def roots_exact(self) -> list:
        """All three roots with multiplicity, as Fractions or QuadraticSurds.

        Raises UnsupportedSpectrum unless the cubic is a rational linear
        factor times a quadratic splitting over Q(sqrt(3)).
        """
        ints = self.integer_roots()
        if not ints:
            raise UnsupportedSpectrum(f"{self} has no rational root")
        r = ints[0]
        p, q = self.deflate(r)
        disc = p * p - 4 * q
        roots = [Fraction(r)]
        if disc < 0:
            raise UnsupportedSpectrum(f"{self} has complex roots")
        s = math.isqrt(disc)
        if s * s == disc:
            roots += [Fraction(-p + s, 2), Fraction(-p - s, 2)]
        else:
            if disc % QuadraticSurd.RADICAND:
                raise UnsupportedSpectrum(f"{self}: discriminant {disc} outside Q(sqrt 3)")
            t2 = disc // QuadraticSurd.RADICAND
            t = math.isqrt(t2)
            if t * t != t2:
                raise UnsupportedSpectrum(f"{self}: discriminant {disc} outside Q(sqrt 3)")
            half = Fraction(t, 2)
            roots += [QuadraticSurd(Fraction(-p, 2), half), QuadraticSurd(Fraction(-p, 2), -half)]
        return roots

    def __str__(self):
        return format_polynomial(self.coefficients)


def _quadratic_integer_roots(p: int, q: int) -> set:
    disc = p * p - 4 * q
    if disc < 0:
        return set()
    s = math.isqrt(disc)
    if s * s != disc or (p + s) % 2:
        return set()
    return {(-p + s) // 2, (-p - s) // 2}


def format_polynomial(coeffs: Sequence[int], var: str = "λ") -> str:
    """Render integer coefficients (highest degree first), e.g. ``λ^3 - 15λ^2 + 15λ - 1``."""
    deg = len(coeffs) - 1
    parts = []
    for power, c in zip(range(deg, -1, -1), coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if power == 0:
            body = str(mag)
        else:
            body = ("" if mag == 1 else str(mag)) + var + ("" if power == 1 else f"^{power}")
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts) if parts else "0"


def char_poly_3x3(M: IntMatrix3) -> Cubic:
    """det(xI - M), monic."""
    (a, b, c), (d, e, f), (g, h, i) = M.rows
    minors = (e * i - f * h) + (a * i - c * g) + (a * e - b * d)
    return Cubic(-M.trace(), minors, -M.det())


def spectral_radius_exact(M: IntMatrix3):
    """Largest absolute value of an eigenvalue, as a Fraction or QuadraticSurd."""
    roots = char_poly_3x3(M).roots_exact()
    best = max((abs(r) for r in roots), key=_sort_key)
    return best


def _sort_key(x):
    # total order on Fraction/QuadraticSurd values via exact comparison
    return _ExactKey(x)


class _ExactKey:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = QuadraticSurd._lift(v) if not isinstance(v, QuadraticSurd) else v

    def __lt__(self, other):
        return self.v < other.v
