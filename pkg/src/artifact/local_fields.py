"""p-adic numbers, quadratic etale algebras over Q_p and the P^1 coset spaces.

Exact work is done over Python ``Fraction``: a rational number is a perfectly
good element of Q_p, and every matrix we need has rational entries.  The
truncated ``PAdicElement`` type is there for inputs and outputs that are
genuinely p-adic (arbitrary units known to finite precision).
"""

from dataclasses import dataclass
from fractions import Fraction
import math

DEFAULT_PRECISION = 40


def valuation(x, p):
    """p-adic valuation of an integer or Fraction (math.inf for zero)."""
    x = Fraction(x)
    if x == 0:
        return math.inf
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(x, p):
    """x / p^v(x) as a Fraction."""
    x = Fraction(x)
    v = valuation(x, p)
    return x / Fraction(p) ** v


def residue(x, p, n):
    """Reduce a p-integral rational modulo p^n."""
    x = Fraction(x)
    if n <= 0:
        return 0
    mod = p ** n
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return (x.numerator * pow(x.denominator, -1, mod)) % mod


def is_integral(x, p):
    return Fraction(x).denominator % p != 0


class PAdicElement:
    """An element p^v * u of Q_p with u a unit known modulo p^m."""

    __slots__ = ("p", "valuation", "unit", "precision")

    def __init__(self, p, valuation, unit, precision=DEFAULT_PRECISION):
        if p == 2 or p < 2:
            raise ValueError("only odd primes are supported")
        self.p = p
        self.precision = precision
        if valuation == math.inf:
            self.valuation = math.inf
            self.unit = 0
            return
        unit %= p ** precision
        if unit % p == 0:
            raise ValueError("unit part must be prime to p")
        self.valuation = valuation
        self.unit = unit

    @classmethod
    def from_rational(cls, x, p, precision=DEFAULT_PRECISION):
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, precision)
        v = valuation(x, p)
        return cls(p, v, residue(unit_part(x, p), p, precision), precision)

    @classmethod
    def zero(cls, p, precision=DEFAULT_PRECISION):
        obj = cls.__new__(cls)
        obj.p, obj.valuation, obj.unit, obj.precision = p, math.inf, 0, precision
        return obj

    def is_zero(self):
        return self.valuation == math.inf

    def to_rational(self):
        """A rational representative (the unit part as an integer in [0, p^m))."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.valuation

    def norm(self):
        """The normalized absolute value |x| = p^(-v)."""
        return 0.0 if self.is_zero() else float(self.p) ** (-self.valuation)

    def _coerce(self, other):
        if isinstance(other, PAdicElement):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other
        return PAdicElement.from_rational(other, self.p, self.precision)

    # absolute precision: known modulo p^(v + m)
    def _abs_prec(self):
        return math.inf if self.is_zero() else self.valuation + self.precision

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        low = min(self.valuation, other.valuation)
        cap = min(self._abs_prec(), other._abs_prec())
        mod = self.p ** (cap - low)
        total = (self.unit * self.p ** (self.valuation - low)
                 + other.unit * self.p ** (other.valuation - low)) % mod
        if total == 0:
            return PAdicElement.zero(self.p, self.precision)
        v = valuation(total, self.p)
        return PAdicElement(self.p, low + v, total // self.p ** v, cap - low - v)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PAdicElement(self.p, self.valuation, -self.unit, self.precision)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return PAdicElement.zero(self.p, min(self.precision, other.precision))
        m = min(self.precision, other.precision)
        return PAdicElement(self.p, self.valuation + other.valuation,
                            self.unit * other.unit, m)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        mod = self.p ** self.precision
        return PAdicElement(self.p, -self.valuation, pow(self.unit, -1, mod), self.precision)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = PAdicElement.from_rational(1, self.p, self.precision)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            diff = self - self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return diff.is_zero()

    def __hash__(self):
        return hash((self.p, self.valuation, self.unit))

    def __repr__(self):
        if self.is_zero():
            return f"0 (mod {self.p}^inf)"
        return f"{self.p}^{self.valuation}*{self.unit} (+O({self.p}^{self.precision}))"


# ---------------------------------------------------------------------------
# quadratic algebras

SPLIT, INERT, RAMIFIED = "split", "inert", "ramified"


def _legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True)
class QuadraticAlgebra:
    """E = F x F, or F[theta] with theta^2 - T theta + N = 0."""

    p: int
    kind: str
    T: int = 0
    N: int = 0

    @property
    def e(self):
        return 2 if self.kind == RAMIFIED else 1

    @property
    def f(self):
        return 2 if self.kind == INERT else 1

    @property
    def is_split(self):
        return self.kind == SPLIT

    def element(self, a, b):
        """a + b*theta (non-split) or the pair (a, b) (split)."""
        return TorusElement(self, Fraction(a), Fraction(b))

    def one(self):
        return self.element(1, 1) if self.is_split else self.element(1, 0)

    def from_base(self, x):
        x = Fraction(x)
        return self.element(x, x) if self.is_split else self.element(x, 0)

    @property
    def theta(self):
        if self.is_split:
            raise ValueError("split algebra has no theta")
        return self.element(0, 1)

    @property
    def j(self):
        """The purely imaginary element: (-1, 1), or theta^c - theta."""
        if self.is_split:
            return self.element(-1, 1)
        return self.theta.conj() - self.theta

    @property
    def uniformizer(self):
        """A uniformizer of E (the field case only)."""
        if self.kind == INERT:
            return self.element(self.p, 0)
        if self.kind == RAMIFIED:
            return self.theta
        raise ValueError("split algebra has no uniformizer")

    @property
    def additive_level(self):
        """Level of psi o Tr when psi has level 0 (1 exactly when ramified)."""
        return 1 if self.kind == RAMIFIED else 0

    def valuation(self, z):
        """Normalized valuation on E (a pair of valuations when split)."""
        if self.is_split:
            return valuation(z.a, self.p), valuation(z.b, self.p)
        return valuation(z.norm(), self.p) // self.f

    def residue_units(self, n):
        """Representatives of (O_E / varpi_E^n)^x as TorusElements (field case)."""
        p = self.p
        if n == 0:
            return [self.one()]
        if self.kind == INERT:
            out = []
            for a in range(p ** n):
                for b in range(p ** n):
                    if a % p or b % p:
                        out.append(self.element(a, b))
            return out
        if self.kind == RAMIFIED:
            na, nb = (n + 1) // 2, n // 2
            return [self.element(a, b) for a in range(p ** na) if a % p
                    for b in range(p ** nb)]
        raise ValueError("split algebra: use the two factors")


def build_quadratic(p, kind, T=0, N=0):
    """Validate (kind, T, N) and return the algebra."""
    if p % 2 == 0:
        raise ValueError("p must be odd")
    if kind == SPLIT:
        return QuadraticAlgebra(p, SPLIT, 0, 0)
    disc = T * T - 4 * N
    if kind == INERT:
        if N % p == 0:
            raise ValueError("inert algebra needs N a unit")
        if _legendre(disc, p) != -1:
            raise ValueError(f"x^2 - {T}x + {N} is not irreducible mod {p}")
        return QuadraticAlgebra(p, INERT, T, N)
    if kind == RAMIFIED:
        if valuation(N, p) != 1 or T % p:
            raise ValueError("ramified algebra needs v(N) = 1 and p | T (Eisenstein)")
        return QuadraticAlgebra(p, RAMIFIED, T, N)
    raise ValueError(f"unknown kind {kind!r}")


class TorusElement:
    """An element of E: a + b*theta, or the pair (a, b) when E is split."""

    __slots__ = ("algebra", "a", "b")

    def __init__(self, algebra, a, b):
        self.algebra = algebra
        self.a = Fraction(a)
        self.b = Fraction(b)

    def _new(self, a, b):
        return TorusElement(self.algebra, a, b)

    def __add__(self, other):
        return self._new(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return self._new(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return self._new(-self.a, -self.b)

    def __mul__(self, other):
        if not isinstance(other, TorusElement):
            other = self.algebra.from_base(other)
        if self.algebra.is_split:
            return self._new(self.a * other.a, self.b * other.b)
        T, N = self.algebra.T, self.algebra.N
        # theta^2 = T theta - N
        a = self.a * other.a - N * self.b * other.b
        b = self.a * other.b + self.b * other.a + T * self.b * other.b
        return self._new(a, b)

    __rmul__ = __mul__

    def conj(self):
        if self.algebra.is_split:
            return self._new(self.b, self.a)
        return self._new(self.a + self.algebra.T * self.b, -self.b)

    def norm(self):
        if self.algebra.is_split:
            return self.a * self.b
        T, N = self.algebra.T, self.algebra.N
        return self.a * self.a + T * self.a * self.b + N * self.b * self.b

    def trace(self):
        if self.algebra.is_split:
            return self.a + self.b
        return 2 * self.a + self.algebra.T * self.b

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("non-invertible element of E")
        c = self.conj()
        return self._new(c.a / n, c.b / n)

    def __truediv__(self, other):
        if not isinstance(other, TorusElement):
            other = self.algebra.from_base(other)
        return self * other.inverse()

    def __pow__(self, n):
        base = self if n >= 0 else self.inverse()
        out = self.algebra.one()
        for _ in range(abs(n)):
            out = out * base
        return out

    def __eq__(self, other):
        return (isinstance(other, TorusElement) and self.algebra == other.algebra
                and self.a == other.a and self.b == other.b)

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        if self.algebra.is_split:
            return f"({self.a}, {self.b})"
        return f"{self.a} + {self.b}*theta"


def embed_torus(t):
    """The fixed embedding E^x -> GL_2(F) as a 2x2 tuple of Fractions."""
    alg = t.algebra
    if t.norm() == 0:
        raise ZeroDivisionError("non-invertible torus element")
    if alg.is_split:
        return ((t.a, Fraction(0)), (Fraction(0), t.b))
    T, N = alg.T, alg.N
    return ((t.a + t.b * T, t.b * N), (-t.b, t.a))


# ---------------------------------------------------------------------------
# 2x2 matrices over Q, stored as nested tuples of Fractions

def mat(rows):
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def mat_mul(g, h):
    return ((g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
            (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]))


def mat_det(g):
    return g[0][0] * g[1][1] - g[0][1] * g[1][0]


def mat_inv(g):
    d = mat_det(g)
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    return ((g[1][1] / d, -g[0][1] / d), (-g[1][0] / d, g[0][0] / d))


def mat_scale(g, c):
    c = Fraction(c)
    return tuple(tuple(c * x for x in row) for row in g)


def is_in_maximal_compact(g, p):
    return all(is_integral(x, p) for row in g for x in row) and valuation(mat_det(g), p) == 0


def iwasawa_decompose(g, p):
    """Write g = b * k with b upper triangular and k in SL_2(Z_p).

    k is one of the standard representatives [[1,0],[c,1]] or [[0,-1],[1,d]]
    (c in Z_p, d in pZ_p), so the class of k in P^1 can be read off directly.
    Everything is exact; no precision is lost.
    """
    (a, b), (c, d) = g
    if mat_det(g) == 0:
        raise ZeroDivisionError("singular matrix")
    if valuation(d, p) <= valuation(c, p):
        x = c / d
        k = ((Fraction(1), Fraction(0)), (x, Fraction(1)))
        upper = ((a - b * x, b), (Fraction(0), d))
    else:
        y = d / c
        k = ((Fraction(0), Fraction(-1)), (Fraction(1), y))
        upper = ((mat_det(g) / c, a), (Fraction(0), c))
    return upper, k


def cartan_decompose(g, p):
    """Write g = k1 * diag(p^a, p^b) * k2 with k1, k2 in GL_2(Z_p) and a >= b."""
    entries = [(valuation(g[i][j], p), i, j) for i in range(2) for j in range(2)]
    v, i, j = min(entries)
    swap = mat([[0, 1], [1, 0]])
    one = mat([[1, 0], [0, 1]])
    left = swap if i == 1 else one
    right = swap if j == 1 else one
    h = mat_mul(mat_mul(left, g), right)       # pivot now at (0, 0)
    piv = h[0][0]
    lower = mat([[1, 0], [h[1][0] / piv, 1]])  # h = lower * h' with h'[1][0] = 0
    upper = mat([[1, h[0][1] / piv], [0, 1]])
    middle = mat_mul(mat_mul(mat_inv(lower), h), mat_inv(upper))
    d1, d2 = middle[0][0], middle[1][1]
    b_exp, a_exp = valuation(d1, p), valuation(d2, p)
    units = mat([[unit_part(d1, p), 0], [0, unit_part(d2, p)]])
    # g = left^-1 lower units diag(p^b, p^a) upper right^-1
    k1 = mat_mul(mat_mul(mat_inv(left), lower), units)
    k2 = mat_mul(upper, mat_inv(right))
    # reorder to diag(p^a, p^b) with a >= b
    k1 = mat_mul(k1, swap)
    k2 = mat_mul(swap, k2)
    return k1, a_exp, b_exp, k2


# ---------------------------------------------------------------------------
# P^1(Z/p^r)

class CosetSpaceP1:
    """Representatives of P^1(Z/p^r): (c:1) for c mod p^r, then (1:d) for d in pZ/p^r."""

    def __init__(self, p, r):
        self.p = p
        self.r = r
        self.modulus = p ** r
        self.size = p ** r + (p ** (r - 1) if r >= 1 else 0)

    def __len__(self):
        return self.size

    def representative(self, i):
        """Row vector of the i-th class."""
        if i < self.modulus:
            return (Fraction(i), Fraction(1))
        return (Fraction(1), Fraction((i - self.modulus) * self.p))

    def representative_matrix(self, i):
        """An element of SL_2(Z_p) whose bottom row is the i-th representative."""
        c, d = self.representative(i)
        if i < self.modulus:
            return ((Fraction(1), Fraction(0)), (c, d))
        return ((Fraction(0), Fraction(-1)), (c, d))

    def index_of_row(self, c, d):
        """Index of the class of a primitive p-integral row vector (c, d)."""
        p, r = self.p, self.r
        if r == 0:
            return 0
        if valuation(d, p) <= valuation(c, p):
            return residue(Fraction(c) / Fraction(d), p, r)
        x = residue(Fraction(d) / Fraction(c), p, r)
        return self.modulus + x // p

    def index_of_k(self, k):
        return self.index_of_row(k[1][0], k[1][1])
