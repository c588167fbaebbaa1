"""Exact algebraic representations Sym^{k-2} (x) det^{(w-k+2)/2} (x) sigma^{(l-w)/2} sigma^{c,(-l-w)/2}.

Vectors are homogeneous polynomials of degree k - 2 in x, y, stored as the
coefficient list of x^{k-2}, x^{k-3} y, ..., y^{k-2}.  Coefficients live in
an exact ring: Q, Q(theta) = Q[theta]/(theta^2 - T theta + N), or Q x Q.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb

RATIONAL, QUADRATIC, SPLIT = "rational", "quadratic", "split"


class CoefficientField:
    """Q, Q(theta) with theta^2 = T theta - N, or the split algebra Q x Q."""

    def __init__(self, kind=RATIONAL, T=0, N=0):
        if kind == QUADRATIC:
            d = T * T - 4 * N
            if d >= 0 and round(d ** 0.5) ** 2 == d:
                raise ValueError(f"x^2 - {T}x + {N} is reducible over Q")
        self.kind = kind
        self.T = Fraction(T)
        self.N = Fraction(N)

    @classmethod
    def rational(cls):
        return cls(RATIONAL)

    @classmethod
    def quadratic(cls, T, N):
        return cls(QUADRATIC, T, N)

    @classmethod
    def split(cls):
        return cls(SPLIT)

    def __eq__(self, other):
        return (isinstance(other, CoefficientField) and self.kind == other.kind
                and self.T == other.T and self.N == other.N)

    def __hash__(self):
        return hash((self.kind, self.T, self.N))

    def __repr__(self):
        if self.kind == QUADRATIC:
            return f"Q[theta]/(theta^2 - {self.T} theta + {self.N})"
        return "Q x Q" if self.kind == SPLIT else "Q"

    def __call__(self, a, b=0):
        return Coef(self, Fraction(a), Fraction(b))

    def zero(self):
        return self(0)

    def one(self):
        return self(1, 1) if self.kind == SPLIT else self(1)

    def scalar(self, x):
        """The image of a rational number."""
        if isinstance(x, Coef):
            return x
        x = Fraction(x)
        return self(x, x) if self.kind == SPLIT else self(x)

    @property
    def theta(self):
        if self.kind != QUADRATIC:
            raise ValueError("no theta in this ring")
        return self(0, 1)

    @property
    def j(self):
        """theta^c - theta, or (-1, 1) when split."""
        if self.kind == SPLIT:
            return self(-1, 1)
        if self.kind == RATIONAL:
            raise ValueError("no j over Q")
        return self.theta.conj() - self.theta


@dataclass(frozen=True)
class Coef:
    """a + b theta (quadratic), the pair (a, b) (split), or a (rational, b = 0)."""

    field: CoefficientField
    a: Fraction
    b: Fraction = Fraction(0)

    def _lift(self, other):
        if isinstance(other, Coef):
            if other.field != self.field:
                raise TypeError(f"mixing {self.field} and {other.field}")
            return other
        return self.field.scalar(other)

    def __add__(self, other):
        o = self._lift(other)
        return Coef(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Coef(self.field, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        F = self.field
        if F.kind == QUADRATIC:
            bd = self.b * o.b
            return Coef(F, self.a * o.a - bd * F.N, self.a * o.b + self.b * o.a + bd * F.T)
        if F.kind == SPLIT:
            return Coef(F, self.a * o.a, self.b * o.b)
        return Coef(F, self.a * o.a)

    __rmul__ = __mul__

    def conj(self):
        F = self.field
        if F.kind == QUADRATIC:
            return Coef(F, self.a + self.b * F.T, -self.b)
        if F.kind == SPLIT:
            return Coef(F, self.b, self.a)
        return self

    def norm(self):
        """self * conj(self) as a rational."""
        n = self * self.conj()
        return n.a

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def inverse(self):
        F = self.field
        if F.kind == SPLIT:
            if self.a == 0 or self.b == 0:
                raise ZeroDivisionError(f"{self} is a zero divisor")
            return Coef(F, 1 / self.a, 1 / self.b)
        n = self.norm() if F.kind == QUADRATIC else self.a
        if n == 0:
            raise ZeroDivisionError("division by zero")
        if F.kind == RATIONAL:
            return Coef(F, 1 / self.a)
        c = self.conj()
        return Coef(F, c.a / n, c.b / n)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self.field.one(), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.field, self.a, self.b))

    def __repr__(self):
        if self.field.kind == QUADRATIC:
            return f"({self.a} + {self.b}*theta)"
        if self.field.kind == SPLIT:
            return f"({self.a}, {self.b})"
        return str(self.a)


# ---------------------------------------------------------------------------
# polynomial representations

@dataclass(frozen=True)
class Weight:
    w: int
    k: int
    l: int

    def __post_init__(self):
        if (self.w - self.k) % 2 or (self.l - self.k) % 2:
            raise ValueError("w, k, l must have the same parity")
        if self.k < 2 or abs(self.l) >= self.k:
            raise ValueError("need k >= 2 and |l| < k")

    @property
    def dim(self):
        return self.k - 1

    @property
    def a(self):
        """(k - 2 - l) / 2"""
        return (self.k - 2 - self.l) // 2

    @property
    def b(self):
        """(k - 2 + l) / 2"""
        return (self.k - 2 + self.l) // 2

    def dual(self):
        return Weight(-self.w, self.k, -self.l)


class PolyRep:
    """W_{w,k,l} with coefficients in ``field``; E is split iff field.kind == SPLIT.

    For split E the polynomial coefficients are rationals (embedded in the
    first factor); elements h of E are pairs in Q x Q with sigma(h) = h.a.
    """

    def __init__(self, weight, field):
        self.weight = weight
        self.field = field
        self.coeffs = CoefficientField.rational() if field.kind == SPLIT else field

    @property
    def degree(self):
        return self.weight.k - 2

    @property
    def dim(self):
        return self.weight.dim

    def dual(self):
        return PolyRep(self.weight.dual(), self.field)

    def vector(self, coeffs):
        c = [self.coeffs.scalar(x) for x in coeffs]
        if len(c) != self.dim:
            raise ValueError(f"expected {self.dim} coefficients")
        return c

    def monomial(self, i):
        """x^{k-2-i} y^i"""
        v = [self.coeffs.zero()] * self.dim
        v[i] = self.coeffs.one()
        return v

    def linear_power_product(self, forms):
        """prod of (alpha x + beta y)^e over forms = [((alpha, beta), e), ...]."""
        poly = [self.coeffs.one()]
        for (al, be), e in forms:
            al, be = self.coeffs.scalar(al), self.coeffs.scalar(be)
            for _ in range(e):
                new = [self.coeffs.zero()] * (len(poly) + 1)
                for i, c in enumerate(poly):
                    new[i] = new[i] + c * al
                    new[i + 1] = new[i + 1] + c * be
                poly = new
        return poly

    def sigma(self, h):
        """(sigma(h), sigma^c(h)) in the coefficient ring."""
        h = self.field.scalar(h)
        if self.field.kind == SPLIT:
            return self.coeffs(h.a), self.coeffs(h.b)
        return h, h.conj()

    def twist(self, g, h):
        wt = self.weight
        det = self.coeffs.scalar(g[0][0]) * g[1][1] - self.coeffs.scalar(g[0][1]) * g[1][0]
        if det.is_zero():
            raise ZeroDivisionError("g is not invertible")
        s, sc = self.sigma(h)
        if s.is_zero() or sc.is_zero():
            raise ZeroDivisionError("h is not invertible")
        return det ** ((wt.w - wt.k + 2) // 2) * s ** ((wt.l - wt.w) // 2) * sc ** ((-wt.l - wt.w) // 2)

    def act(self, g, h, vec, side="left"):
        """(g, h).p = twist * p((x, y) g) on the left, p.(g, h) = twist * p(g (x, y)^T) on the right."""
        g = [[self.coeffs.scalar(x) for x in row] for row in g]
        if side == "left":
            nx, ny = (g[0][0], g[1][0]), (g[0][1], g[1][1])
        elif side == "right":
            nx, ny = (g[0][0], g[0][1]), (g[1][0], g[1][1])
        else:
            raise ValueError("side must be 'left' or 'right'")
        n = self.degree
        out = [self.coeffs.zero()] * self.dim
        for i, c in enumerate(vec):
            if c.is_zero():
                continue
            term = self.linear_power_product([(nx, n - i), (ny, i)])
            for m, t in enumerate(term):
                out[m] = out[m] + c * t
        tw = self.twist(g, h)
        return [tw * c for c in out]

    def matrix(self, g, h, side="left"):
        """Columns are the images of the monomials."""
        cols = [self.act(g, h, self.monomial(i), side) for i in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]


def pairing(rep, p, q):
    """(x^{k-2-a} y^a, x^{a'} y^{k-2-a'}) = (-1)^a binom(k-2, a)^-1 delta_{a, a'}."""
    n = rep.degree
    out = rep.coeffs.zero()
    for i in range(n + 1):
        out = out + p[i] * q[n - i] * Fraction((-1) ** i, comb(n, i))
    return out


def pairing_matrix(rep):
    n = rep.degree
    return [[Fraction((-1) ** i, comb(n, i)) if i + j == n else Fraction(0)
             for j in range(n + 1)] for i in range(n + 1)]


# ---------------------------------------------------------------------------
# exact linear algebra

def nullspace(A, field):
    """Basis of {v : A v = 0} by Gauss-Jordan elimination over an exact field."""
    rows = [list(r) for r in A]
    m, n = len(rows), len(rows[0])
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [field.zero()] * n
        v[fc] = field.one()
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


def _transpose(A):
    return [list(r) for r in zip(*A)]


def _dot(u, v, field):
    out = field.zero()
    for a, b in zip(u, v):
        out = out + a * b
    return out


# ---------------------------------------------------------------------------
# torus and the H'-invariant projector

def torus_matrix(field, t):
    """The matrix of t in E^x acting on E = F^2 (diag for split, multiplication by t otherwise)."""
    t = field.scalar(t)
    if field.kind == SPLIT:
        return [[t.a, 0], [0, t.b]]
    return [[t.a + t.b * field.T, t.b * field.N], [-t.b, t.a]]


def generic_torus_element(field):
    """A torus element whose invariants are those of the whole torus.

    In the field case t / t^c must not be a root of unity; roots of unity in a
    quadratic field have order dividing 4 or 6, so (t / t^c)^12 != 1 suffices.
    """
    if field.kind == SPLIT:
        return field(2, 3)
    for a, b in ((1, 1), (1, 2), (2, 1), (1, 3), (3, 1)):
        t = field(a, b)
        if (t / t.conj()) ** 12 != field.one():
            return t
    raise ArithmeticError("no generic torus element found")


def invariant_line(rep, side="left"):
    """(v, u): v spans W^{H'} and u spans the invariants of the transposed action."""
    t = generic_torus_element(rep.field)
    A = rep.matrix(torus_matrix(rep.field, t), t, side)
    one = rep.coeffs.one()
    M = [[A[i][j] - (one if i == j else 0) for j in range(rep.dim)] for i in range(rep.dim)]
    v = nullspace(M, rep.coeffs)
    u = nullspace(_transpose(M), rep.coeffs)
    if len(v) != 1 or len(u) != 1:
        raise ArithmeticError(f"H'-invariants are {len(v)}-dimensional")
    return v[0], u[0]


def project_invariants(rep, vec, side="left"):
    """The idempotent projector p_{H'} = v u^T / (u^T v)."""
    v, u = invariant_line(rep, side)
    c = _dot(u, vec, rep.coeffs) / _dot(u, v, rep.coeffs)
    return [c * x for x in v]


# ---------------------------------------------------------------------------
# constants

def c_W(w, k, l, field):
    """The constant j^{-w-k+2} binom(k-2, a) (theta^{c,a} theta^b when E is a field)."""
    wt = Weight(w, k, l)
    binom = comb(k - 2, wt.a)
    if field.kind == SPLIT:
        # j^{-w-k+2} = 1 since w + k is even
        return CoefficientField.rational()(binom)
    th = field.theta
    return field.j ** (-w - k + 2) * binom * th.conj() ** wt.a * th ** wt.b


def c_W_unitary(w, k, l, field):
    """The normalizing constant for which the toric map on W is unitary.

    Split: binom(k-2, a).  Field case: (-1)^b N^{w-k+2} j^{2-k} theta^{c,a} theta^b binom(k-2, a).
    Over Q x Q the value is returned in the first factor's rationals.
    """
    wt = Weight(w, k, l)
    binom = comb(k - 2, wt.a)
    if field.kind == SPLIT:
        return CoefficientField.rational()(binom)
    th = field.theta
    return ((-1) ** wt.b * field.N ** (w - k + 2) * field.j ** (2 - k)
            * th.conj() ** wt.a * th ** wt.b * binom)


def mu_plus_j(weight, field):
    """mu^+(j) at infinity: (-1)^a split, (-1)^b j^{k-2} otherwise."""
    if field.kind == SPLIT:
        return CoefficientField.rational()((-1) ** weight.a)
    return field.j ** (weight.k - 2) * (-1) ** weight.b


def script_L_inf(weight):
    """(2 / (k - 1)) binom(k - 2, b)^-1."""
    return Fraction(2, weight.k - 1) / comb(weight.k - 2, weight.b)


# ---------------------------------------------------------------------------
# the identities

def wa_ord_alg(rep, vec):
    """w_a^ord on W^N: the left action of w_0 = [[0, 1], [-1, 0]] (w_0^iota = w_0)."""
    return rep.act([[0, 1], [-1, 0]], rep.field.one(), vec, "left")


def coinvariant_part(rep, vec, keep):
    """Project to a one-dimensional coinvariant space spanned by monomial ``keep``."""
    out = [rep.coeffs.zero()] * rep.dim
    out[keep] = vec[keep]
    return out


def verify_wao_alg(w, k, l):
    """(w_a^ord(x^{k-2}), x^{k-2}) = 1, after projecting to N^- coinvariants."""
    rep = PolyRep(Weight(w, k, l), CoefficientField.rational())
    top = rep.monomial(0)
    image = coinvariant_part(rep, wa_ord_alg(rep, top), rep.degree)
    return pairing(rep, image, top) == 1


def invariant_vectors(rep):
    """xi spanning W^{H'} and xi^v spanning W^{v,H'} with (xi, xi^v) = 1.

    Split: x^a y^b and x^b y^a.  Field case: z^a zbar^b, z^b zbar^a with
    z = x + theta^c y, zbar = x + theta y.
    """
    wt = rep.weight
    if rep.field.kind == SPLIT:
        xi, xv = rep.monomial(wt.b), rep.monomial(wt.a)
    else:
        th = rep.field.theta
        z, zb = (1, th.conj()), (1, th)
        xi = rep.linear_power_product([(z, wt.a), (zb, wt.b)])
        xv = rep.linear_power_product([(z, wt.b), (zb, wt.a)])
    s = pairing(rep, xi, xv)
    return xi, [c / s for c in xv]


def _gamma0_iota(field):
    """(gamma_0^T)^-1 with gamma_0 = [[1, 1], [0, 1]] (split) or diag(N, 1)."""
    if field.kind == SPLIT:
        return [[1, 0], [-1, 1]]
    return [[1 / field.N, 0], [0, 1]]


def is_invariant(rep, vec, side):
    t = generic_torus_element(rep.field)
    return rep.act(torus_matrix(rep.field, t), t, vec, side) == vec


def unitarity_pairings(w, k, l, field, constant=c_W_unitary):
    """((xi, xi^v), (xi gamma_p, xi^v gamma_inf)) for the algebraic toric map.

    The p-side limit keeps the y^{k-2} term: xi(y, y) when split, and
    N^{(w-k+2)/2} xi(0, y) otherwise.  The infinity side acts by gamma_0^iota
    on the right and keeps the x^{k-2} coefficient, divided by the constant.
    """
    wt = Weight(w, k, l)
    rep, drep = PolyRep(wt, field), PolyRep(wt.dual(), field)
    xi, xv = invariant_vectors(rep)
    if not (is_invariant(rep, xi, "right") and is_invariant(drep, xv, "right")):
        raise ArithmeticError("xi or xi^v is not H'-invariant")
    n = rep.degree
    p_side = [rep.coeffs.zero()] * rep.dim
    if field.kind == SPLIT:
        s = rep.coeffs.zero()
        for c in xi:
            s = s + c
        p_side[n] = s
    else:
        p_side[n] = xi[n] * field.N ** ((w - k + 2) // 2)
    moved = drep.act(_gamma0_iota(field), field.one(), xv, "right")
    inf_side = coinvariant_part(drep, moved, 0)
    c = constant(w, k, l, field)
    inf_side = [x / c for x in inf_side]
    return pairing(rep, xi, xv), pairing(rep, p_side, inf_side)


def verify_unitarity(w, k, l, field, constant=c_W_unitary):
    before, after = unitarity_pairings(w, k, l, field, constant)
    return before == after


def gamma_ord_inf(rep, vec, constant=c_W_unitary):
    """c^-1 (gamma_0^T)^-1 acting on the left, then projected onto H'-invariants."""
    wt = rep.weight
    c = constant(wt.w, wt.k, wt.l, rep.field)
    moved = rep.act(_gamma0_iota(rep.field), rep.field.one(), vec, "left")
    return project_invariants(rep, [x / c for x in moved], "left")


def q_inf_ratio(rep, f1, f2, f3, f4, vol=1):
    """L_inf^-1 vol (p_{H'} f1, p_{H'} f2) / (f3, f4), f1, f3 in W and f2, f4 in W^v."""
    den = pairing(rep, f3, f4)
    if den.is_zero():
        raise ZeroDivisionError("(f3, f4) = 0")
    drep = rep.dual()
    num = pairing(rep, project_invariants(rep, f1), project_invariants(drep, f2))
    return num * Fraction(vol) / script_L_inf(rep.weight) / den


def q_ord_inf_ratio(rep, f1, f2, f3, f4, vol=1):
    """mu^+(j) vol° (f1 (x) f2) / (f3 (x) f4) on highest weight lines, vol° = vol / 2."""
    def coord(v):
        if any(not c.is_zero() for c in v[1:]):
            raise ValueError("not a multiple of x^{k-2}")
        return v[0]
    den = coord(f3) * coord(f4)
    if den.is_zero():
        raise ZeroDivisionError("f3 or f4 is zero")
    return mu_plus_j(rep.weight, rep.field) * Fraction(vol, 2) * coord(f1) * coord(f2) / den


def compare_toric_inf(w, k, l, field, vol=1, constant=c_W_unitary):
    """Both sides of Q(gamma f (x) gamma f^v / w_a f (x) f^v) = dim W Q^ord(f (x) f^v / f (x) f^v)."""
    rep = PolyRep(Weight(w, k, l), field)
    drep = rep.dual()
    f, fv = rep.monomial(0), drep.monomial(0)
    g1, g2 = gamma_ord_inf(rep, f, constant), gamma_ord_inf(drep, fv, constant)
    wa = wa_ord_alg(rep, f)
    # (w_a f, f^v) = 1, so Q's denominator is 1 and Q only sees the projections
    den = pairing(rep, wa, fv)
    lhs = pairing(rep, g1, g2) * Fraction(vol) / script_L_inf(rep.weight) / den
    rhs = rep.dim * q_ord_inf_ratio(rep, f, fv, f, fv, vol)
    return lhs, rhs


def verify_compare_toric_inf(w, k, l, field, vol=1, constant=c_W_unitary):
    lhs, rhs = compare_toric_inf(w, k, l, field, vol, constant)
    return lhs == rhs


def weight_sweep(k_max):
    """All valid (w, k, l) with 2 <= k <= k_max; w runs over {-2, 0, 2} for even k
    and over {-3, -1, 1, 3} for odd k."""
    out = []
    for k in range(2, k_max + 1):
        ws = (-2, 0, 2) if k % 2 == 0 else (-3, -1, 1, 3)
        for l in range(-k + 1, k):
            if (l - k) % 2:
                continue
            for w in ws:
                out.append((w, k, l))
    return out
