"""Pfaffian regulators of a skew pairing h: M x M -> T, exactly over Q.

T has coordinates t_1..t_d, so Sym T is the polynomial ring Q[t_1..t_d] and h
is the matrix H = sum_k t_k H_k of linear forms.  Regulators are defined up to
a nonzero rational scalar; ``canonical`` picks a representative of each class.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial, gcd, lcm, prod

import sympy as sp


@dataclass
class SkewPairingData:
    """gram[i][j] is the vector h(x_i, x_j) in Q^d; companion is an optional symmetric r x r matrix."""

    gram: list
    companion: list = None

    def __post_init__(self):
        self.gram = [[[Fraction(c) for c in v] for v in row] for row in self.gram]
        r = len(self.gram)
        if any(len(row) != r for row in self.gram):
            raise ValueError("gram must be r x r")
        d = len(self.gram[0][0]) if r else 0
        for i in range(r):
            for j in range(r):
                if len(self.gram[i][j]) != d:
                    raise ValueError("all entries must lie in Q^d")
                if any(a != -b for a, b in zip(self.gram[i][j], self.gram[j][i])):
                    raise ValueError(f"h is not skew at ({i}, {j})")
        if self.companion is not None:
            self.companion = [[Fraction(c) for c in row] for row in self.companion]
            for i in range(r):
                for j in range(r):
                    if self.companion[i][j] != self.companion[j][i]:
                        raise ValueError("companion pairing is not symmetric")
        self._d = d

    @property
    def r(self):
        return len(self.gram)

    @property
    def d(self):
        return self._d

    @classmethod
    def from_matrices(cls, mats, companion=None):
        """From the component matrices H_1..H_d."""
        r = len(mats[0])
        gram = [[[m[i][j] for m in mats] for j in range(r)] for i in range(r)]
        return cls(gram, companion)

    def component(self, k):
        """The rational skew matrix d_k h."""
        return [[self.gram[i][j][k] for j in range(self.r)] for i in range(self.r)]

    def change_basis(self, g):
        """Data in the basis x'_j = sum_i g[i][j] x_i, i.e. H -> g^T H g."""
        g = sp.Matrix(g)
        mats = [g.T * sp.Matrix(self.component(k)) * g for k in range(self.d)]
        comp = None
        if self.companion is not None:
            comp = (g.T * sp.Matrix(self.companion) * g).tolist()
        return SkewPairingData.from_matrices([_to_fractions(m.tolist()) for m in mats],
                                             _to_fractions(comp) if comp else None)

    def to_json(self):
        return {"r": self.r, "d": self.d,
                "gram": [[[str(c) for c in v] for v in row] for row in self.gram],
                "companion": None if self.companion is None
                else [[str(c) for c in row] for row in self.companion]}

    @classmethod
    def from_json(cls, rec):
        data = cls(rec["gram"], rec.get("companion"))
        if data.r != rec.get("r", data.r) or (data.r and data.d != rec.get("d", data.d)):
            raise ValueError("r or d disagrees with gram")
        return data


def _to_fractions(rows):
    return [[Fraction(int(sp.fraction(x)[0]), int(sp.fraction(x)[1])) for x in row] for row in rows]


def variables(d):
    """t1..td (at least one generator, so that polynomials always have a ring)."""
    return sp.symbols(f"t1:{max(d, 1) + 1}")


def linear_form_matrix(data, gens=None):
    """H = sum_k t_k H_k as a sympy matrix of linear forms."""
    t = gens or variables(data.d)
    return sp.Matrix(data.r, data.r,
                     lambda i, j: sum(sp.Rational(c.numerator, c.denominator) * tk
                                      for c, tk in zip(data.gram[i][j], t)))


# ---------------------------------------------------------------------------
# Pfaffians

def pfaffian(A):
    """Pfaffian by expansion along the first row (A skew, any commutative entries)."""
    n = A.shape[0]
    if n % 2:
        return sp.Integer(0)
    if n == 0:
        return sp.Integer(1)
    out = sp.Integer(0)
    rest = list(range(1, n))
    for pos, j in enumerate(rest):
        if A[0, j] == 0:
            continue
        keep = [k for k in rest if k != j]
        out += (-1) ** pos * A[0, j] * pfaffian(A.extract(keep, keep))
    return sp.expand(out)


class PfaffianDomainError(ValueError):
    pass


def pfaffian_plus(data):
    """Pf^+(M, h) in Sym^{r/2} T, as a polynomial in t_1..t_d."""
    if data.r % 2:
        raise PfaffianDomainError("Pf^+ needs r even")
    t = variables(data.d)
    return sp.Poly(pfaffian(linear_form_matrix(data, t)), *t, domain="QQ")


# ---------------------------------------------------------------------------
# canonical representatives modulo scalars

def _poly_terms(poly):
    return sorted(((m, Fraction(int(c.p), int(c.q))) for m, c in poly.terms() if c != 0),
                  reverse=True)


def canonical(coeffs):
    """Content-normalize a list of rational coefficients; first nonzero one positive."""
    coeffs = [Fraction(c) for c in coeffs]
    nz = [c for c in coeffs if c != 0]
    if not nz:
        return coeffs
    den = lcm(*(c.denominator for c in nz))
    ints = [int(c * den) for c in coeffs]
    g = 0
    for x in ints:
        g = gcd(g, x)
    sign = 1 if next(x for x in ints if x) > 0 else -1
    return [Fraction(sign * x, g) for x in ints]


def _flatten(obj, d):
    """A polynomial or a list of polynomials (a vector in M (x) Sym T) as (keys, coefficients)."""
    polys = obj if isinstance(obj, (list, tuple)) else [obj]
    out = {}
    for i, p in enumerate(polys):
        if p is None:
            continue
        for m, c in _poly_terms(p):
            out[(i, m)] = c
    return out


def scalar_ratio(a, b):
    """The rational c with a = c b, or None if a and b are not proportional."""
    fa, fb = _flatten(a, None), _flatten(b, None)
    if set(fa) != set(fb):
        return None
    if not fa:
        return Fraction(1)
    keys = sorted(fa)
    c = fa[keys[0]] / fb[keys[0]]
    return c if all(fa[k] == c * fb[k] for k in keys) else None


def same_class(a, b):
    """a and b agree modulo nonzero rational scalars."""
    c = scalar_ratio(a, b)
    return c is not None and c != 0


def is_rational_square(c):
    c = Fraction(c)
    if c <= 0:
        return False
    n, d = c.numerator, c.denominator
    return sp.sqrt(n).is_Integer and sp.sqrt(d).is_Integer


def same_class_mod_squares(a, b):
    c = scalar_ratio(a, b)
    return c is not None and is_rational_square(c)


def canonical_poly(poly):
    terms = _poly_terms(poly)
    coeffs = canonical([c for _, c in terms])
    return [(m, c) for (m, _), c in zip(terms, coeffs)]


# ---------------------------------------------------------------------------
# the odd case

def radical(matrix):
    return sp.Matrix(matrix).nullspace()


def sum_of_radicals(data, support):
    """Basis of M_I = sum over i in I of rad(d_i h)."""
    vecs = []
    for i in support:
        vecs.extend(radical([[sp.Rational(c.numerator, c.denominator) for c in row]
                             for row in data.component(i)]))
    if not vecs:
        return []
    M = sp.Matrix.hstack(*vecs)
    return M.columnspace()


def exponent_tuples(d, n):
    """All e in N^d with sum n."""
    if d == 0:
        return [()] if n == 0 else []
    return [e for e in product(range(n + 1), repeat=d) if sum(e) == n]


def derivative_value(poly, e, gens):
    """d^e P for P homogeneous of degree |e|: the coefficient of t^e times e!."""
    mono = tuple(e)
    coeff = dict(poly.terms()).get(mono, 0) if poly is not None else 0
    return Fraction(int(sp.Rational(coeff).p), int(sp.Rational(coeff).q)) * prod(factorial(k) for k in e)


@dataclass
class PfMinusResult:
    """Pf^-(M, h) as coordinates in M (x) Sym^{(r-1)/2} T.

    ``vector[i]`` is the polynomial coefficient of the basis vector x_i;
    ``components[e]`` is d^e Pf^- (a coordinate vector in Q^r) or None if flagged.
    """

    r: int
    d: int
    components: dict
    vector: list
    flags: list = field(default_factory=list)
    supports: dict = field(default_factory=dict)

    @property
    def flagged(self):
        return bool(self.flags)


def _component(data, e):
    """d^e Pf^- for one exponent tuple: (vector or None, dim M_I, flag or None)."""
    r = data.r
    support = [i for i, k in enumerate(e) if k]
    basis = sum_of_radicals(data, support)
    dim = len(basis)
    if dim == 0:
        return None, dim, (f"e={e}: M_I = 0 for the empty support; the zero pairing's radical "
                           "would give x (x) 1, left undefined")
    if dim >= 2:
        return [Fraction(0)] * r, dim, None
    x = basis[0]
    # complete x to a basis (x, y_1, ..., y_{r-1}) with det = 1
    cols = [x]
    for i in range(r):
        cand = sp.Matrix.hstack(*cols, sp.eye(r)[:, i])
        if cand.rank() == len(cols) + 1:
            cols.append(sp.eye(r)[:, i])
        if len(cols) == r:
            break
    B = sp.Matrix.hstack(*cols)
    det = B.det()
    x = x / det
    ys = cols[1:]
    # the induced pairings d_i h on M / M_I in the basis of the y's
    t = variables(data.d)
    H = sp.zeros(r - 1, r - 1)
    for i in support:
        Hi = sp.Matrix([[sp.Rational(c.numerator, c.denominator) for c in row]
                        for row in data.component(i)])
        H += t[i] * sp.Matrix(r - 1, r - 1, lambda a, b: (ys[a].T * Hi * ys[b])[0, 0])
    pf = sp.Poly(pfaffian(H), *t, domain="QQ")
    val = derivative_value(pf, e, t)
    return [Fraction(int(sp.Rational(c).p), int(sp.Rational(c).q)) * val for c in x], dim, None


def pfaffian_minus(data):
    """Pf^-(M, h) in M (x) Sym^{(r-1)/2} T, assembled from its derivatives d^e Pf^-.

    For each e with sum (r-1)/2 and support I: 0 if dim M_I >= 2, and
    x (x) d^e Pf^+(M / M_I) if M_I = L x.  The generator x and the basis of
    M / M_I are normalized by det(x, lifts) = 1 so that components agree up to
    one overall scalar.
    """
    r, d = data.r, data.d
    if r % 2 == 0:
        raise PfaffianDomainError("Pf^- needs r odd")
    n = (r - 1) // 2
    t = variables(d)
    comps, flags, supports = {}, [], {}
    vector = [sp.Integer(0)] * r
    for e in exponent_tuples(d, n):
        vec, dim, flag = _component(data, e)
        supports[e] = dim
        comps[e] = vec
        if flag:
            flags.append(flag)
            continue
        mono = prod(tk ** k for tk, k in zip(t, e))
        scale = sp.Rational(1, prod(factorial(k) for k in e))
        for i, c in enumerate(vec):
            vector[i] += sp.Rational(c.numerator, c.denominator) * scale * mono
    polys = [sp.Poly(v, *t, domain="QQ") for v in vector]
    return PfMinusResult(r, d, comps, polys, flags, supports)


def pfaffian_vector(data):
    """The adjugate vector v_i = (-1)^i Pf(H with row and column i removed); H v = 0."""
    r = data.r
    t = variables(data.d)
    H = linear_form_matrix(data, t)
    out = []
    for i in range(r):
        keep = [k for k in range(r) if k != i]
        out.append(sp.Poly((-1) ** i * pfaffian(H.extract(keep, keep)), *t, domain="QQ"))
    return out


# ---------------------------------------------------------------------------
# relations with discriminants

def discriminant(data):
    """R(M, h) = det H in Sym^r T."""
    t = variables(data.d)
    return sp.Poly(linear_form_matrix(data, t).det(method="berkowitz"), *t, domain="QQ")


def rel_reg_even(data):
    """(Pf^+^2, R(M, h)) as polynomials."""
    pf = pfaffian_plus(data)
    return pf ** 2, discriminant(data)


def rel_reg_odd(data, pf_minus=None):
    """(h^#(Pf^-, Pf^-), the s-linear part of det(H + s S)) as polynomials in t."""
    if data.companion is None:
        raise ValueError("the odd identity needs the symmetric companion h^#")
    t = variables(data.d)
    s = sp.Symbol("s")
    pf_minus = pf_minus or pfaffian_minus(data)
    S = sp.Matrix([[sp.Rational(c.numerator, c.denominator) for c in row] for row in data.companion])
    v = sp.Matrix([p.as_expr() for p in pf_minus.vector])
    lhs = sp.Poly(sp.expand((v.T * S * v)[0, 0]), *t, domain="QQ")
    H = linear_form_matrix(data, t) + s * S
    det = sp.Poly(sp.expand(H.det(method="berkowitz")), s, *t, domain="QQ")
    linear = sp.Poly(sum(c * prod(g ** k for g, k in zip(t, m[1:]))
                         for m, c in det.terms() if m[0] == 1) or 0, *t, domain="QQ")
    return lhs, linear


def verify_rel_reg(data):
    """The square of the regulator equals the discriminant (its s-linear part when r is odd)
    up to a nonzero rational square."""
    if data.r % 2 == 0:
        a, b = rel_reg_even(data)
    else:
        res = pfaffian_minus(data)
        if res.flagged:
            return False
        a, b = rel_reg_odd(data, res)
    if a.is_zero and b.is_zero:
        return True
    return same_class_mod_squares(a, b)
