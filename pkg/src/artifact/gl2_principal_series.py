"""Finite-level models of principal series of GL_2(Q_p).

A vector of the un-normalized induction Ind(chi1, chi2), i.e. functions with
f(b g) = chi1(a) chi2(d) f(g) for b = [[a, *], [0, d]], that is fixed by the
principal congruence subgroup K(p^r) is stored as its values on the
representatives of P^1(Z/p^r) (see ``CosetSpaceP1``).  The group acts by right
translation, (pi(g) f)(x) = f(x g).

The invariant pairing with Ind(chi1^-1 |.|, chi2^-1 |.|^-1) is the average of
f1 * f2 over GL_2(Z_p); equivalently (1 + 1/p)^-1 times the integral of
f1 f2 over the lower unipotent group.  ``matrix_coefficient`` uses the second
form together with the Cartan decomposition, so that group elements far from
GL_2(Z_p) never force a high level.
"""

from dataclasses import dataclass
from fractions import Fraction
import numpy as np

from .characters_gamma import primitive_root
from .local_fields import (CosetSpaceP1, cartan_decompose, iwasawa_decompose, mat, mat_det,
                           mat_inv, mat_mul, valuation)

EIGEN_TOL = 1e-9


class InducedSpace:
    """K(p^r)-fixed vectors in the un-normalized Ind(chi1, chi2)."""

    def __init__(self, chi1, chi2, r):
        if chi1.p != chi2.p:
            raise ValueError("characters over different primes")
        if max(chi1.conductor, chi2.conductor) > r:
            raise ValueError("level r is below the conductors of the inducing characters")
        self.chi1, self.chi2, self.r = chi1, chi2, r
        self.p = chi1.p
        self.cosets = CosetSpaceP1(self.p, r)

    @classmethod
    def from_datum(cls, datum, r):
        chi1, chi2 = datum.inducing_characters()
        return cls(chi1, chi2, r)

    @property
    def dim(self):
        return self.cosets.size

    def __repr__(self):
        return f"InducedSpace(p={self.p}, r={self.r}, dim={self.dim})"

    def same_characters(self, other):
        return self.chi1.same_as(other.chi1) and self.chi2.same_as(other.chi2)

    def at_level(self, r):
        return InducedSpace(self.chi1, self.chi2, r)

    def dual(self):
        """The space pairing with this one: Ind(chi1^-1 |.|, chi2^-1 |.|^-1)."""
        return InducedSpace(self.chi1.inverse().twist(1), self.chi2.inverse().twist(-1), self.r)

    @property
    def central_character(self):
        return self.chi1 * self.chi2

    def vector(self, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} values")
        return InducedVector(self, values)

    def zero(self):
        return self.vector(np.zeros(self.dim))

    def basis_vector(self, i):
        v = np.zeros(self.dim, dtype=complex)
        v[i] = 1
        return self.vector(v)

    def spherical(self):
        """The GL_2(Z_p)-fixed vector (only for unramified inducing data)."""
        if self.chi1.conductor or self.chi2.conductor:
            raise ValueError("ramified data have no spherical vector")
        return self.vector(np.ones(self.dim))

    # -- evaluation -----------------------------------------------------------

    def cocycle(self, g):
        """(index, factor) with f(g) = factor * f[index] for every f in the space."""
        upper, k = iwasawa_decompose(g, self.p)
        factor = self.chi1(upper[0][0]) * self.chi2(upper[1][1])
        return self.cosets.index_of_k(k), factor

    def evaluate(self, f, g):
        idx, factor = self.cocycle(g)
        return factor * f.values[idx]

    def operator_matrix(self, g, level=None):
        """Matrix of f -> pi(g) f from this level to ``level`` (default: self.r)."""
        target = self if level is None else self.at_level(level)
        out = np.zeros((target.dim, self.dim), dtype=complex)
        for i in range(target.dim):
            idx, factor = self.cocycle(mat_mul(target.cosets.representative_matrix(i), g))
            out[i, idx] += factor
        return out

    def required_level(self, g):
        """Smallest level at which pi(g) of a level-r vector is again fixed."""
        _, a, b, _ = cartan_decompose(g, self.p)
        return self.r + (a - b)


@dataclass
class InducedVector:
    space: InducedSpace
    values: np.ndarray

    def __add__(self, other):
        other = _match(self, other)
        return InducedVector(other[0].space, other[0].values + other[1].values)

    def __sub__(self, other):
        other = _match(self, other)
        return InducedVector(other[0].space, other[0].values - other[1].values)

    def __mul__(self, c):
        return InducedVector(self.space, self.values * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return InducedVector(self.space, self.values / c)

    @property
    def level(self):
        return self.space.r

    def norm(self):
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0

    def to_json(self):
        return [[z.real, z.imag] for z in self.values]


def raise_level(f, level):
    """The same function viewed as a K(p^level)-fixed vector."""
    if level < f.level:
        raise ValueError("cannot lower the level")
    if level == f.level:
        return f
    target = f.space.at_level(level)
    vals = np.array([f.space.evaluate(f, target.cosets.representative_matrix(i))
                     for i in range(target.dim)])
    return InducedVector(target, vals)


def _match(f1, f2):
    r = max(f1.level, f2.level)
    return raise_level(f1, r), raise_level(f2, r)


def act(g, f, level=None, check=False):
    """pi(g) f, returned at ``level`` (default: the smallest level where it is fixed)."""
    g = mat(g)
    space = f.space
    if level is None:
        level = max(space.r, space.required_level(g))
    elif check and level < space.required_level(g):
        raise ValueError(f"pi(g) f is not fixed by K(p^{level}); raise the level")
    m = space.operator_matrix(g, level)
    return InducedVector(space.at_level(level), m @ f.values)


def pairing(f1, f2):
    """The GL_2(Z_p)-average of f1 * f2, with f2 in the dual space."""
    a, b = _match(f1, f2)
    return complex(np.dot(a.values, b.values)) / a.space.dim


# ---------------------------------------------------------------------------
# Hecke operators

def hecke_matrix(space, n=1):
    """U_{diag(p^n, 1)} = sum over j mod p^n of pi([[p^n, j], [0, 1]]) on the level-r space."""
    p = space.p
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for j in range(p ** n):
        out += space.operator_matrix(mat([[p ** n, j], [0, 1]]))
    return out


def hecke_U(f, t=(1, 0)):
    """U_t for t = diag(p^a, p^b), a >= b; the central part acts by chi1 chi2."""
    a, b = t
    if a < b:
        raise ValueError("t must be in the positive cone")
    space = f.space
    vals = f.values.copy()
    if a > b:
        vals = hecke_matrix(space, a - b) @ vals
    z = space.central_character(Fraction(space.p) ** b)
    return InducedVector(space, vals * z)


def _nullspace(m, tol=1e-9):
    _, s, vh = np.linalg.svd(m)
    rank = int(np.sum(s > tol * max(1.0, s[0] if len(s) else 1.0)))
    return vh[rank:].conj().T


def iwahori_fixed_basis(space, diagonal_units=False):
    """Basis (columns) of the vectors fixed by U_1^1(p^r), i.e. by n(1) at level r.

    With ``diagonal_units`` also impose invariance under diag(a, 1) for units a,
    which cuts out the vectors fixed by {c = 0, d = 1 mod p^r}.
    """
    eye = np.eye(space.dim)
    blocks = [space.operator_matrix(mat([[1, 1], [0, 1]])) - eye]
    if diagonal_units and space.r >= 1:
        g = primitive_root(space.p)
        blocks.append(space.operator_matrix(mat([[g, 0], [0, 1]])) - eye)
    return _nullspace(np.vstack(blocks))


def restricted_hecke(space, basis=None):
    """The matrix of U_p on the U_1^1(p^r)-fixed subspace, in the given basis."""
    if basis is None:
        basis = iwahori_fixed_basis(space)
    image = hecke_matrix(space) @ basis
    coeffs, *_ = np.linalg.lstsq(basis, image, rcond=None)
    return coeffs, basis


def normalize(values):
    """Unit sup-norm, first entry of maximal modulus made real positive."""
    values = np.asarray(values, dtype=complex)
    big = np.max(np.abs(values))
    if big == 0:
        raise ValueError("zero vector")
    lead = values[np.argmax(np.abs(values) > big * (1 - 1e-9))]
    return values / lead * (abs(lead) / big)


class DegenerateEigenline(ValueError):
    pass


def find_ordinary_line(space, eigenvalue, tol=1e-6):
    """The U_1^1(p^r)-fixed U_p-eigenvector with the given eigenvalue (alpha(p) for pi)."""
    coeffs, basis = restricted_hecke(space)
    vals, vecs = np.linalg.eig(coeffs)
    dist = np.abs(vals - eigenvalue)
    i = int(np.argmin(dist))
    if dist[i] > tol * max(1.0, abs(eigenvalue)):
        raise DegenerateEigenline(f"{eigenvalue} is not a U_p eigenvalue; spectrum {vals}")
    close = np.sum(dist < tol * max(1.0, abs(eigenvalue)))
    if close > 1:
        raise DegenerateEigenline(f"eigenvalue {eigenvalue} has multiplicity {close}")
    f = InducedVector(space, normalize(basis @ vecs[:, i]))
    resid = np.max(np.abs(hecke_matrix(space) @ f.values - eigenvalue * f.values))
    if resid > EIGEN_TOL * 100:
        raise DegenerateEigenline(f"eigen-residual {resid:.3g}")
    return f


def ordinary_pair(datum, r):
    """Ordinary vectors f in pi and f_dual in the dual model, at level r."""
    space = InducedSpace.from_datum(datum, r)
    alpha_p = datum.alpha.value_at_p
    alpha_dual = alpha_p / datum.omega.value_at_p
    f = find_ordinary_line(space, alpha_p)
    fd = find_ordinary_line(space.dual(), alpha_dual)
    return f, fd


# ---------------------------------------------------------------------------
# the twisting operators

def w_matrix(p, r):
    return mat([[0, 1], [-p ** r, 0]])


def gamma_matrix(algebra, r):
    p = algebra.p
    if algebra.is_split:
        return mat([[p ** r, 1], [0, 1]])
    return mat([[p ** r * algebra.N, 0], [0, 1]])


def w_a_ord(f, r, eigenvalue):
    """p^r * eigenvalue^-r * pi(w_r) f."""
    p = f.space.p
    return act(w_matrix(p, r), f) * (p ** r * eigenvalue ** (-r))


def gamma_H_ord_vector(f, r, algebra, eigenvalue):
    """p^r * eigenvalue^-r * pi(gamma_r) f, a representative of the toric twist of f."""
    p = f.space.p
    return act(gamma_matrix(algebra, r), f) * (p ** r * eigenvalue ** (-r))


# ---------------------------------------------------------------------------
# matrix coefficients through the Cartan decomposition

def _phi_lower(space, values, x):
    """f(n^-(x)) for n^-(x) = [[1, 0], [x, 1]], using integer arithmetic."""
    p, r = space.p, space.r
    x = Fraction(x)
    if x == 0 or valuation(x, p) >= r:
        return values[0]
    v = valuation(x, p)
    if v >= 0:
        mod = p ** r
        return values[(x.numerator * pow(x.denominator, -1, mod)) % mod]
    # n^-(x) = [[1/x, 1], [0, x]] [[0, -1], [1, 1/x]]
    inv = 1 / x
    k = -v
    if r == 0:
        idx = 0  # a single coset at level 0
    elif k >= r:
        idx = space.cosets.modulus
    else:
        mod = p ** r
        y = (inv.numerator * pow(inv.denominator, -1, mod)) % mod
        idx = space.cosets.modulus + y // p
    return space.chi1(inv) * space.chi2(x) * values[idx]


def _annulus_units(p, K):
    return [u for u in range(1, p ** K) if u % p]


def _coefficient_diag(space, dual, v1, v2, m):
    """(pi(diag(p^m, 1)) F1, F2) for F1, F2 given as value arrays at the same level."""
    p, r = space.p, space.r
    n12 = (space.chi1 / space.chi2).conductor
    total = 0j
    mod = p ** r
    for c in range(mod):
        total += _phi_lower(space, v1, Fraction(p ** m * c)) * _phi_lower(dual, v2, Fraction(c))
    total /= mod
    last = 0j
    for k in range(1, max(m + r, 1) + 1):
        K = max(1, r - min(k, abs(m - k)), n12)
        units = _annulus_units(p, K)
        s = 0j
        for u in units:
            c = Fraction(u, p ** k)
            s += _phi_lower(space, v1, c * p ** m) * _phi_lower(dual, v2, c)
        last = s * Fraction(p ** k, p ** K)
        total += last
    # annuli beyond m + r shrink by 1/p each
    total += last / (p - 1)
    return space.chi1(Fraction(p) ** m) * total / (1 + 1 / p)


def matrix_coefficient(f, fd, g):
    """(pi(g) f, fd) for f, fd at the same level, without raising the level."""
    f, fd = _match(f, fd)
    space, dual = f.space, fd.space
    k1, a, b, k2 = cartan_decompose(mat(g), space.p)
    v1 = space.operator_matrix(k2) @ f.values
    v2 = dual.operator_matrix(mat_inv(k1)) @ fd.values
    central = space.central_character(Fraction(space.p) ** b)
    return central * _coefficient_diag(space, dual, v1, v2, a - b)


# ---------------------------------------------------------------------------
# Whittaker functions

def _phi_weyl(f, b):
    """f(w n(b))."""
    return f.space.evaluate(f, mat([[0, -1], [1, b]]))


def whittaker_coefficient(f, y, psi, truncation=None, tol=1e-10):
    """W_f(diag(y, 1)) = integral of f(w n(b) diag(y, 1)) psi(-b) db over b in p^-M Z_p.

    With b = y b', this is chi2(y) |y| times the Fourier transform of
    phi(b') = f(w n(b')) at y.  phi is locally constant on each annulus, so
    every annulus is a finite sum; annuli deeper than v(y) + K contribute 0.
    """
    space = f.space
    p, r = space.p, space.r
    y = Fraction(y)
    m = valuation(y, p)
    n12 = (space.chi1 / space.chi2).conductor
    needed = max(0, m + max(r, n12) + 1)
    M = needed if truncation is None else truncation

    def partial(M):
        total = 0j
        # b in Z_p: phi depends on b mod p^r, psi(-y b) on b mod p^-m
        top = max(r, -m)
        for b in range(p ** top):
            total += _phi_weyl(f, b) * psi(-y * b)
        total /= p ** top
        for k in range(1, M + 1):
            K = max(1, r - k, n12, k - m)
            s = 0j
            for u in _annulus_units(p, K):
                b = Fraction(u, p ** k)
                s += _phi_weyl(f, b) * psi(-y * b)
            total += s * Fraction(p ** k, p ** K)
        return total

    value = partial(M)
    if truncation is not None:
        more = partial(M + 1)
        if abs(more - value) > tol * max(1.0, abs(value)):
            raise ValueError(f"unipotent sum has not stabilized at M={M}")
    return space.chi2(y) * float(p) ** (-m) * value


def kirillov_pairing(f1, f2, psi, m_max=None, tol=1e-13):
    """Sum over y in Z_p - {0} of W1(y) W2(y) d^x y, W1 w.r.t. psi and W2 w.r.t. psi-bar.

    Kirillov vectors of ordinary lines vanish off Z_p, so this is the full
    Kirillov pairing whenever f2 is ordinary.  The annulus sums decay
    geometrically; we stop once a few consecutive terms fall below tol.
    """
    p = f1.space.p
    cond = max(f1.space.chi1.conductor, f1.space.chi2.conductor,
               f2.space.chi1.conductor, f2.space.chi2.conductor, 1)
    psi_bar = psi.conjugate()
    total = 0j
    small = 0
    m = 0
    while True:
        s = 0j
        units = _annulus_units(p, cond)
        for u in units:
            y = Fraction(p) ** m * u
            s += whittaker_coefficient(f1, y, psi) * whittaker_coefficient(f2, y, psi_bar)
        s *= (1 - 1 / p) / len(units)
        total += s
        small = small + 1 if abs(s) < tol * max(1.0, abs(total)) else 0
        m += 1
        if small >= 3 or (m_max is not None and m > m_max):
            return total


# ---------------------------------------------------------------------------
# the matrix identity t gamma_{r+1} = gamma_r b_j k

def matrix_identity_terms(algebra, r, j):
    """(t, gamma_{r+1}, gamma_r, b_j, k) as exact 2x2 matrices."""
    from .local_fields import embed_torus
    p = algebra.p
    if algebra.is_split:
        t = embed_torus(algebra.element(1 + j * p ** r, 1))
        k = mat([[1 + j * p ** r, 0], [0, 1]])
    else:
        T, N = algebra.T, algebra.N
        t = embed_torus(algebra.element(1, j * p ** r))
        k = mat([[1 + j * T * p ** r + j * j * N * p ** (2 * r), 0],
                 [-j * N * p ** (2 * r + 1), 1]])
    b = mat([[p, j], [0, 1]])
    return t, gamma_matrix(algebra, r + 1), gamma_matrix(algebra, r), b, k


def verify_matrix_identity(algebra, r, j):
    """Exact check of t_j gamma_{r+1} = gamma_r b_j k_j with k_j in U_1^1(p^r)."""
    p = algebra.p
    t, g_next, g_r, b, k = matrix_identity_terms(algebra, r, j)
    lhs = mat_mul(t, g_next)
    rhs = mat_mul(mat_mul(g_r, b), k)
    if lhs != rhs:
        return False
    # k is integral with unit determinant, lower-left in p^r, lower-right 1 mod p^r
    if not all(x.denominator % p != 0 for row in k for x in row):
        return False
    if valuation(mat_det(k), p) != 0:
        return False
    if valuation(k[1][0], p) < r or valuation(k[1][1] - 1, p) < r:
        return False
    if not algebra.is_split and valuation(k[1][0], p) < 2 * r:
        return False
    return True
