"""Hida's ordinary projector mod p^m, group-algebra dualities and weight truncations."""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial, prod

import numpy as np


# ---------------------------------------------------------------------------
# matrices over Z / p^m

class TruncatedPAdicMatrix:
    """A square matrix with entries in Z/p^m (stored as Python ints in [0, p^m))."""

    def __init__(self, entries, p, m):
        a = np.array(entries, dtype=object)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("need a square matrix")
        self.p, self.m = p, m
        self.modulus = p ** m
        self.entries = np.vectorize(lambda x: int(x) % self.modulus, otypes=[object])(a)

    @classmethod
    def identity(cls, d, p, m):
        return cls(np.eye(d, dtype=int).tolist(), p, m)

    @property
    def dim(self):
        return self.entries.shape[0]

    def _new(self, a):
        return TruncatedPAdicMatrix(a, self.p, self.m)

    def _check(self, other):
        if (self.p, self.m, self.dim) != (other.p, other.m, other.dim):
            raise ValueError("incompatible truncated matrices")

    def __matmul__(self, other):
        self._check(other)
        return self._new(self.entries.dot(other.entries))

    def __add__(self, other):
        self._check(other)
        return self._new(self.entries + other.entries)

    def __sub__(self, other):
        self._check(other)
        return self._new(self.entries - other.entries)

    def __pow__(self, n):
        out = TruncatedPAdicMatrix.identity(self.dim, self.p, self.m)
        base = self
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out

    def __eq__(self, other):
        return (isinstance(other, TruncatedPAdicMatrix) and (self.p, self.m) == (other.p, other.m)
                and np.array_equal(self.entries, other.entries))

    def __repr__(self):
        return f"TruncatedPAdicMatrix(p={self.p}, m={self.m}, {self.entries.tolist()})"

    def reduce(self, m):
        """The image mod p^m for m <= self.m."""
        return TruncatedPAdicMatrix(self.entries, self.p, m)

    def rank_mod_p(self):
        return rank_mod(self.entries, self.p)

    def is_zero_mod_p(self):
        return all(x % self.p == 0 for x in self.entries.flat)

    def tolist(self):
        return self.entries.tolist()


def rank_mod(a, p):
    """Rank of an integer matrix over F_p."""
    rows = [[int(x) % p for x in row] for row in a]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def gl_order(d, p, m):
    """|GL_d(Z / p^m)|."""
    out = p ** ((m - 1) * d * d)
    for i in range(d):
        out *= p ** d - p ** i
    return out


def certified_exponent_bound(d, p, m):
    """The least n such that U^{n!} is idempotent for every d x d matrix U mod p^m."""
    group = gl_order(d, p, m)
    n = 1
    while factorial(n) % group or n < m * d:
        n += 1
    return n


def ordinary_projector(U, return_steps=False):
    """e^ord = lim U^{n!} mod p^m.

    Iterates A <- A^n (so A = U^{n!}) until A is idempotent; an idempotent power of
    U is automatically the ordinary projector.  The loop cannot run past the
    certified bound, where U^{n!} is idempotent by group order considerations.
    """
    cap = certified_exponent_bound(U.dim, U.p, U.m)
    A = U
    n = 1
    while True:
        if A @ A == A:
            break
        n += 1
        if n > cap:
            raise ArithmeticError("ordinary projector failed to stabilize at the certified bound")
        A = A ** n
    return (A, n) if return_steps else A


def check_ordinary_projector(U, e):
    """The defining properties of e^ord, as a dict of booleans."""
    d = U.dim
    one = TruncatedPAdicMatrix.identity(d, U.p, U.m)
    nil = U @ (one - e)
    return {
        "idempotent": e @ e == e,
        "commutes": e @ U == U @ e,
        # U is invertible on im(e): U e + (1 - e) is invertible mod p
        "unit_on_image": (U @ e + (one - e)).rank_mod_p() == d,
        # U is topologically nilpotent on ker(e)
        "nilpotent_on_kernel": (nil ** d).is_zero_mod_p(),
    }


def _rref_mod(rows, p):
    rows = [[int(x) % p for x in row] for row in rows]
    pivots, rank = [], 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        pivots.append(c)
        rank += 1
    return rows[:rank], pivots


def nullspace_mod(a, p):
    """A basis of {x : a x = 0} over F_p."""
    a = [list(row) for row in a]
    n = len(a[0])
    rows, pivots = _rref_mod(a, p)
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        v = [0] * n
        v[free] = 1
        for row, c in zip(rows, pivots):
            v[c] = -row[free] % p
        basis.append(v)
    return basis


def column_space_mod(a, p):
    rows, _ = _rref_mod(list(map(list, zip(*a))), p)
    return rows


def inverse_mod(a, p):
    n = len(a)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    rows, pivots = _rref_mod(aug, p)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular mod p")
    return [row[n:] for row in rows]


def fitting_projector_mod_p(U):
    """e^ord mod p from the Fitting splitting F_p^d = im(Ubar^d) + ker(Ubar^d).

    im(Ubar^d) is the sum of the generalized eigenspaces with nonzero
    eigenvalue and ker(Ubar^d) the generalized 0-eigenspace; the projection
    onto the first along the second is the reduction of e^ord.
    """
    p, d = U.p, U.dim
    Ud = [[int(x) % p for x in row] for row in (U.reduce(1) ** d).tolist()]
    image = column_space_mod(Ud, p)
    kernel = nullspace_mod(Ud, p)
    basis = image + kernel
    P = [list(col) for col in zip(*basis)]
    keep = [[int(i == j and i < len(image)) for j in range(d)] for i in range(d)]
    e = np.array(P, dtype=object).dot(np.array(keep, dtype=object)).dot(
        np.array(inverse_mod(P, p), dtype=object))
    return TruncatedPAdicMatrix(e, p, 1)


def projector_by_group_order(U):
    """U^{|GL_d(Z/p^m)|}: the unit part of U has order dividing this, and the
    topologically nilpotent part dies because the exponent is at least m d."""
    return U ** gl_order(U.dim, U.p, U.m)


# ---------------------------------------------------------------------------
# finite abelian groups and group algebras

class FiniteAbelianGroup:
    """Z/n_1 x ... x Z/n_k, elements are tuples."""

    def __init__(self, factors):
        self.factors = tuple(int(n) for n in factors)
        if any(n < 1 for n in self.factors):
            raise ValueError("invariant factors must be positive")
        self.elements = [tuple(t) for t in product(*(range(n) for n in self.factors))]
        self.index = {t: i for i, t in enumerate(self.elements)}

    @property
    def order(self):
        return prod(self.factors)

    def identity(self):
        return tuple(0 for _ in self.factors)

    def mul(self, s, t):
        return tuple((a + b) % n for a, b, n in zip(s, t, self.factors))

    def inv(self, t):
        return tuple((-a) % n for a, n in zip(t, self.factors))

    def power(self, t, k):
        return tuple((a * k) % n for a, n in zip(t, self.factors))

    def generators(self):
        gens = []
        for i in range(len(self.factors)):
            g = [0] * len(self.factors)
            g[i] = 1 % self.factors[i]
            gens.append(tuple(g))
        return gens

    def subgroup(self, gens):
        """The subgroup generated by ``gens``, as a sorted list."""
        seen = {self.identity()}
        frontier = [self.identity()]
        while frontier:
            t = frontier.pop()
            for g in gens:
                s = self.mul(t, g)
                if s not in seen:
                    seen.add(s)
                    frontier.append(s)
        return sorted(seen)


class GroupAlgebraElement:
    """sum_t c_t [t] in K[T], coefficients indexed like group.elements."""

    def __init__(self, group, coeffs):
        self.group = group
        self.coeffs = list(coeffs)

    @classmethod
    def basis(cls, group, t, one=Fraction(1)):
        c = [0 * one] * group.order
        c[group.index[t]] = one
        return cls(group, c)

    @classmethod
    def zero(cls, group):
        return cls(group, [Fraction(0)] * group.order)

    def __getitem__(self, t):
        return self.coeffs[self.group.index[t]]

    def __add__(self, other):
        return GroupAlgebraElement(self.group, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return GroupAlgebraElement(self.group, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, c):
        return GroupAlgebraElement(self.group, [c * a for a in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return self.scale(other)
        G = self.group
        out = [0 * self.coeffs[0]] * G.order
        for s, a in zip(G.elements, self.coeffs):
            if a == 0:
                continue
            for t, b in zip(G.elements, other.coeffs):
                if b != 0:
                    out[G.index[G.mul(s, t)]] += a * b
        return GroupAlgebraElement(G, out)

    __rmul__ = scale

    def involution(self, iota=None):
        """[t] -> [iota(t)]; iota defaults to inversion."""
        G = self.group
        iota = iota or G.inv
        out = [0 * self.coeffs[0]] * G.order
        for t, a in zip(G.elements, self.coeffs):
            out[G.index[iota(t)]] += a
        return GroupAlgebraElement(G, out)

    def evaluate(self, character):
        """The image under [t] -> character(t)."""
        return sum(a * character(t) for t, a in zip(self.group.elements, self.coeffs))

    def trace(self):
        """Trace of multiplication by self on K[T]: |T| times the coefficient of [1]."""
        return self.group.order * self[self.group.identity()]

    def is_close(self, other, tol=0):
        return all(abs(a - b) <= tol for a, b in zip(self.coeffs, other.coeffs))

    def __eq__(self, other):
        return isinstance(other, GroupAlgebraElement) and self.coeffs == other.coeffs

    def __repr__(self):
        terms = [f"{a}[{t}]" for t, a in zip(self.group.elements, self.coeffs) if a != 0]
        return " + ".join(terms) or "0"


def _mat_mul(A, B):
    return np.array(A, dtype=object).dot(np.array(B, dtype=object)).tolist()


def _mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _exact(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def _as_fractions(A):
    """Exact entries: ints where integral (much faster), Fractions otherwise."""
    return [[_exact(x) for x in row] for row in A]


class GroupAlgebraModule:
    """A Q-vector space with commuting actions of the generators of T."""

    def __init__(self, group, generator_matrices, dim=None):
        self.group = group
        self.gens = [_as_fractions(g) for g in generator_matrices]
        if len(self.gens) != len(group.factors):
            raise ValueError("one action matrix per invariant factor")
        self.dim = len(self.gens[0]) if self.gens else (dim or 0)
        for A in self.gens:
            for B in self.gens:
                if _mat_mul(A, B) != _mat_mul(B, A):
                    raise ValueError("action matrices do not commute")
        for A, n in zip(self.gens, group.factors):
            P = _identity(self.dim)
            for _ in range(n):
                P = _mat_mul(P, A)
            if P != _identity(self.dim):
                raise ValueError(f"a generator does not have order dividing {n}")
        self._cache = {}

    @classmethod
    def trivial_action(cls, group, dim):
        return cls(group, [_identity(dim) for _ in group.factors], dim)

    @classmethod
    def regular(cls, group):
        """K[T] acting on itself by translation."""
        mats = []
        for g in group.generators():
            A = [[Fraction(0)] * group.order for _ in range(group.order)]
            for t in group.elements:
                A[group.index[group.mul(g, t)]][group.index[t]] = Fraction(1)
            mats.append(A)
        return cls(group, mats)

    def action(self, t):
        if t not in self._cache:
            i = next((i for i, k in enumerate(t) if k), None)
            if i is None:
                A = _identity(self.dim)
            else:
                # peel off one generator and reuse the cached action of the rest
                rest = t[:i] + (t[i] - 1,) + t[i + 1:]
                A = _mat_mul(self.action(rest), self.gens[i])
            self._cache[t] = A
        return self._cache[t]

    def act(self, t, m):
        return _mat_vec(self.action(t), m)


def beta_map(module, lam):
    """beta(lambda): m -> sum_t lambda(t m) [t^-1]."""
    G = module.group

    def functional(m):
        out = [Fraction(0)] * G.order
        for t in G.elements:
            out[G.index[G.inv(t)]] += sum(a * x for a, x in zip(lam, module.act(t, m)))
        return GroupAlgebraElement(G, out)
    return functional


def _solve(A, b):
    """Exact solution of A x = b for invertible A over Q."""
    n = len(A)
    aug = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = Fraction(1) / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n] for row in aug]


def trace_form(group):
    """B[t][u] = Tr([t][u]) on the basis of K[T]."""
    basis = [GroupAlgebraElement.basis(group, t) for t in group.elements]
    return [[Fraction((bt * bu).trace()) for bu in basis] for bt in basis]


def alpha_map(module, lam):
    """alpha(lambda): m -> the s in K[T] with Tr(s s') = lambda(s' m) for all s'.

    This is the etale-case isomorphism: lambda is first turned into an
    S-linear map to Hom(S, K), then S is identified with Hom(S, K) through the
    trace form (solved as a linear system).
    """
    G = module.group
    B = trace_form(G)

    def functional(m):
        rhs = [Fraction(sum(a * x for a, x in zip(lam, module.act(t, m)))) for t in G.elements]
        return GroupAlgebraElement(G, _solve(B, rhs))
    return functional


def is_S_linear(module, functional, samples):
    """f(t m) = [t] f(m) for generators t and the given vectors m."""
    G = module.group
    for m in samples:
        fm = functional(m)
        for g in G.generators():
            if functional(module.act(g, m)) != GroupAlgebraElement.basis(G, g) * fm:
                return False
    return True


# ---------------------------------------------------------------------------
# promoted pairings

def _det(A):
    A = [row[:] for row in A]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            f = Fraction(A[i][c]) / A[c][c]
            A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return det


@dataclass
class PromotedPairing:
    """<<x, y>> = scale * sum_t <x, t y> [t^-1] for <x, y> = x^T G y."""

    m1: GroupAlgebraModule
    m2: GroupAlgebraModule
    gram: list
    scale: Fraction = Fraction(1)
    iota: object = None

    def __call__(self, x, y):
        G = self.m1.group
        out = [Fraction(0)] * G.order
        for t in G.elements:
            ty = self.m2.act(t, y)
            out[G.index[G.inv(t)]] += self.scale * sum(
                x[i] * self.gram[i][j] * ty[j] for i in range(len(x)) for j in range(len(ty)))
        return GroupAlgebraElement(G, out)

    def specialize(self, x, y, character):
        """Image under [t] -> character(t)."""
        return self(x, y).evaluate(character)


def promote_pairing(m1, m2, gram, scale=1, iota=None):
    """Promote a perfect T-equivariant pairing to a K[T]-valued one.

    ``gram`` gives <x, y> = x^T gram y and must satisfy <t x, y> = <x, iota(t) y>
    (iota defaults to inversion).  ``scale`` is a normalizing constant such as
    p^{r[F:Q]}, left to the caller.
    """
    G = m1.group
    if m2.group.factors != G.factors:
        raise ValueError("modules over different groups")
    gram = _as_fractions(gram)
    if len(gram) != m1.dim or len(gram[0]) != m2.dim or _det(gram) == 0:
        raise ValueError("the input pairing is not perfect")
    iota = iota or G.inv
    for g in G.generators():
        left = _mat_mul(list(map(list, zip(*m1.action(g)))), gram)
        right = _mat_mul(gram, m2.action(iota(g)))
        if left != right:
            raise ValueError("<t x, y> != <x, iota(t) y>")
    return PromotedPairing(m1, m2, gram, Fraction(scale), iota)


def adjoint_operator(pairing, A):
    """A^iota on M_2 with <A x, y> = <x, A^iota y>: gram^-1 A^T gram."""
    G = pairing.gram
    n = len(G)
    # solve gram X = A^T gram exactly
    rhs = _mat_mul(list(map(list, zip(*A))), G)
    aug = [G[i][:] + rhs[i][:] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = Fraction(1) / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


# ---------------------------------------------------------------------------
# weight-algebra truncations

class WeightTruncation:
    """Lambda_r = K[T0] / I_{W,r} with I_{W,r} = ([t] - sigma_W^-1(t) : t in T_r).

    T0 is a finite abelian group, T_r the subgroup generated by ``sub_gens`` and
    sigma_W a character of T0 (complex valued).  The twist map
    [t] -> sigma_W^-1(t) [t mod T_r] identifies Lambda_r with K[T0 / T_r].
    """

    def __init__(self, group, sub_gens, sigma, tol=1e-10):
        self.group = group
        self.sigma = sigma
        self.tol = tol
        for s in group.elements[:50]:
            for t in group.generators():
                if abs(sigma(group.mul(s, t)) - sigma(s) * sigma(t)) > tol:
                    raise ValueError("sigma_W is not a character")
        self.sub = group.subgroup(sub_gens)
        self.sub_gens = list(sub_gens)
        # cosets of T_r, with chosen representatives
        self.coset_of = {}
        self.reps = []
        for t in group.elements:
            if t in self.coset_of:
                continue
            c = len(self.reps)
            self.reps.append(t)
            for u in self.sub:
                self.coset_of[group.mul(t, u)] = c

    @property
    def quotient_order(self):
        return len(self.reps)

    def twist(self, x):
        """K[T0] -> K[T0/T_r], [t] -> sigma^-1(t) [t mod T_r]."""
        out = [0j] * self.quotient_order
        for t, a in zip(self.group.elements, x.coeffs):
            out[self.coset_of[t]] += a / self.sigma(t)
        return np.array(out)

    def quotient_mul(self, y1, y2):
        """Product in K[T0/T_r]."""
        out = np.zeros(self.quotient_order, dtype=complex)
        for a, ra in enumerate(self.reps):
            for b, rb in enumerate(self.reps):
                out[self.coset_of[self.group.mul(ra, rb)]] += y1[a] * y2[b]
        return out

    def lift(self, y):
        """A section K[T0/T_r] -> K[T0]: [c] -> sigma(rep) [rep]."""
        out = [0j] * self.group.order
        for c, a in enumerate(y):
            r = self.reps[c]
            out[self.group.index[r]] += a * self.sigma(r)
        return GroupAlgebraElement(self.group, out)

    def ideal_generators(self):
        """Spanning set of I_{W,r} over K: [s]([t] - sigma^-1(t)) for s in T0, t in sub_gens.

        Generators t of T_r suffice since [t t'] - sigma^-1(t t') =
        [t]([t'] - sigma^-1(t')) + sigma^-1(t')([t] - sigma^-1(t)).
        """
        G = self.group
        out = []
        for s in G.elements:
            for t in self.sub_gens:
                v = np.zeros(G.order, dtype=complex)
                v[G.index[G.mul(s, t)]] += 1
                v[G.index[s]] -= 1 / self.sigma(t)
                out.append(v)
        return np.array(out).reshape(-1, G.order)

    def _ideal_basis(self):
        if not hasattr(self, "_basis"):
            A = self.ideal_generators().T
            if A.size == 0:
                self._basis = np.zeros((self.group.order, 0), dtype=complex)
            else:
                u, sv, _ = np.linalg.svd(A, full_matrices=False)
                rank = int(np.sum(sv > self.tol * max(1.0, sv[0])))
                self._basis = u[:, :rank]
        return self._basis

    def in_ideal(self, x):
        """Membership in I_{W,r} (residual after projecting onto the ideal)."""
        Q = self._ideal_basis()
        b = np.array(x.coeffs, dtype=complex)
        resid = b - Q @ (Q.conj().T @ b)
        return np.linalg.norm(resid) <= 1e3 * self.tol * max(1.0, np.linalg.norm(b))

    def ideal_dimension(self):
        return self._ideal_basis().shape[1]


def weight_truncation(group, sub_gens, sigma, tol=1e-10):
    return WeightTruncation(group, sub_gens, sigma, tol)


def ideal_contained(small, big):
    """I_small is inside I_big (same T0 and sigma): adding its span does not raise the rank."""
    Q = big._ideal_basis()
    A = small.ideal_generators().T
    resid = A - Q @ (Q.conj().T @ A)
    return bool(np.linalg.norm(resid) <= 1e3 * big.tol * max(1.0, np.linalg.norm(A)))


def torus_truncation(p, R, r, sigma_order=None):
    """Finite model T0 = Z/(p-1) x Z/p^R of Z_p^x, with T_r = p^r (0 x Z/p^R) (r <= R).

    sigma_W(zeta^a (1+p)^b) = exp(2 pi i a / sigma_order), a character of order
    dividing p - 1 that is trivial on the pro-p part.
    """
    group = FiniteAbelianGroup((p - 1, p ** R))
    n = sigma_order or (p - 1)
    if (p - 1) % n:
        raise ValueError("sigma order must divide p - 1")

    def sigma(t):
        return complex(np.exp(2j * np.pi * t[0] / n))
    return weight_truncation(group, [(0, p ** r)], sigma)
