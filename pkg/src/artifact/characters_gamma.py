"""Smooth characters of Q_p^x and E^x, additive characters, and Tate's local factors.

Values are complex doubles.  Local L- and gamma factors are returned as
``Proj`` values so that a pole or a zero survives products and quotients:
``Proj(c, n)`` stands for c * t^n as t -> 0, where the character mu is
deformed to mu |.|^s and t = s log p.
"""

from dataclasses import dataclass
from fractions import Fraction
import cmath
import functools
import math

from .local_fields import INERT, residue, unit_part, valuation

POLE_TOL = 1e-12


def root_of_unity(k, n):
    k %= n
    if k == 0:
        return 1.0 + 0j
    if 4 * k == n:
        return 1j
    if 2 * k == n:
        return -1.0 + 0j
    if 4 * k == 3 * n:
        return -1j
    return cmath.exp(2j * math.pi * k / n)


# ---------------------------------------------------------------------------
# projective values

@dataclass(frozen=True)
class Proj:
    """The leading term value * t^order of a meromorphic germ at t = 0."""

    value: complex
    order: int = 0

    @classmethod
    def of(cls, x):
        return x if isinstance(x, Proj) else cls(complex(x), 0)

    def __mul__(self, other):
        other = Proj.of(other)
        return Proj(self.value * other.value, self.order + other.order)

    __rmul__ = __mul__

    def inverse(self):
        if self.value == 0:
            raise ZeroDivisionError("leading coefficient vanishes")
        return Proj(1 / self.value, -self.order)

    def __truediv__(self, other):
        return self * Proj.of(other).inverse()

    def __rtruediv__(self, other):
        return Proj.of(other) * self.inverse()

    def __pow__(self, n):
        return Proj(self.value ** n, self.order * n)

    @property
    def is_pole(self):
        return self.order < 0

    @property
    def is_zero(self):
        return self.order > 0

    def finite(self):
        """The value at t = 0 (0 for a zero, error for a pole)."""
        if self.order < 0:
            raise ValueError("pole")
        return 0j if self.order > 0 else self.value

    def __repr__(self):
        if self.order == 0:
            return f"Proj({self.value:.6g})"
        return f"Proj({self.value:.6g} t^{self.order})"


# ---------------------------------------------------------------------------
# discrete logarithms in (Z/p^n)^x

@functools.lru_cache(maxsize=None)
def primitive_root(p):
    """Least generator of (Z/p^2)^x, hence of (Z/p^n)^x for every n."""
    phi = p - 1
    factors = [q for q in range(2, phi + 1) if phi % q == 0 and all(q % d for d in range(2, q))]
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in factors) and pow(g, p - 1, p * p) != 1:
            return g
    raise ValueError(p)


@functools.lru_cache(maxsize=None)
def _dlog_table(p, n):
    mod = p ** n
    g = primitive_root(p)
    table = {}
    x = 1
    for k in range(p ** (n - 1) * (p - 1)):
        table[x] = k
        x = x * g % mod
    return table


def dlog(u, p, n):
    """Index of the unit u modulo p^n with respect to the fixed primitive root."""
    return _dlog_table(p, n)[u % p ** n]


def phi(p, n):
    return 1 if n == 0 else p ** (n - 1) * (p - 1)


# ---------------------------------------------------------------------------
# characters of F^x = Q_p^x

class FCharacter:
    """mu(p^v u) = z^v * zeta^(e * ind(u mod p^n)), zeta a primitive phi(p^n)-th root of 1.

    ``conductor`` is the exponent n, ``exponent`` is e modulo phi(p^n) and
    ``value_at_p`` is z = mu(p).
    """

    __slots__ = ("p", "conductor", "exponent", "value_at_p")

    def __init__(self, p, conductor=0, exponent=0, value_at_p=1.0):
        n = conductor
        e = exponent % phi(p, n)
        # shrink to the true conductor
        while n >= 1:
            if n >= 2 and e % p == 0:
                e //= p
                n -= 1
            elif n == 1 and e % (p - 1) == 0:
                e, n = 0, 0
            else:
                break
        self.p = p
        self.conductor = n
        self.exponent = e
        self.value_at_p = complex(value_at_p)

    @classmethod
    def unramified(cls, p, z):
        return cls(p, 0, 0, z)

    @classmethod
    def trivial(cls, p):
        return cls(p, 0, 0, 1.0)

    @classmethod
    def norm(cls, p, s=1):
        """|.|^s, i.e. p -> p^(-s)."""
        return cls(p, 0, 0, float(p) ** (-s))

    def _exponent_at(self, n):
        return self.exponent * (phi(self.p, n) // phi(self.p, self.conductor)) if self.conductor else 0

    def on_unit(self, u):
        """Value on a p-adic unit (an integer or Fraction prime to p)."""
        n = self.conductor
        if n == 0:
            return 1.0 + 0j
        r = residue(u, self.p, n)
        return root_of_unity(self.exponent * dlog(r, self.p, n), phi(self.p, n))

    def __call__(self, x):
        x = Fraction(x)
        if x == 0:
            raise ZeroDivisionError("character evaluated at 0")
        v = valuation(x, self.p)
        return self.value_at_p ** v * self.on_unit(unit_part(x, self.p))

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            raise TypeError("multiply characters only")
        n = max(self.conductor, other.conductor)
        return FCharacter(self.p, n, self._exponent_at(n) + other._exponent_at(n),
                          self.value_at_p * other.value_at_p)

    def inverse(self):
        return FCharacter(self.p, self.conductor, -self.exponent, 1 / self.value_at_p)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, k):
        return FCharacter(self.p, self.conductor, self.exponent * k, self.value_at_p ** k)

    def twist(self, s):
        """mu |.|^s."""
        return self * FCharacter.norm(self.p, s)

    @property
    def is_unramified(self):
        return self.conductor == 0

    def same_as(self, other, tol=1e-9):
        return (self.p == other.p and self.conductor == other.conductor
                and self.exponent == other.exponent
                and abs(self.value_at_p - other.value_at_p) < tol)

    def to_json(self):
        return {"home": "F", "conductor": self.conductor, "unit_exponents": [self.exponent],
                "value_at_p": [self.value_at_p.real, self.value_at_p.imag]}

    @classmethod
    def from_json(cls, p, rec):
        z = rec.get("value_at_p", [1.0, 0.0])
        if not isinstance(z, (list, tuple)):
            z = [z, 0.0]
        exps = rec.get("unit_exponents", [0])
        return cls(p, rec.get("conductor", 0), exps[0] if exps else 0, complex(z[0], z[1]))

    def __repr__(self):
        return f"FCharacter(p={self.p}, n={self.conductor}, e={self.exponent}, mu(p)={self.value_at_p:.6g})"


def quadratic_character(algebra):
    """eta_{E/F}: trivial (split), unramified sign (inert), or Legendre-type (ramified)."""
    p = algebra.p
    if algebra.is_split:
        return FCharacter.trivial(p)
    if algebra.kind == INERT:
        return FCharacter.unramified(p, -1.0)
    # eta(N) = 1 because N is a norm; eta(u) is the Legendre symbol on units
    u0 = unit_part(algebra.N, p)
    leg = FCharacter(p, 1, (p - 1) // 2, 1.0)
    return FCharacter(p, 1, (p - 1) // 2, leg.on_unit(u0).real)


# ---------------------------------------------------------------------------
# characters of E^x

def _all_residues(alg, k):
    """Representatives of O_E / varpi_E^k (field case)."""
    p = alg.p
    if alg.kind == INERT:
        return [alg.element(a, b) for a in range(p ** k) for b in range(p ** k)]
    return [alg.element(a, b) for a in range(p ** ((k + 1) // 2)) for b in range(p ** (k // 2))]


class ECharacter:
    """A character of E^x.

    Split E: a pair (chi_w, chi_wc) of characters of F^x.
    Field E: chi(z) = nu(Nm z) * xi^(v_E(z)) with nu a character of F^x and xi
    the value of an unramified character at the uniformizer of E.
    """

    def __init__(self, algebra, nu=None, xi=1.0, pair=None):
        self.algebra = algebra
        if algebra.is_split:
            if pair is None:
                raise ValueError("split E needs a pair of characters")
            self.pair = tuple(pair)
            self.nu, self.xi = None, None
        else:
            self.nu = nu if nu is not None else FCharacter.trivial(algebra.p)
            self.xi = complex(xi)
            self.pair = None

    @classmethod
    def from_base(cls, algebra, mu):
        """mu o Nm (or (mu, mu) when split)."""
        if algebra.is_split:
            return cls(algebra, pair=(mu, mu))
        return cls(algebra, nu=mu)

    @classmethod
    def trivial(cls, algebra):
        return cls.from_base(algebra, FCharacter.trivial(algebra.p))

    def __call__(self, z):
        if self.algebra.is_split:
            return self.pair[0](z.a) * self.pair[1](z.b)
        nm = z.norm()
        v = valuation(nm, self.algebra.p) // self.algebra.f
        return self.nu(nm) * self.xi ** v

    def __mul__(self, other):
        if self.algebra.is_split:
            return ECharacter(self.algebra, pair=(self.pair[0] * other.pair[0],
                                                  self.pair[1] * other.pair[1]))
        return ECharacter(self.algebra, nu=self.nu * other.nu, xi=self.xi * other.xi)

    def inverse(self):
        if self.algebra.is_split:
            return ECharacter(self.algebra, pair=(self.pair[0].inverse(), self.pair[1].inverse()))
        return ECharacter(self.algebra, nu=self.nu.inverse(), xi=1 / self.xi)

    def restrict_to_base(self):
        """chi restricted to F^x, as an FCharacter."""
        if self.algebra.is_split:
            return self.pair[0] * self.pair[1]
        e = self.algebra.e
        return self.nu * self.nu * FCharacter.unramified(self.algebra.p, self.xi ** e)

    def value_at_uniformizer(self):
        return self(self.algebra.uniformizer)

    @functools.cached_property
    def conductor(self):
        """Conductor exponent on E, found by brute force on 1 + varpi_E^n O_E."""
        alg = self.algebra
        if alg.is_split:
            return max(c.conductor for c in self.pair)
        if self.nu.conductor == 0:
            return 0
        pi = alg.uniformizer
        top = alg.e * self.nu.conductor + 1
        if all(abs(self.nu(u.norm()) - 1) < 1e-9 for u in alg.residue_units(top)):
            return 0
        for n in range(1, top + 1):
            step = pi ** n
            if all(abs(self.nu((alg.one() + step * x).norm()) - 1) < 1e-9
                   for x in _all_residues(alg, top - n)):
                return n
        raise RuntimeError("conductor scan did not terminate")

    @property
    def is_unramified(self):
        return self.conductor == 0

    def to_json(self):
        if self.algebra.is_split:
            return {"home": "E", "pair": [c.to_json() for c in self.pair]}
        return {"home": "E", "nu": self.nu.to_json(), "xi": [self.xi.real, self.xi.imag]}

    @classmethod
    def from_json(cls, algebra, rec):
        p = algebra.p
        if algebra.is_split:
            a, b = rec["pair"]
            return cls(algebra, pair=(FCharacter.from_json(p, a), FCharacter.from_json(p, b)))
        xi = rec.get("xi", [1.0, 0.0])
        if not isinstance(xi, (list, tuple)):
            xi = [xi, 0.0]
        return cls(algebra, nu=FCharacter.from_json(p, rec.get("nu", {})), xi=complex(*xi))

    def __repr__(self):
        if self.algebra.is_split:
            return f"ECharacter{self.pair}"
        return f"ECharacter(nu={self.nu}, xi={self.xi:.6g})"


# ---------------------------------------------------------------------------
# additive characters

def frac_part_p(x, p):
    """The p-adic fractional part {x}_p in [0,1) as a Fraction."""
    x = Fraction(x)
    v = valuation(x, p)
    if v >= 0:
        return Fraction(0)
    den = p ** (-v)
    rest = x.denominator // den
    # x = a / (p^k * rest); {x}_p = (a * rest^-1 mod p^k) / p^k
    return Fraction((x.numerator * pow(rest, -1, den)) % den, den)


@dataclass(frozen=True)
class AdditiveCharacter:
    """psi(x) = exp(2 pi i {scale * x}_p); level = -v(scale)."""

    p: int
    scale: Fraction = Fraction(1)

    @property
    def level(self):
        return -valuation(self.scale, self.p)

    def __call__(self, x):
        fp = frac_part_p(self.scale * Fraction(x), self.p)
        return root_of_unity(fp.numerator, fp.denominator)

    def conjugate(self):
        return AdditiveCharacter(self.p, -self.scale)

    def scaled(self, u):
        return AdditiveCharacter(self.p, self.scale * Fraction(u))


def standard_psi(p):
    return AdditiveCharacter(p, Fraction(1))


@dataclass(frozen=True)
class MeasureSpec:
    """A Haar measure as a multiple of the self-dual pair (d_psi y, d^x_psi y)."""

    multiple: float = 1.0


# ---------------------------------------------------------------------------
# local factors over a local field K in {F, E inert, E ramified}

class _LocalField:
    """Uniform access to q, the uniformizer, residues and psi_K for F or a field E."""

    def __init__(self, p, algebra=None, psi=None):
        self.p = p
        self.algebra = algebra
        self.psi = psi or standard_psi(p)
        if algebra is None:
            self.q, self.f, self.level = p, 1, self.psi.level
        else:
            self.q = p ** algebra.f
            self.f = algebra.f
            self.level = self.psi.level * algebra.e + algebra.additive_level

    def uniformizer(self):
        return Fraction(self.p) if self.algebra is None else self.algebra.uniformizer

    def units(self, n):
        if self.algebra is None:
            return [Fraction(u) for u in range(self.p ** n) if u % self.p] if n else [Fraction(1)]
        return self.algebra.residue_units(n)

    def psi_k(self, x):
        if self.algebra is None:
            return self.psi(x)
        return self.psi(x.trace())



def _mu_at_uniformizer(mu, field):
    if field.algebra is None:
        return mu.value_at_p
    return mu(field.uniformizer())


def _l_factor_generic(mu, field, deform_sign=1):
    if mu.conductor > 0:
        return Proj(1.0)
    z = _mu_at_uniformizer(mu, field)
    if abs(z - 1) < POLE_TOL:
        # 1 - z q^(-s) ~ f * s log p
        return Proj(1.0 / (field.f * deform_sign), -1)
    return Proj(1 / (1 - z))


def _epsilon_generic(mu, field):
    n = mu.conductor
    lev = field.level
    pi = field.uniformizer()
    z = _mu_at_uniformizer(mu, field)
    if n == 0:
        return z ** lev * field.q ** (lev / 2)
    shift = pi ** (-(n + lev))
    total = 0j
    for u in field.units(n):
        total += field.psi_k(shift * u) / mu(u)
    return field.q ** (lev / 2) * z ** (n + lev) * total


def _dispatch(mu, psi, algebra=None):
    p = mu.p if isinstance(mu, FCharacter) else mu.algebra.p
    if isinstance(mu, ECharacter):
        if mu.algebra.is_split:
            raise ValueError("split E characters factor; handle the two places separately")
        return _LocalField(p, mu.algebra, psi)
    return _LocalField(p, None, psi)


def l_factor(mu, deform_sign=1):
    """L(mu) = (1 - mu(varpi))^-1 for unramified mu, 1 otherwise (pole as Proj order -1)."""
    if isinstance(mu, ECharacter) and mu.algebra.is_split:
        return l_factor(mu.pair[0], deform_sign) * l_factor(mu.pair[1], deform_sign)
    return _l_factor_generic(mu, _dispatch(mu, None), deform_sign)


def epsilon_factor(mu, psi=None, measure=None):
    """Tate's epsilon factor for the self-dual measure of psi_K.

    For F-characters psi must be given on F; for E-characters the base-changed
    psi o Tr is used automatically.
    """
    if isinstance(mu, ECharacter) and mu.algebra.is_split:
        return epsilon_factor(mu.pair[0], psi) * epsilon_factor(mu.pair[1], psi)
    field = _dispatch(mu, psi)
    return _epsilon_generic(mu, field)


def dual_twist(mu):
    """mu^-1 |.|_K."""
    if isinstance(mu, ECharacter):
        alg = mu.algebra
        if alg.is_split:
            return ECharacter(alg, pair=tuple(c.inverse().twist(1) for c in mu.pair))
        # |z|_E = |Nm z|_F
        inv = mu.inverse()
        return ECharacter(alg, nu=inv.nu.twist(1), xi=inv.xi)
    return mu.inverse().twist(1)


def gamma_factor(mu, psi=None, measure=None):
    """gamma(mu, psi) = epsilon(mu, psi) L(mu^-1 |.|) / L(mu), projectively."""
    if isinstance(mu, ECharacter) and mu.algebra.is_split:
        return gamma_factor(mu.pair[0], psi) * gamma_factor(mu.pair[1], psi)
    eps = epsilon_factor(mu, psi)
    return Proj(eps) * l_factor(dual_twist(mu), deform_sign=-1) / l_factor(mu)


def gamma_integral_oracle(mu, psi=None, window=None):
    """The Tate integral of mu(y) psi(y) d^x y over Q_p^x, summed annulus by annulus.

    d^x y = dy/|y| with vol(Z_p) = 1.  Each annulus v(y) = m is a finite
    Gauss-type sum; for unramified mu with |mu(p)| < 1 the tail m > m_hi is
    summed in closed form.
    """
    p = mu.p
    psi = psi or standard_psi(p)
    n = mu.conductor
    lev = psi.level
    z = mu.value_at_p
    if window is None:
        window = (-n - lev - 1, max(0, 2 - lev))
    m_lo, m_hi = window
    if n == 0 and abs(z) >= 1:
        raise ValueError("unramified character with |mu(p)| >= 1: integral does not converge")
    total = 0j
    for m in range(m_lo, m_hi + 1):
        # units modulo p^K with K large enough for psi on p^m units and for mu
        K = max(n, -(m + lev), 0)
        if K == 0:
            # psi trivial on the annulus, mu unramified
            if n == 0:
                total += z ** m * (1 - 1 / p)
            continue
        s = 0j
        for u in range(p ** K):
            if u % p == 0:
                continue
            y = Fraction(p) ** m * u
            s += mu(y) * psi(y)
        total += s * p ** (-K)
    if n == 0:
        # annuli m > m_hi: psi trivial there once m_hi >= -lev
        if m_hi < -lev:
            raise ValueError("window too short")
        total += (1 - 1 / p) * z ** (m_hi + 1) / (1 - z)
    return total


def c_eta_gauss(algebra, psi=None):
    """prod_w gamma(1_{E_w}, psi_{E_w}) / (gamma(1, psi) gamma(eta, psi)) as a Proj."""
    p = algebra.p
    psi = psi or standard_psi(p)
    one_f = FCharacter.trivial(p)
    eta = quadratic_character(algebra)
    num = gamma_factor(ECharacter.trivial(algebra), psi)
    den = gamma_factor(one_f, psi) * gamma_factor(eta, psi)
    return num / den
