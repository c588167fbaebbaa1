"""Sums of Weil-Deligne characters attached to a refined local datum.

A refined datum (alpha, omega, chi, weight) over E/Q_p gives the two-step
filtration V^+ = alpha|.|, V^- = omega alpha^-1 of V_pi (Hecke normalization,
L(V_pi, s) = L(s + 1/2, pi)), and on E the characters
mu^{+/-} = chi * (V^{+/-} o Nm).

When omega = alpha^2 the representation pi is the Steinberg twist sitting
inside the induction; then the monodromy operator maps V^- onto V^+ and only
its kernel contributes to L-factors.
"""

from dataclasses import dataclass
import cmath

from .characters_gamma import (ECharacter, FCharacter, Proj, epsilon_factor, gamma_factor,
                               l_factor, quadratic_character, standard_psi)
from .local_fields import build_quadratic


class WDSum:
    """A direct sum of characters (of F^x or of E^x), with multiplicative local factors."""

    def __init__(self, summands=()):
        self.summands = list(summands)

    def __iter__(self):
        return iter(self.summands)

    def __len__(self):
        return len(self.summands)

    def __add__(self, other):
        return WDSum(self.summands + other.summands)

    def l_factor(self):
        out = Proj(1.0)
        for mu in self.summands:
            out = out * l_factor(mu)
        return out

    def epsilon_factor(self, psi=None):
        out = 1.0 + 0j
        for mu in self.summands:
            out *= epsilon_factor(mu, psi)
        return out

    def gamma_factor(self, psi=None):
        out = Proj(1.0)
        for mu in self.summands:
            out = out * gamma_factor(mu, psi)
        return out

    def twist(self, s):
        return WDSum(_twist(mu, s) for mu in self.summands)

    def dual(self):
        return WDSum(mu.inverse() for mu in self.summands)

    def det(self):
        out = self.summands[0]
        for mu in self.summands[1:]:
            out = out * mu
        return out


def _twist(mu, s):
    if isinstance(mu, FCharacter):
        return mu.twist(s)
    alg = mu.algebra
    if alg.is_split:
        return ECharacter(alg, pair=tuple(c.twist(s) for c in mu.pair))
    return ECharacter(alg, nu=mu.nu.twist(s), xi=mu.xi)


def base_change(mu, algebra):
    """mu o Nm as a character of E^x (the pair (mu, mu) when E splits)."""
    return ECharacter.from_base(algebra, mu)


# ---------------------------------------------------------------------------
# refined data

@dataclass
class RefinedLocalDatum:
    algebra: object
    alpha: FCharacter
    omega: FCharacter
    chi: ECharacter
    w: int = 0
    k: int = 2
    l: int = 0

    def __post_init__(self):
        if (self.w - self.k) % 2 or (self.l - self.k) % 2:
            raise ValueError("w, k, l must have the same parity")
        if self.k < 2 or abs(self.l) >= self.k:
            raise ValueError("need k >= 2 and |l| < k")
        central = self.chi.restrict_to_base() * self.omega
        if not central.same_as(FCharacter.trivial(self.p), tol=1e-8):
            raise ValueError(f"chi restricted to F^x times omega is not trivial: {central}")

    @property
    def p(self):
        return self.algebra.p

    @property
    def v_plus(self):
        return self.alpha.twist(1)

    @property
    def v_minus(self):
        return self.omega / self.alpha

    @property
    def is_steinberg(self):
        return self.omega.same_as(self.alpha * self.alpha, tol=1e-9)

    def mu_plus(self):
        return self.chi * base_change(self.v_plus, self.algebra)

    def mu_minus(self):
        return self.chi * base_change(self.v_minus, self.algebra)

    def inducing_characters(self):
        """(chi_1, chi_2) with pi inside the un-normalized Ind(chi_1, chi_2)."""
        return self.alpha.twist(1), (self.omega / self.alpha).twist(-1)

    def to_json(self):
        alg = self.algebra
        return {"p": self.p, "E": {"kind": alg.kind, "T": alg.T, "N": alg.N},
                "alpha": self.alpha.to_json(), "omega": self.omega.to_json(),
                "chi": self.chi.to_json(), "weight": {"w": self.w, "k": self.k, "l": self.l}}

    @classmethod
    def from_json(cls, rec):
        p = rec["p"]
        e = rec.get("E", {"kind": "split"})
        alg = build_quadratic(p, e["kind"], e.get("T", 0), e.get("N", 0))
        wt = rec.get("weight", {})
        return cls(alg, FCharacter.from_json(p, rec.get("alpha", {})),
                   FCharacter.from_json(p, rec.get("omega", {})),
                   ECharacter.from_json(alg, rec["chi"]) if "chi" in rec else ECharacter.trivial(alg),
                   wt.get("w", 0), wt.get("k", 2), wt.get("l", 0))


def unramified_datum(algebra, alpha_p, omega_p=1.0, chi=None, weight=(0, 2, 0)):
    """A datum with unramified alpha, omega; chi defaults to the unramified character
    of E^x forced by the central character condition."""
    p = algebra.p
    alpha = FCharacter.unramified(p, alpha_p)
    omega = FCharacter.unramified(p, omega_p)
    if chi is None:
        root = cmath.sqrt(1 / complex(omega_p))
        if algebra.is_split:
            chi = ECharacter(algebra, pair=(FCharacter.unramified(p, root),
                                            FCharacter.unramified(p, root)))
        else:
            chi = ECharacter.from_base(algebra, FCharacter.unramified(p, root))
    return RefinedLocalDatum(algebra, alpha, omega, chi, *weight)


# ---------------------------------------------------------------------------
# the Weil-Deligne representations

def vpi_decompose(datum):
    """V_pi as the sum alpha|.| + omega alpha^-1 of characters of F^x."""
    return WDSum([datum.v_plus, datum.v_minus])


def vpi_on_E(datum):
    """V = V_pi|_E (x) chi as a sum of E-characters, and the part seen by L (ker N)."""
    full = WDSum([datum.mu_plus(), datum.mu_minus()])
    if datum.is_steinberg:
        return full, WDSum([datum.mu_plus()])
    return full, full


def adjoint(datum):
    """ad V_pi, and the kernel of monodromy on it."""
    ratio = datum.v_plus / datum.v_minus
    full = WDSum([FCharacter.trivial(datum.p), ratio, ratio.inverse()])
    if datum.is_steinberg:
        return full, WDSum([ratio])
    return full, full


def ad_plus_plus_twisted(datum):
    """Hom(V^-, V^+)(1) = (V^+ / V^-) |.|."""
    return (datum.v_plus / datum.v_minus).twist(1)


def zeta_local(p, s):
    return Proj(1 / (1 - float(p) ** (-s)))


def script_L(datum):
    """zeta(2) L(V, 0) / (L(1, eta) L(ad V_pi, 1)), projectively."""
    p = datum.p
    _, v_l = vpi_on_E(datum)
    _, ad_l = adjoint(datum)
    eta = quadratic_character(datum.algebra)
    num = zeta_local(p, 2) * v_l.l_factor()
    den = l_factor(eta.twist(1)) * ad_l.twist(1).l_factor()
    return num / den


def mu_plus_at_j(datum):
    return datum.mu_plus()(datum.algebra.j)


def e_v(datum, psi=None):
    """The interpolation factor, as a Proj (order > 0 means exactly zero)."""
    psi = psi or standard_psi(datum.p)
    gam_plus = gamma_factor(datum.mu_plus(), psi)
    gam_ad = gamma_factor(ad_plus_plus_twisted(datum), psi)
    return gam_ad / gam_plus / script_L(datum)


def e_v_value(datum, psi=None):
    return e_v(datum, psi).finite()


def e_infty(w, l, degF=1):
    if (w - l) % 2:
        raise ValueError("w and l must have the same parity")
    return [1, 1j, -1, -1j][((w + l) * degF) % 4]


def is_exceptional(datum):
    """Weight (2, l=0), Steinberg configuration omega = alpha^2, and chi_w * alpha o Nm = 1."""
    if datum.k != 2 or datum.l != 0 or not datum.is_steinberg:
        return False
    twisted = datum.chi * base_change(datum.alpha, datum.algebra)
    alg = datum.algebra
    if alg.is_split:
        one = FCharacter.trivial(datum.p)
        return all(c.same_as(one) for c in twisted.pair)
    return twisted.conductor == 0 and abs(twisted.value_at_uniformizer() - 1) < 1e-9
