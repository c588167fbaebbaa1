from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from artifact.alg_reps import (CoefficientField, PolyRep, Weight, c_W, c_W_unitary, compare_toric_inf,
                               invariant_line, invariant_vectors, is_invariant, pairing,
                               project_invariants, q_ord_inf_ratio, script_L_inf, unitarity_pairings,
                               verify_compare_toric_inf, verify_unitarity, verify_wao_alg, weight_sweep)

Q = CoefficientField.rational()
INERT = CoefficientField.quadratic(0, 2)
SPLIT = CoefficientField.split()
FIELDS = [SPLIT, INERT, CoefficientField.quadratic(1, 1)]

entries = st.integers(-4, 4)
matrices = st.tuples(entries, entries, entries, entries).filter(lambda t: t[0] * t[3] != t[1] * t[2])
weights = st.sampled_from([Weight(*t) for t in weight_sweep(6)])


def as_matrix(t):
    return [[t[0], t[1]], [t[2], t[3]]]


def mat_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


# -- the field -------------------------------------------------------------------

def test_field_constants():
    th = INERT.theta
    assert th * th == INERT(-2)
    assert INERT.j == th.conj() - th
    assert SPLIT.j == SPLIT(-1, 1)
    assert (th * INERT(3, 1)).conj() == th.conj() * INERT(3, 1).conj()


def test_field_inverse():
    for F in FIELDS:
        x = F(2, 5)
        assert x * x.inverse() == F.one()


def test_weight_validation():
    with pytest.raises(ValueError):
        Weight(0, 4, 1)
    with pytest.raises(ValueError):
        Weight(0, 4, 4)
    with pytest.raises(ValueError):
        Weight(0, 1, 1)
    assert Weight(2, 6, 2).dual() == Weight(-2, 6, -2)


# -- the action ------------------------------------------------------------------

def _sympy_left(coeffs, g, n):
    """Expand sum c_i X^{n-i} Y^i with (X, Y) = (x, y) g, using sympy."""
    x, y = sympy.symbols("x y")
    X, Y = x * g[0][0] + y * g[1][0], x * g[0][1] + y * g[1][1]
    poly = sympy.Poly(sum(c * X ** (n - i) * Y ** i for i, c in enumerate(coeffs)), x, y)
    return [poly.coeff_monomial(x ** (n - i) * y ** i) for i in range(n + 1)]


@settings(max_examples=60, deadline=None)
@given(weights, matrices)
def test_left_action_matches_expansion(wt, g):
    rep = PolyRep(wt, Q)
    g = as_matrix(g)
    vec = [Fraction(i + 1, 3) for i in range(rep.dim)]
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    twist = Fraction(det) ** ((wt.w - wt.k + 2) // 2)
    expected = [twist * Fraction(int(c.p), int(c.q)) for c in _sympy_left(vec, g, rep.degree)]
    assert [c.a for c in rep.act(g, Q.one(), rep.vector(vec))] == expected


@settings(max_examples=60, deadline=None)
@given(weights, matrices, matrices)
def test_composition_law(wt, g1, g2):
    rep = PolyRep(wt, INERT)
    g1, g2 = as_matrix(g1), as_matrix(g2)
    vec = rep.vector([INERT(i, 1 - i) for i in range(rep.dim)])
    h = INERT(1, 1)
    left = rep.act(g1, h, rep.act(g2, h, vec))
    assert left == rep.act(mat_mul(g1, g2), h * h, vec)
    right = rep.act(g1, h, rep.act(g2, h, vec, "right"), "right")
    assert right == rep.act(mat_mul(g2, g1), h * h, vec, "right")


def test_left_and_right_related_by_transpose():
    rep = PolyRep(Weight(1, 5, 1), Q)
    g = [[1, 2], [3, 5]]
    gt = [[1, 3], [2, 5]]
    vec = rep.vector([1, -2, 3, 4])
    assert rep.act(g, Q.one(), vec, "right") == rep.act(gt, Q.one(), vec, "left")


def test_diagonal_scales_monomials():
    rep = PolyRep(Weight(0, 6, 0), Q)
    for i in range(rep.dim):
        out = rep.act([[3, 0], [0, 1]], Q.one(), rep.monomial(i))
        # x -> 3x, twist det^-2
        assert out == [Q(Fraction(3 ** (rep.degree - i), 9)) if m == i else Q.zero() for m in range(rep.dim)]


def test_central_element_with_weight_zero():
    rep = PolyRep(Weight(0, 4, 0), INERT)
    z = 7
    vec = rep.vector([1, 2, 3])
    # det^{(2-k)/2} = z^{-2} cancels z^{k-2}; sigma(z) powers cancel at w = l = 0
    assert rep.act([[z, 0], [0, z]], INERT(z), vec) == vec


def test_singular_input_rejected():
    rep = PolyRep(Weight(0, 4, 0), Q)
    with pytest.raises(ZeroDivisionError):
        rep.act([[1, 2], [2, 4]], Q.one(), rep.monomial(0))
    with pytest.raises(ZeroDivisionError):
        rep.act([[1, 0], [0, 1]], Q.zero(), rep.monomial(0))


# -- the pairing ------------------------------------------------------------------

def test_pairing_on_monomials():
    rep = PolyRep(Weight(0, 6, 0), Q)
    n = rep.degree
    for a in range(rep.dim):
        for b in range(rep.dim):
            expected = Fraction((-1) ** a, comb(n, a)) if b == n - a else 0
            assert pairing(rep, rep.monomial(a), rep.dual().monomial(b)) == expected


@settings(max_examples=40, deadline=None)
@given(weights, matrices, st.sampled_from(FIELDS), st.sampled_from(["left", "right"]))
def test_pairing_is_invariant(wt, g, F, side):
    rep = PolyRep(wt, F)
    drep = rep.dual()
    g = as_matrix(g)
    h = F(2, 3) if F.kind == "split" else F(1, 1)
    p = rep.vector([i + 1 for i in range(rep.dim)])
    q = drep.vector([(-1) ** i * (2 * i + 1) for i in range(rep.dim)])
    assert pairing(rep, rep.act(g, h, p, side), drep.act(g, h, q, side)) == pairing(rep, p, q)


# -- invariants and constants -----------------------------------------------------------

@pytest.mark.parametrize("F", FIELDS)
@pytest.mark.parametrize("wt", [Weight(0, 2, 0), Weight(0, 4, 2), Weight(1, 5, -1), Weight(-2, 6, 0)])
def test_projector_is_idempotent(F, wt):
    rep = PolyRep(wt, F)
    vec = rep.vector([i * i + 1 for i in range(rep.dim)])
    once = project_invariants(rep, vec)
    assert project_invariants(rep, once) == once
    v, _ = invariant_line(rep)
    assert is_invariant(rep, v, "left")


@pytest.mark.parametrize("F", FIELDS)
def test_invariant_vectors_are_dual(F):
    for w, k, l in weight_sweep(6):
        rep = PolyRep(Weight(w, k, l), F)
        xi, xv = invariant_vectors(rep)
        assert is_invariant(rep, xi, "right") and is_invariant(rep.dual(), xv, "right")
        assert pairing(rep, xi, xv) == rep.coeffs.one()


def test_c_W_examples():
    assert c_W(0, 2, 0, INERT) == INERT.one()
    assert c_W(0, 4, 0, SPLIT) == Q(2)
    # j = -2 theta, so j^-2 theta^2 = theta^2 / (4 theta^2) = 1/4
    assert c_W(0, 4, 2, INERT) == INERT(Fraction(1, 4))


def test_constants_never_vanish():
    for F in FIELDS:
        for w, k, l in weight_sweep(8):
            assert not c_W(w, k, l, F).is_zero()
            assert not c_W_unitary(w, k, l, F).is_zero()


def test_script_L_at_infinity():
    assert script_L_inf(Weight(0, 2, 0)) == 2
    assert script_L_inf(Weight(0, 4, 2)) == Fraction(2, 3)
    assert script_L_inf(Weight(0, 4, 0)) == Fraction(1, 3)


# -- the identities ---------------------------------------------------------------

def test_anti_ordinary_pairing():
    assert verify_wao_alg(0, 2, 0)
    assert verify_wao_alg(0, 4, 0)
    assert all(verify_wao_alg(*t) for t in weight_sweep(8))


def test_unitarity_split_examples():
    assert unitarity_pairings(0, 2, 0, SPLIT) == (Q.one(), Q.one())
    assert verify_unitarity(0, 4, 2, SPLIT)
    assert verify_unitarity(0, 4, 2, SPLIT, constant=c_W)


def test_unitarity_inert_example():
    assert verify_unitarity(0, 4, 0, INERT)
    # the printed constant misses a sign in the field case
    before, after = unitarity_pairings(0, 4, 0, INERT, c_W)
    assert before == INERT.one() and after == INERT(Fraction(-1, 4))


@pytest.mark.parametrize("F", FIELDS)
def test_unitarity_sweep(F):
    assert all(verify_unitarity(*t, F) for t in weight_sweep(8))


def test_ordinary_ratio_small_weight():
    rep = PolyRep(Weight(0, 2, 0), SPLIT)
    f, fv = rep.monomial(0), rep.dual().monomial(0)
    assert q_ord_inf_ratio(rep, f, fv, f, fv, vol=3) == Fraction(3, 2)
    scaled = [c * 5 for c in f]
    assert q_ord_inf_ratio(rep, f, fv, scaled, fv) == Fraction(1, 10)


def test_ordinary_ratio_needs_highest_weight():
    rep = PolyRep(Weight(0, 4, 0), Q)
    with pytest.raises(ValueError):
        q_ord_inf_ratio(rep, rep.monomial(1), rep.monomial(0), rep.monomial(0), rep.monomial(0))


def test_comparison_examples():
    lhs, rhs = compare_toric_inf(0, 2, 0, SPLIT)
    assert lhs == rhs
    assert verify_compare_toric_inf(0, 4, 0, INERT)
    assert verify_compare_toric_inf(0, 4, 0, INERT, vol=Fraction(7, 3))


@pytest.mark.parametrize("F", FIELDS)
def test_comparison_sweep(F):
    assert all(verify_compare_toric_inf(*t, F) for t in weight_sweep(8))
