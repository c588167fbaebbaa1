import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact.hida_ordinary import (FiniteAbelianGroup, GroupAlgebraElement, GroupAlgebraModule,
                                    TruncatedPAdicMatrix, adjoint_operator, alpha_map, beta_map,
                                    certified_exponent_bound, check_ordinary_projector,
                                    fitting_projector_mod_p, gl_order, ideal_contained, is_S_linear,
                                    ordinary_projector, projector_by_group_order, promote_pairing,
                                    torus_truncation, weight_truncation)


def tpm(rows, p=3, m=3):
    return TruncatedPAdicMatrix(rows, p, m)


@st.composite
def truncated(draw, p=None, m=None, d=None):
    p = p or draw(st.sampled_from([2, 3, 5]))
    m = m or draw(st.integers(1, 3))
    d = d or draw(st.integers(1, 4))
    entries = draw(st.lists(st.integers(0, p ** m - 1), min_size=d * d, max_size=d * d))
    # bias towards non-trivial splittings: scale a random block of rows by p
    k = draw(st.integers(0, d))
    rows = [[entries[i * d + j] * (p if i < k else 1) for j in range(d)] for i in range(d)]
    return TruncatedPAdicMatrix(rows, p, m)


# -- truncated matrices ---------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(st.data())
def test_ring_laws(data):
    A = data.draw(truncated(p=5, m=2, d=3))
    B = data.draw(truncated(p=5, m=2, d=3))
    C = data.draw(truncated(p=5, m=2, d=3))
    assert (A @ B) @ C == A @ (B @ C)
    assert A @ (B + C) == A @ B + A @ C
    assert A ** 5 == A @ A @ A @ A @ A


def test_incompatible_matrices():
    with pytest.raises(ValueError):
        tpm([[1]]) @ TruncatedPAdicMatrix([[1]], 5, 3)
    with pytest.raises(ValueError):
        tpm([[1, 2]])


def test_gl_order_small_cases():
    # GL_1(Z/9) has phi(9) = 6 elements; GL_2(F_3) has 48
    assert gl_order(1, 3, 2) == 6
    assert gl_order(2, 3, 1) == 48
    n = certified_exponent_bound(2, 3, 1)
    assert n >= 2


# -- the ordinary projector --------------------------------------------------------------

def test_invertible_gives_identity():
    U = tpm([[1, 2], [0, 2]])
    assert ordinary_projector(U) == TruncatedPAdicMatrix.identity(2, 3, 3)


def test_divisible_by_p_gives_zero():
    U = tpm([[3, 6], [9, 3]])
    assert ordinary_projector(U) == tpm([[0, 0], [0, 0]])


def test_block_diagonal():
    # unit block [[2, 1], [1, 1]] and a p-divisible block [[3]]
    U = tpm([[2, 1, 0], [1, 1, 0], [0, 0, 3]])
    assert ordinary_projector(U) == tpm([[1, 0, 0], [0, 1, 0], [0, 0, 0]])


def test_conjugated_block_diagonal():
    # the same splitting in a skew basis: e = P diag(1, 0) P^-1 with P = [[1, 1], [0, 1]]
    p, m = 5, 3
    P = TruncatedPAdicMatrix([[1, 1], [0, 1]], p, m)
    Pinv = TruncatedPAdicMatrix([[1, -1], [0, 1]], p, m)
    U = P @ TruncatedPAdicMatrix([[7, 0], [0, 10]], p, m) @ Pinv
    e = ordinary_projector(U)
    assert e == P @ TruncatedPAdicMatrix([[1, 0], [0, 0]], p, m) @ Pinv


@settings(max_examples=80, deadline=None)
@given(truncated())
def test_projector_properties(U):
    e = ordinary_projector(U)
    assert all(check_ordinary_projector(U, e).values())


@settings(max_examples=60, deadline=None)
@given(truncated())
def test_projector_agrees_with_oracles(U):
    e = ordinary_projector(U)
    assert e.reduce(1) == fitting_projector_mod_p(U)
    assert e == projector_by_group_order(U)


def test_projector_compatible_with_reduction():
    U = tpm([[4, 3, 1], [3, 6, 2], [1, 0, 9]], p=3, m=4)
    assert ordinary_projector(U).reduce(2) == ordinary_projector(U.reduce(2))


# -- group algebras and trace duality ------------------------------------------------------

def swap_module():
    G = FiniteAbelianGroup([2])
    return GroupAlgebraModule(G, [[[0, 1], [1, 0]]])


def test_group_basics():
    G = FiniteAbelianGroup([2, 3])
    assert G.order == 6
    assert len(G.subgroup([(0, 1)])) == 3
    t = (1, 2)
    assert G.mul(t, G.inv(t)) == G.identity()
    with pytest.raises(ValueError):
        FiniteAbelianGroup([0])


def test_module_validation():
    G = FiniteAbelianGroup([2])
    with pytest.raises(ValueError):
        GroupAlgebraModule(G, [[[0, 1], [2, 0]]])  # order is not 2
    G2 = FiniteAbelianGroup([2, 2])
    with pytest.raises(ValueError):
        GroupAlgebraModule(G2, [[[0, 1], [1, 0]], [[1, 1], [0, -1]]])  # do not commute


def test_trivial_group():
    G = FiniteAbelianGroup([])
    M = GroupAlgebraModule.trivial_action(G, 2)
    lam = [Fraction(3), Fraction(-1)]
    m = [Fraction(1), Fraction(5)]
    a, b = alpha_map(M, lam)(m), beta_map(M, lam)(m)
    assert a.coeffs == b.coeffs == [Fraction(-2)]


def test_swap_by_hand():
    M = swap_module()
    G = M.group
    lam = [Fraction(2), Fraction(7)]
    m = [Fraction(1), Fraction(3)]
    # lambda(m) = 23, lambda(t m) = 2*3 + 7*1 = 13; t = t^-1
    b = beta_map(M, lam)(m)
    assert b[(0,)] == 23 and b[(1,)] == 13
    a = alpha_map(M, lam)(m)
    assert a == b.scale(Fraction(1, 2))


@pytest.mark.parametrize("factors", [[2], [3], [4], [2, 2], [2, 3], [2, 6], [12]])
def test_trace_duality(factors):
    G = FiniteAbelianGroup(factors)
    M = GroupAlgebraModule.regular(G)
    rng = np.random.default_rng(sum(factors))
    lam = [Fraction(int(x)) for x in rng.integers(-5, 6, M.dim)]
    samples = [[Fraction(int(x)) for x in rng.integers(-5, 6, M.dim)] for _ in range(3)]
    a, b = alpha_map(M, lam), beta_map(M, lam)
    for m in samples:
        assert a(m) == b(m).scale(Fraction(1, G.order))
        # brute force beta
        direct = [sum(x * y for x, y in zip(lam, M.act(G.inv(t), m))) for t in G.elements]
        assert b(m).coeffs == direct
    assert is_S_linear(M, a, samples) and is_S_linear(M, b, samples)


def test_beta_is_injective_on_regular_module():
    G = FiniteAbelianGroup([3])
    M = GroupAlgebraModule.regular(G)
    e0 = [Fraction(1), Fraction(0), Fraction(0)]
    images = [beta_map(M, lam)(e0).coeffs for lam in ([1, 0, 0], [0, 1, 0], [0, 0, 1])]
    assert np.linalg.matrix_rank(np.array(images, dtype=float)) == 3


# -- promoted pairings ---------------------------------------------------------------------

def test_promoted_pairing_trivial_group():
    G = FiniteAbelianGroup([])
    M = GroupAlgebraModule.trivial_action(G, 2)
    gram = [[1, 2], [0, 3]]
    pp = promote_pairing(M, M, gram)
    x, y = [Fraction(1), Fraction(1)], [Fraction(2), Fraction(-1)]
    assert pp(x, y).coeffs == [Fraction(1 * 2 - 2 + 0 - 3)]


def test_promoted_pairing_regular_z3():
    G = FiniteAbelianGroup([3])
    M = GroupAlgebraModule.regular(G)
    gram = [[int(i == j) for j in range(3)] for i in range(3)]
    pp = promote_pairing(M, M, gram)
    x = [Fraction(1), Fraction(2), Fraction(3)]
    y = [Fraction(4), Fraction(-1), Fraction(5)]
    out = pp(x, y)
    # coefficient of [t^-1] is sum_i x_i (t y)_i, with (t y)_{i + t} = y_i
    for t in range(3):
        ty = [y[(i - t) % 3] for i in range(3)]
        assert out[((-t) % 3,)] == sum(a * b for a, b in zip(x, ty))
    # the trivial character recovers the full orbit sum
    assert pp.specialize(x, y, lambda t: 1) == sum(x) * sum(y)


def test_promoted_pairing_rejects_bad_input():
    G = FiniteAbelianGroup([3])
    M = GroupAlgebraModule.regular(G)
    with pytest.raises(ValueError):
        promote_pairing(M, M, [[1, 1, 0], [1, 1, 0], [0, 0, 1]])  # degenerate
    with pytest.raises(ValueError):
        promote_pairing(M, M, [[1, 0, 0], [0, 2, 0], [0, 0, 3]])  # not equivariant


def test_scale_is_applied():
    G = FiniteAbelianGroup([2])
    M = GroupAlgebraModule.regular(G)
    gram = [[1, 0], [0, 1]]
    x, y = [Fraction(1), Fraction(2)], [Fraction(3), Fraction(1)]
    assert promote_pairing(M, M, gram, scale=9)(x, y) == promote_pairing(M, M, gram)(x, y).scale(9)


@pytest.mark.parametrize("factors", [[3], [2, 2], [4]])
def test_hecke_adjunction(factors):
    G = FiniteAbelianGroup(factors)
    M = GroupAlgebraModule.regular(G)
    n = M.dim
    gram = [[int(i == j) for j in range(n)] for i in range(n)]
    pp = promote_pairing(M, M, gram)
    # multiplication by 2[1] + [g] - 3[g^2]-style elements commutes with the action
    A = [[0] * n for _ in range(n)]
    for c, t in zip((2, 1, -3), G.elements[:3]):
        At = M.action(t)
        A = [[A[i][j] + c * At[i][j] for j in range(n)] for i in range(n)]
    Ai = adjoint_operator(pp, A)
    rng = np.random.default_rng(len(factors))
    for _ in range(3):
        x = [Fraction(int(v)) for v in rng.integers(-4, 5, n)]
        y = [Fraction(int(v)) for v in rng.integers(-4, 5, n)]
        Ax = [sum(a * v for a, v in zip(row, x)) for row in A]
        Aiy = [sum(a * v for a, v in zip(row, y)) for row in Ai]
        assert pp(Ax, y) == pp(x, Aiy)


# -- weight truncations -----------------------------------------------------------------------

def test_trivial_weight_is_plain_quotient():
    G = FiniteAbelianGroup([6])
    W = weight_truncation(G, [(3,)], lambda t: 1.0)
    assert W.quotient_order == 3
    x = GroupAlgebraElement.basis(G, (4,))
    y = W.twist(x)
    assert np.allclose(y, [0, 1, 0])


def test_twist_is_an_algebra_map():
    W = torus_truncation(5, 2, 1)
    G = W.group
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = GroupAlgebraElement(G, list(rng.normal(size=G.order)))
        y = GroupAlgebraElement(G, list(rng.normal(size=G.order)))
        assert np.allclose(W.twist(x * y), W.quotient_mul(W.twist(x), W.twist(y)))


def test_twist_round_trip_and_kernel():
    W = torus_truncation(5, 2, 1)
    rng = np.random.default_rng(1)
    y = rng.normal(size=W.quotient_order) + 1j * rng.normal(size=W.quotient_order)
    assert np.allclose(W.twist(W.lift(y)), y)
    for g in W.ideal_generators()[:10]:
        assert np.allclose(W.twist(GroupAlgebraElement(W.group, list(g))), 0)
    assert W.ideal_dimension() == W.group.order - W.quotient_order


def test_twist_on_group_elements():
    # sigma of order p - 1 on the prime-to-p part, checked element by element
    p = 5
    W = torus_truncation(p, 2, 1, sigma_order=4)
    for t in W.group.elements:
        y = W.twist(GroupAlgebraElement.basis(W.group, t))
        expected = np.zeros(W.quotient_order, dtype=complex)
        expected[W.coset_of[t]] = cmath.exp(-2j * cmath.pi * t[0] / 4)
        assert np.allclose(y, expected)


def test_ideals_are_nested():
    p, R = 3, 3
    Ws = [torus_truncation(p, R, r) for r in range(R + 1)]
    for r in range(R):
        assert ideal_contained(Ws[r + 1], Ws[r])
        assert not ideal_contained(Ws[r], Ws[r + 1])


def test_non_character_rejected():
    G = FiniteAbelianGroup([4])
    with pytest.raises(ValueError):
        weight_truncation(G, [(2,)], lambda t: 1.0 + t[0])
