import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hatbraid.braidgen import braid_matrix, make_spec, permutation_P
from hatbraid.errors import PoleAtTheta, UnsupportedSpec
from hatbraid.lalg import (
    S2,
    S2_direct,
    annihilator_members,
    central_elements,
    check_RLL,
    check_S1_S2,
    conjugate_sumLii,
    coproduct,
    decompose_AB,
    f_map,
    f_symmetry_residual,
    fundamental_L,
    group_like_residual,
    mixed_row_relation_residual,
    o3_conjugator,
    o3_mixed_instances,
    reduced_commutation_residual,
    spectral_L,
    spectral_rll_residual,
    sum_diagonal,
)
from hatbraid.matrix import ExactMatrix, lift
from hatbraid.scalar import ONE, ZERO, LambdaExt, LaurentPoly

SPECS = [("ohat", 3), ("ohat", 4), ("phat", 4)]


@pytest.fixture(scope="module")
def o3():
    spec = make_spec("ohat", 3)
    return spec, fundamental_L(spec, "plus"), fundamental_L(spec, "minus")


def test_fundamental_blocks(o3):
    spec, Lp, _ = o3
    T = spec.T
    lam = LambdaExt.generator(T)
    b13 = Lp[0, 2]
    assert b13.nnz == 1
    assert b13[2, 0] == LambdaExt(ONE, LaurentPoly.q(-1), T)
    b22 = Lp[1, 1]
    assert b22.nnz == 1
    assert b22[1, 1] == LambdaExt(ONE, ONE, T)
    assert lam == LambdaExt(ZERO, ONE, T)


def test_fundamental_operators_are_inverse(o3):
    spec, _, _ = o3
    P = lift(permutation_P(3), spec.T)
    Rp = braid_matrix(spec, 1).entries
    Rm = braid_matrix(spec, -1).entries
    prod = P @ (Rp @ P) @ P @ (Rm @ P)
    assert (prod - ExactMatrix.identity(9, LambdaExt(ONE, ZERO, spec.T))).is_zero()


@pytest.mark.invariant
@pytest.mark.parametrize("fam, N", SPECS)
def test_rll_exact(fam, N):
    spec = make_spec(fam, N)
    Lp, Lm = fundamental_L(spec, "plus"), fundamental_L(spec, "minus")
    for a, b in [(Lp, None), (Lm, None), (Lp, Lm), (Lm, Lp)]:
        c = check_RLL(spec, a, b)
        assert c.exact and c.residual == 0.0, c.line()


def test_rll_wrong_coefficient_fails(o3):
    spec, Lp, Lm = o3
    # the mixed relation needs lambda_+, not lambda_-
    assert not check_RLL(spec, Lp, Lm, coeff=LambdaExt.inverse_generator(spec.T)).passed


@pytest.mark.parametrize("q0", [2.0, 0.6])
def test_rll_coproduct_numeric(o3, q0):
    spec, Lp, Lm = o3
    D = coproduct(Lp.numeric(q0))
    assert D.d == 9
    assert check_RLL(spec, D).residual < 1e-9
    Dm = coproduct(Lm.numeric(q0))
    assert check_RLL(spec, Dm).residual < 1e-9


@pytest.mark.invariant
@pytest.mark.parametrize("fam, N", SPECS)
def test_central_members_equal_lambda(fam, N):
    spec = make_spec(fam, N)
    L = fundamental_L(spec, "plus")
    rep = central_elements(L, spec)
    assert rep.equality_residual == 0.0 and rep.centrality_residual == 0.0
    lam = LambdaExt.generator(spec.T)
    expected = lam if fam == "ohat" else -lam
    assert rep.scalar_value == expected
    assert len(rep.members) == 2 * N


def test_reference_central_member(o3):
    spec, L, _ = o3
    T = spec.T
    q = LaurentPoly.q
    def sc(m, p):
        return m.scale(LambdaExt(p, ZERO, T))
    expr = L[0, 0] @ L[2, 2] + sc(L[1, 0] @ L[1, 2], q(-0.5)) + sc(L[2, 0] @ L[0, 2], q(-1))
    assert (expr - ExactMatrix.identity(3, LambdaExt.generator(T))).is_zero()


def test_sum_of_diagonal_blocks(o3):
    spec, L, _ = o3
    target = ExactMatrix.identity(3, LambdaExt(ONE, ONE, spec.T))
    assert (sum_diagonal(L) - target).is_zero()


@pytest.mark.invariant
@pytest.mark.parametrize("fam, N", SPECS)
def test_annihilators_vanish_exactly(fam, N):
    spec = make_spec(fam, N)
    for variant in ("plus", "minus"):
        c = check_S1_S2(fundamental_L(spec, variant), spec)
        assert c.exact and c.residual == 0.0


def test_reference_annihilator(o3):
    spec, L, _ = o3
    T = spec.T
    h = LambdaExt(LaurentPoly.q(0.5), ZERO, T)
    hm = LambdaExt(LaurentPoly.q(-0.5), ZERO, T)
    expr = (L[2, 0] @ L[0, 0]).scale(hm) + L[1, 0] @ L[1, 0] + (L[0, 0] @ L[2, 0]).scale(h)
    assert expr.is_zero()


def test_annihilator_count(o3):
    spec, L, _ = o3
    assert len(annihilator_members(spec, L)) == 2 * (9 - 3)


@pytest.mark.parametrize("fam, N", SPECS)
def test_s2_transpose_form_matches_direct(fam, N):
    spec = make_spec(fam, N)
    L = fundamental_L(spec, "plus")
    for l in range(N):
        for k in range(N):
            assert (S2(spec, L, l, k) - S2_direct(spec, L, l, k)).is_zero()


def test_coproduct_annihilators_numeric(o3):
    spec, L, _ = o3
    assert check_S1_S2(coproduct(L.numeric(1.7)), spec).residual < 1e-9


@pytest.mark.parametrize("q0", [1.0, 2.0])
def test_coproduct_central_value(o3, q0):
    spec, L, _ = o3
    Ln = L.numeric(q0)
    rep = central_elements(coproduct(Ln), spec)
    assert abs(rep.scalar_value - Ln.lam0 ** 2) < 1e-9
    assert rep.equality_residual < 1e-9 and rep.centrality_residual < 1e-9


def test_coproduct_exact_central_value(o3):
    spec, L, _ = o3
    rep = central_elements(coproduct(L), spec)
    lam = LambdaExt.generator(spec.T)
    assert rep.scalar_value == lam * lam
    assert rep.equality_residual == 0.0


def test_second_coproduct_central_value(o3):
    spec, L, _ = o3
    Ln = L.numeric(1.3)
    D2 = coproduct(Ln, depth=2)
    assert D2.d == 81
    members = central_elements(D2, spec).members
    target = Ln.lam0 ** 4 * np.eye(81)
    assert max(float(np.abs(m - target).max()) for m in members) < 1e-9


def test_coproduct_cap(o3):
    _, L, _ = o3
    with pytest.raises(ValueError):
        coproduct(L, depth=3)


@pytest.mark.invariant
@given(st.floats(0.3, 3.0))
def test_group_like(q0):
    spec = make_spec("ohat", 3)
    L = fundamental_L(spec, "plus").numeric(q0)
    assert group_like_residual(spec, L) < 1e-9 * max(1.0, abs(L.lam0) ** 2)


def test_group_like_exact(o3):
    spec, L, _ = o3
    assert group_like_residual(spec, L) == 0.0


def test_f_symmetry(o3):
    spec, L, _ = o3
    assert f_symmetry_residual(spec, L) == 0.0
    D = coproduct(L)
    assert f_symmetry_residual(spec, D) == 0.0
    assert (f_map(D[1, 1]) - D[1, 1]).is_zero()


def test_decompose_ab_fundamental(o3):
    spec, Lp, Lm = o3
    A, B = decompose_AB(Lp, Lm)
    one = LaurentPoly.const(1)
    assert A[0][0] == ExactMatrix((3, 3), {(0, 0): one})
    assert B[0][0] == ExactMatrix((3, 3), {(2, 2): one})
    assert reduced_commutation_residual(spec, A, B) == 0.0


def test_decompose_ab_numeric_matches_exact(o3):
    spec, Lp, Lm = o3
    q0 = 1.8
    Ln = Lp.numeric(q0)
    A, B = decompose_AB(Ln, Lm.numeric(q0))
    Ae, Be = decompose_AB(Lp, Lm)
    s0 = math.sqrt(q0)
    for i in range(3):
        for j in range(3):
            assert np.abs(A[i][j] - Ae[i][j].to_numpy(s0)).max() < 1e-12
            assert np.abs(B[i][j] - Be[i][j].to_numpy(s0)).max() < 1e-12
    assert reduced_commutation_residual(spec, A, B) < 1e-12


@pytest.mark.parametrize("fam, N", SPECS)
def test_mixed_rows(fam, N):
    spec = make_spec(fam, N)
    Lp, Lm = fundamental_L(spec, "plus"), fundamental_L(spec, "minus")
    assert mixed_row_relation_residual(spec, Lp, Lm) == 0.0


def test_reference_mixed_instances(o3):
    _, Lp, Lm = o3
    r = o3_mixed_instances(Lp, Lm)
    assert r["central_type"] == 0.0
    assert r["chain_b=c"] == 0.0 and r["chain_c=d"] == 0.0
    assert r["first_corrected"] == 0.0
    # the reference first equality has its middle product in the other order and does not hold
    assert r["first_swapped"] > 0


def test_mixed_instances_need_n3():
    spec = make_spec("ohat", 4)
    with pytest.raises(UnsupportedSpec):
        o3_mixed_instances(fundamental_L(spec, "plus"), fundamental_L(spec, "minus"))


def test_conjugator_at_q1(o3):
    spec, _, _ = o3
    rep = conjugate_sumLii(spec, 1.0)
    for c in rep.checks():
        assert c.passed, c.line()
    assert rep.offdiag_outside_nonempty
    C = o3_conjugator(1.0)
    assert np.abs(C @ C.T - np.eye(9)).max() < 1e-10


@pytest.mark.invariant
@given(st.floats(0.2, 5.0))
def test_conjugator_any_q(q0):
    spec = make_spec("ohat", 3)
    rep = conjugate_sumLii(spec, q0)
    for c in rep.checks():
        assert c.passed, c.line()


def test_conjugate_eigenvalues_q1(o3):
    spec, L, _ = o3
    Ln = L.numeric(1.0)
    D = coproduct(Ln)
    ev = np.sort(np.linalg.eigvals(sum_diagonal(D)).real)
    want = np.sort(Ln.lam0.real * np.array([-3, 3, 3, -3, 3, 3, -3, -3, -3]))
    assert np.abs(ev - want).max() < 1e-9


def test_conjugation_needs_ohat3():
    with pytest.raises(UnsupportedSpec):
        conjugate_sumLii(make_spec("ohat", 4), 1.0)


def test_spectral_operator_limits(o3):
    spec, Lp, Lm = o3
    q0 = 2.0
    lp, lm = Lp.numeric(q0), Lm.numeric(q0)
    far = spectral_L(spec, 25.0, q0)
    for i in range(3):
        for j in range(3):
            assert np.abs(far[i, j] - lp[i, j]).max() < 1e-9
    e = math.exp(-math.log(-lp.lam0.real))   # e^eta
    zero = spectral_L(spec, 0.0, q0)
    for i in range(3):
        for j in range(3):
            want = (e * lp[i, j] - lm[i, j] / e) / (e - 1 / e)
            assert np.abs(zero[i, j] - want).max() < 1e-12


def test_spectral_rll(o3):
    spec, _, _ = o3
    assert spectral_rll_residual(spec, 0.4, -0.3, 2.0) < 1e-9


@pytest.mark.invariant
@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.5, 2.5))
def test_spectral_rll_random(t1, t2, q0):
    spec = make_spec("ohat", 3)
    try:
        r = spectral_rll_residual(spec, t1, t2, q0)
    except PoleAtTheta:
        return
    assert r < 1e-8
