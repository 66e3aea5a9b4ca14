import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hatbraid.braidgen import make_spec
from hatbraid.errors import DimensionMismatch, NegativeParameter, NoRealEta, RelationViolated
from hatbraid.ncspace import (
    CoordSet,
    base_cone_solution,
    block_support,
    check_coordinate_relation,
    exact_base_solution,
    frame_commutators,
    frame_line_mismatches,
    frame_resubstitution_residual,
    is_cross_shaped,
    o3_reference_frame_table,
    row_residuals,
    soq3_base,
    soq3_relations,
    soq3_relations_reversed,
    soq3_tower_step,
    tower,
    tower_step,
    xi_base_nullity,
    xi_relation_table,
)
from hatbraid.scalar import lambda_numeric_roots

TOWER_SPECS = [("ohat", 3, 3), ("ohat", 4, 2), ("phat", 4, 2), ("ohat", 5, 2)]


def scalars(c):
    return [complex(np.asarray(v)[0, 0]) for v in c.coords]


def test_base_cone_examples():
    x = scalars(base_cone_solution(1, 1))
    assert np.allclose(x, [1, math.sqrt(2), -1])
    x = scalars(base_cone_solution(1, 1, sign=-1))
    assert np.allclose(x, [1, -math.sqrt(2), -1])
    assert np.allclose(scalars(base_cone_solution(0, 5)), [0, 0, -5])
    x = scalars(base_cone_solution(2, 3, q0=4.0))
    assert abs(x[1] - math.sqrt(15)) < 1e-12
    # the mirrored branch, x1 = -a and x3 = b
    assert np.allclose(scalars(base_cone_solution(2, 3, q0=4.0, mirror=True)), [-2, math.sqrt(15), 3])


def test_base_cone_rejects_negative_input():
    with pytest.raises(NegativeParameter):
        base_cone_solution(-1, 1)
    with pytest.raises(NegativeParameter):
        base_cone_solution(1, 1, q0=-2.0)


@pytest.mark.invariant
@given(st.floats(0, 5), st.floats(0, 5), st.sampled_from([1, -1]), st.floats(0.2, 5), st.booleans())
def test_base_cone_on_surface(a, b, sign, q0, mirror):
    spec = make_spec("ohat", 3)
    c = base_cone_solution(a, b, sign, q0, mirror=mirror)
    x1, x2, x3 = (v.real for v in scalars(c))
    s = math.sqrt(q0)
    assert abs(x1 * x3 / s + x2 * x2 + s * x3 * x1) <= 1e-12 * max(1.0, a * b * (s + 1 / s))
    assert check_coordinate_relation(spec, c, q0).passed


@pytest.mark.parametrize("fam, N", [("ohat", 4), ("phat", 4), ("ohat", 5), ("phat", 6)])
def test_base_cone_other_specs(fam, N):
    spec = make_spec(fam, N)
    for q0 in (1.0, 1.7):
        assert check_coordinate_relation(spec, base_cone_solution(1.5, 0.8, q0=q0, spec=spec), q0).passed


def test_random_matrices_violate_relation(rng):
    spec = make_spec("ohat", 3)
    c = CoordSet(1, tuple(rng.normal(size=(3, 3)) for _ in range(3)))
    assert check_coordinate_relation(spec, c, 1.5).residual > 1e-3


def test_relation_input_validation():
    spec = make_spec("ohat", 3)
    with pytest.raises(DimensionMismatch):
        check_coordinate_relation(spec, CoordSet(0, (np.eye(2),) * 2), 1.0)
    with pytest.raises(DimensionMismatch):
        check_coordinate_relation(spec, CoordSet(0, (np.eye(2), np.eye(2), np.eye(3))), 1.0)
    with pytest.raises(RelationViolated):
        tower_step(spec, CoordSet(0, tuple(np.array([[v]]) for v in (1.0, 1.0, 1.0))), 1.0)


@pytest.mark.invariant
@pytest.mark.parametrize("fam, N, levels", TOWER_SPECS)
def test_single_relation_implies_every_row(fam, N, levels):
    spec = make_spec(fam, N)
    for level in tower(spec, base_cone_solution(1.2, 0.7, q0=1.6, spec=spec), levels, 1.6):
        assert max(row_residuals(spec, level, 1.6)) < 1e-8


@pytest.mark.invariant
@pytest.mark.parametrize("fam, N, levels", TOWER_SPECS)
@pytest.mark.parametrize("lambda_choice", [1, -1])
@pytest.mark.parametrize("t_sign", [1, -1])
def test_tower_soundness(fam, N, levels, lambda_choice, t_sign):
    spec = make_spec(fam, N)
    for q0 in (1.0, 2.3):
        base = base_cone_solution(1.0, 2.0, q0=q0, spec=spec)
        chain = tower(spec, base, levels, q0, lambda_choice, t_sign)
        assert [c.dim for c in chain] == [N ** k for k in range(levels + 1)]
        for c in chain:
            assert check_coordinate_relation(spec, c, q0).passed


@pytest.mark.invariant
@pytest.mark.parametrize("fam, N, levels", TOWER_SPECS)
def test_tower_cross_shape_and_singularity(fam, N, levels):
    spec = make_spec(fam, N)
    chain = tower(spec, base_cone_solution(1.0, 1.0, q0=1.4, spec=spec), levels, 1.4)
    for c in chain[1:]:
        for x in c.coords:
            assert is_cross_shaped(block_support(x, N))
            assert abs(np.linalg.det(x)) < 1e-10


def test_cross_shape_detector():
    assert is_cross_shaped(np.array([[1, 0, 0], [1, 1, 1], [1, 0, 0]], dtype=bool))
    assert not is_cross_shaped(np.eye(3, dtype=bool))


@pytest.mark.parametrize("q0", [1.0, 2.0, 0.5])
def test_ohat3_level_one_blocks(q0):
    spec = make_spec("ohat", 3)
    base = base_cone_solution(1.0, 2.0, q0=q0)
    x1, x2, x3 = scalars(base)
    s = math.sqrt(q0)
    lam = lambda_numeric_roots(spec.T_at(q0)).plus
    reference = [
        [[x1, 0, 0], [x2, 0, 0], [(1 + q0 * lam) * x3, s * lam * x2, lam * x1]],
        [[0, x1, 0], [s * lam * x3, (1 + lam) * x2, lam * x1 / s], [0, x3, 0]],
        [[lam * x3, lam * x2 / s, (1 + lam / q0) * x1], [0, 0, x2], [0, 0, x3]],
    ]
    got = tower_step(spec, base, q0)
    for g, p in zip(got.coords, reference):
        assert np.abs(g - np.array(p)).max() < 1e-12


def _ohat4_reference(y, q0, lam):
    x1, x2, x3, x4 = y
    q = q0
    X1 = np.zeros((4, 4), complex)
    X1[:3, 0] = [x1, x2, x3]
    X1[3] = [(1 + lam) * x4, lam * x3 / q, lam * x2 / q, lam * x1 / q ** 2]
    X2 = np.zeros((4, 4), complex)
    X2[:, 1] = [x1, x2, 0, x4]
    X2[2] = [q * lam * x4, (1 + lam) * x3, lam * x2, lam * x1 / q]
    X3 = np.zeros((4, 4), complex)
    X3[:, 2] = [x1, 0, x3, x4]
    X3[1] = [q * lam * x4, lam * x3, (1 + lam) * x2, lam * x1 / q]
    X4 = np.zeros((4, 4), complex)
    X4[1:, 3] = [x2, x3, x4]
    X4[0] = [q * q * lam * x4, q * lam * x3, q * lam * x2, (1 + lam) * x1]
    return X1, X2, X3, X4


@pytest.mark.parametrize("q0", [1.0, 2.0, 0.6])
def test_ohat4_middle_blocks(q0):
    spec = make_spec("ohat", 4)
    base = base_cone_solution(1.0, 2.0, q0=q0, spec=spec)
    lam = lambda_numeric_roots(spec.T_at(q0)).plus
    reference = _ohat4_reference(scalars(base), q0, lam)
    got = tower_step(spec, base, q0)
    for k in (1, 2):
        assert np.abs(got[k] - reference[k]).max() < 1e-12


def test_ohat4_outer_blocks_only_at_q1():
    spec = make_spec("ohat", 4)
    base = base_cone_solution(1.0, 2.0, q0=1.0, spec=spec)
    lam = lambda_numeric_roots(spec.T_at(1.0)).plus
    reference = _ohat4_reference(scalars(base), 1.0, lam)
    got = tower_step(spec, base, 1.0)
    assert np.abs(got[3][0] - reference[3][0]).max() < 1e-12
    assert np.abs(got[0] - reference[0]).max() < 1e-12

    # away from q = 1 the hand-written outer blocks break the relation
    q0 = 2.0
    base = base_cone_solution(1.0, 2.0, q0=q0, spec=spec)
    lam = lambda_numeric_roots(spec.T_at(q0)).plus
    reference = _ohat4_reference(scalars(base), q0, lam)
    assert not check_coordinate_relation(spec, CoordSet(1, reference), q0).passed
    y = scalars(base)
    got = tower_step(spec, base, q0)
    want_top = [lam * y[3], lam * y[2] / q0, lam * y[1] / q0, (1 + lam / q0 ** 2) * y[0]]
    assert np.abs(got[3][0] - want_top).max() < 1e-12


def test_exact_level_one():
    spec = make_spec("ohat", 3)
    base = exact_base_solution()
    c = check_coordinate_relation(spec, base)
    assert c.exact and c.residual == 0.0
    one = tower_step(spec, base)
    assert one.exact and one.dim == 3
    c = check_coordinate_relation(spec, one)
    assert c.exact and c.residual == 0.0
    two = tower_step(spec, one)
    assert check_coordinate_relation(spec, two).residual == 0.0
    # numeric evaluation agrees with the numeric tower from the same base point
    q0 = 1.8
    s0 = math.sqrt(q0)
    nb = CoordSet(0, tuple(np.array([[x.to_numpy(s0)[0, 0]]]) for x in base.coords))
    num = tower_step(spec, nb, q0)
    lam0 = lambda_numeric_roots(spec.T_at(q0)).plus
    for e, n in zip(one.coords, num.coords):
        assert np.abs(e.to_numpy(s0, lam0) - n).max() < 1e-12


def test_exact_base_only_for_ohat3():
    with pytest.raises(ValueError):
        exact_base_solution(make_spec("ohat", 4))


# x-xi and xi-xi tables

def _ohat3_pi_weights(q0):
    s = math.sqrt(q0)
    return {0: 1 / s, 1: 1.0, 2: s}


@pytest.mark.parametrize("q0", [1.0, 1.7, 0.4])
def test_ohat3_x_xi_lines(q0):
    spec = make_spec("ohat", 3)
    tab = xi_relation_table(spec, q0)
    D = tab.tensor("x_xi")
    e = tab.exp_eta
    w = _ohat3_pi_weights(q0)
    for i in range(3):
        for j in range(3):
            want = np.zeros((3, 3), complex)
            want[i, j] += e * e
            if i + j == 2:
                # x_i xi_i' carries -e^eta times (weight of the pair) Pi
                for k in range(3):
                    want[k, 2 - k] -= e * w[i] * w[k]
            assert np.abs(D[i, j] - want).max() < 1e-12, (i, j)


def test_x2_xi2_line():
    tab = xi_relation_table(make_spec("ohat", 3), 2.0)
    D = tab.tensor("x_xi")[1, 1]
    e, s = tab.exp_eta, math.sqrt(2.0)
    assert abs(D[1, 1] - (e * e - e)) < 1e-12
    assert abs(D[0, 2] + e / s) < 1e-12 and abs(D[2, 0] + e * s) < 1e-12


@pytest.mark.parametrize("q0", [1.0, 1.7])
def test_ohat3_xi_xi_lines(q0):
    spec = make_spec("ohat", 3)
    X = xi_relation_table(spec, q0).tensor("xi_xi")
    y = q0 + 1 + 1 / q0
    w = _ohat3_pi_weights(q0)
    pi_prime = np.zeros((3, 3))
    for k in range(3):
        pi_prime[k, 2 - k] = w[k]
    assert np.abs(X[1, 1] - pi_prime / y).max() < 1e-12
    assert np.abs(X[0, 2] - pi_prime / (y * math.sqrt(q0))).max() < 1e-12
    assert np.abs(X[2, 0] - pi_prime * math.sqrt(q0) / y).max() < 1e-12
    # the weighted sum of the three lines is Pi' itself
    total = sum(w[k] * X[k, 2 - k] for k in range(3))
    assert np.abs(total - pi_prime).max() < 1e-12


@pytest.mark.parametrize("fam, N", [("ohat", 3), ("ohat", 4), ("phat", 4)])
def test_xi_products_vanish_off_the_pair(fam, N):
    X = xi_relation_table(make_spec(fam, N), 1.3).tensor("xi_xi")
    for i in range(N):
        for j in range(N):
            if i + j != N - 1:
                assert np.abs(X[i, j]).max() == 0
    # the table is idempotent on pairs
    M = X.reshape(N * N, N * N)
    assert np.abs(M @ M - M).max() < 1e-12


def test_second_prescription_shape():
    tab = xi_relation_table(make_spec("ohat", 3), 1.3, prescription=2)
    assert set(tab.sections) == {"x_xi", "x_x"}
    with pytest.raises(ValueError):
        xi_relation_table(make_spec("ohat", 3), 1.3, prescription=3)


def test_xi_table_needs_real_eta():
    with pytest.raises(NoRealEta):
        xi_relation_table(make_spec("ohat", 3), np.exp(1.5j))


@pytest.mark.invariant
@given(st.floats(0, 4), st.floats(0.05, 4), st.sampled_from([1, -1]), st.floats(0.3, 3.0))
def test_no_scalar_xi_on_the_base(a, b, sign, q0):
    spec = make_spec("ohat", 3)
    c = base_cone_solution(a, b, sign, q0)
    assert xi_base_nullity(spec, c, q0) == 0


def test_relation_table_lines():
    lines = xi_relation_table(make_spec("ohat", 3), 1.0).lines("xi_xi")
    assert len(lines) == 9
    assert lines[1] == "xi1 xi2 = 0"


# frames

@pytest.mark.parametrize("q0", [1.0, 2.0, 0.5])
def test_frame_reference_offdiagonal_examples(q0):
    tab = frame_commutators(make_spec("ohat", 3), q0)
    C = tab.tensor("x_theta")
    e, s = tab.exp_eta, math.sqrt(q0)
    want = np.zeros((3, 3), complex)
    want[2, 1] = -s / e
    assert np.abs(C[0, 1] - want).max() < 1e-12
    want = np.zeros((3, 3), complex)
    want[0, 2] = -1 / e
    assert np.abs(C[2, 0] - want).max() < 1e-12


def test_frame_table_matches_reference_at_q1():
    tab = frame_commutators(make_spec("ohat", 3), 1.0)
    ref = o3_reference_frame_table(1.0, tab.exp_eta)
    assert frame_line_mismatches(tab.tensor("x_theta"), ref) == []


@pytest.mark.parametrize("q0", [2.0, 0.5])
def test_frame_diagonal_carries_q_factor(q0):
    tab = frame_commutators(make_spec("ohat", 3), q0)
    C = tab.tensor("x_theta")
    e = tab.exp_eta
    ref = o3_reference_frame_table(q0, e)
    bad = frame_line_mismatches(C, ref)
    assert [(i, j) for i, j, _ in bad] == [(0, 0), (2, 2)]
    # x1 theta1 = e^(-2 eta) tau - e^(-eta) q theta3 x3, and the mirror with q^-1
    for i, f in ((0, q0), (2, 1 / q0), (1, 1.0)):
        want = np.eye(3, dtype=complex) / (e * e)
        want[2 - i, 2 - i] -= f / e
        assert np.abs(C[i, i] - want).max() < 1e-12


@pytest.mark.invariant
@given(st.floats(0.2, 5.0))
def test_frame_commutes_with_coordinates(q0):
    for fam, N in (("ohat", 3), ("ohat", 4), ("phat", 4)):
        assert frame_resubstitution_residual(make_spec(fam, N), q0) < 1e-9


# SO_q(3)

def test_soq3_base_satisfies_relations():
    assert max(soq3_relations(soq3_base(1.3, -0.4), 2.0)) == 0


@pytest.mark.invariant
@settings(max_examples=30)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.3, 3.0))
def test_soq3_tower_preserves_relations(x1, x3, q0):
    c = soq3_base(x1, x3)
    for _ in range(3):
        c = soq3_tower_step(c, q0)
        scale = max(1.0, max(float(np.abs(v).max()) for v in c.coords) ** 2)
        assert max(soq3_relations(c, q0)) < 1e-9 * scale


def test_soq3_q1_is_trivial_tensoring():
    c = soq3_base(1.3, -0.4)
    n = soq3_tower_step(c, 1.0)
    for a, b in zip(n.coords, c.coords):
        assert np.abs(a - np.kron(np.eye(3), b)).max() == 0


def test_soq3_orientation_of_commutator():
    c = soq3_tower_step(soq3_tower_step(soq3_base(1.3, -0.4), 2.0), 2.0)
    assert max(soq3_relations(c, 2.0)) < 1e-9
    # writing the commutator as x3 x1 - x1 x3 fails away from q = 1
    assert soq3_relations_reversed(c, 2.0) > 1e-3


def test_soq3_rejects_bad_input():
    bad = CoordSet(0, tuple(np.array([[v]]) for v in (1.0, 1.0, 1.0)))
    with pytest.raises(RelationViolated):
        soq3_tower_step(bad, 2.0)
