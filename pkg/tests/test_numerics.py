import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from operp.algebra import ONE, P, Q, TensorElement, tensor
from operp.numerics import (
    HALF_PI,
    DimensionCapError,
    KronSum,
    PointEvaluator,
    RepPoint,
    coassoc_check,
    comult_inequality_probe,
    grid_scan,
    norm_estimate,
    norm_oracles,
    point_norm,
    rep_eval,
    reports_to_csv,
    seminorm_sequence,
    spectral_norm,
)
from operp.polynomials import StarPolynomial, parse_polynomial, poly_eval, random_polynomial
from strategies import tensors

COMM = P * Q - Q * P
angles = st.floats(0, HALF_PI, allow_nan=False)


def test_rep_point_clamps():
    assert RepPoint((-1.0, 3.0)).theta == (0.0, HALF_PI)
    assert RepPoint((0.2,)).lift(2).theta == (0.2, 0.0, 0.0)


def test_rep_eval_examples():
    t = 0.3
    c, s = math.cos(t), math.sin(t)
    np.testing.assert_allclose(rep_eval(TensorElement.from_algebra(COMM), (t,)), [[0, c * s], [-c * s, 0]],
                               atol=1e-15)
    np.testing.assert_array_equal(rep_eval(TensorElement.unit(2), (0.1, 0.7)), np.eye(4))
    assert spectral_norm(rep_eval(TensorElement.from_algebra(P - Q), (HALF_PI,))) == pytest.approx(1.0)


@given(angles)
def test_p_minus_q_closed_form(t):
    assert spectral_norm(rep_eval(TensorElement.from_algebra(P - Q), (t,))) == pytest.approx(math.sin(t), abs=1e-12)


def test_spectral_norm_examples():
    assert spectral_norm(np.eye(4)) == 1.0
    assert spectral_norm(np.array([[0, 0.5], [-0.5, 0]])) == pytest.approx(0.5, rel=1e-10)
    rot = np.array([[0.6, -0.8], [0.8, 0.6]])
    assert spectral_norm(np.kron(rot, np.array([[0, 1], [1, 0]]))) == pytest.approx(1.0, rel=1e-10)


def test_dimension_cap():
    x = TensorElement.unit(13)
    with pytest.raises(DimensionCapError):
        rep_eval(x, (0.1,) * 13)
    with pytest.raises(DimensionCapError):
        norm_estimate(x)


def test_large_images_use_the_operator_path():
    x = tensor(*([P] * 8)) + tensor(*([COMM] * 8))
    theta = (0.3, 0.5, 0.7, 0.9, 1.1, 0.2, 0.4, 0.6)
    op = rep_eval(x, theta)
    assert isinstance(op, KronSum)
    dense = op.toarray()
    v = np.arange(256.0)
    np.testing.assert_allclose(op.matvec(v), dense @ v, atol=1e-12)
    assert spectral_norm(op) == pytest.approx(np.linalg.norm(dense, 2), rel=1e-9)


@given(tensors(2), tensors(2), st.tuples(angles, angles))
def test_rep_eval_is_a_star_homomorphism(x, y, theta):
    a, b = rep_eval(x, theta), rep_eval(y, theta)
    scale = max(1.0, np.abs(a).sum() * np.abs(b).sum())
    assert np.abs(rep_eval(x * y, theta) - a @ b).max() <= 1e-12 * scale
    assert np.abs(rep_eval(x.adjoint(), theta) - a.T).max() <= 1e-12 * max(1.0, np.abs(a).sum())


@given(st.tuples(angles, angles))
def test_magic_images_are_projections_summing_to_one(M1, theta):
    for i in range(4):
        row = np.zeros((4, 4))
        for j in range(4):
            e = rep_eval(M1.entry(i, j), theta)
            np.testing.assert_allclose(e @ e, e, atol=1e-12)
            row += e
        np.testing.assert_allclose(row, np.eye(4), atol=1e-12)


def test_endpoint_leg_contains_chi11():
    # at θ = 0 the (1,1) corner of a leg is χ11 on that leg
    x = tensor(P * Q * P - Q, P + Q)
    a = rep_eval(x, (0.0, 0.4))
    from operp.algebra import CHI11, char_eval_legs
    y = char_eval_legs(x, {0: CHI11})
    np.testing.assert_allclose(a[:2, :2], rep_eval(y, (0.4,)), atol=1e-15)


def test_norm_oracles():
    e = norm_estimate(TensorElement.from_algebra(COMM))
    assert abs(e.value - 0.5) <= 1e-6
    assert e.argmax.theta[0] == pytest.approx(math.pi / 4, abs=1e-3)
    assert abs(norm_estimate(TensorElement.from_algebra(P * Q * P)).value - 1.0) <= 1e-3
    assert abs(norm_estimate(tensor(P, COMM)).value - 0.5) <= 1e-3
    assert all(r["ok"] for r in norm_oracles())


def test_commutator_of_M1_entries(M1):
    x = poly_eval(parse_polynomial("X11*X22 - X22*X11"), M1)
    assert norm_estimate(x).value == pytest.approx(norm_estimate(tensor(P, COMM)).value, abs=1e-3)


def test_estimate_is_attained_at_its_argmax():
    x = tensor(P * Q + Q, COMM - P)
    e = norm_estimate(x, grid=9, refine=50)
    assert point_norm(x, e.argmax.theta) == e.value
    assert e.value >= e.grid_value - 1e-9


def test_zero_element():
    e = norm_estimate(TensorElement.zero(2), grid=5)
    assert e.value == 0.0


def test_nested_grids_never_decrease():
    x = tensor(P * Q * P - Q * P, Q - P * Q)
    values = [norm_estimate(x, grid=g, refine=0).value for g in (3, 5, 9, 17)]
    assert values == sorted(values)


def test_refinement_never_decreases():
    x = tensor(P * Q * P - Q * P, Q - P * Q)
    values = [norm_estimate(x, grid=5, refine=r).value for r in (0, 10, 100, 400)]
    assert values == sorted(values)


def test_lifted_point_dominates_shorter_element():
    x = tensor(P * Q - Q, COMM)
    theta = (0.3, 0.9)
    y = x.tensor(tensor(ONE, ONE))
    assert PointEvaluator(y)(theta + (0.0, 0.0)) >= PointEvaluator(x)(theta)


def test_seminorm_sequences():
    comm = seminorm_sequence(parse_polynomial("X11*X22 - X22*X11"), 2)
    assert comm[0].value == pytest.approx(0.5, abs=1e-6)
    assert comm[0].value <= comm[1].value
    row = seminorm_sequence(parse_polynomial("X11 + X12 + X13 + X14 - 1"), 2)
    assert [e.value for e in row] == [0.0, 0.0]
    single = seminorm_sequence(StarPolynomial.var(0, 0), 2, grid=5)
    assert single[0].value <= single[1].value


@pytest.mark.parametrize("seed", range(5))
def test_random_sequences_are_monotone(seed):
    Pn = random_polynomial(random.Random(seed), 4, 2)
    es = seminorm_sequence(Pn, 2, grid=5, refine=40)
    assert es[0].value <= es[1].value


def test_coassoc_check():
    assert coassoc_check(StarPolynomial.var(0, 0), 1)
    assert coassoc_check(StarPolynomial.const(1), 1)
    assert coassoc_check(random_polynomial(random.Random(3), 4, 3), 1)


def test_comult_probe():
    pr = comult_inequality_probe(StarPolynomial.var(0, 0), 1, grid=5, refine=20)
    assert pr.increasing
    one = comult_inequality_probe(StarPolynomial.const(1), 1, grid=3, refine=0)
    assert one.lhs.value == one.rhs.value == 1.0


def test_comult_probe_on_a_certificate():
    # vanishes at level 1 but not at level 2
    pr = comult_inequality_probe(parse_polynomial("X11 + X13 + X21 + X23 - 1"), 1, grid=5, refine=20)
    assert pr.lhs.value == 0.0 < pr.rhs.value


def test_reports_and_csv(tmp_path):
    e = norm_estimate(TensorElement.from_algebra(COMM), grid=5, refine=10)
    rep = e.to_json("comm")
    assert set(rep) == {"element_id", "k", "grid", "refine", "value", "argmax_theta", "wall_ms"}
    text = reports_to_csv([rep], tmp_path / "t.csv")
    assert text.splitlines()[0] == "element_id,k,grid,refine,value,argmax_theta,wall_ms"
    assert (tmp_path / "t.csv").read_text() == text


def test_grid_scan_includes_endpoints():
    best, theta, values = grid_scan(TensorElement.from_algebra(P * Q * P), 2)
    assert best == 1.0 and theta == (0.0,) and len(values) == 2
