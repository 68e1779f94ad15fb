import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sparsegibbs.basis import make_basis
from sparsegibbs.core import (SparseParam, TimeSeries, ValidationError, empirical_risk, holdout_risk,
                              lag_windows)
from sparsegibbs.simulate import InnovationSpec, iterate_ar, model_spec, simulate

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def test_timeseries_metadata():
    s = TimeSeries([1.0, -3.0, 2.0])
    assert s.n == 3
    assert s.b_emp == 3.0
    # population variance, divisor n
    assert s.var_emp == pytest.approx(np.mean((np.array([1, -3, 2]) - 0) ** 2))


def test_timeseries_rejects_empty():
    with pytest.raises(ValidationError):
        TimeSeries([])


def test_sparse_param_canonical_form():
    t = SparseParam(5, (3, 1, 4), (2.0, 0.0, -1.0))
    assert t.support == (3, 4)
    assert t.coeffs == (2.0, -1.0)
    assert t.l1 == 3.0
    assert t == SparseParam.from_dense([0, 0, 0, 2.0, -1.0])
    assert t[1] == 0.0 and t[4] == -1.0


@pytest.mark.parametrize("support,coeffs", [((0, 0), (1.0, 2.0)), ((5,), (1.0,)), ((0,), ())])
def test_sparse_param_rejects_bad_input(support, coeffs):
    with pytest.raises(ValidationError):
        SparseParam(5, support, coeffs)


def test_lag_windows_orientation():
    y, w = lag_windows([1, 2, 3, 4, 5], 2)
    assert y.tolist() == [3, 4, 5]
    # most recent first
    assert w.tolist() == [[2, 1], [3, 2], [4, 3]]


def test_constant_series_zero_predictor():
    c = 1.7
    s = TimeSeries(np.full(30, c))
    rep = empirical_risk(s, make_basis("ar_linear", 3), SparseParam.zeros(3), 3)
    assert rep.empirical_risk == pytest.approx(c * c, rel=1e-15)
    assert rep.n_terms == 27


def test_exact_ar1_recursion_has_zero_risk():
    s = iterate_ar([0.5], [1.0], 40)
    theta = SparseParam.from_dense([0.5, 0, 0, 0])
    assert empirical_risk(s, make_basis("ar_linear", 4), theta, 4).empirical_risk == 0.0


def test_hand_arithmetic_example():
    s = TimeSeries([1, 2, 3, 4])
    rep = empirical_risk(s, make_basis("ar_linear", 1), SparseParam.from_dense([1.0]), 1)
    assert rep.empirical_risk == 1.0
    assert rep.n_terms == 3


def test_errors():
    basis = make_basis("ar_linear", 3)
    with pytest.raises(ValidationError):
        empirical_risk(TimeSeries([1, 2, 3]), basis, SparseParam.zeros(3), 3)
    with pytest.raises(ValidationError):
        empirical_risk(TimeSeries(np.ones(10)), basis, SparseParam.zeros(4), 3)


def test_holdout_equals_empirical_on_same_data(align1_uniform, ar20):
    theta = SparseParam.from_dense([0.5, 0.1] + [0.0] * 18)
    assert holdout_risk(theta, ar20, align1_uniform, 20) == empirical_risk(align1_uniform, ar20, theta, 20)


def test_holdout_zero_predictor_is_mean_square(align1_uniform, ar20):
    rep = holdout_risk(SparseParam.zeros(20), ar20, align1_uniform, 20)
    assert rep.empirical_risk == pytest.approx(np.mean(align1_uniform.values[20:] ** 2), rel=1e-14)


def test_holdout_true_parameter_near_noise_variance():
    # Var(U[-a, a]) = a^2 / 3
    test = simulate(model_spec("align1", InnovationSpec("uniform", a=0.70)), 1000, seed=77)
    theta = SparseParam.from_dense([0.5, 0.1] + [0.0] * 18)
    rep = holdout_risk(theta, make_basis("ar_linear", 20), test, 20)
    assert abs(rep.empirical_risk - 0.70 ** 2 / 3) < 0.01


@settings(max_examples=40, deadline=None)
@given(st.lists(finite, min_size=12, max_size=30), st.lists(finite, min_size=4, max_size=4),
       st.permutations(range(4)))
def test_risk_invariant_under_basis_permutation(values, coeffs, perm):
    s = TimeSeries(values)
    basis = make_basis("ar_linear", 4)
    fns = [lambda w, j=j: w[j] for j in range(4)]
    base = make_basis("custom", 4, fns)
    permuted = make_basis("custom", 4, [fns[j] for j in perm])
    theta = SparseParam.from_dense(coeffs)
    theta_perm = SparseParam.from_dense([coeffs[j] for j in perm])
    r0 = empirical_risk(s, basis, theta, 4).empirical_risk
    assert empirical_risk(s, base, theta, 4).empirical_risk == pytest.approx(r0, rel=1e-12, abs=1e-12)
    assert empirical_risk(s, permuted, theta_perm, 4).empirical_risk == pytest.approx(r0, rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(finite, min_size=10, max_size=25), st.lists(finite, min_size=3, max_size=3),
       st.lists(finite, min_size=3, max_size=3), st.floats(0, 1))
def test_risk_is_convex(values, a, b, t):
    s = TimeSeries(values)
    basis = make_basis("ar_linear", 3)
    ta, tb = np.array(a), np.array(b)
    r = lambda v: empirical_risk(s, basis, SparseParam.from_dense(v), 3).empirical_risk
    lhs = r(t * ta + (1 - t) * tb)
    rhs = t * r(ta) + (1 - t) * r(tb)
    assert lhs <= rhs + 1e-9 * (1 + abs(rhs))


@settings(max_examples=30, deadline=None)
@given(st.lists(finite, min_size=8, max_size=20), st.integers(0, 2))
def test_zero_coordinate_does_not_change_risk(values, j):
    s = TimeSeries(values)
    basis = make_basis("ar_linear", 3)
    theta = SparseParam(3, (0,), (0.7,))
    padded = SparseParam(3, tuple({0, j}), tuple(0.7 if i == 0 else 0.0 for i in sorted({0, j})))
    assert padded == theta
    assert empirical_risk(s, basis, padded, 3) == empirical_risk(s, basis, theta, 3)
