import numpy as np
import pytest

from ubrep import (CompositionError, ModeError, ParameterError, ball_enumerate, ball_overlap_kernel,
                   build_T, cocycle_build, cocycle_identity_check, full_ball, gram_random_kernel,
                   norm_growth_profile, parse_group)
from ubrep.cocycle import default_epsilons, displacement_norm_sq, min_is_monotone
from ubrep.kernels import Kernel
from ubrep.renorm import rep_norm_infimum, sup_rep_norm


@pytest.fixture(scope="module")
def model(c24_ball):
    K = gram_random_kernel(c24_ball, 2, 1)
    return cocycle_build([(e, build_T(K, e)) for e in default_epsilons(5)])


def test_b_e_vanishes(model):
    e = model.ball.index[model.ball.group.identity()]
    assert model.norm_sq[e] == 0.0
    assert all(np.all(v == 0.0) for v in model.vector(model.ball.group.identity()))


def test_single_summand_half_coefficient(c24_ball):
    vals = np.eye(24)
    # c(e, g) = 0.5 after T = (K + eps)/(1 + eps) with eps = 1 and K(e, g) = 1
    vals[0, 1] = vals[1, 0] = 1.0
    K = Kernel(c24_ball, vals, 25, "test", {})
    m = cocycle_build([(1.0, build_T(K, 1.0))])
    assert m.norm_sq[1] == pytest.approx(1.0, abs=1e-15)


def test_two_identical_summands_double(c24_ball):
    K = gram_random_kernel(c24_ball, 2, 2)
    one = cocycle_build([(0.5, build_T(K, 0.5))], exact_norms=False)
    row = one.spaces[0].T[0, :]
    np.testing.assert_array_equal(displacement_norm_sq([row, row]), 2 * one.norm_sq)


def test_epsilon_sequence_validated(c24_ball):
    K = gram_random_kernel(c24_ball, 2, 2)
    with pytest.raises(ParameterError):
        cocycle_build([(0.1, build_T(K, 0.1)), (0.2, build_T(K, 0.2))])
    with pytest.raises(ParameterError):
        cocycle_build([])


def test_mismatched_groups(c24_ball, torus16_ball):
    a = build_T(gram_random_kernel(c24_ball, 2, 2), 0.5)
    b = build_T(ball_overlap_kernel(torus16_ball, 2), 0.25)
    with pytest.raises(CompositionError):
        cocycle_build([(0.5, a), (0.25, b)])


def test_identity_residual(model):
    assert cocycle_identity_check(model, pairs=100, seed=0) <= 1e-9


def test_norm_two_ways(model):
    for g, sq in zip(model.ball.elements, model.norm_sq):
        assert model.direct_norm_sq(g) == pytest.approx(sq, abs=1e-10)


def test_uniform_bound(model):
    for s, sup, inf in zip(model.spaces, model.rep_norm_sup, model.rep_norm_inf):
        assert inf == pytest.approx(rep_norm_infimum(s))
        assert abs(sup - inf) <= 1e-6 * sup
    assert model.C_measured == max(model.rep_norm_inf)


def test_profile(model):
    prof = norm_growth_profile(model)
    assert prof[0] == {"length": 0, "min": 0.0, "mean": 0.0, "max": 0.0}
    c1 = model.spaces[0].T[0, :]
    assert np.all(model.norm_sq >= 2 - 2 * c1 - 1e-15)
    assert [p["length"] for p in prof] == list(range(13))
    # far from e every coefficient is zero so every summand contributes 2
    assert prof[-1]["min"] == pytest.approx(np.sqrt(2 * 5))


def test_trivial_summands_profile_zero(model):
    import dataclasses
    ones = np.ones(len(model.ball))
    sq = displacement_norm_sq([ones, ones, ones])
    assert np.all(sq == 0.0)
    prof = norm_growth_profile(dataclasses.replace(model, norm_sq=sq))
    assert all(p["min"] == p["mean"] == p["max"] == 0.0 for p in prof)
    assert min_is_monotone(prof)


def test_windowed_summands_rejected(z1):
    K = ball_overlap_kernel(ball_enumerate(z1, 4), 1)
    m = cocycle_build([(0.5, build_T(K, 0.5)), (0.25, build_T(K, 0.25))])
    assert m.C_measured is None
    with pytest.raises(ModeError):
        cocycle_identity_check(m)
