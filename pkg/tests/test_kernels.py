import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ubrep import (ParameterError, ball_enumerate, ball_overlap_kernel, compression_probe,
                   default_embedding, full_ball, gaussian_kernel, gram_random_kernel, parse_group,
                   psd_check, tree_ray_kernel)
from ubrep.embeddings import edge_embedding, identity_embedding
from ubrep.kernels import ray_bound_violations, tree_ray


def _set_overlap_oracle(group, elements, R):
    """|B(g,R) & B(h,R)| / |B(e,R)| with balls built by filtering a larger ball."""
    big = ball_enumerate(group, max(group.length(x) for x in elements) + R).elements
    balls = [frozenset(y for y in big if group.distance(x, y) <= R) for x in elements]
    size = len(balls[0])
    return np.array([[len(a & b) / size for b in balls] for a in balls])


def test_ball_overlap_examples(z1):
    ball = ball_enumerate(z1, 4)
    K = ball_overlap_kernel(ball, 1)
    i = ball.index
    assert K.values[i[(0,)], i[(1,)]] == pytest.approx(2 / 3, abs=1e-15)
    assert K.values[i[(0,)], i[(3,)]] == 0.0
    assert np.all(np.diag(K.values) == 1.0)
    assert K.support == 3


@pytest.mark.parametrize("spec, radius, R", [("z:1", 5, 2), ("z:2", 3, 2), ("free:2", 2, 1),
                                             ("torus:6,2", 6, 2), ("sym:4", 6, 1)])
def test_ball_overlap_matches_set_oracle(spec, radius, R):
    g = parse_group(spec)
    ball = ball_enumerate(g, radius)
    K = ball_overlap_kernel(ball, R)
    np.testing.assert_allclose(K.values, _set_overlap_oracle(g, ball.elements, R), atol=1e-15)


def _greedy_ray(group, x, n, far=40):
    """Ray toward a^inf using only the metric: step to the neighbour closer to a^far."""
    target = (1,) * far
    ray = [x]
    while len(ray) < n:
        v = ray[-1]
        nxt = [v2 for v2 in (group.multiply(v, s) for s in group.generators())
               if group.distance(v2, target) == group.distance(v, target) - 1]
        assert len(nxt) == 1
        ray.append(nxt[0])
    return ray


def test_tree_ray_examples(f2):
    ball = ball_enumerate(f2, 3)
    K = tree_ray_kernel(ball, 3)
    i = ball.index
    assert tree_ray(f2, (), 3) == [(), (1,), (1, 1)]
    assert tree_ray(f2, (2,), 3) == [(2,), (), (1,)]
    assert K.values[i[()], i[(2,)]] == pytest.approx(2 / 3, abs=1e-15)
    assert K.values[i[()], i[(1,)]] == pytest.approx(2 / 3, abs=1e-15)
    assert np.all(np.diag(K.values) == 1.0)


def test_tree_ray_matches_greedy_oracle(f2):
    for x in ball_enumerate(f2, 3).elements:
        assert tree_ray(f2, x, 5) == _greedy_ray(f2, x, 5)


def test_tree_ray_bound_and_support(f2):
    ball = ball_enumerate(f2, 4)
    K = tree_ray_kernel(ball, 3)
    assert ray_bound_violations(K) == []
    d = ball.distance_matrix
    for i, j in zip(*np.nonzero(K.values)):
        assert 1 - Fraction(int(K.counts[i, j]), 3) <= Fraction(int(d[i, j]), 3)
    assert len(K.support_violations()) == 0
    assert not K.is_invariant()


def test_gaussian_examples(z1, z2):
    b1 = ball_enumerate(z1, 2)
    K = gaussian_kernel(b1, identity_embedding(z1), math.log(2))
    assert K.values[b1.index[(0,)], b1.index[(1,)]] == pytest.approx(0.5, rel=1e-15)
    b2 = ball_enumerate(z2, 2)
    K = gaussian_kernel(b2, identity_embedding(z2), 1.0)
    assert K.values[b2.index[(0, 0)], b2.index[(1, 1)]] == pytest.approx(math.exp(-2), rel=1e-15)
    K = gaussian_kernel(b2, identity_embedding(z2), 1e-12)
    assert np.all(K.values > 1 - 1e-10)
    assert math.isinf(K.support)
    with pytest.raises(ParameterError):
        gaussian_kernel(b2, identity_embedding(z2), 0.0)


def test_gaussian_decreases_in_alpha(f2_ball4, f2):
    emb = edge_embedding(f2)
    prev = None
    for a in (0.01, 0.1, 1.0, 3.0):
        vals = gaussian_kernel(f2_ball4, emb, a).values
        if prev is not None:
            off = ~np.eye(len(vals), dtype=bool)
            assert np.all(vals[off] < prev[off])
        prev = vals


def test_gram_random_properties(c24_ball):
    for seed in range(5):
        K = gram_random_kernel(c24_ball, 2, seed)
        assert np.all(np.diag(K.values) == 1.0)
        assert psd_check(K).min_eigenvalue >= -1e-10
        assert len(K.support_violations()) == 0
        assert K.support == 5
    a = gram_random_kernel(c24_ball, 2, 7).values
    b = gram_random_kernel(c24_ball, 2, 7).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, gram_random_kernel(c24_ball, 2, 8).values)


def test_invariance_witnesses(torus16_ball, c24_ball):
    assert ball_overlap_kernel(torus16_ball, 3).is_invariant()
    assert not gram_random_kernel(c24_ball, 2, 1).is_invariant()


@pytest.mark.parametrize("matrix, lo, ok", [
    (np.eye(4), 1.0, True),
    (np.ones((3, 3)), 0.0, True),
    (np.array([[1.0, 2.0], [2.0, 1.0]]), -1.0, False),
])
def test_psd_check_examples(matrix, lo, ok):
    res = psd_check(matrix)
    assert res.min_eigenvalue == pytest.approx(lo, abs=1e-12)
    assert res.passed is ok


def test_psd_tolerance_scales_with_row_sum():
    res = psd_check(np.ones((10, 10)))
    assert res.tolerance == pytest.approx(1e-7)


def test_compression_probe_free_edge(f2):
    ball = ball_enumerate(f2, 3)
    rep = compression_probe(ball, edge_embedding(f2))
    assert rep.ok
    np.testing.assert_allclose(rep.min_envelope, np.sqrt(rep.distances), atol=1e-12)
    np.testing.assert_allclose(rep.max_envelope, np.sqrt(rep.distances), atol=1e-12)
    assert rep.fitted_exponent == pytest.approx(0.5, abs=1e-9)
    assert rep.exceeds_half is False
    assert rep.distances[0] == 0 and rep.min_envelope[0] == 0 and rep.max_envelope[0] == 0


def test_compression_probe_lattice(z2):
    ball = ball_enumerate(z2, 4)
    rep = compression_probe(ball, identity_embedding(z2))
    assert rep.ok
    for t, lo, hi in zip(rep.distances, rep.min_envelope, rep.max_envelope):
        assert hi == pytest.approx(t, abs=1e-12)
        if t % 2 == 0:
            assert lo == pytest.approx(t / math.sqrt(2), abs=1e-12)
        else:
            assert lo >= t / math.sqrt(2)
    assert rep.exceeds_half


def test_compression_probe_flags_violation(z2):
    import dataclasses
    ball = ball_enumerate(z2, 2)
    emb = dataclasses.replace(identity_embedding(z2), rho_minus=lambda t: float(t))
    rep = compression_probe(ball, emb)
    assert not rep.ok
    assert rep.violations[0]["modulus"] == "rho_minus"


@pytest.mark.parametrize("spec", ["z:2", "free:2", "torus:5,2", "sym:4"])
def test_default_embeddings_respect_moduli(spec):
    g = parse_group(spec)
    ball = full_ball(g) if g.is_finite else ball_enumerate(g, 3)
    emb = default_embedding(g)
    assert np.all(emb.coords([g.identity()]) == 0) if not hasattr(emb.coords([g.identity()]), "nnz") \
        else emb.coords([g.identity()]).nnz == 0
    assert compression_probe(ball, emb).ok


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(1e-3, 5.0), spec=st.sampled_from(["z:2", "free:2", "torus:6,2", "sym:4"]))
def test_gaussian_is_psd(alpha, spec):
    g = parse_group(spec)
    ball = full_ball(g) if g.is_finite else ball_enumerate(g, 3)
    K = gaussian_kernel(ball, default_embedding(g), alpha)
    assert psd_check(K).passed
