import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ubrep import (FreeGroup, ParameterError, ParseError, SizeError, ball_enumerate, full_ball,
                   parse_group, sphere_sizes)

ALL_SPECS = ["z:1", "z:2", "z:3", "free:1", "free:2", "free:3", "torus:5,2", "torus:2,3",
             "cyclic:7", "cyclic:2", "sym:3", "sym:4"]


@pytest.mark.parametrize("spec, radius, size", [("z:2", 2, 13), ("free:2", 2, 17)])
def test_ball_size_examples(spec, radius, size):
    assert len(ball_enumerate(parse_group(spec), radius)) == size


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_radius_zero_is_identity(spec):
    g = parse_group(spec)
    ball = ball_enumerate(g, 0)
    assert ball.elements == (g.identity(),)
    assert ball.distances.tolist() == [0]


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_generators_symmetric(spec):
    g = parse_group(spec)
    gens = g.generators()
    assert g.identity() not in gens
    assert len(set(gens)) == len(gens)
    for s in gens:
        assert g.inverse(s) in gens


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_ball_order_and_stored_distances(spec):
    g = parse_group(spec)
    ball = full_ball(g) if g.is_finite else ball_enumerate(g, 4)
    assert ball.elements[0] == g.identity()
    assert np.all(np.diff(ball.distances) >= 0)
    for r in np.unique(ball.distances):
        layer = [ball.elements[i] for i in np.flatnonzero(ball.distances == r)]
        assert layer == sorted(layer)
    for x, d in zip(ball.elements, ball.distances):
        assert g.distance(g.identity(), x) == d
    assert len(set(ball.elements)) == len(ball)


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_vectorized_distances_match_generic(spec):
    g = parse_group(spec)
    ball = full_ball(g) if g.is_finite else ball_enumerate(g, 3)
    els = list(ball.elements)
    fast = ball.distance_matrix
    slow = np.array([[g.distance(a, b) for b in els] for a in els])
    np.testing.assert_array_equal(fast, slow)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("radius", [0, 1, 2, 3, 4])
def test_free_ball_counts(k, radius):
    expected = 1 + sum(2 * k * (2 * k - 1) ** (r - 1) for r in range(1, radius + 1))
    assert len(ball_enumerate(FreeGroup(k), radius)) == expected


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("radius", range(7))
def test_lattice_bfs_matches_exhaustive(n, radius):
    ball = ball_enumerate(parse_group(f"z:{n}"), radius)
    box = [x for x in itertools.product(range(-radius, radius + 1), repeat=n)
           if sum(map(abs, x)) <= radius]
    assert sorted(ball.elements) == sorted(box)


def test_distance_examples():
    f2 = parse_group("free:2")
    assert f2.distance(f2.parse_element("ab"), f2.parse_element("b")) == 3
    z2 = parse_group("z:2")
    assert z2.distance((0, 0), (2, -1)) == 3
    for spec in ALL_SPECS:
        g = parse_group(spec)
        for x in ball_enumerate(g, 2).elements:
            assert g.distance(x, x) == 0


@pytest.mark.parametrize("spec, radius, expected", [
    ("free:2", 3, [1, 4, 12, 36]),
    ("z:1", 3, [1, 2, 2, 2]),
    ("torus:4,1", 3, [1, 2, 1, 0]),
    ("cyclic:4", 3, [1, 2, 1, 0]),
])
def test_sphere_sizes(spec, radius, expected):
    assert sphere_sizes(parse_group(spec), radius) == expected


def test_sphere_sizes_match_enumeration():
    for spec in ["z:2", "z:3", "free:2", "sym:4", "torus:6,2"]:
        g = parse_group(spec)
        ball = ball_enumerate(g, 4)
        counted = np.bincount(ball.distances, minlength=5).tolist()
        assert sphere_sizes(g, 4) == counted


def test_sym_lengths_are_inversions():
    g = parse_group("sym:5")
    ball = full_ball(g)
    assert len(ball) == 120
    assert ball.radius == 10
    for p, d in zip(ball.elements, ball.distances):
        inv = sum(1 for i, j in itertools.combinations(range(5), 2) if p[i] > p[j])
        assert inv == d


def test_torus_is_locally_lattice():
    t = parse_group("torus:12,2")
    z = parse_group("z:2")
    tb = ball_enumerate(t, 5)
    zb = ball_enumerate(z, 5)
    assert len(tb) == len(zb)
    assert sorted(tuple(x % 12 for x in p) for p in zb.elements) == sorted(tb.elements)


def test_cap_exceeded():
    with pytest.raises(SizeError) as err:
        ball_enumerate(parse_group("free:3"), 12)
    assert err.value.predicted == 1 + sum(6 * 5 ** (r - 1) for r in range(1, 13))
    with pytest.raises(SizeError):
        ball_enumerate(parse_group("z:2"), 10, cap=100)


@pytest.mark.parametrize("bad", ["", "z", "z:", "free:2,3", "torus:4", "sym:9", "foo:2", "z:-1",
                                 "cyclic:1", "z:0"])
def test_parse_group_errors(bad):
    with pytest.raises((ParseError, ParameterError)):
        parse_group(bad)


def test_parse_group_round_trip():
    for spec in ALL_SPECS:
        assert parse_group(spec).spec() == spec


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_element_format_round_trip(spec):
    g = parse_group(spec)
    for x in ball_enumerate(g, 3).elements:
        assert g.parse_element(g.format_element(x)) == x


def test_free_words_reduce():
    f2 = parse_group("free:2")
    a, A, b = (1,), (-1,), (2,)
    assert f2.multiply(a, A) == ()
    assert f2.multiply((1, 2), (-2, -1, 2)) == (2,)
    assert f2.parse_element("abBA") == ()
    assert f2.format_element((1, -2)) == "aB"


@st.composite
def _triples(draw):
    spec = draw(st.sampled_from(["z:2", "free:2", "torus:7,2", "sym:4"]))
    g = parse_group(spec)
    gens = g.generators()

    def word():
        x = g.identity()
        for s in draw(st.lists(st.sampled_from(gens), max_size=8)):
            x = g.multiply(x, s)
        return x

    return g, word(), word(), word()


@settings(max_examples=200, deadline=None)
@given(_triples())
def test_metric_axioms(t):
    g, x, y, z = t
    assert g.distance(x, y) == g.distance(y, x)
    assert g.distance(x, z) <= g.distance(x, y) + g.distance(y, z)
    # left invariance of the word metric
    assert g.distance(g.multiply(z, x), g.multiply(z, y)) == g.distance(x, y)
    assert g.multiply(x, g.inverse(x)) == g.identity()
