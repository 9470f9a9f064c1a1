import json
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lppack.constructions import basis_config
from lppack.lp_core import (
    InvalidInputError,
    PointConfig,
    aggregate_norm,
    as_exponent,
    distance_p,
    norm_p,
    pairwise_distances,
    validate,
)

coords = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
vectors = st.lists(coords, min_size=1, max_size=8)
exponents = st.one_of(
    st.floats(min_value=1.0, max_value=200.0),
    st.sampled_from([1.0, 2.0, 3.0, 64.0, 65.0, math.inf]),
)


@pytest.mark.parametrize(
    "v, p, expected",
    [((3, 4), 2, 5.0), ((1, -1, 0), 1, 2.0), ((1, -2, 3), math.inf, 3.0)],
)
def test_norm_examples(v, p, expected):
    assert norm_p(v, p) == expected


def test_norm_of_empty_and_zero():
    assert norm_p([], 3) == 0.0
    assert norm_p([0, 0], math.inf) == 0.0
    assert norm_p([0.0] * 4, 100.0) == 0.0


def test_norm_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        norm_p([1.0, float("nan")], 2)
    with pytest.raises(InvalidInputError):
        norm_p([math.inf], 1)


@pytest.mark.parametrize("bad", [0.5, 0, -1, "abc", float("nan"), True])
def test_bad_exponents(bad):
    with pytest.raises(InvalidInputError):
        as_exponent(bad)


def test_exponent_strings():
    assert as_exponent("inf") == math.inf
    assert as_exponent("INF") == math.inf
    assert as_exponent("1.5") == 1.5


def test_large_p_matches_direct_formula():
    v = [0.3, -0.9, 0.5]
    for p in (65.0, 100.0, 300.0):
        direct = sum(abs(x) ** p for x in v) ** (1 / p)
        assert norm_p(v, p) == pytest.approx(direct, rel=1e-13)
    # Entries whose p-th powers overflow a double.
    assert norm_p([1e10, 1e10], 100.0) == pytest.approx(1e10 * 2 ** (1 / 100), rel=1e-13)


@pytest.mark.parametrize(
    "u, v, p, expected",
    [((1, 0), (0, 1), 2, math.sqrt(2)), ((1, 0), (0, 1), 1, 2.0)],
)
def test_distance_examples(u, v, p, expected):
    assert distance_p(u, v, p) == pytest.approx(expected, rel=1e-15)


def test_distance_zero_extends():
    assert distance_p([1.0], [1.0, 0.0, 2.0], 1) == 2.0


@given(vectors, exponents)
def test_distance_to_self_is_zero(v, p):
    assert distance_p(v, v, p) == 0.0


def test_aggregate_examples():
    assert aggregate_norm([(1, 0), (0, 1)], 2) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert aggregate_norm([(1,), (1,), (1,)], 1) == 3.0
    assert aggregate_norm([(2, 0), (0, -3)], math.inf) == 3.0


def test_aggregate_inf_is_limit_of_finite_p():
    tup = [(2, 0), (0, -3)]
    # (2^p + 3^p)^(1/p) -> 3 from above; at p = 400 it is within 1e-70 relative.
    for p in (50.0, 100.0, 400.0):
        oracle = (2.0**p + 3.0**p) ** (1 / p)
        assert aggregate_norm(tup, p) == pytest.approx(oracle, rel=1e-12)
    assert abs(aggregate_norm(tup, 400.0) - aggregate_norm(tup, math.inf)) < 1e-12


def test_aggregate_empty_rejected():
    with pytest.raises(InvalidInputError):
        aggregate_norm([], 2)


@settings(max_examples=300)
@given(vectors, vectors, exponents)
def test_triangle_inequality(u, v, p):
    n = max(len(u), len(v))
    a = np.pad(np.array(u, float), (0, n - len(u)))
    b = np.pad(np.array(v, float), (0, n - len(v)))
    lhs = norm_p(a + b, p)
    rhs = norm_p(a, p) + norm_p(b, p)
    assert lhs <= rhs * (1 + 1e-12) + 1e-12


@settings(max_examples=300)
@given(vectors, exponents, st.floats(min_value=-1e3, max_value=1e3))
def test_homogeneity(v, p, c):
    scaled = norm_p([c * x for x in v], p)
    assert scaled == pytest.approx(abs(c) * norm_p(v, p), rel=1e-12, abs=1e-300)


@settings(max_examples=300)
@given(vectors, exponents, exponents)
def test_monotone_in_p(v, p1, p2):
    lo, hi = sorted([p1, p2])
    assert norm_p(v, lo) >= norm_p(v, hi) * (1 - 1e-12)


@settings(max_examples=100)
@given(st.lists(vectors, min_size=0, max_size=5), exponents, st.integers(0, 4))
def test_zero_padding_changes_nothing(points, p, k):
    padded = [list(v) + [0.0] * k for v in points]
    for v, w in zip(points, padded):
        assert norm_p(v, p) == norm_p(w, p)
    if len(points) >= 2:
        assert distance_p(points[0], points[1], p) == distance_p(padded[0], padded[1], p)
    a = validate(PointConfig(p, 1.0, points))
    b = validate(PointConfig(p, 1.0, padded))
    assert (a.max_norm, a.min_pairwise_distance, a.admissible, a.worst_pair) == (
        b.max_norm,
        b.min_pairwise_distance,
        b.admissible,
        b.worst_pair,
    )


@settings(max_examples=100)
@given(st.lists(vectors, min_size=0, max_size=6), exponents, st.randoms(use_true_random=False))
def test_validate_permutation_invariant(points, p, rnd):
    shuffled = list(points)
    rnd.shuffle(shuffled)
    a = validate(PointConfig(p, 0.5, points))
    b = validate(PointConfig(p, 0.5, shuffled))
    assert a.admissible == b.admissible
    assert a.max_norm == b.max_norm
    assert a.min_pairwise_distance == b.min_pairwise_distance


def test_validate_antipodal_pair_at_half():
    rep = validate(PointConfig(2, 0.5, [[0.5], [-0.5]]))
    assert rep.admissible
    assert rep.min_pairwise_distance == 1.0
    assert rep.max_norm == 0.5
    assert rep.worst_pair == (0, 1)


def test_validate_pair_below_half_fails():
    rep = validate(PointConfig(2, 0.49, [[0.49], [-0.49]]))
    assert not rep.admissible
    assert rep.min_pairwise_distance == pytest.approx(0.98)


def test_validate_basis_config_by_direct_evaluation():
    config, _ = basis_config(2, 4)
    config = PointConfig(2, 2**-0.5, config.points)
    # Oracle: each point is 2^(-1/2) e_i; recompute with plain Python.
    pts = [list(v) for v in config.points]
    norms = [math.sqrt(sum(x * x for x in v)) for v in pts]
    dists = [
        math.sqrt(sum((x - y) ** 2 for x, y in zip(pts[i], pts[j])))
        for i in range(4)
        for j in range(i + 1, 4)
    ]
    assert max(norms) <= 2**-0.5 + 1e-15
    assert min(dists) == pytest.approx(1.0, abs=1e-15)
    assert validate(config).admissible


def test_validate_degenerate():
    empty = validate(PointConfig(2, 0.0, []))
    assert empty.admissible and empty.worst_pair is None
    single = validate(PointConfig(1, 0.1, [[0.1, 0.0]]))
    assert single.admissible and math.isinf(single.min_pairwise_distance)
    outside = validate(PointConfig(1, 0.1, [[0.2]]))
    assert not outside.admissible


def test_validate_tolerance_edges():
    rep = validate(PointConfig(2, 0.5, [[0.5 + 5e-10], [-0.5]]))
    assert rep.admissible
    rep = validate(PointConfig(2, 0.5, [[0.5 + 5e-9], [-0.5]]))
    assert not rep.admissible


def test_worst_pair_identifies_closest():
    pts = [[0.0], [3.0], [1.5], [3.2]]
    rep = validate(PointConfig(1, 5, pts))
    assert rep.worst_pair == (1, 3)
    assert rep.min_pairwise_distance == pytest.approx(0.2)


def test_pairwise_distances_match_bruteforce():
    rng = random.Random(3)
    pts = np.array([[rng.uniform(-1, 1) for _ in range(5)] for _ in range(9)])
    for p in (1.0, 1.5, 2.0, 3.0, 7.3, math.inf):
        expected = [
            distance_p(pts[i], pts[j], p) for i in range(9) for j in range(i + 1, 9)
        ]
        got = pairwise_distances(pts, p, block=7)
        np.testing.assert_allclose(got, expected, rtol=1e-14)


def test_json_roundtrip():
    cfg = PointConfig(math.inf, 0.75, [[0.5, -0.25], [0.1]])
    again = PointConfig.from_json(cfg.to_json())
    assert again.p == math.inf
    assert again.radius == 0.75
    assert [list(v) for v in again.points] == [[0.5, -0.25], [0.1]]
    assert json.loads(cfg.to_json())["p"] == "inf"


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[1, 2]",
        '{"p": 2, "radius": 1}',
        '{"p": 2, "radius": 1, "points": [[NaN]]}',
        '{"p": 2, "radius": 1, "points": [[Infinity]]}',
        '{"p": 2, "radius": 1, "points": [["a"]]}',
        '{"p": 0.5, "radius": 1, "points": []}',
        '{"p": 2, "radius": -1, "points": []}',
        '{"p": 2, "radius": 1, "points": [1, 2]}',
    ],
)
def test_json_rejects_malformed(text):
    with pytest.raises(InvalidInputError):
        PointConfig.from_json(text)
