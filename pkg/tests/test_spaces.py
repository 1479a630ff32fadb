"""Validation, the two distances between metrics, and the closure repair."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as orc
from metriclab import (
    AsymmetricMatrix,
    FiniteMetricSpace,
    LabelMismatch,
    NonpositiveOffDiagonal,
    NonzeroDiagonal,
    NotUltrametric,
    SeparationUndefined,
    StrongTriangleViolation,
    TriangleViolation,
    ValueOutsideRangeSet,
    ZeroOffDiagonal,
    diagnose,
    explicit_range_set,
    geometric_range_set,
    metric_closure,
    random_space,
    space_from_json,
    space_to_json,
    subset_stats,
    sup_distance,
    trial_rng,
    ultra_distance,
    validate,
)
from metriclab.lab import random_s_ultrametric

VALIDATION_TOL = 1e-9  # relative triangle slack pinned by the acceptance table


def _labels(n):
    return tuple(f"p{k}" for k in range(n))


def _symmetric_raw(rng, n, lo=0.5, hi=2.0):
    raw = rng.uniform(lo, hi, size=(n, n))
    raw = np.triu(raw, k=1)
    return raw + raw.T


# ---------------------------------------------------------------------------
# construction and basic record behavior


def test_space_properties():
    matrix = np.array([[0.0, 1.0, 3.0], [1.0, 0.0, 2.0], [3.0, 2.0, 0.0]])
    space = validate(_labels(3), matrix)
    assert space.n == 3
    assert space.diameter == 3.0
    assert space.separation == 1.0
    assert space.flavor == "metric"
    assert not space.matrix.flags.writeable


def test_space_shape_guards():
    with pytest.raises(ValueError):
        FiniteMetricSpace(("a",), np.zeros((1, 2)))
    with pytest.raises(ValueError):
        FiniteMetricSpace(("a", "b"), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        FiniteMetricSpace((), np.zeros((0, 0)))
    with pytest.raises(ValueError):
        FiniteMetricSpace(("a",), np.zeros((1, 1)), flavor="fuzzy")


def test_restrict_is_bit_exact():
    rng = trial_rng(10, 0)
    space = random_space("closure", 9, rng)
    sub = space.restrict([7, 1, 4])
    assert sub.labels == (space.labels[7], space.labels[1], space.labels[4])
    expected = space.matrix[np.ix_([7, 1, 4], [7, 1, 4])]
    assert np.array_equal(sub.matrix, expected)
    assert sub.flavor == space.flavor


def test_scaled():
    space = validate(_labels(2), np.array([[0.0, 3.0], [3.0, 0.0]]))
    doubled = space.scaled(2.0)
    assert np.array_equal(doubled.matrix, space.matrix * 2.0)
    with pytest.raises(ValueError):
        space.scaled(0.0)


def test_separation_needs_two_points():
    lone = FiniteMetricSpace(("a",), np.zeros((1, 1)))
    with pytest.raises(SeparationUndefined):
        _ = lone.separation


# ---------------------------------------------------------------------------
# diagnose: axiom order and typed errors


def test_diagnose_accepts_valid_metric():
    rng = trial_rng(11, 0)
    space = random_space("closure", 12, rng)
    assert diagnose(space.labels, space.matrix) is None


def test_diagnose_zero_diagonal_first():
    matrix = np.array([[0.5, 1.0], [2.0, 0.0]])  # also asymmetric
    violation = diagnose(_labels(2), matrix)
    assert violation.axiom == "zero_diagonal"
    assert violation.indices == (0, 0)
    with pytest.raises(NonzeroDiagonal):
        validate(_labels(2), matrix)


def test_diagnose_symmetry():
    matrix = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.5, 1.0, 0.0]])
    violation = diagnose(_labels(3), matrix)
    assert violation.axiom == "symmetry"
    i, j = violation.indices
    assert matrix[i, j] != matrix[j, i]
    with pytest.raises(AsymmetricMatrix) as info:
        validate(_labels(3), matrix)
    assert info.value.indices == violation.indices


def test_diagnose_positivity():
    matrix = np.array([[0.0, 0.0], [0.0, 0.0]])
    violation = diagnose(_labels(2), matrix)
    assert violation.axiom == "positivity"
    assert violation.indices == (0, 1)
    with pytest.raises(NonpositiveOffDiagonal):
        validate(_labels(2), matrix)


def test_diagnose_triangle_with_witness():
    matrix = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
    violation = diagnose(_labels(3), matrix)
    assert violation.axiom == "triangle"
    i, j, k = violation.indices
    slack = VALIDATION_TOL * matrix.max()
    assert matrix[i, j] > matrix[i, k] + matrix[k, j] + slack
    with pytest.raises(TriangleViolation):
        validate(_labels(3), matrix)


def test_diagnose_strong_triangle_for_ultrametric_flavor():
    # valid as a metric (1.5 <= 1 + 1) but not as an ultrametric
    matrix = np.array([[0.0, 1.5, 1.0], [1.5, 0.0, 1.0], [1.0, 1.0, 0.0]])
    assert diagnose(_labels(3), matrix, flavor="metric") is None
    violation = diagnose(_labels(3), matrix, flavor="ultrametric")
    assert violation.axiom == "strong_triangle"
    i, j, k = violation.indices
    assert matrix[i, j] > max(matrix[i, k], matrix[k, j])
    with pytest.raises(StrongTriangleViolation):
        validate(_labels(3), matrix, flavor="ultrametric")


def test_diagnose_rejects_bad_arguments():
    with pytest.raises(ValueError):
        diagnose(_labels(2), np.zeros((2, 2)), tol=-1.0)
    with pytest.raises(ValueError):
        diagnose(_labels(2), np.zeros((2, 2)), flavor="fuzzy")
    with pytest.raises(ValueError):
        diagnose(_labels(3), np.zeros((2, 2)))
    bad = np.array([[0.0, np.inf], [np.inf, 0.0]])
    with pytest.raises(ValueError):
        diagnose(_labels(2), bad)


def test_triangle_slack_is_relative():
    # a violation of size 5e-10 * max sits inside the default slack
    matrix = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
    matrix[0, 2] = matrix[2, 0] = 2.0 + 5e-10 * 2.0
    assert diagnose(_labels(3), matrix) is None
    assert diagnose(_labels(3), matrix, tol=0.0).axiom == "triangle"


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=10_000))
def test_closure_output_always_validates(n, seed):
    rng = np.random.default_rng(seed)
    space = metric_closure(_labels(n), _symmetric_raw(rng, n))
    assert diagnose(space.labels, space.matrix, tol=VALIDATION_TOL) is None


@settings(max_examples=60, deadline=None, derandomize=True)
@given(
    st.integers(min_value=3, max_value=8),
    st.integers(min_value=0, max_value=10_000),
    st.floats(min_value=1.5, max_value=50.0),
)
def test_fuzzed_triangle_bump_is_always_caught(n, seed, factor):
    rng = np.random.default_rng(seed)
    space = metric_closure(_labels(n), _symmetric_raw(rng, n))
    i, j = sorted(rng.choice(n, size=2, replace=False))
    broken = space.matrix.copy()
    broken[i, j] = broken[j, i] = space.diameter * 2.0 * factor
    violation = diagnose(_labels(n), broken)
    assert violation is not None and violation.axiom == "triangle"
    a, b, c = violation.indices
    assert broken[a, b] > broken[a, c] + broken[c, b]


# ---------------------------------------------------------------------------
# sup distance


def test_sup_distance_frozen_triangles():
    d = validate(_labels(3), np.array([[0, 1, 3], [1, 0, 2], [3, 2, 0]], float))
    e = validate(_labels(3), np.array([[0, 2, 5], [2, 0, 3], [5, 3, 0]], float))
    got = sup_distance(d, e)
    assert got.value == orc.FROZEN["sup_triangles"] == orc.sup_dist(d.matrix, e.matrix)
    assert got.kind == "sup_metric"


def test_sup_distance_is_a_metric_on_random_triples():
    rng = trial_rng(12, 0)
    for _ in range(25):
        n = int(rng.integers(2, 10))
        d = random_space("closure", n, rng)
        e = random_space("closure", n, rng)
        f = random_space("closure", n, rng)
        assert sup_distance(d, d).value == 0.0
        assert sup_distance(d, e).value == sup_distance(e, d).value
        assert (
            sup_distance(d, f).value
            <= sup_distance(d, e).value + sup_distance(e, f).value
        )


def test_sup_distance_requires_shared_labels():
    d = validate(("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]))
    e = validate(("b", "a"), np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(LabelMismatch):
        sup_distance(d, e)


def test_sup_distance_matches_oracle_on_random_pairs():
    rng = trial_rng(13, 0)
    for _ in range(10):
        n = int(rng.integers(2, 9))
        d = random_space("closure", n, rng)
        e = random_space("points_linf", n, rng)
        assert sup_distance(d, e).value == orc.sup_dist(d.matrix, e.matrix)


# ---------------------------------------------------------------------------
# ultra distance over a range set


def test_ultra_distance_zero_on_equal_inputs():
    S = geometric_range_set(0.5)
    d = random_s_ultrametric(8, S, trial_rng(14, 0))
    assert ultra_distance(d, d, S).value == 0.0


def test_ultra_distance_frozen_pair_2_3_rounds_up_to_4():
    # values 2 and 3 sit outside S = {0, 1, 4, 8}: the default tolerance
    # rejects them, while an explicitly loosened tolerance admits them and
    # the closed form rounds M = 3 up to the least S element 4 (eps = 1
    # fails the pairwise envelope inequalities, eps = 4 satisfies them).
    S = explicit_range_set([0.0, 1.0, 4.0, 8.0])
    d = validate(("a", "b"), np.array([[0.0, 2.0], [2.0, 0.0]]), flavor="ultrametric")
    e = validate(("a", "b"), np.array([[0.0, 3.0], [3.0, 0.0]]), flavor="ultrametric")
    with pytest.raises(ValueOutsideRangeSet):
        ultra_distance(d, e, S)
    got = ultra_distance(d, e, S, tol=0.5)
    assert got.value == orc.FROZEN["ultra_single_pair"]
    assert got.value == orc.ultra_dist(d.matrix, e.matrix, [0.0, 1.0, 4.0, 8.0])
    assert got.kind == "ultra_metric_over_S"


def test_ultra_distance_is_infinite_past_the_top_of_s():
    S = explicit_range_set([0.0, 1.0, 4.0, 8.0])
    d = validate(("a", "b"), np.array([[0.0, 8.0], [8.0, 0.0]]), flavor="ultrametric")
    e = validate(("a", "b"), np.array([[0.0, 9.0], [9.0, 0.0]]), flavor="ultrametric")
    got = ultra_distance(d, e, S, tol=0.5)  # 9 admitted by the loose tolerance
    assert got.value == np.inf
    assert orc.ultra_dist(d.matrix, e.matrix, [0.0, 1.0, 4.0, 8.0]) == np.inf


def _random_explicit_ultrametric(values, depth, rng):
    from metriclab.cantor import _valuation_matrix, BinaryPointSet

    positive = sorted(v for v in values if v > 0)
    rungs = sorted(rng.choice(positive, size=depth, replace=False), reverse=True)
    table = np.append(np.asarray(rungs, dtype=float), 0.0)
    matrix = table[_valuation_matrix(depth)]
    return validate(BinaryPointSet(depth).labels, matrix, flavor="ultrametric")


def test_ultra_distance_closed_form_equals_brute_scan():
    values = [0.0, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0]
    S = explicit_range_set(values)
    rng = trial_rng(15, 0)
    for _ in range(40):
        d = _random_explicit_ultrametric(values, 3, rng)
        e = _random_explicit_ultrametric(values, 3, rng)
        assert ultra_distance(d, e, S).value == orc.ultra_dist(d.matrix, e.matrix, values)


def test_ultra_distance_strong_triangle_on_random_triples():
    values = [0.0, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0]
    S = explicit_range_set(values)
    rng = trial_rng(16, 0)
    for _ in range(25):
        d = _random_explicit_ultrametric(values, 3, rng)
        e = _random_explicit_ultrametric(values, 3, rng)
        f = _random_explicit_ultrametric(values, 3, rng)
        df = ultra_distance(d, f, S).value
        de = ultra_distance(d, e, S).value
        ef = ultra_distance(e, f, S).value
        assert df <= max(de, ef)


def test_ultra_distance_requires_ultrametric_flavor():
    S = explicit_range_set([0.0, 1.0])
    d = validate(("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]))
    e = validate(("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]), flavor="ultrametric")
    with pytest.raises(NotUltrametric):
        ultra_distance(d, e, S)


def test_ultra_distance_rejects_off_s_values():
    S = explicit_range_set([0.0, 1.0])
    d = validate(("a", "b"), np.array([[0.0, 0.7], [0.7, 0.0]]), flavor="ultrametric")
    e = validate(("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]), flavor="ultrametric")
    with pytest.raises(ValueOutsideRangeSet):
        ultra_distance(d, e, S)


# ---------------------------------------------------------------------------
# shortest-path closure


def test_closure_shortcuts_a_long_edge():
    raw = np.array([[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]])
    repaired = metric_closure(_labels(3), raw)
    assert repaired.matrix[0, 2] == 2.0


def test_closure_is_identity_on_metrics():
    rng = trial_rng(17, 0)
    for _ in range(10):
        space = random_space("closure", 8, rng)
        again = metric_closure(space.labels, space.matrix)
        assert np.array_equal(again.matrix, space.matrix)


def test_closure_matches_all_paths_oracle():
    rng = trial_rng(18, 0)
    for _ in range(12):
        n = int(rng.integers(3, 8))
        raw = _symmetric_raw(rng, n)
        repaired = metric_closure(_labels(n), raw)
        brute = orc.closure_by_paths(raw)
        scale = raw.max()
        assert np.abs(repaired.matrix - brute).max() <= 1e-12 * scale
        assert (repaired.matrix <= raw + 1e-12 * scale).all()


def test_closure_input_guards():
    with pytest.raises(NonzeroDiagonal):
        metric_closure(_labels(2), np.array([[0.1, 1.0], [1.0, 0.0]]))
    with pytest.raises(AsymmetricMatrix):
        metric_closure(_labels(2), np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ZeroOffDiagonal):
        metric_closure(_labels(2), np.array([[0.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(NonpositiveOffDiagonal):
        metric_closure(_labels(2), np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(ValueError):
        metric_closure(_labels(2), np.array([[0.0, np.nan], [np.nan, 0.0]]))


# ---------------------------------------------------------------------------
# subset statistics and JSON forms


def test_subset_stats_against_hand_counts():
    matrix = np.array(
        [
            [0.0, 1.0, 3.0, 2.0],
            [1.0, 0.0, 3.0, 2.5],
            [3.0, 3.0, 0.0, 1.5],
            [2.0, 2.5, 1.5, 0.0],
        ]
    )
    space = validate(_labels(4), matrix)
    stats = subset_stats(space, [0, 2, 3])
    assert stats.cardinality == 3
    assert stats.diameter == 3.0
    assert stats.separation == 1.5
    lone = subset_stats(space, [2])
    assert lone.cardinality == 1 and lone.diameter == 0.0
    with pytest.raises(SeparationUndefined):
        _ = lone.separation
    with pytest.raises(ValueError):
        subset_stats(space, [])
    with pytest.raises(ValueError):
        subset_stats(space, [0, 9])


def test_space_json_round_trip_is_bit_exact():
    rng = trial_rng(19, 0)
    for mode, flavor in (("closure", "metric"), ("sequential", "ultrametric")):
        space = random_space(mode, 7, rng)
        back = space_from_json(space_to_json(space))
        assert back.labels == space.labels
        assert back.flavor == flavor
        assert np.array_equal(back.matrix, space.matrix)


def test_space_from_json_rejects_malformed_objects():
    with pytest.raises(ValueError):
        space_from_json({"matrix": [[0.0]]})
    with pytest.raises(ValueError):
        space_from_json({"labels": ["a"], "matrix": "nope"})
