"""The three moduli (doubling, disconnectedness, perfectness) and classify."""

import numpy as np
import pytest

import oracles as orc
from metriclab import (
    BadScaleCutoff,
    DegenerateSpace,
    FiniteMetricSpace,
    Thresholds,
    bottleneck_matrix,
    classify,
    doubling_constant,
    random_space,
    subset_stats,
    trial_rng,
    ud_modulus,
    up_constant,
    validate,
)
from metriclab.cantor import geometric_prefix_ultrametric, sequential_metric
from metriclab.lab import _progression_space, _uniform_space
from metriclab.moduli import (
    EXHAUSTIVE_LIMIT,
    doubling_report_to_json,
    type_vector_to_json,
    ud_report_to_json,
    up_report_to_json,
)
from metriclab.rangesets import ShrinkingSequence

UP_ORACLE_TOL = 1e-6  # pinned by the acceptance table


# ---------------------------------------------------------------------------
# doubling constant


def test_doubling_exhaustive_matches_brute_force_exactly():
    rng = trial_rng(30, 0)
    for _ in range(20):
        n = int(rng.integers(3, 11))
        mode = "closure" if rng.integers(2) else "points_linf"
        space = random_space(mode, n, rng)
        for beta in (1.0, 2.0):
            report = doubling_constant(space, beta)
            brute_constant, brute_witness = orc.doubling_by_subsets(space.matrix, beta)
            assert report.mode == "exhaustive"
            assert report.constant == brute_constant
            assert report.witness == brute_witness


def test_doubling_frozen_values():
    uniform = _uniform_space(8)
    assert doubling_constant(uniform, 1.0).constant == orc.FROZEN[
        "doubling_uniform_n8_beta1"
    ]
    progression = _progression_space(9)
    assert doubling_constant(progression, 1.0).constant == orc.FROZEN[
        "doubling_progression_beta1"
    ]


def test_doubling_witness_identity_round_trips():
    rng = trial_rng(31, 0)
    for _ in range(10):
        space = random_space("closure", 9, rng)
        for beta in (1.0, 2.0):
            report = doubling_constant(space, beta)
            stats = subset_stats(space, list(report.witness))
            ratio = stats.cardinality * (stats.separation / stats.diameter) ** beta
            assert ratio == report.constant


def test_doubling_sampled_mode():
    rng = trial_rng(32, 0)
    space = random_space("closure", EXHAUSTIVE_LIMIT + 5, rng)
    report = doubling_constant(space, 2.0, budget=500, rng=7)
    again = doubling_constant(space, 2.0, budget=500, rng=7)
    assert report.mode == "sampled"
    assert report.constant >= 2.0  # every pair realizes exactly 2
    assert (report.constant, report.witness) == (again.constant, again.witness)
    # the sampled search still realizes its own witness
    stats = subset_stats(space, list(report.witness))
    ratio = stats.cardinality * (stats.separation / stats.diameter) ** 2.0
    assert ratio == report.constant


def test_doubling_guards():
    lone = FiniteMetricSpace(("a",), np.zeros((1, 1)))
    with pytest.raises(DegenerateSpace):
        doubling_constant(lone, 2.0)
    pair = validate(("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(ValueError):
        doubling_constant(pair, 0.0)


# ---------------------------------------------------------------------------
# bottleneck matrix and the disconnectedness modulus


def test_bottleneck_matches_chain_oracle_exactly():
    rng = trial_rng(33, 0)
    for k in range(40):
        n = int(rng.integers(2, 9))
        mode = "closure" if k % 2 else "points_linf"
        space = random_space(mode, n, rng)
        assert np.array_equal(bottleneck_matrix(space), orc.bottleneck_by_paths(space.matrix))


def test_bottleneck_values_come_from_the_matrix():
    rng = trial_rng(34, 0)
    space = random_space("closure", 10, rng)
    bottleneck = bottleneck_matrix(space)
    entries = set(space.matrix.ravel().tolist())
    assert set(bottleneck.ravel().tolist()) <= entries


def test_bottleneck_is_identity_on_ultrametrics():
    # under the strong triangle inequality no chain beats the direct edge
    rng = trial_rng(35, 0)
    space = random_space("sequential", 16, rng)
    assert np.array_equal(bottleneck_matrix(space), space.matrix)


def test_bottleneck_single_point():
    lone = FiniteMetricSpace(("a",), np.zeros((1, 1)))
    assert np.array_equal(bottleneck_matrix(lone), np.zeros((1, 1)))


def test_ud_modulus_progression_is_one_over_n_minus_one():
    for n in (8, 33):
        report = ud_modulus(_progression_space(n))
        assert report.delta_star == 1.0 / (n - 1)
        assert report.witness_pair == (0, n - 1)


def test_ud_modulus_is_one_exactly_on_ultrametrics():
    rng = trial_rng(36, 0)
    space = random_space("sequential", 12, rng)
    assert ud_modulus(space).delta_star == 1.0


def test_ud_modulus_witness_identity():
    rng = trial_rng(37, 0)
    for _ in range(10):
        space = random_space("closure", 9, rng)
        report = ud_modulus(space)
        i, j = report.witness_pair
        assert report.bottleneck[i, j] / space.matrix[i, j] == report.delta_star
        assert report.delta_star <= 1.0
    lone = FiniteMetricSpace(("a",), np.zeros((1, 1)))
    with pytest.raises(DegenerateSpace):
        ud_modulus(lone)


# ---------------------------------------------------------------------------
# uniform perfectness


def test_up_constant_matches_radius_scan_oracle():
    rng = trial_rng(38, 0)
    modes = ("closure", "points_linf", "sequential")
    for k in range(30):
        n = int(rng.integers(4, 33))
        space = random_space(modes[k % 3], n, rng)
        if k % 2:
            r_min = space.separation
        else:
            dists = np.unique(space.matrix[space.matrix > 0])
            r_min = float(np.median(dists))
            if not 0 < r_min < space.diameter:
                r_min = space.separation
        report = up_constant(space, r_min)
        assert abs(report.c_star - orc.up_constant_by_radii(space.matrix, r_min)) <= UP_ORACLE_TOL


def test_up_constant_geometric_ladder_is_exact():
    space = geometric_prefix_ultrametric(64, top=1.0, ratio=0.5)
    report = up_constant(space, space.separation)
    assert report.c_star == 0.5


def test_up_constant_zero_when_a_point_is_isolated():
    matrix = np.array(
        [
            [0.0, 0.1, 0.1, 10.0],
            [0.1, 0.0, 0.1, 10.0],
            [0.1, 0.1, 0.0, 10.0],
            [10.0, 10.0, 10.0, 0.0],
        ]
    )
    space = validate(tuple("abcd"), matrix)
    report = up_constant(space, 0.1)
    assert report.c_star == 0.0
    assert report.witness == (3, 0.1)  # the isolated point, at radius r_min


def test_up_constant_witness_identity():
    rng = trial_rng(39, 0)
    for _ in range(10):
        space = random_space("points_linf", 12, rng)
        r_min = space.separation
        report = up_constant(space, r_min)
        x, radius = report.witness
        row = space.matrix[x]
        dists = np.unique(row[row > 0])
        if report.c_star == 0.0:
            # the witness point's nearest neighbor sits beyond r_min, so
            # the annulus at the witness radius is genuinely empty
            assert radius == r_min and dists[0] > r_min
        else:
            # the binding ratio is (some distance from x) / radius
            matches = [a for a in dists if a / radius == report.c_star]
            assert matches, "witness radius does not reproduce c_star"


def test_up_constant_guards():
    rng = trial_rng(40, 0)
    space = random_space("closure", 6, rng)
    with pytest.raises(BadScaleCutoff):
        up_constant(space, 0.0)
    with pytest.raises(BadScaleCutoff):
        up_constant(space, space.diameter)
    lone = FiniteMetricSpace(("a",), np.zeros((1, 1)))
    with pytest.raises(DegenerateSpace):
        up_constant(lone, 0.5)


# ---------------------------------------------------------------------------
# classification


def test_classify_geometric_ladder_hits_all_ones():
    space = geometric_prefix_ultrametric(64, top=1.0, ratio=0.5)
    tv = classify(space)
    assert tv.bits == (1, 1, 1)
    assert tv.reports["up"].c_star == 0.5
    assert tv.reports["ud"].delta_star == 1.0


def test_classify_uniform_space_is_degenerate_in_the_scale_window():
    tv = classify(_uniform_space(6))
    assert tv.u3 == 0
    assert tv.reports["up"].degenerate
    assert tv.reports["up"].c_star == 0.0


def test_classify_honors_explicit_r_min():
    rungs = ShrinkingSequence((1.0, 0.5, 0.25, 0.125))
    space = sequential_metric(rungs, 4)
    low = classify(space, r_min=space.separation)
    high = classify(space, r_min=space.diameter * 2.0)
    assert low.reports["up"].c_star == 0.5
    assert high.reports["up"].degenerate


def test_classify_threshold_flips():
    space = geometric_prefix_ultrametric(32, top=1.0, ratio=0.5)
    strict = classify(space, thresholds=Thresholds(c_min=0.9))
    assert strict.u3 == 0
    loose = classify(space, thresholds=Thresholds(c_max=1.0))
    assert loose.u1 == 0


def test_thresholds_json_round_trip():
    t = Thresholds(beta0=1.5, c_max=16.0, delta_min=0.1, c_min=0.2)
    assert Thresholds.from_json(t.to_json()) == t
    assert Thresholds.from_json({}) == Thresholds()


def test_report_json_helpers():
    rng = trial_rng(41, 0)
    space = random_space("closure", 8, rng)
    tv = classify(space)
    obj = type_vector_to_json(tv)
    assert (obj["u1"], obj["u2"], obj["u3"]) == tv.bits
    assert "bottleneck_matrix" not in obj["reports"]["ud"]
    full = type_vector_to_json(tv, include_matrix=True)
    matrix = np.asarray(full["reports"]["ud"]["bottleneck_matrix"])
    assert np.array_equal(matrix, tv.reports["ud"].bottleneck)
    d = doubling_report_to_json(tv.reports["doubling"])
    assert d["constant"] == tv.reports["doubling"].constant
    u = ud_report_to_json(tv.reports["ud"], include_matrix=False)
    assert u["delta_star"] == tv.reports["ud"].delta_star
    p = up_report_to_json(tv.reports["up"])
    assert p["witness"]["point"] == tv.reports["up"].witness[0]
