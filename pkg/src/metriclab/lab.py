"""Seeded experiment driver.

Three experiment families, all deterministic per (config, seed):

* dense_*   -- draw a random instance, run the matching approximation
               pipeline, and check the theorem-backed proximity bound
               (4 * eps for the sum form, eps for the range-set form);
* perturb_* -- draw metrics close to a reference (uniform or
               arithmetic-progression) metric and check the stability
               inequalities for subset diameter/separation and for the
               chain-based disconnectedness modulus;
* type_grid -- for each of the eight type bit vectors: generate a space
               of that type, amalgamate type-matching pieces onto a
               random two-cluster host, and require both measurements
               to land on the target type.

Each trial derives its own generator from (master seed, trial index),
so reports are byte-identical across runs of the same config.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .build import (
    ClopenPartition,
    amalgamate_metric,
    approximate_doubling,
    approximate_ud,
    approximate_up,
    carve_pieces,
    pairwise_linf,
)
from .cantor import (
    BinaryPointSet,
    _valuation_matrix,
    generate_type,
    geometric_prefix_ultrametric,
)
from .errors import GenerationFailed, MetricLabError
from .moduli import (
    DEFAULT_THRESHOLDS,
    Thresholds,
    classify,
    doubling_constant,
    ud_modulus,
    up_constant,
)
from .rangesets import RangeSet, geometric_range_set
from .spaces import (
    METRIC,
    ULTRAMETRIC,
    FiniteMetricSpace,
    diagnose,
    metric_closure,
    sup_distance,
    ultra_distance,
    validate,
)

EXPERIMENTS = (
    "dense_doubling",
    "dense_ud",
    "dense_up",
    "dense_ult_doubling",
    "dense_ult_up",
    "perturb_uniform",
    "perturb_chain",
    "type_grid",
)

# Budget for the before/after modulus measurements recorded per trial
# (kept modest: these are report fields, not the pass/fail criteria).
_RECORD_BUDGET = 400

_DEFAULT_SIZES = {
    "dense_doubling": 64,
    "dense_ud": 64,
    "dense_up": 64,
    "dense_ult_doubling": 64,
    "dense_ult_up": 64,
    "perturb_uniform": 32,
    "perturb_chain": 33,
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int | None = None
    depth: int | None = None
    epsilon: float = 0.125
    epsilon_mode: str = "fraction"  # "fraction" of diameter, or "absolute"
    trials: int = 1
    seed: int = 0
    thresholds: Thresholds = DEFAULT_THRESHOLDS
    fmt: str = "json"
    out: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}"
            )
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.epsilon_mode not in ("fraction", "absolute"):
            raise ValueError("epsilon_mode must be 'fraction' or 'absolute'")
        if self.fmt not in ("json", "csv"):
            raise ValueError("format must be 'json' or 'csv'")
        if self.experiment == "type_grid":
            depth = 7 if self.depth is None else self.depth
            if depth < 6:
                raise ValueError("type_grid needs depth >= 6")
            object.__setattr__(self, "depth", depth)
        else:
            n = _DEFAULT_SIZES[self.experiment] if self.n is None else self.n
            floor = 3 if self.experiment == "dense_up" else 2
            if n < floor:
                raise ValueError(f"{self.experiment} needs n >= {floor}")
            object.__setattr__(self, "n", n)

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "n": self.n,
            "depth": self.depth,
            "epsilon": self.epsilon,
            "epsilon_mode": self.epsilon_mode,
            "trials": self.trials,
            "seed": self.seed,
            "thresholds": self.thresholds.to_json(),
            "format": self.fmt,
            "out": self.out,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        try:
            return cls(
                experiment=obj["experiment"],
                n=obj.get("n"),
                depth=obj.get("depth"),
                epsilon=float(obj.get("epsilon", 0.125)),
                epsilon_mode=obj.get("epsilon_mode", "fraction"),
                trials=int(obj.get("trials", 1)),
                seed=int(obj.get("seed", 0)),
                thresholds=Thresholds.from_json(obj.get("thresholds", {})),
                fmt=obj.get("format", "json"),
                out=obj.get("out"),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed experiment config: {exc}") from exc


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    digest: str
    epsilon: float
    achieved: float
    bound: float
    passed: bool
    before: dict = field(default_factory=dict)
    after: dict = field(default_factory=dict)
    error: str | None = None

    def to_row(self) -> dict:
        def clean(value):
            if isinstance(value, float) and math.isnan(value):
                return None
            return value

        row = {
            "trial": self.trial,
            "digest": self.digest,
            "epsilon": clean(self.epsilon),
            "achieved": clean(self.achieved),
            "bound": clean(self.bound),
            "pass": self.passed,
            "error": self.error,
        }
        for key, value in sorted(self.before.items()):
            row[f"before_{key}"] = clean(value)
        for key, value in sorted(self.after.items()):
            row[f"after_{key}"] = clean(value)
        return row


def matrix_digest(space: FiniteMetricSpace) -> str:
    return hashlib.sha256(space.matrix.tobytes()).hexdigest()[:16]


def _rng_of(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial,)))


def _point_labels(n: int) -> tuple[str, ...]:
    width = len(str(n - 1))
    return tuple(f"p{k:0{width}d}" for k in range(n))


def random_space(mode: str, size: int, seed) -> FiniteMetricSpace:
    """Seeded random instances.

    closure     -- symmetric uniform(0.5, 2.0) entries repaired by the
                   shortest-path closure;
    points_linf -- uniform points in the unit square under the max norm
                   (so the instance is realizable by construction);
    sequential  -- random strictly decreasing ladder on the first `size`
                   binary strings (an ultrametric).
    """
    if size < 2:
        raise ValueError("size must be >= 2")
    rng = _rng_of(seed)
    labels = _point_labels(size)
    if mode == "closure":
        raw = rng.uniform(0.5, 2.0, size=(size, size))
        raw = np.triu(raw, k=1)
        raw = raw + raw.T
        return metric_closure(labels, raw)
    if mode == "points_linf":
        while True:
            points = rng.uniform(0.0, 1.0, size=(size, 2))
            matrix = pairwise_linf(points)
            off = matrix[~np.eye(size, dtype=bool)]
            if off.min() > 0:
                return validate(labels, matrix, flavor=METRIC)
    if mode == "sequential":
        depth = max(1, math.ceil(math.log2(size)))
        rungs = np.sort(rng.uniform(0.05, 1.0, size=depth))[::-1]
        while len(set(rungs.tolist())) < depth:  # vanishing probability
            rungs = np.sort(rng.uniform(0.05, 1.0, size=depth))[::-1]
        table = np.append(rungs, 0.0)
        matrix = table[_valuation_matrix(depth)][:size, :size]
        points = BinaryPointSet(depth)
        return validate(points.labels[:size], matrix, flavor=ULTRAMETRIC)
    raise ValueError(f"unknown random_space mode {mode!r}")


def random_s_ultrametric(size: int, S: RangeSet, seed) -> FiniteMetricSpace:
    """Random S-valued ultrametric: a sequential metric whose rungs are
    S elements at randomly chosen consecutive-or-skipping exponents."""
    if S.kind != "geometric":
        raise ValueError("random S-valued instances need a geometric range set")
    if size < 2:
        raise ValueError("size must be >= 2")
    rng = _rng_of(seed)
    depth = max(1, math.ceil(math.log2(size)))
    exponents = np.sort(rng.choice(2 * depth, size=depth, replace=False))
    table = np.append(
        np.array([S.scale * S.ratio ** int(e) for e in exponents]), 0.0
    )
    matrix = table[_valuation_matrix(depth)][:size, :size]
    points = BinaryPointSet(depth)
    return validate(points.labels[:size], matrix, flavor=ULTRAMETRIC)


def _absolute_epsilon(config: ExperimentConfig, space: FiniteMetricSpace) -> float:
    if config.epsilon_mode == "absolute":
        return config.epsilon
    return config.epsilon * space.diameter


def _c_star_or_zero(space: FiniteMetricSpace, r_min: float) -> float:
    if not 0 < r_min < space.diameter:
        return 0.0
    return up_constant(space, r_min).c_star


def _dense_trial(config: ExperimentConfig, trial: int) -> TrialRecord:
    rng = trial_rng(config.seed, trial)
    kind = config.experiment
    if kind == "dense_doubling":
        host = random_space("closure", config.n, rng)
    elif kind in ("dense_ud", "dense_up"):
        host = random_space("points_linf", config.n, rng)
    else:
        S = geometric_range_set(0.5)
        host = random_s_ultrametric(config.n, S, rng)
    eps = _absolute_epsilon(config, host)
    digest = matrix_digest(host)

    if kind == "dense_doubling":
        before = {
            "doubling": doubling_constant(
                host, config.thresholds.beta0, budget=_RECORD_BUDGET
            ).constant
        }
        out, embedding = approximate_doubling(host, eps)
        achieved = sup_distance(out, host).value
        bound = 4 * eps
        after = {
            "doubling": doubling_constant(
                out, config.thresholds.beta0, budget=_RECORD_BUDGET
            ).constant,
            "embedding_dimension": float(embedding.dimension),
        }
        passed = achieved <= bound
    elif kind == "dense_ud":
        before = {"delta_star": ud_modulus(host).delta_star}
        out, report = approximate_ud(host, eps)
        achieved = sup_distance(out, host).value
        bound = 4 * eps
        after = {"delta_star": report.delta_star}
        passed = achieved <= bound and report.delta_star > 0
    elif kind == "dense_up":
        before = {"c_star": _c_star_or_zero(host, host.separation)}
        out, report = approximate_up(host, eps)
        achieved = sup_distance(out, host).value
        bound = 4 * report.eps_effective
        after = {
            "c_star": report.c_star,
            "heredity_floor": report.bound,
            "eps_effective": report.eps_effective,
        }
        passed = achieved <= bound and report.c_star >= report.bound
    elif kind == "dense_ult_doubling":
        S = geometric_range_set(0.5)
        before = {
            "doubling": doubling_constant(
                host, config.thresholds.beta0, budget=_RECORD_BUDGET
            ).constant
        }
        out, report = approximate_ud(host, eps, S=S)
        achieved = ultra_distance(out, host, S).value
        bound = eps
        after = {
            "doubling": doubling_constant(
                out, config.thresholds.beta0, budget=_RECORD_BUDGET
            ).constant,
            "delta_star": report.delta_star,
        }
        passed = achieved <= bound
    else:  # dense_ult_up
        S = geometric_range_set(0.5)
        before = {"c_star": _c_star_or_zero(host, host.separation)}
        out, report = approximate_ud(host, eps, S=S)
        achieved = ultra_distance(out, host, S).value
        bound = eps
        after = {
            "c_star": _c_star_or_zero(out, out.separation),
            "delta_star": report.delta_star,
        }
        passed = achieved <= bound
    return TrialRecord(
        trial=trial,
        digest=digest,
        epsilon=eps,
        achieved=float(achieved),
        bound=float(bound),
        passed=bool(passed),
        before=before,
        after=after,
    )


def run_dense(config: ExperimentConfig) -> list[TrialRecord]:
    records = []
    for trial in range(config.trials):
        try:
            records.append(_dense_trial(config, trial))
        except MetricLabError as exc:
            records.append(
                TrialRecord(
                    trial=trial,
                    digest="",
                    epsilon=float("nan"),
                    achieved=float("nan"),
                    bound=float("nan"),
                    passed=False,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return records


def _uniform_space(n: int) -> FiniteMetricSpace:
    matrix = np.ones((n, n)) - np.eye(n)
    return validate(_point_labels(n), matrix, flavor=ULTRAMETRIC)


def _progression_space(n: int) -> FiniteMetricSpace:
    ids = np.arange(n, dtype=float)
    matrix = np.abs(ids[:, None] - ids[None, :])
    return validate(_point_labels(n), matrix, flavor=METRIC)


def _perturb_within_half(base: FiniteMetricSpace, rng) -> FiniteMetricSpace:
    """Add symmetric off-diagonal uniform(-0.49, 0.49) noise; repair a
    broken triangle inequality by the shortest-path closure; redraw if
    the repaired draw leaves the sup-distance budget (it provably does
    not for the uniform base, but the check is kept honest)."""
    n = base.n
    for _ in range(100):
        noise = rng.uniform(-0.49, 0.49, size=(n, n))
        noise = np.triu(noise, k=1)
        noise = noise + noise.T
        raw = base.matrix + noise
        if diagnose(base.labels, raw, flavor=METRIC) is None:
            candidate = validate(base.labels, raw, flavor=METRIC)
        else:
            candidate = metric_closure(base.labels, raw)
        if sup_distance(candidate, base).value < 0.5:
            return candidate
    raise GenerationFailed("no perturbation within the 1/2 ball after 100 draws")


def sample_subsets(n: int, rng, budget: int = 10_000) -> list[np.ndarray]:
    """All subsets of size >= 2 for n <= 12; otherwise all pairs plus
    `budget` seeded random subsets."""
    subsets: list[np.ndarray] = []
    if n <= 12:
        for mask in range(1, 1 << n):
            if mask & (mask - 1):  # at least two bits
                subsets.append(
                    np.array([i for i in range(n) if (mask >> i) & 1], dtype=np.int64)
                )
        return subsets
    for i in range(n):
        for j in range(i + 1, n):
            subsets.append(np.array([i, j], dtype=np.int64))
    for _ in range(budget):
        k = int(rng.integers(2, n + 1))
        subsets.append(np.sort(rng.choice(n, size=k, replace=False)))
    return subsets


def _perturb_uniform_trial(config: ExperimentConfig, trial: int) -> TrialRecord:
    rng = trial_rng(config.seed, trial)
    base = _uniform_space(config.n)
    perturbed = _perturb_within_half(base, rng)
    worst_diam_ratio = np.inf  # min over subsets of diam_e / diam_D
    worst_sep_ratio = 0.0  # max over subsets of sep_e / sep_D
    for subset in sample_subsets(config.n, rng):
        sub_e = perturbed.matrix[np.ix_(subset, subset)]
        sub_d = base.matrix[np.ix_(subset, subset)]
        off = ~np.eye(len(subset), dtype=bool)
        worst_diam_ratio = min(worst_diam_ratio, sub_e.max() / sub_d.max())
        worst_sep_ratio = max(worst_sep_ratio, sub_e[off].min() / sub_d[off].min())
    passed = worst_diam_ratio >= 0.5 and worst_sep_ratio <= 2.0
    return TrialRecord(
        trial=trial,
        digest=matrix_digest(perturbed),
        epsilon=0.5,
        achieved=sup_distance(perturbed, base).value,
        bound=0.5,
        passed=bool(passed),
        before={"diam_ratio_floor": 0.5, "sep_ratio_cap": 2.0},
        after={
            "min_diam_ratio": float(worst_diam_ratio),
            "max_sep_ratio": float(worst_sep_ratio),
        },
    )


def _perturb_chain_trial(config: ExperimentConfig, trial: int) -> TrialRecord:
    rng = trial_rng(config.seed, trial)
    n = config.n
    base = _progression_space(n)
    positions = np.arange(n, dtype=float) + rng.uniform(-0.24, 0.24, size=n)
    matrix = np.abs(positions[:, None] - positions[None, :])
    perturbed = validate(_point_labels(n), matrix, flavor=METRIC)
    base_mod = ud_modulus(base).delta_star
    pert_mod = ud_modulus(perturbed).delta_star
    passed = (
        sup_distance(perturbed, base).value < 0.5 and pert_mod <= 4 * base_mod
    )
    return TrialRecord(
        trial=trial,
        digest=matrix_digest(perturbed),
        epsilon=0.5,
        achieved=float(pert_mod),
        bound=float(4 * base_mod),
        passed=bool(passed),
        before={"delta_star": float(base_mod)},
        after={"delta_star": float(pert_mod)},
    )


def run_perturb(config: ExperimentConfig) -> list[TrialRecord]:
    trial_fn = (
        _perturb_uniform_trial
        if config.experiment == "perturb_uniform"
        else _perturb_chain_trial
    )
    records = []
    for trial in range(config.trials):
        try:
            records.append(trial_fn(config, trial))
        except MetricLabError as exc:
            records.append(
                TrialRecord(
                    trial=trial,
                    digest="",
                    epsilon=float("nan"),
                    achieved=float("nan"),
                    bound=float("nan"),
                    passed=False,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return records


ALL_TYPES = (
    (1, 1, 1),
    (0, 1, 1),
    (1, 0, 1),
    (1, 1, 0),
    (0, 1, 0),
    (1, 0, 0),
    (0, 0, 1),
    (0, 0, 0),
)


def grid_host(n: int, rng) -> FiniteMetricSpace:
    """Two tight uniform-ish clusters far apart: cluster spreads in
    [0.01, 0.02], cross distances in [sigma, sigma + 0.01] for a random
    sigma in [1.5, 2.5].  Triangle-valid by construction."""
    half = n // 2
    sigma = float(rng.uniform(1.5, 2.5))
    matrix = np.zeros((n, n))
    for block in (slice(0, half), slice(half, n)):
        size = block.stop - block.start
        intra = rng.uniform(0.01, 0.02, size=(size, size))
        intra = np.triu(intra, k=1)
        matrix[block, block] = intra + intra.T
    cross = sigma + rng.uniform(0.0, 0.01, size=(half, n - half))
    matrix[:half, half:] = cross
    matrix[half:, :half] = cross.T
    return validate(_point_labels(n), matrix, flavor=METRIC)


def _scaled_ring_matrix(count: int, diameter: float) -> np.ndarray:
    ids = np.arange(count)
    hops = np.abs(ids[:, None] - ids[None, :])
    hops = np.minimum(hops, count - hops)
    return (diameter / (count // 2)) * hops


def _fat_piece_matrix(count: int, diameter: float, gap: float) -> np.ndarray:
    """Three-level ultrametric: blocks at `gap`, block pairs at
    diameter / 8, everything else at `diameter`.  Block sizes are fixed
    fractions of the piece (40/64, 8/64, 12/64, 4/64), so one block
    always exceeds the default doubling threshold when count >= 54."""
    sizes = [
        max(1, round(count * 40 / 64)),
        max(1, round(count * 8 / 64)),
        max(1, round(count * 12 / 64)),
    ]
    sizes.append(count - sum(sizes))
    if sizes[-1] < 1:
        raise GenerationFailed(f"fat piece needs more than {count} points")
    bounds = np.cumsum([0] + sizes)
    matrix = np.full((count, count), diameter)
    mid = diameter / 8
    # groups: blocks (0, 1) and blocks (2, 3) meet at the middle level
    for lo, hi in ((0, 2), (2, 4)):
        span = slice(bounds[lo], bounds[hi])
        matrix[span, span] = mid
    for k in range(4):
        span = slice(bounds[k], bounds[k + 1])
        matrix[span, span] = gap
    np.fill_diagonal(matrix, 0.0)
    return matrix


def _gapped_ladder_matrix(count: int, diameter: float) -> np.ndarray:
    depth = math.ceil(math.log2(count))
    rungs = [diameter * 0.5 ** k for k in range(depth - 1)]
    rungs.append(0.01 * diameter * 0.5 ** max(0, depth - 2))
    table = np.append(np.array(rungs), 0.0)
    return table[_valuation_matrix(depth)][:count, :count]


def _grid_piece(style: str, labels, eps: float) -> FiniteMetricSpace:
    count = len(labels)
    if style == "geo":
        piece = geometric_prefix_ultrametric(count, top=eps)
        return FiniteMetricSpace(tuple(labels), piece.matrix, flavor=ULTRAMETRIC)
    if style == "ring":
        return validate(tuple(labels), _scaled_ring_matrix(count, eps), flavor=METRIC)
    if style == "gapped":
        return validate(
            tuple(labels), _gapped_ladder_matrix(count, eps), flavor=ULTRAMETRIC
        )
    if style == "fat":
        return validate(
            tuple(labels), _fat_piece_matrix(count, eps, eps / 32), flavor=ULTRAMETRIC
        )
    if style == "fat_offset":
        return validate(
            tuple(labels), _fat_piece_matrix(count, eps, eps / 16), flavor=ULTRAMETRIC
        )
    raise ValueError(f"unknown grid piece style {style!r}")


# Piece styles per type target: chosen so the amalgam's measured bits
# reproduce the target (doubling breaks inside a fat block; the chain
# bit breaks on a ring; perfectness breaks on a gapped ladder or on a
# separation mismatch between the two pieces).
GRID_PIECES = {
    (1, 1, 1): ("geo", "geo"),
    (0, 1, 1): ("fat", "fat"),
    (1, 0, 1): ("ring", "ring"),
    (1, 1, 0): ("gapped", "gapped"),
    (0, 1, 0): ("fat", "gapped"),
    (1, 0, 0): ("ring", "gapped"),
    (0, 0, 1): ("fat", "ring"),
    (0, 0, 0): ("fat_offset", "ring"),
}


def run_type_grid(config: ExperimentConfig) -> list[dict]:
    depth = config.depth
    n = 1 << depth
    rows = []
    for index, target in enumerate(ALL_TYPES):
        rng = trial_rng(config.seed, index)
        row = {
            "target": "".join(str(b) for b in target),
            "standalone": None,
            "amalgam": None,
            "sup_distance": None,
            "epsilon": None,
            "pass": False,
            "error": None,
        }
        try:
            standalone, recipe = generate_type(
                target, depth, seed=int(rng.integers(1 << 32)), thresholds=config.thresholds
            )
            row["recipe"] = recipe.recipe
            row["standalone"] = row["target"]  # generate_type re-measured it

            host = grid_host(n, rng)
            eps = _absolute_epsilon(config, host)
            partition = carve_pieces(host, eps)
            styles = GRID_PIECES[target]
            if len(partition.pieces) != len(styles):
                raise GenerationFailed(
                    f"carving produced {len(partition.pieces)} pieces, wanted {len(styles)}"
                )
            pieces = [
                _grid_piece(style, tuple(host.labels[i] for i in piece), eps)
                for style, piece in zip(styles, partition.pieces)
            ]
            amalgam = amalgamate_metric(host, partition, pieces)
            measured = classify(amalgam, thresholds=config.thresholds)
            row["amalgam"] = "".join(str(b) for b in measured.bits)
            row["sup_distance"] = sup_distance(amalgam, host).value
            row["epsilon"] = eps
            row["pass"] = bool(
                measured.bits == target and row["sup_distance"] <= 4 * eps
            )
        except (MetricLabError, GenerationFailed) as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


def run_experiment(config: ExperimentConfig) -> dict:
    """Dispatch, collect rows, and assemble the deterministic report."""
    if config.experiment == "type_grid":
        rows = run_type_grid(config)
    elif config.experiment.startswith("perturb"):
        rows = [record.to_row() for record in run_perturb(config)]
    else:
        rows = [record.to_row() for record in run_dense(config)]
    passes = [bool(row["pass"]) for row in rows]
    report = {
        "config": config.to_json(),
        "rows": rows,
        "summary": {
            "rows": len(rows),
            "passes": sum(passes),
            "pass_rate": sum(passes) / len(passes) if passes else 0.0,
            "all_pass": all(passes) if passes else False,
        },
    }
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_csv(report: dict) -> str:
    rows = report["rows"]
    columns = sorted({key for row in rows for key in row})
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def render_report(report: dict, fmt: str) -> str:
    if fmt == "csv":
        return report_csv(report)
    return report_json(report)
