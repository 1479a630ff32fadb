"""Finite metric and ultrametric spaces with validated distance matrices.

A space is a label list plus a square distance matrix plus a flavor
("metric" or "ultrametric").  :func:`validate` is the only sanctioned way
to build one from untrusted data; it checks the axioms in a fixed order
and reports the first violation with witnessing indices.  The two
distances between metrics on a common label list (:func:`sup_distance`
and :func:`ultra_distance`) and the shortest-path repair
(:func:`metric_closure`) live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricMatrix,
    LabelMismatch,
    NonpositiveOffDiagonal,
    NonzeroDiagonal,
    NotUltrametric,
    SeparationUndefined,
    StrongTriangleViolation,
    TriangleViolation,
    ValidationError,
    ValueOutsideRangeSet,
    ZeroOffDiagonal,
)
from .rangesets import RangeSet, contains, least_geq

# Relative validation tolerance: triangle slack is DEFAULT_TOL * (max entry).
# Pass tol=0 for exact checks on rationally-constructed matrices.
DEFAULT_TOL = 1e-9

METRIC = "metric"
ULTRAMETRIC = "ultrametric"
FLAVORS = (METRIC, ULTRAMETRIC)

SUP_METRIC = "sup_metric"
ULTRA_METRIC_OVER_S = "ultra_metric_over_S"


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A finite labeled point set with a distance matrix.

    Instances are immutable; the matrix is stored as a read-only float
    array.  Construction performs no axiom checking — use
    :func:`validate` for untrusted input.
    """

    labels: tuple[str, ...]
    matrix: np.ndarray
    flavor: str = METRIC

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        matrix = np.array(self.matrix, dtype=float, copy=True)
        matrix.setflags(write=False)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("matrix must be square")
        if matrix.shape[0] != len(labels):
            raise ValueError("matrix side must equal the number of labels")
        if len(labels) == 0:
            raise ValueError("a space needs at least one point")
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def diameter(self) -> float:
        return float(self.matrix.max())

    @property
    def separation(self) -> float:
        """Smallest positive pairwise distance (needs >= 2 points)."""
        if self.n < 2:
            raise SeparationUndefined("separation needs at least 2 points")
        off = ~np.eye(self.n, dtype=bool)
        return float(self.matrix[off].min())

    def restrict(self, indices) -> "FiniteMetricSpace":
        """Sub-space on the given indices (distances copied bit-exactly)."""
        idx = list(indices)
        sub = self.matrix[np.ix_(idx, idx)]
        labels = tuple(self.labels[i] for i in idx)
        return FiniteMetricSpace(labels, sub, self.flavor)

    def scaled(self, factor: float) -> "FiniteMetricSpace":
        """The same space with every distance multiplied by factor > 0."""
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return FiniteMetricSpace(self.labels, self.matrix * factor, self.flavor)


class SubsetStats:
    """Diameter / separation / cardinality of a point subset."""

    __slots__ = ("cardinality", "diameter", "_separation")

    def __init__(self, cardinality: int, diameter: float, separation=None):
        self.cardinality = int(cardinality)
        self.diameter = float(diameter)
        self._separation = None if separation is None else float(separation)

    @property
    def separation(self) -> float:
        if self._separation is None:
            raise SeparationUndefined(
                "separation is defined only for subsets with >= 2 points"
            )
        return self._separation

    def __repr__(self):
        sep = "undefined" if self._separation is None else repr(self._separation)
        return (
            f"SubsetStats(cardinality={self.cardinality}, "
            f"diameter={self.diameter!r}, separation={sep})"
        )


@dataclass(frozen=True)
class MetricDistance:
    """A distance between two metrics on a common label list."""

    value: float
    kind: str

    def __post_init__(self):
        if self.kind not in (SUP_METRIC, ULTRA_METRIC_OVER_S):
            raise ValueError(f"unknown distance kind {self.kind!r}")
        if not (self.value >= 0):
            raise ValueError("distance value must be nonnegative")


@dataclass(frozen=True)
class Violation:
    """Diagnosis of the first violated axiom of a candidate matrix."""

    axiom: str
    indices: tuple[int, ...]
    message: str

    _ERRORS = {
        "zero_diagonal": NonzeroDiagonal,
        "symmetry": AsymmetricMatrix,
        "positivity": NonpositiveOffDiagonal,
        "triangle": TriangleViolation,
        "strong_triangle": StrongTriangleViolation,
    }

    def to_error(self) -> ValidationError:
        return self._ERRORS[self.axiom](self.message, self.indices)


def _first_triangle_violation(matrix: np.ndarray, slack: float, strong: bool):
    """Lexicographically first (i, j, k) violating the (strong) triangle
    inequality, or None.  Works row-by-row to keep memory at O(n^2)."""
    n = matrix.shape[0]
    for i in range(n):
        row = matrix[i]
        if strong:
            bound = np.maximum(row[:, None], matrix)  # (k, j): max(d_ik, d_kj)
        else:
            bound = row[:, None] + matrix  # (k, j): d_ik + d_kj
        bad = row[None, :] > bound + slack  # (k, j): d_ij > bound
        if bad.any():
            where = np.argwhere(bad.T)  # (j, k) in lexicographic order
            j, k = (int(v) for v in where[0])
            return i, j, k
    return None


def diagnose(labels, matrix, flavor: str = METRIC, tol: float = DEFAULT_TOL):
    """Check the axioms in order; return a :class:`Violation` or None.

    Order: zero diagonal (exact), symmetry (exact), positivity (strict),
    triangle inequality within tol * max-entry, and additionally the
    strong triangle inequality for the ultrametric flavor.
    """
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    n = m.shape[0]
    if n != len(tuple(labels)):
        raise ValueError("matrix side must equal the number of labels")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")

    diag = np.diagonal(m)
    if (diag != 0).any():
        i = int(np.nonzero(diag != 0)[0][0])
        return Violation(
            "zero_diagonal", (i, i), f"diagonal entry ({i},{i}) = {float(m[i, i])!r} != 0"
        )
    asym = m != m.T
    if asym.any():
        i, j = (int(v) for v in np.argwhere(asym)[0])
        return Violation(
            "symmetry",
            (i, j),
            f"entry ({i},{j}) = {float(m[i, j])!r} differs from ({j},{i}) = {float(m[j, i])!r}",
        )
    offdiag = ~np.eye(n, dtype=bool)
    nonpos = offdiag & (m <= 0)
    if nonpos.any():
        i, j = (int(v) for v in np.argwhere(nonpos)[0])
        return Violation(
            "positivity", (i, j), f"off-diagonal entry ({i},{j}) = {float(m[i, j])!r} <= 0"
        )

    slack = tol * float(m.max()) if n > 1 else 0.0
    hit = _first_triangle_violation(m, slack, strong=False)
    if hit is not None:
        i, j, k = hit
        return Violation(
            "triangle",
            (i, j, k),
            f"d({i},{j}) = {float(m[i, j])!r} > d({i},{k}) + d({k},{j}) = "
            f"{float(m[i, k] + m[k, j])!r} (slack {float(slack)!r})",
        )
    if flavor == ULTRAMETRIC:
        hit = _first_triangle_violation(m, slack, strong=True)
        if hit is not None:
            i, j, k = hit
            return Violation(
                "strong_triangle",
                (i, j, k),
                f"d({i},{j}) = {float(m[i, j])!r} > max(d({i},{k}), d({k},{j})) = "
                f"{float(max(m[i, k], m[k, j]))!r} (slack {float(slack)!r})",
            )
    return None


def validate(labels, matrix, flavor: str = METRIC, tol: float = DEFAULT_TOL) -> FiniteMetricSpace:
    """Validate a candidate distance matrix and wrap it in a space.

    Raises the typed error for the first violated axiom; the error's
    `indices` attribute names the witnessing entries / triple.
    """
    violation = diagnose(labels, matrix, flavor=flavor, tol=tol)
    if violation is not None:
        raise violation.to_error()
    return FiniteMetricSpace(tuple(labels), matrix, flavor)


def subset_stats(space: FiniteMetricSpace, indices) -> SubsetStats:
    """Cardinality, diameter, and separation of a subset of points."""
    idx = np.unique(np.asarray(list(indices), dtype=int))
    if idx.size == 0:
        raise ValueError("subset must be nonempty")
    if idx.min() < 0 or idx.max() >= space.n:
        raise ValueError("subset indices out of range")
    if idx.size == 1:
        return SubsetStats(1, 0.0, None)
    sub = space.matrix[np.ix_(idx, idx)]
    off = ~np.eye(idx.size, dtype=bool)
    return SubsetStats(idx.size, float(sub.max()), float(sub[off].min()))


def _require_shared_labels(d: FiniteMetricSpace, e: FiniteMetricSpace):
    if d.labels != e.labels:
        raise LabelMismatch(
            "spaces must share the same label list in the same order"
        )


def sup_distance(d: FiniteMetricSpace, e: FiniteMetricSpace) -> MetricDistance:
    """Largest absolute difference of distances over all pairs."""
    _require_shared_labels(d, e)
    value = float(np.abs(d.matrix - e.matrix).max())
    return MetricDistance(value, SUP_METRIC)


def ultra_distance(
    d: FiniteMetricSpace,
    e: FiniteMetricSpace,
    S: RangeSet,
    tol: float = DEFAULT_TOL,
) -> MetricDistance:
    """Least element of S (or +inf) covering every differing pair.

    For S-valued ultrametrics d, e this equals the least epsilon in
    S u {inf} with d <= max(e, epsilon) and e <= max(d, epsilon)
    pairwise: epsilon must dominate M = max over differing pairs of
    max(d, e), and the answer is the least element of S >= M (0 when
    d = e).  Inputs must be ultrametric-flavored with S-valued entries
    (within tol * scale).
    """
    _require_shared_labels(d, e)
    if d.flavor != ULTRAMETRIC or e.flavor != ULTRAMETRIC:
        raise NotUltrametric("ultra_distance needs ultrametric-flavored spaces")
    scale = max(d.diameter, e.diameter)
    slack = tol * scale
    off = ~np.eye(d.n, dtype=bool)
    for name, space in (("first", d), ("second", e)):
        for value in np.unique(space.matrix[off]):
            if not contains(S, float(value), slack):
                raise ValueOutsideRangeSet(
                    f"{name} space has off-diagonal value {value!r} outside S"
                )
    differ = d.matrix != e.matrix
    if not differ.any():
        return MetricDistance(0.0, ULTRA_METRIC_OVER_S)
    m_needed = float(np.maximum(d.matrix, e.matrix)[differ].max())
    return MetricDistance(float(least_geq(S, m_needed)), ULTRA_METRIC_OVER_S)


def metric_closure(labels, raw) -> FiniteMetricSpace:
    """Shortest-path repair of a symmetric positive dissimilarity matrix.

    Returns the largest metric below the raw matrix (all-pairs minimum
    path sums, Floyd-Warshall).  The raw matrix must be symmetric with a
    zero diagonal and strictly positive off-diagonal entries.
    """
    m = np.array(raw, dtype=float, copy=True)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    n = m.shape[0]
    if n != len(tuple(labels)):
        raise ValueError("matrix side must equal the number of labels")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    diag = np.diagonal(m)
    if (diag != 0).any():
        i = int(np.nonzero(diag != 0)[0][0])
        raise NonzeroDiagonal(f"diagonal entry ({i},{i}) != 0", (i, i))
    asym = m != m.T
    if asym.any():
        i, j = (int(v) for v in np.argwhere(asym)[0])
        raise AsymmetricMatrix(f"entry ({i},{j}) != ({j},{i})", (i, j))
    offdiag = ~np.eye(n, dtype=bool)
    zero = offdiag & (m == 0)
    if zero.any():
        i, j = (int(v) for v in np.argwhere(zero)[0])
        raise ZeroOffDiagonal(
            f"off-diagonal entry ({i},{j}) is zero (would merge points)"
        )
    neg = offdiag & (m < 0)
    if neg.any():
        i, j = (int(v) for v in np.argwhere(neg)[0])
        raise NonpositiveOffDiagonal(f"off-diagonal entry ({i},{j}) < 0", (i, j))

    for k in range(n):
        np.minimum(m, m[:, k : k + 1] + m[k : k + 1, :], out=m)
    return validate(labels, m, flavor=METRIC)


def space_to_json(space: FiniteMetricSpace) -> dict:
    """JSON-ready object: {"labels": [...], "matrix": [[...]], "flavor": ...}."""
    return {
        "labels": list(space.labels),
        "matrix": space.matrix.tolist(),
        "flavor": space.flavor,
    }


def space_from_json(obj: dict, tol: float = DEFAULT_TOL) -> FiniteMetricSpace:
    """Parse and re-validate a space from its JSON object form."""
    try:
        labels = obj["labels"]
        matrix = obj["matrix"]
        flavor = obj.get("flavor", METRIC)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed space object: {exc}") from exc
    return validate(labels, np.asarray(matrix, dtype=float), flavor=flavor, tol=tol)
