"""Constructions: amalgamation over a partition, Lipschitz extension,
landmark max-norm embeddings, metric extension, and the three
approximation pipelines.

The central device is amalgamation: given a host metric d, a partition
into pieces with basepoints, and a replacement metric on each piece,
glue the replacements with the host bridging distinct pieces,

* sum form      D(x, y) = e_i(x, p_i) + d(p_i, p_j) + e_j(p_j, y),
* max form      D(x, y) = e_i(x, p_i) v d(p_i, p_j) v e_j(p_j, y),

keeping intra-piece blocks bit-exact.  When host pieces and
replacements all have diameter <= eps, the sum form moves the metric by
at most 4 * eps in the sup distance and the max form by at most eps in
the range-set-valued ultrametric distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cantor import (
    _valuation_matrix,
    cantor_prefix_metric,
    geometric_prefix_ultrametric,
)
from .errors import (
    NotLipschitzOnSubset,
    NotUltrametric,
    PieceMismatch,
    TooFewPoints,
    ValueOutsideRangeSet,
)
from .moduli import UDReport, ud_modulus, up_constant
from .rangesets import RangeSet, contains, greatest_leq, ladder
from .spaces import (
    DEFAULT_TOL,
    METRIC,
    ULTRAMETRIC,
    FiniteMetricSpace,
    validate,
)


@dataclass(frozen=True)
class ClopenPartition:
    """Disjoint pieces covering all indices, with one basepoint per piece."""

    pieces: tuple[tuple[int, ...], ...]
    basepoints: tuple[int, ...]

    def __post_init__(self):
        pieces = tuple(tuple(sorted(int(i) for i in piece)) for piece in self.pieces)
        basepoints = tuple(int(b) for b in self.basepoints)
        if not pieces or any(not piece for piece in pieces):
            raise ValueError("pieces must be nonempty")
        if len(basepoints) != len(pieces):
            raise ValueError("one basepoint per piece required")
        seen: list[int] = []
        for piece in pieces:
            seen.extend(piece)
        if len(seen) != len(set(seen)):
            raise ValueError("pieces must be disjoint")
        if set(seen) != set(range(len(seen))):
            raise ValueError("pieces must cover indices 0..n-1 exactly")
        for piece, bp in zip(pieces, basepoints):
            if bp not in piece:
                raise ValueError(f"basepoint {bp} not in its piece {piece}")
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "basepoints", basepoints)

    @property
    def n(self) -> int:
        return sum(len(piece) for piece in self.pieces)

    def piece_of(self) -> np.ndarray:
        """Index -> piece number, as an integer array."""
        owner = np.empty(self.n, dtype=np.int64)
        for k, piece in enumerate(self.pieces):
            owner[list(piece)] = k
        return owner

    def to_json(self) -> dict:
        return {
            "pieces": [list(piece) for piece in self.pieces],
            "basepoints": list(self.basepoints),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ClopenPartition":
        try:
            return cls(
                tuple(tuple(int(i) for i in piece) for piece in obj["pieces"]),
                tuple(int(b) for b in obj["basepoints"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed partition object: {exc}") from exc


@dataclass(frozen=True)
class Embedding:
    """Per-point coordinate vectors, compared under the max norm."""

    coordinates: np.ndarray = field(repr=False)

    def __post_init__(self):
        coords = np.array(self.coordinates, dtype=float, copy=True)
        if coords.ndim != 2:
            raise ValueError("coordinates must be a 2-D array (points x axes)")
        if not np.isfinite(coords).all():
            raise ValueError("coordinates must be finite")
        coords.setflags(write=False)
        object.__setattr__(self, "coordinates", coords)

    @property
    def count(self) -> int:
        return self.coordinates.shape[0]

    @property
    def dimension(self) -> int:
        return self.coordinates.shape[1]

    def pairwise_linf(self) -> np.ndarray:
        return pairwise_linf(self.coordinates)

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "coordinates": self.coordinates.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Embedding":
        try:
            coords = np.array(obj["coordinates"], dtype=float)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed embedding object: {exc}") from exc
        if coords.ndim != 2 or coords.shape[1] != int(obj.get("dimension", coords.shape[1])):
            raise ValueError("embedding dimension disagrees with coordinates")
        return cls(coords)


def pairwise_linf(coords: np.ndarray) -> np.ndarray:
    """Max-norm distance matrix of row vectors (row blocks keep memory flat)."""
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[0]
    out = np.empty((n, n))
    step = max(1, (1 << 22) // max(1, n * coords.shape[1]))
    for start in range(0, n, step):
        stop = min(n, start + step)
        out[start:stop] = np.abs(
            coords[start:stop, None, :] - coords[None, :, :]
        ).max(axis=2)
    return out


def _check_pieces(
    d: FiniteMetricSpace,
    partition: ClopenPartition,
    pieces_metrics,
) -> None:
    if partition.n != d.n:
        raise PieceMismatch(
            f"partition covers {partition.n} indices, space has {d.n} points"
        )
    if len(pieces_metrics) != len(partition.pieces):
        raise PieceMismatch(
            f"{len(partition.pieces)} pieces but {len(pieces_metrics)} piece metrics"
        )
    for k, (piece, metric) in enumerate(zip(partition.pieces, pieces_metrics)):
        expected = tuple(d.labels[i] for i in piece)
        if metric.labels != expected:
            raise PieceMismatch(
                f"piece {k} metric is on {metric.labels!r}, expected {expected!r}"
            )


def _assemble(
    d: FiniteMetricSpace,
    partition: ClopenPartition,
    pieces_metrics,
    combine,
) -> np.ndarray:
    owner = partition.piece_of()
    arm = np.empty(d.n)
    for piece, bp, metric in zip(partition.pieces, partition.basepoints, pieces_metrics):
        local_bp = piece.index(bp)
        arm[list(piece)] = metric.matrix[:, local_bp]
    bp_of = np.asarray(partition.basepoints, dtype=np.int64)[owner]
    bridge = d.matrix[np.ix_(bp_of, bp_of)]
    out = combine(arm[:, None], bridge, arm[None, :])
    for piece, metric in zip(partition.pieces, pieces_metrics):
        out[np.ix_(piece, piece)] = metric.matrix
    return out


def amalgamate_metric(
    d: FiniteMetricSpace,
    partition: ClopenPartition,
    pieces_metrics,
    tol: float = DEFAULT_TOL,
) -> FiniteMetricSpace:
    """Sum-form amalgam: intra-piece by the piece metric, across pieces
    e_i(x, p_i) + d(p_i, p_j) + e_j(p_j, y).  Intra-piece blocks are
    copied bit-exactly."""
    _check_pieces(d, partition, pieces_metrics)
    # (a + b) + m rather than a + m + b: float addition commutes, so this
    # grouping (with the exactly-symmetric bridge m) keeps the output
    # exactly symmetric.
    matrix = _assemble(d, partition, pieces_metrics, lambda a, m, b: (a + b) + m)
    return validate(d.labels, matrix, flavor=METRIC, tol=tol)


def amalgamate_ultrametric(
    d: FiniteMetricSpace,
    partition: ClopenPartition,
    pieces_metrics,
    S: RangeSet,
    tol: float = DEFAULT_TOL,
) -> FiniteMetricSpace:
    """Max-form amalgam over a range set S.

    The host and every piece must be ultrametric with values in S; the
    output takes maxima of existing values only, so it stays S-valued.
    """
    if d.flavor != ULTRAMETRIC:
        raise NotUltrametric("the host of a max-form amalgam must be ultrametric")
    for k, metric in enumerate(pieces_metrics):
        if metric.flavor != ULTRAMETRIC:
            raise NotUltrametric(f"piece {k} is not ultrametric-flavored")
    _check_pieces(d, partition, pieces_metrics)
    slack = tol * max(1.0, float(d.matrix.max()))
    for matrix in [d.matrix] + [m.matrix for m in pieces_metrics]:
        for v in np.unique(matrix):
            if v > 0 and not contains(S, float(v), tol=slack):
                raise ValueOutsideRangeSet(f"value {v!r} is not in the range set")
    matrix = _assemble(
        d, partition, pieces_metrics, lambda a, m, b: np.maximum(np.maximum(a, m), b)
    )
    return validate(d.labels, matrix, flavor=ULTRAMETRIC, tol=tol)


def mcshane_extend(
    space: FiniteMetricSpace,
    subset,
    values,
    lip: float,
    tol: float = DEFAULT_TOL,
):
    """Extend an l-Lipschitz map on a subset to the whole space.

    F(x) = min over a in subset of (values[a] + lip * d(x, a)), applied
    per component for vector values; the restriction to the subset is
    then overwritten with the inputs so it holds bit-exactly.  The
    Lipschitz hypothesis is verified on the subset first (max-norm
    componentwise for vectors).
    """
    subset = [int(i) for i in subset]
    if not subset:
        raise ValueError("subset must be nonempty")
    if len(set(subset)) != len(subset):
        raise ValueError("subset indices must be distinct")
    f = np.array(values, dtype=float)
    scalar = f.ndim == 1
    if scalar:
        f = f[:, None]
    if f.shape[0] != len(subset):
        raise ValueError(f"{f.shape[0]} values for {len(subset)} subset points")
    # values stay paired with their subset indices under the sort
    order = np.argsort(np.asarray(subset, dtype=np.int64), kind="stable")
    subset = [subset[k] for k in order]
    f = f[order]
    if not lip >= 0:
        raise ValueError("the Lipschitz constant must be nonnegative")

    sub_d = space.matrix[np.ix_(subset, subset)]
    spread = np.abs(f[:, None, :] - f[None, :, :]).max(axis=2)
    slack = tol * max(1.0, float(np.abs(f).max()), lip * float(sub_d.max()))
    bad = spread > lip * sub_d + slack
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NotLipschitzOnSubset(
            f"|f({subset[i]}) - f({subset[j]})| = {float(spread[i, j])!r} exceeds "
            f"lip * d = {float(lip * sub_d[i, j])!r}"
        )

    extended = (f[None, :, :] + lip * space.matrix[:, subset][:, :, None]).min(axis=1)
    extended[subset] = f
    return extended[:, 0] if scalar else extended


def kuratowski_embed(space: FiniteMetricSpace, landmarks) -> Embedding:
    """Coordinates x -> (d(x, p)) over landmarks: 1-Lipschitz into the
    max norm, isometric on the landmark set itself."""
    landmarks = sorted(int(i) for i in landmarks)
    if not landmarks:
        raise ValueError("landmarks must be nonempty")
    return Embedding(space.matrix[:, landmarks])


def extend_metric(
    ambient: FiniteMetricSpace,
    subset,
    inner: FiniteMetricSpace,
    tol: float = DEFAULT_TOL,
) -> FiniteMetricSpace:
    """A metric on all points that restricts to `inner` on `subset`,
    built by amalgamating with the subset as one piece and every other
    point as a singleton."""
    subset = tuple(sorted(int(i) for i in subset))
    rest = [i for i in range(ambient.n) if i not in set(subset)]
    pieces = (subset,) + tuple((i,) for i in rest)
    basepoints = (subset[0],) + tuple(rest)
    partition = ClopenPartition(pieces, basepoints)
    piece_metrics = [inner] + [ambient.restrict([i]) for i in rest]
    return amalgamate_metric(ambient, partition, piece_metrics, tol=tol)


def greedy_net(space: FiniteMetricSpace, eps: float) -> list[int]:
    """Farthest-point net: eps-separated and an eps-cover.

    Starts at index 0 and keeps adding the point farthest from the net
    until everything lies strictly within eps of it; ties go to the
    lowest index.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    net = [0]
    dist = space.matrix[0].copy()
    while True:
        far = int(np.argmax(dist))
        if dist[far] < eps:
            return net
        net.append(far)
        np.minimum(dist, space.matrix[far], out=dist)


def carve_pieces(space: FiniteMetricSpace, eps: float) -> ClopenPartition:
    """Greedy ball carving: repeatedly take the lowest-index remaining
    point and its closed eps/2-ball among remaining points as a piece
    (so every piece has diameter <= eps), with the center as basepoint."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    remaining = np.ones(space.n, dtype=bool)
    pieces = []
    basepoints = []
    while remaining.any():
        center = int(np.argmax(remaining))
        ball = remaining & (space.matrix[center] <= eps / 2)
        pieces.append(tuple(np.nonzero(ball)[0].tolist()))
        basepoints.append(center)
        remaining &= ~ball
    return ClopenPartition(tuple(pieces), tuple(basepoints))


def merge_singletons(
    space: FiniteMetricSpace, partition: ClopenPartition
) -> ClopenPartition:
    """Fold each singleton piece into the piece of its nearest other
    point (lowest index on ties), until every piece has >= 2 points."""
    if space.n < 2:
        raise TooFewPoints("cannot merge singletons with fewer than 2 points")
    pieces = [list(piece) for piece in partition.pieces]
    basepoints = list(partition.basepoints)
    while True:
        lone = [k for k, piece in enumerate(pieces) if len(piece) == 1]
        if not lone:
            break
        k = min(lone, key=lambda k: pieces[k][0])
        x = pieces[k][0]
        row = space.matrix[x].copy()
        row[x] = np.inf
        nearest = int(np.argmin(row))
        home = next(j for j, piece in enumerate(pieces) if nearest in piece)
        pieces[home] = sorted(pieces[home] + [x])
        del pieces[k]
        if home > k:
            home -= 1
        del basepoints[k]
    return ClopenPartition(tuple(tuple(p) for p in pieces), tuple(basepoints))


def _relabel(space: FiniteMetricSpace, labels) -> FiniteMetricSpace:
    return FiniteMetricSpace(tuple(labels), space.matrix, flavor=space.flavor)


def approximate_doubling(
    d: FiniteMetricSpace, eps: float
) -> tuple[FiniteMetricSpace, Embedding]:
    """Replace d by the max-norm metric of an explicit embedding, moving
    it by at most 4 * eps.

    A farthest-point net is embedded by its own distance rows
    (isometrically, into the max norm); each coordinate is extended
    1-Lipschitz to all points; one extra axis holds an injective map
    with image diameter < eps.  The output metric IS the max-norm
    metric of the returned coordinates, which certifies the doubling
    property analytically.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    net = greedy_net(d, eps)
    net_rows = d.matrix[np.ix_(net, net)]
    lipschitz = mcshane_extend(d, net, net_rows, lip=1.0)
    aux = (np.arange(d.n, dtype=float) * (eps / (2 * d.n)))[:, None]
    embedding = Embedding(np.hstack([lipschitz, aux]))
    matrix = embedding.pairwise_linf()
    return validate(d.labels, matrix, flavor=METRIC), embedding


def default_metric_piece(labels, target_diameter: float) -> FiniteMetricSpace:
    """Default replacement piece: geometric sequential ultrametric of
    diameter exactly `target_diameter` (or a single point)."""
    piece = geometric_prefix_ultrametric(len(labels), top=target_diameter)
    return _relabel(piece, labels)


def approximate_ud(
    d: FiniteMetricSpace,
    eps: float,
    piece_builder=None,
    S: RangeSet | None = None,
    tol: float = DEFAULT_TOL,
) -> tuple[FiniteMetricSpace, UDReport]:
    """Replace d by a uniformly disconnected metric within 4 * eps.

    Pieces of diameter <= eps are carved greedily and replaced by
    ultrametrics of diameter <= eps (default: geometric sequential
    ladders), then glued by the sum form.  When a range set S is given
    the host must be an S-valued ultrametric; the pieces take their
    rungs from S and the max form is used instead, moving d by at most
    eps in the range-set ultrametric distance.  The measured
    disconnectedness modulus of the output ships with it.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    partition = carve_pieces(d, eps)
    piece_spaces = []
    for piece in partition.pieces:
        labels = tuple(d.labels[i] for i in piece)
        if piece_builder is not None:
            piece_spaces.append(piece_builder(labels, eps))
        elif S is None:
            piece_spaces.append(default_metric_piece(labels, eps))
        else:
            piece_spaces.append(_s_valued_piece(labels, eps, S))
    if S is None:
        out = amalgamate_metric(d, partition, piece_spaces, tol=tol)
    else:
        out = amalgamate_ultrametric(d, partition, piece_spaces, S, tol=tol)
    return out, ud_modulus(out)


def _s_valued_piece(labels, eps: float, S: RangeSet) -> FiniteMetricSpace:
    """Sequential ultrametric on len(labels) points with rungs from S,
    diameter = greatest element of S below eps."""
    count = len(labels)
    if count == 1:
        return FiniteMetricSpace(tuple(labels), np.zeros((1, 1)), flavor=ULTRAMETRIC)
    top = greatest_leq(S, eps)
    if top == 0.0:
        raise ValueOutsideRangeSet(f"no positive element of S lies below {eps!r}")
    depth = math.ceil(math.log2(count))
    rungs = ladder(S, top, depth)
    table = np.append(np.asarray(rungs, dtype=float), 0.0)
    matrix = table[_valuation_matrix(depth)][:count, :count]
    return validate(tuple(labels), matrix, flavor=ULTRAMETRIC)


@dataclass(frozen=True)
class UPApproximation:
    """Report for approximate_up: the measured perfectness constant of
    the output, the guaranteed floor, and the quantities feeding it."""

    c_star: float
    bound: float
    r_min: float
    eps: float
    eps_effective: float
    piece_c_min: float
    min_piece_diameter: float
    partition: ClopenPartition


def approximate_up(
    d: FiniteMetricSpace, eps: float, tol: float = DEFAULT_TOL
) -> tuple[FiniteMetricSpace, UPApproximation]:
    """Replace d by a uniformly perfect metric.

    Pieces are carved at diameter <= eps, singletons folded into their
    nearest piece (every piece must hold >= 2 points), and each piece
    replaced by an eps-scaled middle-third prefix metric at a common
    string depth, so all pieces share the same smallest positive
    distance r_min.  The sum-form amalgam then satisfies

        c_star(output) >= (1/2) * min(piece c_star floor, m / diameter)

    at r_min, where m is the smallest piece diameter; and it stays
    within 4 * eps_effective of d, where eps_effective = max(eps,
    largest piece diameter under d) accounts for merged pieces that
    outgrew eps.
    """
    if d.n < 2:
        raise TooFewPoints("approximate_up needs at least 2 points")
    if not eps > 0:
        raise ValueError("eps must be positive")
    partition = merge_singletons(d, carve_pieces(d, eps))
    depth = max(
        max(1, math.ceil(math.log2(len(piece)))) for piece in partition.pieces
    )
    piece_spaces = [
        _relabel(
            cantor_prefix_metric(len(piece), scale=eps, depth=depth),
            tuple(d.labels[i] for i in piece),
        )
        for piece in partition.pieces
    ]
    host_piece_diameter = max(
        float(d.matrix[np.ix_(piece, piece)].max()) for piece in partition.pieces
    )
    eps_effective = max(eps, host_piece_diameter)
    out = amalgamate_metric(d, partition, piece_spaces, tol=tol)

    r_min = min(piece.separation for piece in piece_spaces)
    piece_cs = [
        up_constant(piece, r_min).c_star if piece.diameter > r_min else 0.0
        for piece in piece_spaces
    ]
    min_piece_diameter = min(piece.diameter for piece in piece_spaces)
    if out.diameter > r_min:
        c_star = up_constant(out, r_min).c_star
    else:
        c_star = 0.0
    bound = 0.5 * min(min(piece_cs), min_piece_diameter / out.diameter)
    report = UPApproximation(
        c_star=c_star,
        bound=bound,
        r_min=r_min,
        eps=eps,
        eps_effective=eps_effective,
        piece_c_min=min(piece_cs),
        min_piece_diameter=min_piece_diameter,
        partition=partition,
    )
    return out, report
