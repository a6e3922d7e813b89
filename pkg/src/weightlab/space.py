"""Finite metric measure spaces and their ball structure.

Provides:
  * FiniteMetricMeasureSpace: n points, pairwise distances, positive masses.
  * BallFamily: per-center sorted-distance index with measure prefix sums.
    Every ball of the space is a closed sub-level set of dist(center, .) at
    one of the center's distinct distances, so the family is a complete,
    finite realization of all balls.
  * Ball enumeration, the doubling constant, and the annular decay constant,
    each with an extremal witness.
  * Generators for standard space families and a JSON document format.

Radius conventions. Balls are open, B(x, r) = {y : dist(x, y) < r}. On a
finite space the map r -> B(x, r) is a step function whose realized values
are exactly the closed sub-level sets at the distinct distances from x, so
each Ball is stored by (center, rank) where rank k picks the k-th smallest
distinct distance (rank 1 is distance 0, the singleton).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    AsymmetricDistance,
    EmptyRadiusRange,
    InvalidParams,
    NonpositiveMeasure,
    ParseError,
    TriangleViolation,
    ZeroDistanceDistinctPoints,
)

TRIANGLE_TOL_FACTOR = 1e-9  # tolerance = factor * max distance

METRIC_KINDS = ("euclidean", "l1", "linf", "graph-shortest-path", "explicit-matrix")


@dataclass(frozen=True, eq=False)
class FiniteMetricMeasureSpace:
    """A finite metric space with a strictly positive point measure.

    Immutable after construction; the distance matrix and measure vector are
    marked read-only so the cached BallFamily stays valid under concurrent
    reads.
    """

    dist: np.ndarray
    measure: np.ndarray
    metric_kind: str = "explicit-matrix"
    coords: np.ndarray | None = None

    def __post_init__(self):
        self.dist.flags.writeable = False
        self.measure.flags.writeable = False
        if self.coords is not None:
            self.coords.flags.writeable = False

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def total_mass(self) -> float:
        return float(self.measure.sum())

    @property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    @cached_property
    def ball_family(self) -> "BallFamily":
        return BallFamily(self)

    def distinct_distances(self, center: int) -> np.ndarray:
        """Sorted distinct distances from a center, starting with 0."""
        return np.unique(self.dist[center])


@dataclass(frozen=True)
class BallRef:
    """Lightweight handle of one realized ball."""

    center: int
    rank: int  # 1-based among the center's distinct distances
    radius: float  # the rank-th smallest distinct distance from the center


@dataclass(frozen=True, eq=False)
class Ball:
    """A realized ball: closed sub-level set of dist(center, .) at `radius`."""

    center: int
    rank: int
    radius: float
    members: np.ndarray  # ascending point ids

    def key(self) -> bytes:
        return self.members.tobytes()


class BallFamily:
    """Per-center nearest-first index with prefix sums.

    For each center the points are sorted by (distance, id); a prefix of
    length j is a realized ball iff position j-1 ends a tie group of equal
    distances. All per-ball averages reduce to prefix-sum lookups at those
    boundary positions, in a fixed summation order (ascending distance, then
    id), which makes every downstream constant reproducible bit for bit.
    """

    def __init__(self, space: FiniteMetricMeasureSpace):
        self.space = space
        n = space.n
        dist = space.dist
        # int32 indices halve the memory traffic of the operator sweeps
        self.index_dtype = np.int32 if n <= 30_000 else np.int64
        # stable sort: ties in distance resolve to ascending point id
        self.order = np.argsort(dist, axis=1, kind="stable").astype(self.index_dtype)
        self.sorted_dist = np.take_along_axis(dist, self.order, axis=1)
        self.sorted_measure = space.measure[self.order]
        self.prefix_measure = np.cumsum(self.sorted_measure, axis=1)
        # prefix ending at position i is a ball iff the next distance differs
        self.is_ball_end = np.empty((n, n), dtype=bool)
        if n > 1:
            self.is_ball_end[:, :-1] = self.sorted_dist[:, 1:] > self.sorted_dist[:, :-1]
        self.is_ball_end[:, -1] = True
        self.not_ball_end = ~self.is_ball_end
        # rank (1-based) of the ball ending at each boundary position
        self.rank_at_pos = np.cumsum(self.is_ball_end, axis=1,
                                     dtype=self.index_dtype)
        self.rank_count = self.rank_at_pos[:, -1].copy()
        # position of every point in every center's order (inverse permutation)
        self.pos = np.empty((n, n), dtype=self.index_dtype)
        rows = np.arange(n)[:, None]
        self.pos[rows, self.order] = np.arange(n, dtype=self.index_dtype)[None, :]

    @property
    def n(self) -> int:
        return self.space.n

    def averages_at_pos(self, f: np.ndarray) -> np.ndarray:
        """Average of f over each prefix, in fixed ascending order.

        Entry (c, i) is the measure-weighted average of f over the first
        i+1 points nearest to center c. Column 0 is set to f(center)
        exactly, so singleton balls average without round-off. Works in
        one fresh buffer to keep large-n memory traffic down.
        """
        fs = f[self.order]
        f_center = fs[:, 0].copy()
        np.multiply(fs, self.sorted_measure, out=fs)
        np.cumsum(fs, axis=1, out=fs)
        np.divide(fs, self.prefix_measure, out=fs)
        fs[:, 0] = f_center
        return fs

    def running_min_at_pos(self, f: np.ndarray) -> np.ndarray:
        fs = f[self.order]
        np.minimum.accumulate(fs, axis=1, out=fs)
        return fs

    def running_max_at_pos(self, f: np.ndarray) -> np.ndarray:
        fs = f[self.order]
        np.maximum.accumulate(fs, axis=1, out=fs)
        return fs

    def end_positions(self, center: int) -> np.ndarray:
        return np.nonzero(self.is_ball_end[center])[0]

    def ball_at(self, center: int, rank: int) -> Ball:
        ends = self.end_positions(center)
        if not 1 <= rank <= len(ends):
            raise InvalidParams(f"rank {rank} out of range for center {center}")
        end = ends[rank - 1]
        members = np.sort(self.order[center, : end + 1])
        return Ball(center, rank, float(self.sorted_dist[center, end]), members)

    def ball_at_pos(self, center: int, pos: int) -> Ball:
        rank = int(self.rank_at_pos[center, pos])
        members = np.sort(self.order[center, : pos + 1])
        return Ball(center, rank, float(self.sorted_dist[center, pos]), members)

    def sup_over_balls(self, values_at_pos: np.ndarray):
        """Max of a per-prefix table over realized balls, with witness.

        Returns (value, BallRef). Ties resolve to the smallest center id,
        then the smallest rank (row-major scan order), deterministically.
        """
        masked = np.where(self.is_ball_end, values_at_pos, -np.inf)
        flat = int(masked.argmax())
        c, p = divmod(flat, self.n)
        return float(masked[c, p]), BallRef(c, int(self.rank_at_pos[c, p]),
                                            float(self.sorted_dist[c, p]))


def _validate_matrix(dist: np.ndarray, check_triangle: bool = True) -> None:
    n = dist.shape[0]
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise AsymmetricDistance("distance matrix must be square")
    if not np.all(np.isfinite(dist)):
        raise AsymmetricDistance("distance matrix has non-finite entries")
    if np.any(np.diag(dist) != 0.0):
        raise ZeroDistanceDistinctPoints("nonzero diagonal entry")
    if not np.array_equal(dist, dist.T):
        i, j = np.unravel_index(int(np.abs(dist - dist.T).argmax()), dist.shape)
        raise AsymmetricDistance(f"dist({i},{j}) != dist({j},{i})")
    off = dist[~np.eye(n, dtype=bool)]
    if off.size and off.min() <= 0.0:
        raise ZeroDistanceDistinctPoints("distinct points at distance <= 0")
    if check_triangle and n >= 3:
        tol = TRIANGLE_TOL_FACTOR * float(dist.max())
        worst = (0.0, (0, 0, 0))
        for j in range(n):
            slack = dist - (dist[:, j][:, None] + dist[j][None, :])
            m = float(slack.max())
            if m > worst[0]:
                i, k = np.unravel_index(int(slack.argmax()), slack.shape)
                worst = (m, (int(i), j, int(k)))
        if worst[0] > tol:
            i, j, k = worst[1]
            raise TriangleViolation(i, j, k, worst[0])


def _coords_to_dist(coords: np.ndarray, metric_kind: str) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    if metric_kind == "euclidean":
        return np.sqrt((diff * diff).sum(axis=2))
    if metric_kind == "l1":
        return np.abs(diff).sum(axis=2)
    if metric_kind == "linf":
        return np.abs(diff).max(axis=2)
    raise InvalidParams(f"metric kind {metric_kind!r} needs no coordinates")


def _graph_shortest_path(weights: np.ndarray) -> np.ndarray:
    """All-pairs shortest path over a dense nonnegative adjacency matrix.

    Entries of `weights` are edge lengths; np.inf marks a missing edge.
    Floyd-Warshall, vectorized over one axis.
    """
    d = weights.copy()
    np.fill_diagonal(d, 0.0)
    n = d.shape[0]
    for j in range(n):
        np.minimum(d, d[:, j][:, None] + d[j][None, :], out=d)
    if not np.all(np.isfinite(d)):
        raise InvalidParams("graph is not connected")
    return d


def build_space(
    data,
    metric_kind: str,
    measure,
    check_triangle: bool | None = None,
) -> FiniteMetricMeasureSpace:
    """Construct and validate a space from a matrix or a coordinate list.

    `data` is an n x n distance matrix for metric kinds 'explicit-matrix'
    and 'graph-shortest-path' (edge lengths, np.inf for missing edges), or
    an n x d coordinate array for 'euclidean' / 'l1' / 'linf'.

    The triangle inequality is checked up to 1e-9 * (max distance). For
    metrics derived from coordinates or shortest paths it holds by
    construction, so the O(n^3) check defaults off above 512 points; pass
    check_triangle=True to force it.
    """
    if metric_kind not in METRIC_KINDS:
        raise InvalidParams(f"unknown metric kind {metric_kind!r}")
    coords = None
    if metric_kind == "explicit-matrix":
        dist = np.asarray(data, dtype=np.float64).copy()
        derived = False
    elif metric_kind == "graph-shortest-path":
        dist = _graph_shortest_path(np.asarray(data, dtype=np.float64))
        derived = True
    else:
        coords = np.asarray(data, dtype=np.float64).copy()
        if coords.ndim == 1:
            coords = coords[:, None]
        dist = _coords_to_dist(coords, metric_kind)
        derived = True

    n = dist.shape[0]
    if check_triangle is None:
        check_triangle = (not derived) or n <= 512
    _validate_matrix(dist, check_triangle=check_triangle)

    mu = np.asarray(measure, dtype=np.float64).copy()
    if mu.shape != (n,):
        raise NonpositiveMeasure(f"measure must have shape ({n},), got {mu.shape}")
    if not np.all(np.isfinite(mu)) or np.any(mu <= 0.0):
        raise NonpositiveMeasure("measure entries must be positive and finite")
    return FiniteMetricMeasureSpace(dist, mu, metric_kind, coords)


def enumerate_balls(space: FiniteMetricMeasureSpace, dedupe: bool = True) -> list[Ball]:
    """All realized balls, one per (center, rank); dedupe keeps one per member set.

    Order is ascending center, then ascending rank, so output is
    deterministic and the first representative survives deduping.
    """
    fam = space.ball_family
    out: list[Ball] = []
    seen: set[bytes] = set()
    for c in range(space.n):
        for rank, end in enumerate(fam.end_positions(c), start=1):
            ball = fam.ball_at_pos(c, int(end))
            if dedupe:
                k = ball.key()
                if k in seen:
                    continue
                seen.add(k)
            out.append(ball)
    return out


@dataclass(frozen=True)
class FunctionalResult:
    """A computed constant together with the witness attaining it."""

    kind: str
    value: float
    witness: BallRef | None = None
    point: int | None = None
    alt_value: float | None = None  # equivalent-form cross value, when one exists
    warnings: tuple[str, ...] = ()

    def witness_dict(self) -> dict:
        d: dict = {}
        if self.witness is not None:
            d.update(center=self.witness.center, rank=self.witness.rank,
                     radius=self.witness.radius)
        if self.point is not None:
            d["point"] = self.point
        return d


def doubling_constant(space: FiniteMetricMeasureSpace) -> FunctionalResult:
    """sup over centers x and radii r of mu(B(x,2r)) / mu(B(x,r)).

    Both masses are step functions of r, constant on the intervals cut by
    the breakpoint set D_x union D_x/2 (D_x the distinct distances from x),
    so evaluating one representative per interval makes the sup exact. The
    representative is the interval's right endpoint.
    """
    best = 1.0
    wit_center, wit_radius = None, None
    fam = space.ball_family
    for c in range(space.n):
        e = space.distinct_distances(c)
        samples = np.unique(np.concatenate([e, e / 2.0]))
        samples = samples[samples > 0.0]
        if samples.size == 0:
            continue
        sd = fam.sorted_dist[c]
        # open-ball mass at radius r: prefix mass of points with dist < r
        lo = np.searchsorted(sd, samples, side="left")
        hi = np.searchsorted(sd, 2.0 * samples, side="left")
        ratios = fam.prefix_measure[c, hi - 1] / fam.prefix_measure[c, lo - 1]
        i = int(ratios.argmax())
        if ratios[i] > best:
            best = float(ratios[i])
            wit_center, wit_radius = c, float(samples[i])
    witness = None
    if wit_center is not None:
        fam_c = fam
        pos = int(np.searchsorted(fam_c.sorted_dist[wit_center], wit_radius, side="left")) - 1
        witness = BallRef(wit_center, int(fam_c.rank_at_pos[wit_center, pos]),
                          float(fam_c.sorted_dist[wit_center, pos]))
    return FunctionalResult("doubling", best, witness,
                            point=None,
                            alt_value=wit_radius)


@dataclass(frozen=True)
class AnnularDecayQuery:
    """Result of the annular decay scan: constant C with a witness triple.

    C is the maximum over all sampled (x, r, delta) of
        mu(B(x,r) \\ B(x,(1-delta)r)) / (delta**alpha * mu(B(x,r))),
    so the decay inequality holds with constant C at every sampled triple
    and with equality at the witness.
    """

    alpha: float
    r_min: float
    value: float
    witness_center: int | None
    witness_radius: float | None
    witness_delta: float | None


def annular_decay_constant(
    space: FiniteMetricMeasureSpace, alpha: float, r_min: float
) -> AnnularDecayQuery:
    """Scan the critical (x, r, delta) triples of the annular decay inequality.

    For a fixed center the open ball is constant on each interval between
    consecutive distinct distances, and within such an interval the ratio
    decreases in r, so each interval is sampled at the infimum of its
    admissible part: r = max(interval left endpoint, r_min). The critical
    delta values at a sample are 1 - d/r over the distinct distances
    0 < d < ball radius threshold (annulus content changes only there), with
    delta restricted to (0, 1). This sampling makes the reported constant
    monotone nonincreasing in r_min and nondecreasing in alpha.

    No finite space satisfies the decay inequality uniformly in r: as r
    approaches a realized distance from above the ratio blows up, which is
    why an explicit r_min cutoff is required.
    """
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParams("alpha must lie in [0, 1]")
    if r_min <= 0.0:
        raise InvalidParams("r_min must be positive")
    if r_min > 2.0 * space.diameter and space.n > 1:
        raise EmptyRadiusRange(
            f"r_min={r_min} exceeds twice the diameter {space.diameter}")

    best = 0.0
    wit = (None, None, None)
    fam = space.ball_family
    for c in range(space.n):
        e = space.distinct_distances(c)  # e[0] == 0
        m = len(e) - 1
        if m == 0:
            continue
        ends = fam.end_positions(c)  # one per distinct distance
        cum = fam.prefix_measure[c, ends]  # mass of {d <= e[i]}
        # interval i covers r in (e[i], e[i+1]] for i < m, and (e[m], inf)
        for i in range(m + 1):
            right = e[i + 1] if i < m else np.inf
            if right < r_min:
                continue
            r_star = max(float(e[i]), r_min)
            ball_mass = cum[i]
            js = np.arange(1, i + 1)
            if js.size == 0:
                continue
            deltas = 1.0 - e[js] / r_star
            ok = deltas > 0.0
            if not ok.any():
                continue
            ann = cum[i] - cum[js - 1]
            ratios = ann[ok] / (deltas[ok] ** alpha * ball_mass)
            k = int(ratios.argmax())
            if ratios[k] > best:
                best = float(ratios[k])
                dsel = deltas[ok][k]
                wit = (c, r_star, float(dsel))
    return AnnularDecayQuery(alpha, r_min, best, wit[0], wit[1], wit[2])


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

GENERATOR_KINDS = ("grid", "path", "tree", "random-points", "snowflake")


def _measure_vector(rng: np.random.Generator, n: int, law) -> np.ndarray:
    if law in (None, "uniform"):
        return np.full(n, 1.0 / n)
    if law == "random":
        return rng.uniform(0.5, 2.0, size=n)
    raise InvalidParams(f"unknown measure law {law!r}")


def generate(kind: str, params: dict | None = None, seed: int = 0) -> FiniteMetricMeasureSpace:
    """Seeded space generator; a pure function of (kind, params, seed).

    kinds:
      grid           params: n (total points) or nx/ny, metric (default linf),
                     step (default 1.0), measure ('uniform'|'random')
      path           params: n, random edge lengths in [0.5, 1.5]
      tree           params: n, random tree with edge lengths in [0.5, 1.5]
      random-points  params: n, dim (default 2), metric (default euclidean)
      snowflake      params: base (a space), eps in (0, 1]; applies d -> d**eps
    """
    params = dict(params or {})
    rng = np.random.default_rng(seed)
    if kind == "grid":
        if "nx" in params or "ny" in params:
            nx, ny = int(params.get("nx", 1)), int(params.get("ny", 1))
        else:
            n = int(params.get("n", 4))
            nx = int(np.floor(np.sqrt(n))) or 1
            ny = (n + nx - 1) // nx
            while nx * ny > n and ny > 1 and nx * (ny - 1) >= n:
                ny -= 1
            nx, ny = max(nx, 1), max(ny, 1)
            # exact cover: fall back to a 1 x n line when n is awkward
            if nx * ny != n:
                nx, ny = n, 1
        if nx < 1 or ny < 1:
            raise InvalidParams("grid needs nx, ny >= 1")
        step = float(params.get("step", 1.0))
        coords = np.array([(i * step, j * step) for i in range(nx) for j in range(ny)])
        metric = params.get("metric", "linf")
        space = build_space(coords, metric, _measure_vector(rng, nx * ny, params.get("measure")),
                            check_triangle=nx * ny <= 512)
        return space
    if kind == "path":
        n = int(params.get("n", 3))
        if n < 1:
            raise InvalidParams("path needs n >= 1")
        edges = rng.uniform(0.5, 1.5, size=max(n - 1, 0))
        positions = np.concatenate([[0.0], np.cumsum(edges)])
        return build_space(positions[:, None], "l1",
                           _measure_vector(rng, n, params.get("measure")),
                           check_triangle=n <= 512)
    if kind == "tree":
        n = int(params.get("n", 4))
        if n < 1:
            raise InvalidParams("tree needs n >= 1")
        adj = np.full((n, n), np.inf)
        for v in range(1, n):
            u = int(rng.integers(0, v))
            length = float(rng.uniform(0.5, 1.5))
            adj[u, v] = adj[v, u] = length
        return build_space(adj, "graph-shortest-path",
                           _measure_vector(rng, n, params.get("measure")),
                           check_triangle=n <= 512)
    if kind == "random-points":
        n = int(params.get("n", 8))
        dim = int(params.get("dim", 2))
        if n < 1 or dim < 1:
            raise InvalidParams("random-points needs n, dim >= 1")
        coords = rng.uniform(0.0, 1.0, size=(n, dim))
        return build_space(coords, params.get("metric", "euclidean"),
                           _measure_vector(rng, n, params.get("measure")),
                           check_triangle=n <= 512)
    if kind == "snowflake":
        base = params.get("base")
        eps = float(params.get("eps", 0.5))
        if not isinstance(base, FiniteMetricMeasureSpace):
            raise InvalidParams("snowflake needs a base space")
        if not 0.0 < eps <= 1.0:
            raise InvalidParams("snowflake eps must lie in (0, 1]")
        dist = np.power(base.dist, eps)  # still a metric for eps <= 1
        return build_space(dist, "explicit-matrix", base.measure,
                           check_triangle=base.n <= 512)
    raise InvalidParams(f"unknown generator kind {kind!r}")


# ---------------------------------------------------------------------------
# Document format
# ---------------------------------------------------------------------------


def space_document(space: FiniteMetricMeasureSpace,
                   weights: dict[str, np.ndarray] | None = None) -> dict:
    doc = {
        "points": [
            {"id": i} if space.coords is None
            else {"id": i, "coords": [float(v) for v in space.coords[i]]}
            for i in range(space.n)
        ],
        "metric": space.metric_kind,
        "distances": [[float(v) for v in row] for row in space.dist],
        "measure": [float(v) for v in space.measure],
        "weights": {name: [float(v) for v in w] for name, w in (weights or {}).items()},
    }
    return doc


def save(space: FiniteMetricMeasureSpace, weights: dict[str, np.ndarray] | None,
         path) -> None:
    """Write a space (and named weights) as a JSON document.

    Floats are serialized with repr round-tripping, so distances and
    measures reload bit-exact.
    """
    with open(path, "w") as fh:
        json.dump(space_document(space, weights), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load(path) -> tuple[FiniteMetricMeasureSpace, dict[str, np.ndarray]]:
    """Read a space document; inverse of save, bit-exact on dist and measure."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise ParseError(str(exc)) from exc
    return space_from_document(doc)


def space_from_document(doc: dict) -> tuple[FiniteMetricMeasureSpace, dict[str, np.ndarray]]:
    for field in ("points", "metric", "distances", "measure"):
        if field not in doc:
            raise ParseError("missing required field", field=field)
    metric = doc["metric"]
    if metric not in METRIC_KINDS:
        raise ParseError(f"unknown metric {metric!r}", field="metric")
    try:
        dist = np.asarray(doc["distances"], dtype=np.float64)
        measure = np.asarray(doc["measure"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), field="distances/measure") from exc
    n = len(doc["points"])
    if dist.shape != (n, n):
        raise ParseError(f"distances shape {dist.shape} != ({n}, {n})", field="distances")
    coords = None
    if all(isinstance(p, dict) and "coords" in p for p in doc["points"]):
        coords = np.asarray([p["coords"] for p in doc["points"]], dtype=np.float64)
    # stored distances are authoritative; re-validate but never re-derive
    space = build_space(dist, "explicit-matrix", measure,
                        check_triangle=n <= 512)
    space = FiniteMetricMeasureSpace(space.dist, space.measure, metric, coords)
    weights = {}
    for name, vec in (doc.get("weights") or {}).items():
        w = np.asarray(vec, dtype=np.float64)
        if w.shape != (n,):
            raise ParseError(f"weight {name!r} has shape {w.shape}", field="weights")
        weights[name] = w
    return space, weights
