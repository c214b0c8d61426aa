"""Maximum inner product search over embedded assortments, exact or hashed.

Each feasible set S is embedded as the 2n-vector z^S = (p o u^S, u^S), where
u^S is the 0/1 membership vector.  A revenue-threshold comparison at K uses
the query q_K = (v, -K v); then q_K . z^S = sum_{i in S} v_i (p_i - K), so one
inner-product maximization answers "is there a set with revenue >= K".

The approximate engine rescales points into the unit ball, appends the
norm-completing coordinate sqrt(1 - |x|^2), and indexes the resulting unit
vectors with random-hyperplane sign hashes: `tables` hash tables keyed by
`bits`-bit sign patterns, with candidate scanning capped at `scan_cap`.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import AssortmentCollection, Instance, validate_collection

__all__ = [
    "QueryVector",
    "query_vector",
    "EmbeddedPoint",
    "EmbeddedCollection",
    "embed_collection",
    "query_exact",
    "simple_lsh_transform",
    "LshParams",
    "default_lsh_params",
    "LshIndex",
    "build_lsh_index",
    "hash_key",
    "query_lsh",
    "save_index",
    "load_index",
    "ExactMips",
    "LshMips",
]

_CHUNK_ROWS = 4096  # membership-matrix chunk height for bulk hashing


@dataclass(frozen=True)
class QueryVector:
    """The 2n query (v, -K v) whose inner products score sets at threshold K."""

    vector: np.ndarray
    threshold: float

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=float)
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)
        n = vec.size // 2
        if vec.size != 2 * n or n == 0:
            raise ValueError("query vector must have even, positive length")


def query_vector(weights: np.ndarray, threshold: float) -> QueryVector:
    w = np.asarray(weights, dtype=float)
    return QueryVector(np.concatenate([w, -threshold * w]), float(threshold))


class EmbeddedPoint:
    """Dense view of one embedded set: the vector (p o u^S, u^S)."""

    __slots__ = ("vector", "set_id", "norm")

    def __init__(self, vector: np.ndarray, set_id: int, norm: float):
        self.vector = vector
        self.set_id = set_id
        self.norm = norm


class EmbeddedCollection(Sequence):
    """Order-preserving embeddings of a feasible collection.

    Membership is kept sparse; dense vectors are materialized per point on
    demand.  Scores against structured queries are computed by per-set
    reduction, which equals the dense inner product exactly up to summation
    order.
    """

    def __init__(self, collection: AssortmentCollection, inst: Instance):
        validate_collection(collection, inst)
        self.source = collection
        self.prices = inst.prices
        self.n = inst.n
        self.dim = 2 * inst.n
        flat, starts, lengths = collection.flat_arrays
        self._flat = flat
        self._starts = starts
        self._lengths = lengths
        sq = np.add.reduceat((inst.prices**2 + 1.0)[flat], starts)
        self.norms = np.sqrt(sq)
        self.norms.setflags(write=False)

    def __len__(self) -> int:
        return len(self.source)

    def __getitem__(self, i: int) -> EmbeddedPoint:
        mem = self.source.member_indices(i)
        vec = np.zeros(self.dim)
        vec[mem] = self.prices[mem]
        vec[self.n + mem] = 1.0
        return EmbeddedPoint(vec, i, float(self.norms[i]))

    def max_norm(self) -> float:
        return float(self.norms.max())

    def scores(self, q: QueryVector) -> np.ndarray:
        """Inner product of the query with every embedded point."""
        if q.vector.size != self.dim:
            raise ValueError(f"query has dimension {q.vector.size}, expected {self.dim}")
        per_item = q.vector[:self.n] * self.prices + q.vector[self.n:]
        return np.add.reduceat(per_item[self._flat], self._starts)

    def scores_at(self, q: QueryVector, ids: np.ndarray) -> np.ndarray:
        """Inner products for a subset of points, in the given order.

        Uses the same per-segment reduction as :meth:`scores`, so a score
        computed here is bit-identical to the full-scan score of that point.
        """
        if q.vector.size != self.dim:
            raise ValueError(f"query has dimension {q.vector.size}, expected {self.dim}")
        per_item = q.vector[:self.n] * self.prices + q.vector[self.n:]
        segments = [self.source.member_indices(int(i)) for i in ids]
        lengths = np.fromiter((s.size for s in segments), dtype=np.int64,
                              count=len(segments))
        starts = np.zeros(lengths.size, dtype=np.int64)
        np.cumsum(lengths[:-1], out=starts[1:])
        return np.add.reduceat(per_item[np.concatenate(segments)], starts)

    def _membership_chunk(self, lo: int, hi: int, dtype=np.float32) -> np.ndarray:
        rows = hi - lo
        out = np.zeros((rows, self.n), dtype=dtype)
        start = self._starts[lo]
        stop = self._starts[hi - 1] + self._lengths[hi - 1]
        cols = self._flat[start:stop]
        row_of = np.repeat(np.arange(rows), self._lengths[lo:hi])
        out[row_of, cols] = 1.0
        return out


def embed_collection(collection: AssortmentCollection, inst: Instance) -> EmbeddedCollection:
    """Embed every feasible set; point k corresponds to collection set k."""
    return EmbeddedCollection(collection, inst)


def query_exact(q: QueryVector, points: EmbeddedCollection) -> tuple[int, float]:
    """Full linear scan.  Ties break toward the lowest set id."""
    if len(points) == 0:
        raise ValueError("cannot query an empty point set")
    s = points.scores(q)
    best = int(np.argmax(s))
    return best, float(s[best])


def simple_lsh_transform(x: np.ndarray, scale: float) -> np.ndarray:
    """Map x with |x| <= scale to the unit sphere one dimension up.

    Returns [x / scale ; sqrt(1 - |x/scale|^2)], which has unit norm; inner
    products against unit queries padded with a zero are monotone in the
    original inner products, so argmaxes are preserved.
    """
    x = np.asarray(x, dtype=float)
    if scale <= 0:
        raise ValueError("scale must be positive")
    r2 = float(x @ x) / (scale * scale)
    if r2 > 1.0 + 1e-9:
        raise ValueError(f"point norm {math.sqrt(r2) * scale:.6g} exceeds scale {scale:.6g}")
    return np.concatenate([x / scale, [math.sqrt(max(0.0, 1.0 - r2))]])


@dataclass(frozen=True)
class LshParams:
    """Index shape: bits per hash key, number of tables, candidate-scan cap."""

    bits: int
    tables: int
    scan_cap: int
    rho: float = 0.5

    def __post_init__(self):
        if self.bits < 0 or self.bits > 64:
            raise ValueError("bits must lie in 0..64")
        if self.tables <= 0:
            raise ValueError("tables must be positive")
        if self.scan_cap <= 0:
            raise ValueError("scan_cap must be positive")


def default_lsh_params(num_points: int, rho: float = 0.5) -> LshParams:
    """Standard operating point: ceil(log2 N) bits, ceil(N^rho) tables,
    scan cap three times the table count."""
    if num_points < 1:
        raise ValueError("num_points must be positive")
    bits = max(0, math.ceil(math.log2(num_points))) if num_points > 1 else 0
    tables = max(1, math.ceil(num_points**rho))
    return LshParams(bits=bits, tables=tables, scan_cap=3 * tables, rho=rho)


class LshIndex:
    """Sign-projection hash tables over transformed embedded points.

    Every stored point appears in exactly one bucket per table.  Buckets are
    kept as per-table arrays sorted by key (stable in set id), so a lookup is
    a binary search returning a contiguous id slice.
    """

    def __init__(self, params: LshParams, seed: int, scale: float,
                 projections: np.ndarray, table_keys: np.ndarray,
                 table_ids: np.ndarray, num_points: int):
        self.params = params
        self.seed = int(seed)
        self.scale = float(scale)
        self.projections = projections          # (tables, bits, dim)
        self.table_keys = table_keys            # (tables, N) uint64, sorted per table
        self.table_ids = table_ids              # (tables, N) int32, aligned with keys
        self.num_points = int(num_points)
        for arr in (self.projections, self.table_keys, self.table_ids):
            arr.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.projections.shape[2])

    def bucket(self, table: int, key: int) -> np.ndarray:
        """Set ids stored under ``key`` in one table, in ascending id order."""
        keys = self.table_keys[table]
        lo = int(np.searchsorted(keys, key, side="left"))
        hi = int(np.searchsorted(keys, key, side="right"))
        return self.table_ids[table, lo:hi]


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a (..., bits) boolean array into uint64 keys, bit t at position t."""
    nbits = bits.shape[-1]
    if nbits == 0:
        return np.zeros(bits.shape[:-1], dtype=np.uint64)
    weights = (np.uint64(1) << np.arange(nbits, dtype=np.uint64))
    return (bits.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


def hash_key(x_transformed: np.ndarray, table: int, index: LshIndex) -> int:
    """Key of a unit-norm transformed vector in one table.

    Bit t is 1 exactly when the t-th hyperplane projection is >= 0; a zero
    projection counts as positive so equal inputs always collide.
    """
    x = np.asarray(x_transformed, dtype=float)
    if x.size != index.dim:
        raise ValueError(f"vector has dimension {x.size}, expected {index.dim}")
    raw = index.projections[table] @ x
    return int(_pack_bits(raw >= 0.0))


def build_lsh_index(points: EmbeddedCollection, params: LshParams | None = None,
                    seed: int = 0) -> LshIndex:
    """Hash every embedded point into ``tables`` buckets, deterministically per seed.

    The scale is the largest point norm, so all points fit the unit-ball
    transform.  Hashing is done in bulk: for structured points (p o u, u) the
    head projection collapses to a membership-matrix product, which keeps the
    build a handful of dense matmuls.
    """
    if len(points) == 0:
        raise ValueError("cannot index an empty point set")
    if params is None:
        params = default_lsh_params(len(points))
    n_pts = len(points)
    dim = points.dim + 1
    rng = np.random.default_rng(seed)
    projections = rng.standard_normal((params.tables, params.bits, dim))
    scale = points.max_norm()

    flat_proj = projections.reshape(params.tables * params.bits, dim)
    # head . z for z = (p o u, u) equals u . (p o head_front + head_back)
    n = points.n
    combined = (flat_proj[:, :n] * points.prices + flat_proj[:, n:2 * n]).T.astype(np.float32)
    tail = flat_proj[:, 2 * n].astype(np.float32)
    slack = np.sqrt(np.maximum(0.0, 1.0 - (points.norms / scale) ** 2)).astype(np.float32)

    keys = np.empty((params.tables, n_pts), dtype=np.uint64)
    total_bits = params.tables * params.bits
    for lo in range(0, n_pts, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, n_pts)
        if total_bits:
            mem = points._membership_chunk(lo, hi)
            raw = mem @ combined
            raw /= np.float32(scale)
            raw += slack[lo:hi, None] * tail[None, :]
            chunk_bits = (raw >= 0.0).reshape(hi - lo, params.tables, params.bits)
            keys[:, lo:hi] = _pack_bits(chunk_bits).T
        else:
            keys[:, lo:hi] = 0

    order = np.argsort(keys, axis=1, kind="stable")
    table_keys = np.take_along_axis(keys, order, axis=1)
    table_ids = order.astype(np.int32)
    return LshIndex(params, seed, scale, projections, table_keys, table_ids, n_pts)


def query_lsh(q: QueryVector, index: LshIndex,
              points: EmbeddedCollection) -> tuple[int, float] | None:
    """Probe one bucket per table and return the best retrieved candidate.

    The query is normalized to unit length and padded with a zero before
    hashing.  Retrieved candidates are scored with their true inner product
    in the original space; scanning stops once ``scan_cap`` retrievals
    (duplicates included) have been seen.  Returns None when every probed
    bucket is empty, meaning no high-scoring set was found.
    """
    if q.vector.size != points.dim:
        raise ValueError(f"query has dimension {q.vector.size}, expected {points.dim}")
    if index.dim != points.dim + 1:
        raise ValueError("index was built over points of a different dimension")
    if index.num_points != len(points):
        raise ValueError("index size does not match the point set")

    qnorm = float(np.linalg.norm(q.vector))
    unit = q.vector / qnorm if qnorm > 0 else np.zeros_like(q.vector)
    xq = np.concatenate([unit, [0.0]])

    flat_proj = index.projections.reshape(-1, index.dim)
    if flat_proj.shape[0]:
        raw = flat_proj @ xq
        qkeys = _pack_bits((raw >= 0.0).reshape(index.params.tables, index.params.bits))
    else:
        qkeys = np.zeros(index.params.tables, dtype=np.uint64)

    budget = index.params.scan_cap
    retrieved: list[np.ndarray] = []
    count = 0
    for t in range(index.params.tables):
        ids = index.bucket(t, int(qkeys[t]))
        if ids.size == 0:
            continue
        take = ids[:budget - count]
        retrieved.append(take)
        count += int(take.size)
        if count >= budget:
            break
    if not retrieved:
        return None

    cand = np.concatenate(retrieved)
    # dedupe but keep first-retrieval order so ties stay deterministic
    _, first = np.unique(cand, return_index=True)
    cand = cand[np.sort(first)]
    scores = points.scores_at(q, cand)
    best = int(np.argmax(scores))
    return int(cand[best]), float(scores[best])


_FORMAT_VERSION = 1


def save_index(index: LshIndex, path) -> None:
    """Serialize an index to a single .npz archive (versioned)."""
    np.savez_compressed(
        path,
        version=np.int64(_FORMAT_VERSION),
        seed=np.int64(index.seed),
        bits=np.int64(index.params.bits),
        tables=np.int64(index.params.tables),
        scan_cap=np.int64(index.params.scan_cap),
        rho=np.float64(index.params.rho),
        scale=np.float64(index.scale),
        num_points=np.int64(index.num_points),
        projections=index.projections,
        table_keys=index.table_keys,
        table_ids=index.table_ids,
    )


def load_index(path) -> LshIndex:
    with np.load(path) as data:
        version = int(data["version"])
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported index format version {version}")
        params = LshParams(int(data["bits"]), int(data["tables"]),
                           int(data["scan_cap"]), float(data["rho"]))
        return LshIndex(params, int(data["seed"]), float(data["scale"]),
                        data["projections"].copy(), data["table_keys"].copy(),
                        data["table_ids"].copy(), int(data["num_points"]))


class ExactMips:
    """Linear-scan oracle over an embedded collection."""

    def __init__(self, points: EmbeddedCollection, weights: np.ndarray | None = None):
        self.points = points
        self.weights = np.asarray(weights, dtype=float) if weights is not None else None

    def _weights(self) -> np.ndarray:
        if self.weights is None:
            raise ValueError("engine needs the instance weights to form queries")
        return self.weights

    def query(self, threshold: float) -> tuple[int, float]:
        return query_exact(query_vector(self._weights(), threshold), self.points)


class LshMips:
    """Hash-accelerated oracle; may miss the true maximizer but never
    overstates a candidate's score."""

    def __init__(self, index: LshIndex, points: EmbeddedCollection,
                 weights: np.ndarray | None = None):
        self.index = index
        self.points = points
        self.weights = np.asarray(weights, dtype=float) if weights is not None else None

    @classmethod
    def build(cls, points: EmbeddedCollection, weights: np.ndarray,
              params: LshParams | None = None, seed: int = 0) -> "LshMips":
        return cls(build_lsh_index(points, params, seed), points, weights)

    def query(self, threshold: float) -> tuple[int, float] | None:
        if self.weights is None:
            raise ValueError("engine needs the instance weights to form queries")
        return query_lsh(query_vector(self.weights, threshold), self.index, self.points)
