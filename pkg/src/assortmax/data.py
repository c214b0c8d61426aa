"""Instance generation, itemset-file ingestion, and result serialization.

Itemset files use the plain text layout produced by common frequent-itemset
miners: one set per line as whitespace-separated integer item ids, with an
optional trailing "#SUP: <count>" annotation that is ignored here.
"""

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import AssortmentCollection, Instance, SolverResult

__all__ = [
    "GenSpec",
    "generate_instance",
    "load_itemsets",
    "load_prices",
    "instance_from_files",
    "save_instance",
    "load_instance",
    "save_itemsets",
    "ResultRecord",
    "write_results",
]


@dataclass(frozen=True)
class GenSpec:
    """Recipe for a random instance.

    ``num_sets`` is the number of distinct feasible assortments to sample
    uniformly from all non-empty subsets; None means a capacity-style
    instance with no explicit collection.  ``v0`` of None draws the
    no-purchase weight uniformly from (0, 1].
    """

    n: int
    num_sets: int | None = None
    price_range: tuple[float, float] = (0.0, 1000.0)
    weight_range: tuple[float, float] = (0.0, 1.0)
    v0: float | None = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.num_sets is not None and self.num_sets < 1:
            raise ValueError("num_sets must be positive when given")
        for lo, hi in (self.price_range, self.weight_range):
            if lo > hi:
                raise ValueError("distribution bounds must satisfy lo <= hi")


def _sample_distinct_subsets(rng: np.random.Generator, n: int,
                             count: int) -> AssortmentCollection:
    if count > 2**n - 1:
        raise ValueError(
            f"cannot draw {count} distinct non-empty subsets of {n} items")
    rows: list[np.ndarray] = []
    seen: set[bytes] = set()
    while len(rows) < count:
        chunk = max(256, count - len(rows))
        mask = rng.random((chunk, n)) < 0.5
        packed = np.packbits(mask, axis=1)
        for r in range(chunk):
            if not mask[r].any():
                continue
            key = packed[r].tobytes()
            if key in seen:
                continue
            seen.add(key)
            rows.append(mask[r])
            if len(rows) == count:
                break
    return AssortmentCollection.from_membership(np.array(rows), n)


def generate_instance(spec: GenSpec) -> tuple[Instance, AssortmentCollection | None]:
    """Draw an instance (and optionally a collection), deterministic per seed.

    Prices are drawn uniformly then sorted descending; weights are uniform;
    feasible sets are distinct uniform non-empty subsets.
    """
    rng = np.random.default_rng(spec.seed)
    prices = np.sort(rng.uniform(*spec.price_range, size=spec.n))[::-1].copy()
    weights = rng.uniform(*spec.weight_range, size=spec.n)
    v0 = spec.v0 if spec.v0 is not None else float(1.0 - rng.random())
    inst = Instance(prices, weights, v0)
    if spec.num_sets is None:
        return inst, None
    return inst, _sample_distinct_subsets(rng, spec.n, spec.num_sets)


def load_itemsets(path, min_card: int = 1,
                  max_card: int | None = None) -> tuple[AssortmentCollection, tuple[int, ...]]:
    """Parse an itemset file, keep sets with min_card <= |S| <= max_card.

    Item ids are remapped to a dense 1..n range; the returned tuple maps
    dense index k (position k-1) back to the original id.
    """
    raw_sets: list[list[int]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.partition("#")[0].strip()
            if not line.strip():
                continue
            tokens = body.split()
            if not tokens:
                raise ValueError(f"{path}: line {lineno}: no item ids before annotation")
            try:
                ids = sorted({int(t) for t in tokens})
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: malformed item id") from None
            raw_sets.append(ids)

    hi = max_card if max_card is not None else max((len(s) for s in raw_sets), default=0)
    kept = [s for s in raw_sets if min_card <= len(s) <= hi]
    if not kept:
        raise ValueError(f"{path}: no itemsets left after cardinality filtering")

    original_ids = sorted({i for s in kept for i in s})
    dense = {orig: k + 1 for k, orig in enumerate(original_ids)}
    collection = AssortmentCollection(
        ([dense[i] for i in s] for s in kept), n=len(original_ids))
    return collection, tuple(original_ids)


def load_prices(path) -> list[tuple[int, float]]:
    """Parse an id,price CSV; rejects duplicates and negative prices."""
    out: list[tuple[int, float]] = []
    seen: set[int] = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = [c.strip().lower() for c in reader.fieldnames or []]
        if "id" not in cols or "price" not in cols:
            raise ValueError(f"{path}: header must contain 'id' and 'price' columns")
        idc = (reader.fieldnames or [])[cols.index("id")]
        prc = (reader.fieldnames or [])[cols.index("price")]
        for rowno, row in enumerate(reader, start=2):
            try:
                item = int(row[idc])
                price = float(row[prc])
            except (TypeError, ValueError):
                raise ValueError(f"{path}: row {rowno}: malformed id or price") from None
            if item in seen:
                raise ValueError(f"{path}: row {rowno}: duplicate id {item}")
            if price < 0:
                raise ValueError(f"{path}: row {rowno}: negative price {price}")
            seen.add(item)
            out.append((item, price))
    return out


def instance_from_files(itemsets_path, prices_path=None, *, min_card: int = 1,
                        max_card: int | None = None,
                        price_range: tuple[float, float] = (0.0, 1000.0),
                        v0: float = 1.0, seed: int = 0,
                        ) -> tuple[Instance, AssortmentCollection]:
    """Assemble a ready-to-solve instance from mined itemsets.

    Prices come from the CSV when present; items missing from it (or all
    items, when no CSV is given) get prices drawn uniformly from
    ``price_range``.  Weights are always drawn uniformly on [0, 1].  The
    instance is sorted by price and the collection's indices are remapped to
    match, so external ids survive in ``Instance.item_ids``.
    """
    collection, original_ids = load_itemsets(itemsets_path, min_card, max_card)
    n = collection.n
    rng = np.random.default_rng(seed)
    prices = rng.uniform(*price_range, size=n)
    if prices_path is not None:
        table = dict(load_prices(prices_path))
        for k, orig in enumerate(original_ids):
            if orig in table:
                prices[k] = table[orig]
    weights = rng.uniform(0.0, 1.0, size=n)

    order = np.argsort(-prices, kind="stable")
    inst = Instance(prices[order], weights[order], v0,
                    item_ids=tuple(int(original_ids[i]) for i in order))
    new_pos = np.empty(n, dtype=np.int64)
    new_pos[order] = np.arange(n)
    flat, _, lengths = collection.flat_arrays
    moved = new_pos[flat]
    seg = np.repeat(np.arange(lengths.size), lengths)
    moved = moved[np.lexsort((moved, seg))]  # keep each set's indices sorted
    remapped = AssortmentCollection._from_arrays(n, moved, lengths)
    return inst, remapped


def save_instance(inst: Instance, path) -> None:
    """Write an instance as JSON (prices, weights, v0, scale, labels)."""
    payload = {
        "prices": inst.prices.tolist(),
        "weights": inst.weights.tolist(),
        "v0": inst.v0,
        "price_scale": inst.price_scale,
        "item_ids": list(inst.labels()),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_instance(path) -> Instance:
    payload = json.loads(Path(path).read_text())
    return Instance(payload["prices"], payload["weights"], payload["v0"],
                    payload.get("price_scale", 1.0),
                    tuple(payload["item_ids"]) if payload.get("item_ids") else None)


def save_itemsets(collection: AssortmentCollection, path) -> None:
    """Write a collection in the one-set-per-line text format."""
    with open(path, "w") as fh:
        for i in range(len(collection)):
            fh.write(" ".join(str(j + 1) for j in collection.member_indices(i)))
            fh.write("\n")


RESULT_FIELDS = ("run_id", "algo", "n", "N", "eps", "iterations",
                 "wall_time_s", "revenue", "rel_error", "overlap")


@dataclass(frozen=True)
class ResultRecord:
    """One benchmark row; oracle-dependent metrics may be absent (None)."""

    run_id: str
    algo: str
    n: int
    N: int | None
    eps: float
    iterations: int | None
    wall_time_s: float
    revenue: float
    rel_error: float | None
    overlap: float | None

    @classmethod
    def from_result(cls, run_id: str, algo: str, n: int, N: int | None,
                    eps: float, result: SolverResult,
                    optimum: SolverResult | None = None,
                    wall_time_s: float | None = None) -> "ResultRecord":
        rel = overlap = None
        if optimum is not None and optimum.revenue > 0:
            rel = (optimum.revenue - result.revenue) / optimum.revenue
            ref = optimum.assortment.items
            overlap = len(result.assortment.items & ref) / len(ref) if ref else None
        return cls(run_id, algo, n, N, eps, result.iterations,
                   wall_time_s if wall_time_s is not None else result.wall_time,
                   result.revenue, rel, overlap)


def write_results(records: Sequence[ResultRecord | dict], path,
                  fmt: str = "csv") -> None:
    """Write rows in a fixed column order, as CSV or JSON."""
    rows = [asdict(r) if isinstance(r, ResultRecord) else dict(r) for r in records]
    for row in rows:
        missing = [f for f in RESULT_FIELDS if f not in row]
        if missing:
            raise ValueError(f"record is missing fields: {missing}")
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=RESULT_FIELDS, extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: ("" if row[k] is None else row[k])
                                 for k in RESULT_FIELDS})
    elif fmt == "json":
        ordered = [{k: row[k] for k in RESULT_FIELDS} for row in rows]
        Path(path).write_text(json.dumps(ordered, indent=2) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}; use 'csv' or 'json'")
