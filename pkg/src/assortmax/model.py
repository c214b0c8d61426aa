"""Domain types and exact evaluation of multinomial-logit assortment revenue.

Items are indexed 1..n in non-increasing price order.  A buyer offered the
set A picks item i with probability v_i / (v0 + sum_{j in A} v_j), where v0
is the weight of leaving without a purchase.  The seller's expected revenue
of A is the price-weighted sum of those pick probabilities.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "Instance",
    "Assortment",
    "AssortmentCollection",
    "SolverResult",
    "revenue",
    "collection_revenues",
    "normalize",
    "validate_collection",
]


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Instance:
    """Item prices and choice weights, sorted by non-increasing price.

    ``weights[k]`` is the preference weight of item ``k + 1`` and ``v0`` the
    weight of walking away without buying.  ``price_scale`` carries the
    original top price through :func:`normalize` so results can be mapped
    back to currency units.  ``item_ids`` keeps the caller's labels when
    :meth:`from_items` had to re-sort.
    """

    prices: np.ndarray
    weights: np.ndarray
    v0: float
    price_scale: float = 1.0
    item_ids: tuple[int, ...] | None = None

    def __post_init__(self):
        prices = _frozen_array(self.prices)
        weights = _frozen_array(self.weights)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "weights", weights)
        if prices.ndim != 1 or prices.size < 1 or prices.shape != weights.shape:
            raise ValueError("prices and weights must be 1-d arrays of equal length >= 1")
        if np.any(np.diff(prices) > 0):
            raise ValueError("prices must be non-increasing; use Instance.from_items to sort")
        if np.any(prices < 0):
            raise ValueError("prices must be non-negative")
        if np.any((weights < 0) | (weights > 1)):
            raise ValueError("weights must lie in [0, 1]")
        if not 0.0 < self.v0 <= 1.0:
            raise ValueError("v0 must lie in (0, 1]")
        if not self.price_scale > 0:
            raise ValueError("price_scale must be positive")
        if self.item_ids is not None:
            ids = tuple(int(i) for i in self.item_ids)
            if len(ids) != prices.size:
                raise ValueError("item_ids must have one label per item")
            object.__setattr__(self, "item_ids", ids)

    @property
    def n(self) -> int:
        return int(self.prices.size)

    @property
    def p1(self) -> float:
        """Top price; an upper bound on the revenue of every assortment."""
        return float(self.prices[0])

    def labels(self) -> tuple[int, ...]:
        """External label of each item position (identity when never sorted)."""
        return self.item_ids if self.item_ids is not None else tuple(range(1, self.n + 1))

    @classmethod
    def from_items(cls, prices, weights, v0, item_ids=None, price_scale: float = 1.0) -> "Instance":
        """Build an instance from arbitrarily ordered items, sorting by price.

        The original labels survive in ``item_ids`` so that assortments can be
        reported in the caller's numbering.
        """
        p = np.asarray(prices, dtype=float)
        w = np.asarray(weights, dtype=float)
        if p.shape != w.shape:
            raise ValueError("prices and weights must have equal length")
        labels = tuple(item_ids) if item_ids is not None else tuple(range(1, p.size + 1))
        if len(labels) != p.size:
            raise ValueError("item_ids must have one label per item")
        order = np.argsort(-p, kind="stable")
        return cls(p[order], w[order], v0, price_scale,
                   tuple(int(labels[i]) for i in order))


@dataclass(frozen=True)
class Assortment:
    """A subset of items by 1-based index.

    Empty assortments are allowed only as a "nothing found" sentinel;
    members of a feasible collection must be non-empty.
    """

    items: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "items", frozenset(int(i) for i in self.items))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.items))

    def __contains__(self, item: int) -> bool:
        return item in self.items

    def indices(self) -> np.ndarray:
        """Sorted 0-based positions of the members."""
        return np.fromiter(sorted(self.items), dtype=np.int64, count=len(self.items)) - 1

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(sorted(self.items))


class AssortmentCollection:
    """An explicit list of feasible assortments over items 1..n.

    Membership is stored as one concatenated index array so that per-set
    reductions vectorize; individual :class:`Assortment` views are built on
    demand.  Instances are immutable after construction.
    """

    def __init__(self, sets: Iterable, n: int):
        self.n = int(n)
        members: list[np.ndarray] = []
        for s in sets:
            items = s.items if isinstance(s, Assortment) else s
            arr = np.fromiter((int(i) for i in items), dtype=np.int64)
            if arr.size == 0:
                raise ValueError("feasible assortments must be non-empty")
            members.append(np.unique(arr) - 1)
        if not members:
            raise ValueError("collection must contain at least one assortment")
        lengths = np.fromiter((m.size for m in members), dtype=np.int64, count=len(members))
        flat = np.concatenate(members) if members else np.empty(0, dtype=np.int64)
        self._init_arrays(flat, lengths)

    def _init_arrays(self, flat: np.ndarray, lengths: np.ndarray) -> None:
        starts = np.zeros(lengths.size, dtype=np.int64)
        np.cumsum(lengths[:-1], out=starts[1:])
        self._flat = flat
        self._lengths = lengths
        self._starts = starts
        for arr in (self._flat, self._lengths, self._starts):
            arr.setflags(write=False)

    @classmethod
    def from_membership(cls, mask: np.ndarray, n: int | None = None) -> "AssortmentCollection":
        """Build from a boolean matrix with one row per assortment."""
        mask = np.asarray(mask, dtype=bool)
        obj = cls.__new__(cls)
        obj.n = int(n if n is not None else mask.shape[1])
        lengths = mask.sum(axis=1).astype(np.int64)
        if mask.shape[0] == 0:
            raise ValueError("collection must contain at least one assortment")
        if np.any(lengths == 0):
            raise ValueError("feasible assortments must be non-empty")
        obj._init_arrays(np.nonzero(mask)[1].astype(np.int64), lengths)
        return obj

    @classmethod
    def _from_arrays(cls, n: int, flat: np.ndarray, lengths: np.ndarray) -> "AssortmentCollection":
        obj = cls.__new__(cls)
        obj.n = int(n)
        if lengths.size == 0:
            raise ValueError("collection must contain at least one assortment")
        if np.any(lengths == 0):
            raise ValueError("feasible assortments must be non-empty")
        obj._init_arrays(np.asarray(flat, dtype=np.int64).copy(),
                         np.asarray(lengths, dtype=np.int64).copy())
        return obj

    def __len__(self) -> int:
        return int(self._lengths.size)

    @property
    def size(self) -> int:
        return len(self)

    def member_indices(self, i: int) -> np.ndarray:
        """0-based item positions of set ``i`` (sorted)."""
        start = self._starts[i]
        return self._flat[start:start + self._lengths[i]]

    def __getitem__(self, i: int) -> Assortment:
        return Assortment(self.member_indices(i) + 1)

    def __iter__(self) -> Iterator[Assortment]:
        for i in range(len(self)):
            yield self[i]

    @property
    def sets(self) -> tuple[Assortment, ...]:
        """All member assortments, materialized (intended for small collections)."""
        return tuple(self)

    @cached_property
    def flat_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(concatenated 0-based indices, start offsets, lengths) for reductions."""
        return self._flat, self._starts, self._lengths


@dataclass(frozen=True)
class SolverResult:
    """Outcome of one solver run.

    ``revenue`` is always the exact evaluation of the returned assortment,
    never a search bound.  ``revenue_interval`` is the solver's final
    bracket on the optimum.  ``estimate`` is set by solvers whose revenue
    estimate can differ from the returned set's revenue (noisy search).
    """

    assortment: Assortment
    revenue: float
    revenue_interval: tuple[float, float]
    iterations: int
    wall_time: float
    estimate: float | None = None

    def __post_init__(self):
        lo, hi = self.revenue_interval
        if lo > hi:
            raise ValueError("revenue_interval must satisfy lower <= upper")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")


def revenue(a: Assortment, inst: Instance) -> float:
    """Expected revenue of offering assortment ``a``: sum of price-weighted
    multinomial-logit pick probabilities.  The empty assortment earns 0."""
    if len(a) == 0:
        return 0.0
    idx = a.indices()
    if idx[0] < 0 or idx[-1] >= inst.n:
        bad = int(idx[0] + 1 if idx[0] < 0 else idx[-1] + 1)
        raise ValueError(f"item index {bad} out of range 1..{inst.n}")
    w = inst.weights[idx]
    num = float(inst.prices[idx] @ w)
    return num / (inst.v0 + float(w.sum()))


def collection_revenues(c: AssortmentCollection, inst: Instance) -> np.ndarray:
    """Exact revenue of every set in the collection, vectorized."""
    flat, starts, _ = c.flat_arrays
    pv = inst.prices * inst.weights
    num = np.add.reduceat(pv[flat], starts)
    den = inst.v0 + np.add.reduceat(inst.weights[flat], starts)
    return num / den


def normalize(inst: Instance) -> Instance:
    """Rescale prices so the top price is 1, composing into ``price_scale``.

    Revenue of any set scales by exactly 1/p1, so argmaxes are unchanged.
    """
    p1 = inst.p1
    if p1 <= 0:
        raise ValueError("cannot normalize a degenerate instance with top price 0")
    return Instance(inst.prices / p1, inst.weights, inst.v0,
                    inst.price_scale * p1, inst.item_ids)


def validate_collection(c: AssortmentCollection, inst: Instance) -> None:
    """Check every collection invariant, reporting the first offender."""
    if inst.n != c.n:
        raise ValueError(f"collection is over {c.n} items but instance has {inst.n}")
    if len(c) == 0:
        raise ValueError("collection is empty")
    flat, _, lengths = c.flat_arrays
    if np.any(lengths == 0) or flat.size == 0:
        bad = int(np.argmax(lengths == 0))
        raise ValueError(f"set {bad} is empty")
    if np.any(flat < 0) or np.any(flat >= c.n):
        # locate the first offending set for the error message
        for i in range(len(c)):
            mem = c.member_indices(i)
            off = mem[(mem < 0) | (mem >= c.n)]
            if off.size:
                raise ValueError(
                    f"set {i} contains item index {int(off[0]) + 1}, outside 1..{c.n}")
    # membership arrays are sorted and unique by construction
