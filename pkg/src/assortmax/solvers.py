"""Binary-search assortment solvers and the capacitated compare-step family.

Every solver here answers "find an assortment within eps of the best
feasible revenue" by bisecting on the revenue value itself: a comparison
"does any feasible set earn at least K?" either raises the lower bound (and
records the witness) or lowers the upper bound.  The comparison is answered
by maximum inner product search for explicit collections, or by top-C
selection on the per-item margins v_i (p_i - K) for capacity constraints.
"""

import math
import time
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from .model import (Assortment, AssortmentCollection, Instance, SolverResult,
                    revenue)
from .mips import (EmbeddedCollection, ExactMips, LshMips, LshParams,
                   embed_collection)

__all__ = [
    "SearchState",
    "MipsOracle",
    "compare_step_general",
    "compare_step_capacitated",
    "compare_step_capacitated_lb",
    "compare_step_partitioned",
    "assort_mnl",
    "assort_mnl_capacitated",
    "assort_mnl_approx",
    "assort_mnl_approx_simple",
]


class MipsOracle(Protocol):
    """Engine contract: given a threshold K, return the id and inner-product
    score of a candidate set, or None when nothing was retrieved."""

    points: EmbeddedCollection

    def query(self, threshold: float) -> tuple[int, float] | None: ...


@dataclass(frozen=True)
class SearchState:
    """Snapshot of the bisection after one iteration."""

    lower: float
    upper: float
    best: Assortment
    iteration: int


def compare_step_general(K: float, mips: MipsOracle,
                         inst: Instance) -> tuple[bool, Assortment | None]:
    """Does any feasible set have revenue >= K?

    With an exact engine the answer is exact and the witness attains the
    maximum margin sum.  With a hashed engine a miss can only produce a
    false negative: the returned candidate's score is its true inner
    product, so a positive answer is always certified.
    """
    ans = mips.query(K)
    if ans is None:
        return False, None
    set_id, score = ans
    if K <= score / inst.v0:
        return True, mips.points.source[set_id]
    return False, None


def _top_positive(w: np.ndarray, idx: np.ndarray, cap: int) -> np.ndarray:
    """Indices (from idx) of up to ``cap`` largest strictly positive margins."""
    pos = idx[w[idx] > 0]
    if cap <= 0:
        return pos[:0]
    if pos.size > cap:
        keep = np.argpartition(w[pos], pos.size - cap)[pos.size - cap:]
        pos = pos[keep]
    return pos


def compare_step_capacitated(K: float, inst: Instance,
                             C: int) -> tuple[bool, Assortment]:
    """Capacity-constrained comparison by top-C selection on v_i (p_i - K)."""
    if not 1 <= C <= inst.n:
        raise ValueError(f"capacity must lie in 1..{inst.n}")
    w = inst.weights * (inst.prices - K)
    sel = _top_positive(w, np.arange(inst.n), C)
    exists = bool(K <= w[sel].sum() / inst.v0)
    return exists, Assortment(sel + 1)


def compare_step_capacitated_lb(K: float, inst: Instance, C: int,
                                c_min: int) -> tuple[bool, Assortment]:
    """Variant forcing at least ``c_min`` items into the candidate set.

    The top c_min margins are included regardless of sign; remaining slots
    up to C are filled with additional strictly positive margins.
    """
    if c_min < 0 or c_min > C:
        raise ValueError("c_min must lie in 0..C")
    if not 1 <= C <= inst.n:
        raise ValueError(f"capacity must lie in 1..{inst.n}")
    w = inst.weights * (inst.prices - K)
    order = np.argsort(-w, kind="stable")
    forced = order[:c_min]
    extra = _top_positive(w, order[c_min:], C - c_min)
    sel = np.concatenate([forced, extra])
    exists = bool(K <= w[sel].sum() / inst.v0)
    return exists, Assortment(sel + 1)


def compare_step_partitioned(K: float, inst: Instance,
                             blocks: Sequence[Sequence[int]],
                             caps: Sequence[int]) -> tuple[bool, Assortment]:
    """Per-block capacitated comparison for partitioned item families.

    ``blocks`` must partition 1..n; block w contributes its top-caps[w]
    positive margins independently.
    """
    if len(blocks) != len(caps):
        raise ValueError("need one capacity per block")
    seen = np.zeros(inst.n, dtype=bool)
    arrs = []
    for b in blocks:
        arr = np.asarray([int(i) - 1 for i in b], dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= inst.n):
            raise ValueError("block contains an item index outside 1..n")
        if np.any(seen[arr]):
            raise ValueError("blocks overlap; they must partition 1..n")
        seen[arr] = True
        arrs.append(arr)
    if not seen.all():
        raise ValueError("blocks do not cover every item; they must partition 1..n")

    w = inst.weights * (inst.prices - K)
    chosen = []
    total = 0.0
    for arr, cap in zip(arrs, caps):
        if cap < 0:
            raise ValueError("capacities must be non-negative")
        sel = _top_positive(w, arr, int(cap))
        chosen.append(sel)
        total += float(w[sel].sum())
    sel = np.concatenate(chosen) if chosen else np.empty(0, dtype=np.int64)
    exists = bool(K <= total / inst.v0)
    return exists, Assortment(sel + 1)


CompareFn = Callable[[float], tuple[bool, Assortment | None]]


def _bisect(inst: Instance, compare: CompareFn, eps: float,
            on_iteration: Callable[[SearchState], None] | None = None) -> SolverResult:
    """Shared bisection loop: halve [lower, upper] until it is within eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    lower, upper = 0.0, inst.p1
    best = Assortment({1})
    iteration = 0
    t0 = time.perf_counter()
    while upper - lower > eps:
        K = 0.5 * (lower + upper)
        exists, witness = compare(K)
        if exists:
            lower = K
            if witness is not None and len(witness) > 0:
                best = witness
        else:
            upper = K
        iteration += 1
        if on_iteration is not None:
            on_iteration(SearchState(lower, upper, best, iteration))
    wall = time.perf_counter() - t0
    return SolverResult(best, revenue(best, inst), (lower, upper), iteration, wall)


def assort_mnl(collection: AssortmentCollection, inst: Instance, eps: float,
               mips: MipsOracle | None = None,
               on_iteration: Callable[[SearchState], None] | None = None) -> SolverResult:
    """eps-optimal assortment over an explicit collection via exact search.

    Performs exactly ceil(log2(p1 / eps)) comparisons; the returned set's
    exact revenue is within eps of the best feasible revenue.
    """
    if mips is None:
        mips = ExactMips(embed_collection(collection, inst), inst.weights)
    return _bisect(inst, lambda K: compare_step_general(K, mips, inst), eps,
                   on_iteration)


def assort_mnl_capacitated(inst: Instance, C: int | None, eps: float,
                           variant: str = "topc", *, c_min: int | None = None,
                           blocks: Sequence[Sequence[int]] | None = None,
                           caps: Sequence[int] | None = None,
                           on_iteration=None) -> SolverResult:
    """eps-optimal assortment under capacity-style constraints.

    variant "topc" optimizes over all sets of size <= C, "lb" additionally
    forces at least c_min items, and "partitioned" applies per-block caps.
    """
    if variant == "topc":
        if C is None:
            raise ValueError("variant 'topc' needs a capacity C")
        compare: CompareFn = lambda K: compare_step_capacitated(K, inst, C)
    elif variant == "lb":
        if C is None or c_min is None:
            raise ValueError("variant 'lb' needs C and c_min")
        compare = lambda K: compare_step_capacitated_lb(K, inst, C, c_min)
    elif variant == "partitioned":
        if blocks is None or caps is None:
            raise ValueError("variant 'partitioned' needs blocks and caps")
        compare = lambda K: compare_step_partitioned(K, inst, blocks, caps)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return _bisect(inst, compare, eps, on_iteration)


def assort_mnl_approx_simple(collection: AssortmentCollection, inst: Instance,
                             eps: float, lsh: MipsOracle | None = None,
                             params: LshParams | None = None, seed: int = 0,
                             on_iteration=None) -> SolverResult:
    """Bisection with a hash-backed comparison; the empirical workhorse.

    A retrieval miss is treated as "no set reaches K", so the answer can
    undershoot the optimum, but any returned set's revenue is exact and at
    least the final lower bound.  Injecting an exact engine reproduces
    :func:`assort_mnl` bit for bit.
    """
    if lsh is None:
        points = embed_collection(collection, inst)
        lsh = LshMips.build(points, inst.weights, params, seed)
    return _bisect(inst, lambda K: compare_step_general(K, lsh, inst), eps,
                   on_iteration)


def approx_iteration_bound(p1: float, eps: float, nu: float) -> int:
    """Worst-case comparison count for the two-threshold approximate solver."""
    nu_hat = nu * nu + 2.0 * nu
    if eps <= 2.0 * nu_hat:
        raise ValueError("eps must exceed 2(nu^2 + 2 nu) for the search to close")
    return max(0, math.ceil(math.log2(p1 / (eps - 2.0 * nu_hat))))


def assort_mnl_approx(collection: AssortmentCollection, inst: Instance,
                      eps: float, nu: float, lsh: MipsOracle | None = None,
                      params: LshParams | None = None, seed: int = 0,
                      on_iteration=None) -> SolverResult:
    """Two-threshold bisection that accounts for a (1 + nu)-approximate engine.

    Requires a normalized instance (top price at most 1) so the retrieval
    guarantee K_hat = 1 + (1+nu)^2 (K - 1) <= K applies.  Each iteration
    shrinks the bracket to at most half its width plus nu^2 + 2 nu, so the
    loop ends within ceil(log2(p1 / (eps - 2(nu^2 + 2 nu)))) comparisons.
    """
    if inst.p1 > 1.0 + 1e-12:
        raise ValueError("approx solver needs a normalized instance; call normalize() first")
    if nu < 0:
        raise ValueError("nu must be non-negative")
    nu_hat = nu * nu + 2.0 * nu
    if eps <= 2.0 * nu_hat:
        raise ValueError("eps must exceed 2(nu^2 + 2 nu) for the search to close")
    if lsh is None:
        points = embed_collection(collection, inst)
        lsh = LshMips.build(points, inst.weights, params, seed)

    lower, upper = 0.0, inst.p1
    best = Assortment({1})
    iteration = 0
    grow = (1.0 + nu) ** 2
    t0 = time.perf_counter()
    while upper - lower > eps:
        K = 0.5 * (lower + upper)
        K_hat = 1.0 + grow * (K - 1.0)
        ans = lsh.query(K)
        if ans is None:
            upper = K
        else:
            set_id, score = ans
            s = score / inst.v0
            if K_hat > s:
                upper = K
            elif K <= s:
                lower = K
                best = lsh.points.source[set_id]
            else:
                lower = K_hat
                best = lsh.points.source[set_id]
        iteration += 1
        if on_iteration is not None:
            on_iteration(SearchState(lower, upper, best, iteration))
    wall = time.perf_counter() - t0
    return SolverResult(best, revenue(best, inst), (lower, upper), iteration, wall)
