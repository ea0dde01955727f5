"""Discrete algorithms for monotone submodular maximization over a matroid.

Contains the deterministic thresholding greedy, the random lazy greedy with
its general and partition LinearGreedy inner routines, and the combined
algorithm that runs the lazy phase and finishes with continuous greedy plus
swap rounding. The lambda parameter of the combined algorithm trades value
queries (through the estimator budget) against independence queries (through
the lazy phase's iteration allowance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .ledger import QueryLedger
from .matroids import (
    ContractedMatroid,
    Matroid,
    RankCappedMatroid,
    augment_with_dummies,
    matroid_rank,
)
from .multilinear import continuous_greedy, crude_opt_estimate, swap_round
from .oracles import ResidualOracle, ValueOracle


def geometric_level_count(delta: float, ratio: float) -> int:
    """Number of integers t >= 0 with (1 - delta)^t > ratio (0 < ratio < 1).

    Counted with the same repeated multiplication the threshold loops use, so
    boundary cases agree with the loop semantics bit for bit.
    """
    if ratio >= 1.0:
        return 0
    count = 0
    w = 1.0
    while w > ratio:
        count += 1
        w *= 1.0 - delta
    return count


def _marginal_members(solution: set[int], ordered: list[int], u: int) -> list[int]:
    """Distinct member list for f(S + u); ordered is a cached list of S."""
    if u in solution:
        return ordered
    return ordered + [u]


def thresholding_greedy(f: ValueOracle, M: Matroid, eps: float) -> set[int]:
    """Deterministic decreasing-threshold greedy, (1/2 - eps)-approximate.

    Expects self-loops removed and f monotone. Per threshold level every
    element costs one independence query and, when feasible, one value query.
    """
    solution, _ = _thresholding_greedy_value(f, M, eps)
    return solution


def _thresholding_greedy_value(f: ValueOracle, M: Matroid, eps: float) -> tuple[set[int], float]:
    if not 0.0 < eps < 1.0:
        raise InvalidInputError("eps must be in (0, 1)")
    ground = list(M.ground())
    if not ground:
        return set(), f.evaluate([])
    f_empty = f.evaluate([])
    w_max = max(f.evaluate([u]) for u in ground)
    if w_max <= 0.0:
        return set(), f_empty
    rank = 0
    probe: list[int] = []
    for u in ground:
        probe.append(u)
        if M.is_independent(probe):
            rank += 1
        else:
            probe.pop()
    if rank == 0:
        return set(), f_empty

    solution: set[int] = set()
    ordered: list[int] = []
    current = f_empty
    w = w_max
    floor = eps * w_max / rank
    while w > floor:
        for u in ground:
            members = _marginal_members(solution, ordered, u)
            if not M.is_independent(members):
                continue
            gain = f.evaluate(members) - current
            if gain >= w and u not in solution:
                solution.add(u)
                ordered.append(u)
                current += gain
        w *= 1.0 - eps
    return solution, current


class LazyGreedyState:
    """Shared lazy-greedy bookkeeping across LinearGreedy calls of one run.

    Weight bounds are stored as integer level indices t (w_u = W (1-delta)^t)
    so the per-level equality test of the scan is exact.
    """

    def __init__(
        self,
        ground: list[int],
        W: float,
        delta: float,
        k: int,
        B: float,
        I: int,
        opt: float,
    ):
        self.ground = list(ground)
        self.W = float(W)
        self.delta = float(delta)
        self.k = int(k)
        self.B = float(B)
        self.I = int(I)
        self.opt = float(opt)
        self.num_levels = (
            geometric_level_count(delta, delta / k) if (W > 0.0 and k > 0) else 0
        )
        self.level = {u: 0 for u in self.ground}
        self.solution: set[int] = set()
        self.solution_value = 0.0
        self.accept_marginals: dict[int, float] = {}
        self.adds = 0
        self.decays = 0

    def weight_of(self, u: int) -> float:
        return self.W * (1.0 - self.delta) ** self.level[u]


def linear_greedy(state: LazyGreedyState, f: ValueOracle, M: Matroid) -> set[int]:
    """General LinearGreedy: one value query per weight decay or acceptance.

    Scans each threshold level in id order; elements whose stored level does
    not match are skipped without any oracle use, and elements blocked by the
    independence check are frozen at their level for the rest of the call.
    """
    S = state.solution
    ordered = sorted(S)
    f_S = state.solution_value
    chosen: set[int] = set()
    work = sorted(S)
    state.accept_marginals = {}
    one_minus = 1.0 - state.delta
    for t in range(state.num_levels):
        threshold = state.W * one_minus ** t
        bar = one_minus * threshold
        for u in state.ground:
            if state.level[u] != t or u in chosen:
                continue
            if u in S:
                candidate = work
            else:
                work.append(u)
                candidate = work
            if not M.is_independent(candidate):
                if u not in S:
                    work.pop()
                continue
            if u not in S:
                work.pop()
            gain = f.evaluate(_marginal_members(S, ordered, u)) - f_S
            if gain <= bar:
                state.level[u] = t + 1
                state.decays += 1
            else:
                chosen.add(u)
                work.append(u)
                state.adds += 1
                state.accept_marginals[u] = gain
    return chosen


class PartitionLazyGreedyState(LazyGreedyState):
    """Lazy-greedy state with per-block weight buckets (partition fast path).

    Buckets hold the elements logically at each level and are kept sorted so
    the scan order matches the general variant.
    """

    def __init__(
        self,
        blocks: list[list[int]],
        capacities: list[int],
        W: float,
        delta: float,
        k: int,
        B: float,
        I: int,
        opt: float,
    ):
        ground = sorted(u for blk in blocks for u in blk)
        super().__init__(ground, W, delta, k, B, I, opt)
        self.blocks = [sorted(b) for b in blocks]
        self.capacities = list(capacities)
        # buckets[j][t] lists the elements of block j currently at level t
        self.buckets: list[dict[int, list[int]]] = [
            {0: list(blk)} for blk in self.blocks
        ]


def linear_greedy_partition(
    state: PartitionLazyGreedyState, f: ValueOracle, M: Matroid
) -> set[int]:
    """Partition LinearGreedy: no independence queries at all.

    Handles each block separately; the per-element feasibility test of the
    general variant collapses to a block quota check. Decayed elements move
    one bucket down and are rescanned later in the same sweep.
    """
    if M.partition_structure() is None:
        raise InvalidInputError("partition LinearGreedy needs a generalized partition matroid")
    S = state.solution
    ordered = sorted(u for u in S if u in state.level)
    f_S = state.solution_value
    state.accept_marginals = {}
    chosen: set[int] = set()
    one_minus = 1.0 - state.delta
    # dummies in S occupy rank without living in any block
    allowance = state.k - len(S)
    total_picked = 0
    for j, buckets in enumerate(state.buckets):
        block_members = set(state.blocks[j])
        quota = state.capacities[j] - sum(1 for v in ordered if v in block_members)
        picked = 0
        for t in range(state.num_levels):
            bucket = buckets.get(t)
            if not bucket:
                continue
            threshold = state.W * one_minus ** t
            bar = one_minus * threshold
            pos = 0
            kept: list[int] = []
            while pos < len(bucket):
                if picked >= quota or total_picked >= allowance:
                    break
                u = bucket[pos]
                pos += 1
                if u in S:
                    # solution members ride their buckets down like any element
                    gain = f.evaluate(ordered) - f_S
                else:
                    gain = f.evaluate(ordered + [u]) - f_S
                if gain <= bar:
                    state.level[u] = t + 1
                    state.decays += 1
                    if t + 1 < state.num_levels:
                        nxt = buckets.setdefault(t + 1, [])
                        _insort(nxt, u)
                else:
                    chosen.add(u)
                    kept.append(u)
                    picked += 1
                    total_picked += 1
                    state.adds += 1
                    state.accept_marginals[u] = gain
            kept.extend(bucket[pos:])
            if kept:
                buckets[t] = kept
            else:
                del buckets[t]
            if picked >= quota or total_picked >= allowance:
                break
    return chosen


def _insort(lst: list[int], u: int) -> None:
    lo, hi = 0, len(lst)
    while lo < hi:
        mid = (lo + hi) // 2
        if lst[mid] < u:
            lo = mid + 1
        else:
            hi = mid
    lst.insert(lo, u)


@dataclass
class LazyGreedyOutcome:
    solution: frozenset[int]
    failed: bool
    iterations: int
    dummies_used: int
    ledger_snapshot: tuple[int, int]
    opt_estimate: float = 0.0


def random_lazy_greedy(
    f: ValueOracle,
    M: Matroid,
    delta: float,
    B: float,
    I: int,
    rng: np.random.Generator,
    *,
    use_partition: bool = False,
) -> LazyGreedyOutcome:
    """Randomized lazy greedy phase (the combined algorithm's first stage).

    Repeatedly builds an approximately maximum-weight residual independent set
    via LinearGreedy; while its weight stays at least B * opt, a uniformly
    random member of the dummy-padded set joins the solution. Exhausting all
    I iterations without hitting the low-weight stopping test is a failure.
    """
    if not 0.0 < delta < 1.0:
        raise InvalidInputError("delta must be in (0, 1)")
    if B < 0.0:
        raise InvalidInputError("B must be non-negative")
    if I < 0:
        raise InvalidInputError("iteration bound must be non-negative")
    k = matroid_rank(M)
    if I > k / 2:
        raise InvalidInputError("iteration bound above k/2 voids the failure analysis")
    aug = augment_with_dummies(f, M, max(k, 1), rank=k)
    opt = crude_opt_estimate(f, M)
    ground = list(range(f.n))
    W = max((f.evaluate([u]) for u in ground), default=0.0)

    if use_partition:
        structure = M.partition_structure()
        if structure is None:
            raise InvalidInputError("partition fast path needs a partition matroid")
        blocks, caps = structure
        state: LazyGreedyState = PartitionLazyGreedyState(
            blocks, caps, W, delta, k, B, I, opt
        )
    else:
        state = LazyGreedyState(ground, W, delta, k, B, I, opt)
    state.solution_value = aug.f.evaluate([])

    dummy_pool = list(aug.dummy_ids())
    for i in range(1, I + 1):
        if use_partition:
            chosen = linear_greedy_partition(state, aug.f, M)
        else:
            chosen = linear_greedy(state, aug.f, aug.matroid)
        total_weight = sum(state.weight_of(u) for u in sorted(chosen))
        if (1.0 - delta) * total_weight >= B * opt:
            need = aug.matroid.k - len(state.solution) - len(chosen)
            padding = [d for d in dummy_pool if d not in state.solution][: max(0, need)]
            pool = sorted(chosen) + padding
            u_i = pool[int(rng.integers(len(pool)))]
            state.solution.add(u_i)
            if u_i < aug.n_real:
                state.solution_value += state.accept_marginals[u_i]
        else:
            return LazyGreedyOutcome(
                solution=frozenset(aug.strip(state.solution)),
                failed=False,
                iterations=i - 1,
                dummies_used=sum(1 for u in state.solution if aug.is_dummy(u)),
                ledger_snapshot=f.ledger.snapshot(),
                opt_estimate=opt,
            )
    return LazyGreedyOutcome(
        solution=frozenset(),
        failed=True,
        iterations=I,
        dummies_used=0,
        ledger_snapshot=f.ledger.snapshot(),
        opt_estimate=opt,
    )


@dataclass
class CombinedParams:
    delta: float
    B: float
    I: int
    c: float
    cg_delta: float


def combined_parameters(k: int, eps: float, lam: float) -> CombinedParams:
    return CombinedParams(
        delta=0.5,
        B=20.0 * k / (lam * eps),
        I=math.ceil(lam / 3.0),
        c=240.0 * k / (lam * eps) + 2.0,
        cg_delta=eps / 4.0,
    )


@dataclass
class CombinedResult:
    solution: frozenset[int]
    failed: bool
    lazy_iterations: int
    lazy_solution: frozenset[int]
    params: Optional[CombinedParams]


def combined_algorithm(
    f: ValueOracle,
    M: Matroid,
    eps: float,
    lam: float,
    rng: np.random.Generator,
    *,
    sample_scale: float = 1.0,
    use_partition: bool = False,
    B_override: Optional[float] = None,
) -> CombinedResult:
    """Lazy phase + continuous greedy + swap rounding (1 - 1/e - eps guarantee).

    ``lam`` in [1, k] steers the query tradeoff. ``B_override`` replaces the
    prescribed stopping parameter for failure-path diagnostics only.
    ``sample_scale`` rescales the derivative-estimator budget; 1.0 keeps the
    analysis-faithful sample count.
    """
    if not f.monotone:
        raise InvalidInputError("combined algorithm requires a monotone objective")
    if not 0.0 < eps < 1.0 - 1.0 / math.e:
        raise InvalidInputError("eps must be in (0, 1 - 1/e)")
    k = matroid_rank(M)
    if k == 0:
        return CombinedResult(frozenset(), False, 0, frozenset(), None)
    if not 1.0 <= lam <= k:
        raise InvalidInputError("lambda must lie in [1, rank]")
    if k == 1:
        best_u, best_v = None, -math.inf
        for u in M.ground():
            if M.is_independent([u]):
                v = f.evaluate([u])
                if v > best_v:
                    best_u, best_v = u, v
        sol = frozenset() if best_u is None else frozenset({best_u})
        return CombinedResult(sol, False, 0, frozenset(), None)

    params = combined_parameters(k, eps, lam)
    B = params.B if B_override is None else float(B_override)
    outcome = random_lazy_greedy(
        f, M, params.delta, B, params.I, rng, use_partition=use_partition
    )
    if outcome.failed:
        return CombinedResult(frozenset(), True, outcome.iterations, frozenset(), params)

    S = set(outcome.solution)
    used = len(S) + outcome.dummies_used
    cap = k - used
    if cap <= 0:
        return CombinedResult(frozenset(S), False, outcome.iterations, frozenset(S), params)

    residual: Matroid
    if use_partition and outcome.dummies_used == 0 and M.partition_structure() is not None:
        blocks, caps = M.partition_structure()
        res_blocks = [[u for u in blk if u not in S] for blk in blocks]
        res_caps = [c - sum(1 for u in blk if u in S) for blk, c in zip(blocks, caps)]
        residual = _ReindexedPartition(res_blocks, res_caps, f.n, M.ledger)
    else:
        residual = RankCappedMatroid(ContractedMatroid(M, sorted(S)), cap)
    shifted = ResidualOracle(f, S)
    ground = [u for u in range(f.n) if u not in S]
    point = continuous_greedy(
        shifted,
        residual,
        params.c,
        params.cg_delta,
        rng,
        ground=ground,
        sample_scale=sample_scale,
    )
    rounded = swap_round(residual, point, rng)
    return CombinedResult(
        frozenset(S | rounded), False, outcome.iterations, frozenset(S), params
    )


class _ReindexedPartition(Matroid):
    """Partition residual on the original id space (contracted ids become loops)."""

    def __init__(self, blocks: list[list[int]], caps: list[int], n: int, ledger: QueryLedger):
        self.n = n
        self.ledger = ledger
        self._blocks = [sorted(b) for b in blocks]
        self._caps = list(caps)
        self._block_of: dict[int, int] = {}
        for j, blk in enumerate(self._blocks):
            for u in blk:
                self._block_of[u] = j

    def is_independent(self, members) -> bool:
        self.ledger.charge_independence(1)
        counts = [0] * len(self._caps)
        for u in members:
            if not 0 <= u < self.n:
                raise InvalidInputError(f"element id {u} outside ground set of size {self.n}")
            j = self._block_of.get(u)
            if j is None:
                return False
            counts[j] += 1
            if counts[j] > self._caps[j]:
                return False
        return True

    def partition_structure(self):
        return ([list(b) for b in self._blocks], list(self._caps))


def choose_lambda(n: int, k: int, eps: float) -> float:
    """The closing choice of lambda: k below the threshold, the threshold above."""
    if n < 3:
        raise InvalidInputError("for constant-size ground sets solve exactly instead")
    if not 0.0 < eps < 1.0:
        raise InvalidInputError("eps must be in (0, 1)")
    if k < 1:
        raise InvalidInputError("rank must be positive")
    threshold = math.sqrt(n * eps ** -5) * math.log(n / eps)
    lam = float(k) if k <= threshold else threshold
    return min(max(1.0, lam), float(k))
