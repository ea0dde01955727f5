"""Cardinality-constrained algorithms.

Random sampling (general, monotone and non-monotone parameterizations), the
two lazy threshold-pool variants built on a resumable filler, and the
standard/random greedy baselines. All randomness comes from the generator
passed in; dummy padding is handled internally and stripped from returned
solutions.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .matroids import DummyAugmentedProblem, augment_with_dummies
from .oracles import ValueOracle


def _members_with(solution: set[int], ordered: list[int], u: int) -> list[int]:
    if u in solution:
        return ordered
    return ordered + [u]


def standard_greedy(f: ValueOracle, k: int) -> set[int]:
    """Argmax-marginal greedy; ties go to the smallest id.

    On monotone instances this runs all k iterations and uses exactly
    1 + sum_{i=0}^{k-1} (n - i) value queries; it stops early if every
    remaining marginal is negative.
    """
    _validate_k(f, k)
    solution: set[int] = set()
    ordered: list[int] = []
    current = f.evaluate([])
    for _ in range(k):
        best_u: Optional[int] = None
        best_gain = -math.inf
        for u in range(f.n):
            if u in solution:
                continue
            gain = f.evaluate(ordered + [u]) - current
            if gain > best_gain:
                best_u, best_gain = u, gain
        if best_u is None or best_gain < 0.0:
            break
        solution.add(best_u)
        ordered.append(best_u)
        current += best_gain
    return solution


def random_greedy(f: ValueOracle, k: int, rng: np.random.Generator) -> set[int]:
    """Uniform pick among the k largest positive marginals each iteration.

    Short candidate lists are logically padded with zero-value dummies, so a
    pick can be a no-op; this is what yields the 1/e guarantee for
    non-monotone objectives.
    """
    _validate_k(f, k)
    solution: set[int] = set()
    ordered: list[int] = []
    current = f.evaluate([])
    for _ in range(k):
        gains = []
        for u in range(f.n):
            if u in solution:
                continue
            gains.append((f.evaluate(ordered + [u]) - current, u))
        gains.sort(key=lambda t: (-t[0], t[1]))
        top = [(g, u) for g, u in gains if g > 0.0][:k]
        slot = int(rng.integers(k))
        if slot < len(top):
            gain, u = top[slot]
            solution.add(u)
            ordered.append(u)
            current += gain
    return solution


def draw_rank(s: float, rng: np.random.Generator) -> int:
    """Rank drawn as ceil(d) with d uniform on (0, s].

    Realizes the fractional-s mixing: ranks 1..floor(s) each with probability
    1/s and rank ceil(s) with the remainder.
    """
    d = s * (1.0 - rng.random())
    return max(1, math.ceil(d))


def random_sampling(
    f: ValueOracle,
    k: int,
    p: float,
    s: float,
    rng: np.random.Generator,
    trace: Optional[dict] = None,
) -> set[int]:
    """k rounds: sample ceil(pn) elements, add the ceil(d)-th best if helpful.

    The sample is drawn without replacement and may intersect the current
    solution (such members have zero marginal). An element is added only when
    its marginal is non-negative. Costs at most k * ceil(pn) + 1 value queries.
    """
    _validate_k(f, k)
    n = f.n
    if not 0.0 < p <= 1.0:
        raise InvalidInputError("sample fraction p must be in (0, 1]")
    sample_size = math.ceil(p * n)
    if not 1.0 <= s <= sample_size:
        raise InvalidInputError("rank parameter s must lie in [1, ceil(pn)]")
    solution: set[int] = set()
    ordered: list[int] = []
    current = f.evaluate([])
    for _ in range(k):
        sample = _sample_without_replacement(n, sample_size, rng)
        gains = []
        for u in sample:
            gains.append((f.evaluate(_members_with(solution, ordered, u)) - current, u))
        gains.sort(key=lambda t: (-t[0], t[1]))
        rank = min(draw_rank(s, rng), len(gains))
        gain, u = gains[rank - 1]
        if gain >= 0.0 and u not in solution:
            solution.add(u)
            ordered.append(u)
            current += gain
            if trace is not None:
                trace.setdefault("adds", []).append(u)
        elif trace is not None:
            trace.setdefault("adds", []).append(None)
    return solution


def _sample_without_replacement(n: int, size: int, rng: np.random.Generator) -> list[int]:
    # partial Fisher-Yates over a fresh index array
    arr = list(range(n))
    for j in range(size):
        r = int(rng.integers(j, n))
        arr[j], arr[r] = arr[r], arr[j]
    return arr[:size]


def random_sampling_monotone(
    f: ValueOracle, k: int, eps: float, rng: np.random.Generator
) -> set[int]:
    """Sampling greedy for monotone objectives: s = 1, p = ln(1/eps)/k.

    For eps <= e^{-k} the plain greedy already meets the guarantee and is used
    directly. Gives (1 - 1/e - eps) OPT in expectation with O(n ln(1/eps))
    value queries.
    """
    if not f.monotone:
        raise InvalidInputError("this parameterization requires a monotone objective")
    if not 0.0 < eps < 1.0:
        raise InvalidInputError("eps must be in (0, 1)")
    _validate_k(f, k)
    if eps <= math.exp(-k):
        return standard_greedy(f, k)
    p = math.log(1.0 / eps) / k
    return random_sampling(f, k, p, 1.0, rng)


def nonmonotone_regime_threshold(k: int) -> float:
    """The delta > 0 with 8 delta^-2 ln(2 / delta) = k, found by bisection.

    The map is strictly decreasing on (0, 2), so the root is unique; below it
    the sampling parameterization is invalid and random greedy takes over.
    """
    if k < 1:
        raise InvalidInputError("k must be positive")

    def g(x: float) -> float:
        return 8.0 * x ** -2 * math.log(2.0 / x) - k

    lo, hi = 1e-9, 2.0 - 1e-12
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return (lo + hi) / 2.0


def random_sampling_nonmonotone(
    f: ValueOracle, k: int, eps: float, rng: np.random.Generator
) -> set[int]:
    """Sampling algorithm for general objectives: (1/e - eps) OPT in expectation.

    With s = k ceil(pn) / n and p = 8 ln(2/eps) / (k eps^2); below the regime
    threshold (where that p would exceed one) random greedy is used instead,
    and eps at or above 1/e is clamped just below it.
    """
    if eps <= 0.0:
        raise InvalidInputError("eps must be positive")
    _validate_k(f, k)
    threshold = nonmonotone_regime_threshold(k)
    if eps <= threshold:
        return random_greedy(f, k, rng)
    if eps >= 1.0 / math.e:
        eps = 1.0 / math.e - 1e-6
        if eps <= threshold:
            return random_greedy(f, k, rng)
    n = f.n
    p = min(1.0, 8.0 * math.log(2.0 / eps) / (k * eps * eps))
    sample_size = math.ceil(p * n)
    s = k * sample_size / n
    s = min(max(s, 1.0), float(sample_size))
    return random_sampling(f, k, p, s, rng)


class FillState:
    """Resumable threshold filler (shared by the two lazy pool variants).

    Scans (level, element) pairs in a fixed order; ``fill`` resumes exactly
    where the previous call stopped and returns once the pool holds k
    elements, topping it up with zero-value dummies after the sweep is
    exhausted. The externally visible threshold ``current_w`` is the last
    level the sweep reached.
    """

    def __init__(
        self,
        f: ValueOracle,
        aug: DummyAugmentedProblem,
        k: int,
        delta: float,
        W: float,
    ):
        self.f = f
        self.aug = aug
        self.real_ids = list(range(aug.n_real))
        self.k = k
        self.delta = delta
        self.W = float(W)
        if W > 0.0:
            from .matroid_algos import geometric_level_count

            self.num_levels = geometric_level_count(delta, delta / k)
        else:
            self.num_levels = 0
        self.level = 0
        self.pos = 0

    def current_w(self) -> float:
        return self.W * (1.0 - self.delta) ** self.level

    def fill(
        self, pool: set[int], solution: set[int], solution_value: float
    ) -> tuple[list[int], list[float]]:
        """Resume the sweep until the pool reaches k elements.

        Returns the newly added elements and their insertion-time marginals
        (zero for dummies).
        """
        added: list[int] = []
        marginals: list[float] = []
        ordered = sorted(solution)
        one_minus = 1.0 - self.delta
        while self.level < self.num_levels:
            bar = self.W * one_minus ** self.level * one_minus
            while self.pos < len(self.real_ids):
                u = self.real_ids[self.pos]
                self.pos += 1
                gain = self.f.evaluate(_members_with(solution, ordered, u)) - solution_value
                if gain > bar:
                    if u not in pool:
                        pool.add(u)
                        added.append(u)
                        marginals.append(gain)
                    if len(pool) == self.k:
                        return added, marginals
            self.pos = 0
            self.level += 1
        for d in self.aug.dummy_ids():
            if len(pool) == self.k:
                break
            if d not in pool:
                pool.add(d)
                added.append(d)
                marginals.append(0.0)
        return added, marginals


def lazy_greedy_simple(
    f: ValueOracle,
    k: int,
    delta: float,
    rng: np.random.Generator,
    trace: Optional[dict] = None,
) -> set[int]:
    """Threshold-pool random greedy: (1/e - 2 delta) OPT in expectation.

    Keeps a pool of k high-marginal candidates (padded by dummies), adds a
    uniform pool member each round, then rescans the pool and drops members
    whose marginal fell under the current threshold.
    """
    _validate_lazy_params(f, k, delta)
    aug = augment_with_dummies(f, None, 2 * k)
    fa = aug.f
    W = max((f.evaluate([u]) for u in range(f.n)), default=0.0)
    filler = FillState(fa, aug, k, delta, W)
    solution: set[int] = set()
    current = fa.evaluate([])
    pool: set[int] = set()
    for _ in range(k):
        filler.fill(pool, solution, current)
        members = sorted(pool)
        u_i = members[int(rng.integers(len(members)))]
        solution.add(u_i)
        current = fa.evaluate(sorted(solution))
        bar = filler.current_w() * (1.0 - delta)
        ordered = sorted(solution)
        for u in sorted(pool):
            gain = fa.evaluate(_members_with(solution, ordered, u)) - current
            if gain <= bar:
                pool.discard(u)
        if trace is not None:
            trace.setdefault("pool_sizes", []).append(len(pool))
    return aug.strip(solution)


def lazy_greedy_improved(
    f: ValueOracle,
    k: int,
    delta: float,
    rng: np.random.Generator,
    trace: Optional[dict] = None,
) -> set[int]:
    """Pool variant that rescans only when the drawn candidate went stale.

    A uniformly drawn pool member is used directly if it is a dummy or its
    marginal still clears (1 - delta) w; otherwise the pool is purged of
    stale members, refilled, and the pick is redrawn from the fresh arrivals.
    """
    _validate_lazy_params(f, k, delta)
    aug = augment_with_dummies(f, None, 2 * k)
    fa = aug.f
    W = max((f.evaluate([u]) for u in range(f.n)), default=0.0)
    filler = FillState(fa, aug, k, delta, W)
    solution: set[int] = set()
    current = fa.evaluate([])
    pool: set[int] = set()
    filler.fill(pool, solution, current)
    for _ in range(k):
        members = sorted(pool)
        candidate = members[int(rng.integers(len(members)))]
        ordered = sorted(solution)
        if aug.is_dummy(candidate):
            pick, pick_gain = candidate, 0.0
        else:
            gain = fa.evaluate(_members_with(solution, ordered, candidate)) - current
            if gain > (1.0 - delta) * filler.current_w():
                pick, pick_gain = candidate, gain
            else:
                if trace is not None:
                    trace.setdefault("rescans", []).append(
                        (candidate, candidate in solution)
                    )
                bar = filler.current_w() * (1.0 - delta)
                for u in sorted(pool):
                    if aug.is_dummy(u):
                        continue
                    if fa.evaluate(_members_with(solution, ordered, u)) - current <= bar:
                        pool.discard(u)
                fresh, fresh_gains = filler.fill(pool, solution, current)
                slot = int(rng.integers(len(fresh)))
                pick, pick_gain = fresh[slot], fresh_gains[slot]
        if pick not in solution:
            solution.add(pick)
            current += pick_gain
        if trace is not None:
            trace.setdefault("picks", []).append(pick)
    return aug.strip(solution)


def _validate_k(f: ValueOracle, k: int) -> None:
    if not 1 <= k <= f.n:
        raise InvalidInputError("cardinality bound must satisfy 1 <= k <= n")


def _validate_lazy_params(f: ValueOracle, k: int, delta: float) -> None:
    _validate_k(f, k)
    if not 0.0 < delta < 1.0 / math.e:
        raise InvalidInputError("delta must be in (0, 1/e)")
