"""Multilinear-extension machinery.

Sampling estimator for directional derivatives of F(x) = E[f(R(x))], the
decreasing-threshold continuous greedy that consumes it, and randomized swap
rounding of the resulting convex combination of bases. Swap rounding never
touches the value oracle; the partition fast path also avoids independence
queries entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InvalidInputError
from .matroids import Matroid
from .oracles import ValueOracle


@dataclass
class FractionalPoint:
    """Point of the matroid polytope kept as an explicit convex combination.

    ``x = sum(weight * indicator(base))``; rounding needs the decomposition,
    not just the coordinates.
    """

    n: int
    weights: list[float] = field(default_factory=list)
    bases: list[frozenset[int]] = field(default_factory=list)

    def coords(self) -> np.ndarray:
        x = np.zeros(self.n)
        for w, base in zip(self.weights, self.bases):
            for u in base:
                x[u] += w
        return x

    def total_weight(self) -> float:
        return float(sum(self.weights))


def estimate_marginal_F(
    f: ValueOracle,
    x: Union[FractionalPoint, Sequence[float], np.ndarray],
    u: int,
    m: int,
    rng: np.random.Generator,
) -> float:
    """Paired-sample estimate of the derivative of F at x along coordinate u.

    Averages f(R + u) - f(R - u) over m draws of R(x); costs exactly 2m value
    queries. The raw (unclamped) mean is returned so the estimator stays
    unbiased; callers that rely on monotonicity clamp at zero themselves.
    """
    if m < 1:
        raise InvalidInputError("need at least one sample")
    x_vec = x.coords() if isinstance(x, FractionalPoint) else np.asarray(x, dtype=float)
    return _estimate(f, x_vec, int(u), int(m), rng)


def _estimate(f: ValueOracle, x_vec: np.ndarray, u: int, m: int, rng: np.random.Generator) -> float:
    inclusion = rng.random((m, x_vec.shape[0])) < x_vec
    total = 0.0
    evaluate = f.evaluate
    for row in inclusion:
        row[u] = False
        ids = np.flatnonzero(row).tolist()
        without_u = evaluate(ids)
        ids.append(u)
        total += evaluate(ids) - without_u
    return total / m


def estimator_sample_count(c: float, n: int, delta: float, sample_scale: float = 1.0) -> int:
    """m = ceil(scale * c * ln(n) / delta^2), floored at one sample."""
    n_eff = max(n, 2)
    return max(1, math.ceil(sample_scale * c * math.log(n_eff) / delta ** 2))


def continuous_greedy(
    f: ValueOracle,
    M: Matroid,
    c: float,
    delta: float,
    rng: np.random.Generator,
    *,
    ground: Optional[Sequence[int]] = None,
    sample_scale: float = 1.0,
) -> FractionalPoint:
    """Decreasing-threshold continuous greedy for monotone objectives.

    Runs ceil(1/delta) steps. Each step estimates every candidate's derivative,
    then sweeps a threshold geometrically (factor 1 - delta) from the largest
    estimate down to delta/n of it, adding elements whose fresh estimate clears
    the threshold while independence allows. The step stops early once the
    built set reaches the matroid rank, which changes no output, only skips
    dead scans. ``sample_scale`` rescales the per-estimate sample budget; 1.0
    is the analysis-faithful count, which is far beyond interactive budgets on
    all but tiny instances.
    """
    if not 0.0 < delta < 1.0:
        raise InvalidInputError("delta must be in (0, 1)")
    if c < 1.0:
        raise InvalidInputError("scale constant c must be at least 1")
    if not f.monotone:
        raise InvalidInputError("continuous greedy requires a monotone objective")
    if ground is None:
        ground_ids = list(M.ground())
    else:
        ground_ids = sorted(ground)
    n_eff = max(len(ground_ids), 2)
    m = estimator_sample_count(c, n_eff, delta, sample_scale)
    steps = math.ceil(1.0 / delta)

    rank = 0
    probe: list[int] = []
    for u in ground_ids:
        probe.append(u)
        if M.is_independent(probe):
            rank += 1
        else:
            probe.pop()

    x = np.zeros(f.n)
    point = FractionalPoint(n=f.n)
    for t in range(steps):
        step_weight = delta if t < steps - 1 else 1.0 - delta * (steps - 1)
        base: set[int] = set()
        estimates = {
            u: max(0.0, _estimate(f, x, u, m, rng)) for u in ground_ids
        }
        d_max = max(estimates.values(), default=0.0)
        if d_max > 0.0 and rank > 0:
            floor = delta * d_max / n_eff
            w = d_max
            members: list[int] = []
            while w > floor and len(base) < rank:
                for u in ground_ids:
                    if len(base) >= rank:
                        break
                    if u in base:
                        continue
                    members.append(u)
                    if not M.is_independent(members):
                        members.pop()
                        continue
                    members.pop()
                    if max(0.0, _estimate(f, x, u, m, rng)) >= w:
                        base.add(u)
                        members.append(u)
                w *= 1.0 - delta
        point.weights.append(step_weight)
        point.bases.append(frozenset(base))
        for u in base:
            x[u] += step_weight
    return point


def swap_round(M: Matroid, x: FractionalPoint, rng: np.random.Generator) -> set[int]:
    """Round a convex combination of independent sets to a single one.

    Bases are first padded to a common rank by greedy completion, then merged
    pairwise: elements of the symmetric difference are exchanged with
    probability proportional to the accumulated weights. No value oracle
    queries are made. Generalized partition matroids use block-indexed
    exchanges and therefore no independence queries either; general matroids
    search for a feasible exchange through the independence oracle.
    """
    pairs = [(float(w), set(b)) for w, b in zip(x.weights, x.bases) if w > 0.0]
    if not pairs:
        raise InvalidInputError("decomposition must be non-empty")
    structure = M.partition_structure()
    if structure is not None:
        blocks, caps = structure
        block_of: dict[int, int] = {}
        for j, blk in enumerate(blocks):
            for u in blk:
                block_of[u] = j
        for w, base in pairs:
            if not _partition_independent(base, block_of, caps):
                raise InvalidInputError("dependent base in decomposition")
        _pad_partition(pairs, blocks, caps)
        merged_w, merged = pairs[0]
        for w_i, b_i in pairs[1:]:
            merged = _merge_partition(merged, merged_w, b_i, w_i, rng, block_of)
            merged_w += w_i
        return merged

    for w, base in pairs:
        if not M.is_independent(sorted(base)):
            raise InvalidInputError("dependent base in decomposition")
    target = 0
    probe: list[int] = []
    for u in M.ground():
        probe.append(u)
        if M.is_independent(probe):
            target += 1
        else:
            probe.pop()
    for _, base in pairs:
        _greedy_complete(M, base, target)
    merged_w, merged = pairs[0]
    for w_i, b_i in pairs[1:]:
        merged = _merge_general(M, merged, merged_w, b_i, w_i, rng)
        merged_w += w_i
    return merged


def _greedy_complete(M: Matroid, base: set[int], target: int) -> None:
    if len(base) >= target:
        return
    members = sorted(base)
    for u in M.ground():
        if len(base) >= target:
            return
        if u in base:
            continue
        members.append(u)
        if M.is_independent(members):
            base.add(u)
        else:
            members.pop()


def _merge_general(
    M: Matroid, B1: set[int], w1: float, B2: set[int], w2: float, rng: np.random.Generator
) -> set[int]:
    bias = w1 / (w1 + w2)
    while B1 != B2:
        i = min(B1 - B2)
        j = _find_exchange(M, B1, B2, i)
        if rng.random() < bias:
            B2.discard(j)
            B2.add(i)
        else:
            B1.discard(i)
            B1.add(j)
    return B1


def _find_exchange(M: Matroid, B1: set[int], B2: set[int], i: int) -> int:
    b1_minus = sorted(B1 - {i})
    for j in sorted(B2 - B1):
        if M.is_independent(b1_minus + [j]) and M.is_independent(sorted(B2 - {j}) + [i]):
            return j
    raise InvalidInputError("no feasible exchange: decomposition bases are inconsistent")


def _partition_independent(base: set[int], block_of: dict[int, int], caps: list[int]) -> bool:
    counts = [0] * len(caps)
    for u in base:
        if u not in block_of:
            return False
        j = block_of[u]
        counts[j] += 1
        if counts[j] > caps[j]:
            return False
    return True


def _pad_partition(
    pairs: list[tuple[float, set[int]]], blocks: list[list[int]], caps: list[int]
) -> None:
    # fill every base to the block-wise maximum so all bases have equal rank
    for _, base in pairs:
        for j, blk in enumerate(blocks):
            quota = min(caps[j], len(blk))
            have = sum(1 for u in blk if u in base)
            if have >= quota:
                continue
            for u in blk:
                if have >= quota:
                    break
                if u not in base:
                    base.add(u)
                    have += 1


def _merge_partition(
    B1: set[int],
    w1: float,
    B2: set[int],
    w2: float,
    rng: np.random.Generator,
    block_of: dict[int, int],
) -> set[int]:
    bias = w1 / (w1 + w2)
    only1: dict[int, set[int]] = {}
    only2: dict[int, set[int]] = {}
    for u in B1 - B2:
        only1.setdefault(block_of[u], set()).add(u)
    for u in B2 - B1:
        only2.setdefault(block_of[u], set()).add(u)
    while any(only1.values()):
        i = min(u for s in only1.values() for u in s)
        blk = block_of[i]
        j = min(only2[blk])
        if rng.random() < bias:
            B2.discard(j)
            B2.add(i)
            only2[blk].discard(j)
            only1[blk].discard(i)
        else:
            B1.discard(i)
            B1.add(j)
            only1[blk].discard(i)
            only2[blk].discard(j)
    return B1


def crude_opt_estimate(f: ValueOracle, M: Matroid) -> float:
    """A value opt with f(OPT) <= opt <= 3 f(OPT) for monotone f.

    Runs the deterministic thresholding greedy at accuracy 1/6, whose output
    is a 1/3-approximation, and returns three times its value.
    """
    from .matroid_algos import _thresholding_greedy_value

    _, value = _thresholding_greedy_value(f, M, 1.0 / 6.0)
    return 3.0 * value
