from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from submax import (
    CoverageOracle,
    DirectedCutOracle,
    ExplicitMatroid,
    FacilityLocationOracle,
    GraphicMatroid,
    ModularOracle,
    PartitionMatroid,
    QueryLedger,
    UniformMatroid,
)

# ---------------------------------------------------------------------------
# canonical fixtures

# S1={a,b}, S2={b,c}, S3={c,d}, S4={d}; unit weights
COVERAGE4_SETS = [[0, 1], [1, 2], [2, 3], [3]]


def coverage4(ledger=None):
    return CoverageOracle(COVERAGE4_SETS, 4, ledger=ledger)


def coverage12(ledger=None, seed=5):
    rng = np.random.default_rng(seed)
    sets = []
    for _ in range(12):
        items = np.flatnonzero(rng.random(30) < 0.15).tolist()
        if not items:
            items = [int(rng.integers(30))]
        sets.append(items)
    return CoverageOracle(sets, 30, ledger=ledger)


def partition12(ledger=None):
    return PartitionMatroid([[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]], [2, 1, 1], ledger=ledger)


def cut14(ledger=None, seed=11):
    rng = np.random.default_rng(seed)
    arcs = []
    for a in range(14):
        for b in range(14):
            if a != b and rng.random() < 0.25:
                arcs.append((a, b, float(rng.integers(1, 8))))
    return DirectedCutOracle(14, arcs, ledger=ledger)


def facility6(ledger=None, seed=2):
    rng = np.random.default_rng(seed)
    return FacilityLocationOracle(np.round(rng.random((9, 6)) * 5, 3), ledger=ledger)


def modular5(ledger=None):
    return ModularOracle([3.0, 1.0, 2.0, 5.0, 4.0], ledger=ledger)


def zoo_functions():
    """(name, oracle factory) pairs covering every function class, all n <= 12."""
    return [
        ("coverage4", coverage4),
        ("coverage12", coverage12),
        ("cut14_small", lambda ledger=None: _cut8(ledger)),
        ("facility6", facility6),
        ("modular5", modular5),
    ]


def _cut8(ledger=None, seed=7):
    rng = np.random.default_rng(seed)
    arcs = [
        (a, b, float(rng.integers(1, 6)))
        for a in range(8)
        for b in range(8)
        if a != b and rng.random() < 0.3
    ]
    return DirectedCutOracle(8, arcs, ledger=ledger)


def zoo_matroids():
    """(name, matroid factory) pairs, all n <= 10."""
    return [
        ("uniform_6_3", lambda ledger=None: UniformMatroid(6, 3, ledger)),
        ("partition_6", lambda ledger=None: PartitionMatroid([[0, 1, 2], [3, 4], [5]], [2, 1, 1], ledger)),
        ("graphic_tri_plus", lambda ledger=None: GraphicMatroid(4, [(0, 1), (1, 2), (2, 0), (2, 3), (0, 3)], ledger)),
        ("explicit_free_3", lambda ledger=None: ExplicitMatroid(
            3, [s for r in range(4) for s in itertools.combinations(range(3), r)], ledger)),
    ]


# ---------------------------------------------------------------------------
# independent test oracles


def exact_all_values(f):
    """All 2^n values through an uncounted clone."""
    probe = f.uncounted()
    return {
        frozenset(combo): probe.evaluate(combo)
        for r in range(f.n + 1)
        for combo in itertools.combinations(range(f.n), r)
    }


def exact_multilinear(f, x):
    """F(x) by full 2^n enumeration."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for members, value in exact_all_values(f).items():
        prob = 1.0
        for u in range(f.n):
            prob *= x[u] if u in members else 1.0 - x[u]
        total += prob * value
    return total


def exact_marginal_F(f, x, u):
    """dF/dx_u = F(x with x_u = 1) - F(x with x_u = 0), by enumeration."""
    hi = np.array(x, dtype=float)
    lo = np.array(x, dtype=float)
    hi[u] = 1.0
    lo[u] = 0.0
    return exact_multilinear(f, hi) - exact_multilinear(f, lo)


def uf_has_cycle(num_vertices, edge_list):
    """Standalone union-find cycle check, independent of the matroid code."""
    parent = list(range(num_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (a, b) in edge_list:
        ra, rb = find(a), find(b)
        if ra == rb:
            return True
        parent[ra] = rb
    return False


def enumerate_independent(matroid, ground=None):
    """All independent subsets via an uncounted clone (small fixtures)."""
    probe = matroid.uncounted()
    ground = list(range(matroid.n)) if ground is None else list(ground)
    out = []
    for r in range(len(ground) + 1):
        for combo in itertools.combinations(ground, r):
            if probe.is_independent(combo):
                out.append(frozenset(combo))
    return out


def wilson_halfwidth(successes, trials, z=1.96):
    """97.5%-level Wilson interval half-width for a binomial proportion."""
    if trials == 0:
        return 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials ** 2))
    return half


def mean_and_se(values):
    arr = np.asarray(values, dtype=float)
    se = arr.std(ddof=1) / math.sqrt(len(arr)) if len(arr) > 1 else 0.0
    return float(arr.mean()), float(se)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ledger():
    return QueryLedger()
