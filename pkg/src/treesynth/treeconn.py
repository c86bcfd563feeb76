"""Tree-connectivity of weighted graphs.

The weighted spanning-tree count of a connected graph equals the
determinant of any reduced Laplacian, so its log (tau, the quantity this
package maximizes) comes out of one Cholesky factorization. A spectral
form, sum of log nonzero Laplacian eigenvalues minus log n, serves as an
independent cross-check, and a literal subset-enumeration oracle covers
small graphs in tests.

Scoring a candidate edge {u, v} with weight w against a graph reduces to
its effective resistance Delta: appending the edge multiplies the tree
count by exactly 1 + w * Delta.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DataError, SizeGuardError
from .graphs import (
    ReducedLaplacian,
    WeightedGraph,
    build_reduced_laplacian,
    is_connected,
)

# The enumeration oracle walks all (n-1)-subsets of edges; refuse
# anything that is big on both axes.
ORACLE_MAX_EDGES = 12
ORACLE_MAX_VERTICES = 8


@dataclass(frozen=True)
class TreeConnectivity:
    """Natural log of the weighted spanning-tree count.

    Disconnected graphs report tau = 0 by convention (rather than -inf),
    which keeps downstream bound arithmetic finite.
    """

    tau: float
    connected: bool


def tree_connectivity(g: WeightedGraph) -> TreeConnectivity:
    """tau via Cholesky on the reduced Laplacian. The production path."""
    if g.n == 1:
        return TreeConnectivity(0.0, True)
    if not is_connected(g):
        return TreeConnectivity(0.0, False)
    return TreeConnectivity(build_reduced_laplacian(g).log_det(), True)


def tree_connectivity_spectral(g: WeightedGraph) -> TreeConnectivity:
    """tau from the full Laplacian spectrum; cross-check path.

    Requires a connected input: the zero eigenvalue is dropped and the
    remaining n-1 are logged, so near-zero algebraic connectivity has no
    meaningful value here.
    """
    if not is_connected(g):
        raise DataError("spectral tree-connectivity needs a connected graph")
    if g.n == 1:
        return TreeConnectivity(0.0, True)
    lam = np.linalg.eigvalsh(g.full_laplacian())
    if lam[1] <= 1e-12 * max(float(lam[-1]), 1.0):
        raise DataError("algebraic connectivity is zero up to rounding")
    tau = float(np.sum(np.log(lam[1:])) - math.log(g.n))
    return TreeConnectivity(tau, True)


def count_spanning_trees_bruteforce(g: WeightedGraph) -> float:
    """Weighted spanning-tree count by literal enumeration.

    Sums the weight product of every (n-1)-edge subset that forms a
    spanning tree. Exponential on purpose: this is the independent
    oracle the linear-algebra paths are tested against. Guarded to
    graphs with at most 12 edges or at most 8 vertices.
    """
    if g.num_edges > ORACLE_MAX_EDGES and g.n > ORACLE_MAX_VERTICES:
        raise SizeGuardError(
            f"enumeration oracle refused: {g.num_edges} edges and {g.n} vertices "
            f"(limits: <= {ORACLE_MAX_EDGES} edges or <= {ORACLE_MAX_VERTICES} vertices)"
        )
    if g.n == 1:
        return 1.0
    if g.num_edges < g.n - 1:
        return 0.0
    total = 0.0
    for subset in itertools.combinations(g.edges, g.n - 1):
        if _is_spanning_tree(g.n, subset):
            total += math.prod(w for _, _, w in subset)
    return total


def _is_spanning_tree(n: int, edges) -> bool:
    # n-1 edges and no cycle means a spanning tree; union-find suffices.
    parent = list(range(n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


@dataclass(frozen=True)
class EffectiveResistance:
    value: float
    endpoints: tuple[int, int]


def effective_resistance(L: ReducedLaplacian, u: int, v: int) -> EffectiveResistance:
    """Effective resistance between u and v: a_uv^T L^{-1} a_uv.

    One triangular solve against the cached Cholesky factor; the
    squared norm of the solution is the quadratic form.
    """
    a = L.incidence_vector(u, v)
    y = solve_triangular(L.cholesky, a, lower=True, check_finite=False)
    return EffectiveResistance(float(y @ y), (u, v))


def batch_effective_resistance(L: ReducedLaplacian, pairs) -> np.ndarray:
    """Effective resistances for many vertex pairs in one solve."""
    pairs = list(pairs)
    if not pairs:
        return np.zeros(0)
    A = np.zeros((L.order, len(pairs)))
    for col, (u, v) in enumerate(pairs):
        a = L.incidence_vector(u, v)
        A[:, col] = a
    Y = solve_triangular(L.cholesky, A, lower=True, check_finite=False)
    return np.einsum("ij,ij->j", Y, Y)


@dataclass(frozen=True)
class CandidateScore:
    """score = w * Delta; gain = log(1 + score), the exact tau increase."""

    score: float
    gain: float


def score_candidate(L: ReducedLaplacian, edge) -> CandidateScore:
    """Score one candidate edge (u, v, w) against the graph behind L."""
    u, v, w = edge
    r = effective_resistance(L, u, v)
    s = float(w) * r.value
    return CandidateScore(s, math.log1p(s))
