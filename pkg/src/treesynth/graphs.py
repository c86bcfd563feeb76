"""Weighted graphs, reduced Laplacians, and edge-selection instances.

Conventions used throughout the package:

* vertices are labeled 1..n externally; matrix code is 0-based,
* edge weights are >= 1 so that every tree-connectivity value is
  nonnegative (rescaling by a global factor is an explicit opt-in),
* the reduced Laplacian drops the anchor vertex, vertex n by default;
  its determinant is invariant to the anchor choice,
* all tree-connectivity arithmetic happens in log space.
"""

from __future__ import annotations

import json
import math
import operator
from dataclasses import InitVar, dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, DataError, InfeasibleError, NumericalError

DIRECTION_ADD = "add"
DIRECTION_REMOVE = "remove"
OBJECTIVE_SINGLE = "single-weight"
OBJECTIVE_SLAM = "slam-double"

# Cholesky pivots below this fraction of the largest diagonal entry are
# reported as numerical disconnection instead of silently producing a
# garbage factor.
PIVOT_RTOL = 1e-12


def _canonical_pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


def _as_vertex(x) -> int:
    try:
        return int(operator.index(x))
    except TypeError:
        raise ArgumentError(f"vertex ids must be integers, got {x!r}") from None


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on vertices 1..n with positive edge weights.

    Edges are canonicalized at construction: endpoints ordered u < v,
    parallel edges merged by summing their weights, and the edge list
    sorted by endpoint pair. Weights below 1 are rejected unless
    ``normalize=True``, which rescales every weight by the smallest
    factor that lifts the minimum weight to 1; the factor applied so
    far is kept in ``normalization``.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]
    normalization: float = 1.0
    normalize: InitVar[bool] = False

    def __post_init__(self, normalize: bool) -> None:
        n = _as_vertex(self.n)
        if n < 1:
            raise ArgumentError(f"vertex count must be positive, got {n}")
        object.__setattr__(self, "n", n)

        raw = []
        for e in self.edges:
            e = tuple(e)
            if len(e) != 3:
                raise ArgumentError(f"edge must be (u, v, weight), got {e!r}")
            u, v = _as_vertex(e[0]), _as_vertex(e[1])
            w = float(e[2])
            if not (1 <= u <= n and 1 <= v <= n):
                raise ArgumentError(f"vertex id out of range 1..{n}: ({u}, {v})")
            if u == v:
                raise ArgumentError(f"self-loop at vertex {u} is not allowed")
            if not math.isfinite(w) or w <= 0:
                raise ArgumentError(f"edge weight must be positive and finite, got {w!r}")
            raw.append((u, v, w))

        alpha = 1.0
        if raw:
            wmin = min(w for _, _, w in raw)
            if wmin < 1.0:
                if not normalize:
                    raise ArgumentError(
                        f"edge weights must be >= 1 (minimum is {wmin}); "
                        "pass normalize=True to rescale"
                    )
                alpha = 1.0 / wmin
                # One rounding bump if 1/wmin * wmin lands just under 1.
                while wmin * alpha < 1.0:
                    alpha = math.nextafter(alpha, math.inf)

        merged: dict[tuple[int, int], float] = {}
        for u, v, w in raw:
            pair = _canonical_pair(u, v)
            merged[pair] = merged.get(pair, 0.0) + w * alpha
        canon = tuple((u, v, w) for (u, v), w in sorted(merged.items()))
        object.__setattr__(self, "edges", canon)
        object.__setattr__(self, "normalization", float(self.normalization) * alpha)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def pair_weights(self) -> dict[tuple[int, int], float]:
        return {(u, v): w for u, v, w in self.edges}

    def weight(self, u: int, v: int) -> float | None:
        """Merged weight of the edge {u, v}, or None if absent."""
        return self.pair_weights.get(_canonical_pair(_as_vertex(u), _as_vertex(v)))

    @cached_property
    def _adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def connected(self) -> bool:
        return self.component_count == 1

    @cached_property
    def component_count(self) -> int:
        seen = [False] * (self.n + 1)
        components = 0
        for start in range(1, self.n + 1):
            if seen[start]:
                continue
            components += 1
            stack = [start]
            seen[start] = True
            while stack:
                x = stack.pop()
                for y in self._adjacency[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
        return components

    def with_edges(self, extra: Iterable[Sequence]) -> WeightedGraph:
        """New graph with ``extra`` (u, v, w) edges merged in."""
        extra_t = tuple(tuple(e) for e in extra)
        return WeightedGraph(self.n, self.edges + extra_t, normalization=self.normalization)

    def without_pairs(self, pairs: Iterable[Sequence]) -> WeightedGraph:
        """New graph with the given endpoint pairs deleted entirely."""
        drop = set()
        for p in pairs:
            u, v = _as_vertex(p[0]), _as_vertex(p[1])
            pair = _canonical_pair(u, v)
            if pair not in self.pair_weights:
                raise ArgumentError(f"no edge {pair} to remove")
            drop.add(pair)
        kept = tuple(e for e in self.edges if (e[0], e[1]) not in drop)
        return WeightedGraph(self.n, kept, normalization=self.normalization)

    def full_laplacian(self) -> np.ndarray:
        """Dense n x n weighted Laplacian."""
        L = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            i, j = u - 1, v - 1
            L[i, i] += w
            L[j, j] += w
            L[i, j] -= w
            L[j, i] -= w
        return L


def is_connected(g: WeightedGraph) -> bool:
    return g.connected


def component_count(g: WeightedGraph) -> int:
    return g.component_count


def _cholesky_rank_one_update(factor: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Update a lower Cholesky factor C after a rank-one addition.

    Returns C' with C' C'^T = C C^T + x x^T. Standard hyperbolic-rotation
    sweep; rows above the first nonzero of x are untouched.
    """
    C = np.array(factor)
    x = np.array(x, dtype=float)
    m = x.shape[0]
    nz = np.nonzero(x)[0]
    start = int(nz[0]) if nz.size else m
    for j in range(start, m):
        cjj = C[j, j]
        r = math.hypot(cjj, x[j])
        c = r / cjj
        s = x[j] / cjj
        C[j, j] = r
        if j + 1 < m:
            tail = (C[j + 1 :, j] + s * x[j + 1 :]) / c
            x[j + 1 :] = c * x[j + 1 :] - s * tail
            C[j + 1 :, j] = tail
    return C


@dataclass(frozen=True)
class ReducedLaplacian:
    """Weighted Laplacian with the anchor vertex's row and column removed.

    Positive definite exactly when the generating graph is connected, in
    which case its determinant is the weighted spanning-tree count. The
    lower Cholesky factor is computed on first use and cached. Pivots
    below PIVOT_RTOL times the largest diagonal entry raise
    NumericalError (the graph is disconnected up to rounding).
    """

    n: int
    anchor: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        n = _as_vertex(self.n)
        anchor = _as_vertex(self.anchor)
        if n < 2:
            raise ArgumentError("reduced Laplacian needs at least 2 vertices")
        if not 1 <= anchor <= n:
            raise ArgumentError(f"anchor {anchor} out of range 1..{n}")
        m = np.array(self.matrix, dtype=float)
        if m.shape != (n - 1, n - 1):
            raise ArgumentError(
                f"matrix shape {m.shape} does not match order {n - 1}"
            )
        if m.size and not np.allclose(m, m.T, rtol=0.0, atol=1e-12):
            raise ArgumentError("reduced Laplacian must be symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "matrix", m)

    @property
    def order(self) -> int:
        return self.n - 1

    @cached_property
    def cholesky(self) -> np.ndarray:
        """Lower-triangular factor C with C C^T = matrix."""
        try:
            factor = np.linalg.cholesky(self.matrix)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                "Cholesky factorization failed, matrix is not positive "
                "definite (graph numerically disconnected)"
            ) from exc
        pivots = np.diag(factor) ** 2
        floor = PIVOT_RTOL * float(np.max(np.diag(self.matrix)))
        if np.any(pivots < floor):
            raise NumericalError(
                "Cholesky pivot underflow, graph is disconnected up to rounding"
            )
        factor.setflags(write=False)
        return factor

    def log_det(self) -> float:
        """log det of the matrix, computed from the Cholesky diagonal."""
        return float(2.0 * np.sum(np.log(np.diag(self.cholesky))))

    def reduced_index(self, vertex: int) -> int:
        """Row index of an external vertex, -1 for the anchor."""
        vertex = _as_vertex(vertex)
        if not 1 <= vertex <= self.n:
            raise ArgumentError(f"vertex {vertex} out of range 1..{self.n}")
        if vertex == self.anchor:
            return -1
        j = vertex - 1
        return j if j < self.anchor - 1 else j - 1

    def incidence_vector(self, u: int, v: int) -> np.ndarray:
        """Signed incidence column of edge {u, v}, anchor coordinate dropped."""
        iu, iv = self.reduced_index(u), self.reduced_index(v)
        if u == v:
            raise ArgumentError("edge endpoints must differ")
        a = np.zeros(self.order)
        if iu >= 0:
            a[iu] = 1.0
        if iv >= 0:
            a[iv] = -1.0
        return a

    def with_edge(self, u: int, v: int, w: float) -> ReducedLaplacian:
        """Commit edge {u, v} with weight w.

        The matrix gets the rank-one addition w a a^T and the cached
        Cholesky factor is refreshed by a rank-one update, so greedy
        loops avoid a full refactorization per step.
        """
        w = float(w)
        if not math.isfinite(w) or w <= 0:
            raise ArgumentError(f"edge weight must be positive and finite, got {w!r}")
        a = self.incidence_vector(u, v)
        iu, iv = self.reduced_index(u), self.reduced_index(v)
        m = np.array(self.matrix)
        if iu >= 0:
            m[iu, iu] += w
        if iv >= 0:
            m[iv, iv] += w
        if iu >= 0 and iv >= 0:
            m[iu, iv] -= w
            m[iv, iu] -= w
        out = ReducedLaplacian(self.n, self.anchor, m)
        updated = _cholesky_rank_one_update(self.cholesky, math.sqrt(w) * a)
        updated.setflags(write=False)
        out.__dict__["cholesky"] = updated
        return out


def build_reduced_laplacian(g: WeightedGraph, anchor: int | None = None) -> ReducedLaplacian:
    """Assemble the reduced Laplacian of g, dropping ``anchor`` (default n)."""
    if g.n < 2:
        raise ArgumentError("reduced Laplacian needs at least 2 vertices")
    anchor = g.n if anchor is None else _as_vertex(anchor)
    if not 1 <= anchor <= g.n:
        raise ArgumentError(f"anchor {anchor} out of range 1..{g.n}")
    aj = anchor - 1
    m = np.zeros((g.n - 1, g.n - 1))

    def ridx(vertex: int) -> int:
        if vertex == anchor:
            return -1
        j = vertex - 1
        return j if j < aj else j - 1

    for u, v, w in g.edges:
        iu, iv = ridx(u), ridx(v)
        if iu >= 0:
            m[iu, iu] += w
        if iv >= 0:
            m[iv, iv] += w
        if iu >= 0 and iv >= 0:
            m[iu, iv] -= w
            m[iv, iu] -= w
    return ReducedLaplacian(g.n, anchor, m)


def _edge_weight(edge: tuple, channel: str | None) -> float:
    if channel is None:
        return float(edge[2])
    if channel == "p":
        return float(edge[2])
    if channel == "theta":
        return float(edge[3])
    raise ArgumentError(f"unknown weight channel {channel!r}")


@dataclass(frozen=True)
class EdgeSelectionInstance:
    """A budgeted edge-selection problem over a connected base graph.

    direction "add" asks for k candidates to append to the base graph,
    "remove" for k candidates to delete from it. objective
    "single-weight" carries one weight per edge, [u, v, w]; "slam-double"
    carries translational and rotational precisions, [u, v, wp, wt], and
    scores designs by twice the translational tree-connectivity plus the
    rotational one.

    Candidate order is significant: greedy ties break toward the lowest
    index and selections are reported as indices into ``candidates``.
    """

    n: int
    base_edges: tuple[tuple, ...]
    candidates: tuple[tuple, ...]
    k: int
    direction: str = DIRECTION_ADD
    objective: str = OBJECTIVE_SINGLE

    def __post_init__(self) -> None:
        if self.direction not in (DIRECTION_ADD, DIRECTION_REMOVE):
            raise ArgumentError(f"direction must be add or remove, got {self.direction!r}")
        if self.objective not in (OBJECTIVE_SINGLE, OBJECTIVE_SLAM):
            raise ArgumentError(
                f"objective must be {OBJECTIVE_SINGLE!r} or {OBJECTIVE_SLAM!r}, "
                f"got {self.objective!r}"
            )
        n = _as_vertex(self.n)
        arity = 3 if self.objective == OBJECTIVE_SINGLE else 4

        def check(e: tuple, what: str) -> tuple:
            e = tuple(e)
            if len(e) != arity:
                raise ArgumentError(
                    f"{what} must have {arity} entries for {self.objective}, got {e!r}"
                )
            u, v = _as_vertex(e[0]), _as_vertex(e[1])
            if not (1 <= u <= n and 1 <= v <= n):
                raise ArgumentError(f"{what} endpoint out of range 1..{n}: ({u}, {v})")
            if u == v:
                raise ArgumentError(f"{what} may not be a self-loop (vertex {u})")
            ws = tuple(float(x) for x in e[2:])
            for w in ws:
                if not math.isfinite(w) or w < 1.0:
                    raise ArgumentError(f"{what} weight must be >= 1 and finite, got {w!r}")
            return (u, v, *ws)

        base = tuple(check(e, "base edge") for e in self.base_edges)
        cands = tuple(check(e, "candidate") for e in self.candidates)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "base_edges", base)
        object.__setattr__(self, "candidates", cands)

        k = _as_vertex(self.k)
        if not 0 <= k <= len(cands):
            raise ArgumentError(f"budget k={k} outside 0..{len(cands)}")
        object.__setattr__(self, "k", k)

        for channel, _ in self.channels:
            g = self.base_graph(channel)
            if not g.connected:
                raise DataError(
                    f"base graph is disconnected ({g.component_count} components)"
                )

        if self.direction == DIRECTION_REMOVE:
            seen: set[tuple[int, int]] = set()
            base_g = self.base_graph(self.channels[0][0])
            for e in cands:
                pair = _canonical_pair(e[0], e[1])
                if pair in seen:
                    raise ArgumentError(f"duplicate removal candidate {pair}")
                seen.add(pair)
                for channel, _ in self.channels:
                    bw = self.base_graph(channel).weight(*pair)
                    if bw is None:
                        raise ArgumentError(
                            f"removal candidate {pair} is not a base edge"
                        )
                    cw = _edge_weight(e, channel)
                    if abs(cw - bw) > 1e-9 * max(1.0, abs(bw)):
                        raise ArgumentError(
                            f"removal candidate {pair} weight {cw} does not match "
                            f"the (merged) base edge weight {bw}"
                        )

    @property
    def num_candidates(self) -> int:
        return len(self.candidates)

    @cached_property
    def channels(self) -> tuple[tuple[str | None, float], ...]:
        """Weight channels with their objective multipliers."""
        if self.objective == OBJECTIVE_SINGLE:
            return ((None, 1.0),)
        return (("p", 2.0), ("theta", 1.0))

    @cached_property
    def _base_graphs(self) -> dict[str | None, WeightedGraph]:
        out: dict[str | None, WeightedGraph] = {}
        for channel, _ in self.channels:
            edges = [(u_v[0], u_v[1], _edge_weight(u_v, channel)) for u_v in self.base_edges]
            out[channel] = WeightedGraph(self.n, tuple(edges))
        return out

    def base_graph(self, channel: str | None = None) -> WeightedGraph:
        if channel is None and self.objective == OBJECTIVE_SLAM:
            raise ArgumentError("slam-double instances require a channel, 'p' or 'theta'")
        if channel is not None and self.objective == OBJECTIVE_SINGLE:
            raise ArgumentError("single-weight instances have no named channels")
        return self._base_graphs[channel]

    @cached_property
    def candidate_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((e[0], e[1]) for e in self.candidates)

    def candidate_weights(self, channel: str | None = None) -> np.ndarray:
        w = np.array([_edge_weight(e, channel) for e in self.candidates])
        w.setflags(write=False)
        return w

    def candidate_edges(self, indices: Iterable[int], channel: str | None = None) -> list[tuple[int, int, float]]:
        """Materialize (u, v, w) triples for a selection, per channel."""
        out = []
        for i in indices:
            e = self.candidates[i]
            out.append((e[0], e[1], _edge_weight(e, channel)))
        return out

    def merged_base_edges(self) -> tuple[tuple, ...]:
        """Base edges after parallel-edge merging, in instance arity."""
        graphs = [self.base_graph(channel) for channel, _ in self.channels]
        first = graphs[0].edges
        if self.objective == OBJECTIVE_SINGLE:
            return first
        theta = graphs[1].pair_weights
        return tuple((u, v, w, theta[(u, v)]) for u, v, w in first)

    def describe(self) -> dict:
        return {
            "n": self.n,
            "m_init": self.base_graph(self.channels[0][0]).num_edges,
            "c": self.num_candidates,
            "k": self.k,
            "direction": self.direction,
            "objective": self.objective,
        }


def reduce_removal_to_addition(inst: EdgeSelectionInstance) -> EdgeSelectionInstance:
    """Rewrite a removal instance as an equivalent addition instance.

    The base becomes the skeleton with every removal candidate deleted,
    the candidates stay put, and the budget flips to c - k: keeping a
    subset S of candidates is the same design as removing its complement,
    with identical objective value.
    """
    if inst.direction != DIRECTION_REMOVE:
        raise ArgumentError("only removal instances can be reduced")
    cand_pairs = {_canonical_pair(e[0], e[1]) for e in inst.candidates}
    skeleton = tuple(
        e for e in inst.merged_base_edges() if _canonical_pair(e[0], e[1]) not in cand_pairs
    )
    probe_edges = [(e[0], e[1], _edge_weight(e, inst.channels[0][0])) for e in skeleton]
    probe = WeightedGraph(inst.n, tuple(probe_edges))
    if not probe.connected:
        raise InfeasibleError(
            "the skeleton left after deleting every removal candidate is "
            f"disconnected ({probe.component_count} components); the reduction "
            "to an addition instance needs a connected retained base"
        )
    return EdgeSelectionInstance(
        n=inst.n,
        base_edges=skeleton,
        candidates=inst.candidates,
        k=inst.num_candidates - inst.k,
        direction=DIRECTION_ADD,
        objective=inst.objective,
    )


def removal_set_from_addition(inst: EdgeSelectionInstance, kept_indices: Iterable[int]) -> tuple[int, ...]:
    """Map a kept-candidate selection of the reduced instance back to the
    removal set of the original: everything not kept gets removed."""
    raw = [int(i) for i in kept_indices]
    kept = set(raw)
    if len(kept) != len(raw):
        raise ArgumentError("kept indices repeat")
    bad = [i for i in kept if not 0 <= i < inst.num_candidates]
    if bad:
        raise ArgumentError(f"kept indices out of range: {sorted(bad)}")
    if len(kept) != inst.k:
        raise ArgumentError(
            f"kept {len(kept)} candidates, the reduced budget keeps exactly {inst.k}"
        )
    return tuple(i for i in range(inst.num_candidates) if i not in kept)


def random_instance(
    n: int,
    m_init: int,
    candidate_mode: str = "complement",
    weight_range: tuple[float, float] = (1.0, 1.0),
    seed: int = 0,
    *,
    k: int = 0,
    sample_size: int | None = None,
    max_tries: int = 10000,
) -> EdgeSelectionInstance:
    """Sample a random single-weight addition instance.

    The base graph has exactly m_init edges drawn uniformly among vertex
    pairs and is resampled until connected. candidate_mode "complement"
    takes every non-base pair as a candidate; "sampled" draws
    ``sample_size`` of them without replacement. Weights are uniform in
    ``weight_range`` (bounds must be >= 1). Deterministic per seed.
    """
    n = _as_vertex(n)
    if n < 2:
        raise ArgumentError("need at least 2 vertices")
    max_edges = n * (n - 1) // 2
    if m_init < n - 1:
        raise ArgumentError(f"m_init={m_init} cannot connect {n} vertices (need >= {n - 1})")
    if m_init > max_edges:
        raise ArgumentError(f"m_init={m_init} exceeds the {max_edges} available pairs")
    lo, hi = float(weight_range[0]), float(weight_range[1])
    if not (1.0 <= lo <= hi) or not math.isfinite(hi):
        raise ArgumentError(f"weight_range must satisfy 1 <= lo <= hi, got {weight_range!r}")
    if candidate_mode not in ("complement", "sampled"):
        raise ArgumentError(f"candidate_mode must be complement or sampled, got {candidate_mode!r}")

    rng = np.random.default_rng(seed)
    all_pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]

    base_pairs: list[tuple[int, int]] | None = None
    base_weights: np.ndarray | None = None
    for _ in range(max_tries):
        idx = sorted(rng.choice(len(all_pairs), size=m_init, replace=False).tolist())
        pairs = [all_pairs[i] for i in idx]
        weights = rng.uniform(lo, hi, size=m_init)
        probe = WeightedGraph(n, tuple((u, v, float(w)) for (u, v), w in zip(pairs, weights)))
        if probe.connected:
            base_pairs, base_weights = pairs, weights
            break
    if base_pairs is None:
        raise DataError(
            f"could not sample a connected base graph with n={n}, m_init={m_init} "
            f"after {max_tries} tries"
        )

    base_set = set(base_pairs)
    complement = [p for p in all_pairs if p not in base_set]
    if candidate_mode == "complement":
        cand_pairs = complement
    else:
        if sample_size is None:
            raise ArgumentError("candidate_mode='sampled' requires sample_size")
        if not 0 <= sample_size <= len(complement):
            raise ArgumentError(
                f"sample_size={sample_size} outside 0..{len(complement)} available pairs"
            )
        idx = sorted(rng.choice(len(complement), size=sample_size, replace=False).tolist())
        cand_pairs = [complement[i] for i in idx]
    cand_weights = rng.uniform(lo, hi, size=len(cand_pairs))

    return EdgeSelectionInstance(
        n=n,
        base_edges=tuple((u, v, float(w)) for (u, v), w in zip(base_pairs, base_weights)),
        candidates=tuple((u, v, float(w)) for (u, v), w in zip(cand_pairs, cand_weights)),
        k=k,
        direction=DIRECTION_ADD,
        objective=OBJECTIVE_SINGLE,
    )


# ---------------------------------------------------------------------------
# JSON instance files


def instance_to_json_dict(inst: EdgeSelectionInstance) -> dict:
    return {
        "n": inst.n,
        "base_edges": [list(e) for e in inst.base_edges],
        "candidates": [list(e) for e in inst.candidates],
        "k": inst.k,
        "direction": inst.direction,
        "objective": inst.objective,
    }


def _json_int(x, what: str) -> int:
    if isinstance(x, bool):
        raise DataError(f"{what} must be an integer, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, float) and x.is_integer():
        return int(x)
    raise DataError(f"{what} must be an integer, got {x!r}")


def instance_from_json_dict(doc: dict) -> EdgeSelectionInstance:
    if not isinstance(doc, dict):
        raise DataError("instance file must hold a JSON object")
    missing = {"n", "base_edges", "candidates", "k", "direction", "objective"} - set(doc)
    if missing:
        raise DataError(f"instance file is missing keys: {sorted(missing)}")
    direction = doc["direction"]
    objective = doc["objective"]
    arity = 3 if objective == OBJECTIVE_SINGLE else 4

    def edge_list(entries, what: str, allow_bare_pairs: bool) -> list[tuple]:
        if not isinstance(entries, list):
            raise DataError(f"{what} must be a JSON array")
        out = []
        for e in entries:
            if not isinstance(e, list) or not all(isinstance(x, (int, float)) for x in e):
                raise DataError(f"{what} entries must be arrays of numbers, got {e!r}")
            if len(e) == 2 and allow_bare_pairs:
                out.append((_json_int(e[0], what), _json_int(e[1], what)))
            elif len(e) == arity:
                out.append((_json_int(e[0], what), _json_int(e[1], what), *map(float, e[2:])))
            else:
                raise DataError(
                    f"{what} entries must have {arity} numbers for {objective!r}, got {e!r}"
                )
        return out

    base = edge_list(doc["base_edges"], "base_edges", allow_bare_pairs=False)
    allow_bare = direction == DIRECTION_REMOVE
    cands = edge_list(doc["candidates"], "candidates", allow_bare_pairs=allow_bare)

    if allow_bare and any(len(e) == 2 for e in cands):
        # Bare [u, v] removal candidates take their weights from the
        # merged base edge they refer to.
        merged: dict[tuple[int, int], tuple] = {}
        for e in base:
            pair = _canonical_pair(e[0], e[1])
            prev = merged.get(pair)
            if prev is None:
                merged[pair] = e[2:]
            else:
                merged[pair] = tuple(a + b for a, b in zip(prev, e[2:]))
        filled = []
        for e in cands:
            if len(e) == 2:
                ws = merged.get(_canonical_pair(e[0], e[1]))
                if ws is None:
                    raise DataError(f"removal candidate {e!r} is not a base edge")
                filled.append((e[0], e[1], *ws))
            else:
                filled.append(e)
        cands = filled

    try:
        return EdgeSelectionInstance(
            n=_json_int(doc["n"], "n"),
            base_edges=tuple(base),
            candidates=tuple(cands),
            k=_json_int(doc["k"], "k"),
            direction=direction,
            objective=objective,
        )
    except ArgumentError as exc:
        raise DataError(f"invalid instance file: {exc}") from exc


def load_instance(path: str | Path) -> EdgeSelectionInstance:
    path = Path(path)
    if not path.exists():
        raise DataError(f"instance file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"instance file {path} is not valid JSON: {exc}") from exc
    return instance_from_json_dict(doc)


def save_instance(inst: EdgeSelectionInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_json_dict(inst), indent=2) + "\n")
