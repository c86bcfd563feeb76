"""Convex relaxation of edge selection.

Relaxing the 0/1 selector of each candidate to pi_i in [0, 1] makes the
selector-weighted reduced Laplacian L(pi) an affine matrix function, so
log det L(pi) is concave and the budgeted relaxation

    maximize log det L(pi)  subject to  sum pi = k, 0 <= pi <= 1

is solved to optimality by projected-gradient ascent with an Armijo
backtracking line search. The optimum upper-bounds every integral
design of the same budget; rounding pi back to a k-subset recovers a
feasible design. An L1-penalized box variant trades the hard budget for
a sparsity price lambda.

For slam-double instances the objective is the 2:1 channel combination
throughout, matching the rest of the package.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ArgumentError, ConvergenceError, NumericalError
from .graphs import (
    DIRECTION_ADD,
    OBJECTIVE_SINGLE,
    EdgeSelectionInstance,
    ReducedLaplacian,
    build_reduced_laplacian,
)
from .greedy import SelectionResult, gain_function

ARMIJO_SIGMA = 1e-4
BACKTRACK_SHRINK = 0.5
INITIAL_STEP = 1.0
DEFAULT_TOLERANCE = 1e-7
DEFAULT_MAX_ITERS = 5000
# capped-simplex projection: guaranteed bound on |sum(x) - k| of the output
SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class RelaxedSolution:
    """Solver output: the fractional selector and its objective.

    kkt_residual is the infinity norm of pi - P(pi + grad), the
    projected-gradient fixed-point residual, zero exactly at an optimum.
    objective_curve holds one value per accepted iterate and never
    decreases.
    """

    pi: np.ndarray
    tau_cvx_star: float
    iterations: int
    kkt_residual: float
    objective_curve: tuple[float, ...]

    def __post_init__(self) -> None:
        pi = np.array(self.pi, dtype=float)
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)

    def to_dict(self) -> dict:
        return {
            "pi": [float(x) for x in self.pi],
            "tau_cvx_star": self.tau_cvx_star,
            "iterations": self.iterations,
            "kkt_residual": self.kkt_residual,
        }


class _ChannelOps:
    """Assembly and factorization of L(pi) for one weight channel.

    L(pi) = L_base + sum_i pi_i w_i a_i a_i^T is built by scattering the
    c selector terms onto a copy of the base matrix (O(c) per assembly),
    and the gradient w_i * a_i^T L(pi)^{-1} a_i comes from one batched
    triangular solve against the incidence columns.
    """

    def __init__(self, inst: EdgeSelectionInstance, channel: str | None, mult: float):
        self.mult = mult
        base = build_reduced_laplacian(inst.base_graph(channel))
        self.base = base
        self.w = np.array(inst.candidate_weights(channel))
        c = inst.num_candidates
        order = base.order
        ru = np.full(c, -1, dtype=int)
        rv = np.full(c, -1, dtype=int)
        A = np.zeros((order, c))
        for i, (u, v) in enumerate(inst.candidate_pairs):
            iu, iv = base.reduced_index(u), base.reduced_index(v)
            ru[i], rv[i] = iu, iv
            if iu >= 0:
                A[iu, i] = 1.0
            if iv >= 0:
                A[iv, i] = -1.0
        self.A = A
        self._ru, self._rv = ru, rv
        self._mu = ru >= 0
        self._mv = rv >= 0
        self._mb = self._mu & self._mv

    def matrix(self, pi: np.ndarray) -> np.ndarray:
        t = pi * self.w
        M = np.array(self.base.matrix)
        mu, mv, mb = self._mu, self._mv, self._mb
        ru, rv = self._ru, self._rv
        np.add.at(M, (ru[mu], ru[mu]), t[mu])
        np.add.at(M, (rv[mv], rv[mv]), t[mv])
        np.add.at(M, (ru[mb], rv[mb]), -t[mb])
        np.add.at(M, (rv[mb], ru[mb]), -t[mb])
        return M

    def chol(self, pi: np.ndarray) -> np.ndarray:
        try:
            return np.linalg.cholesky(self.matrix(pi))
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                "selector-weighted Laplacian lost positive definiteness"
            ) from exc

    def logdet(self, pi: np.ndarray) -> float:
        C = self.chol(pi)
        return float(2.0 * np.sum(np.log(np.diag(C))))

    def logdet_and_grad(self, pi: np.ndarray) -> tuple[float, np.ndarray]:
        C = self.chol(pi)
        value = float(2.0 * np.sum(np.log(np.diag(C))))
        if self.A.shape[1] == 0:
            return value, np.zeros(0)
        Y = solve_triangular(C, self.A, lower=True, check_finite=False)
        delta = np.einsum("ij,ij->j", Y, Y)
        return value, self.w * delta


def _channel_ops(inst: EdgeSelectionInstance) -> list[_ChannelOps]:
    if inst.direction != DIRECTION_ADD:
        raise ArgumentError("the relaxation expects an addition instance; reduce removals first")
    return [_ChannelOps(inst, ch, mult) for ch, mult in inst.channels]


def _validate_pi(pi, c: int) -> np.ndarray:
    pi = np.asarray(pi, dtype=float).reshape(-1)
    if pi.shape != (c,):
        raise ArgumentError(f"selector must have {c} entries, got shape {pi.shape}")
    if not np.all(np.isfinite(pi)):
        raise ArgumentError("selector entries must be finite")
    if np.any(pi < -1e-9) or np.any(pi > 1.0 + 1e-9):
        raise ArgumentError("selector entries must lie in [0, 1]")
    return np.clip(pi, 0.0, 1.0)


def laplacian_of_pi(
    inst: EdgeSelectionInstance, pi, channel: str | None = None
) -> ReducedLaplacian:
    """Reduced Laplacian of base plus pi-scaled candidates, one channel."""
    pi = _validate_pi(pi, inst.num_candidates)
    if inst.objective == OBJECTIVE_SINGLE:
        if channel is not None:
            raise ArgumentError("single-weight instances have no named channels")
    elif channel not in ("p", "theta"):
        raise ArgumentError("slam-double instances require channel 'p' or 'theta'")
    ops = _ChannelOps(inst, channel, 1.0)
    return ReducedLaplacian(inst.n, ops.base.anchor, ops.matrix(pi))


def relaxed_objective_and_gradient(
    inst: EdgeSelectionInstance, pi
) -> tuple[float, np.ndarray]:
    """Objective value and gradient of the relaxation at pi.

    The gradient entry for candidate i is w_i times its effective
    resistance in the pi-weighted graph (channel-combined), always
    nonnegative: the objective is monotone in every selector.
    """
    pi = _validate_pi(pi, inst.num_candidates)
    value = 0.0
    grad = np.zeros(inst.num_candidates)
    for ops in _channel_ops(inst):
        v, g = ops.logdet_and_grad(pi)
        value += ops.mult * v
        grad += ops.mult * g
    return value, grad


def project_capped_simplex(v, k: float) -> np.ndarray:
    """Euclidean projection onto {x : 0 <= x <= 1, sum x = k}.

    Bisection on the shift theta in clip(v - theta, 0, 1); the sum is
    monotone in theta. The interval is halved until it collapses to
    adjacent floats, then the leftover sum defect (a few ulp) is spread
    over the strictly interior coordinates. Anything sloppier leaves a
    systematic per-coordinate bias that the ascent line search reads as
    a descent direction once the true step shrinks below it.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    c = v.size
    k = float(k)
    if not 0.0 <= k <= c:
        raise ArgumentError(f"target sum {k} outside 0..{c}")
    if c == 0:
        return np.zeros(0)
    if k == 0.0:
        return np.zeros(c)
    if k == float(c):
        return np.ones(c)
    lo = float(v.min()) - 1.0  # sum = c >= k here
    hi = float(v.max())        # sum = 0 <= k here
    for _ in range(200):
        theta = 0.5 * (lo + hi)
        if theta <= lo or theta >= hi:
            break
        s = float(np.clip(v - theta, 0.0, 1.0).sum())
        if s > k:
            lo = theta
        elif s < k:
            hi = theta
        else:
            lo = hi = theta
            break
    x = np.clip(v - 0.5 * (lo + hi), 0.0, 1.0)
    free = (x > 0.0) & (x < 1.0)
    n_free = int(free.sum())
    if n_free:
        x[free] += (k - float(x.sum())) / n_free
        np.clip(x, 0.0, 1.0, out=x)
    return x


def _projected_ascent(value_and_grad, project, start, tolerance, max_iters, make_best):
    """Shared ascent loop: Armijo backtracking along the projection arc.

    Accepted steps never decrease the objective (the projection
    inequality makes the directional derivative nonnegative), so the
    recorded curve is monotone. Non-convergence raises ConvergenceError
    carrying the best iterate via ``make_best``.
    """
    pi = project(np.asarray(start, dtype=float).reshape(-1))
    value, grad = value_and_grad(pi)
    curve = [value]
    iterations = 0
    while True:
        residual = float(np.max(np.abs(pi - project(pi + grad)))) if pi.size else 0.0
        if residual <= tolerance:
            break
        if iterations >= max_iters:
            raise ConvergenceError(
                f"projected gradient did not reach tolerance {tolerance} in "
                f"{max_iters} iterations (residual {residual:.3e})",
                best=make_best(pi, value, iterations, residual, tuple(curve)),
            )
        t = INITIAL_STEP
        while True:
            cand = project(pi + t * grad)
            d = cand - pi
            gd = float(grad @ d)
            # objective only here; the gradient is recomputed on acceptance
            cand_value = _value_only_hook(value_and_grad, cand)
            if gd > 0.0 and cand_value >= value + ARMIJO_SIGMA * gd:
                pi = cand
                break
            t *= BACKTRACK_SHRINK
            if t < 1e-18:
                raise ConvergenceError(
                    "line search stalled before reaching tolerance "
                    f"(residual {residual:.3e})",
                    best=make_best(pi, value, iterations, residual, tuple(curve)),
                )
        value, grad = value_and_grad(pi)
        curve.append(value)
        iterations += 1
    return pi, value, iterations, residual, tuple(curve)


def _value_only_hook(value_and_grad, pi):
    fn = getattr(value_and_grad, "value_only", None)
    if fn is not None:
        return fn(pi)
    return value_and_grad(pi)[0]


class _ObjectiveP2:
    def __init__(self, ops: list[_ChannelOps]):
        self.ops = ops

    def __call__(self, pi):
        value = 0.0
        grad = np.zeros(pi.size)
        for op in self.ops:
            v, g = op.logdet_and_grad(pi)
            value += op.mult * v
            grad += op.mult * g
        return value, grad

    def value_only(self, pi):
        return sum(op.mult * op.logdet(pi) for op in self.ops)


class _ObjectiveP3:
    def __init__(self, ops: list[_ChannelOps], lam: float):
        self.ops = ops
        self.lam = lam

    def __call__(self, pi):
        value = 0.0
        grad = np.zeros(pi.size)
        for op in self.ops:
            v, g = op.logdet_and_grad(pi)
            value += op.mult * v
            grad += op.mult * g
        # pi >= 0, so the L1 penalty is a plain linear term
        return value - self.lam * float(pi.sum()), grad - self.lam

    def value_only(self, pi):
        value = sum(op.mult * op.logdet(pi) for op in self.ops)
        return value - self.lam * float(pi.sum())


def solve_p2(
    inst: EdgeSelectionInstance,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iters: int = DEFAULT_MAX_ITERS,
    start: Sequence[float] | None = None,
) -> RelaxedSolution:
    """Budgeted relaxation: maximize the objective over the capped simplex.

    Any feasible ``start`` may be supplied (it is projected first);
    the default is the uniform k/c vector. The converged objective
    value upper-bounds tau of every k-edge integral design.
    """
    c = inst.num_candidates
    k = inst.k
    ops = _channel_ops(inst)
    objective = _ObjectiveP2(ops)
    if start is None:
        start = np.full(c, k / c if c else 0.0)
    pi, value, iterations, residual, curve = _projected_ascent(
        objective,
        lambda v: project_capped_simplex(v, k),
        start,
        float(tolerance),
        int(max_iters),
        lambda p, val, it, res, cur: RelaxedSolution(p, val, it, res, cur),
    )
    return RelaxedSolution(pi, value, iterations, residual, curve)


def solve_p3(
    inst: EdgeSelectionInstance,
    lam: float,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iters: int = DEFAULT_MAX_ITERS,
    start: Sequence[float] | None = None,
) -> RelaxedSolution:
    """L1-penalized relaxation over the box [0, 1]^c.

    lambda = 0 drives every selector to 1; lambda above the largest
    initial score w_i * Delta_i drives them all to 0. tau_cvx_star
    reports the unpenalized objective at the final selector while the
    recorded curve tracks the penalized one the solver climbs.
    """
    lam = float(lam)
    if lam < 0 or not math.isfinite(lam):
        raise ArgumentError(f"lambda must be finite and >= 0, got {lam!r}")
    c = inst.num_candidates
    ops = _channel_ops(inst)
    objective = _ObjectiveP3(ops, lam)

    def as_solution(p, val, it, res, cur):
        tau = sum(op.mult * op.logdet(p) for op in ops)
        return RelaxedSolution(p, tau, it, res, cur)

    if start is None:
        start = np.full(c, 0.5)
    pi, _, iterations, residual, curve = _projected_ascent(
        objective,
        lambda v: np.clip(v, 0.0, 1.0),
        start,
        float(tolerance),
        int(max_iters),
        as_solution,
    )
    tau = sum(op.mult * op.logdet(pi) for op in ops)
    return RelaxedSolution(pi, tau, iterations, residual, curve)


def round_deterministic(
    inst: EdgeSelectionInstance, pi, k: int | None = None
) -> SelectionResult:
    """Keep the k largest selectors (ties to the lowest index).

    Returns the rounded design with its exact tau; a fractional
    relaxation optimum rounded this way is the certificate's feasible
    convex leg. A binary relaxation optimum survives rounding intact.
    """
    start = time.perf_counter()
    pi = _validate_pi(pi, inst.num_candidates)
    if k is None:
        k = inst.k
    k = int(k)
    if not 0 <= k <= inst.num_candidates:
        raise ArgumentError(f"k={k} outside 0..{inst.num_candidates}")
    order = np.argsort(-pi, kind="stable")  # stable: equal values keep index order
    chosen = sorted(int(i) for i in order[:k])
    fn = gain_function(inst)
    tau = fn.absolute(chosen)
    return SelectionResult(
        selected=tuple(chosen),
        edges=tuple(inst.candidates[i] for i in chosen),
        baseline=fn.baseline_total,
        tau_achieved=tau,
        trace=(),
        elapsed=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class RandomizedRounding:
    """Independent Bernoulli(pi_i) rounding trials.

    num_selected[t] is the size of trial t's selection; tree_counts[t, j]
    is the raw weighted spanning-tree count of the trial's design under
    channel j (base edges always included, so counts stay positive even
    when a trial keeps nothing). In expectation the selection size is
    sum(pi) and each channel's tree count is det L(pi).
    """

    pi: np.ndarray
    seed: int
    channels: tuple[str | None, ...]
    num_selected: np.ndarray
    tree_counts: np.ndarray

    @property
    def trials(self) -> int:
        return int(self.num_selected.size)

    @property
    def mean_num_selected(self) -> float:
        return float(self.num_selected.mean())

    @property
    def mean_tree_counts(self) -> np.ndarray:
        return self.tree_counts.mean(axis=0)


def round_randomized(
    inst: EdgeSelectionInstance,
    pi,
    seed: int = 0,
    trials: int = 1000,
    *,
    batch_size: int = 4096,
) -> RandomizedRounding:
    """Sample Bernoulli roundings of pi and tabulate per-trial statistics."""
    pi = _validate_pi(pi, inst.num_candidates)
    trials = int(trials)
    if trials < 1:
        raise ArgumentError("trials must be >= 1")
    ops = _channel_ops(inst)
    c = inst.num_candidates
    order = ops[0].base.order

    num_selected = np.zeros(trials, dtype=int)
    tree_counts = np.zeros((trials, len(ops)))
    rng = np.random.default_rng(seed)

    # Stacked elementary matrices make whole batches one det call; fall
    # back to per-trial factorization when that stack would be huge.
    vectorized = c * order * order <= 5 * 10**7
    elems = None
    if vectorized:
        elems = []
        for op in ops:
            E = np.zeros((c, order, order))
            for i in range(c):
                iu, iv = op._ru[i], op._rv[i]
                if iu >= 0:
                    E[i, iu, iu] += 1.0
                if iv >= 0:
                    E[i, iv, iv] += 1.0
                if iu >= 0 and iv >= 0:
                    E[i, iu, iv] -= 1.0
                    E[i, iv, iu] -= 1.0
            elems.append(E)

    done = 0
    while done < trials:
        b = min(batch_size, trials - done)
        bits = rng.random((b, c)) < pi
        num_selected[done : done + b] = bits.sum(axis=1)
        for j, op in enumerate(ops):
            if vectorized:
                scaled = bits * op.w
                stack = op.base.matrix[None, :, :] + np.einsum(
                    "tc,cij->tij", scaled, elems[j]
                )
                tree_counts[done : done + b, j] = np.linalg.det(stack)
            else:
                for t in range(b):
                    M = op.matrix(bits[t].astype(float))
                    sign, logdet = np.linalg.slogdet(M)
                    tree_counts[done + t, j] = sign * math.exp(logdet)
        done += b

    num_selected.setflags(write=False)
    tree_counts.setflags(write=False)
    return RandomizedRounding(
        pi=pi,
        seed=int(seed),
        channels=tuple(ch for ch, _ in inst.channels),
        num_selected=num_selected,
        tree_counts=tree_counts,
    )
