import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treesynth import (
    ArgumentError,
    ConvergenceError,
    EdgeSelectionInstance,
    laplacian_of_pi,
    project_capped_simplex,
    relaxed_objective_and_gradient,
    round_deterministic,
    round_randomized,
    solve_p2,
    solve_p3,
    tree_connectivity,
)
from conftest import random_add_instance


def star_instance(k=2):
    base = ((1, 4, 1.0), (2, 4, 1.0), (3, 4, 1.0))
    cands = ((1, 2, 1.0), (2, 3, 1.0), (1, 3, 1.0))
    return EdgeSelectionInstance(4, base, cands, k)


# ---------------------------------------------------------------------------
# projection


@settings(max_examples=200)
@given(
    st.lists(st.floats(-50.0, 50.0), min_size=1, max_size=30).map(np.array),
    st.floats(0.0, 1.0),
)
def test_projection_feasibility(v, frac):
    k = frac * v.size
    x = project_capped_simplex(v, k)
    assert np.all(x >= 0.0) and np.all(x <= 1.0)
    assert abs(x.sum() - k) <= 1e-9


@settings(max_examples=100)
@given(st.lists(st.floats(-10.0, 10.0), min_size=2, max_size=20).map(np.array))
def test_projection_preserves_order(v):
    x = project_capped_simplex(v, v.size / 2.0)
    order = np.argsort(v)
    assert np.all(np.diff(x[order]) >= -1e-12)


def test_projection_degenerate_budgets_are_exact():
    v = np.array([0.3, -2.0, 5.0, 0.7])
    assert np.array_equal(project_capped_simplex(v, 0.0), np.zeros(4))
    assert np.array_equal(project_capped_simplex(v, 4.0), np.ones(4))


def test_projection_identity_on_feasible_points():
    v = np.array([0.2, 0.5, 0.3])
    x = project_capped_simplex(v, 1.0)
    assert np.allclose(x, v, atol=1e-12)


def test_projection_rejects_impossible_budget():
    with pytest.raises(ArgumentError):
        project_capped_simplex(np.array([0.5]), 2.0)


def test_projection_minimizes_distance_against_enumeration():
    # brute-force the KKT structure: compare against a fine grid optimum
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = rng.uniform(-2, 2, size=3)
        x = project_capped_simplex(v, 1.5)
        best = None
        for a in np.linspace(0, 1, 61):
            b_lo = max(0.0, 1.5 - a - 1.0)
            b_hi = min(1.0, 1.5 - a)
            if b_lo > b_hi:
                continue
            for b in np.linspace(b_lo, b_hi, 31):
                c = 1.5 - a - b
                if not -1e-12 <= c <= 1 + 1e-12:
                    continue
                cand = np.array([a, b, min(max(c, 0.0), 1.0)])
                d = float(np.sum((cand - v) ** 2))
                if best is None or d < best:
                    best = d
        assert float(np.sum((x - v) ** 2)) <= best + 1e-6


# ---------------------------------------------------------------------------
# objective and gradient


def test_gradient_is_nonnegative():
    rng = np.random.default_rng(11)
    for _ in range(10):
        inst = random_add_instance(rng, 6, 8, 6, 3)
        pi = rng.uniform(0.0, 1.0, size=6)
        _, grad = relaxed_objective_and_gradient(inst, pi)
        assert np.all(grad >= -1e-12)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(17)
    inst = random_add_instance(rng, 6, 8, 6, 3)
    pi = rng.uniform(0.2, 0.8, size=6)
    _, grad = relaxed_objective_and_gradient(inst, pi)
    eps = 1e-6
    for i in range(6):
        e = np.zeros(6)
        e[i] = eps
        hi, _ = relaxed_objective_and_gradient(inst, pi + e)
        lo, _ = relaxed_objective_and_gradient(inst, pi - e)
        fd = (hi - lo) / (2 * eps)
        assert abs(fd - grad[i]) <= 1e-5 * max(1.0, abs(grad[i]))


def test_objective_at_integer_points_matches_tree_connectivity():
    inst = star_instance()
    g = inst.base_graph()
    for bits in itertools.product([0.0, 1.0], repeat=3):
        pi = np.array(bits)
        value, _ = relaxed_objective_and_gradient(inst, pi)
        sub = [i for i, b in enumerate(bits) if b]
        tau = tree_connectivity(g.with_edges(inst.candidate_edges(sub))).tau
        assert value == pytest.approx(tau, abs=1e-10)


def test_laplacian_of_pi_channel_rules():
    inst = star_instance()
    laplacian_of_pi(inst, np.zeros(3))
    with pytest.raises(ArgumentError):
        laplacian_of_pi(inst, np.zeros(3), "p")
    base = tuple((u, v, w, w) for u, v, w in inst.base_edges)
    cands = tuple((u, v, w, w) for u, v, w in inst.candidates)
    dual = EdgeSelectionInstance(4, base, cands, 2, objective="slam-double")
    laplacian_of_pi(dual, np.zeros(3), "p")
    with pytest.raises(ArgumentError):
        laplacian_of_pi(dual, np.zeros(3))


def test_pi_validation():
    inst = star_instance()
    with pytest.raises(ArgumentError):
        relaxed_objective_and_gradient(inst, np.zeros(2))
    with pytest.raises(ArgumentError):
        relaxed_objective_and_gradient(inst, np.array([0.5, 0.5, 1.5]))
    with pytest.raises(ArgumentError):
        relaxed_objective_and_gradient(inst, np.array([0.5, np.nan, 0.5]))


# ---------------------------------------------------------------------------
# budgeted solver


def test_solver_finds_symmetric_optimum_from_asymmetric_start():
    sol = solve_p2(star_instance(), start=np.array([0.95, 0.6, 0.1]))
    assert np.allclose(sol.pi, 2.0 / 3.0, atol=1e-5)
    assert sol.kkt_residual <= 1e-7


def test_solver_objective_curve_is_monotone():
    rng = np.random.default_rng(23)
    for _ in range(8):
        inst = random_add_instance(rng, 7, 9, 8, 4)
        sol = solve_p2(inst, start=np.linspace(0.05, 0.95, 8))
        curve = sol.objective_curve
        assert all(b >= a for a, b in zip(curve, curve[1:]))


def test_solver_two_starts_agree_on_objective():
    rng = np.random.default_rng(29)
    inst = random_add_instance(rng, 7, 9, 8, 4)
    s1 = solve_p2(inst, start=np.full(8, 0.5))
    s2 = solve_p2(inst, start=np.linspace(0.01, 0.99, 8))
    assert abs(s1.tau_cvx_star - s2.tau_cvx_star) <= 1e-6


def test_solver_degenerate_budgets():
    z = solve_p2(star_instance(k=0))
    assert np.array_equal(z.pi, np.zeros(3))
    f = solve_p2(star_instance(k=3))
    assert np.array_equal(f.pi, np.ones(3))
    assert f.kkt_residual == 0.0


def test_solver_iteration_cap_raises_with_best_iterate():
    rng = np.random.default_rng(31)
    inst = random_add_instance(rng, 8, 10, 9, 4)
    with pytest.raises(ConvergenceError) as err:
        solve_p2(inst, max_iters=1, start=np.linspace(0.05, 0.95, 9))
    best = err.value.best
    assert best is not None
    assert best.pi.size == 9
    assert best.iterations == 1


def test_relaxation_upper_bounds_every_integral_point():
    rng = np.random.default_rng(37)
    for _ in range(6):
        inst = random_add_instance(rng, 6, 7, 6, 3)
        sol = solve_p2(inst)
        for sub in itertools.combinations(range(6), 3):
            pi = np.zeros(6)
            pi[list(sub)] = 1.0
            value, _ = relaxed_objective_and_gradient(inst, pi)
            assert value <= sol.tau_cvx_star + 1e-6


# ---------------------------------------------------------------------------
# penalized solver


def test_penalty_zero_saturates_all_coordinates():
    sol = solve_p3(star_instance(), 0.0)
    assert np.allclose(sol.pi, 1.0)


def test_penalty_large_kills_all_coordinates():
    sol = solve_p3(star_instance(), 50.0)
    assert np.allclose(sol.pi, 0.0, atol=1e-7)


def test_penalty_monotone_shrinks_support():
    rng = np.random.default_rng(41)
    inst = random_add_instance(rng, 7, 9, 8, 4)
    sums = [solve_p3(inst, lam).pi.sum() for lam in (0.0, 0.1, 0.3, 1.0)]
    assert all(a >= b - 1e-7 for a, b in zip(sums, sums[1:]))


def test_penalty_rejects_negative_lambda():
    with pytest.raises(ArgumentError):
        solve_p3(star_instance(), -0.5)


def test_penalized_report_carries_unpenalized_objective():
    inst = star_instance()
    sol = solve_p3(inst, 0.2)
    value, _ = relaxed_objective_and_gradient(inst, sol.pi)
    assert sol.tau_cvx_star == pytest.approx(value, abs=1e-12)


# ---------------------------------------------------------------------------
# rounding


def test_deterministic_rounding_takes_top_k():
    inst = star_instance()
    res = round_deterministic(inst, np.array([0.2, 0.9, 0.5]))
    assert res.selected == (1, 2)


def test_deterministic_rounding_breaks_ties_low_index():
    inst = star_instance()
    res = round_deterministic(inst, np.array([0.5, 0.5, 0.5]))
    assert res.selected == (0, 1)


def test_deterministic_rounding_k_override_and_tau():
    inst = star_instance()
    res = round_deterministic(inst, np.array([0.9, 0.1, 0.4]), k=1)
    assert res.selected == (0,)
    g = inst.base_graph().with_edges(inst.candidate_edges((0,)))
    assert res.tau_achieved == pytest.approx(tree_connectivity(g).tau, abs=1e-12)


def test_randomized_rounding_is_seed_reproducible():
    inst = star_instance()
    pi = np.array([0.3, 0.7, 0.5])
    a = round_randomized(inst, pi, seed=9, trials=500)
    b = round_randomized(inst, pi, seed=9, trials=500)
    assert np.array_equal(a.tree_counts, b.tree_counts)
    assert np.array_equal(a.num_selected, b.num_selected)
    c = round_randomized(inst, pi, seed=10, trials=500)
    assert not np.array_equal(a.tree_counts, c.tree_counts)


def test_randomized_rounding_expectations_match_enumeration():
    inst = EdgeSelectionInstance(
        4,
        ((1, 2, 1.0), (2, 3, 1.5), (3, 4, 1.0), (1, 4, 2.0)),
        ((1, 3, 1.25), (2, 4, 1.0), (1, 4, 1.0)),
        2,
    )
    pi = np.array([0.3, 0.7, 0.5])
    g0 = inst.base_graph()
    exact = 0.0
    for bits in itertools.product([0, 1], repeat=3):
        p = math.prod(pi[i] if b else 1 - pi[i] for i, b in enumerate(bits))
        sub = [i for i, b in enumerate(bits) if b]
        exact += p * math.exp(tree_connectivity(g0.with_edges(inst.candidate_edges(sub))).tau)

    # the fractional determinant carries the same expectation
    det = math.exp(laplacian_of_pi(inst, pi).log_det())
    assert det == pytest.approx(exact, rel=1e-12)

    rr = round_randomized(inst, pi, seed=5, trials=40000)
    se = float(np.std(rr.tree_counts[:, 0])) / math.sqrt(rr.trials)
    assert abs(rr.mean_tree_counts[0] - exact) <= 4 * se
    assert rr.mean_num_selected == pytest.approx(float(pi.sum()), abs=0.05)


def test_randomized_rounding_batched_and_loop_paths_agree():
    inst = star_instance()
    pi = np.array([0.4, 0.6, 0.2])
    fast = round_randomized(inst, pi, seed=3, trials=256)
    slow = round_randomized(inst, pi, seed=3, trials=256, batch_size=256)
    assert np.array_equal(fast.tree_counts, slow.tree_counts)
