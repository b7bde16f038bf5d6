from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import tso

import oracles


def _line3():
    """1 -> 2 -> 3 with 0.9 edges; one feasible path visiting 3 at 0.81."""
    return tso.SurvivalGraph(
        node_ids=[1, 2, 3],
        priorities={1: 1.0, 2: 1.0, 3: 1.0},
        edges=[(1, 2, 0.9), (2, 3, 0.9)],
        start=1,
        terminal=3,
        p_s=0.5,
    )


def test_visit_profile_counts_depot_return():
    g = tso.SurvivalGraph(
        node_ids=[1, 2],
        priorities={1: 1.0, 2: 1.0},
        edges=[(1, 2, 0.9), (2, 1, 0.9)],
        start=1,
        terminal=1,
        p_s=0.5,
    )
    prof = tso.visit_profile(g, (1, 2, 1))
    assert prof.visit_prob[2] == pytest.approx(0.9, abs=1e-15)
    assert prof.visit_prob[1] == pytest.approx(0.81, abs=1e-15)
    assert prof.survival == pytest.approx(0.81, abs=1e-15)


def test_two_robots_on_same_096_node(loop5):
    prof = tso.visit_profile(loop5, (1, 3, 5, 2, 1))
    assert prof.visit_prob[5] == pytest.approx(0.96, abs=1e-15)
    x = tso.team_visit_probability(loop5, [prof, prof])
    assert x[5] == pytest.approx(0.9984, abs=1e-12)


def test_diamond_doubled_path_value(diamond):
    j, x = tso.team_objective(diamond, [(1, 2, 4), (1, 2, 4)])
    assert x[2] == pytest.approx(0.99, abs=1e-12)
    assert x[4] == pytest.approx(0.9639, abs=1e-12)
    assert j == pytest.approx(1.9539, abs=1e-12)


def test_team_objective_matches_brute():
    for seed in range(6):
        g = tso.feasible_random_instance(5, 0.4, 1.0, 0.6, seed=(50, seed))
        catalog = oracles.feasible_paths(g)
        rng = np.random.default_rng((51, seed))
        paths = [catalog[int(rng.integers(len(catalog)))] for _ in range(3)]
        j, _ = tso.team_objective(g, paths)
        assert j == pytest.approx(oracles.team_objective_brute(g, paths), abs=1e-12)


def test_discrete_derivative_is_objective_difference():
    for seed in range(6):
        g = tso.feasible_random_instance(5, 0.4, 1.0, 0.6, seed=(52, seed))
        catalog = oracles.feasible_paths(g)
        rng = np.random.default_rng((53, seed))
        existing = [catalog[int(rng.integers(len(catalog)))] for _ in range(2)]
        cand = catalog[int(rng.integers(len(catalog)))]
        gain = tso.discrete_derivative(g, cand, existing)
        before, _ = tso.team_objective(g, existing)
        after, _ = tso.team_objective(g, existing + [cand])
        assert gain == pytest.approx(after - before, abs=1e-12)


def test_discrete_derivative_submodular():
    # Adding to a superset never gains more than adding to the subset.
    for seed in range(6):
        g = tso.feasible_random_instance(5, 0.4, 1.0, 0.6, seed=(54, seed))
        catalog = oracles.feasible_paths(g)
        rng = np.random.default_rng((55, seed))
        small = [catalog[int(rng.integers(len(catalog)))]]
        big = small + [catalog[int(rng.integers(len(catalog)))]]
        cand = catalog[int(rng.integers(len(catalog)))]
        g_small = tso.discrete_derivative(g, cand, small)
        g_big = tso.discrete_derivative(g, cand, big)
        assert g_big <= g_small + 1e-12
        assert g_big >= -1e-15


def test_visit_count_distribution_example():
    g = _line3()
    # Hand-built profiles: robots hit node 3 with probability 0.9 and 0.81.
    profiles = [
        tso.VisitProfile(path=(1, 3), survival_prefix=(1.0, 0.9), visit_prob={3: 0.9}),
        tso.VisitProfile(path=(1, 2, 3), survival_prefix=(1.0, 0.9, 0.81), visit_prob={2: 0.9, 3: 0.81}),
    ]
    dist = tso.visit_count_distribution(g, profiles)[3]
    assert dist == pytest.approx([0.019, 0.252, 0.729], abs=1e-12)
    assert dist.sum() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=0, max_size=8))
def test_visit_count_distribution_matches_brute(probs):
    g = _line3()
    profiles = [
        tso.VisitProfile(path=(1, 3), survival_prefix=(1.0, p), visit_prob={3: p})
        for p in probs
    ]
    dist = tso.visit_count_distribution(g, profiles)[3]
    brute = oracles.poisson_binomial_brute(probs)
    assert dist == pytest.approx(brute, abs=1e-12)


def test_multi_visit_example():
    g = _line3()
    paths = [(1, 2, 3), (1, 2, 3)]
    value = tso.multi_visit_objective(g, paths, {3: [1.0, 0.5]}, M=2)
    # P(>=1 visit) = 0.9639, P(2 visits) = 0.6561 at node 3.
    assert value == pytest.approx(1.29195, abs=1e-12)


def test_multi_visit_reduces_to_team_objective():
    for seed in range(4):
        g = tso.feasible_random_instance(5, 0.4, 1.0, 0.6, seed=(56, seed))
        catalog = oracles.feasible_paths(g)
        rng = np.random.default_rng((57, seed))
        paths = [catalog[int(rng.integers(len(catalog)))] for _ in range(2)]
        table = {v: [g.priority(v)] for v in g.node_ids}
        j, _ = tso.team_objective(g, paths)
        assert tso.multi_visit_objective(g, paths, table, M=1) == pytest.approx(j, abs=1e-12)


def test_multi_visit_matches_brute():
    for seed in range(4):
        g = tso.feasible_random_instance(5, 0.4, 1.0, 0.6, seed=(58, seed))
        catalog = oracles.feasible_paths(g)
        rng = np.random.default_rng((59, seed))
        paths = [catalog[int(rng.integers(len(catalog)))] for _ in range(3)]
        table = {v: [1.0, 0.5, 0.25] for v in g.node_ids}
        got = tso.multi_visit_objective(g, paths, table, M=3)
        want = oracles.multi_visit_objective_brute(g, paths, table, 3)
        assert got == pytest.approx(want, abs=1e-12)


def test_multi_visit_rejects_increasing_rows():
    g = _line3()
    with pytest.raises(ValueError):
        tso.multi_visit_objective(g, [(1, 2, 3)], {3: [0.5, 1.0]}, M=2)


def test_edge_objective_overlap(diamond):
    value = tso.edge_team_objective(diamond, [(1, 2, 4), (1, 2, 4)], {(1, 2): 1.0})
    assert value == pytest.approx(0.99, abs=1e-12)


def test_edge_objective_matches_brute():
    for seed in range(4):
        g = tso.feasible_random_instance(5, 0.4, 1.0, 0.6, seed=(60, seed))
        catalog = oracles.feasible_paths(g)
        rng = np.random.default_rng((61, seed))
        paths = [catalog[int(rng.integers(len(catalog)))] for _ in range(2)]
        rewards = {}
        for u, v, _ in g.edges:
            rewards[(u, v)] = float(rng.uniform(0.0, 1.0))
        got = tso.edge_team_objective(g, paths, rewards)
        want = oracles.edge_objective_brute(g, paths, rewards)
        assert got == pytest.approx(want, abs=1e-12)


def test_edge_objective_rejects_unknown_edge(diamond):
    with pytest.raises(ValueError):
        tso.edge_team_objective(diamond, [(1, 4)], {(4, 1): 1.0})


def test_plan_round_trip(loop5):
    plan = tso.team_plan(loop5, [(1, 3, 5, 2, 1), (1, 4, 5, 2, 1)])
    doc = tso.plan_to_dict(loop5, plan)
    assert tso.paths_from_plan_dict(doc) == [(1, 3, 5, 2, 1), (1, 4, 5, 2, 1)]
    assert doc["objective"] == pytest.approx(plan.objective, abs=0.0)
    assert len(doc["per_path_survival"]) == 2


def test_simulate_team_deterministic(loop5):
    paths = [(1, 3, 5, 2, 1), (1, 4, 5, 2, 1)]
    a = tso.simulate_team(loop5, paths, trials=20000, seed=7)
    b = tso.simulate_team(loop5, paths, trials=20000, seed=7)
    assert a.estimate == b.estimate
    assert a.survival_freq == b.survival_freq
    c = tso.simulate_team(loop5, paths, trials=20000, seed=8)
    assert c.estimate != a.estimate


def test_simulate_team_accuracy(loop5):
    paths = [(1, 3, 5, 2, 1), (1, 4, 5, 2, 1)]
    j, _ = tso.team_objective(loop5, paths)
    res = tso.simulate_team(loop5, paths, trials=100000, seed=3)
    assert abs(res.estimate - j) <= 4.0 * res.std_error
    for k, p in enumerate(paths):
        true_surv = tso.visit_profile(loop5, p).survival
        se = math.sqrt(true_surv * (1.0 - true_surv) / res.trials)
        assert abs(res.survival_freq[k] - true_surv) <= 4.0 * se


def test_simulate_team_rejects_zero_trials(loop5):
    with pytest.raises(ValueError):
        tso.simulate_team(loop5, [(1, 3, 5, 2, 1)], trials=0)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_team_objective_monotone_in_paths(seed):
    g = tso.feasible_random_instance(5, 0.4, 1.0, 0.6, seed=(62, seed))
    catalog = oracles.feasible_paths(g)
    rng = np.random.default_rng((63, seed))
    paths = [catalog[int(rng.integers(len(catalog)))] for _ in range(3)]
    values = []
    for q in range(len(paths) + 1):
        j, _ = tso.team_objective(g, paths[:q])
        values.append(j)
    assert values[0] == 0.0
    for a, b in zip(values, values[1:]):
        assert b >= a - 1e-12
