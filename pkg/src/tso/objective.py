"""Probabilistic semantics of team plans.

A robot following a path survives each edge independently with the edge's
survival probability. The prefix survival E[a_n] is the chance it is still
alive after step n, which is also the chance it visits the step-n node. The
team objective J is the priority-weighted expected number of nodes visited
by at least one robot. Visits count from step 1, so the start node only
counts when a tour returns to it.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .graph import SurvivalGraph, check_path


@dataclass
class VisitProfile:
    path: tuple[int, ...]
    survival_prefix: tuple[float, ...]
    visit_prob: dict[int, float]

    @property
    def survival(self) -> float:
        return self.survival_prefix[-1]

    def z(self, node) -> float:
        return self.visit_prob.get(node, 0.0)


@dataclass
class TeamPlan:
    paths: list[tuple[int, ...]]
    profiles: list[VisitProfile]
    objective: float
    node_visit_prob: dict[int, float]


def visit_profile(g: SurvivalGraph, path) -> VisitProfile:
    """Survival prefixes and per-node visit probabilities of one path."""
    check_path(g, path)
    prefix = [1.0]
    visit = {}
    for n in range(1, len(path)):
        prefix.append(prefix[-1] * g.survival[(path[n - 1], path[n])])
        visit[path[n]] = prefix[-1]
    return VisitProfile(path=tuple(path), survival_prefix=tuple(prefix), visit_prob=visit)


def team_visit_probability(g: SurvivalGraph, profiles) -> dict[int, float]:
    """Per node, the chance at least one robot visits it: 1 - prod(1 - z)."""
    x = {}
    for v in g.node_ids:
        miss = 1.0
        for pr in profiles:
            miss *= 1.0 - pr.z(v)
        x[v] = 1.0 - miss
    return x


def team_objective(g: SurvivalGraph, paths):
    """Expected weighted number of nodes visited by at least one robot.

    Returns (J, per-node visit probability dict).
    """
    profiles = [visit_profile(g, p) for p in paths]
    x = team_visit_probability(g, profiles)
    j = sum(g.priority(v) * x[v] for v in g.node_ids)
    return j, x


def team_plan(g: SurvivalGraph, paths) -> TeamPlan:
    profiles = [visit_profile(g, p) for p in paths]
    x = team_visit_probability(g, profiles)
    j = sum(g.priority(v) * x[v] for v in g.node_ids)
    return TeamPlan(paths=[tuple(p) for p in paths], profiles=profiles, objective=j, node_visit_prob=x)


def discrete_derivative(g: SurvivalGraph, candidate, existing) -> float:
    """Marginal gain of adding candidate to an existing set of paths.

    Equals sum_j E[z_j(candidate)] d_j prod_k (1 - E[z_j(rho_k)]), which is
    exactly the objective difference.
    """
    cand = visit_profile(g, candidate)
    existing_profiles = [visit_profile(g, p) for p in existing]
    gain = 0.0
    for v, z in cand.visit_prob.items():
        miss = 1.0
        for pr in existing_profiles:
            miss *= 1.0 - pr.z(v)
        gain += g.priority(v) * z * miss
    return gain


def visit_count_distribution(g: SurvivalGraph, profiles) -> dict[int, np.ndarray]:
    """Per node, P(exactly m robots visit) for m = 0..q.

    Successes are independent Bernoulli(E[z_j(rho_k)]); the distribution is
    Poisson-binomial, computed by the usual in-place dynamic program.
    """
    q = len(profiles)
    out = {}
    for v in g.node_ids:
        dp = np.zeros(q + 1)
        dp[0] = 1.0
        for pr in profiles:
            p = pr.z(v)
            dp[1:] = dp[1:] * (1.0 - p) + dp[:-1] * p
            dp[0] *= 1.0 - p
        out[v] = dp
    return out


def multi_visit_objective(g: SurvivalGraph, paths, table, M: int) -> float:
    """Value when the m-th visit to node j pays table[j][m-1].

    Rows must be non-increasing in m (diminishing returns); the value is
    sum_j sum_m table[j][m-1] * P(at least m visits to j).
    """
    for v, row in table.items():
        for a, b in zip(row, row[1:M]):
            if b > a + 1e-15:
                raise ValueError(f"multi-visit rewards for node {v} increase with visit count")
    profiles = [visit_profile(g, p) for p in paths]
    counts = visit_count_distribution(g, profiles)
    total = 0.0
    for v in g.node_ids:
        row = table.get(v)
        if row is None:
            continue
        dp = counts[v]
        # P(at least m) via reversed cumulative sum of the count distribution.
        at_least = np.cumsum(dp[::-1])[::-1]
        for m in range(1, min(M, len(dp) - 1) + 1):
            total += row[m - 1] * at_least[m]
    return total


def edge_visit_profile(g: SurvivalGraph, path) -> dict[tuple[int, int], float]:
    """Per traversed edge, the probability the robot survives through it."""
    check_path(g, path)
    run = 1.0
    out = {}
    for n in range(1, len(path)):
        run *= g.survival[(path[n - 1], path[n])]
        out[(path[n - 1], path[n])] = run
    return out


def edge_team_objective(g: SurvivalGraph, paths, rewards) -> float:
    """Expected reward over edges traversed by at least one robot."""
    for e in rewards:
        if e not in g.survival:
            raise ValueError(f"reward on missing edge {e}")
    traversals = [edge_visit_profile(g, p) for p in paths]
    total = 0.0
    for e, d in rewards.items():
        miss = 1.0
        for tr in traversals:
            miss *= 1.0 - tr.get(e, 0.0)
        total += d * (1.0 - miss)
    return total


# ---------------------------------------------------------------------------
# Monte-Carlo validation

@dataclass
class SimulationResult:
    estimate: float
    std_error: float
    survival_freq: list[float]
    trials: int


def simulate_team(g: SurvivalGraph, paths, trials: int, seed=0) -> SimulationResult:
    """Sample the team objective by simulating every edge traversal.

    Each trial draws one Bernoulli per edge per robot. Randomness comes from
    a single seeded generator consumed in a fixed (trial-major) layout: trial
    t always sees the same uniform block regardless of chunking, so results
    are reproducible bit for bit.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for p in paths:
        check_path(g, p)
    weights = [np.array([g.survival[(p[n - 1], p[n])] for n in range(1, len(p))]) for p in paths]
    slot = np.cumsum([0] + [len(w) for w in weights])
    width = slot[-1]
    d_vec = np.array([g.priority(v) for v in g.node_ids])
    node_pos = g.index

    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    alive_counts = np.zeros(len(paths))
    done = 0
    chunk = 1 << 16
    while done < trials:
        rows = min(chunk, trials - done)
        u = rng.random((rows, width)) if width else np.zeros((rows, 0))
        visited = np.zeros((rows, g.num_nodes), dtype=bool)
        for k, p in enumerate(paths):
            w = weights[k]
            if len(w) == 0:
                alive_counts[k] += rows
                continue
            ok = u[:, slot[k]:slot[k + 1]] < w
            reach = np.logical_and.accumulate(ok, axis=1)
            for n in range(1, len(p)):
                visited[:, node_pos[p[n]]] |= reach[:, n - 1]
            alive_counts[k] += reach[:, -1].sum()
        samples = visited @ d_vec
        total += samples.sum()
        total_sq += (samples * samples).sum()
        done += rows

    mean = total / trials
    if trials > 1:
        var = max(0.0, (total_sq - trials * mean * mean) / (trials - 1))
        se = math.sqrt(var / trials)
    else:
        se = 0.0
    freq = [c / trials for c in alive_counts]
    return SimulationResult(estimate=mean, std_error=se, survival_freq=freq, trials=trials)


# ---------------------------------------------------------------------------
# Plan files

def plan_to_dict(g: SurvivalGraph, plan: TeamPlan) -> dict:
    return {
        "paths": [list(p) for p in plan.paths],
        "objective": plan.objective,
        "per_node_visit_prob": [plan.node_visit_prob[v] for v in g.node_ids],
        "per_path_survival": [pr.survival for pr in plan.profiles],
    }


def paths_from_plan_dict(doc: dict) -> list[tuple[int, ...]]:
    return [tuple(int(v) for v in p) for p in doc["paths"]]
