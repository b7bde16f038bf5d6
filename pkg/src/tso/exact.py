"""Exhaustive ground truth for small instances.

Enumerates every feasible path, then searches all K-multisets of them for
the best team objective. Guards are hard errors: a ground-truth oracle must
never silently approximate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import (
    BUDGET_TOL,
    INF,
    InfeasibleInstanceError,
    SizeGuardError,
    SurvivalGraph,
    log_transform,
)
from .objective import TeamPlan, VisitProfile, team_plan, visit_profile


@dataclass
class PathCatalog:
    paths: list[tuple[int, ...]]
    profiles: list[VisitProfile]

    def __len__(self):
        return len(self.paths)


def enumerate_feasible_paths(g: SurvivalGraph, max_nodes: int = 12) -> PathCatalog:
    """All start-terminal paths (at least one edge) meeting the survival bound.

    Depth-first with budget pruning; children in node-index order, so the
    catalog comes out lexicographically sorted. Raises SizeGuardError above
    max_nodes (callers may raise the limit deliberately; budget pruning is
    what actually keeps the search small).
    """
    if g.num_nodes > max_nodes:
        raise SizeGuardError(f"path enumeration limited to {max_nodes} nodes, instance has {g.num_nodes}")
    lg = log_transform(g)
    dist_to_t = lg.distances_to(g.terminal)
    budget = lg.budget
    found: list[tuple[int, ...]] = []

    def dfs(v, cost, visited, path):
        for u, _w in g.adjacency[v]:
            c = cost + lg.costs[(v, u)]
            if c > budget + BUDGET_TOL:
                continue
            if u == g.terminal:
                found.append(tuple(path) + (u,))
            if u in visited or u == g.terminal:
                continue
            if c + dist_to_t[u] > budget + BUDGET_TOL:
                continue
            path.append(u)
            dfs(u, c, visited | {u}, path)
            path.pop()

    dfs(g.start, 0.0, {g.start}, [g.start])
    return PathCatalog(paths=found, profiles=[visit_profile(g, p) for p in found])


def solve_exact_tso(
    g: SurvivalGraph,
    team_size: int,
    max_nodes: int = 12,
    enumeration_limit: int = 10**7,
) -> TeamPlan:
    """Best K-multiset of feasible paths by exhaustive search.

    The objective only depends on the multiset, so enumeration runs over
    non-decreasing index tuples; the innermost level is vectorized. Ties go
    to the lexicographically smallest multiset. Guarded by catalog^K against
    the enumeration limit.
    """
    if team_size < 1:
        raise ValueError("team size must be >= 1")
    catalog = enumerate_feasible_paths(g, max_nodes=max_nodes)
    n = len(catalog)
    if n == 0:
        raise InfeasibleInstanceError("no start-terminal path within the survival budget")
    if float(n) ** team_size > enumeration_limit:
        raise SizeGuardError(
            f"{n}^{team_size} candidate teams exceed the enumeration limit {enumeration_limit}"
        )

    d = np.array([g.priority(v) for v in g.node_ids])
    miss = np.ones((n, g.num_nodes))
    for i, prof in enumerate(catalog.profiles):
        for v, z in prof.visit_prob.items():
            miss[i, g.index[v]] = 1.0 - z
    weight_total = d.sum()

    best = {"value": -INF, "team": None}

    def consider(value, team):
        if value > best["value"]:
            best["value"] = value
            best["team"] = team

    def recurse(first, prod, chosen):
        if len(chosen) == team_size - 1:
            vals = weight_total - (miss[first:] * prod) @ d
            i = int(np.argmax(vals))
            consider(float(vals[i]), chosen + (first + i,))
            return
        for i in range(first, n):
            recurse(i, prod * miss[i], chosen + (i,))

    recurse(0, np.ones(g.num_nodes), ())
    team = [catalog.paths[i] for i in best["team"]]
    return team_plan(g, team)
