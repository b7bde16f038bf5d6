"""Sequential greedy team planning on the linearized objective.

Each robot in turn gets the path maximizing an optimistic reward: node j is
worth zeta_j times the expected value still uncollected at j, where zeta_j
is the best single-robot visit probability. After a path is chosen, the
weight of every node it visits shrinks by that path's probability of the
visit, and the next robot plans against the updated weights. With an exact
oracle the plan is within a 1 - exp(-p_s) factor of the best K-path team,
and oversized runs tighten that bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graph import (
    BUDGET_TOL,
    InfeasibleInstanceError,
    SurvivalGraph,
    feasibility_check,
    log_transform,
    max_visit_probabilities,
)
from .objective import (
    TeamPlan,
    discrete_derivative,
    edge_team_objective,
    edge_visit_profile,
    multi_visit_objective,
    team_plan,
    visit_count_distribution,
    visit_profile,
)
from .orienteering import OrienteeringProblem, solve_arc_exact, solve_exact, solve_heuristic

VARIANTS = ("node", "edge", "multi_visit")


@dataclass
class GreedyConfig:
    team_size: int
    oversize: int | None = None
    oracle: str = "exact"
    variant: str = "node"
    seed: int = 0
    restarts: int = 64

    def __post_init__(self):
        if self.team_size < 1:
            raise ValueError("team size must be >= 1")
        if self.oversize is not None and self.oversize < self.team_size:
            raise ValueError("oversize must be >= team size")
        if self.oracle not in ("exact", "heuristic"):
            raise ValueError(f"unknown oracle {self.oracle!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def total_paths(self) -> int:
        return self.oversize if self.oversize is not None else self.team_size


@dataclass
class GreedyResult:
    config: GreedyConfig
    paths: list[tuple[int, ...]]
    gains: list[float]
    plan: TeamPlan
    oversize_plan: TeamPlan | None
    variant_value: float | None = None

    @property
    def team_paths(self):
        return self.paths[: self.config.team_size]

    @property
    def team_gains(self):
        return self.gains[: self.config.team_size]


@dataclass
class BoundCertificate:
    u1: float
    u2: float
    u3: float
    factor: float
    oversize_factor: float
    certified: bool

    @property
    def upper(self) -> float:
        return min(self.u1, self.u2, self.u3)


def _oracle_call(cfg: GreedyConfig, problem: OrienteeringProblem, iteration: int):
    if cfg.variant == "edge":
        if cfg.oracle != "exact":
            raise ValueError("edge-reward planning requires the exact oracle")
        return solve_arc_exact(problem)
    if cfg.oracle == "exact":
        return solve_exact(problem)
    # Separate stream per iteration keeps later robots independent of how
    # many restarts earlier ones consumed.
    return solve_heuristic(problem, seed=(cfg.seed, iteration), restarts=cfg.restarts)


def _edge_reward_table(g: SurvivalGraph):
    if g.edge_rewards:
        return dict(g.edge_rewards)
    return {(u, v): 1.0 for u, v, _w in g.edges}


def greedy_survivors(g: SurvivalGraph, cfg: GreedyConfig) -> GreedyResult:
    """Plan total_paths paths one robot at a time.

    The first team_size paths are the team plan; extra paths only sharpen
    the oversized-team bound. Marginal gains are true objective increments
    of each path against its predecessors (for the active variant).
    """
    if cfg.variant == "multi_visit" and g.multi_visit is None:
        raise ValueError("instance carries no multi-visit reward table")
    lg = log_transform(g)
    zeta = max_visit_probabilities(lg)
    if not feasibility_check(g).x_nonempty:
        raise InfeasibleInstanceError(
            "feasibility check found no start-terminal path within the survival budget"
        )

    chosen: list[tuple[int, ...]] = []
    profiles = []
    gains: list[float] = []

    if cfg.variant == "node":
        nu = {j: zeta[j] * g.priority(j) for j in g.node_ids}
        for k in range(cfg.total_paths):
            res = _oracle_call(cfg, OrienteeringProblem(lg, rewards=dict(nu)), k)
            gains.append(discrete_derivative(g, res.path, chosen))
            chosen.append(tuple(res.path))
            prof = visit_profile(g, res.path)
            profiles.append(prof)
            for n in range(1, len(res.path)):
                nu[res.path[n]] *= 1.0 - prof.survival_prefix[n]
        variant_value = None

    elif cfg.variant == "edge":
        table = _edge_reward_table(g)
        w = {(u, v): zeta[u] * g.survival[(u, v)] * d for (u, v), d in table.items()}
        value = 0.0
        for k in range(cfg.total_paths):
            res = _oracle_call(cfg, OrienteeringProblem(lg, edge_rewards=dict(w)), k)
            new_value = edge_team_objective(g, chosen + [res.path], table)
            gains.append(new_value - value)
            value = new_value
            chosen.append(tuple(res.path))
            traversal = edge_visit_profile(g, res.path)
            for e, a in traversal.items():
                if e in w:
                    w[e] *= 1.0 - a
        variant_value = value

    else:  # multi_visit
        mv = g.multi_visit
        value = 0.0
        for k in range(cfg.total_paths):
            counts = visit_count_distribution(g, profiles)
            nu = {}
            for j in g.node_ids:
                row = mv.d.get(j)
                if not row:
                    nu[j] = 0.0
                    continue
                dp = counts[j]
                c = sum(row[m - 1] * dp[m - 1] for m in range(1, mv.M + 1) if m - 1 < len(dp))
                nu[j] = zeta[j] * c
            res = _oracle_call(cfg, OrienteeringProblem(lg, rewards=nu), k)
            new_value = multi_visit_objective(g, chosen + [res.path], mv.d, mv.M)
            gains.append(new_value - value)
            value = new_value
            chosen.append(tuple(res.path))
            profiles.append(visit_profile(g, res.path))
        variant_value = value

    plan = team_plan(g, chosen[: cfg.team_size])
    oversize_plan = team_plan(g, chosen) if cfg.total_paths > cfg.team_size else None
    return GreedyResult(
        config=cfg,
        paths=chosen,
        gains=gains,
        plan=plan,
        oversize_plan=oversize_plan,
        variant_value=variant_value,
    )


def greedy_survivors_variant(g: SurvivalGraph, cfg: GreedyConfig) -> GreedyResult:
    """Alias making the variant entry point explicit."""
    return greedy_survivors(g, cfg)


def _variant_objective(g: SurvivalGraph, cfg: GreedyConfig, paths) -> float:
    if cfg.variant == "edge":
        return edge_team_objective(g, paths, _edge_reward_table(g))
    if cfg.variant == "multi_visit":
        return multi_visit_objective(g, paths, g.multi_visit.d, g.multi_visit.M)
    return team_plan(g, paths).objective


def compute_bounds(g: SurvivalGraph, cfg: GreedyConfig, result: GreedyResult) -> BoundCertificate:
    """Upper bounds on the best achievable K-team value.

    u1 caps each node's contribution by the chance that any of K
    independent robots reaches it: no robot exceeds zeta_j, so the team
    visit probability is at most 1 - (1 - zeta_j)^K. A node counts only if
    some budget-feasible walk passes through it (shortest way in plus
    shortest way out fits the budget; every path visiting the node induces
    such a walk), and the start is excluded unless the instance is a depot
    tour (it is only visitable by returning). u2 divides the greedy value
    by the team factor 1 - exp(-p_s); u3 does the same with the oversized
    run and its larger factor. Certificates from heuristic oracles are not
    certified: the factor arguments assume an exact subproblem solver.
    """
    K = cfg.team_size
    L = cfg.total_paths
    factor = 1.0 - math.exp(-g.p_s)
    oversize_factor = 1.0 - math.exp(-g.p_s * L / K)

    lg = log_transform(g)
    zeta = max_visit_probabilities(lg)
    dist_in = lg.distances_from(g.start)
    dist_out = lg.distances_to(g.terminal)
    depot = g.start == g.terminal

    def team_cap(p: float) -> float:
        return 1.0 - (1.0 - p) ** K

    def on_feasible_walk(j) -> bool:
        return dist_in[j] + dist_out[j] <= lg.budget + BUDGET_TOL

    if cfg.variant == "edge":
        # A robot traverses (u, v) with probability at most zeta_u * omega,
        # and never does if no through-walk over the arc fits the budget.
        table = _edge_reward_table(g)
        u1 = sum(
            team_cap(zeta[u] * g.survival[(u, v)]) * d
            for (u, v), d in table.items()
            if dist_in[u] + lg.cost(u, v) + dist_out[v] <= lg.budget + BUDGET_TOL
        )
    elif cfg.variant == "multi_visit":
        # P(at least m robots visit) vanishes for m > K and is otherwise
        # at most the team visit probability.
        mv = g.multi_visit
        u1 = 0.0
        for j in g.node_ids:
            if not on_feasible_walk(j) or (j == g.start and not depot):
                continue
            row = mv.d.get(j, [])
            u1 += team_cap(zeta[j]) * sum(row[: min(mv.M, K)])
    else:
        u1 = sum(
            g.priority(j) * team_cap(zeta[j])
            for j in g.node_ids
            if on_feasible_walk(j) and (j != g.start or depot)
        )

    value_k = _variant_objective(g, cfg, result.paths[:K])
    value_l = _variant_objective(g, cfg, result.paths)
    u2 = value_k / factor
    u3 = value_l / oversize_factor
    return BoundCertificate(
        u1=u1,
        u2=u2,
        u3=u3,
        factor=factor,
        oversize_factor=oversize_factor,
        certified=cfg.oracle == "exact",
    )


def bounds_to_dict(cert: BoundCertificate) -> dict:
    return {
        "U1": cert.u1,
        "U2": cert.u2,
        "U3": cert.u3,
        "factor": cert.factor,
        "certified": cert.certified,
    }
