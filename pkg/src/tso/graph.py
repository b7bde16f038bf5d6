"""Instance model and shortest-path machinery for survival-constrained routing.

A SurvivalGraph is a directed simple graph whose edges carry survival
probabilities in (0, 1]. Planning happens on the log-transformed view, where
edge costs are -ln(survival) and the per-robot chance constraint becomes a
path budget of -ln(p_s).
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

INF = float("inf")

# Budget comparisons are non-strict with this absolute slack in log domain,
# so a path with survival exactly p_s is feasible.
BUDGET_TOL = 1e-9


class InfeasibleInstanceError(Exception):
    """No start-terminal path satisfies the survival constraint."""


class SizeGuardError(Exception):
    """Instance exceeds the size limit of an exhaustive routine."""


@dataclass
class MultiVisitTable:
    """Per-node marginal rewards for repeated visits: d[j][m-1] pays the m-th visit."""

    M: int
    d: dict[int, list[float]]


@dataclass
class SurvivalGraph:
    node_ids: list[int]
    priorities: dict[int, float]
    edges: list[tuple[int, int, float]]
    start: int
    terminal: int
    p_s: float
    team_size: int = 1
    multi_visit: MultiVisitTable | None = None
    edge_rewards: dict[tuple[int, int], float] | None = None

    def __post_init__(self):
        self.index = {v: i for i, v in enumerate(self.node_ids)}
        self.survival = {(u, v): w for u, v, w in self.edges}
        adj: dict[int, list[tuple[int, float]]] = {v: [] for v in self.node_ids}
        radj: dict[int, list[tuple[int, float]]] = {v: [] for v in self.node_ids}
        for u, v, w in self.edges:
            if u in adj and v in adj:
                adj[u].append((v, w))
                radj[v].append((u, w))
        # Neighbor order fixed by node index so every traversal is deterministic.
        for v in self.node_ids:
            adj[v].sort(key=lambda t: self.index[t[0]])
            radj[v].sort(key=lambda t: self.index[t[0]])
        self.adjacency = adj
        self.reverse_adjacency = radj

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    def priority(self, v) -> float:
        return self.priorities.get(v, 1.0)


def validate_instance(g: SurvivalGraph) -> list[str]:
    """Check type invariants; returns a list of violations (empty means valid)."""
    problems = []
    if not g.node_ids:
        problems.append("instance has no nodes")
    seen = set()
    for v in g.node_ids:
        if v in seen:
            problems.append(f"duplicate node id {v}")
        seen.add(v)
    for v, d in g.priorities.items():
        if v not in seen:
            problems.append(f"priority for unknown node {v}")
        elif not d > 0:
            problems.append(f"node {v} priority {d} not positive")
    pairs = set()
    for u, v, w in g.edges:
        if u not in seen or v not in seen:
            problems.append(f"edge ({u},{v}) references unknown node")
            continue
        if u == v:
            problems.append(f"self-loop on node {u}")
        if (u, v) in pairs:
            problems.append(f"not simple: duplicate edge ({u},{v})")
        pairs.add((u, v))
        if not (0.0 < w <= 1.0):
            problems.append(f"edge ({u},{v}) survival {w} out of (0,1]")
    if g.start not in seen:
        problems.append(f"start node {g.start} not in instance")
    if g.terminal not in seen:
        problems.append(f"terminal node {g.terminal} not in instance")
    if not (0.0 < g.p_s <= 1.0):
        problems.append(f"p_s {g.p_s} out of (0,1]")
    if g.team_size < 1:
        problems.append(f"team size {g.team_size} < 1")
    if g.multi_visit is not None:
        mv = g.multi_visit
        if mv.M < 1:
            problems.append(f"multi-visit M {mv.M} < 1")
        for v, row in mv.d.items():
            if v not in seen:
                problems.append(f"multi-visit row for unknown node {v}")
            if len(row) != mv.M:
                problems.append(f"multi-visit row for node {v} has {len(row)} entries, expected {mv.M}")
            for a, b in zip(row, row[1:]):
                if b > a + 1e-15:
                    problems.append(f"multi-visit rewards for node {v} increase with visit count")
                    break
    if g.edge_rewards:
        for (u, v), d in g.edge_rewards.items():
            if (u, v) not in g.survival:
                problems.append(f"edge reward on missing edge ({u},{v})")
            elif d < 0:
                problems.append(f"edge reward on ({u},{v}) negative")
    return problems


def check_path(g: SurvivalGraph, path) -> None:
    """Raise ValueError unless path is a valid node sequence in g.

    Nodes must be unique, except that the final node may equal the first
    (depot-return tours). Every adjacent pair must be an edge.
    """
    if len(path) == 0:
        raise ValueError("empty node sequence")
    for v in path:
        if v not in g.index:
            raise ValueError(f"path visits unknown node {v}")
    interior = path[:-1] if len(path) > 1 and path[-1] == path[0] else path
    if len(set(interior)) != len(interior):
        raise ValueError(f"path revisits a node: {list(path)}")
    for u, v in zip(path, path[1:]):
        if (u, v) not in g.survival:
            raise ValueError(f"path uses missing edge ({u},{v})")


# ---------------------------------------------------------------------------
# Log-domain view

@dataclass
class LogGraph:
    graph: SurvivalGraph
    costs: dict[tuple[int, int], float]
    budget: float
    _from_cache: dict = field(default_factory=dict, repr=False)
    _to_cache: dict = field(default_factory=dict, repr=False)

    def cost(self, u, v) -> float:
        return self.costs[(u, v)]

    def distances_from(self, source) -> dict[int, float]:
        """Memoized single-source distances (no deletions)."""
        if source not in self._from_cache:
            self._from_cache[source] = dijkstra(self, source)[0]
        return self._from_cache[source]

    def distances_to(self, target) -> dict[int, float]:
        """Memoized distances from every node to target."""
        if target not in self._to_cache:
            self._to_cache[target] = dijkstra(self, target, reverse=True)[0]
        return self._to_cache[target]


def log_transform(g: SurvivalGraph) -> LogGraph:
    """Edge costs -ln(survival), budget -ln(p_s)."""
    costs = {(u, v): -math.log(w) for u, v, w in g.edges}
    return LogGraph(graph=g, costs=costs, budget=-math.log(g.p_s))


def dijkstra(lg: LogGraph, source, banned=frozenset(), reverse=False):
    """Single-source shortest paths on the log graph.

    banned is a set of (u, v) edge pairs (original orientation) to skip;
    reverse runs the search over incoming edges, yielding distances TO source.
    Ties are broken deterministically: equal-distance relaxations keep the
    lower-index parent, and the heap pops lower-index nodes first.
    """
    g = lg.graph
    idx = g.index
    dist = {v: INF for v in g.node_ids}
    parent: dict[int, int | None] = {v: None for v in g.node_ids}
    dist[source] = 0.0
    heap = [(0.0, idx[source], source)]
    done = set()
    while heap:
        d, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        nbrs = g.reverse_adjacency[u] if reverse else g.adjacency[u]
        for v, _w in nbrs:
            pair = (v, u) if reverse else (u, v)
            if pair in banned:
                continue
            nd = d + lg.costs[pair]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, idx[v], v))
            elif nd == dist[v] and v not in done and parent[v] is not None and idx[u] < idx[parent[v]]:
                parent[v] = u
    return dist, parent


def shortest_path(lg: LogGraph, source, target, banned=frozenset()):
    """Node sequence of a shortest source-target path, or None if unreachable."""
    dist, parent = dijkstra(lg, source, banned=banned)
    if dist[target] == INF:
        return None
    if source == target:
        return [source]
    path = [target]
    while path[-1] != source:
        prev = parent[path[-1]]
        if prev is None:
            return None
        path.append(prev)
    path.reverse()
    return path


def max_visit_probabilities(lg: LogGraph) -> dict[int, float]:
    """Per node, the largest probability any single feasible robot reaches it.

    zeta_j = exp(-shortest log-cost from the start); 1 at the start itself,
    0 for unreachable nodes. The return leg is deliberately ignored, so this
    is an upper bound on any path's probability of visiting j.
    """
    dist = lg.distances_from(lg.graph.start)
    zeta = {}
    for v in lg.graph.node_ids:
        zeta[v] = math.exp(-dist[v]) if dist[v] < INF else 0.0
    return zeta


# ---------------------------------------------------------------------------
# Feasibility

@dataclass
class FeasibilityReport:
    reachable: dict[int, bool]
    x_nonempty: bool
    leg_cost: dict[int, float]


def feasibility_check(g: SurvivalGraph) -> FeasibilityReport:
    """Per-node reachability via the two-leg deletion procedure.

    For each node j: shortest start->j on the log graph, delete that path's
    edges, then shortest j->terminal in what remains; j is flagged reachable
    when the combined cost fits the budget. A visit only counts from step 1
    on, so the start is never reachable on open instances, and on depot
    instances it needs a real tour (shortest return with at least one edge).
    The nonemptiness flag uses the same tour test for depots and the plain
    start->terminal distance otherwise; that flag is exact.

    The deletion step can be wrong in both directions on adversarial graphs
    (the legs may share interior nodes, and deleting the first leg can sever
    the only return); brute_force_feasibility is the exact reference.
    """
    lg = log_transform(g)
    depot = g.start == g.terminal
    dist_s, parent_s = dijkstra(lg, g.start)
    reachable = {}
    leg_cost = {}
    for j in g.node_ids:
        if j == g.start:
            best = INF
            if depot:
                for v, _w in g.reverse_adjacency[g.start]:
                    if v != g.start and dist_s[v] < INF:
                        best = min(best, dist_s[v] + lg.costs[(v, g.start)])
            leg_cost[j] = best
            reachable[j] = best <= lg.budget + BUDGET_TOL
            continue
        if dist_s[j] == INF:
            reachable[j] = False
            leg_cost[j] = INF
            continue
        leg = [j]
        while leg[-1] != g.start:
            leg.append(parent_s[leg[-1]])
        banned = frozenset(zip(leg[1:], leg[:-1]))  # leg is terminal-first
        back = dijkstra(lg, j, banned=banned)[0][g.terminal]
        total = dist_s[j] + back
        leg_cost[j] = total
        reachable[j] = total <= lg.budget + BUDGET_TOL
    if depot:
        x_nonempty = reachable[g.start]
    else:
        x_nonempty = dist_s[g.terminal] <= lg.budget + BUDGET_TOL
    return FeasibilityReport(reachable=reachable, x_nonempty=x_nonempty, leg_cost=leg_cost)


def brute_force_feasibility(g: SurvivalGraph, node, max_nodes: int = 12) -> bool:
    """Exact reachability: does some feasible path visit node after step 0?

    Exhaustive DFS over simple paths (the final node may equal the start on
    depot instances). Guarded to small instances; raises SizeGuardError above
    max_nodes.
    """
    if g.num_nodes > max_nodes:
        raise SizeGuardError(f"brute-force feasibility limited to {max_nodes} nodes, instance has {g.num_nodes}")
    lg = log_transform(g)
    dist_to_t = lg.distances_to(g.terminal)
    threshold = g.p_s - 1e-12

    def best_completion(v):
        d = dist_to_t[v]
        return math.exp(-d) if d < INF else 0.0

    def dfs(v, survival, visited, hit):
        # No completion from here can recover enough survival mass.
        if survival * best_completion(v) < threshold:
            return False
        for u, w in g.adjacency[v]:
            s = survival * w
            if u == g.terminal and (u not in visited or u == g.start):
                if (hit or u == node) and s >= threshold:
                    return True
            if u in visited or u == g.terminal:
                continue
            if dfs(u, s, visited | {u}, hit or u == node):
                return True
        return False

    return dfs(g.start, 1.0, {g.start}, False)


# ---------------------------------------------------------------------------
# Instance files

def instance_to_dict(g: SurvivalGraph) -> dict:
    doc = {
        "version": 1,
        "directed": True,
        "nodes": [{"id": v, "priority": g.priority(v)} for v in g.node_ids],
        "edges": [{"from": u, "to": v, "survival": w} for u, v, w in g.edges],
        "start": g.start,
        "terminal": g.terminal,
        "p_s": g.p_s,
        "team_size": g.team_size,
    }
    if g.multi_visit is not None:
        doc["multi_visit"] = {"M": g.multi_visit.M, "d": [list(g.multi_visit.d[v]) for v in g.node_ids]}
    if g.edge_rewards:
        doc["edge_rewards"] = [{"from": u, "to": v, "d": d} for (u, v), d in sorted(g.edge_rewards.items(), key=lambda t: (g.index[t[0][0]], g.index[t[0][1]]))]
    return doc


def instance_from_dict(doc: dict) -> SurvivalGraph:
    if doc.get("version") != 1:
        raise ValueError(f"unsupported instance version {doc.get('version')!r}")
    directed = bool(doc.get("directed", True))
    node_ids = []
    priorities = {}
    for rec in doc["nodes"]:
        v = int(rec["id"])
        node_ids.append(v)
        priorities[v] = float(rec.get("priority", 1.0))
    edges = []
    for rec in doc["edges"]:
        u, v, w = int(rec["from"]), int(rec["to"]), float(rec["survival"])
        edges.append((u, v, w))
        if not directed:
            edges.append((v, u, w))
    multi = None
    if "multi_visit" in doc:
        mv = doc["multi_visit"]
        rows = {v: [float(x) for x in row] for v, row in zip(node_ids, mv["d"])}
        multi = MultiVisitTable(M=int(mv["M"]), d=rows)
    rewards = None
    if "edge_rewards" in doc:
        rewards = {(int(r["from"]), int(r["to"])): float(r["d"]) for r in doc["edge_rewards"]}
    return SurvivalGraph(
        node_ids=node_ids,
        priorities=priorities,
        edges=edges,
        start=int(doc["start"]),
        terminal=int(doc["terminal"]),
        p_s=float(doc["p_s"]),
        team_size=int(doc.get("team_size", 1)),
        multi_visit=multi,
        edge_rewards=rewards,
    )


def load_instance(path) -> SurvivalGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def save_instance(g: SurvivalGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(g), fh, indent=2)
        fh.write("\n")
