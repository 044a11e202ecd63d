"""Network and scenario model: immutable grid data, topology queries,
and the model-assumption report.

Buses are dense integers ``0..n-1``. Lines are directed from->to only in
the sense of flow sign bookkeeping; the graph itself is undirected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import TopologyError

TREE = "tree"
WEAKLY_CYCLIC = "weakly_cyclic"
GENERAL = "general"

TREE_LINK = "tree_link"
RING_LINK = "ring_link"
MULTI_LINK = "multi_link"


@dataclass(frozen=True)
class Line:
    """One transmission line with its capacity and susceptance."""

    from_bus: int
    to_bus: int
    capacity: float
    susceptance: float = 1.0


@dataclass(frozen=True, eq=False)
class Grid:
    """Immutable power network: ``bus_count`` buses and a list of lines.

    Construction validates connectivity, positivity of line parameters,
    and rejects self-loops and parallel lines.
    """

    bus_count: int
    lines: tuple[Line, ...]

    def __init__(self, bus_count: int, lines: Sequence[Line | tuple]):
        if bus_count < 1:
            raise ValueError("bus_count must be a positive integer")
        norm = []
        seen_pairs = set()
        for ln in lines:
            if not isinstance(ln, Line):
                ln = Line(*ln)
            if not (0 <= ln.from_bus < bus_count and 0 <= ln.to_bus < bus_count):
                raise ValueError(f"line ({ln.from_bus},{ln.to_bus}) references a bus out of range")
            if ln.from_bus == ln.to_bus:
                raise ValueError(f"self-loop at bus {ln.from_bus}")
            pair = (min(ln.from_bus, ln.to_bus), max(ln.from_bus, ln.to_bus))
            if pair in seen_pairs:
                raise ValueError(f"parallel lines between buses {pair[0]} and {pair[1]}")
            seen_pairs.add(pair)
            if not ln.capacity > 0:
                raise ValueError(f"line ({ln.from_bus},{ln.to_bus}) has non-positive capacity")
            if not ln.susceptance > 0:
                raise ValueError(f"line ({ln.from_bus},{ln.to_bus}) has non-positive susceptance")
            norm.append(ln)
        object.__setattr__(self, "bus_count", int(bus_count))
        object.__setattr__(self, "lines", tuple(norm))
        if not _connected(self.bus_count, [(l.from_bus, l.to_bus) for l in self.lines]):
            raise TopologyError("grid is not connected")

    @property
    def line_count(self) -> int:
        return len(self.lines)

    def neighbors(self, bus: int) -> list[int]:
        """Buses adjacent to ``bus``, in line-list order."""
        self._check_bus(bus)
        out = []
        for ln in self.lines:
            if ln.from_bus == bus:
                out.append(ln.to_bus)
            elif ln.to_bus == bus:
                out.append(ln.from_bus)
        return out

    def incident_lines(self, bus: int) -> list[int]:
        """Indices of lines touching ``bus``."""
        self._check_bus(bus)
        return [e for e, ln in enumerate(self.lines) if bus in (ln.from_bus, ln.to_bus)]

    def capacities(self) -> np.ndarray:
        return np.array([ln.capacity for ln in self.lines], dtype=float)

    def susceptances(self) -> np.ndarray:
        return np.array([ln.susceptance for ln in self.lines], dtype=float)

    def _check_bus(self, bus: int) -> None:
        if not (0 <= bus < self.bus_count):
            raise ValueError(f"bus {bus} out of range 0..{self.bus_count - 1}")


@dataclass(frozen=True, eq=False)
class Scenario:
    """Time-varying instance data: horizon ``T``, per-period cost ``cost[t]``,
    and per-bus/per-period ``demand`` and ``gen_cap`` matrices (n x T)."""

    horizon: int
    cost: np.ndarray
    demand: np.ndarray
    gen_cap: np.ndarray

    def __init__(self, horizon: int, cost, demand, gen_cap):
        horizon = int(horizon)
        if horizon < 1:
            raise ValueError("horizon must be a positive integer")
        cost = np.asarray(cost, dtype=float)
        demand = np.asarray(demand, dtype=float)
        gen_cap = np.asarray(gen_cap, dtype=float)
        if cost.shape != (horizon,):
            raise ValueError(f"cost must have shape ({horizon},), got {cost.shape}")
        if np.any(cost <= 0):
            raise ValueError("all period costs must be strictly positive")
        if demand.ndim != 2 or demand.shape[1] != horizon:
            raise ValueError(f"demand must be n x {horizon}, got {demand.shape}")
        if gen_cap.shape != demand.shape:
            raise ValueError("gen_cap shape must match demand shape")
        if np.any(demand < 0) or np.any(gen_cap < 0):
            raise ValueError("demand and gen_cap must be non-negative")
        for arr in (cost, demand, gen_cap):
            arr.setflags(write=False)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "demand", demand)
        object.__setattr__(self, "gen_cap", gen_cap)

    @property
    def bus_count(self) -> int:
        return self.demand.shape[0]

    def check_matches(self, grid: Grid) -> None:
        if self.bus_count != grid.bus_count:
            raise ValueError(
                f"scenario has {self.bus_count} buses but grid has {grid.bus_count}"
            )

    def base_cost(self) -> float:
        """Total generation cost with no battery: sum of demand priced per period."""
        return float(self.demand.sum(axis=0) @ self.cost)


@dataclass(frozen=True)
class Component:
    """One connected component left after removing a bus, together with the
    edges that connected it to the removed bus."""

    buses: frozenset[int]
    connecting_edges: tuple[int, ...]
    link_kind: str  # TREE_LINK, RING_LINK, or MULTI_LINK

    def __post_init__(self):
        if not self.connecting_edges:
            raise ValueError("component must attach through at least one edge")


@dataclass(frozen=True)
class ComponentDecomposition:
    removed_bus: int
    components: tuple[Component, ...]


@dataclass(frozen=True)
class AssumptionReport:
    """Which of the six model assumptions hold, with the first violating
    index for each failed flag (None when the flag holds)."""

    distinct_costs: bool
    sufficient_generation: bool
    limited_transmission: bool
    large_generation: bool
    unit_admittance: bool
    uniform_capacity: bool
    distinct_costs_violation: tuple | None = None
    sufficient_generation_violation: tuple | None = None
    limited_transmission_violation: tuple | None = None
    large_generation_violation: tuple | None = None
    unit_admittance_violation: tuple | None = None
    uniform_capacity_violation: tuple | None = None

    def all_hold(self) -> bool:
        return (
            self.distinct_costs
            and self.sufficient_generation
            and self.limited_transmission
            and self.large_generation
            and self.unit_admittance
            and self.uniform_capacity
        )

    def flags(self) -> dict[str, bool]:
        return {
            "distinct_costs": self.distinct_costs,
            "sufficient_generation": self.sufficient_generation,
            "limited_transmission": self.limited_transmission,
            "large_generation": self.large_generation,
            "unit_admittance": self.unit_admittance,
            "uniform_capacity": self.uniform_capacity,
        }


def _connected(n: int, edges: list[tuple[int, int]]) -> bool:
    if n <= 1:
        return True
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == n


def build_incidence(grid: Grid, weighted: bool = True) -> np.ndarray:
    """Line-by-bus incidence matrix: row e has +b_e at the from-bus and
    -b_e at the to-bus (b_e = 1 when ``weighted`` is False)."""
    mat = np.zeros((grid.line_count, grid.bus_count))
    for e, ln in enumerate(grid.lines):
        w = ln.susceptance if weighted else 1.0
        mat[e, ln.from_bus] = w
        mat[e, ln.to_bus] = -w
    return mat


def build_admittance(grid: Grid) -> np.ndarray:
    """Susceptance-weighted graph Laplacian (symmetric, zero row sums)."""
    mat = np.zeros((grid.bus_count, grid.bus_count))
    for ln in grid.lines:
        i, j, b = ln.from_bus, ln.to_bus, ln.susceptance
        mat[i, i] += b
        mat[j, j] += b
        mat[i, j] -= b
        mat[j, i] -= b
    return mat


def weighted_degree(grid: Grid, bus: int) -> float:
    """Sum of the capacities of the lines incident to ``bus``."""
    grid._check_bus(bus)
    return float(sum(grid.lines[e].capacity for e in grid.incident_lines(bus)))


def _biconnected_edge_groups(grid: Grid) -> list[list[int]]:
    """Partition line indices into biconnected components (Hopcroft-Tarjan,
    iterative). Bridges come back as singleton groups."""
    n = grid.bus_count
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # (neighbor, line idx)
    for e, ln in enumerate(grid.lines):
        adj[ln.from_bus].append((ln.to_bus, e))
        adj[ln.to_bus].append((ln.from_bus, e))

    disc = [-1] * n
    low = [0] * n
    timer = 0
    edge_stack: list[int] = []
    groups: list[list[int]] = []

    for root in range(n):
        if disc[root] != -1:
            continue
        # stack entries: (vertex, parent edge, iterator position)
        work = [(root, -1, 0)]
        disc[root] = low[root] = timer
        timer += 1
        while work:
            v, pedge, idx = work[-1]
            if idx < len(adj[v]):
                work[-1] = (v, pedge, idx + 1)
                w, e = adj[v][idx]
                if e == pedge:
                    continue
                if disc[w] == -1:
                    edge_stack.append(e)
                    disc[w] = low[w] = timer
                    timer += 1
                    work.append((w, e, 0))
                elif disc[w] < disc[v]:
                    edge_stack.append(e)
                    low[v] = min(low[v], disc[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                    if low[v] >= disc[u]:
                        group = []
                        while True:
                            e = edge_stack.pop()
                            group.append(e)
                            if e == pedge:
                                break
                        groups.append(group)
    return groups


def classify_topology(grid: Grid) -> str:
    """TREE when m = n-1; WEAKLY_CYCLIC when every biconnected component is a
    single edge or a single cycle (no edge on two cycles); GENERAL otherwise."""
    n, m = grid.bus_count, grid.line_count
    if m == n - 1:
        return TREE
    for group in _biconnected_edge_groups(grid):
        if len(group) == 1:
            continue
        # A biconnected component is a single cycle iff #edges == #vertices.
        verts = set()
        for e in group:
            verts.add(grid.lines[e].from_bus)
            verts.add(grid.lines[e].to_bus)
        if len(group) != len(verts):
            return GENERAL
    return WEAKLY_CYCLIC


def components_after_removal(grid: Grid, v: int) -> ComponentDecomposition:
    """Connected components of the grid minus bus ``v``, each labelled by how
    many edges attached it to ``v`` (one: tree link, two: ring link)."""
    grid._check_bus(v)
    n = grid.bus_count
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e, ln in enumerate(grid.lines):
        adj[ln.from_bus].append((ln.to_bus, e))
        adj[ln.to_bus].append((ln.from_bus, e))

    comp_id = [-1] * n
    comp_id[v] = -2
    comps: list[set[int]] = []
    for start in range(n):
        if comp_id[start] != -1:
            continue
        cid = len(comps)
        comps.append({start})
        comp_id[start] = cid
        stack = [start]
        while stack:
            a = stack.pop()
            for b, _ in adj[a]:
                if comp_id[b] == -1:
                    comp_id[b] = cid
                    comps[cid].add(b)
                    stack.append(b)

    connecting: list[list[int]] = [[] for _ in comps]
    for b, e in adj[v]:
        connecting[comp_id[b]].append(e)

    out = []
    for cid, buses in enumerate(comps):
        edges = tuple(sorted(connecting[cid]))
        kind = TREE_LINK if len(edges) == 1 else RING_LINK if len(edges) == 2 else MULTI_LINK
        out.append(Component(frozenset(buses), edges, kind))
    return ComponentDecomposition(removed_bus=v, components=tuple(out))


def validate_assumptions(grid: Grid, scenario: Scenario) -> AssumptionReport:
    """Check the six model assumptions over every bus, line, and period."""
    scenario.check_matches(grid)
    c, d, g = scenario.cost, scenario.demand, scenario.gen_cap
    T = scenario.horizon

    distinct, distinct_viol = True, None
    order = np.argsort(c, kind="stable")
    for a, b in zip(order[:-1], order[1:]):
        if c[a] == c[b]:
            distinct, distinct_viol = False, (int(min(a, b)), int(max(a, b)))
            break

    suff, suff_viol = True, None
    bad = np.argwhere(~(g > d))
    if bad.size:
        i, t = bad[0]
        suff, suff_viol = False, (int(i), int(t))

    ltrans, ltrans_viol = True, None
    for e, ln in enumerate(grid.lines):
        for t in range(T):
            if not ln.capacity < min(d[ln.from_bus, t], d[ln.to_bus, t]):
                ltrans, ltrans_viol = False, (e, t)
                break
        if not ltrans:
            break

    large, large_viol = True, None
    for e, ln in enumerate(grid.lines):
        for j in (ln.from_bus, ln.to_bus):
            for t in range(T):
                if not g[j, t] >= ln.capacity + d[j, t]:
                    large, large_viol = False, (e, j, t)
                    break
            if not large:
                break
        if not large:
            break

    unit, unit_viol = True, None
    for e, ln in enumerate(grid.lines):
        if ln.susceptance != 1.0:
            unit, unit_viol = False, (e,)
            break

    uniform, uniform_viol = True, None
    caps = grid.capacities()
    mism = np.nonzero(caps != caps[0])[0]
    if mism.size:
        uniform, uniform_viol = False, (int(mism[0]),)

    return AssumptionReport(
        distinct_costs=distinct,
        sufficient_generation=suff,
        limited_transmission=ltrans,
        large_generation=large,
        unit_admittance=unit,
        uniform_capacity=uniform,
        distinct_costs_violation=distinct_viol,
        sufficient_generation_violation=suff_viol,
        limited_transmission_violation=ltrans_viol,
        large_generation_violation=large_viol,
        unit_admittance_violation=unit_viol,
        uniform_capacity_violation=uniform_viol,
    )
