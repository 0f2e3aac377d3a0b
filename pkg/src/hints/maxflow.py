"""Minimum s-t cut on sparse directed networks.

Capacities are floats; :data:`INF` (``math.inf``) marks arcs that may never
be severed and saturates under addition.  The solver is Dinic's blocking-flow
algorithm, which behaves well on the shallow, grid-like graphs built by the
move engine.

Side assignment after solving: a node is on the SOURCE side iff it is
reachable from the source in the final residual graph.  Equal-cost cuts are
therefore resolved toward the smallest source set, so a node whose two
terminal capacities are equal ends up on the SINK side.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass

from .errors import NoFiniteCut

INF = math.inf


class Side(enum.IntEnum):
    SINK = 0
    SOURCE = 1


@dataclass(frozen=True)
class CutResult:
    flow: float
    sides: tuple[Side, ...]

    def side(self, node: int) -> Side:
        return self.sides[node]

    def on_source(self, node: int) -> bool:
        return self.sides[node] is Side.SOURCE


def _check_cap(c: float) -> float:
    c = float(c)
    if math.isnan(c) or c < 0:
        raise ValueError(f"capacity must be >= 0 or INF, got {c}")
    return c


class FlowNetwork:
    """Nodes ``0 .. n-1`` plus implicit source and sink terminals."""

    def __init__(self, n_nodes: int = 0):
        self._s_cap: list[float] = []
        self._t_cap: list[float] = []
        self.arcs: list[tuple[int, int, float, float]] = []
        for _ in range(n_nodes):
            self.add_node()

    @property
    def n_nodes(self) -> int:
        return len(self._s_cap)

    def add_node(self) -> int:
        self._s_cap.append(0.0)
        self._t_cap.append(0.0)
        return len(self._s_cap) - 1

    def _check_node(self, u: int) -> None:
        if not (0 <= u < self.n_nodes):
            raise IndexError(f"invalid node id {u}")

    def add_arc(self, u: int, v: int, cap_uv: float, cap_vu: float = 0.0) -> None:
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise ValueError("self loops are not allowed")
        self.arcs.append((u, v, _check_cap(cap_uv), _check_cap(cap_vu)))

    def add_terminal(self, u: int, cap_s_u: float, cap_u_t: float) -> None:
        """Add capacity on the arcs source->u and u->sink (accumulates)."""
        self._check_node(u)
        self._s_cap[u] += _check_cap(cap_s_u)
        self._t_cap[u] += _check_cap(cap_u_t)

    def terminal(self, u: int) -> tuple[float, float]:
        return self._s_cap[u], self._t_cap[u]

    def cut_value(self, source_side) -> float:
        """Capacity of the cut induced by a per-node side assignment."""
        src = [bool(x) for x in source_side]
        if len(src) != self.n_nodes:
            raise ValueError("side assignment has the wrong length")
        total = 0.0
        for u in range(self.n_nodes):
            total += self._t_cap[u] if src[u] else self._s_cap[u]
        for u, v, cuv, cvu in self.arcs:
            if src[u] and not src[v]:
                total += cuv
            elif src[v] and not src[u]:
                total += cvu
        return total

    def solve(self) -> CutResult:
        n = self.n_nodes
        s, t = n, n + 1
        to: list[int] = []
        cap: list[float] = []
        adj: list[list[int]] = [[] for _ in range(n + 2)]

        def arc(u: int, v: int, c_uv: float, c_vu: float) -> None:
            adj[u].append(len(to))
            to.append(v)
            cap.append(c_uv)
            adj[v].append(len(to))
            to.append(u)
            cap.append(c_vu)

        flow = 0.0
        for u in range(n):
            a, b = self._s_cap[u], self._t_cap[u]
            if a == INF and b == INF:
                raise NoFiniteCut(f"node {u} has infinite capacity to both terminals")
            shared = min(a, b)
            if shared > 0:
                flow += shared
                a -= shared
                b -= shared
            if a > 0:
                arc(s, u, a, 0.0)
            if b > 0:
                arc(u, t, b, 0.0)
        for u, v, cuv, cvu in self.arcs:
            if cuv > 0 or cvu > 0:
                arc(u, v, cuv, cvu)

        if self._reaches(s, t, adj, to, cap, lambda c: c == INF):
            raise NoFiniteCut("every s-t cut contains an infinite arc")

        level = [0] * (n + 2)
        while True:
            for i in range(n + 2):
                level[i] = -1
            level[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for e in adj[u]:
                    v = to[e]
                    if level[v] < 0 and cap[e] > 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                break
            pointer = [0] * (n + 2)
            while True:
                path: list[int] = []
                u = s
                while u != t:
                    edges = adj[u]
                    i = pointer[u]
                    while i < len(edges):
                        e = edges[i]
                        if cap[e] > 0 and level[to[e]] == level[u] + 1:
                            break
                        i += 1
                    pointer[u] = i
                    if i < len(edges):
                        path.append(edges[i])
                        u = to[edges[i]]
                        continue
                    if u == s:
                        break
                    level[u] = -1
                    e = path.pop()
                    u = to[e ^ 1]
                    pointer[u] += 1
                if u != t:
                    break
                push = min(cap[e] for e in path)
                for e in path:
                    cap[e] -= push
                    cap[e ^ 1] += push
                flow += push

        seen = self._reachable(s, adj, to, cap, lambda c: c > 0)
        sides = tuple(Side.SOURCE if seen[u] else Side.SINK for u in range(n))
        return CutResult(flow=flow, sides=sides)

    @staticmethod
    def _reachable(s, adj, to, cap, usable) -> list[bool]:
        seen = [False] * len(adj)
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                v = to[e]
                if not seen[v] and usable(cap[e]):
                    seen[v] = True
                    queue.append(v)
        return seen

    @classmethod
    def _reaches(cls, s, t, adj, to, cap, usable) -> bool:
        return cls._reachable(s, adj, to, cap, usable)[t]


def solve(net: FlowNetwork) -> CutResult:
    return net.solve()
