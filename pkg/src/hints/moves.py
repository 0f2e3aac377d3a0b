"""Path-Move flow networks.

For an expansion label ``alpha`` every pixel ``p`` may take any label on the
tree path ``(u_1 .. u_h)`` from its current label ``u_1`` to ``u_h = alpha``.
Pixel ``p`` owns the chain ``s = n_0 -> n_1 -> ... -> n_{h-1} -> n_h = t``.
Chain edge ``i`` (from ``n_{i-1}`` to ``n_i``) carries ``D_p(u_i) + K`` and is
backed by an infinite reverse edge, so a finite cut severs exactly one chain
edge; severing edge ``i`` assigns ``u_i``.  Interior node ``n_j`` is on the
source side iff the chosen index is greater than ``j``.

Pairwise terms attach to interior nodes only:

* smoothness: the shared suffix of two paths gets symmetric cross edges
  (one per overlap step) and each private branch gets source edges carrying
  its step weights, which reproduces the tree metric for every pair of
  choices;
* min-margin and star-shape constraints: a single infinite edge per
  constrained ordered pair, dispatched on whether ``alpha``, ``f'_p`` and
  ``f'_q`` lie in the constrained subtree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .energy import Instance, evaluate, require_feasible
from .errors import InfeasibleError, NoFiniteCut, ValidationError
from .maxflow import INF, CutResult, FlowNetwork

SOURCE = -1
SINK = -2

INFEASIBLE = math.inf


def shift_constant(instance: Instance) -> float:
    """Smallest shift making every finite data cost non-negative."""
    finite = instance.data[np.isfinite(instance.data)]
    if finite.size == 0:
        return 0.0
    return max(0.0, -float(finite.min()))


@dataclass
class Chain:
    labels: tuple[int, ...]
    nodes: tuple[int, ...]

    def node(self, j: int) -> int:
        """Node sitting between chain edges ``j`` and ``j + 1`` (1-based edges)."""
        if j <= 0:
            return SOURCE
        if j >= len(self.labels):
            return SINK
        return self.nodes[j - 1]


@dataclass
class MoveGraph:
    net: FlowNetwork
    alpha: int
    chains: list[Chain]
    shift: float
    constant: float = 0.0
    # (kind, label, p, q, scenario, case) for every pair that needed an edge
    constraint_edges: list[tuple] = field(default_factory=list)

    @property
    def interior_nodes(self) -> int:
        return self.net.n_nodes

    def sides_for(self, assignment) -> list[bool]:
        """Source-side flags of the unique chain-consistent cut for an assignment."""
        src = [False] * self.net.n_nodes
        for chain, label in zip(self.chains, assignment):
            i = chain.labels.index(int(label)) + 1
            for j, node in enumerate(chain.nodes, start=1):
                src[node] = i > j
        return src

    def cut_cost(self, source_side) -> float:
        return self.net.cut_value(source_side) + self.constant


class _Builder:
    def __init__(self, net: FlowNetwork):
        self.net = net
        self.constant = 0.0

    def edge(self, a: int, b: int, cap: float) -> None:
        """Directed capacity from ``a`` to ``b``; terminals may appear on either end."""
        if cap == 0 or a == b or a == SINK or b == SOURCE:
            return
        if a == SOURCE and b == SINK:
            self.constant += cap
        elif a == SOURCE:
            self.net.add_terminal(b, cap, 0.0)
        elif b == SINK:
            self.net.add_terminal(a, 0.0, cap)
        else:
            self.net.add_arc(a, b, cap, 0.0)


def _case(alpha_in: bool, fp_in: bool, fq_in: bool) -> tuple[int, int]:
    if alpha_in:
        if fq_in:
            return 1, 2
        return (1, 3) if fp_in else (1, 1)
    if not fp_in:
        return 2, 2
    return (2, 1) if fq_in else (2, 3)


def _add_constraint(b, kind, l, p, q, cp: Chain, cq: Chain, inside, bad_q, f_p, f_q, alpha, parent, record):
    """Forbid ``f_p in inside`` together with ``f_q in bad_q`` for one ordered pair.

    ``inside`` / ``bad_q`` are boolean masks over labels.  ``kind`` is
    ``"margin"`` (``bad_q`` excludes the parent of ``l``) or ``"shape"``.
    """
    scenario, case = _case(bool(inside[alpha]), bool(inside[f_p]), bool(inside[f_q]))
    if case == 2:
        return
    if case == 3:
        # current pair sits on the subtree boundary; only the parent may face it
        if kind == "margin" and f_q == parent:
            if scenario == 1:
                return
        else:
            raise InfeasibleError(
                f"{kind} constraint of label {l} already violated by pixels {p}, {q}"
            )

    record.append((kind, l, p, q, scenario, case))
    bad = [j for j, u in enumerate(cq.labels, start=1) if bad_q[u]]
    if not bad:
        # nothing on q's path is forbidden; the edge would end at a terminal
        return
    if scenario == 1:
        # p enters the subtree at i0 and stays; q's bad labels precede the parent
        i0 = next(i for i, u in enumerate(cp.labels, start=1) if inside[u])
        j0 = bad[-1]
        b.edge(cp.node(i0 - 1), cq.node(j0), INF)
    else:
        # p leaves the subtree after i1; q's bad labels follow the parent
        i1 = max(i for i, u in enumerate(cp.labels, start=1) if inside[u])
        j1 = bad[0]
        b.edge(cq.node(j1 - 1), cp.node(i1), INF)


def build_move_graph(instance: Instance, current, alpha: int, check: bool = True) -> MoveGraph:
    tree = instance.tree
    alpha = tree.check(alpha)
    f = instance.as_labeling(current)
    if check:
        require_feasible(instance, f)

    K = shift_constant(instance)
    net = FlowNetwork()
    b = _Builder(net)
    chains = []
    for p in range(instance.n_pixels):
        labels = tree.path(int(f[p]), alpha)
        nodes = tuple(net.add_node() for _ in range(len(labels) - 1))
        chain = Chain(labels, nodes)
        chains.append(chain)
        for i, u in enumerate(labels, start=1):
            cost = instance.data[p, u]
            b.edge(chain.node(i - 1), chain.node(i), cost + K if math.isfinite(cost) else INF)
        # reverse edges touching a terminal can never be severed
        for j in range(1, len(labels) - 1):
            net.add_arc(chain.node(j + 1), chain.node(j), INF, 0.0)

    lam = instance.lam
    for (p, q), s in zip(instance.pairs.tolist(), instance.pair_weights.tolist()):
        w = lam * s
        if w == 0:
            continue
        split = tree.split_overlap(int(f[p]), int(f[q]), alpha)
        cp, cq = chains[p], chains[q]
        m, n = len(split.p_branch), len(split.q_branch)
        gp, gq = cp.labels, cq.labels
        for j in range(1, m + 1):
            b.edge(SOURCE, cp.node(j), w * tree.edge_weight(gp[j - 1], gp[j]))
        for j in range(1, n + 1):
            b.edge(SOURCE, cq.node(j), w * tree.edge_weight(gq[j - 1], gq[j]))
        ov = split.overlap
        for i in range(1, len(ov)):
            c = w * tree.edge_weight(ov[i - 1], ov[i])
            b.edge(cp.node(m + i), cq.node(n + i), c)
            b.edge(cq.node(n + i), cp.node(m + i), c)

    record: list[tuple] = []
    for l in instance.active_margin_labels:
        inside = tree.in_subtree[l]
        bad = ~inside.copy()
        bad[tree.parent[l]] = False
        mp, mq = instance.margin_pair_arrays(l)
        for p, q in zip(mp.tolist(), mq.tolist()):
            _add_constraint(b, "margin", l, p, q, chains[p], chains[q], inside, bad,
                            int(f[p]), int(f[q]), alpha, tree.parent[l], record)
    for l in sorted(instance.stars):
        inside = tree.in_subtree[l]
        bad = ~inside
        sp, sq = instance.star_pair_arrays(l)
        for p, q in zip(sp.tolist(), sq.tolist()):
            _add_constraint(b, "shape", l, p, q, chains[p], chains[q], inside, bad,
                            int(f[p]), int(f[q]), alpha, tree.parent[l], record)

    return MoveGraph(net=net, alpha=alpha, chains=chains, shift=K, constant=b.constant,
                     constraint_edges=record)


def decode(graph: MoveGraph, cut: CutResult) -> np.ndarray:
    out = np.empty(len(graph.chains), dtype=np.int64)
    for p, chain in enumerate(graph.chains):
        flags = [cut.on_source(node) for node in chain.nodes]
        i = sum(flags)
        if flags != [True] * i + [False] * (len(flags) - i):
            raise NoFiniteCut(f"cut severs chain of pixel {p} more than once")
        out[p] = chain.labels[i]
    return out


def path_move(instance: Instance, current, alpha: int) -> np.ndarray:
    """Optimal labeling within the Path-Move of ``alpha`` from ``current``."""
    graph = build_move_graph(instance, current, alpha)
    return decode(graph, graph.net.solve())


def move_space(instance: Instance, current, alpha: int) -> list[tuple[int, ...]]:
    """Per pixel, the labels reachable in one Path-Move."""
    f = instance.as_labeling(current)
    return [instance.tree.path(int(x), alpha) for x in f]


def move_cost_oracle(instance: Instance, current, alpha: int, assignment) -> float:
    """Energy plus ``|Omega| K`` of an assignment inside the move, or INFEASIBLE."""
    g = instance.as_labeling(assignment)
    for p, labels in enumerate(move_space(instance, current, alpha)):
        if int(g[p]) not in labels:
            raise ValidationError(f"pixel {p}: label {int(g[p])} is outside its expansion path")
    e = evaluate(instance, g)
    if not e.feasible:
        return INFEASIBLE
    return e.total_finite + instance.n_pixels * shift_constant(instance)
