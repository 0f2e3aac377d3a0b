"""Label trees: expansion paths, subtrees and the tree metric.

Labels are dense integer ids ``0 .. n-1``.  Display names are carried along
for the IO layer only.  All queries are precomputed at construction because
the solver asks them once per pixel per move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import TreeError


@dataclass(frozen=True)
class PathSplit:
    """Two expansion paths toward the same label, split at their common suffix.

    ``p_branch + overlap`` is the path from the first current label and
    ``q_branch + overlap`` the path from the second one.  ``overlap`` always
    ends with the expansion label.
    """

    p_branch: tuple[int, ...]
    q_branch: tuple[int, ...]
    overlap: tuple[int, ...]


class LabelTree:
    """Rooted tree over label ids with non-negative edge weights.

    ``parent[root]`` is ``None``; ``weight[c]`` is the weight of the edge
    between ``c`` and its parent (ignored for the root).
    """

    def __init__(
        self,
        parent: Sequence[Optional[int]],
        weight: Sequence[float],
        names: Optional[Sequence[str]] = None,
    ):
        n = len(parent)
        if n == 0:
            raise TreeError("tree has no labels")
        if len(weight) != n:
            raise TreeError("parent and weight lists differ in length")
        if names is None:
            names = [str(i) for i in range(n)]
        if len(names) != n:
            raise TreeError("names list differs in length from parent list")
        if len(set(names)) != n:
            raise TreeError("duplicate label names")

        roots = [i for i, p in enumerate(parent) if p is None]
        if not roots:
            raise TreeError("cycle detected: no label is a root")
        if len(roots) > 1:
            raise TreeError(f"multiple roots: {sorted(roots)}")
        for i, p in enumerate(parent):
            if p is not None and not (0 <= p < n):
                raise TreeError(f"label {i} has unknown parent {p}")
        weights = []
        for i, w in enumerate(weight):
            w = 0.0 if parent[i] is None else float(w)
            if not math.isfinite(w) or w < 0:
                raise TreeError(f"edge weight of label {names[i]!r} must be finite and >= 0, got {w}")
            weights.append(w)

        self.root: int = roots[0]
        self.parent: tuple[Optional[int], ...] = tuple(parent)
        self.weight: tuple[float, ...] = tuple(weights)
        self.names: tuple[str, ...] = tuple(names)

        depth = [-1] * n
        depth[self.root] = 0
        for start in range(n):
            chain = []
            x = start
            while depth[x] < 0:
                if x in chain:
                    raise TreeError(f"cycle detected through label {names[x]!r}")
                chain.append(x)
                x = parent[x]
            for y in reversed(chain):
                depth[y] = depth[parent[y]] + 1
        self.depth: tuple[int, ...] = tuple(depth)

        children: list[list[int]] = [[] for _ in range(n)]
        for i, p in enumerate(parent):
            if p is not None:
                children[p].append(i)
        self.children: tuple[tuple[int, ...], ...] = tuple(tuple(c) for c in children)

        # in_subtree[l, x] is True iff x lies in the subtree rooted at l
        mask = np.zeros((n, n), dtype=bool)
        for x in range(n):
            y: Optional[int] = x
            while y is not None:
                mask[y, x] = True
                y = parent[y]
        mask.setflags(write=False)
        self.in_subtree = mask

        self._paths: dict[tuple[int, int], tuple[int, ...]] = {}
        for a in range(n):
            for b in range(n):
                self._paths[a, b] = self._walk(a, b)

        metric = np.zeros((n, n))
        for (a, b), path in self._paths.items():
            metric[a, b] = sum(self.edge_weight(u, v) for u, v in zip(path, path[1:]))
        metric.setflags(write=False)
        self.metric = metric

    def __len__(self) -> int:
        return len(self.parent)

    def __repr__(self) -> str:
        return f"LabelTree(n={len(self)}, root={self.names[self.root]!r})"

    @property
    def labels(self) -> range:
        return range(len(self))

    def _walk(self, a: int, b: int) -> tuple[int, ...]:
        up_a, up_b = [a], [b]
        x, y = a, b
        while self.depth[x] > self.depth[y]:
            x = self.parent[x]
            up_a.append(x)
        while self.depth[y] > self.depth[x]:
            y = self.parent[y]
            up_b.append(y)
        while x != y:
            x = self.parent[x]
            y = self.parent[y]
            up_a.append(x)
            up_b.append(y)
        return tuple(up_a + up_b[-2::-1])

    def check(self, label: int) -> int:
        if not isinstance(label, (int, np.integer)) or not (0 <= label < len(self)):
            raise TreeError(f"unknown label {label!r}")
        return int(label)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise TreeError(f"unknown label name {name!r}") from None

    def edge_weight(self, u: int, v: int) -> float:
        """Weight of the tree edge joining two adjacent labels."""
        if self.parent[u] == v:
            return self.weight[u]
        if self.parent[v] == u:
            return self.weight[v]
        raise TreeError(f"labels {u} and {v} are not adjacent")

    def path(self, a: int, b: int) -> tuple[int, ...]:
        return self._paths[self.check(a), self.check(b)]

    def subtree(self, x: int) -> frozenset[int]:
        x = self.check(x)
        return frozenset(np.flatnonzero(self.in_subtree[x]).tolist())

    def tree_metric(self, a: int, b: int) -> float:
        return float(self.metric[self.check(a), self.check(b)])

    def split_overlap(self, fp: int, fq: int, alpha: int) -> PathSplit:
        gp = self.path(fp, alpha)
        gq = self.path(fq, alpha)
        k = 1
        while k < min(len(gp), len(gq)) and gp[-k - 1] == gq[-k - 1]:
            k += 1
        return PathSplit(gp[:-k], gq[:-k], gp[-k:])

    def leaves(self) -> list[int]:
        return [i for i in self.labels if not self.children[i]]


def build_tree(
    parent_list: Mapping[int, Optional[int]],
    edge_weights: Mapping[int, float],
    names: Optional[Sequence[str]] = None,
) -> LabelTree:
    """Validate a parent map and a weight map and build the tree.

    Keys must be exactly ``0 .. n-1``.  The root's weight entry may be omitted.
    """
    keys = set(parent_list)
    n = len(keys)
    if keys != set(range(n)):
        raise TreeError(f"labels must be 0..{n - 1}, got {sorted(keys)}")
    extra = set(edge_weights) - keys
    if extra:
        raise TreeError(f"weights given for unknown labels {sorted(extra)}")
    for i, p in parent_list.items():
        if p is not None and p not in keys:
            raise TreeError(f"label {i} has unknown parent {p}")
    weights = []
    for i in range(n):
        if parent_list[i] is None:
            weights.append(edge_weights.get(i, 0.0))
        elif i not in edge_weights:
            raise TreeError(f"missing edge weight for label {i}")
        else:
            weights.append(edge_weights[i])
    return LabelTree([parent_list[i] for i in range(n)], weights, names)


def chain_tree(n: int, weight: float = 1.0) -> LabelTree:
    """Chain ``0 - 1 - ... - n-1`` rooted at 0."""
    return LabelTree([None] + list(range(n - 1)), [0.0] + [weight] * (n - 1))


def balanced_tree(depth: int, arity: int = 2, weight: float = 1.0) -> LabelTree:
    """Complete ``arity``-ary tree with ``depth`` levels below the root (heap order)."""
    n = sum(arity**d for d in range(depth + 1))
    parent = [None] + [(i - 1) // arity for i in range(1, n)]
    return LabelTree(parent, [0.0] + [weight] * (n - 1))


def sample_tree(weights: Optional[Mapping[str, float]] = None) -> LabelTree:
    """Six-label tree R > A > {B, C, D}, B > E with ids R=0 .. E=5."""
    names = ["R", "A", "B", "C", "D", "E"]
    parent = [None, 0, 1, 1, 1, 2]
    w = {name: 1.0 for name in names}
    if weights:
        w.update(weights)
    return LabelTree(parent, [0.0] + [w[name] for name in names[1:]], names)
