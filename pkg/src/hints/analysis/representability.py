"""Can a pairwise hard constraint be cut exactly during every Path-Move?

In a Path-Move each pixel's choice is an index along its expansion path, and
an infinite edge between two chains forbids a whole quadrant of index pairs:
either "p at least i and q at most j" or "p at most i and q at least j".  A
prohibited configuration ``[a, d]`` can therefore be encoded only if one of
the two quadrants cornered at it is free of permissible configurations.

The table is non-representable when some prohibited ``[a, d]`` has a
permissible ``[b, c]`` with ``a <= b`` on ``Gamma(gamma, alpha)`` and
``c <= d`` on ``Gamma(beta, alpha)``, and also a permissible configuration in
the opposite quadrant.  Current labels ``(gamma, beta)`` range over every
permissible pair of assignable labels; labels listed as unassignable (infinite
data cost everywhere) impose no requirement either way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from ..errors import ValidationError
from ..tree import LabelTree


@dataclass(frozen=True)
class ConstraintTable:
    """``prohibited[x, y]``: pixel p labeled x with its neighbor q (in ``direction``) labeled y."""

    labels: tuple[str, ...]
    prohibited: np.ndarray
    direction: str = "any"
    unassignable: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        n = len(self.labels)
        table = np.asarray(self.prohibited, dtype=bool)
        if table.shape != (n, n):
            raise ValidationError(f"constraint table must be {n}x{n}, got {table.shape}")
        object.__setattr__(self, "prohibited", table)
        object.__setattr__(self, "unassignable", frozenset(int(u) for u in self.unassignable))

    @classmethod
    def from_pairs(cls, labels: Iterable[str], pairs: Iterable[tuple[str, str]], **kw) -> "ConstraintTable":
        labels = tuple(labels)
        table = np.zeros((len(labels), len(labels)), dtype=bool)
        for x, y in pairs:
            table[labels.index(x), labels.index(y)] = True
        return cls(labels, table, **kw)

    def permissible(self, x: int, y: int) -> bool:
        if x in self.unassignable or y in self.unassignable:
            return False
        return not self.prohibited[x, y]

    def required(self, x: int, y: int) -> bool:
        """True when ``[x, y]`` must be excluded by the move graph."""
        if x in self.unassignable or y in self.unassignable:
            return False
        return bool(self.prohibited[x, y])


@dataclass(frozen=True)
class Witness:
    alpha: int
    beta: int
    gamma: int
    a: int
    b: int
    c: int
    d: int

    def named(self, names) -> dict:
        return {k: names[v] for k, v in self.__dict__.items()}


@dataclass(frozen=True)
class RepresentabilityVerdict:
    representable: bool
    witness: Optional[Witness] = None
    # permissible configuration lying in the mirrored quadrant of the witness
    mirror: Optional[tuple[int, int]] = None


def align(tree: LabelTree, table: ConstraintTable) -> ConstraintTable:
    """Re-index a table by tree label ids.

    Tree labels missing from the table are treated as unassignable.
    """
    if tuple(tree.names) == tuple(table.labels):
        return table
    missing = [x for x in table.labels if x not in tree.names]
    if missing:
        raise ValidationError(f"constraint labels {missing} are not in the tree")
    n = len(tree)
    ids = [tree.index(x) for x in table.labels]
    out = np.zeros((n, n), dtype=bool)
    out[np.ix_(ids, ids)] = table.prohibited
    unassignable = {ids[u] for u in table.unassignable}
    unassignable |= {x for x in tree.labels if tree.names[x] not in table.labels}
    return ConstraintTable(tuple(tree.names), out, table.direction, frozenset(unassignable))


def check_representable(tree: LabelTree, table: ConstraintTable) -> RepresentabilityVerdict:
    table = align(tree, table)
    assignable = [x for x in tree.labels if x not in table.unassignable]
    for alpha in tree.labels:
        for gamma in assignable:
            for beta in assignable:
                if not table.permissible(gamma, beta):
                    continue
                P = tree.path(gamma, alpha)
                Q = tree.path(beta, alpha)
                for i, a in enumerate(P):
                    for j, d in enumerate(Q):
                        if not table.required(a, d):
                            continue
                        lower = _find(table, P, Q, range(i, len(P)), range(0, j + 1))
                        if lower is None:
                            continue
                        upper = _find(table, P, Q, range(0, i + 1), range(j, len(Q)))
                        if upper is None:
                            continue
                        b, c = lower
                        return RepresentabilityVerdict(
                            False, Witness(alpha, beta, gamma, a, b, c, d), upper
                        )
    return RepresentabilityVerdict(True)


def _find(table, P, Q, rows, cols) -> Optional[tuple[int, int]]:
    for i in rows:
        for j in cols:
            if table.permissible(P[i], Q[j]):
                return P[i], Q[j]
    return None


def witness_holds(tree: LabelTree, table: ConstraintTable, w: Witness) -> bool:
    """Independent check of a witness: ``[a, d]`` prohibited, ``[b, c]`` permissible,
    ``a`` no later than ``b`` toward alpha from gamma and ``c`` no later than ``d``
    toward alpha from beta, with the current pair ``[gamma, beta]`` permissible."""
    table = align(tree, table)
    P = list(tree.path(w.gamma, w.alpha))
    Q = list(tree.path(w.beta, w.alpha))
    if not all(x in P for x in (w.a, w.b)) or not all(x in Q for x in (w.c, w.d)):
        return False
    return (
        table.permissible(w.gamma, w.beta)
        and table.required(w.a, w.d)
        and table.permissible(w.b, w.c)
        and P.index(w.a) <= P.index(w.b)
        and Q.index(w.c) <= Q.index(w.d)
    )


def margin_constraint_table(tree: LabelTree, l: int) -> ConstraintTable:
    """``prohibited[x, y] = x in T(l) and y not in T(l) or parent(l)``."""
    l = tree.check(l)
    if l == tree.root:
        raise ValidationError("the root label has no margin constraint")
    inside = tree.in_subtree[l]
    ok = inside.copy()
    ok[tree.parent[l]] = True
    return ConstraintTable(tuple(tree.names), inside[:, None] & ~ok[None, :], direction="any")


def star_constraint_table(tree: LabelTree, l: int) -> ConstraintTable:
    """``prohibited[x, y] = x in T(l) and y not in T(l)``, with q closer to the center."""
    l = tree.check(l)
    inside = tree.in_subtree[l]
    return ConstraintTable(tuple(tree.names), inside[:, None] & ~inside[None, :], direction="toward-center")
