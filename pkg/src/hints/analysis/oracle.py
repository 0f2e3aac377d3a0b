"""Exhaustive minimization over explicit per-pixel choice sets.

Labelings are enumerated in lexicographic order (pixel 0 most significant,
choices in the given order) and scored in vectorized batches.  Only labels
with a finite data cost are enumerated.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from ..energy import EnergyBreakdown, Instance, evaluate
from ..errors import BudgetExceeded, InfeasibleError

DEFAULT_BUDGET = 5_000_000
BATCH = 1 << 16


class _Scorer:
    """Batched energy of many labelings.

    Smoothness and hard terms are folded into one ``L x L`` table per
    unordered pixel pair, with ``inf`` on forbidden configurations, so a
    labeling is feasible iff its energy is finite.
    """

    def __init__(self, instance: Instance):
        tree = instance.tree
        L = instance.n_labels
        self.instance = instance
        tables: dict[tuple[int, int], np.ndarray] = {}

        def table(p, q):
            key = (min(p, q), max(p, q))
            if key not in tables:
                tables[key] = np.zeros((L, L))
            return tables[key]

        if instance.lam:
            for (p, q), w in zip(instance.pairs.tolist(), instance.pair_weights.tolist()):
                if w:
                    table(p, q)[...] += instance.lam * w * tree.metric

        def forbid(pairs, bad):
            for p, q in zip(*(a.tolist() for a in pairs)):
                # bad is indexed (f_p, f_q); stored tables are (f_min, f_max)
                t = table(p, q)
                t[bad if p < q else bad.T] = math.inf

        for l in instance.active_margin_labels:
            inside = tree.in_subtree[l]
            ok = inside.copy()
            ok[tree.parent[l]] = True
            forbid(instance.margin_pair_arrays(l), inside[:, None] & ~ok[None, :])
        for l in sorted(instance.stars):
            inside = tree.in_subtree[l]
            forbid(instance.star_pair_arrays(l), inside[:, None] & ~inside[None, :])
        self.tables = [(p, q, t.ravel()) for (p, q), t in sorted(tables.items())]

    def __call__(self, labelings: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        inst = self.instance
        L = inst.n_labels
        # column-wise 1-D gathers are far cheaper than 2-D fancy indexing
        cols = [labelings[:, p] for p in range(labelings.shape[1])]
        energy = np.zeros(len(labelings))
        for p, col in enumerate(cols):
            energy += inst.data[p].take(col)
        for p, q, flat in self.tables:
            energy += flat.take(cols[p] * L + cols[q])
        return energy, np.isfinite(energy)


def space_size(choices: Sequence[Sequence[int]]) -> int:
    return math.prod(len(c) for c in choices)


def enumerate_minimum(
    instance: Instance,
    choices: Sequence[Sequence[int]],
    budget: int = DEFAULT_BUDGET,
) -> Optional[tuple[np.ndarray, float]]:
    """Best feasible labeling with ``f_p in choices[p]``, or None when none is feasible."""
    radices = [len(c) for c in choices]
    total = space_size(choices)
    if total > budget:
        raise BudgetExceeded(f"{total} labelings exceed the enumeration budget of {budget}")
    if total == 0:
        return None
    tables = [np.asarray(c, dtype=np.int64) for c in choices]
    score = _Scorer(instance)
    best_energy = math.inf
    best_index = -1
    for start in range(0, total, BATCH):
        idx = np.arange(start, min(total, start + BATCH), dtype=np.int64)
        labelings = np.empty((len(idx), len(choices)), dtype=np.int64, order="F")
        rest = idx.copy()
        for p in range(len(choices) - 1, -1, -1):
            rest, digit = np.divmod(rest, radices[p])
            labelings[:, p] = tables[p][digit]
        energy, _ = score(labelings)
        i = int(np.argmin(energy))
        if energy[i] < best_energy:
            best_energy = float(energy[i])
            best_index = int(idx[i])
    if best_index < 0:
        return None
    out = np.empty(len(choices), dtype=np.int64)
    rest = best_index
    for p in range(len(choices) - 1, -1, -1):
        rest, digit = divmod(rest, radices[p])
        out[p] = tables[p][digit]
    return out, best_energy


def exhaustive_minimize(instance: Instance, budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, EnergyBreakdown]:
    found = enumerate_minimum(instance, [a.tolist() for a in instance.allowed], budget)
    if found is None:
        raise InfeasibleError("no feasible labeling exists")
    labeling, _ = found
    return labeling, evaluate(instance, labeling)
