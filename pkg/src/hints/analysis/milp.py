"""Exact minimization as a mixed-integer program (HiGHS through scipy).

Used as the reference optimum on grids too large to enumerate.  The tree
metric is linear in subtree indicators: the path between two labels crosses
the edge above ``c`` iff exactly one of them lies in the subtree of ``c``,
so ``V(f_p, f_q) = sum_c w_c |y_pc - y_qc|`` with ``y_pc = [f_p in T(c)]``.
Hard terms become pairwise packing rows ``x_p(T(l)) + x_q(bad) <= 1``.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from ..energy import EnergyBreakdown, Instance, evaluate
from ..errors import HintsError, InfeasibleError


def milp_minimize(instance: Instance, time_limit: float = 600.0) -> tuple[np.ndarray, EnergyBreakdown]:
    tree = instance.tree
    N, L = instance.n_pixels, instance.n_labels
    allowed = np.isfinite(instance.data)

    # x variables for allowed (pixel, label) pairs
    xid = np.full((N, L), -1, dtype=np.int64)
    xid[allowed] = np.arange(int(allowed.sum()))
    nx = int(allowed.sum())
    cost = [instance.data[allowed]]

    rows, cols, vals, lo, hi = [], [], [], [], []
    r = 0

    def add_row(entries, lower, upper):
        nonlocal r
        for c, v in entries:
            rows.append(r)
            cols.append(c)
            vals.append(v)
        lo.append(lower)
        hi.append(upper)
        r += 1

    for p in range(N):
        add_row([(int(x), 1.0) for x in xid[p][allowed[p]]], 1.0, 1.0)

    non_root = [c for c in tree.labels if c != tree.root and tree.weight[c] > 0]
    nz = 0
    z_cost = []
    if instance.lam > 0:
        for (p, q), s in zip(instance.pairs.tolist(), instance.pair_weights.tolist()):
            if s == 0:
                continue
            for c in non_root:
                z = nx + nz
                nz += 1
                z_cost.append(instance.lam * s * tree.weight[c])
                members = tree.in_subtree[c]
                yp = [(int(xid[p, x]), 1.0) for x in np.flatnonzero(members & allowed[p])]
                yq = [(int(xid[q, x]), 1.0) for x in np.flatnonzero(members & allowed[q])]
                add_row([(z, 1.0)] + [(i, -v) for i, v in yp] + [(i, v) for i, v in yq], 0.0, np.inf)
                add_row([(z, 1.0)] + yp + [(i, -v) for i, v in yq], 0.0, np.inf)

    def packing(pairs, inside, bad):
        mp, mq = pairs
        for p, q in zip(mp.tolist(), mq.tolist()):
            a = [(int(xid[p, x]), 1.0) for x in np.flatnonzero(inside & allowed[p])]
            b = [(int(xid[q, x]), 1.0) for x in np.flatnonzero(bad & allowed[q])]
            if a and b:
                add_row(a + b, -np.inf, 1.0)

    for l in instance.active_margin_labels:
        inside = tree.in_subtree[l]
        bad = ~inside
        bad[tree.parent[l]] = False
        packing(instance.margin_pair_arrays(l), inside, bad)
    for l in sorted(instance.stars):
        inside = tree.in_subtree[l]
        packing(instance.star_pair_arrays(l), inside, ~inside)

    n = nx + nz
    c = np.concatenate(cost + [np.asarray(z_cost, dtype=float)])
    A = sparse.csr_array((vals, (rows, cols)), shape=(r, n))
    integrality = np.concatenate([np.ones(nx), np.zeros(nz)])
    upper = np.concatenate([np.ones(nx), np.full(nz, np.inf)])
    res = milp(
        c,
        constraints=LinearConstraint(A, lo, hi),
        integrality=integrality,
        bounds=Bounds(np.zeros(n), upper),
        options={"mip_rel_gap": 0.0, "time_limit": time_limit},
    )
    if res.status == 2:
        raise InfeasibleError("no feasible labeling exists")
    if res.status != 0 or res.x is None:
        raise HintsError(f"MILP solver did not reach a proven optimum: {res.message}")
    x = res.x[:nx]
    labeling = np.empty(N, dtype=np.int64)
    for p in range(N):
        ids = xid[p][allowed[p]]
        labeling[p] = np.flatnonzero(allowed[p])[int(np.argmax(x[ids]))]
    return labeling, evaluate(instance, labeling)
