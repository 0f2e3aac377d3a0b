"""Expansion outer loop with Path-Moves or classic binary expansion moves."""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .energy import EnergyBreakdown, Instance, evaluate, require_feasible
from .errors import HintsError, InfeasibleError, NonSubmodularError, ValidationError
from .maxflow import INF, FlowNetwork
from .moves import path_move, shift_constant


class Algorithm(str, enum.Enum):
    PATH_MOVES = "pathmoves"
    BINARY_EXPANSION = "aexp"


class Order(str, enum.Enum):
    FIXED_ASCENDING = "fixed"
    SHUFFLED = "shuffle"


@dataclass(frozen=True)
class SolverConfig:
    algorithm: Algorithm = Algorithm.PATH_MOVES
    order: Order = Order.FIXED_ASCENDING
    seed: int = 0
    max_sweeps: int = 100
    tol: float = 1e-9

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ValidationError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if not (self.tol >= 0 and math.isfinite(self.tol)):
            raise ValidationError(f"tolerance must be finite and >= 0, got {self.tol}")


@dataclass(frozen=True)
class TraceEntry:
    sweep: int
    label: int
    accepted: bool
    energy: float
    candidate_energy: float
    feasible: bool
    seconds: float
    labeling: Optional[tuple[int, ...]] = None


@dataclass
class SolveReport:
    labeling: np.ndarray
    initial: EnergyBreakdown
    final: EnergyBreakdown
    trace: list[TraceEntry] = field(default_factory=list)
    sweeps: int = 0
    moves_accepted: int = 0
    converged: bool = False

    @property
    def move_seconds(self) -> list[float]:
        return [t.seconds for t in self.trace]


def init_trivial(instance: Instance) -> np.ndarray:
    """All pixels at the root label."""
    return np.full(instance.n_pixels, instance.tree.root, dtype=np.int64)


class _BinaryBuilder:
    """Two-label cut where node on the source side means "switch to alpha"."""

    def __init__(self, switchable: np.ndarray):
        self.net = FlowNetwork()
        self.node = np.full(len(switchable), -1, dtype=np.int64)
        for p in np.flatnonzero(switchable):
            self.node[p] = self.net.add_node()

    def unary(self, p: int, c0: float, c1: float) -> None:
        u = int(self.node[p])
        if u < 0:
            return
        # severed s->u costs c0 (u on sink side, stays); u->t costs c1 (switches)
        self.net.add_terminal(u, c0, c1)

    def pairwise(self, p: int, q: int, e00: float, e01: float, e10: float, e11: float) -> None:
        u, v = int(self.node[p]), int(self.node[q])
        if u < 0 and v < 0:
            return
        if u < 0:
            self.unary(q, e10, e11)
            return
        if v < 0:
            self.unary(p, e01, e11)
            return
        coupling = e01 + e10 - e00 - e11
        if coupling < -1e-12:
            raise NonSubmodularError(f"pairwise term of pixels {p}, {q} is not submodular")
        self._linear(u, e10 - e00)
        self._linear(v, e11 - e10)
        if coupling > 0:
            # cost when p stays and q switches
            self.net.add_arc(v, u, coupling, 0.0)

    def _linear(self, u: int, a: float) -> None:
        if a > 0:
            self.net.add_terminal(u, 0.0, a)
        elif a < 0:
            self.net.add_terminal(u, -a, 0.0)

    def forbid(self, p: int, xp: int, q: int, xq: int) -> None:
        """Make the joint state ``(x_p, x_q)`` infinitely expensive."""
        u, v = int(self.node[p]), int(self.node[q])
        if u < 0 and v < 0:
            raise InfeasibleError(f"pixels {p}, {q} are fixed in a forbidden configuration")
        if u < 0:
            self.net.add_terminal(v, INF if xq == 0 else 0.0, INF if xq == 1 else 0.0)
            return
        if v < 0:
            self.net.add_terminal(u, INF if xp == 0 else 0.0, INF if xp == 1 else 0.0)
            return
        if xp == xq:
            raise NonSubmodularError(f"forbidding equal states of pixels {p}, {q}")
        if xp == 1:
            self.net.add_arc(u, v, INF, 0.0)
        else:
            self.net.add_arc(v, u, INF, 0.0)


def binary_expansion_move(instance: Instance, current, alpha: int) -> np.ndarray:
    """Optimal labeling where every pixel keeps its label or switches to ``alpha``."""
    tree = instance.tree
    alpha = tree.check(alpha)
    f = instance.as_labeling(current)
    require_feasible(instance, f)
    K = shift_constant(instance)

    b = _BinaryBuilder(f != alpha)
    for p in np.flatnonzero(f != alpha):
        b.unary(int(p), instance.data[p, f[p]] + K, instance.data[p, alpha] + K)

    V = tree.metric
    for (p, q), s in zip(instance.pairs.tolist(), instance.pair_weights.tolist()):
        w = instance.lam * s
        if w == 0:
            continue
        a, c = int(f[p]), int(f[q])
        b.pairwise(p, q, w * V[a, c], w * V[a, alpha], w * V[alpha, c], 0.0)

    def hard(pairs, inside, ok_q):
        mp, mq = pairs
        for p, q in zip(mp.tolist(), mq.tolist()):
            # a pixel already at alpha has the single state "switched"
            for xp in (0, 1) if b.node[p] >= 0 else (1,):
                for xq in (0, 1) if b.node[q] >= 0 else (1,):
                    lp = alpha if xp else int(f[p])
                    lq = alpha if xq else int(f[q])
                    if inside[lp] and not ok_q[lq]:
                        b.forbid(p, xp, q, xq)

    for l in instance.active_margin_labels:
        inside = tree.in_subtree[l]
        ok = inside.copy()
        ok[tree.parent[l]] = True
        hard(instance.margin_pair_arrays(l), inside, ok)
    for l in sorted(instance.stars):
        inside = tree.in_subtree[l]
        hard(instance.star_pair_arrays(l), inside, inside)

    cut = b.net.solve()
    out = f.copy()
    for p in np.flatnonzero(b.node >= 0):
        if cut.on_source(int(b.node[p])):
            out[p] = alpha
    return out


def solve(instance: Instance, init, config: SolverConfig = SolverConfig(), keep_labelings: bool = False) -> SolveReport:
    f = instance.as_labeling(init).copy()
    start = require_feasible(instance, f)
    energy = start.total_finite
    move = path_move if config.algorithm == Algorithm.PATH_MOVES else binary_expansion_move
    rng = np.random.default_rng(config.seed)

    report = SolveReport(labeling=f, initial=start, final=start)
    labels = np.arange(instance.n_labels)
    for sweep in range(config.max_sweeps):
        order = rng.permutation(labels) if config.order == Order.SHUFFLED else labels
        accepted_any = False
        for alpha in order.tolist():
            t0 = time.perf_counter()
            candidate = move(instance, f, alpha)
            e = evaluate(instance, candidate)
            if not e.feasible:
                raise HintsError(f"move on label {alpha} returned an infeasible labeling")
            accepted = e.total_finite < energy - config.tol
            if accepted:
                f = candidate
                energy = e.total_finite
                report.moves_accepted += 1
                accepted_any = True
            report.trace.append(
                TraceEntry(
                    sweep=sweep,
                    label=alpha,
                    accepted=accepted,
                    energy=energy,
                    candidate_energy=e.total_finite,
                    feasible=True,
                    seconds=time.perf_counter() - t0,
                    labeling=tuple(f.tolist()) if (accepted and keep_labelings) else None,
                )
            )
        report.sweeps = sweep + 1
        if not accepted_any:
            report.converged = True
            break

    report.labeling = f
    report.final = evaluate(instance, f)
    return report
