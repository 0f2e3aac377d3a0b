"""Problem instances and evaluation of the HINTS energy.

The energy of a labeling is

    sum_p D_p(f_p) + lambda * sum_{pq in N} s_pq * V(f_p, f_q)

plus two families of hard terms that are reported as violation counts:

* min-margin: a pixel labeled inside the subtree of ``l`` forces every pixel
  closer than ``margin[l]`` (Euclidean, strict) to be inside that subtree or
  equal to its parent;
* star shape: walking from any pixel toward the star center of ``l``,
  membership in the subtree of ``l`` may only be gained, never lost.

Data costs equal to :data:`FORBIDDEN` mark labels that cannot be assigned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import InfeasibleError, ValidationError
from .tree import LabelTree

FORBIDDEN = math.inf

N4 = "N4"
N8 = "N8"


@dataclass(eq=False)
class Instance:
    """A grid labeling problem.

    ``data`` has shape ``(height * width, n_labels)`` in row-major pixel
    order; pixel ``p`` sits at ``(x, y) = (p % width, p // width)``.
    ``contrast`` maps an unordered neighbor pair ``(p, q)`` with ``p < q`` to
    its multiplier; missing pairs default to 1.
    """

    width: int
    height: int
    tree: LabelTree
    data: np.ndarray
    lam: float = 1.0
    neighborhood: str = N4
    contrast: Mapping[tuple[int, int], float] = field(default_factory=dict)
    margins: Sequence[float] = ()
    stars: Mapping[int, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        n = len(self.tree)
        if len(self.margins) == 0:
            self.margins = np.zeros(n)
        self.margins = np.asarray(self.margins, dtype=float)
        self.contrast = {
            (min(p, q), max(p, q)): float(s) for (p, q), s in dict(self.contrast).items()
        }
        self.stars = {int(l): (int(c[0]), int(c[1])) for l, c in dict(self.stars).items()}

    @property
    def n_pixels(self) -> int:
        return self.width * self.height

    @property
    def n_labels(self) -> int:
        return len(self.tree)

    def index(self, x: int, y: int) -> int:
        return y * self.width + x

    def coords(self, p: int) -> tuple[int, int]:
        return p % self.width, p // self.width

    def inside(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    @cached_property
    def pairs(self) -> np.ndarray:
        """Neighbor pairs as an ``(E, 2)`` array, each unordered pair once."""
        steps = [(1, 0), (0, 1)]
        if self.neighborhood == N8:
            steps += [(1, 1), (-1, 1)]
        out = []
        for y in range(self.height):
            for x in range(self.width):
                for dx, dy in steps:
                    if self.inside(x + dx, y + dy):
                        out.append((self.index(x, y), self.index(x + dx, y + dy)))
        return np.array(out, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def pair_weights(self) -> np.ndarray:
        """Contrast multiplier ``s_pq`` for every row of :attr:`pairs`."""
        w = np.ones(len(self.pairs))
        for i, (p, q) in enumerate(self.pairs.tolist()):
            w[i] = self.contrast.get((p, q), 1.0)
        return w

    @cached_property
    def allowed(self) -> list[np.ndarray]:
        """Per pixel, the labels whose data cost is not forbidden."""
        return [np.flatnonzero(np.isfinite(row)) for row in self.data]

    @cached_property
    def _margin_arrays(self) -> dict[int, tuple[np.ndarray, np.ndarray]]:
        out = {}
        for l in self.active_margin_labels:
            pairs = sorted(margin_pairs(self, l))
            arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
            out[l] = (arr[:, 0], arr[:, 1])
        return out

    @cached_property
    def _star_arrays(self) -> dict[int, tuple[np.ndarray, np.ndarray]]:
        out = {}
        for l in sorted(self.stars):
            pairs = sorted(star_pairs(self, l))
            arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
            out[l] = (arr[:, 0], arr[:, 1])
        return out

    @cached_property
    def active_margin_labels(self) -> list[int]:
        """Non-root labels whose margin constrains at least one pixel pair."""
        return [
            l
            for l in self.tree.labels
            if l != self.tree.root and self.margins[l] > 1.0
        ]

    def margin_pair_arrays(self, l: int) -> tuple[np.ndarray, np.ndarray]:
        return self._margin_arrays[l]

    def star_pair_arrays(self, l: int) -> tuple[np.ndarray, np.ndarray]:
        return self._star_arrays[l]

    def as_labeling(self, labeling) -> np.ndarray:
        f = np.asarray(labeling)
        if f.ndim == 2:
            if f.shape != (self.height, self.width):
                raise ValidationError(
                    f"labeling shape {f.shape} does not match grid {(self.height, self.width)}"
                )
            f = f.reshape(-1)
        if f.shape != (self.n_pixels,):
            raise ValidationError(f"labeling has {f.size} pixels, instance has {self.n_pixels}")
        if not np.issubdtype(f.dtype, np.integer):
            if not np.all(np.equal(np.mod(f, 1), 0)):
                raise ValidationError("labeling contains non-integer labels")
        f = f.astype(np.int64)
        if f.size and (f.min() < 0 or f.max() >= self.n_labels):
            raise ValidationError("labeling contains an invalid label id")
        return f


@dataclass(frozen=True)
class EnergyBreakdown:
    data_sum: float
    smoothness_sum: float
    margin_violations: int
    shape_violations: int
    forbidden_count: int
    total_finite: float

    @property
    def feasible(self) -> bool:
        return self.margin_violations == 0 and self.shape_violations == 0 and self.forbidden_count == 0

    def to_dict(self) -> dict:
        return {
            "data_sum": self.data_sum,
            "smoothness_sum": self.smoothness_sum,
            "margin_violations": self.margin_violations,
            "shape_violations": self.shape_violations,
            "forbidden_count": self.forbidden_count,
            "total_finite": self.total_finite,
            "feasible": self.feasible,
        }


def margin_offsets(delta: float) -> list[tuple[int, int]]:
    """Nonzero integer offsets strictly closer than ``delta``."""
    r = int(math.ceil(delta))
    return [
        (dx, dy)
        for dy in range(-r, r + 1)
        for dx in range(-r, r + 1)
        if (dx or dy) and dx * dx + dy * dy < delta * delta
    ]


def margin_pairs(instance: Instance, l: int) -> set[tuple[int, int]]:
    """Ordered pixel pairs ``(p, q)``, ``p != q``, closer than ``margin[l]``."""
    delta = float(instance.margins[instance.tree.check(l)])
    out = set()
    offsets = margin_offsets(delta)
    for y in range(instance.height):
        for x in range(instance.width):
            p = instance.index(x, y)
            for dx, dy in offsets:
                if instance.inside(x + dx, y + dy):
                    out.add((p, instance.index(x + dx, y + dy)))
    return out


def star_step(p: tuple[int, int], center: tuple[int, int]) -> Optional[tuple[int, int]]:
    """Next pixel on the 8-connected digital line from ``p`` toward ``center``.

    The major axis advances by one; the minor axis advances when the exact
    line crosses at least half a pixel (ties round away from ``p``).
    """
    dx = center[0] - p[0]
    dy = center[1] - p[1]
    m = max(abs(dx), abs(dy))
    if m == 0:
        return None
    sx = (1 if dx > 0 else -1) if 2 * abs(dx) >= m else 0
    sy = (1 if dy > 0 else -1) if 2 * abs(dy) >= m else 0
    return p[0] + sx, p[1] + sy


def star_pairs(instance: Instance, l: int) -> set[tuple[int, int]]:
    """Consecutive pairs ``(p, q)`` with ``q`` one step from ``p`` toward the center of ``l``."""
    l = instance.tree.check(l)
    if l not in instance.stars:
        raise ValidationError(f"no star center configured for label {instance.tree.names[l]!r}")
    c = instance.stars[l]
    out = set()
    for y in range(instance.height):
        for x in range(instance.width):
            q = star_step((x, y), c)
            if q is not None:
                out.add((instance.index(x, y), instance.index(*q)))
    return out


def validate(instance: Instance) -> list[str]:
    """Human-readable findings; empty iff the instance is well formed."""
    out = []
    n = instance.n_labels
    if instance.width < 1 or instance.height < 1:
        out.append(f"grid size must be positive, got {instance.width}x{instance.height}")
    if instance.neighborhood not in (N4, N8):
        out.append(f"neighborhood must be N4 or N8, got {instance.neighborhood!r}")
    if instance.data.shape != (instance.width * instance.height, n):
        out.append(
            f"data volume has shape {instance.data.shape}, expected "
            f"{(instance.width * instance.height, n)}"
        )
    elif np.isnan(instance.data).any() or (instance.data == -math.inf).any():
        out.append("data volume contains NaN or -inf")
    if not math.isfinite(instance.lam):
        out.append("lambda must be finite")
    elif instance.lam < 0:
        out.append("lambda negative")
    if instance.margins.shape != (n,):
        out.append(f"expected {n} margins, got {instance.margins.shape}")
    else:
        for l, d in enumerate(instance.margins):
            if not math.isfinite(d) or d < 0:
                out.append(f"margin of {instance.tree.names[l]!r} must be finite and >= 0, got {d}")
    for (p, q), s in instance.contrast.items():
        if not math.isfinite(s) or s < 0:
            out.append(f"contrast of pair {(p, q)} must be finite and >= 0, got {s}")
    if instance.contrast and instance.width >= 1 and instance.height >= 1:
        known = {tuple(pq) for pq in instance.pairs.tolist()}
        for pq in instance.contrast:
            if pq not in known:
                out.append(f"contrast given for non-neighbor pair {pq}")
    for l, c in instance.stars.items():
        if not (0 <= l < n):
            out.append(f"star center given for unknown label {l}")
        elif not instance.inside(*c):
            out.append(f"star center {c} of {instance.tree.names[l]!r} lies outside the grid")
    return out


def evaluate(instance: Instance, labeling) -> EnergyBreakdown:
    f = instance.as_labeling(labeling)
    tree = instance.tree

    chosen = instance.data[np.arange(instance.n_pixels), f]
    finite = np.isfinite(chosen)
    data_sum = float(chosen[finite].sum())
    forbidden = int((~finite).sum())

    p, q = instance.pairs[:, 0], instance.pairs[:, 1]
    smooth = float(np.dot(instance.pair_weights, tree.metric[f[p], f[q]]))

    margin_violations = 0
    for l in instance.active_margin_labels:
        mp, mq = instance.margin_pair_arrays(l)
        inside = tree.in_subtree[l]
        ok = inside.copy()
        ok[tree.parent[l]] = True
        margin_violations += int(np.count_nonzero(inside[f[mp]] & ~ok[f[mq]]))

    shape_violations = 0
    for l in sorted(instance.stars):
        sp, sq = instance.star_pair_arrays(l)
        inside = tree.in_subtree[l]
        shape_violations += int(np.count_nonzero(inside[f[sp]] & ~inside[f[sq]]))

    return EnergyBreakdown(
        data_sum=data_sum,
        smoothness_sum=smooth,
        margin_violations=margin_violations,
        shape_violations=shape_violations,
        forbidden_count=forbidden,
        total_finite=data_sum + instance.lam * smooth,
    )


def require_feasible(instance: Instance, labeling) -> EnergyBreakdown:
    e = evaluate(instance, labeling)
    if not e.feasible:
        raise InfeasibleError(
            f"labeling is infeasible: {e.margin_violations} margin, "
            f"{e.shape_violations} shape, {e.forbidden_count} forbidden-label violations"
        )
    return e
