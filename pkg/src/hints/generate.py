"""Synthetic instances.

``nested_squares`` builds the blocked-expansion scenario: tree R > A > {B, C, D}
with wide margins on B and C.  Starting from all-R, placing any B or C pixel
requires an A ring around it, which a binary move (R or B, R or C) cannot
create, while a single Path-Move along R, A, B can.
"""

from __future__ import annotations

import numpy as np

from .energy import FORBIDDEN, N4, Instance
from .errors import ValidationError
from .tree import LabelTree

NESTED_NAMES = ("R", "A", "B", "C", "D")


def _check_size(width: int, height: int) -> None:
    if width < 1 or height < 1:
        raise ValidationError(f"grid size must be positive, got {width}x{height}")


def nested_squares(width: int = 12, height: int = 12, margin: float = 2.0, lam: float = 1.0) -> Instance:
    _check_size(width, height)
    tree = LabelTree([None, 0, 1, 1, 1], [0.0, 1.0, 1.0, 1.0, 1.0], NESTED_NAMES)
    n = width * height
    ys, xs = np.divmod(np.arange(n), width)
    rows = (ys >= height // 4) & (ys < height - height // 4)
    span = width // 4
    in_b = rows & (xs >= width // 6) & (xs < width // 6 + span)
    in_c = rows & (xs >= width - width // 6 - span) & (xs < width - width // 6)

    data = np.zeros((n, len(NESTED_NAMES)))
    data[:, 1] = 1.0
    data[:, 2] = np.where(in_b, -4.0, 8.0)
    data[:, 3] = np.where(in_c, -4.0, 8.0)
    data[:, 4] = 8.0
    margins = np.array([0.0, 0.0, margin, margin, 0.0])
    return Instance(width=width, height=height, tree=tree, data=data, lam=lam, neighborhood=N4, margins=margins)


def random_instance(
    width: int,
    height: int,
    n_labels: int,
    seed: int = 0,
    forbid_rate: float = 0.1,
    margin_choices=(0.0, 1.5, 2.0),
    star_rate: float = 0.3,
) -> Instance:
    """Random tree, data and margins.  The root keeps finite costs so all-root is feasible."""
    _check_size(width, height)
    if n_labels < 1:
        raise ValidationError(f"need at least one label, got {n_labels}")
    rng = np.random.default_rng(seed)
    parent = [None] + [int(rng.integers(0, i)) for i in range(1, n_labels)]
    weight = [0.0] + np.round(rng.uniform(0.5, 2.0, n_labels - 1), 3).tolist()
    names = ["L0"] + [f"L{i}" for i in range(1, n_labels)]
    tree = LabelTree(parent, weight, names)

    n = width * height
    data = np.round(rng.uniform(-5.0, 5.0, (n, n_labels)), 3)
    mask = rng.random((n, n_labels)) < forbid_rate
    mask[:, 0] = False
    data[mask] = FORBIDDEN
    margins = np.array([0.0] + [float(rng.choice(margin_choices)) for _ in range(n_labels - 1)])
    stars = {}
    if n_labels > 1 and rng.random() < star_rate:
        l = int(rng.integers(1, n_labels))
        stars[l] = (int(rng.integers(0, width)), int(rng.integers(0, height)))
    lam = float(np.round(rng.uniform(0.0, 2.0), 3))
    return Instance(
        width=width, height=height, tree=tree, data=data, lam=lam, neighborhood=N4, margins=margins, stars=stars
    )


PRESETS = ("nested-squares", "random")


def generate(preset: str, width: int, height: int, n_labels: int = 4, seed: int = 0) -> Instance:
    if preset == "nested-squares":
        return nested_squares(width, height)
    if preset == "random":
        return random_instance(width, height, n_labels, seed)
    raise ValidationError(f"unknown preset {preset!r}; choose from {list(PRESETS)}")
