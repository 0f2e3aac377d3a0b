import itertools
import math

import numpy as np
import pytest

from hints.energy import FORBIDDEN, N4, Instance
from hints.moves import path_move
from hints.tree import LabelTree, sample_tree


def two_pixel_case(rng, neighborhood="N8"):
    """Random 2-pixel instance over the sample tree with a feasible current labeling."""
    names = ["A", "B", "C", "D", "E"]
    tree = sample_tree({x: float(rng.uniform(0, 5)) for x in names})
    width, height = (2, 1) if rng.random() < 0.5 else (1, 2)
    margins = np.where(rng.random(6) < 0.5, 1.5, 0.0)
    stars = {}
    if rng.random() < 0.3:
        stars = {int(rng.integers(1, 6)): (0, 0)}
    inst = Instance(width=width, height=height, tree=tree, data=rng.uniform(-5, 5, (2, 6)),
                    lam=float(rng.uniform(0, 3)), neighborhood=neighborhood, margins=margins, stars=stars)
    while True:
        current = rng.integers(0, 6, 2)
        if brute_energy(inst, current)[1]:
            return inst, current, int(rng.integers(0, 6))


def random_tree(rng, n, low=0.0, high=5.0):
    parent = [None] + [int(rng.integers(0, i)) for i in range(1, n)]
    weight = [0.0] + rng.uniform(low, high, n - 1).tolist()
    return LabelTree(parent, weight)


def random_instance(rng, width, height, tree, margins=(0.0,), lam=None, forbid=0.0, neighborhood=N4, stars=None):
    n, L = width * height, len(tree)
    data = rng.uniform(-5, 5, (n, L))
    if forbid:
        mask = rng.random((n, L)) < forbid
        mask[:, tree.root] = False
        data[mask] = FORBIDDEN
    m = np.array([float(rng.choice(margins)) for _ in range(L)])
    return Instance(
        width=width,
        height=height,
        tree=tree,
        data=data,
        lam=float(rng.uniform(0, 3)) if lam is None else lam,
        neighborhood=neighborhood,
        margins=m,
        stars=stars or {},
    )


def random_feasible_labeling(rng, inst, moves=3):
    """A feasible labeling reached by Path-Moves on a decoy data volume with the same forbidden mask."""
    decoy = rng.uniform(-5, 5, inst.data.shape)
    decoy[~np.isfinite(inst.data)] = FORBIDDEN
    other = Instance(
        width=inst.width, height=inst.height, tree=inst.tree, data=decoy, lam=float(rng.uniform(0, 1)),
        neighborhood=inst.neighborhood, margins=inst.margins, stars=inst.stars,
    )
    f = np.full(inst.n_pixels, inst.tree.root)
    for _ in range(moves):
        f = path_move(other, f, int(rng.integers(0, len(inst.tree))))
    return f


def brute_energy(inst, f):
    """Energy by direct summation; returns (finite energy, feasible)."""
    f = [int(v) for v in np.asarray(f).ravel()]
    tree = inst.tree
    W, H = inst.width, inst.height

    def metric(a, b):
        path = tree.path(a, b)
        return sum(tree.weight[u] if tree.parent[u] == v else tree.weight[v] for u, v in zip(path, path[1:]))

    feasible = True
    total = 0.0
    for p in range(W * H):
        d = inst.data[p, f[p]]
        if math.isinf(d):
            feasible = False
        else:
            total += d
    steps = [(1, 0), (0, 1)] + ([(1, 1), (-1, 1)] if inst.neighborhood == "N8" else [])
    for y, x in itertools.product(range(H), range(W)):
        for dx, dy in steps:
            if 0 <= x + dx < W and 0 <= y + dy < H:
                p, q = y * W + x, (y + dy) * W + x + dx
                s = inst.contrast.get((min(p, q), max(p, q)), 1.0)
                total += inst.lam * s * metric(f[p], f[q])
    for l in tree.labels:
        delta = inst.margins[l]
        if l == tree.root or delta <= 0:
            continue
        sub = tree.subtree(l)
        for p, q in itertools.permutations(range(W * H), 2):
            (xp, yp), (xq, yq) = (p % W, p // W), (q % W, q // W)
            if math.hypot(xp - xq, yp - yq) < delta and f[p] in sub and f[q] not in sub and f[q] != tree.parent[l]:
                feasible = False
    for l, c in inst.stars.items():
        sub = tree.subtree(l)
        for p in range(W * H):
            x, y = p % W, p // W
            dx, dy = c[0] - x, c[1] - y
            m = max(abs(dx), abs(dy))
            if m == 0:
                continue
            qx = x + round_half_away(dx / m)
            qy = y + round_half_away(dy / m)
            # the step toward c is the unit move closest to the exact direction
            q = qy * W + qx
            if f[p] in sub and f[q] not in sub:
                feasible = False
    return total, feasible


def round_half_away(v):
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


@pytest.fixture
def tree6():
    return sample_tree()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cuts_by_assignment(graph):
    """Min cut cost per decoded assignment over all chain-monotone side vectors.

    An infinite value means every cut consistent with that assignment is infinite."""
    chains = graph.chains
    best = {}
    for sides in itertools.product((False, True), repeat=graph.net.n_nodes):
        labels = []
        for chain in chains:
            flags = [sides[n] for n in chain.nodes]
            i = sum(flags)
            if flags != [True] * i + [False] * (len(flags) - i):
                break
            labels.append(chain.labels[i])
        else:
            key = tuple(labels)
            cost = graph.cut_cost(sides)
            best[key] = min(best.get(key, math.inf), cost)
    return best
