import itertools
import math

import numpy as np
import pytest

from conftest import random_instance, random_tree
from hints.analysis.milp import milp_minimize
from hints.analysis.oracle import enumerate_minimum, exhaustive_minimize, space_size
from hints.energy import FORBIDDEN, Instance, evaluate
from hints.errors import BudgetExceeded, InfeasibleError
from hints.generate import nested_squares
from hints.tree import LabelTree, chain_tree


def test_dominant_data_term():
    inst = Instance(width=2, height=1, tree=chain_tree(2), data=[[0, 10], [0, 10]], lam=0.01)
    labeling, e = exhaustive_minimize(inst)
    assert labeling.tolist() == [0, 0] and e.total_finite == 0


def test_no_feasible_labeling():
    tree = LabelTree([None, 0, 0], [0, 1, 1])
    data = [[FORBIDDEN, 0, FORBIDDEN], [FORBIDDEN, FORBIDDEN, 0]]
    inst = Instance(width=2, height=1, tree=tree, data=data, margins=[0, 2, 2])
    with pytest.raises(InfeasibleError):
        exhaustive_minimize(inst)
    with pytest.raises(InfeasibleError):
        milp_minimize(inst)


def test_budget():
    inst = Instance(width=4, height=4, tree=chain_tree(4), data=np.zeros((16, 4)))
    with pytest.raises(BudgetExceeded):
        exhaustive_minimize(inst, budget=1000)
    assert enumerate_minimum(inst, [[0]] * 16, budget=1)[1] == 0


def _second_pass(inst):
    # independent oracle: plain product loop, evaluate() per labeling, first strict minimum wins
    best, best_f = math.inf, None
    for f in itertools.product(*[a.tolist() for a in inst.allowed]):
        e = evaluate(inst, f)
        if e.feasible and e.total_finite < best:
            best, best_f = e.total_finite, f
    return best_f, best


def test_double_enumeration(rng):
    for _ in range(6):
        tree = random_tree(rng, 4)
        inst = random_instance(rng, 3, 3, tree, margins=(0, 1.5), forbid=0.4)
        if space_size(inst.allowed) > 20000:
            continue
        f, e = exhaustive_minimize(inst)
        g, best = _second_pass(inst)
        assert e.total_finite == best
        assert tuple(f.tolist()) == g
        assert e.feasible


def test_full_random_3x3(rng):
    tree = random_tree(rng, 4)
    inst = random_instance(rng, 3, 3, tree, margins=(0, 1.5))
    f, e = exhaustive_minimize(inst)
    again = evaluate(inst, f)
    assert again.feasible and again.total_finite == e.total_finite
    g, best = _second_pass(inst)
    assert best == e.total_finite and tuple(f.tolist()) == g


def test_milp_agrees_with_enumeration(rng):
    for trial in range(25):
        tree = random_tree(rng, int(rng.integers(1, 6)))
        w, h = [(2, 2), (3, 2), (2, 3), (3, 1)][trial % 4]
        stars = {}
        if len(tree) > 1 and trial % 3 == 0:
            stars = {int(rng.integers(1, len(tree))): (0, 0)}
        inst = random_instance(rng, w, h, tree, margins=(0, 1.5, 2.0), forbid=0.1, stars=stars)
        _, exact = exhaustive_minimize(inst)
        _, mip = milp_minimize(inst)
        assert mip.feasible
        assert mip.total_finite == pytest.approx(exact.total_finite, abs=1e-7)


def test_nested_squares_optimum_below_trivial():
    inst = nested_squares(12, 12)
    _, e = milp_minimize(inst)
    assert e.feasible and e.total_finite < 0
