import itertools

import numpy as np
import pytest

from conftest import brute_energy, random_feasible_labeling, random_instance, random_tree
from hints.analysis.oracle import exhaustive_minimize
from hints.energy import Instance, evaluate
from hints.errors import InfeasibleError, ValidationError
from hints.generate import nested_squares
from hints.moves import path_move
from hints.optimize import Algorithm, Order, SolverConfig, binary_expansion_move, init_trivial, solve
from hints.tree import LabelTree, chain_tree

PM = SolverConfig(Algorithm.PATH_MOVES)
AEXP = SolverConfig(Algorithm.BINARY_EXPANSION)


def test_config_validation():
    with pytest.raises(ValidationError):
        SolverConfig(max_sweeps=0)
    with pytest.raises(ValidationError):
        SolverConfig(tol=-1)


def test_init_trivial(tree6, rng):
    inst = random_instance(rng, 3, 3, tree6, margins=(0, 2.0))
    f = init_trivial(inst)
    assert (f == tree6.root).all()
    assert evaluate(inst, f).feasible
    single = Instance(width=2, height=2, tree=LabelTree([None], [0.0]), data=np.zeros((4, 1)))
    assert init_trivial(single).tolist() == [0, 0, 0, 0]


def test_root_favoring_data_converges_immediately(tree6):
    data = np.ones((9, 6))
    data[:, 0] = 0
    inst = Instance(width=3, height=3, tree=tree6, data=data)
    report = solve(inst, init_trivial(inst))
    assert report.sweeps == 1 and report.converged and report.moves_accepted == 0
    assert report.final.total_finite == 0


def test_infeasible_init(tree6):
    margins = np.zeros(6)
    margins[2] = 2
    inst = Instance(width=2, height=1, tree=tree6, data=np.zeros((2, 6)), margins=margins)
    with pytest.raises(InfeasibleError):
        solve(inst, [2, 3])
    with pytest.raises(InfeasibleError):
        binary_expansion_move(inst, [2, 3], 0)


def test_binary_move_identity(tree6, rng):
    inst = random_instance(rng, 3, 2, tree6)
    f = init_trivial(inst)
    assert (binary_expansion_move(inst, f, 0) == f).all()


def test_binary_move_matches_brute_force(rng):
    for _ in range(80):
        tree = random_tree(rng, int(rng.integers(2, 6)))
        w, h = [(2, 1), (1, 2), (2, 2), (3, 1)][int(rng.integers(0, 4))]
        inst = random_instance(rng, w, h, tree, margins=(0, 1.5), forbid=0.1)
        f = random_feasible_labeling(rng, inst)
        alpha = int(rng.integers(0, len(tree)))
        result = binary_expansion_move(inst, f, alpha)
        e = evaluate(inst, result)
        assert e.feasible
        best = min(
            total
            for g in itertools.product(*[(int(x), alpha) for x in f])
            for total, ok in [brute_energy(inst, g)]
            if ok
        )
        assert e.total_finite == pytest.approx(best, abs=1e-9)


def test_dominance_over_binary(rng):
    for _ in range(60):
        tree = random_tree(rng, int(rng.integers(2, 7)))
        inst = random_instance(rng, 3, 2, tree, margins=(0, 1.5, 2.0), forbid=0.1)
        f = random_feasible_labeling(rng, inst)
        alpha = int(rng.integers(0, len(tree)))
        pm = evaluate(inst, path_move(inst, f, alpha)).total_finite
        ab = evaluate(inst, binary_expansion_move(inst, f, alpha)).total_finite
        assert pm <= ab + 1e-9


def test_trace_monotone_and_feasible(rng):
    for trial in range(20):
        tree = random_tree(rng, int(rng.integers(2, 7)))
        inst = random_instance(rng, 4, 3, tree, margins=(0, 1.5, 2.0))
        config = SolverConfig(Algorithm.PATH_MOVES if trial % 2 else Algorithm.BINARY_EXPANSION,
                              Order.SHUFFLED, seed=trial)
        report = solve(inst, init_trivial(inst), config, keep_labelings=True)
        previous = report.initial.total_finite
        for t in report.trace:
            assert t.energy <= previous
            if t.accepted:
                assert t.energy < previous - config.tol
                assert evaluate(inst, t.labeling).feasible
                assert evaluate(inst, t.labeling).total_finite == pytest.approx(t.energy)
            else:
                assert t.energy == previous
            previous = t.energy
        assert report.final.feasible


def test_determinism(rng):
    inst = random_instance(rng, 4, 4, random_tree(rng, 6), margins=(0, 1.5))
    config = SolverConfig(order=Order.SHUFFLED, seed=5)
    a = solve(inst, init_trivial(inst), config)
    b = solve(inst, init_trivial(inst), config)
    assert [(t.label, t.accepted, t.energy) for t in a.trace] == [(t.label, t.accepted, t.energy) for t in b.trace]
    assert (a.labeling == b.labeling).all()


def test_chain_tree_one_move_optimal(rng):
    for n in (3, 4, 5):
        for _ in range(4):
            tree = chain_tree(n, weight=float(rng.uniform(0.5, 2)))
            inst = random_instance(rng, 3, 3, tree, margins=(0.0,))
            result = path_move(inst, init_trivial(inst), n - 1)
            _, best = exhaustive_minimize(inst)
            assert evaluate(inst, result).total_finite == pytest.approx(best.total_finite, abs=1e-9)


def test_nested_squares_blocks_binary_expansion():
    inst = nested_squares(12, 12)
    start = evaluate(inst, init_trivial(inst)).total_finite
    ab = solve(inst, init_trivial(inst), AEXP)
    pm = solve(inst, init_trivial(inst), PM)
    assert ab.final.total_finite == start and ab.moves_accepted == 0
    assert pm.final.total_finite < start
    c = inst.tree.index("C")
    assert (binary_expansion_move(inst, init_trivial(inst), c) == init_trivial(inst)).all()
