"""Tree-structured multi-label segmentation energies solved with Path-Moves."""

from .energy import FORBIDDEN, EnergyBreakdown, Instance, evaluate, validate
from .errors import (
    BudgetExceeded,
    HintsError,
    InfeasibleError,
    NoFiniteCut,
    NonSubmodularError,
    ValidationError,
)
from .moves import build_move_graph, decode, path_move
from .optimize import Algorithm, Order, SolverConfig, SolveReport, binary_expansion_move, init_trivial, solve
from .tree import LabelTree, build_tree

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "BudgetExceeded",
    "EnergyBreakdown",
    "FORBIDDEN",
    "HintsError",
    "InfeasibleError",
    "Instance",
    "LabelTree",
    "NoFiniteCut",
    "NonSubmodularError",
    "Order",
    "SolveReport",
    "SolverConfig",
    "ValidationError",
    "binary_expansion_move",
    "build_move_graph",
    "build_tree",
    "decode",
    "evaluate",
    "init_trivial",
    "path_move",
    "solve",
    "validate",
]
