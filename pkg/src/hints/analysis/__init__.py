"""Verification tools: exact minimizers, representability checks and scoring."""

from .milp import milp_minimize
from .oracle import DEFAULT_BUDGET, enumerate_minimum, exhaustive_minimize
from .representability import (
    ConstraintTable,
    RepresentabilityVerdict,
    Witness,
    check_representable,
    margin_constraint_table,
    star_constraint_table,
    witness_holds,
)
from .scoring import UNLABELED, ScoreReport, score

__all__ = [
    "DEFAULT_BUDGET",
    "ConstraintTable",
    "RepresentabilityVerdict",
    "ScoreReport",
    "UNLABELED",
    "Witness",
    "check_representable",
    "enumerate_minimum",
    "exhaustive_minimize",
    "margin_constraint_table",
    "milp_minimize",
    "score",
    "star_constraint_table",
    "witness_holds",
]
