"""Command-line interface.

Exit status: 0 success, 1 usage error, 2 parse or validation error,
3 infeasible input, 4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import io
from .analysis.milp import milp_minimize
from .analysis.oracle import DEFAULT_BUDGET, exhaustive_minimize, space_size
from .analysis.representability import check_representable
from .analysis.scoring import score
from .energy import evaluate
from .errors import HintsError, ValidationError
from .generate import PRESETS, generate
from .optimize import Algorithm, Order, SolverConfig, init_trivial, solve

EXIT_USAGE = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_report(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def _emit_labels(args, inst, labeling) -> None:
    if args.out:
        io.write_label_map(args.out, labeling, inst.width, inst.height, inst.tree.names)
    if getattr(args, "palette", None):
        io.write_palette(args.palette, labeling, inst.width, inst.height)


def cmd_solve(args) -> int:
    inst = io.read_instance(args.instance)
    config = SolverConfig(
        algorithm=Algorithm(args.algo),
        order=Order(args.order),
        seed=args.seed,
        max_sweeps=args.max_sweeps,
        tol=args.tol,
    )
    t0 = time.perf_counter()
    report = solve(inst, init_trivial(inst), config, keep_labelings=True)
    elapsed = time.perf_counter() - t0
    _emit_labels(args, inst, report.labeling)
    names = inst.tree.names
    doc = {
        "instance": str(args.instance),
        "config": {
            "algorithm": config.algorithm.value,
            "order": config.order.value,
            "seed": config.seed,
            "max_sweeps": config.max_sweeps,
            "tol": config.tol,
        },
        "initial": report.initial.to_dict(),
        "final": report.final.to_dict(),
        "sweeps": report.sweeps,
        "moves_accepted": report.moves_accepted,
        "converged": report.converged,
        "seconds": elapsed,
        "trace": [
            {
                "sweep": t.sweep,
                "label": names[t.label],
                "accepted": t.accepted,
                "energy": t.energy,
                "candidate_energy": t.candidate_energy,
                "feasible": t.feasible,
                "seconds": t.seconds,
                **({"labeling": list(t.labeling)} if t.labeling is not None else {}),
            }
            for t in report.trace
        ],
        "labeling": report.labeling.tolist(),
    }
    if args.report:
        _write_report(args.report, doc)
    print(
        f"{config.algorithm.value}: energy {report.initial.total_finite:.12g} -> "
        f"{report.final.total_finite:.12g} in {report.sweeps} sweeps, "
        f"{report.moves_accepted} accepted moves"
    )
    return 0


def cmd_oracle(args) -> int:
    inst = io.read_instance(args.instance)
    method = args.method
    if method == "auto":
        method = "exhaustive" if space_size(inst.allowed) <= args.budget else "milp"
    t0 = time.perf_counter()
    if method == "exhaustive":
        labeling, e = exhaustive_minimize(inst, args.budget)
    else:
        labeling, e = milp_minimize(inst)
    elapsed = time.perf_counter() - t0
    _emit_labels(args, inst, labeling)
    if args.report:
        _write_report(
            args.report,
            {"instance": str(args.instance), "method": method, "seconds": elapsed,
             "final": e.to_dict(), "labeling": labeling.tolist()},
        )
    print(f"{method}: optimum energy {e.total_finite:.12g}")
    return 0


def cmd_energy(args) -> int:
    inst = io.read_instance(args.instance)
    labeling = io.labeling_for(inst, args.labels)
    e = evaluate(inst, labeling)
    for key, value in e.to_dict().items():
        print(f"{key}: {str(value).lower() if isinstance(value, bool) else value}")
    return 0


def cmd_check(args) -> int:
    tree = io.read_tree(args.tree)
    tables = io.read_constraints(args.constraints)
    ok = True
    for table in tables:
        verdict = check_representable(tree, table)
        if verdict.representable:
            print(f"{table.direction}: representable")
            continue
        ok = False
        w = verdict.witness.named(tree.names)
        print(
            f"{table.direction}: NOT representable; alpha={w['alpha']} gamma={w['gamma']} "
            f"beta={w['beta']}: [{w['a']},{w['d']}] prohibited while [{w['b']},{w['c']}] permissible"
        )
    print("representable" if ok else "NOT representable")
    return 0


def cmd_score(args) -> int:
    pred, pred_names = io.read_label_map(args.pred)
    truth, truth_names = io.read_label_map(args.truth)
    if pred.shape != truth.shape:
        raise ValidationError(f"dimension mismatch: {pred.shape} vs {truth.shape}")
    if pred_names and truth_names and pred_names != truth_names:
        raise ValidationError("label maps use different label names")
    names = truth_names or pred_names
    n = len(names) if names else None
    report = score(pred, truth, n)
    doc = report.to_dict(names)
    present = set(np.unique(truth).tolist()) | set(np.unique(pred[pred >= 0]).tolist())
    for i, (name, row) in enumerate(doc["per_label"].items()):
        # labels absent from both maps have no defined metrics to show
        if i not in present:
            continue
        print(f"{name}: precision {row['precision']:.6f} recall {row['recall']:.6f} f1 {row['f1']:.6f}")
    print(
        f"weighted: precision {report.weighted_precision:.6f} recall {report.weighted_recall:.6f} "
        f"f1 {report.weighted_f1:.6f}; unlabeled {report.unlabeled_fraction:.6f}"
    )
    return 0


def cmd_gen(args) -> int:
    if args.width < 1 or args.height < 1:
        raise ValidationError(f"grid size must be positive, got {args.width}x{args.height}")
    inst = generate(args.preset, args.width, args.height, args.labels, args.seed)
    io.write_instance(inst, args.out)
    print(f"wrote {args.preset} instance {args.width}x{args.height} to {args.out}")
    return 0


def cmd_fixtures(args) -> int:
    root = resources.files("hints") / "fixtures"
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            print(entry)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hints", description="Tree-structured segmentation energies with Path-Moves.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="minimize an instance from the all-root labeling")
    p.add_argument("--instance", required=True)
    p.add_argument("--algo", choices=[a.value for a in Algorithm], default=Algorithm.PATH_MOVES.value)
    p.add_argument("--order", choices=[o.value for o in Order], default=Order.FIXED_ASCENDING.value)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-sweeps", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.add_argument("--report")
    p.add_argument("--palette", help="also write a color PPM rendering")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exact minimum by enumeration or MILP")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=["auto", "exhaustive", "milp"], default="auto")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--out")
    p.add_argument("--report")
    p.add_argument("--palette")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("energy", help="evaluate a label map")
    p.add_argument("--instance", required=True)
    p.add_argument("--labels", required=True)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("check", help="Path-Move representability of constraint tables")
    p.add_argument("--tree", required=True)
    p.add_argument("--constraints", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("score", help="precision, recall and F1 of a label map")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("gen", help="write a synthetic instance")
    p.add_argument("--preset", choices=PRESETS, required=True)
    p.add_argument("--width", type=int, default=12)
    p.add_argument("--height", type=int, default=12)
    p.add_argument("--labels", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("fixtures", help="list the shipped fixture files")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HintsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for line in getattr(exc, "diagnostics", [])[1:]:
            print(f"  {line}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
