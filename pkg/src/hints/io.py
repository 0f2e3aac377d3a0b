"""File formats: instance JSON, label-map PGM, tree and constraint files.

Instance document (JSON)::

    {
      "width": 4, "height": 3, "neighborhood": "N4",
      "labels": ["R", "A", "B"],
      "tree": {"R": {"parent": null, "weight": 0.0},
               "A": {"parent": "R", "weight": 1.0}, ...},
      "lambda": 1.0,
      "data": {"R": [...width*height costs, row-major...], ...},
      "contrast": [[[x1, y1], [x2, y2], s], ...],
      "margins": {"B": 2.0},
      "stars": {"B": [1, 1]}
    }

A data entry may be the string ``"forbid"``.  ``contrast``, ``margins`` and
``stars`` are optional.  Label maps are binary PGM files holding label ids,
with an optional ``<file>.labels`` sidecar of ``id name`` lines; the value
255 marks an unlabeled pixel.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
from PIL import Image

from .analysis.representability import ConstraintTable
from .analysis.scoring import UNLABELED
from .energy import FORBIDDEN, N4, N8, Instance, validate
from .errors import HintsError, ValidationError
from .tree import LabelTree

FORBID_TOKEN = "forbid"
PGM_UNLABELED = 255

PALETTE = np.array(
    [
        (0, 0, 0), (230, 25, 75), (60, 180, 75), (255, 225, 25), (0, 130, 200),
        (245, 130, 48), (145, 30, 180), (70, 240, 240), (240, 50, 230), (210, 245, 60),
        (250, 190, 212), (0, 128, 128), (220, 190, 255), (170, 110, 40), (255, 250, 200),
        (128, 0, 0), (170, 255, 195), (128, 128, 0), (255, 215, 180), (0, 0, 128),
    ],
    dtype=np.uint8,
)


def _load_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from exc


def _dump_json(obj, path) -> None:
    # one top-level field per line keeps large cost arrays diffable
    body = ",\n".join(
        f" {json.dumps(k)}: {json.dumps(v, allow_nan=False)}" for k, v in obj.items()
    )
    Path(path).write_text("{\n" + body + "\n}\n", encoding="utf-8")


# trees


def tree_from_dict(labels: Sequence[str], spec: dict) -> LabelTree:
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise ValidationError("'labels' must be a list of names")
    if not isinstance(spec, dict):
        raise ValidationError("'tree' must map label names to {parent, weight}")
    unknown = sorted(set(spec) - set(labels))
    if unknown:
        raise ValidationError(f"tree mentions unknown labels {unknown}")
    parent, weight = [], []
    for name in labels:
        entry = spec.get(name)
        if not isinstance(entry, dict) or "parent" not in entry:
            raise ValidationError(f"tree entry for {name!r} needs a 'parent' field")
        p = entry["parent"]
        if p is not None and p not in labels:
            raise ValidationError(f"label {name!r} has unknown parent {p!r}")
        parent.append(None if p is None else labels.index(p))
        w = entry.get("weight", 0.0 if p is None else None)
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            raise ValidationError(f"edge weight of {name!r} must be a number")
        weight.append(float(w))
    return LabelTree(parent, weight, labels)


def tree_to_dict(tree: LabelTree) -> dict:
    return {
        "labels": list(tree.names),
        "tree": {
            tree.names[i]: {
                "parent": None if tree.parent[i] is None else tree.names[tree.parent[i]],
                "weight": tree.weight[i],
            }
            for i in tree.labels
        },
    }


def read_tree(path) -> LabelTree:
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return tree_from_dict(doc.get("labels"), doc.get("tree"))


def write_tree(tree: LabelTree, path) -> None:
    _dump_json(tree_to_dict(tree), path)


# instances


def _cost(v, where: str, diagnostics: list[str]) -> float:
    if v == FORBID_TOKEN:
        return FORBIDDEN
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        diagnostics.append(f"{where}: data cost must be a finite number or 'forbid', got {v!r}")
        return 0.0
    return float(v)


def instance_from_dict(doc: dict) -> Instance:
    """Parse an instance document; raises ValidationError carrying every finding."""
    if not isinstance(doc, dict):
        raise ValidationError("instance document must be a JSON object")
    missing = [k for k in ("width", "height", "labels", "tree", "data") if k not in doc]
    if missing:
        raise ValidationError(f"instance is missing fields {missing}", [f"missing field {k!r}" for k in missing])
    width, height = doc["width"], doc["height"]
    if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in (width, height)):
        raise ValidationError(f"width and height must be positive integers, got {width}, {height}")
    labels = doc["labels"]
    tree = tree_from_dict(labels, doc["tree"])
    names = list(tree.names)
    n = width * height
    diagnostics: list[str] = []

    data = np.zeros((n, len(names)))
    rows = doc["data"]
    if not isinstance(rows, dict):
        raise ValidationError("'data' must map label names to cost arrays")
    for name in sorted(set(rows) - set(names)):
        diagnostics.append(f"data given for unknown label {name!r}")
    for l, name in enumerate(names):
        row = rows.get(name)
        if row is None:
            diagnostics.append(f"no data costs for label {name!r}")
            continue
        if isinstance(row, list) and len(row) == height and all(isinstance(r, list) for r in row):
            row = [v for r in row for v in r]
        if not isinstance(row, list) or len(row) != n:
            diagnostics.append(f"data of {name!r} must hold {n} entries")
            continue
        data[:, l] = [_cost(v, f"data[{name!r}][{p}]", diagnostics) for p, v in enumerate(row)]

    lam = doc.get("lambda", 1.0)
    if isinstance(lam, bool) or not isinstance(lam, (int, float)):
        diagnostics.append(f"lambda must be a number, got {lam!r}")
        lam = 0.0

    def label_id(name, field_name):
        if name not in names:
            diagnostics.append(f"{field_name} given for unknown label {name!r}")
            return None
        return names.index(name)

    margins = np.zeros(len(names))
    for name, d in (doc.get("margins") or {}).items():
        l = label_id(name, "margin")
        if l is None:
            continue
        if isinstance(d, bool) or not isinstance(d, (int, float)):
            diagnostics.append(f"margin of {name!r} must be a number, got {d!r}")
            continue
        margins[l] = d

    stars = {}
    for name, c in (doc.get("stars") or {}).items():
        l = label_id(name, "star center")
        if l is None:
            continue
        if not (isinstance(c, list) and len(c) == 2 and all(isinstance(v, int) for v in c)):
            diagnostics.append(f"star center of {name!r} must be [x, y] integers, got {c!r}")
            continue
        stars[l] = (c[0], c[1])

    contrast = {}
    for entry in doc.get("contrast") or []:
        try:
            (x1, y1), (x2, y2), s = entry
            p, q = y1 * width + x1, y2 * width + x2
            if not (0 <= x1 < width and 0 <= x2 < width and 0 <= y1 < height and 0 <= y2 < height):
                raise ValueError
            contrast[min(p, q), max(p, q)] = float(s)
        except (TypeError, ValueError):
            diagnostics.append(f"malformed contrast entry {entry!r}")

    neighborhood = doc.get("neighborhood", N4)
    inst = Instance(
        width=width,
        height=height,
        tree=tree,
        data=data,
        lam=float(lam),
        neighborhood=neighborhood,
        contrast=contrast,
        margins=margins,
        stars=stars,
    )
    diagnostics += validate(inst)
    if diagnostics:
        raise ValidationError(f"invalid instance: {diagnostics[0]}", diagnostics)
    return inst


def _number(v: float):
    return int(v) if float(v).is_integer() and abs(v) < 2**53 else float(v)


def instance_to_dict(inst: Instance) -> dict:
    names = inst.tree.names
    doc = {
        "width": inst.width,
        "height": inst.height,
        "neighborhood": inst.neighborhood,
    }
    doc.update(tree_to_dict(inst.tree))
    doc["lambda"] = inst.lam
    doc["data"] = {
        names[l]: [FORBID_TOKEN if not math.isfinite(v) else _number(v) for v in inst.data[:, l].tolist()]
        for l in inst.tree.labels
    }
    doc["contrast"] = [
        [list(inst.coords(p)), list(inst.coords(q)), s] for (p, q), s in sorted(inst.contrast.items())
    ]
    doc["margins"] = {names[l]: float(d) for l, d in enumerate(inst.margins.tolist()) if d != 0}
    doc["stars"] = {names[l]: list(c) for l, c in sorted(inst.stars.items())}
    return doc


def read_instance(path) -> Instance:
    return instance_from_dict(_load_json(path))


def write_instance(inst: Instance, path) -> None:
    _dump_json(instance_to_dict(inst), path)


def instances_equal(a: Instance, b: Instance) -> bool:
    return instance_to_dict(a) == instance_to_dict(b)


# label maps


def write_label_map(path, labeling, width: int, height: int, names: Optional[Sequence[str]] = None) -> None:
    """Write ids (``UNLABELED`` becomes 255) as binary PGM, plus the name sidecar."""
    f = np.asarray(labeling, dtype=np.int64).reshape(height, width)
    if f.size and (f.max() >= PGM_UNLABELED or f.min() < UNLABELED):
        raise ValidationError("label ids must lie in 0..254 for PGM output")
    pixels = np.where(f == UNLABELED, PGM_UNLABELED, f).astype(np.uint8)
    Image.fromarray(pixels, mode="L").save(path, format="PPM")
    if names is not None:
        sidecar = "".join(f"{i} {name}\n" for i, name in enumerate(names))
        Path(str(path) + ".labels").write_text(sidecar, encoding="utf-8")


def read_label_map(path) -> tuple[np.ndarray, Optional[list[str]]]:
    """Return the ``(height, width)`` id array (255 read back as ``UNLABELED``) and sidecar names."""
    try:
        with Image.open(path) as img:
            if img.format != "PPM" or img.mode != "L":
                raise ValidationError(f"{path}: expected an 8-bit binary PGM label map")
            pixels = np.array(img, dtype=np.int64)
    except OSError as exc:
        raise ValidationError(f"cannot read label map {path}: {exc}") from exc
    labels = np.where(pixels == PGM_UNLABELED, UNLABELED, pixels)
    sidecar = Path(str(path) + ".labels")
    names = None
    if sidecar.exists():
        entries = {}
        for line in sidecar.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            key, _, name = line.strip().partition(" ")
            try:
                entries[int(key)] = name
            except ValueError as exc:
                raise ValidationError(f"{sidecar}: malformed line {line!r}") from exc
        if sorted(entries) != list(range(len(entries))):
            raise ValidationError(f"{sidecar}: ids must be 0..{len(entries) - 1}")
        names = [entries[i] for i in range(len(entries))]
    return labels, names


def labeling_for(inst: Instance, path) -> np.ndarray:
    """Read a label map and check it against an instance (size, ids, names)."""
    labels, names = read_label_map(path)
    if labels.shape != (inst.height, inst.width):
        raise ValidationError(
            f"label map is {labels.shape[1]}x{labels.shape[0]}, instance is {inst.width}x{inst.height}"
        )
    if names is not None and list(names) != list(inst.tree.names):
        raise ValidationError(f"label map names {names} differ from instance labels {list(inst.tree.names)}")
    if (labels < 0).any() or (labels >= inst.n_labels).any():
        raise ValidationError(f"label map holds ids outside 0..{inst.n_labels - 1}")
    return labels.reshape(-1)


def write_palette(path, labeling, width: int, height: int) -> None:
    """Color rendering of a label map as binary PPM (unlabeled pixels white)."""
    f = np.asarray(labeling, dtype=np.int64).reshape(height, width)
    rgb = PALETTE[np.where(f < 0, 0, f) % len(PALETTE)]
    rgb[f < 0] = 255
    Image.fromarray(rgb, mode="RGB").save(path, format="PPM")


# constraint tables


def read_constraints(path) -> list[ConstraintTable]:
    """Constraint fixture: ``{labels, unassignable?, tables: [{direction, prohibited: [[x, y], ...]}]}``."""
    doc = _load_json(path)
    try:
        labels = list(doc["labels"])
        tables = doc["tables"]
    except (TypeError, KeyError) as exc:
        raise ValidationError(f"{path}: constraint file needs 'labels' and 'tables'") from exc
    unassignable = doc.get("unassignable", [])
    for name in unassignable:
        if name not in labels:
            raise ValidationError(f"{path}: unknown unassignable label {name!r}")
    out = []
    for entry in tables:
        pairs = entry.get("prohibited", [])
        for pair in pairs:
            if not (isinstance(pair, list) and len(pair) == 2 and all(x in labels for x in pair)):
                raise ValidationError(f"{path}: malformed prohibited pair {pair!r}")
        out.append(
            ConstraintTable.from_pairs(
                labels,
                [tuple(p) for p in pairs],
                direction=str(entry.get("direction", "any")),
                unassignable=frozenset(labels.index(x) for x in unassignable),
            )
        )
    if not out:
        raise ValidationError(f"{path}: no tables")
    return out


def write_constraints(tables: Sequence[ConstraintTable], path) -> None:
    if not tables:
        raise HintsError("no tables to write")
    labels = list(tables[0].labels)
    doc = {
        "labels": labels,
        "unassignable": [labels[i] for i in sorted(tables[0].unassignable)],
        "tables": [
            {
                "direction": t.direction,
                "prohibited": [[labels[x], labels[y]] for x, y in zip(*np.nonzero(t.prohibited))],
            }
            for t in tables
        ],
    }
    _dump_json(doc, path)


__all__ = [
    "FORBID_TOKEN",
    "N4",
    "N8",
    "PGM_UNLABELED",
    "instance_from_dict",
    "instance_to_dict",
    "instances_equal",
    "labeling_for",
    "read_constraints",
    "read_instance",
    "read_label_map",
    "read_tree",
    "tree_from_dict",
    "tree_to_dict",
    "write_constraints",
    "write_instance",
    "write_label_map",
    "write_palette",
    "write_tree",
]
