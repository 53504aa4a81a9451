"""JSON file formats for pseudotriangulations and embeddings."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geometry import Embedding
from .triangulation import (FaceGluing, Pseudotriangulation,
                            TriangulationError, derive_cells)

__all__ = ["FileFormatError", "read_triangulation", "write_triangulation",
           "read_embedding", "write_embedding"]


class FileFormatError(ValueError):
    pass


def read_triangulation(path) -> Pseudotriangulation:
    """Parse a triangulation file; the result always passes validation.

    The gluing list may carry each identification once or in both
    directions; vertices in the tetrahedron rows are indices into the
    ``vertices`` label list.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"cannot parse {path}: {exc}") from exc
    try:
        labels = [str(x) for x in doc["vertices"]]
        tets = [tuple(int(v) for v in row) for row in doc["tetrahedra"]]
        gluings = [(tuple(g["from"]), tuple(g["to"]), tuple(g["map"]))
                   for g in doc["gluings"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"malformed triangulation file: {exc}") from exc
    if len(set(labels)) != len(labels):
        raise FileFormatError("vertex labels are not unique")
    try:
        return derive_cells(tets, gluings, vertex_labels=labels)
    except TriangulationError as exc:
        raise FileFormatError(str(exc)) from exc


def write_triangulation(pt: Pseudotriangulation, path) -> None:
    """Write the canonical JSON form: gluings sorted, both directions."""
    gluings = sorted(
        ({"from": list(g.source), "to": list(g.target),
          "map": list(g.corner_map)} for g in pt.gluings),
        key=lambda g: g["from"])
    doc = {
        "vertices": list(pt.vertex_labels),
        "tetrahedra": [list(t.vertices) for t in pt.tetrahedra],
        "gluings": gluings,
    }
    Path(path).write_text(_dumps(doc) + "\n")


def read_embedding(path, pt: Pseudotriangulation) -> Embedding:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"cannot parse {path}: {exc}") from exc
    coords = doc.get("coords")
    if not isinstance(coords, dict):
        raise FileFormatError("embedding file needs a 'coords' object")
    pts = np.zeros((pt.vertex_count, 4))
    seen = set()
    for label, xyz in coords.items():
        if label not in pt.vertex_labels:
            raise FileFormatError(f"unknown vertex label {label!r}")
        v = pt.vertex_labels.index(label)
        if len(xyz) != 4:
            raise FileFormatError(f"vertex {label!r}: need 4 coordinates")
        pts[v] = [float(x) for x in xyz]
        seen.add(v)
    if len(seen) != pt.vertex_count:
        raise FileFormatError("embedding does not cover all vertices")
    return Embedding(pts)


def write_embedding(emb: Embedding, pt: Pseudotriangulation, path,
                    seed: int | None = None) -> None:
    doc = {"coords": {pt.vertex_labels[v]: list(map(float, emb.points[v]))
                      for v in range(pt.vertex_count)}}
    if seed is not None:
        doc["seed"] = int(seed)
    Path(path).write_text(_dumps(doc) + "\n")


def _dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True)
