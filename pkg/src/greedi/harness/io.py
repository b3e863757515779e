"""Readers and writers for vector, graph and set-system files."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..core import PreconditionError
from ..objectives import GraphDataset, SetSystemDataset, VectorDataset

VECTOR_FORMATS = ("csv", "binary-f32")


class ParseError(PreconditionError):
    """Malformed input file; the message names the offending line."""


def _lines(path):
    p = Path(path)
    if not p.is_file():
        raise ParseError(f"{path}: no such file")
    return p.read_text().splitlines()


def load_vectors(path, format: str = "csv", normalize: bool = False) -> VectorDataset:
    """One point per row.  ``binary-f32`` uses records of an int32 dimension
    followed by that many little-endian float32 values."""
    if format not in VECTOR_FORMATS:
        raise ParseError(f"unknown vector format {format!r}; choose csv or binary-f32")
    if format == "csv":
        rows, width = [], None
        for lineno, line in enumerate(_lines(path), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                vals = [float(x) for x in line.split(",")]
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric field") from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(f"{path}:{lineno}: expected {width} fields, got {len(vals)}")
            if not all(math.isfinite(v) for v in vals):
                raise ParseError(f"{path}:{lineno}: non-finite value")
            rows.append(vals)
        if not rows:
            raise ParseError(f"{path}: no data rows")
        X = np.array(rows, dtype=np.float64)
    else:
        raw = Path(path).read_bytes() if Path(path).is_file() else None
        if raw is None:
            raise ParseError(f"{path}: no such file")
        rows, pos, rec = [], 0, 0
        while pos < len(raw):
            rec += 1
            if pos + 4 > len(raw):
                raise ParseError(f"{path}: record {rec}: truncated header")
            d = int(np.frombuffer(raw, "<i4", 1, pos)[0])
            if d <= 0 or pos + 4 + 4 * d > len(raw):
                raise ParseError(f"{path}: record {rec}: bad dimension {d} or truncated body")
            if rows and d != rows[0].size:
                raise ParseError(f"{path}: record {rec}: dimension {d} differs from {rows[0].size}")
            v = np.frombuffer(raw, "<f4", d, pos + 4).astype(np.float64)
            if not np.all(np.isfinite(v)):
                raise ParseError(f"{path}: record {rec}: non-finite value")
            rows.append(v)
            pos += 4 + 4 * d
        if not rows:
            raise ParseError(f"{path}: no data records")
        X = np.vstack(rows)
    ds = VectorDataset(X)
    return ds.normalize() if normalize else ds


def save_vectors(ds, path, format: str = "csv"):
    X = ds.points if isinstance(ds, VectorDataset) else np.asarray(ds, dtype=np.float64)
    if format == "csv":
        Path(path).write_text("".join(",".join(repr(float(v)) for v in row) + "\n" for row in X))
    elif format == "binary-f32":
        with open(path, "wb") as fh:
            for row in X:
                fh.write(np.int32(row.size).astype("<i4").tobytes())
                fh.write(row.astype("<f4").tobytes())
    else:
        raise ParseError(f"unknown vector format {format!r}")


def load_graph(path, undirected: bool = False) -> GraphDataset:
    """Edge list ``u v [w]`` (default weight 1); node labels are re-indexed in
    first-seen order and kept in ``labels``."""
    ids: dict = {}
    src, dst, w = [], [], []
    for lineno, line in enumerate(_lines(path), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if len(parts) not in (2, 3):
            raise ParseError(f"{path}:{lineno}: expected 'u v [w]'")
        try:
            wt = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-numeric weight") from None
        if not math.isfinite(wt) or wt < 0:
            raise ParseError(f"{path}:{lineno}: weight must be finite and nonnegative")
        if parts[0] == parts[1]:
            raise ParseError(f"{path}:{lineno}: self-loop on node {parts[0]}")
        u = ids.setdefault(parts[0], len(ids))
        v = ids.setdefault(parts[1], len(ids))
        src.append(u)
        dst.append(v)
        w.append(wt)
    if not ids:
        raise ParseError(f"{path}: no edges")
    g = GraphDataset(len(ids), np.array(src), np.array(dst), np.array(w), tuple(ids))
    return g.symmetrized() if undirected else g


def save_graph(g: GraphDataset, path):
    Path(path).write_text("".join(f"{u} {v} {w!r}\n" for u, v, w in
                                  zip(g.src.tolist(), g.dst.tolist(), g.weight.tolist())))


def load_sets(path) -> SetSystemDataset:
    """One candidate set per non-blank line; ``labels`` holds the line numbers."""
    sets, labels = [], []
    for lineno, line in enumerate(_lines(path), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        sets.append(parts)
        labels.append(lineno)
    if not sets:
        raise ParseError(f"{path}: no sets")
    return SetSystemDataset.from_sets(sets, tuple(labels))


def save_sets(ss: SetSystemDataset, path):
    Path(path).write_text("".join(" ".join(map(str, ss.members(e).tolist())) + "\n"
                                  for e in range(ss.n)))
