"""Seeded synthetic datasets: gaussian mixtures, random graphs, random set systems."""
from __future__ import annotations

import numpy as np

from ..core import PreconditionError
from ..objectives import GraphDataset, SetSystemDataset, VectorDataset

KINDS = ("gaussian_mixture", "random_graph", "random_sets")
DEFAULTS = {
    "gaussian_mixture": {"c": 10, "n": 1000, "d": 16, "spread": 1.0, "center_scale": 3.0},
    "random_graph": {"n": 500, "p": 0.02, "wmin": 1.0, "wmax": 1.0, "directed": 0},
    "random_sets": {"n": 200, "universe": 500, "density": 0.02},
}


def parse_params(text: str) -> dict:
    """``"k=v,k=v"`` into a dict of numbers."""
    out = {}
    for part in filter(None, (p.strip() for p in (text or "").split(","))):
        key, sep, val = part.partition("=")
        if not sep:
            raise PreconditionError(f"parameter {part!r} is not key=value")
        try:
            out[key.strip()] = int(val)
        except ValueError:
            try:
                out[key.strip()] = float(val)
            except ValueError:
                raise PreconditionError(f"parameter {key} has non-numeric value {val!r}") from None
    return out


def gen_synthetic(kind: str, params: dict | None = None, seed: int = 0):
    if kind not in KINDS:
        raise PreconditionError(f"unknown generator {kind!r}; choose from {', '.join(KINDS)}")
    p = dict(DEFAULTS[kind])
    unknown = set(params or {}) - set(p)
    if unknown:
        raise PreconditionError(f"unknown {kind} parameters: {', '.join(sorted(unknown))}")
    p.update(params or {})
    rng = np.random.default_rng(seed)
    if kind == "gaussian_mixture":
        c, n, d = int(p["c"]), int(p["n"]), int(p["d"])
        if c < 1 or n < 1 or d < 1 or p["spread"] < 0:
            raise PreconditionError("gaussian_mixture needs c, n, d >= 1 and spread >= 0")
        centers = rng.normal(scale=p["center_scale"], size=(c, d))
        labels = rng.integers(c, size=n)
        return VectorDataset(centers[labels] + rng.normal(scale=p["spread"], size=(n, d)))
    if kind == "random_graph":
        n, prob = int(p["n"]), float(p["p"])
        if n < 2 or not 0 <= prob <= 1 or not 0 <= p["wmin"] <= p["wmax"]:
            raise PreconditionError("random_graph needs n >= 2, 0 <= p <= 1, 0 <= wmin <= wmax")
        iu, ju = (np.nonzero(~np.eye(n, dtype=bool)) if p["directed"]
                  else np.triu_indices(n, 1))
        keep = rng.random(iu.size) < prob
        src, dst = iu[keep], ju[keep]
        w = rng.uniform(p["wmin"], p["wmax"], size=src.size) if p["wmax"] > p["wmin"] \
            else np.full(src.size, float(p["wmin"]))
        g = GraphDataset(n, src, dst, w)
        return g if p["directed"] else g.symmetrized()
    n, universe, density = int(p["n"]), int(p["universe"]), float(p["density"])
    if n < 1 or universe < 1 or not 0 <= density <= 1:
        raise PreconditionError("random_sets needs n, universe >= 1 and 0 <= density <= 1")
    member = rng.random((n, universe)) < density
    orphan = np.nonzero(~member.any(axis=0))[0]
    member[rng.integers(n, size=orphan.size), orphan] = True
    rows, cols = np.nonzero(member)
    indptr = np.concatenate([[0], np.cumsum(member.sum(axis=1))])
    return SetSystemDataset(indptr, cols, universe)
