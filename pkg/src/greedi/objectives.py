"""Concrete submodular objectives and the datasets they are built from."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse

from .core import (NumericalError, Objective, PreconditionError, State, as_ids)

JITTER = 1e-10
# Largest dissimilarity / kernel matrix materialized up front (entries).
DENSE_LIMIT = 130_000_000
_CHUNK = 256


# --------------------------------------------------------------------------- data
@dataclass(frozen=True)
class VectorDataset:
    points: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise PreconditionError("points must be a non-empty 2-D array")
        if not np.all(np.isfinite(pts)):
            raise PreconditionError("points contain non-finite values")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def normalize(self) -> "VectorDataset":
        """Subtract the mean vector, then scale every row to unit Euclidean norm."""
        centered = self.points - self.points.mean(axis=0)
        norms = np.linalg.norm(centered, axis=1)
        bad = np.nonzero(norms == 0)[0]
        if bad.size:
            raise PreconditionError(f"row {bad[0]} is zero after mean subtraction; cannot normalize")
        return VectorDataset(centered / norms[:, None])


@dataclass(frozen=True)
class SEKernel:
    """Squared exponential kernel ``exp(-||x - y||^2 / h^2)`` with noise std ``sigma``."""
    h: float = 0.75
    sigma: float = 1.0

    def __post_init__(self):
        if not (self.h > 0 and self.sigma > 0):
            raise PreconditionError(f"SE kernel needs h > 0 and sigma > 0, got {self.h}, {self.sigma}")

    def __call__(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        sq = _sq_dists(np.atleast_2d(A), np.atleast_2d(B))
        return np.exp(-sq / self.h ** 2)

    @property
    def lipschitz_constant(self) -> float:
        # max_r |d/dr exp(-r^2/h^2)| = sqrt(2) / (h * e^{1/2}), attained at r = h / sqrt(2)
        return math.sqrt(2.0) / (self.h * math.exp(0.5))


@dataclass(frozen=True)
class GraphDataset:
    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        w = np.asarray(self.weight, dtype=np.float64)
        if not (src.shape == dst.shape == w.shape) or src.ndim != 1:
            raise PreconditionError("src, dst and weight must be equal-length 1-D arrays")
        if self.n < 1:
            raise PreconditionError("graph needs at least one node")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= self.n):
            raise PreconditionError("arc endpoint outside [0, n)")
        if np.any(src == dst):
            raise PreconditionError("self-loops are not allowed")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise PreconditionError("arc weights must be finite and nonnegative")
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "weight", w)

    @property
    def n_arcs(self) -> int:
        return self.src.size

    def symmetrized(self) -> "GraphDataset":
        return GraphDataset(self.n, np.concatenate([self.src, self.dst]),
                            np.concatenate([self.dst, self.src]),
                            np.concatenate([self.weight, self.weight]), self.labels)

    def induced(self, D) -> "GraphDataset":
        """Keep only arcs with both endpoints in ``D``; node ids are unchanged."""
        inside = np.zeros(self.n, dtype=bool)
        inside[as_ids(D, self.n)] = True
        keep = inside[self.src] & inside[self.dst]
        return GraphDataset(self.n, self.src[keep], self.dst[keep], self.weight[keep], self.labels)


@dataclass(frozen=True)
class SetSystemDataset:
    """``n`` candidate sets over items ``0 .. n_items-1`` (CSR layout)."""
    indptr: np.ndarray
    items: np.ndarray
    n_items: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        indptr = np.asarray(self.indptr, dtype=np.int64)
        items = np.asarray(self.items, dtype=np.int64)
        if indptr.ndim != 1 or indptr.size < 2 or indptr[0] != 0 or indptr[-1] != items.size \
                or np.any(np.diff(indptr) < 0):
            raise PreconditionError("malformed set-system index pointer")
        if items.size and (items.min() < 0 or items.max() >= self.n_items):
            raise PreconditionError("item id outside universe")
        seen = np.zeros(self.n_items, dtype=bool)
        seen[items] = True
        if not seen.all():
            raise PreconditionError(f"item {int(np.argmin(seen))} appears in no candidate set")
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "items", items)

    @classmethod
    def from_sets(cls, sets: Sequence[Sequence[int]], labels=None) -> "SetSystemDataset":
        """Build from raw item ids; ids are re-indexed densely in first-seen order."""
        remap: dict = {}
        indptr, items = [0], []
        for s in sets:
            for it in dict.fromkeys(s):
                items.append(remap.setdefault(it, len(remap)))
            indptr.append(len(items))
        return cls(np.array(indptr), np.array(items, dtype=np.int64), len(remap), labels)

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    def members(self, e: int) -> np.ndarray:
        return self.items[self.indptr[e]:self.indptr[e + 1]]


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * (A @ B.T)
    np.maximum(sq, 0.0, out=sq)
    return sq


def _as_points(data) -> np.ndarray:
    return data.points if isinstance(data, VectorDataset) else VectorDataset(data).points


# ------------------------------------------------------------------ exemplar
class ExemplarObjective(Objective):
    """Phantom-exemplar clustering utility ``L({e0}) - L(S + {e0})``.

    ``L(S)`` is the mean over evaluation points ``v`` of ``min_{e in S} l(e, v)``
    with ``l = ||x_e - x_v||^alpha_exp``; the phantom ``e0`` sits at constant
    dissimilarity ``phantom_cost`` from every point.  With ``normalized=True``
    values are divided by ``phantom_cost`` so every per-point component lies in
    ``[0, 1]``.

    The full ``n x n`` dissimilarity matrix is materialized when it fits under
    ``DENSE_LIMIT``; restricted views share it.
    """

    monotone = True
    nonnegative = True
    decomposable = True
    payload_kind = "vectors"

    def __init__(self, data, alpha_exp: float = 2.0, phantom_cost: Optional[float] = None,
                 normalized: bool = False, eval_idx=None, _shared=None):
        X = _as_points(data)
        super().__init__(X.shape[0])
        if alpha_exp < 1:
            raise PreconditionError(f"alpha_exp must be >= 1, got {alpha_exp}")
        self.points = X
        self.alpha_exp = float(alpha_exp)
        self.normalized = bool(normalized)
        if _shared is None:
            D = self._dense() if self.n * self.n <= DENSE_LIMIT else None
            max_l = float(D.max()) if D is not None else self._max_dissimilarity()
            _shared = {"D": D, "max_l": max_l}
        self._shared = _shared
        self._D = _shared["D"]
        max_l = _shared["max_l"]
        if phantom_cost is None:
            phantom_cost = max_l * 1.01 if max_l > 0 else 1.0
        if phantom_cost < max_l:
            raise PreconditionError(
                f"phantom cost {phantom_cost} below max pairwise dissimilarity {max_l}")
        self.phantom_cost = float(phantom_cost)
        if eval_idx is None:
            self.eval_idx = np.arange(self.n)
            self._full_eval = True
        else:
            self.eval_idx = as_ids(eval_idx, self.n)
            if self.eval_idx.size == 0:
                raise PreconditionError("evaluation scope D must be nonempty")
            self._full_eval = False
        self._scale = 1.0 / self.phantom_cost if self.normalized else 1.0

    def _dissim(self, sq):
        if self.alpha_exp == 2.0:
            return sq
        return sq ** (self.alpha_exp / 2.0)

    def _dense(self) -> np.ndarray:
        X = self.points
        D = np.empty((self.n, self.n))
        for lo in range(0, self.n, 1024):
            hi = min(lo + 1024, self.n)
            D[lo:hi] = self._dissim(_sq_dists(X[lo:hi], X))
        D[np.arange(self.n), np.arange(self.n)] = 0.0
        return D

    def _max_dissimilarity(self) -> float:
        X, best = self.points, 0.0
        for lo in range(0, self.n, 1024):
            best = max(best, float(self._dissim(_sq_dists(X[lo:lo + 1024], X)).max()))
        return best

    @property
    def diameter(self) -> float:
        """Largest pairwise Euclidean distance between points."""
        return self._shared["max_l"] ** (1.0 / self.alpha_exp)

    def rows(self, cands) -> np.ndarray:
        """Dissimilarities ``l(c, v)`` for candidates ``c`` against the evaluation points."""
        cands = np.asarray(cands, dtype=np.int64)
        if self._D is not None:
            R = self._D[cands]
            return R if self._full_eval else np.ascontiguousarray(R[:, self.eval_idx])
        E = self.points[self.eval_idx]
        R = np.empty((cands.size, E.shape[0]))
        for j, c in enumerate(cands):
            diff = E - self.points[c]
            R[j] = self._dissim(np.einsum("ij,ij->i", diff, diff))
            R[j][self.eval_idx == c] = 0.0
        return R

    def _current_min(self, ids) -> np.ndarray:
        cur = np.full(self.eval_idx.size, self.phantom_cost)
        for lo in range(0, len(ids), _CHUNK):
            np.minimum(cur, self.rows(ids[lo:lo + _CHUNK]).min(axis=0), out=cur)
        return cur

    def _from_min(self, cur) -> float:
        return (self.phantom_cost - cur.sum() / cur.size) * self._scale

    def _value(self, ids):
        return self._from_min(self._current_min(ids))

    def start(self):
        state = State()
        state.cur = np.full(self.eval_idx.size, self.phantom_cost)
        state.value = self._from_min(state.cur)
        self._count(1, state)
        return state

    def gains(self, state, cands):
        cands = np.asarray(cands, dtype=np.int64).ravel()
        m = state.cur.size
        if cands.size == 1 and self._D is not None:
            # lazy refresh path; same per-row reduction as the batched path below
            c = cands[0]
            t = state.cur - (self._D[c] if self._full_eval else self._D[c, self.eval_idx])
            np.maximum(t, 0.0, out=t)
            self._count(1, state)
            return np.array([t.sum() / m * self._scale])
        out = np.empty(cands.size)
        for lo in range(0, cands.size, _CHUNK):
            R = self.rows(cands[lo:lo + _CHUNK])
            np.subtract(state.cur, R, out=R)
            np.maximum(R, 0.0, out=R)
            out[lo:lo + _CHUNK] = R.sum(axis=1) / m * self._scale
        self._count(cands.size, state)
        return out

    def extend(self, state, e):
        state.selected.append(int(e))
        np.minimum(state.cur, self.rows([e])[0], out=state.cur)
        state.value = self._from_min(state.cur)

    def component(self, i: int, S) -> float:
        """Per-point utility ``l(i, e0) - min_{e in S + e0} l(e, i)``."""
        ids = as_ids(S, self.n)
        best = self.phantom_cost
        if ids.size:
            col = self._D[ids, i] if self._D is not None else \
                self._dissim(((self.points[ids] - self.points[i]) ** 2).sum(1))
            best = min(best, float(col.min()))
        return (self.phantom_cost - best) * self._scale

    def restrict(self, D) -> "ExemplarObjective":
        D = as_ids(D, self.n)
        return ExemplarObjective(self.points, self.alpha_exp, self.phantom_cost,
                                 self.normalized, eval_idx=np.sort(D), _shared=self._shared)

    def lipschitz_constant(self) -> float:
        """``alpha R^(alpha-1)`` w.r.t. Euclidean distance (utility scale)."""
        return self.alpha_exp * self.diameter ** (self.alpha_exp - 1.0) * self._scale

    def distance(self, i, j) -> float:
        return float(np.linalg.norm(self.points[i] - self.points[j]))


def exemplar_loss(data, S, alpha_exp: float = 2.0) -> float:
    """Mean over all points of the dissimilarity to the nearest exemplar in ``S``."""
    X = _as_points(data)
    ids = as_ids(S, X.shape[0])
    if ids.size == 0:
        raise PreconditionError("loss of an empty exemplar set is undefined; use exemplar_utility")
    sq = _sq_dists(X[ids], X)
    sq[np.arange(ids.size), ids] = 0.0
    l = sq if alpha_exp == 2.0 else sq ** (alpha_exp / 2.0)
    return float(l.min(axis=0).mean())


def exemplar_utility(obj: ExemplarObjective, S) -> float:
    return obj.evaluate(S)


# ------------------------------------------------------------------ log-det
def _chol(M: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        pass
    try:
        return np.linalg.cholesky(M + JITTER * np.eye(M.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("matrix is not positive definite even with jitter") from exc


def _schur_log(s: float) -> float:
    if s <= 0:
        s += JITTER
        if s <= 0:
            raise NumericalError(f"conditional variance {s} is not positive")
    return math.log(s)


class _LogDet(Objective):
    """``scale * log det(A_S)`` for a positive definite matrix ``A``.

    Values are recomputed from a fresh Cholesky factor; each candidate gain is a
    Schur complement computed on its own so batches never change the bits.
    """

    scale = 1.0

    def _block(self, rows, cols) -> np.ndarray:
        raise NotImplementedError

    def _diag(self, c) -> float:
        return float(self._block([c], [c])[0, 0])

    def _value(self, ids):
        if ids.size == 0:
            return 0.0
        L = _chol(self._block(ids, ids))
        return self.scale * 2.0 * float(np.log(np.diag(L)).sum())

    def start(self):
        state = State()
        state.L = np.zeros((0, 0))
        state.value = 0.0
        self._count(1, state)
        return state

    def gains(self, state, cands):
        cands = np.asarray(cands, dtype=np.int64)
        out = np.empty(cands.size)
        S = state.selected
        for j, c in enumerate(cands):
            if S:
                w = scipy.linalg.solve_triangular(state.L, self._block(S, [c])[:, 0], lower=True)
                s = self._diag(c) - float(w @ w)
            else:
                s = self._diag(c)
            out[j] = self.scale * _schur_log(s)
        self._count(cands.size, state)
        return out

    def extend(self, state, e):
        state.selected.append(int(e))
        ids = np.asarray(state.selected)
        state.L = _chol(self._block(ids, ids))
        state.value = self.scale * 2.0 * float(np.log(np.diag(state.L)).sum())


class InformationGain(_LogDet):
    """Gaussian-process information gain ``1/2 log det(I + sigma^-2 K_{S,S})``."""

    monotone = True
    nonnegative = True
    payload_kind = "vectors"
    scale = 0.5

    def __init__(self, data, kernel: SEKernel = SEKernel()):
        X = _as_points(data)
        super().__init__(X.shape[0])
        self.points = X
        self.kernel = kernel
        self._A = None
        if self.n * self.n <= DENSE_LIMIT // 4:
            A = np.empty((self.n, self.n))
            for lo in range(0, self.n, 1024):
                A[lo:lo + 1024] = kernel(X[lo:lo + 1024], X)
            A /= kernel.sigma ** 2
            A[np.diag_indices(self.n)] = 1.0 / kernel.sigma ** 2 + 1.0
            self._A = A

    def _block(self, rows, cols):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if self._A is not None:
            return self._A[np.ix_(rows, cols)]
        B = self.kernel(self.points[rows], self.points[cols]) / self.kernel.sigma ** 2
        B[rows[:, None] == cols[None, :]] = 1.0 / self.kernel.sigma ** 2
        return B + (rows[:, None] == cols[None, :])

    def lipschitz_constant(self, k: int) -> float:
        """``L k^3`` with the kernel constant scaled by ``sigma^-2``."""
        return self.kernel.lipschitz_constant / self.kernel.sigma ** 2 * k ** 3

    def distance(self, i, j) -> float:
        return float(np.linalg.norm(self.points[i] - self.points[j]))


class DPPLogDet(_LogDet):
    """``log det(K_S)`` for a positive definite DPP kernel; ``log det(K_empty) = 0``."""

    payload_kind = "abstract"

    def __init__(self, K):
        K = np.asarray(K, dtype=np.float64)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise PreconditionError("kernel must be a square matrix")
        if not np.allclose(K, K.T, atol=1e-12):
            raise PreconditionError("kernel must be symmetric")
        super().__init__(K.shape[0])
        self.K = K

    def _block(self, rows, cols):
        return self.K[np.ix_(np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))]


def info_gain(kernel: SEKernel, data, S) -> float:
    X = _as_points(data)
    ids = as_ids(S, X.shape[0])
    if ids.size == 0:
        return 0.0
    M = np.eye(ids.size) + kernel(X[ids], X[ids]) / kernel.sigma ** 2
    M[np.diag_indices(ids.size)] = 1.0 + 1.0 / kernel.sigma ** 2
    return float(np.log(np.diag(_chol(M))).sum())


def dpp_logdet(K, S) -> float:
    K = np.asarray(K, dtype=np.float64)
    ids = as_ids(S, K.shape[0])
    if ids.size == 0:
        return 0.0
    return 2.0 * float(np.log(np.diag(_chol(K[np.ix_(ids, ids)]))).sum())


# ---------------------------------------------------------------- graph cut
class GraphCut(Objective):
    """Weight of arcs leaving ``S``: ``sum_{u in S, v not in S} w(u, v)``."""

    nonnegative = True
    payload_kind = "graph"

    def __init__(self, graph: GraphDataset):
        super().__init__(graph.n)
        self.graph = graph
        n = graph.n
        self._out = scipy.sparse.csr_matrix((graph.weight, (graph.src, graph.dst)), shape=(n, n))
        self._in = self._out.T.tocsr()
        self._out_total = np.asarray(self._out.sum(axis=1)).ravel()

    def _value(self, ids):
        g = self.graph
        inside = np.zeros(self.n, dtype=bool)
        inside[ids] = True
        return float(g.weight[inside[g.src] & ~inside[g.dst]].sum())

    def start(self):
        state = State()
        state.inside = np.zeros(self.n, dtype=bool)
        state.touch = np.zeros(self.n)  # w(e -> S) + w(S -> e)
        state.value = 0.0
        self._count(1, state)
        return state

    def gains(self, state, cands):
        cands = np.asarray(cands, dtype=np.int64)
        self._count(cands.size, state)
        return self._out_total[cands] - state.touch[cands]

    def extend(self, state, e):
        e = int(e)
        state.selected.append(e)
        state.inside[e] = True
        for mat in (self._out, self._in):
            lo, hi = mat.indptr[e], mat.indptr[e + 1]
            np.add.at(state.touch, mat.indices[lo:hi], mat.data[lo:hi])
        state.value = self._value(np.asarray(state.selected))

    def restrict(self, D) -> "GraphCut":
        """Cut of the subgraph induced by ``D`` (arcs leaving ``D`` are dropped)."""
        return GraphCut(self.graph.induced(D))


def graph_cut(g: GraphDataset, S) -> float:
    return GraphCut(g).evaluate(S)


# ----------------------------------------------------------------- coverage
class Coverage(Objective):
    """Number of universe items covered by the union of the chosen sets."""

    monotone = True
    nonnegative = True
    payload_kind = "set-system"

    def __init__(self, ss: SetSystemDataset):
        super().__init__(ss.n)
        self.sets = ss
        self._owner = np.repeat(np.arange(ss.n), np.diff(ss.indptr))

    def _value(self, ids):
        covered = np.zeros(self.sets.n_items, dtype=bool)
        for e in ids:
            covered[self.sets.members(e)] = True
        return float(covered.sum())

    def start(self):
        state = State()
        state.covered = np.zeros(self.sets.n_items, dtype=bool)
        state.value = 0.0
        self._count(1, state)
        return state

    def gains(self, state, cands):
        cands = np.asarray(cands, dtype=np.int64)
        self._count(cands.size, state)
        if cands.size * 4 >= self.n:
            fresh = (~state.covered[self.sets.items]).astype(np.float64)
            return np.bincount(self._owner, weights=fresh, minlength=self.n)[cands]
        return np.array([float((~state.covered[self.sets.members(c)]).sum()) for c in cands])

    def extend(self, state, e):
        state.selected.append(int(e))
        state.covered[self.sets.members(int(e))] = True
        state.value = float(state.covered.sum())


def coverage(ss: SetSystemDataset, S) -> float:
    return Coverage(ss).evaluate(S)


# ------------------------------------------------------------------ modular
class Modular(Objective):
    """``f(S) = sum of w(e)``; both submodular and supermodular."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64).ravel()
        super().__init__(w.size)
        self.weights = w
        self.monotone = bool(np.all(w >= 0))
        self.nonnegative = self.monotone

    def _value(self, ids):
        return float(self.weights[ids].sum())

    def gains(self, state, cands):
        cands = np.asarray(cands, dtype=np.int64)
        self._count(cands.size, state)
        return self.weights[cands].copy()


# ----------------------------------------------------------- decomposition
def restricted_eval(obj: Objective, D, S) -> float:
    """``f_D(S)``: the objective averaged over the components indexed by ``D`` only."""
    if len(np.atleast_1d(np.asarray(list(D) if not isinstance(D, np.ndarray) else D))) == 0:
        raise PreconditionError("evaluation scope D must be nonempty")
    if not obj.decomposable:
        raise PreconditionError(f"{type(obj).__name__} is not decomposable")
    return obj.restrict(D).evaluate(S)


def lipschitz_probe(obj: Objective, metric, k: int, trials: int, rng) -> float:
    """Largest observed ``|f(S) - f(S')| / sum_i d(e_i, e'_i)`` over random matched pairs.

    ``metric(i, j)`` gives element distances; pairs with zero matched distance
    are skipped.
    """
    rng = np.random.default_rng(rng)
    if k < 1 or k > obj.n:
        raise PreconditionError(f"set size must lie in [1, {obj.n}]")
    best, used = 0.0, 0
    for _ in range(trials):
        S = rng.choice(obj.n, size=k, replace=False)
        T = rng.choice(obj.n, size=k, replace=False)
        dist = sum(metric(int(a), int(b)) for a, b in zip(S, T))
        if dist == 0:
            continue
        used += 1
        best = max(best, abs(obj.evaluate(S) - obj.evaluate(T)) / dist)
    if used == 0:
        raise PreconditionError("every sampled pair had zero matched distance; ratio undefined")
    return best
