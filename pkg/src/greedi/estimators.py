"""scikit-learn style wrappers: exemplar clustering and active-set selection."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import PreconditionError
from .distributed import GreediConfig, greedi
from .engines import get_engine
from .objectives import ExemplarObjective, InformationGain, SEKernel, VectorDataset


def _run(f, k, n_machines, kappa_factor, engine, decomposable, seed, workers):
    if k > f.n:
        raise PreconditionError(f"cannot select {k} elements from {f.n} samples")
    if n_machines == 1 and not decomposable:
        return get_engine(engine).solve(f, None, None, k), None
    cfg = GreediConfig(n_machines, k, kappa_factor=kappa_factor, engine=engine,
                       decomposable=decomposable, seed=seed, workers=workers)
    return greedi(f, None, cfg)


class GreediExemplarClustering(ClusterMixin, TransformerMixin, BaseEstimator):
    """k-medoid style exemplar selection, optionally spread over simulated machines.

    Exemplars are rows of the training data.  ``predict`` assigns the nearest
    exemplar; ``transform`` returns Euclidean distances to every exemplar.
    """

    def __init__(self, n_clusters=8, n_machines=1, kappa_factor=1.0, alpha_exp=2.0,
                 normalize=False, decomposable=False, engine="lazy", random_state=0, workers=1):
        self.n_clusters = n_clusters
        self.n_machines = n_machines
        self.kappa_factor = kappa_factor
        self.alpha_exp = alpha_exp
        self.normalize = normalize
        self.decomposable = decomposable
        self.engine = engine
        self.random_state = random_state
        self.workers = workers

    def _prep(self, X):
        if not self.normalize:
            return X
        Z = X - self.mean_
        norms = np.linalg.norm(Z, axis=1, keepdims=True)
        return np.divide(Z, norms, out=np.zeros_like(Z), where=norms > 0)

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.mean_ = X.mean(axis=0)
        data = VectorDataset(X).normalize() if self.normalize else VectorDataset(X)
        f = ExemplarObjective(data, alpha_exp=self.alpha_exp)
        sol, self.trace_ = _run(f, self.n_clusters, self.n_machines, self.kappa_factor,
                                self.engine, self.decomposable, self.random_state, self.workers)
        self.medoid_indices_ = np.asarray(sol.elements, dtype=np.int64)
        self.cluster_centers_ = X[self.medoid_indices_]
        self._centers = data.points[self.medoid_indices_]
        self.objective_value_ = sol.value
        self.labels_ = self._nearest(data.points)
        return self

    def _dist(self, Z):
        d2 = (Z * Z).sum(1)[:, None] + (self._centers ** 2).sum(1)[None, :] - 2 * Z @ self._centers.T
        return np.sqrt(np.maximum(d2, 0.0))

    def _nearest(self, Z):
        return np.argmin(self._dist(Z), axis=1)

    def _check(self, X):
        check_is_fitted(self, "medoid_indices_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return self._prep(X)

    def predict(self, X):
        return self._nearest(self._check(X))

    def transform(self, X):
        return self._dist(self._check(X))


class GreediActiveSetSelector(TransformerMixin, BaseEstimator):
    """Pick an informative active set by Gaussian-process information gain.

    ``transform`` maps samples to squared exponential kernel features against
    the selected active set.
    """

    def __init__(self, n_select=50, n_machines=1, kappa_factor=1.0, h=0.75, sigma=1.0,
                 engine="lazy", random_state=0, workers=1):
        self.n_select = n_select
        self.n_machines = n_machines
        self.kappa_factor = kappa_factor
        self.h = h
        self.sigma = sigma
        self.engine = engine
        self.random_state = random_state
        self.workers = workers

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.kernel_ = SEKernel(self.h, self.sigma)
        f = InformationGain(X, self.kernel_)
        sol, self.trace_ = _run(f, self.n_select, self.n_machines, self.kappa_factor,
                                self.engine, False, self.random_state, self.workers)
        self.support_ = np.asarray(sol.elements, dtype=np.int64)
        self.active_set_ = X[self.support_]
        self.objective_value_ = sol.value
        return self

    def transform(self, X):
        check_is_fitted(self, "support_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return self.kernel_(X, self.active_set_)
