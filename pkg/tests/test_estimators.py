import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from greedi import GreediActiveSetSelector, GreediExemplarClustering
from greedi.core import PreconditionError
from greedi.engines import lazy_greedy
from greedi.objectives import ExemplarObjective, InformationGain, SEKernel


def blobs(seed=0):
    rng = np.random.default_rng(seed)
    centers = np.array([[-6.0, 0.0], [6.0, 0.0], [0.0, 8.0]])
    labels = rng.integers(3, size=150)
    return centers[labels] + rng.normal(scale=0.4, size=(150, 2)), labels


def test_clustering_single_machine_matches_lazy_greedy():
    X, _ = blobs()
    est = GreediExemplarClustering(n_clusters=3).fit(X)
    ref = lazy_greedy(ExemplarObjective(X), budget=3)
    assert est.medoid_indices_.tolist() == list(ref.elements)
    assert est.objective_value_ == ref.value
    assert est.trace_ is None


def test_clustering_recovers_blobs():
    X, truth = blobs(1)
    est = GreediExemplarClustering(n_clusters=3, n_machines=4, random_state=2).fit(X)
    assert est.trace_.m == 4
    # every found cluster is pure
    for c in range(3):
        assert np.unique(truth[est.labels_ == c]).size == 1
    assert np.array_equal(est.predict(X), est.labels_)
    D = est.transform(X[:5])
    assert D.shape == (5, 3) and np.all(D >= 0)
    assert np.array_equal(est.fit_predict(X), est.labels_)


def test_clustering_normalize_and_decomposable():
    X, _ = blobs(2)
    est = GreediExemplarClustering(n_clusters=3, n_machines=3, normalize=True,
                                   decomposable=True).fit(X)
    assert est.cluster_centers_.shape == (3, 2)
    assert np.array_equal(est.predict(X), est.labels_)


def test_clustering_errors():
    X, _ = blobs()
    with pytest.raises(NotFittedError):
        GreediExemplarClustering().predict(X)
    with pytest.raises(PreconditionError):
        GreediExemplarClustering(n_clusters=500).fit(X)
    est = GreediExemplarClustering(n_clusters=2).fit(X)
    with pytest.raises(ValueError):
        est.predict(np.ones((2, 5)))


def test_clone_and_params():
    est = GreediExemplarClustering(n_clusters=4, n_machines=2)
    c = clone(est)
    assert c.get_params() == est.get_params()
    sel = GreediActiveSetSelector(n_select=7, h=0.5)
    assert clone(sel).get_params()["h"] == 0.5


def test_active_set_selector():
    X, _ = blobs(3)
    sel = GreediActiveSetSelector(n_select=6, n_machines=3, random_state=1).fit(X)
    assert sel.support_.size == 6 and np.unique(sel.support_).size == 6
    K = sel.transform(X[:4])
    assert K.shape == (4, 6)
    f = InformationGain(X, SEKernel(0.75, 1.0))
    assert sel.objective_value_ == pytest.approx(f.evaluate(sel.support_), rel=1e-12)
    one = GreediActiveSetSelector(n_select=6).fit(X)
    assert one.support_.tolist() == list(lazy_greedy(f, budget=6).elements)
