import numpy as np
import pytest
import scipy.sparse as sp
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from markovflow import FastProjection, MapEquationClustering, Network, nmi
from markovflow.benchmark import BipartiteBenchmarkSpec, generate_bipartite_benchmark


def block_matrix():
    a = np.zeros((10, 10))
    a[:5, :5] = 1
    a[5:, 5:] = 1
    np.fill_diagonal(a, 0)
    a[0, 5] = a[5, 0] = 1
    return a


def test_params_and_clone():
    est = MapEquationClustering(markov_time=2.0, trials=3)
    params = est.get_params()
    assert params["markov_time"] == 2.0 and params["trials"] == 3
    twin = clone(est).set_params(seed=7)
    assert twin.seed == 7 and est.seed == 123
    assert FastProjection(top_y=4).get_params()["top_y"] == 4


def test_fit_predict_dense_and_sparse():
    a = block_matrix()
    labels = MapEquationClustering().fit_predict(a)
    assert labels.tolist() == [0] * 5 + [1] * 5
    est = MapEquationClustering().fit(sp.csr_matrix(a))
    assert est.n_modules_ == 2
    assert est.score() == -est.codelength_
    assert est.codelength(labels) == pytest.approx(est.codelength_)
    assert est.codelength(np.zeros(10, dtype=int)) > est.codelength_


def test_markov_time_changes_resolution():
    a = block_matrix()
    coarse = MapEquationClustering(markov_time=20.0).fit(a)
    assert coarse.n_modules_ == 1


def test_multilevel_attribute():
    est = MapEquationClustering(multilevel=True).fit(block_matrix())
    assert est.hierarchy_ is not None


def test_bipartite_matrix_input():
    net, truth = generate_bipartite_benchmark(BipartiteBenchmarkSpec(4, 8, 6, 6, 32, seed=1))
    prim, feat = net.primaries(), net.features()
    b = net.adjacency().tocsr()[prim][:, feat]
    est = MapEquationClustering(bipartite=True).fit(b)
    assert est.labels_.shape == (prim.size + feat.size,)
    assert nmi(est.labels_[prim], truth.module_of[prim]) == 1.0


def test_projection_pipeline():
    net, truth = generate_bipartite_benchmark(BipartiteBenchmarkSpec(4, 8, 6, 6, 32, seed=1))
    pipe = make_pipeline(FastProjection(top_y=5), MapEquationClustering(directed=False))
    labels = pipe.fit(net).named_steps["mapequationclustering"].labels_
    assert nmi(labels, truth.module_of[net.primaries()]) == 1.0
    m = FastProjection(top_y=5).fit_transform(net)
    assert sp.issparse(m) and m.shape == (32, 32)
    assert np.all(np.diff(m.indptr) <= 5)


@pytest.mark.parametrize("kw", [dict(markov_time=0), dict(trials=0), dict(markov_time="x")])
def test_validation(kw):
    with pytest.raises(ValueError):
        MapEquationClustering(**kw).fit(block_matrix())


def test_rejects_bad_matrices():
    with pytest.raises(ValueError):
        MapEquationClustering().fit(np.ones((3, 4)))
    with pytest.raises(ValueError):
        MapEquationClustering().fit(-block_matrix())
    with pytest.raises(ValueError):
        FastProjection().fit(Network(2, [0], [1], [1.0]))
