import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from markovflow import (
    Network,
    bipartite_flow_model,
    build_flow_model,
    dense_continuous,
    dense_linearized,
    stationary_visit_rates,
    transition_view,
)
from markovflow.flow import DenseCapError, plogp, power_iteration

from conftest import random_bipartite, random_network


def test_plogp_zero():
    np.testing.assert_array_equal(plogp(np.array([0.0, 1.0, 0.5])), [0.0, 0.0, -0.5])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_undirected_closed_form_matches_power_iteration(seed):
    tv = transition_view(random_network(seed, n=20))
    closed = stationary_visit_rates(tv, 0.0, undirected=True)
    np.testing.assert_allclose(closed, tv.out_strength / tv.out_strength.sum(), atol=1e-15)
    iterated = power_iteration(tv, teleport=0.0, tol=1e-15, max_iter=100_000)
    np.testing.assert_allclose(iterated, closed, atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_directed_teleport_matches_eigenvector(seed):
    net = random_network(seed, n=20, p=0.12, directed=True)
    tv = transition_view(net)
    n = net.node_count
    alpha = 0.15
    t = tv.matrix().toarray()
    t[tv.dangling] = 1.0 / n
    g = (1 - alpha) * t + alpha / n
    vals, vecs = scipy.linalg.eig(g.T)
    v = np.real(vecs[:, np.argmin(np.abs(vals - 1))])
    v /= v.sum()
    np.testing.assert_allclose(stationary_visit_rates(tv, alpha), v, atol=1e-8)


def test_flow_rescaling_keeps_visits():
    net = random_network(3)
    fm1 = build_flow_model(net, 1.0)
    fm3 = build_flow_model(net, 3.0)
    np.testing.assert_array_equal(fm1.visit_rate, fm3.visit_rate)
    np.testing.assert_allclose(fm3.link_flow, 3.0 * fm1.link_flow, rtol=1e-15)
    np.testing.assert_allclose(fm1.rescaled(3.0).link_flow, fm3.link_flow, rtol=1e-15)
    assert fm1.rescaled(0.5).rescaled(1.0).link_flow.tolist() == fm1.link_flow.tolist()


def test_flow_sums_to_visits():
    fm = build_flow_model(random_network(4), 1.0)
    out = np.bincount(fm.source, weights=fm.link_flow, minlength=fm.node_count)
    np.testing.assert_allclose(out, fm.visit_rate, atol=1e-15)


@pytest.mark.parametrize("t", [0.0, -1.0, np.nan])
def test_bad_markov_time(t):
    with pytest.raises(ValueError):
        build_flow_model(random_network(0), t)


def test_bipartite_dynamics():
    net = random_bipartite(7)
    fm = bipartite_flow_model(net)
    base = build_flow_model(net, 1.0)
    prim, feat = net.primaries(), net.features()
    assert np.all(fm.visit_rate[feat] == 0)
    np.testing.assert_allclose(fm.visit_rate[prim], 2 * base.visit_rate[prim])
    assert abs(fm.visit_rate.sum() - 1.0) < 1e-12
    np.testing.assert_allclose(fm.link_flow, 2 * base.link_flow)
    assert fm.markov_time == 2.0


def test_bipartite_dynamics_rejects_unipartite():
    with pytest.raises(ValueError):
        bipartite_flow_model(random_network(0))


def test_two_cycle_continuous():
    tv = transition_view(Network(2, [0], [1], [1.0]))
    m = dense_continuous(tv, 1.0).matrix
    # e^{-1} cosh(1)
    assert m[0, 0] == pytest.approx(0.567667, abs=1e-6)
    assert m[0, 0] == pytest.approx(np.exp(-1.0) * np.cosh(1.0), abs=1e-12)


@pytest.mark.parametrize("t", [0.3, 1.0, 2.5, 8.0, 40.0])
def test_continuous_matches_expm(t):
    net = random_network(11, n=15, directed=True, p=0.2)
    tv = transition_view(net)
    td = tv.matrix().toarray()
    td[tv.dangling] = 1.0 / net.node_count
    expect = scipy.linalg.expm(-t * (np.eye(net.node_count) - td))
    got = dense_continuous(tv, t).matrix
    np.testing.assert_allclose(got, expect, atol=1e-8)
    np.testing.assert_allclose(got.sum(axis=1), 1.0, atol=1e-10)


def test_linearized():
    tv = transition_view(random_network(5, n=10))
    td = tv.matrix().toarray()
    np.testing.assert_allclose(dense_linearized(tv, 0.25).matrix,
                               0.75 * np.eye(10) + 0.25 * td)
    np.testing.assert_allclose(dense_linearized(tv, 3.0).matrix, 3.0 * td)


def test_dense_cap():
    tv = transition_view(random_network(1, n=30))
    with pytest.raises(DenseCapError):
        dense_continuous(tv, 1.0, cap=20)
    with pytest.raises(DenseCapError):
        dense_linearized(tv, 1.0, cap=20)


def test_dense_csv(tmp_path):
    d = dense_linearized(transition_view(random_network(2, n=6)), 1.0)
    d.to_csv(tmp_path / "m.csv")
    np.testing.assert_array_equal(np.loadtxt(tmp_path / "m.csv", delimiter=","), d.matrix)
