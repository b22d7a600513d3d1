import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from markovflow import (
    Hierarchy,
    Partition,
    bipartite_flow_model,
    build_flow_model,
    hierarchical_map_equation,
    map_equation,
    module_stats,
)
from markovflow.mapeq import ModuleFlowStats, index_codelength, module_codelength

from conftest import random_bipartite, random_network, two_node


def _h(probs):
    probs = [x for x in probs if x > 0]
    tot = sum(probs)
    return -sum(x / tot * math.log2(x / tot) for x in probs) if tot > 0 else 0.0


def naive_codelength(fm, labels):
    """Textbook two-level map equation from explicit per-module sums."""
    labels = list(labels)
    mods = sorted(set(labels))
    exit_ = {m: 0.0 for m in mods}
    enter = {m: 0.0 for m in mods}
    for s, d, f in zip(fm.source, fm.target, fm.link_flow):
        if labels[s] != labels[d]:
            exit_[labels[s]] += f
            enter[labels[d]] += f
    q = sum(enter.values())
    total = q * _h([enter[m] for m in mods])
    for m in mods:
        visits = [fm.visit_rate[i] for i in range(len(labels)) if labels[i] == m]
        rate = exit_[m] + sum(visits)
        total += rate * _h([exit_[m]] + visits)
    return total


def naive_hierarchical(fm, paths):
    """Recursive multilevel map equation; ``paths[i]`` is node i's module path."""
    def crosses(p, a, b):
        return p == a[:len(p)] and p != b[:len(p)]

    flows = list(zip(fm.source, fm.target, fm.link_flow))

    def exit_of(p):
        return sum(f for s, d, f in flows if crosses(p, paths[s], paths[d]))

    def enter_of(p):
        return sum(f for s, d, f in flows if crosses(p, paths[d], paths[s]))

    def cost(p):
        kids = sorted({q[:len(p) + 1] for q in paths if q[:len(p)] == p and len(q) > len(p)})
        members = [i for i, q in enumerate(paths) if q == p]
        own = exit_of(p) if p else 0.0
        if kids:
            events = [own] + [enter_of(k) for k in kids]
            return sum(events) * _h(events) + sum(cost(k) for k in kids)
        events = [own] + [fm.visit_rate[i] for i in members]
        return sum(events) * _h(events)

    return cost(())


def test_two_node_fixture():
    net = two_node()
    for t in (0.5, 1.0, 2.0, 4.0):
        assert map_equation(build_flow_model(net, t), Partition.one_module(2)) == 1.0
    assert map_equation(build_flow_model(net, 1.0), Partition.singletons(2)) == pytest.approx(3.0, abs=1e-9)
    assert map_equation(build_flow_model(net, 0.5), Partition.singletons(2)) == pytest.approx(
        1.8774437510817343, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 5.0), st.integers(1, 6), st.booleans())
def test_matches_textbook_form(seed, t, k, directed):
    net = random_network(seed, n=15, directed=directed)
    fm = build_flow_model(net, t)
    labels = np.random.default_rng(seed).integers(0, k, net.node_count)
    assert map_equation(fm, Partition(labels)) == pytest.approx(naive_codelength(fm, labels),
                                                              abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 8.0))
def test_rates_scale_linearly(seed, t):
    net = random_network(seed, n=20)
    part = Partition(np.random.default_rng(seed).integers(0, 4, 20))
    s1 = module_stats(build_flow_model(net, 1.0), part)
    st_ = module_stats(build_flow_model(net, t), part)
    np.testing.assert_allclose(st_.exit_rate, t * s1.exit_rate, rtol=1e-14)
    np.testing.assert_allclose(st_.enter_rate, t * s1.enter_rate, rtol=1e-14)
    np.testing.assert_array_equal(st_.internal_visit_sum, s1.internal_visit_sum)


def test_relabeling_is_irrelevant():
    fm = build_flow_model(random_network(9), 1.3)
    labels = np.random.default_rng(1).integers(0, 5, fm.node_count)
    perm = np.array([3, 0, 4, 1, 2])
    assert map_equation(fm, Partition(labels)) == map_equation(fm, Partition(perm[labels]))


def test_partition_relabels_by_first_appearance():
    p = Partition([7, 7, 2, 9, 2])
    assert p.module_of.tolist() == [0, 0, 1, 2, 1]
    assert p.module_count == 3


def test_module_codelength_pieces():
    stats = ModuleFlowStats.from_visits(0.25, [0.25, 0.5])
    assert module_codelength(stats)[0] == pytest.approx(1.5)
    assert index_codelength(np.array([0.25, 0.25]))[1] == pytest.approx(1.0)
    assert index_codelength(np.zeros(3)) == (0.0, 0.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.2, 4.0))
def test_depth_two_hierarchy_is_flat(seed, t):
    fm = build_flow_model(random_network(seed, n=18), t)
    part = Partition(np.random.default_rng(seed).integers(0, 4, 18))
    assert hierarchical_map_equation(fm, Hierarchy.from_partition(part)) == map_equation(fm, part)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_three_levels_match_recursive_oracle(seed):
    rng = np.random.default_rng(seed)
    fm = build_flow_model(random_network(seed, n=16, directed=bool(seed % 2)), 1.0)
    top = rng.integers(0, 2, 16)
    sub = rng.integers(0, 2, 16)
    paths = [(int(a), int(b)) for a, b in zip(top, sub)]
    h = Hierarchy.from_module_paths(paths)
    assert hierarchical_map_equation(fm, h) == pytest.approx(naive_hierarchical(fm, paths),
                                                             abs=1e-10)


def test_hierarchy_rejects_mixed_module():
    with pytest.raises(ValueError):
        Hierarchy([(0, 0), (0, 1, 0)])


def test_feature_nodes_cost_nothing():
    net = random_bipartite(4, n_p=10, n_f=7)
    fm = bipartite_flow_model(net)
    prim, feat = net.primaries(), net.features()
    labels = np.zeros(net.node_count, dtype=int)
    labels[prim[5:]] = 1
    # features sit in module 0 but add no visits
    stats = module_stats(fm, Partition(labels))
    assert stats.internal_visit_sum.sum() == pytest.approx(1.0)
    one = map_equation(fm, Partition.one_module(net.node_count))
    expect = -sum(p * math.log2(p) for p in fm.visit_rate[prim])
    assert one == pytest.approx(expect, abs=1e-12)
    assert np.all(fm.visit_rate[feat] == 0)
