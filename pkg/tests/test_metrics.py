import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.metrics import normalized_mutual_info_score

from markovflow import Hierarchy, Partition, leaf_nmi, nmi

labels = st.lists(st.integers(0, 5), min_size=2, max_size=60)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_matches_sklearn(data):
    a = data.draw(labels)
    b = data.draw(st.lists(st.integers(0, 5), min_size=len(a), max_size=len(a)))
    expect = normalized_mutual_info_score(a, b, average_method="arithmetic")
    assert nmi(a, b) == pytest.approx(expect, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_symmetric_and_relabel_invariant(data):
    a = np.array(data.draw(labels))
    b = np.array(data.draw(st.lists(st.integers(0, 5), min_size=a.size, max_size=a.size)))
    assert nmi(a, b) == nmi(b, a)
    perm = np.array(data.draw(st.permutations(range(6))))
    assert nmi(perm[a], b) == nmi(a, b)


def test_edge_cases():
    assert nmi([0, 0, 1, 1], [5, 5, 2, 2]) == 1.0
    assert nmi([0, 0, 0], [1, 1, 1]) == 1.0
    assert nmi([0, 1, 0, 1], [0, 0, 1, 1]) == 0.0
    with pytest.raises(ValueError):
        nmi([0, 1], [0, 1, 2])


def test_accepts_partitions_and_hierarchies():
    h1 = Hierarchy.from_module_paths([(0, 0), (0, 1), (1, 0)])
    h2 = Hierarchy.from_partition(Partition([0, 1, 2]))
    assert leaf_nmi(h1, h2) == 1.0
    assert nmi(Partition([0, 0, 1]), h1.top_partition()) == 1.0
