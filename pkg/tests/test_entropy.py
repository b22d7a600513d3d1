import numpy as np
import pytest
import scipy.linalg

from markovflow import (
    build_flow_model,
    compression_gap,
    dense_continuous,
    exact_entropy_rate,
    sampled_entropy_rate,
    transition_view,
)
from markovflow.entropy import format_gap_csv

from conftest import random_network, two_node


def test_two_node_exact():
    net = two_node()
    h = exact_entropy_rate(dense_continuous(transition_view(net), 1.0), [0.5, 0.5])
    a = (1 + np.exp(-2.0)) / 2
    expect = -(a * np.log2(a) + (1 - a) * np.log2(1 - a))
    assert h == pytest.approx(expect, abs=1e-12)
    assert h == pytest.approx(0.98675, abs=1e-5)


def test_exact_against_expm():
    net = random_network(3, n=12)
    tv = transition_view(net)
    p = build_flow_model(net).visit_rate
    m = scipy.linalg.expm(-2.0 * (np.eye(12) - tv.matrix().toarray()))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(m > 0, m * np.log2(m), 0.0)
    expect = -(p[:, None] * terms).sum()
    assert exact_entropy_rate(dense_continuous(tv, 2.0), p) == pytest.approx(expect, abs=1e-8)


def test_entropy_grows_with_time():
    net = random_network(6, n=15)
    tv = transition_view(net)
    p = build_flow_model(net).visit_rate
    hs = [exact_entropy_rate(dense_continuous(tv, t), p) for t in (0.25, 1, 4)]
    assert hs[0] < hs[1] < hs[2]


@pytest.mark.parametrize("t", [0.5, 2.0])
def test_sampled_close_to_exact(t):
    net = random_network(2, n=12)
    tv = transition_view(net)
    p = build_flow_model(net).visit_rate
    exact = exact_entropy_rate(dense_continuous(tv, t), p)
    smp = sampled_entropy_rate(tv, p, t, starts=100, walks=3000, rng=5)
    assert abs(smp.estimate - exact) < max(0.02, 4 * smp.standard_error)
    assert smp.start_samples == 100 and smp.walks_per_start == 3000


def test_sampled_reproducible_and_batched():
    net = random_network(2, n=10)
    tv = transition_view(net)
    p = build_flow_model(net).visit_rate
    a = sampled_entropy_rate(tv, p, 1.0, starts=20, walks=200, rng=9)
    b = sampled_entropy_rate(tv, p, 1.0, starts=20, walks=200, rng=9)
    assert a == b


def test_single_steps_follow_transition_probabilities():
    from markovflow import Network
    from markovflow.entropy import _cumulative, _step

    net = Network(5, [0, 1, 1, 2, 3], [1, 2, 4, 3, 4], [1.0, 2.0, 5.0, 1.0, 3.0])
    tv = transition_view(net)
    cum = _cumulative(tv)
    rng = np.random.default_rng(1)
    n = 40_000
    for u in range(5):
        nxt = _step(tv, cum, np.full(n, u), rng, 0.0)
        freq = np.bincount(nxt, minlength=5) / n
        expect = tv.matrix().toarray()[u]
        assert set(np.flatnonzero(freq)) <= set(np.flatnonzero(expect))
        np.testing.assert_allclose(freq, expect, atol=0.015)


def test_sampled_rejects_bad_args():
    tv = transition_view(two_node())
    with pytest.raises(ValueError):
        sampled_entropy_rate(tv, [0.5, 0.5], 1.0, starts=0)
    with pytest.raises(ValueError):
        sampled_entropy_rate(tv, [0.5, 0.5], -1.0)


def test_gap_and_csv():
    assert compression_gap(3.0, 1.25) == 1.75
    text = format_gap_csv([(1.0, 2.0, 1.5, 0.5, 3), (2.0, 1.0, None, None, 1)])
    lines = text.splitlines()
    assert lines[0] == "t,L_two_level,h,gap,modules"
    assert len(lines) == 3
