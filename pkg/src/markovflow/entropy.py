"""Entropy rate of the continuous-time walk and the compression gap."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .flow import DenseTransition, plogp
from .network import TransitionView


@dataclass(frozen=True)
class EntropySample:
    markov_time: float
    estimate: float
    start_samples: int
    walks_per_start: int
    standard_error: float


def exact_entropy_rate(tc: DenseTransition | np.ndarray, visit_rates) -> float:
    """``-sum_ab p_a T_ab log2 T_ab`` for a dense transition matrix."""
    m = tc.matrix if isinstance(tc, DenseTransition) else np.asarray(tc)
    p = np.asarray(visit_rates, dtype=np.float64)
    row_h = -plogp(np.clip(m, 0.0, None)).sum(axis=1)
    return max(float(p @ row_h), 0.0)


def _step(tv: TransitionView, cum: np.ndarray, pos: np.ndarray, rng, teleport: float):
    n = tv.node_count
    u = rng.random(pos.size)
    nxt = np.empty_like(pos)
    jump = tv.dangling[pos]
    if teleport > 0:
        jump |= rng.random(pos.size) < teleport
    walk = ~jump
    # row r of the cumulative table spans (r, r + 1]
    idx = np.searchsorted(cum, pos[walk] + u[walk], side="left")
    idx = np.clip(idx, tv.indptr[pos[walk]], tv.indptr[pos[walk] + 1] - 1)
    nxt[walk] = tv.indices[idx]
    nxt[jump] = rng.integers(0, n, int(jump.sum()))
    return nxt


def _cumulative(tv: TransitionView) -> np.ndarray:
    rows = np.repeat(np.arange(tv.node_count), np.diff(tv.indptr))
    within = np.cumsum(tv.probs) - np.repeat(
        np.concatenate([[0.0], np.cumsum(tv.probs)])[tv.indptr[:-1]], np.diff(tv.indptr))
    return rows + within


def _end_nodes(tv, cum, starts, walks, t, rng, teleport):
    pos = np.repeat(starts, walks)
    steps = rng.poisson(t, pos.size)
    for s in range(int(steps.max()) if steps.size else 0):
        active = np.flatnonzero(steps > s)
        pos[active] = _step(tv, cum, pos[active], rng, teleport)
    return pos


def sampled_entropy_rate(tv: TransitionView, visit_rates, t: float, starts: int = 200,
                         walks: int = 5000, rng=None, teleport: float = 0.0,
                         batch_walkers: int = 2_000_000) -> EntropySample:
    """Estimate the entropy rate by simulating the continuous-time walk.

    Start nodes are drawn proportional to ``visit_rates``; from each, ``walks``
    walks of Poisson(``t``) steps are run (zero steps allowed), and the
    plug-in entropy of the end-node distribution is averaged over starts.
    """
    if starts < 1 or walks < 1:
        raise ValueError("starts and walks must be at least 1")
    if not t > 0:
        raise ValueError("Markov time must be positive")
    rng = np.random.default_rng(rng)
    p = np.asarray(visit_rates, dtype=np.float64)
    start_nodes = rng.choice(p.size, size=starts, p=p / p.sum())
    cum = _cumulative(tv)
    per_batch = max(1, batch_walkers // walks)
    ent = np.empty(starts)
    for lo in range(0, starts, per_batch):
        chunk = start_nodes[lo:lo + per_batch]
        ends = _end_nodes(tv, cum, chunk, walks, t, rng, teleport)
        owner = np.repeat(np.arange(chunk.size), walks)
        key, counts = np.unique(owner * p.size + ends, return_counts=True)
        grp = key // p.size
        q = counts / walks
        ent[lo:lo + chunk.size] = np.bincount(grp, weights=-q * np.log2(q), minlength=chunk.size)
    se = float(ent.std(ddof=1) / np.sqrt(starts)) if starts > 1 else 0.0
    return EntropySample(float(t), max(float(ent.mean()), 0.0), starts, walks, se)


def compression_gap(codelength: float, entropy_rate: float) -> float:
    """Absolute compression gap; may be negative."""
    return codelength - entropy_rate


SWEEP_COLUMNS = ("t", "L_two_level", "h", "gap", "modules")


def format_gap_csv(rows) -> str:
    """CSV of sweep rows ``(t, L, h, gap, modules[, stderr])``; ``h`` and
    ``gap`` may be None."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    with_se = any(len(r) > 5 for r in rows)
    writer.writerow(SWEEP_COLUMNS + (("stderr",) if with_se else ()))

    def fmt(x):
        return "" if x is None else f"{x:.10g}"

    for r in rows:
        t, L, h, gap, modules = r[:5]
        line = [fmt(t), fmt(L), fmt(h), fmt(gap), modules]
        if with_se:
            line.append(fmt(r[5] if len(r) > 5 else None))
        writer.writerow(line)
    return buf.getvalue()
