"""Local-move machinery for minimizing two-level map-equation objectives.

The objective handled here is, with module exit/enter rates ``x``/``e`` and
summed node weights ``f``::

    plogp(offset + sum e) - sum plogp(e) - sum plogp(x) + sum plogp(x + f) - C

where ``C`` is the (partition independent) node term. ``offset`` is the exit
rate of an enclosing module when searching inside it, and zero at the root.
Node out/in totals may exceed the flow on listed links; the excess is
boundary flow to the world outside the searched subnetwork.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numba import njit

_LOG2E = 1.0 / np.log(2.0)


@njit(cache=True, inline="always")
def _plogp(x):
    if x <= 0.0:
        return 0.0
    return x * np.log(x) * 1.4426950408889634


@njit(cache=True)
def _move_pass(order, optr, oidx, ow, iptr, iidx, iw, node_flow, out_tot, in_tot,
               mod, m_exit, m_enter, m_flow, m_size, state, offset, min_delta,
               acc_out, acc_in, mark, touched):
    moved = 0
    total = 0.0
    for pos in range(order.shape[0]):
        u = order[pos]
        a = mod[u]
        nt = 0
        stamp = pos + 1
        mark[a] = stamp
        acc_out[a] = 0.0
        acc_in[a] = 0.0
        touched[nt] = a
        nt += 1
        for k in range(optr[u], optr[u + 1]):
            m = mod[oidx[k]]
            if mark[m] != stamp:
                mark[m] = stamp
                acc_out[m] = 0.0
                acc_in[m] = 0.0
                touched[nt] = m
                nt += 1
            acc_out[m] += ow[k]
        for k in range(iptr[u], iptr[u + 1]):
            m = mod[iidx[k]]
            if mark[m] != stamp:
                mark[m] = stamp
                acc_out[m] = 0.0
                acc_in[m] = 0.0
                touched[nt] = m
                nt += 1
            acc_in[m] += iw[k]
        if nt == 1:
            continue

        enter_total = state[0]
        fu = node_flow[u]
        ou = out_tot[u]
        iu = in_tot[u]
        ex_a, en_a, fl_a = m_exit[a], m_enter[a], m_flow[a]
        if m_size[a] == 1:
            ex_a2 = 0.0
            en_a2 = 0.0
            fl_a2 = 0.0
        else:
            ex_a2 = ex_a - ou + acc_out[a] + acc_in[a]
            en_a2 = en_a - iu + acc_in[a] + acc_out[a]
            fl_a2 = fl_a - fu
        base_a = -_plogp(en_a) - _plogp(ex_a) + _plogp(ex_a + fl_a)
        new_a = -_plogp(en_a2) - _plogp(ex_a2) + _plogp(ex_a2 + fl_a2)
        idx_old = _plogp(offset + enter_total)

        best = 0.0
        best_b = -1
        best_ex = 0.0
        best_en = 0.0
        for j in range(1, nt):
            b = touched[j]
            ex_b, en_b, fl_b = m_exit[b], m_enter[b], m_flow[b]
            ex_b2 = ex_b + ou - acc_out[b] - acc_in[b]
            en_b2 = en_b + iu - acc_in[b] - acc_out[b]
            fl_b2 = fl_b + fu
            et2 = enter_total - en_a - en_b + en_a2 + en_b2
            delta = (_plogp(offset + et2) - idx_old
                     + new_a - base_a
                     - _plogp(en_b2) - _plogp(ex_b2) + _plogp(ex_b2 + fl_b2)
                     + _plogp(en_b) + _plogp(ex_b) - _plogp(ex_b + fl_b))
            if best_b < 0 or delta < best or (delta == best and b < best_b):
                best = delta
                best_b = b
                best_ex = ex_b2
                best_en = en_b2
        if best_b >= 0 and best < -min_delta:
            b = best_b
            state[0] = enter_total - en_a - m_enter[b] + en_a2 + best_en
            m_exit[a] = ex_a2
            m_enter[a] = en_a2
            m_flow[a] = fl_a2
            m_size[a] -= 1
            m_exit[b] = best_ex
            m_enter[b] = best_en
            m_flow[b] += fu
            m_size[b] += 1
            mod[u] = b
            moved += 1
            total += best
    return moved, total


@dataclass
class FlowGraph:
    """Directed flow graph in the form the local-move kernel consumes."""

    node_flow: np.ndarray
    out_tot: np.ndarray
    in_tot: np.ndarray
    source: np.ndarray
    target: np.ndarray
    flow: np.ndarray
    node_term: float
    offset: float = 0.0

    def __post_init__(self):
        n = self.node_flow.size
        keep = self.source != self.target
        src, dst, w = self.source[keep], self.target[keep], self.flow[keep]
        out = sp.csr_matrix((w, (src, dst)), shape=(n, n))
        inn = sp.csr_matrix((w, (dst, src)), shape=(n, n))
        out.sum_duplicates()
        inn.sum_duplicates()
        self.optr, self.oidx, self.ow = out.indptr.astype(np.int64), out.indices.astype(np.int64), out.data
        self.iptr, self.iidx, self.iw = inn.indptr.astype(np.int64), inn.indices.astype(np.int64), inn.data
        o = out.tocoo()
        self.source, self.target, self.flow = o.row.astype(np.int64), o.col.astype(np.int64), o.data

    @property
    def n(self) -> int:
        return int(self.node_flow.size)

    @classmethod
    def from_flow_model(cls, fm) -> FlowGraph:
        keep = fm.source != fm.target
        out_tot = np.bincount(fm.source[keep], weights=fm.link_flow[keep], minlength=fm.node_count)
        in_tot = np.bincount(fm.target[keep], weights=fm.link_flow[keep], minlength=fm.node_count)
        return cls(np.asarray(fm.visit_rate, dtype=np.float64), out_tot, in_tot,
                   fm.source, fm.target, fm.link_flow, float(fm.node_plogp.sum()))

    def subgraph(self, nodes: np.ndarray, offset: float, node_term: float) -> FlowGraph:
        """Induced subgraph on ``nodes``; boundary flow stays in the totals."""
        local = np.full(self.n, -1, dtype=np.int64)
        local[nodes] = np.arange(nodes.size)
        keep = (local[self.source] >= 0) & (local[self.target] >= 0)
        return FlowGraph(self.node_flow[nodes], self.out_tot[nodes], self.in_tot[nodes],
                         local[self.source[keep]], local[self.target[keep]], self.flow[keep],
                         node_term, offset)

    def module_rates(self, mod: np.ndarray, k: int):
        """Exit, enter and flow sums for labels ``mod`` in ``[0, k)``."""
        ms, mt = mod[self.source], mod[self.target]
        internal = ms == mt
        int_flow = np.bincount(ms[internal], weights=self.flow[internal], minlength=k)
        exit_ = np.bincount(mod, weights=self.out_tot, minlength=k) - int_flow
        enter = np.bincount(mod, weights=self.in_tot, minlength=k) - int_flow
        flow = np.bincount(mod, weights=self.node_flow, minlength=k)
        # clean tiny negative round-off
        return np.maximum(exit_, 0.0), np.maximum(enter, 0.0), flow

    def codelength(self, mod: np.ndarray) -> float:
        mod = compact(mod)
        k = int(mod.max()) + 1 if mod.size else 0
        ex, en, fl = self.module_rates(mod, k)
        val = (_plogp_vec(self.offset + en.sum()) - _plogp_vec(en).sum()
               - _plogp_vec(ex).sum() + _plogp_vec(ex + fl).sum() - self.node_term)
        return float(val)

    def aggregate(self, mod: np.ndarray) -> tuple[FlowGraph, np.ndarray]:
        """Collapse modules into nodes; returns the coarse graph and labels."""
        mod = compact(mod)
        k = int(mod.max()) + 1
        ex, en, fl = self.module_rates(mod, k)
        coarse = FlowGraph(fl, ex, en, mod[self.source], mod[self.target], self.flow,
                           self.node_term, self.offset)
        return coarse, mod


def _plogp_vec(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos]) * _LOG2E
    return out


def compact(labels: np.ndarray) -> np.ndarray:
    """Relabel to ``0..k-1`` in order of first appearance."""
    labels = np.asarray(labels, dtype=np.int64)
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inv.ravel()]


class MoveState:
    """Module bookkeeping for repeated local-move passes on one graph."""

    def __init__(self, g: FlowGraph, mod: np.ndarray):
        n = g.n
        self.g = g
        self.mod = compact(mod).copy()
        k = int(self.mod.max()) + 1 if n else 0
        ex, en, fl = g.module_rates(self.mod, k)
        self.m_exit = np.zeros(n)
        self.m_enter = np.zeros(n)
        self.m_flow = np.zeros(n)
        self.m_size = np.zeros(n, dtype=np.int64)
        self.m_exit[:k], self.m_enter[:k], self.m_flow[:k] = ex, en, fl
        self.m_size[:k] = np.bincount(self.mod, minlength=k)
        self.state = np.array([self.m_enter.sum()])
        self._acc_out = np.zeros(n)
        self._acc_in = np.zeros(n)
        self._mark = np.zeros(n, dtype=np.int64)
        self._touched = np.zeros(n, dtype=np.int64)

    def move_pass(self, order: np.ndarray, min_delta: float = 1e-13) -> tuple[int, float]:
        g = self.g
        self._mark[:] = 0
        moved, delta = _move_pass(
            np.ascontiguousarray(order, dtype=np.int64),
            g.optr, g.oidx, g.ow, g.iptr, g.iidx, g.iw,
            g.node_flow, g.out_tot, g.in_tot,
            self.mod, self.m_exit, self.m_enter, self.m_flow, self.m_size,
            self.state, float(g.offset), float(min_delta),
            self._acc_out, self._acc_in, self._mark, self._touched,
        )
        return int(moved), float(delta)
