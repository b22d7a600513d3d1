"""Minimizing the map equation: local moves, aggregation, fine-tuning,
multi-trial restarts and recursive multilevel refinement."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ._engine import FlowGraph, MoveState, compact, _plogp_vec
from .flow import FlowModel
from .mapeq import Hierarchy, Partition, hierarchical_map_equation, map_equation

logger = logging.getLogger(__name__)

MODES = ("two-level", "multilevel")


@dataclass(frozen=True)
class SearchConfig:
    trials: int = 10
    seed: int = 123
    tune_iterations: int = 10
    min_improvement: float = 1e-10
    mode: str = "two-level"
    max_passes: int = 200

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.min_improvement > 0:
            raise ValueError("min_improvement must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass
class SearchResult:
    partition: Partition
    codelength: float
    hierarchy: Hierarchy | None = None
    trial_codelengths: list = field(default_factory=list)

    @property
    def module_count(self) -> int:
        return self.partition.module_count

    @property
    def levels(self) -> int:
        return 1 if self.hierarchy is None else self.hierarchy.levels


def _run_moves(state: MoveState, rng, min_improvement, max_passes) -> tuple[int, float]:
    moves = 0
    total = 0.0
    for _ in range(max_passes):
        order = rng.permutation(state.g.n)
        moved, delta = state.move_pass(order)
        moves += moved
        total += delta
        if moved == 0 or -delta < min_improvement:
            break
    return moves, total


def _coarsen(g: FlowGraph, init: np.ndarray, rng, cfg: SearchConfig) -> np.ndarray:
    """Local moves from ``init``, then repeated aggregation and moves on the
    coarse graphs until nothing merges."""
    cur_g, cur_mod = g, compact(init)
    assign = None  # fine node -> node of cur_g
    while True:
        state = MoveState(cur_g, cur_mod)
        moves, _ = _run_moves(state, rng, cfg.min_improvement, cfg.max_passes)
        cur_mod = state.mod
        fine_mod = cur_mod if assign is None else cur_mod[assign]
        if assign is not None and moves == 0:
            break
        coarse, labels = cur_g.aggregate(cur_mod)
        if coarse.n == cur_g.n or coarse.n == 1:
            break
        assign = labels if assign is None else labels[assign]
        cur_g, cur_mod = coarse, np.arange(coarse.n)
    return compact(fine_mod)


def _search_graph(g: FlowGraph, rng, cfg: SearchConfig) -> tuple[np.ndarray, float]:
    mod = np.arange(g.n)
    best = g.codelength(mod)
    for _ in range(max(cfg.tune_iterations, 1)):
        cand = _coarsen(g, mod, rng, cfg)
        val = g.codelength(cand)
        if val < best - cfg.min_improvement:
            mod, best = cand, val
        else:
            if val <= best:
                mod, best = cand, val
            break
    return compact(mod), best


def _best_of_trials(g: FlowGraph, cfg: SearchConfig, seed_offset: int = 0):
    best_mod, best_val, vals = None, np.inf, []
    for trial in range(cfg.trials):
        rng = np.random.default_rng(cfg.seed + seed_offset + trial)
        mod, val = _search_graph(g, rng, cfg)
        vals.append(val)
        if val < best_val - 1e-12:
            best_mod, best_val = mod, val
    return best_mod, best_val, vals


def optimize(fm: FlowModel, cfg: SearchConfig | None = None) -> SearchResult:
    """Best-of-trials minimization of the map equation for ``fm``.

    Trial ``i`` uses the generator seeded with ``cfg.seed + i``; ties between
    trials go to the lowest index. The reported code length is recomputed
    from the returned partition (or hierarchy).
    """
    cfg = cfg or SearchConfig()
    if fm.node_count == 0:
        raise ValueError("empty flow model")
    g = FlowGraph.from_flow_model(fm)
    mod, best, vals = _best_of_trials(g, cfg)
    # pairwise merges can stall where merging everything would pay off
    one = np.zeros(g.n, dtype=np.int64)
    if g.codelength(one) < best - 1e-12:
        mod = one
    part = Partition(mod)
    if cfg.mode == "two-level":
        return SearchResult(part, map_equation(fm, part), None, vals)
    tree = _build_hierarchy(g, np.asarray(fm.node_plogp), part, cfg)
    h = Hierarchy.from_module_paths(tree)
    return SearchResult(h.top_partition(), hierarchical_map_equation(fm, h), h, vals)


def local_move_pass(fm: FlowModel, part: Partition, rng) -> tuple[Partition, float]:
    """One pass of single-node moves in random order.

    Returns the new partition and the incrementally tracked change in code
    length (never positive).
    """
    g = FlowGraph.from_flow_model(fm)
    state = MoveState(g, part.module_of)
    _, delta = state.move_pass(rng.permutation(g.n))
    return Partition(state.mod), delta


def aggregate(fm: FlowModel, part: Partition) -> tuple[FlowModel, np.ndarray]:
    """Collapse each module into one node.

    Internal module flow is kept as a self-link, and each coarse node carries
    the ``p log p`` sum of its members so code lengths are preserved.
    Returns the coarse model and the fine-to-coarse node mapping.
    """
    mod = part.module_of
    k = part.module_count
    visit = np.bincount(mod, weights=fm.visit_rate, minlength=k)
    nplogp = np.bincount(mod, weights=fm.node_plogp, minlength=k)
    ms, mt = mod[fm.source], mod[fm.target]
    key, inv = np.unique(ms * k + mt, return_inverse=True)
    flow = np.bincount(inv.ravel(), weights=fm.link_flow, minlength=key.size)
    role = None
    return (FlowModel(visit, key // k, key % k, flow, fm.markov_time, role, nplogp),
            mod.copy())


# --- multilevel refinement -------------------------------------------------

class _Module:
    """Module of the hierarchy under construction; ``nodes`` covers the whole
    subtree."""

    __slots__ = ("nodes", "children", "exit", "enter")

    def __init__(self, nodes, exit_, enter, children=None):
        self.nodes = nodes
        self.exit = float(exit_)
        self.enter = float(enter)
        self.children = children


def _split(g: FlowGraph, term: np.ndarray, m: _Module, cfg: SearchConfig, depth: int,
           max_depth: int) -> None:
    """Replace leaf module ``m`` by submodules if that shortens the code."""
    if depth >= max_depth or m.nodes.size < 2:
        return
    node_term = float(term[m.nodes].sum())
    sub = g.subgraph(m.nodes, m.exit, node_term)
    if sub.source.size == 0:
        return
    mod, val, _ = _best_of_trials(sub, cfg, seed_offset=1000 * depth + 7)
    k = int(mod.max()) + 1
    if k < 2:
        return
    # codebook cost of m as a leaf vs as a parent of k leaves
    visits = g.node_flow[m.nodes].sum()
    leaf_cost = float(_plogp_vec(m.exit + visits) - _plogp_vec(m.exit)) - node_term
    split_cost = val - float(_plogp_vec(m.exit))
    if split_cost >= leaf_cost - cfg.min_improvement:
        return
    ex, en, _ = sub.module_rates(mod, k)
    m.children = [_Module(m.nodes[mod == j], ex[j], en[j]) for j in range(k)]
    for child in m.children:
        _split(g, term, child, cfg, depth + 1, max_depth)


def _group_top(g: FlowGraph, top: list, cfg: SearchConfig) -> list:
    """Group top modules into super-modules while that shortens the code.

    Only the root index codebook changes: the super-module codebooks encode
    their exit plus entries into member modules.
    """
    while len(top) > 2:
        idx = np.empty(g.n, dtype=np.int64)
        for j, m in enumerate(top):
            idx[m.nodes] = j
        coarse, _ = g.aggregate(idx)
        enter = np.array([m.enter for m in top])
        mg = FlowGraph(enter, coarse.out_tot, coarse.in_tot, coarse.source, coarse.target,
                       coarse.flow, float(_plogp_vec(enter).sum()))
        old = float(_plogp_vec(enter.sum()) - _plogp_vec(enter).sum())
        mod, val, _ = _best_of_trials(mg, cfg, seed_offset=99991)
        k = int(mod.max()) + 1
        if k < 2 or k >= len(top) or val >= old - cfg.min_improvement:
            break
        ex, en, _ = mg.module_rates(mod, k)
        grouped = []
        for j in range(k):
            members = [top[i] for i in np.flatnonzero(mod == j)]
            nodes = np.concatenate([m.nodes for m in members])
            grouped.append(_Module(nodes, ex[j], en[j], members))
        top = grouped
    return top


def _build_hierarchy(g: FlowGraph, term: np.ndarray, part: Partition, cfg: SearchConfig,
                     max_depth: int = 8) -> list:
    k = part.module_count
    ex, en, _ = g.module_rates(part.module_of, k)
    top = [_Module(nodes, ex[j], en[j]) for j, nodes in enumerate(part.modules())]
    for m in top:
        _split(g, term, m, cfg, 1, max_depth)
    top = _group_top(g, top, cfg)
    paths = [None] * g.n

    def walk(m, prefix):
        if m.children is None:
            for v in m.nodes.tolist():
                paths[v] = prefix
        else:
            for j, c in enumerate(m.children):
                walk(c, prefix + (j,))

    for j, m in enumerate(top):
        walk(m, (j,))
    return paths
