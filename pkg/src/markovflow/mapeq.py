"""Map equation code lengths (in bits) for flat partitions and hierarchies."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .flow import FlowModel, plogp


@dataclass(frozen=True, eq=False)
class Partition:
    """Flat assignment of nodes to modules ``0 .. module_count - 1``."""

    module_of: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.module_of).ravel()
        _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
        # relabel by order of first appearance so equal partitions compare equal
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        module_of = rank[inv].astype(np.int64)
        module_of.setflags(write=False)
        object.__setattr__(self, "module_of", module_of)

    @property
    def module_count(self) -> int:
        return int(self.module_of.max()) + 1 if self.module_of.size else 0

    @property
    def node_count(self) -> int:
        return int(self.module_of.size)

    def modules(self) -> list[np.ndarray]:
        order = np.argsort(self.module_of, kind="stable")
        bounds = np.cumsum(np.bincount(self.module_of, minlength=self.module_count))
        return np.split(order, bounds[:-1])

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.module_of, other.module_of)

    def __hash__(self):
        return hash(self.module_of.tobytes())

    @classmethod
    def singletons(cls, n: int) -> Partition:
        return cls(np.arange(n))

    @classmethod
    def one_module(cls, n: int) -> Partition:
        return cls(np.zeros(n, dtype=np.int64))


class Hierarchy:
    """Rooted module tree with nodes as leaves.

    Each node is described by its path from the root: a tuple of child
    indices whose last entry is the node's position inside its leaf module.
    A module holds either submodules or nodes, never both.
    """

    def __init__(self, paths):
        paths = [tuple(int(x) for x in p) for p in paths]
        if not paths:
            raise ValueError("hierarchy must contain at least one node")
        if any(len(p) < 2 for p in paths):
            raise ValueError("every node path needs a module and a leaf index")
        if len(set(paths)) != len(paths):
            raise ValueError("duplicate node paths")
        leaf_modules = {p[:-1] for p in paths}
        inner = {p[:k] for p in paths for k in range(1, len(p) - 1)}
        clash = leaf_modules & inner
        if clash:
            raise ValueError(f"module {min(clash)} holds both nodes and submodules")
        self.paths = paths

    @property
    def node_count(self) -> int:
        return len(self.paths)

    @property
    def depth(self) -> int:
        """Number of tree levels including the root and the leaf nodes."""
        return 1 + max(len(p) for p in self.paths)

    @property
    def levels(self) -> int:
        """Number of module levels."""
        return self.depth - 2

    def module_path(self, node: int) -> tuple:
        return self.paths[node][:-1]

    def modules(self) -> list[tuple]:
        """All module paths (excluding the root), sorted."""
        return sorted({p[:k] for p in self.paths for k in range(1, len(p))})

    def leaf_partition(self) -> Partition:
        keys = sorted({p[:-1] for p in self.paths})
        index = {k: i for i, k in enumerate(keys)}
        return Partition([index[p[:-1]] for p in self.paths])

    def top_partition(self) -> Partition:
        return Partition([p[0] for p in self.paths])

    @classmethod
    def from_partition(cls, part: Partition) -> Hierarchy:
        counters = defaultdict(int)
        paths = []
        for m in part.module_of.tolist():
            paths.append((m, counters[m]))
            counters[m] += 1
        return cls(paths)

    @classmethod
    def from_module_paths(cls, module_paths) -> Hierarchy:
        """Build from per-node module paths (without leaf indices)."""
        counters = defaultdict(int)
        paths = []
        for mp in module_paths:
            mp = tuple(mp)
            paths.append(mp + (counters[mp],))
            counters[mp] += 1
        return cls(paths)

    def __eq__(self, other):
        return isinstance(other, Hierarchy) and self.paths == other.paths

    def __repr__(self):
        return f"Hierarchy(nodes={self.node_count}, levels={self.levels})"


@dataclass(frozen=True, eq=False)
class ModuleFlowStats:
    """Per-module flow statistics (arrays indexed by module).

    ``visit_plogp`` is the sum of ``p log2 p`` over the module's node visit
    rates, the only node-level quantity the module code length needs.
    """

    exit_rate: np.ndarray
    enter_rate: np.ndarray
    internal_visit_sum: np.ndarray
    visit_plogp: np.ndarray

    @property
    def codebook_rate(self) -> np.ndarray:
        return self.exit_rate + self.internal_visit_sum

    @property
    def module_count(self) -> int:
        return int(self.exit_rate.size)

    @classmethod
    def from_visits(cls, exit_rate, visits, enter_rate=None) -> ModuleFlowStats:
        """Stats of a single module from its exit rate and node visit rates."""
        visits = np.asarray(visits, dtype=np.float64)
        return cls(
            np.atleast_1d(np.float64(exit_rate)),
            np.atleast_1d(np.float64(exit_rate if enter_rate is None else enter_rate)),
            np.atleast_1d(visits.sum()),
            np.atleast_1d(plogp(visits).sum()),
        )


def module_stats(fm: FlowModel, part: Partition) -> ModuleFlowStats:
    """Exit/enter rates and internal visit sums for every module of ``part``.

    Rates come from the (already rescaled) link flows of ``fm``; zero-visit
    nodes contribute flows but no visits.
    """
    mod = part.module_of
    if mod.size != fm.node_count:
        raise ValueError("partition does not cover the flow model's nodes")
    m = part.module_count
    ms, mt = mod[fm.source], mod[fm.target]
    cross = ms != mt
    exit_rate = np.bincount(ms[cross], weights=fm.link_flow[cross], minlength=m)
    enter_rate = np.bincount(mt[cross], weights=fm.link_flow[cross], minlength=m)
    visits = np.bincount(mod, weights=fm.visit_rate, minlength=m)
    vplogp = np.bincount(mod, weights=fm.node_plogp, minlength=m)
    return ModuleFlowStats(exit_rate, enter_rate, visits, vplogp)


def module_codelength(stats: ModuleFlowStats) -> np.ndarray:
    """Entropy (bits) of each module codebook: its exit event plus node visits,
    normalized by the codebook rate. Zero for unused codebooks."""
    rate = stats.codebook_rate
    total = plogp(rate) - plogp(stats.exit_rate) - stats.visit_plogp
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(rate > 0, total / np.where(rate > 0, rate, 1.0), 0.0)
    return np.maximum(h, 0.0)


def entropy_bits(rates) -> tuple[float, float]:
    """``(sum, entropy in bits)`` of the distribution proportional to ``rates``."""
    rates = np.asarray(rates, dtype=np.float64)
    total = float(rates.sum())
    if total <= 0:
        return 0.0, 0.0
    h = (plogp(total) - plogp(rates).sum()) / total
    return total, max(float(h), 0.0)


def index_codelength(enter_rates) -> tuple[float, float]:
    """Usage rate and entropy of the index codebook over module entries."""
    if isinstance(enter_rates, ModuleFlowStats):
        enter_rates = enter_rates.enter_rate
    return entropy_bits(enter_rates)


def codelength_terms(stats: ModuleFlowStats) -> tuple[float, float]:
    """Index and module parts of the two-level code length.

    Uses the expanded form ``rate * H = plogp(rate) - sum plogp(events)``,
    which is what :func:`hierarchical_map_equation` evaluates as well.
    """
    enter = stats.enter_rate
    index = float(plogp(enter.sum()) - plogp(enter).sum())
    modules = float(
        (plogp(stats.codebook_rate) - plogp(stats.exit_rate) - stats.visit_plogp).sum()
    )
    return index, modules


def map_equation(fm: FlowModel, part: Partition) -> float:
    """Two-level code length in bits at the flow model's Markov time."""
    index, modules = codelength_terms(module_stats(fm, part))
    return max(index + modules, 0.0)


def one_module_codelength(fm: FlowModel) -> float:
    return float(-fm.node_plogp.sum())


def _module_boundary_flows(fm: FlowModel, h: Hierarchy):
    """Exit and enter flow per module path."""
    mpaths = [h.module_path(i) for i in range(h.node_count)]
    exit_flow = defaultdict(float)
    enter_flow = defaultdict(float)
    for s, d, f in zip(fm.source.tolist(), fm.target.tolist(), fm.link_flow.tolist()):
        a, b = mpaths[s], mpaths[d]
        if a == b:
            continue
        k = 0
        stop = min(len(a), len(b))
        while k < stop and a[k] == b[k]:
            k += 1
        for j in range(k + 1, len(a) + 1):
            exit_flow[a[:j]] += f
        for j in range(k + 1, len(b) + 1):
            enter_flow[b[:j]] += f
    return exit_flow, enter_flow


def hierarchical_map_equation(fm: FlowModel, h: Hierarchy) -> float:
    """Multilevel code length in bits.

    The root index codebook encodes entries into top modules. Every other
    internal module has a codebook with its own exit event and entries into
    its submodules; leaf modules encode their exit event and node visits.
    """
    if h.node_count != fm.node_count:
        raise ValueError("hierarchy does not cover the flow model's nodes")
    exit_flow, enter_flow = _module_boundary_flows(fm, h)
    children = defaultdict(set)
    leaf_plogp = defaultdict(float)
    leaf_visits = defaultdict(float)
    for i, p in enumerate(h.paths):
        mp = p[:-1]
        for k in range(1, len(mp) + 1):
            children[mp[:k - 1]].add(mp[:k])
        leaf_plogp[mp] += fm.node_plogp[i]
        leaf_visits[mp] += fm.visit_rate[i]
    root_enters = np.array([enter_flow[c] for c in sorted(children[()])])
    index = float(plogp(root_enters.sum()) - plogp(root_enters).sum())
    inner = 0.0
    for parent in sorted(children):
        if not parent:
            continue
        enters = np.array([enter_flow[c] for c in sorted(children[parent])])
        own_exit = exit_flow[parent]
        inner += float(plogp(own_exit + enters.sum()) - plogp(own_exit) - plogp(enters).sum())
    leaves = sorted(leaf_plogp)
    exits = np.array([exit_flow[k] for k in leaves])
    visits = np.array([leaf_visits[k] for k in leaves])
    vp = np.array([leaf_plogp[k] for k in leaves])
    modules = float((plogp(exits + visits) - plogp(exits) - vp).sum())
    return max(index + inner + modules, 0.0)
