"""Synthetic fixtures and the bipartite community benchmark."""

from __future__ import annotations

import csv
import io
import itertools
import logging
import time
from dataclasses import dataclass

import numpy as np

from .flow import bipartite_flow_model, build_flow_model
from .mapeq import Partition
from .metrics import nmi
from .network import FEATURE, PRIMARY, Network
from .projection import FastProjectionParams, fast_projection
from .search import SearchConfig, optimize

logger = logging.getLogger(__name__)

DETECTORS = ("unipartite", "bipartite", "fast-projection")


@dataclass(frozen=True)
class BipartiteBenchmarkSpec:
    communities: int = 32
    primaries_per_community: int = 32
    k: int = 16
    k_in: int = 15
    feature_count: int = 1024
    seed: int = 123

    def __post_init__(self):
        if not 1 <= self.k_in <= self.k:
            raise ValueError("need 1 <= k_in <= k")
        if self.feature_count < self.communities:
            raise ValueError("every community needs at least one feature")
        if self.communities < 1 or self.primaries_per_community < 1:
            raise ValueError("communities and primaries_per_community must be positive")


def feature_blocks(communities: int, feature_count: int) -> np.ndarray:
    """Community of every feature: even split, remainder to the lowest ids."""
    base, extra = divmod(feature_count, communities)
    sizes = np.full(communities, base)
    sizes[:extra] += 1
    return np.repeat(np.arange(communities), sizes)


def generate_bipartite_benchmark(spec: BipartiteBenchmarkSpec) -> tuple[Network, Partition]:
    """Planted-community bipartite network.

    Every primary links to ``k_in`` distinct features of its own community
    and ``k - k_in`` distinct features of other communities, all unweighted.
    Primaries come first (community-major), then features. Ground truth
    labels both primaries and features.
    """
    c, ppc = spec.communities, spec.primaries_per_community
    n_p = c * ppc
    fcomm = feature_blocks(c, spec.feature_count)
    fstart = np.concatenate([[0], np.cumsum(np.bincount(fcomm, minlength=c))])
    k_out = spec.k - spec.k_in
    if np.any(np.diff(fstart) < spec.k_in):
        raise ValueError("k_in exceeds the number of features in a community")
    if k_out and spec.feature_count - np.diff(fstart).max() < k_out:
        raise ValueError("not enough features outside a community for k - k_in links")
    rng = np.random.default_rng(spec.seed)
    src = np.empty(n_p * spec.k, dtype=np.int64)
    dst = np.empty(n_p * spec.k, dtype=np.int64)
    pos = 0
    for comm in range(c):
        lo, hi = fstart[comm], fstart[comm + 1]
        size = hi - lo
        outside = spec.feature_count - size
        for a in range(comm * ppc, (comm + 1) * ppc):
            inside = lo + rng.choice(size, spec.k_in, replace=False)
            chosen = [inside]
            if k_out:
                o = rng.choice(outside, k_out, replace=False)
                chosen.append(np.where(o < lo, o, o + size))
            feats = np.concatenate(chosen)
            src[pos:pos + spec.k] = a
            dst[pos:pos + spec.k] = n_p + feats
            pos += spec.k
    role = np.concatenate([np.full(n_p, PRIMARY), np.full(spec.feature_count, FEATURE)])
    net = Network(n_p + spec.feature_count, src, dst, np.ones(src.size), directed=False,
                  node_role=role)
    truth = Partition(np.concatenate([np.repeat(np.arange(c), ppc), fcomm]))
    return net, truth


def generate_sierpinski(levels: int, base_weight: float = 1.0) -> tuple[Network, dict]:
    """Sierpinski-style network of nested triangles.

    Level 1 is a triangle; level ``l`` joins three level ``l-1`` copies with
    one corner-to-corner link per pair. Returns the network and the named
    candidate partitions, ordered from finest to coarsest: singletons,
    ``level-1`` .. ``level-<levels>`` groupings and ``one-module`` (which
    coincides with the top grouping).
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")

    def unit(level, offset):
        if level == 1:
            nodes = [offset, offset + 1, offset + 2]
            links = [(nodes[0], nodes[1]), (nodes[1], nodes[2]), (nodes[0], nodes[2])]
            return links, nodes, 3
        links, corners, size = [], [], 0
        parts = []
        for j in range(3):
            sub_links, sub_corners, sub_size = unit(level - 1, offset + size)
            links += sub_links
            parts.append(sub_corners)
            size += sub_size
        links += [(parts[0][1], parts[1][0]), (parts[1][2], parts[2][1]),
                  (parts[2][0], parts[0][2])]
        corners = [parts[0][0], parts[1][1], parts[2][2]]
        return links, corners, size

    links, _, n = unit(levels, 0)
    src, dst = zip(*links)
    net = Network(n, src, dst, np.full(len(links), float(base_weight)))
    candidates = {"singletons": Partition.singletons(n)}
    for lvl in range(1, levels + 1):
        candidates[f"level-{lvl}"] = Partition(np.arange(n) // 3 ** lvl)
    candidates["one-module"] = Partition.one_module(n)
    return net, candidates


@dataclass(frozen=True)
class SchematicBipartiteSpec:
    communities: int = 2
    primaries: int = 8
    features: int = 8
    w_in: float = 1.0
    w_out: float = 0.0

    def __post_init__(self):
        if not self.w_in > 0:
            raise ValueError("w_in must be positive")
        if self.w_out < 0:
            raise ValueError("w_out must be nonnegative")


def generate_schematic_bipartite(spec: SchematicBipartiteSpec) -> tuple[Network, dict]:
    """Complete bipartite blocks: weight ``w_in`` inside a community and
    ``w_out`` between communities (omitted when zero).

    Primaries come first, then features. Candidates are the one-module and
    community partitions over all nodes.
    """
    c, np_, nf = spec.communities, spec.primaries, spec.features
    n_p = c * np_
    pcomm = np.repeat(np.arange(c), np_)
    fcomm = np.repeat(np.arange(c), nf)
    src, dst, w = [], [], []
    for a, f in itertools.product(range(n_p), range(c * nf)):
        same = pcomm[a] == fcomm[f]
        wt = spec.w_in if same else spec.w_out
        if wt > 0:
            src.append(a)
            dst.append(n_p + f)
            w.append(wt)
    role = np.concatenate([np.full(n_p, PRIMARY), np.full(c * nf, FEATURE)])
    net = Network(n_p + c * nf, src, dst, w, directed=False, node_role=role)
    return net, {
        "one-module": Partition.one_module(net.node_count),
        "communities": Partition(np.concatenate([pcomm, fcomm])),
    }


def detect(net: Network, detector: str, cfg: SearchConfig,
           projection: FastProjectionParams | None = None,
           symmetrize_projection: bool = True) -> Partition:
    """Partition of the primary nodes of bipartite ``net`` by one detector.

    The fast-projection detector clusters the symmetrized projection unless
    ``symmetrize_projection`` is False: top-Y links are one-sided, and the
    directed graph splits into closed sink sets that the map equation would
    report as separate modules.
    """
    prim = net.primaries()
    if detector == "unipartite":
        res = optimize(build_flow_model(net, 1.0), cfg)
        return Partition(res.partition.module_of[prim])
    if detector == "bipartite":
        res = optimize(bipartite_flow_model(net), cfg)
        return Partition(res.partition.module_of[prim])
    if detector == "fast-projection":
        proj = fast_projection(net, projection or FastProjectionParams(seed=cfg.seed))
        if symmetrize_projection:
            proj = proj.symmetrized()
        return optimize(build_flow_model(proj, 1.0), cfg).partition
    raise ValueError(f"unknown detector {detector!r}; expected one of {DETECTORS}")


@dataclass
class SweepRow:
    k_in: int
    feature_count: int
    detector: str
    trial: int
    nmi: float
    modules: int
    seconds: float | None = None


def run_benchmark_sweep(k_in_values, feature_counts, detectors=DETECTORS, trials: int = 10,
                        seed: int = 123, communities: int = 32,
                        primaries_per_community: int = 32, k: int = 16,
                        search_trials: int = 1, projection: FastProjectionParams | None = None,
                        timing: bool = False) -> list[SweepRow]:
    """NMI against the planted primary communities for every grid point,
    detector and trial.

    Trial ``i`` at a grid point draws its network with seed ``seed + i``;
    all detectors see the same network. Feature nodes are left out of the
    comparison.
    """
    rows = []
    for k_in, fc in itertools.product(k_in_values, feature_counts):
        for trial in range(trials):
            spec = BipartiteBenchmarkSpec(communities, primaries_per_community, k, k_in, fc,
                                          seed + trial)
            net, truth = generate_bipartite_benchmark(spec)
            truth_p = Partition(truth.module_of[net.primaries()])
            cfg = SearchConfig(trials=search_trials, seed=seed + trial)
            for det in detectors:
                t0 = time.perf_counter()
                found = detect(net, det, cfg, projection)
                elapsed = time.perf_counter() - t0
                score = nmi(truth_p, found)
                logger.info("k_in=%d features=%d %s trial=%d nmi=%.4f", k_in, fc, det, trial,
                            score)
                rows.append(SweepRow(k_in, fc, det, trial, score, found.module_count,
                                     elapsed if timing else None))
    return rows


def summarize(rows: list[SweepRow]) -> dict:
    """Mean and standard deviation of NMI per ``(k_in, feature_count, detector)``."""
    groups = {}
    for r in rows:
        groups.setdefault((r.k_in, r.feature_count, r.detector), []).append(r.nmi)
    return {key: (float(np.mean(v)), float(np.std(v))) for key, v in groups.items()}


SWEEP_COLUMNS = ("k_in", "feature_count", "detector", "trial", "nmi", "modules", "seconds")


def format_sweep_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([r.k_in, r.feature_count, r.detector, r.trial, f"{r.nmi:.6f}",
                         r.modules, "" if r.seconds is None else f"{r.seconds:.3f}"])
    return buf.getvalue()
