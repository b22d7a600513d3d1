"""Tree files: one line per node, ``path flow "name" node_id``.

``path`` is the colon-separated, 1-based chain of module indices ending with
the node's index inside its leaf module, e.g. ``1:2:3 0.0384 "name" 7``.
Lines starting with ``#`` carry summary fields.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .io import ParseError
from .mapeq import Hierarchy, Partition


@dataclass
class TreeFile:
    paths: list
    flows: list
    names: list
    node_ids: list
    summary: dict = field(default_factory=dict)

    def hierarchy(self) -> Hierarchy:
        return Hierarchy([tuple(x - 1 for x in p) for p in self.paths])

    def aligned(self, order) -> Hierarchy:
        """Hierarchy with nodes listed in the order of ``order`` (node ids)."""
        index = {nid: i for i, nid in enumerate(self.node_ids)}
        missing = [nid for nid in order if nid not in index]
        if missing or len(order) != len(index):
            raise ValueError("tree files describe different node sets")
        return Hierarchy([tuple(x - 1 for x in self.paths[index[nid]]) for nid in order])


def format_tree(net, hierarchy: Hierarchy | Partition, visit_rate, summary: dict | None = None) -> str:
    if isinstance(hierarchy, Partition):
        hierarchy = Hierarchy.from_partition(hierarchy)
    lines = []
    for key, val in (summary or {}).items():
        lines.append(f"# {key} {val}")
    order = sorted(range(hierarchy.node_count), key=lambda i: hierarchy.paths[i])
    for i in order:
        path = ":".join(str(x + 1) for x in hierarchy.paths[i])
        name = net.name(i).replace('"', "'")
        lines.append(f'{path} {float(visit_rate[i]):.10g} "{name}" {net.label(i)}')
    return "\n".join(lines) + "\n"


def _node_id(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def read_tree(path) -> TreeFile:
    paths, flows, names, ids, summary = [], [], [], [], {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].strip().split(None, 1)
            if parts:
                summary[parts[0]] = parts[1] if len(parts) > 1 else ""
            continue
        try:
            parts = shlex.split(line)
        except ValueError:
            raise ParseError("unbalanced quotes", lineno) from None
        if len(parts) != 4:
            raise ParseError("expected 'path flow \"name\" node_id'", lineno)
        try:
            p = tuple(int(x) for x in parts[0].split(":"))
            flow = float(parts[1])
        except ValueError:
            raise ParseError(f"bad tree line {line!r}", lineno) from None
        if len(p) < 2 or min(p) < 1:
            raise ParseError(f"bad module path {parts[0]!r}", lineno)
        paths.append(p)
        flows.append(flow)
        names.append(parts[2])
        ids.append(_node_id(parts[3]))
    if len(set(ids)) != len(ids):
        raise ParseError("duplicate node ids in tree file")
    return TreeFile(paths, flows, names, ids, summary)


def tree_nmi(a: TreeFile, b: TreeFile, leaf: bool = False) -> float:
    """NMI between two tree files, matching nodes by id; compares top-level
    modules, or leaf modules when ``leaf`` is set."""
    from .metrics import nmi

    order = sorted(a.node_ids, key=lambda x: (isinstance(x, str), x))
    ha, hb = a.aligned(order), b.aligned(order)
    if leaf:
        return nmi(ha.leaf_partition(), hb.leaf_partition())
    return nmi(ha.top_partition(), hb.top_partition())


def partition_from_tree(tf: TreeFile) -> Partition:
    return Partition(np.array([p[0] for p in tf.paths]))
