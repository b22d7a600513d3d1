"""Reading and writing networks: edge lists, Pajek and bipartite edge lists."""

from __future__ import annotations

import shlex
from pathlib import Path

import numpy as np

from .network import FEATURE, PRIMARY, Network, NetworkError

FORMATS = ("edge-list", "pajek", "bipartite-edge-list")


class ParseError(ValueError):
    """Malformed network file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _parse_weight(tok: str, lineno: int) -> float:
    try:
        w = float(tok)
    except ValueError:
        raise ParseError(f"bad weight {tok!r}", lineno) from None
    if not w > 0 or not np.isfinite(w):
        raise ParseError(f"non-positive weight {tok!r}", lineno)
    return w


def _sort_ids(ids):
    try:
        return sorted(ids, key=int)
    except ValueError:
        return sorted(ids)


def _as_label(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def _read_edges(lines, start_lineno=1):
    edges = []
    for lineno, raw in enumerate(lines, start_lineno):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError("expected 'source target [weight]'", lineno)
        w = _parse_weight(parts[2], lineno) if len(parts) == 3 else 1.0
        edges.append((parts[0], parts[1], w, lineno))
    return edges


def _build(edges, directed, node_role_of=None, extra_nodes=()):
    seen = {}
    for s, d, _, _ in edges:
        seen.setdefault(s, None)
        seen.setdefault(d, None)
    for tok in extra_nodes:
        seen.setdefault(tok, None)
    order = _sort_ids(seen)
    index = {tok: i for i, tok in enumerate(order)}
    src = np.array([index[e[0]] for e in edges], dtype=np.int64)
    dst = np.array([index[e[1]] for e in edges], dtype=np.int64)
    w = np.array([e[2] for e in edges], dtype=np.float64)
    role = None
    if node_role_of is not None:
        role = np.array([node_role_of(tok) for tok in order], dtype=np.int8)
        for s, d, _, lineno in edges:
            if node_role_of(s) == node_role_of(d):
                raise ParseError(f"same-role link {s} {d}", lineno)
    return Network(len(order), src, dst, w, directed=directed,
                   node_ids=[_as_label(t) for t in order], node_role=role)


def read_edge_list(lines, directed: bool = False) -> Network:
    return _build(_read_edges(lines), directed)


def read_bipartite_edge_list(lines) -> Network:
    lines = list(lines)
    boundary = None
    body_start = 0
    for i, raw in enumerate(lines):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].lower() != "*bipartite" or len(parts) != 2:
            raise ParseError("expected '*Bipartite <first-feature-id>' directive", i + 1)
        try:
            boundary = int(parts[1])
        except ValueError:
            raise ParseError(f"bad feature boundary {parts[1]!r}", i + 1) from None
        body_start = i + 1
        break
    if boundary is None:
        raise ParseError("missing '*Bipartite' directive")
    edges = _read_edges(lines[body_start:], body_start + 1)
    for s, d, _, lineno in edges:
        for tok in (s, d):
            try:
                int(tok)
            except ValueError:
                raise ParseError(f"bipartite node ids must be integers, got {tok!r}",
                                 lineno) from None

    def role_of(tok):
        return FEATURE if int(tok) >= boundary else PRIMARY

    return _build(edges, False, role_of)


def read_pajek(lines) -> Network:
    n = None
    names = {}
    edges = []
    section = None
    directed = False
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("*"):
            head = line.split()
            key = head[0].lower()
            if key == "*vertices":
                try:
                    n = int(head[1])
                except (IndexError, ValueError):
                    raise ParseError("expected '*Vertices N'", lineno) from None
                section = "vertices"
            elif key in ("*edges", "*arcs"):
                section = key[1:]
                directed = directed or key == "*arcs"
            else:
                raise ParseError(f"unknown section {head[0]!r}", lineno)
            continue
        if section == "vertices":
            try:
                parts = shlex.split(line)
            except ValueError:
                raise ParseError("unbalanced quotes", lineno) from None
            try:
                vid = int(parts[0])
            except ValueError:
                raise ParseError(f"bad vertex id {parts[0]!r}", lineno) from None
            if n is not None and not 1 <= vid <= n:
                raise ParseError(f"vertex id {vid} outside 1..{n}", lineno)
            names[vid] = parts[1] if len(parts) > 1 else str(vid)
        elif section in ("edges", "arcs"):
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ParseError("expected 'source target [weight]'", lineno)
            try:
                s, d = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError("pajek link endpoints must be integers", lineno) from None
            if n is not None and not (1 <= s <= n and 1 <= d <= n):
                raise ParseError(f"link endpoint outside 1..{n}", lineno)
            w = _parse_weight(parts[2], lineno) if len(parts) == 3 else 1.0
            edges.append((s, d, w, section))
        else:
            raise ParseError("data before any section header", lineno)
    if n is None:
        raise ParseError("missing '*Vertices' section")
    src, dst, w = [], [], []
    for s, d, wt, sec in edges:
        src.append(s - 1)
        dst.append(d - 1)
        w.append(wt)
        if directed and sec == "edges" and s != d:
            src.append(d - 1)
            dst.append(s - 1)
            w.append(wt)
    node_names = [names.get(i, str(i)) for i in range(1, n + 1)]
    return Network(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                   np.array(w, dtype=np.float64), directed=directed,
                   node_names=node_names, node_ids=list(range(1, n + 1)))


def load_network(path, format: str = "edge-list", directed: bool = False) -> Network:
    """Load a network file.

    Parameters
    ----------
    path : path-like
    format : {'edge-list', 'pajek', 'bipartite-edge-list'}
    directed : bool
        Only used for plain edge lists; Pajek infers it from ``*Arcs``.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    text = Path(path).read_text().splitlines()
    try:
        if format == "edge-list":
            return read_edge_list(text, directed=directed)
        if format == "bipartite-edge-list":
            return read_bipartite_edge_list(text)
        return read_pajek(text)
    except NetworkError as exc:
        raise ParseError(str(exc)) from exc


def sniff_format(path) -> str:
    """Guess the format from the first non-comment line."""
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head = line.split()[0].lower()
            if head == "*bipartite":
                return "bipartite-edge-list"
            if head.startswith("*"):
                return "pajek"
            return "edge-list"
    return "edge-list"


def _fmt(x: float) -> str:
    return repr(float(x))


def format_edge_list(net: Network) -> str:
    out = []
    if net.is_bipartite:
        feats = net.features()
        first = net.label(int(feats[0])) if feats.size else net.node_count
        out.append(f"*Bipartite {first}")
    for s, d, w in zip(net.source.tolist(), net.target.tolist(), net.weight.tolist()):
        out.append(f"{net.label(s)} {net.label(d)} {_fmt(w)}")
    return "\n".join(out) + "\n"


def format_pajek(net: Network) -> str:
    out = [f"*Vertices {net.node_count}"]
    for i in range(net.node_count):
        name = net.name(i).replace('"', "'")
        out.append(f'{i + 1} "{name}"')
    out.append("*Arcs" if net.directed else "*Edges")
    for s, d, w in zip(net.source.tolist(), net.target.tolist(), net.weight.tolist()):
        out.append(f"{s + 1} {d + 1} {_fmt(w)}")
    return "\n".join(out) + "\n"


def save_network(net: Network, path, format: str = "edge-list") -> None:
    if format in ("edge-list", "bipartite-edge-list"):
        if format == "bipartite-edge-list" and not net.is_bipartite:
            raise NetworkError("bipartite-edge-list requires a bipartite network")
        text = format_edge_list(net)
    elif format == "pajek":
        text = format_pajek(net)
    else:
        raise ValueError(f"unknown format {format!r}")
    Path(path).write_text(text)
