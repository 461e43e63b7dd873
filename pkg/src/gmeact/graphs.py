"""Graph states, stabilizers and the node-fusion rules for copy compression.

Dense state-vector backend only; qubit b of an N-qubit index is bit N-1-b
(big-endian), matching the rest of the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .linalg import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, kron_all

MAX_DENSE_NODES = 14

_PAULI = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


class GraphError(ValueError):
    pass


def _canon_edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with an optional proper two-coloring."""

    node_count: int
    edges: frozenset[tuple[int, int]]
    coloring: tuple[int, ...] | None = None

    def __post_init__(self):
        edges = frozenset(_canon_edge(*e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        for i, j in edges:
            if i == j:
                raise GraphError(f"self-loop at node {i}")
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise GraphError(f"edge ({i},{j}) out of range")
        if self.coloring is not None:
            col = tuple(self.coloring)
            object.__setattr__(self, "coloring", col)
            if len(col) != self.node_count or any(c not in (0, 1) for c in col):
                raise GraphError("coloring must assign 0/1 to every node")
            for i, j in edges:
                if col[i] == col[j]:
                    raise GraphError(f"edge ({i},{j}) is monochromatic")

    def neighbors(self, i: int) -> set[int]:
        return {b if a == i else a for a, b in self.edges if i in (a, b)}

    def adjacent(self, i: int, j: int) -> bool:
        return _canon_edge(i, j) in self.edges


def graph(n: int, edges: Iterable[tuple[int, int]], coloring=None) -> Graph:
    return Graph(n, frozenset(_canon_edge(*e) for e in edges), coloring)


class StabilizerElement(NamedTuple):
    letters: str  # one of IXYZ per node
    phase: int  # +1 or -1

    def matrix(self) -> np.ndarray:
        op = kron_all(*[_PAULI[ch] for ch in self.letters])
        return self.phase * op


def graph_state(g: Graph) -> np.ndarray:
    """State vector built by entangling |+>^n along the edges."""
    n = g.node_count
    if n > MAX_DENSE_NODES:
        raise GraphError(f"dense backend limited to {MAX_DENSE_NODES} nodes")
    vec = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    idx = np.arange(2**n)
    for i, j in g.edges:
        both = ((idx >> (n - 1 - i)) & 1) & ((idx >> (n - 1 - j)) & 1)
        vec[both == 1] *= -1
    return vec


def stabilizers(g: Graph) -> list[StabilizerElement]:
    """The n generators; node i carries X, its neighbors carry Z."""
    out = []
    for i in range(g.node_count):
        hood = g.neighbors(i)
        letters = "".join(
            "X" if v == i else ("Z" if v in hood else "I") for v in range(g.node_count)
        )
        out.append(StabilizerElement(letters, +1))
    return out


class FusionResult(NamedTuple):
    graph: Graph
    label_map: dict[int, int]  # old node -> new node


def _relabel(n: int, edges: set[tuple[int, int]], dropped: int) -> FusionResult:
    label_map = {}
    new = 0
    for old in range(n):
        if old == dropped:
            continue
        label_map[old] = new
        new += 1
    label_map[dropped] = None
    new_edges = frozenset(_canon_edge(label_map[a], label_map[b]) for a, b in edges)
    return FusionResult(Graph(n - 1, new_edges), label_map)


def fuse_ez(g: Graph, i: int, j: int) -> FusionResult:
    """Parity-check fusion: the merged node keeps the symmetric difference
    of the two neighborhoods."""
    if g.adjacent(i, j):
        raise GraphError("fusion rule requires non-adjacent nodes")
    keep = min(i, j)
    drop = max(i, j)
    hood = g.neighbors(i) ^ g.neighbors(j)
    edges = {e for e in g.edges if i not in e and j not in e}
    edges |= {_canon_edge(keep, v) for v in hood}
    res = _relabel(g.node_count, edges, drop)
    res.label_map[drop] = res.label_map[keep]
    return res


def fuse_ex(g: Graph, i: int, j: int) -> FusionResult:
    """X-basis fusion; only stated for equal neighborhoods."""
    if g.adjacent(i, j):
        raise GraphError("fusion rule requires non-adjacent nodes")
    if g.neighbors(i) != g.neighbors(j):
        raise GraphError("X-basis fusion requires identical neighborhoods")
    keep = min(i, j)
    drop = max(i, j)
    hood = g.neighbors(i)
    edges = {e for e in g.edges if i not in e and j not in e}
    edges |= {_canon_edge(keep, v) for v in hood}
    res = _relabel(g.node_count, edges, drop)
    res.label_map[drop] = res.label_map[keep]
    return res


EZ_MATRIX = np.array([[1, 0, 0, 0], [0, 0, 0, 1]], dtype=complex)
EX_MATRIX = np.array([[1, 0, 0, 1], [0, 1, 1, 0]], dtype=complex) / np.sqrt(2)


def apply_pair_isometry(vec: np.ndarray, n: int, i: int, j: int, mat: np.ndarray) -> np.ndarray:
    """Contract qubits i < j of an n-qubit vector with a 2 x 4 map.

    The merged qubit takes slot i of the remaining n-1 qubits.
    """
    if not 0 <= i < j < n:
        raise ValueError("need 0 <= i < j < n")
    t = np.moveaxis(vec.reshape((2,) * n), (i, j), (0, 1)).reshape(4, -1)
    out = (mat @ t).reshape((2,) + (2,) * (n - 2))
    return np.moveaxis(out, 0, i).reshape(-1)


def disjoint_union(g: Graph, h: Graph) -> Graph:
    shift = g.node_count
    edges = set(g.edges) | {(a + shift, b + shift) for a, b in h.edges}
    coloring = None
    if g.coloring is not None and h.coloring is not None:
        coloring = g.coloring + h.coloring
    return Graph(g.node_count + h.node_count, frozenset(edges), coloring)


def two_color_fuse(g: Graph, copies: int = 2) -> Graph:
    """Fuse two copies of a two-colorable graph back onto itself.

    Z-basis fusion on one color class, then X-basis fusion on the other;
    the result uses the original node labels 0..n-1.
    """
    if copies != 2:
        raise ValueError("the pairwise scheme fuses exactly two copies")
    if g.coloring is None:
        raise GraphError("two-copy fusion needs a proper 2-coloring")
    n = g.node_count
    work = disjoint_union(g, g)
    labels = list(range(2 * n))  # current label of each node
    for color, fuse in ((0, fuse_ez), (1, fuse_ex)):
        for v in range(n):
            if g.coloring[v] != color:
                continue
            a = labels.index(v)
            b = labels.index(v + n)
            work = fuse(work, min(a, b), max(a, b)).graph
            labels.pop(max(a, b))
    return Graph(n, work.edges, g.coloring)


def fuse_two_copies_state(g: Graph) -> np.ndarray:
    """State-vector action of the two-copy fusion scheme on |G> (x) |G>."""
    if g.coloring is None:
        raise GraphError("two-copy fusion needs a proper 2-coloring")
    n = g.node_count
    vec = np.kron(graph_state(g), graph_state(g))
    labels = list(range(2 * n))
    for color, mat in ((0, EZ_MATRIX), (1, EX_MATRIX)):
        for v in range(n):
            if g.coloring[v] != color:
                continue
            a = labels.index(v)
            b = labels.index(v + n)
            vec = apply_pair_isometry(vec, len(labels), min(a, b), max(a, b), mat)
            labels.pop(max(a, b))
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise GraphError("fusion annihilated the state")
    return vec / norm


# ---------------------------------------------------------------------------
# edge-list and DOT I/O

def read_edge_list(text: str) -> Graph:
    """Parse 'i j' edge lines and optional 'c i k' color lines."""
    edges = []
    colors = {}
    n = 0
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "c":
            if len(parts) != 3:
                raise GraphError(f"bad color line: {raw!r}")
            colors[int(parts[1])] = int(parts[2])
            n = max(n, int(parts[1]) + 1)
        elif parts[0] == "n" and len(parts) == 2:
            n = max(n, int(parts[1]))
        else:
            if len(parts) != 2:
                raise GraphError(f"bad edge line: {raw!r}")
            i, j = int(parts[0]), int(parts[1])
            edges.append((i, j))
            n = max(n, i + 1, j + 1)
    coloring = None
    if colors:
        if set(colors) != set(range(n)):
            raise GraphError("coloring must cover every node")
        coloring = tuple(colors[i] for i in range(n))
    return Graph(n, frozenset(_canon_edge(*e) for e in edges), coloring)


def write_edge_list(g: Graph) -> str:
    lines = [f"n {g.node_count}"]
    for i, j in sorted(g.edges):
        lines.append(f"{i} {j}")
    if g.coloring is not None:
        for i, c in enumerate(g.coloring):
            lines.append(f"c {i} {c}")
    return "\n".join(lines) + "\n"


def to_dot(g: Graph) -> str:
    lines = ["graph G {"]
    palette = {0: "orange", 1: "skyblue"}
    for v in range(g.node_count):
        if g.coloring is not None:
            lines.append(f'  {v} [style=filled, fillcolor={palette[g.coloring[v]]}];')
        else:
            lines.append(f"  {v};")
    for i, j in sorted(g.edges):
        lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
