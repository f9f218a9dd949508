"""Simple graphs, block decomposition and canonical forms for clique trees."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graphs, graph files or recipes."""


class NotConnectedError(GraphError):
    def __init__(self) -> None:
        super().__init__("graph not connected")


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Edges are stored as sorted pairs ``(u, v)`` with ``u < v``.
    """

    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError(f"negative vertex count {self.n}")
        norm = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={self.n}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        pairs = [tuple(e) for e in edges]
        seen = set()
        for u, v in pairs:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge ({u}, {v})")
            seen.add(key)
        return cls(n, frozenset(pairs))

    @classmethod
    def complete(cls, m: int) -> "Graph":
        return cls(m, frozenset((i, j) for i in range(m) for j in range(i + 1, m)))

    @classmethod
    def star(cls, n: int) -> "Graph":
        return cls(n, frozenset((0, j) for j in range(1, n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in self.adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def add_edge(self, u: int, v: int) -> "Graph":
        if self.has_edge(u, v):
            raise GraphError(f"edge ({u}, {v}) already present")
        return Graph(self.n, self.edges | {(min(u, v), max(u, v))})

    def with_edges(
        self,
        remove: Iterable[tuple[int, int]] = (),
        add: Iterable[tuple[int, int]] = (),
    ) -> "Graph":
        """Return a copy with ``remove`` deleted and then ``add`` inserted."""
        es = set(self.edges)
        for u, v in remove:
            es.discard((min(u, v), max(u, v)))
        for u, v in add:
            es.add((min(u, v), max(u, v)))
        return Graph(self.n, frozenset(es))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Image of the graph under the vertex map ``v -> perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabeling is not a permutation")
        return Graph(self.n, frozenset((perm[u], perm[v]) for u, v in self.edges))

    def induced_is_complete(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        return all(self.has_edge(vs[i], vs[j]) for i in range(len(vs)) for j in range(i + 1, len(vs)))


@dataclass(frozen=True)
class CliqueTreeStructure:
    """Block decomposition view of a connected graph.

    ``blocks`` are sorted vertex tuples in sorted order.  ``block_cut_edges``
    lists ``(block index, cut vertex)`` incidences, i.e. the edges of the
    block-cut tree.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]
    cut_vertices: frozenset[int]
    block_index: tuple[int, ...]
    block_cut_edges: tuple[tuple[int, int], ...]

    @property
    def b(self) -> int:
        return len(self.blocks)

    @property
    def block_sizes(self) -> list[int]:
        return sorted((len(bl) for bl in self.blocks), reverse=True)

    @property
    def block_tree(self) -> dict[int, list[int]]:
        """Blocks adjacent through a shared cut vertex."""
        by_cut: dict[int, list[int]] = {}
        for bi, c in self.block_cut_edges:
            by_cut.setdefault(c, []).append(bi)
        out: dict[int, set[int]] = {i: set() for i in range(self.b)}
        for members in by_cut.values():
            for i in members:
                out[i].update(j for j in members if j != i)
        return {i: sorted(s) for i, s in out.items()}

    def cuts_of(self, block: int) -> list[int]:
        return sorted(v for v in self.blocks[block] if v in self.cut_vertices)

    def pendant_blocks(self) -> list[int]:
        """Blocks holding exactly one cut vertex of the graph."""
        return [i for i in range(self.b) if len(self.cuts_of(i)) == 1]

    def blocks_at(self, v: int) -> list[int]:
        return [i for i, bl in enumerate(self.blocks) if v in bl]

    def block_of(self, vertices: Iterable[int]) -> int:
        target = tuple(sorted(vertices))
        try:
            return self.blocks.index(target)
        except ValueError:
            raise GraphError(f"{list(target)} is not a block") from None


def blocks_and_cut_vertices(g: Graph) -> CliqueTreeStructure:
    """Biconnected components and articulation points of a connected graph.

    Iterative Hopcroft-Tarjan; a bridge is returned as a block of size 2.
    """
    if not g.is_connected():
        raise NotConnectedError()
    n = g.n
    if n == 1:
        return CliqueTreeStructure(1, ((0,),), frozenset(), (1,), ())

    adj = [sorted(s) for s in g.adj]
    disc = [-1] * n
    low = [0] * n
    timer = 0
    blocks: list[tuple[int, ...]] = []
    edge_stack: list[tuple[int, int]] = []
    cuts: set[int] = set()

    root = 0
    disc[root] = low[root] = timer
    timer += 1
    root_children = 0
    stack = [(root, -1, iter(adj[root]))]
    while stack:
        u, parent, it = stack[-1]
        advanced = False
        for w in it:
            if disc[w] == -1:
                edge_stack.append((u, w))
                disc[w] = low[w] = timer
                timer += 1
                if u == root:
                    root_children += 1
                stack.append((w, u, iter(adj[w])))
                advanced = True
                break
            if w != parent and disc[w] < disc[u]:
                edge_stack.append((u, w))
                low[u] = min(low[u], disc[w])
        if advanced:
            continue
        stack.pop()
        if parent == -1:
            continue
        low[parent] = min(low[parent], low[u])
        if low[u] >= disc[parent]:
            if parent != root:
                cuts.add(parent)
            comp: set[int] = set()
            while True:
                e = edge_stack.pop()
                comp.update(e)
                if e == (parent, u):
                    break
            blocks.append(tuple(sorted(comp)))
    if root_children > 1:
        cuts.add(root)

    blocks.sort()
    counts = Counter(v for bl in blocks for v in bl)
    bidx = tuple(counts[v] for v in range(n))
    bc_edges = tuple(
        (i, v) for i, bl in enumerate(blocks) for v in bl if v in cuts
    )
    return CliqueTreeStructure(n, tuple(blocks), frozenset(cuts), bidx, bc_edges)


def is_clique_tree(g: Graph, min_block: int = 3) -> bool:
    ct = blocks_and_cut_vertices(g)
    return all(len(bl) >= min_block and g.induced_is_complete(bl) for bl in ct.blocks)


def build_clique_tree(
    blocks: Sequence[int], attach: Sequence[Sequence[int]] = ()
) -> tuple[Graph, CliqueTreeStructure]:
    """Realize a block recipe as a graph.

    Block 0 receives vertices ``0..blocks[0]-1``.  Block ``i >= 1`` is glued at
    ``attach[i-1] = (host, j)``: the ``j``-th vertex (in construction order) of
    an earlier block ``host``, and contributes ``blocks[i] - 1`` fresh vertices.
    """
    if not blocks:
        raise GraphError("recipe has no blocks")
    if len(attach) != len(blocks) - 1:
        raise GraphError(
            f"need {len(blocks) - 1} attachments for {len(blocks)} blocks, got {len(attach)}"
        )
    for s in blocks:
        if s < 2:
            raise GraphError(f"block size {s} < 2")
    members: list[list[int]] = [list(range(blocks[0]))]
    n = blocks[0]
    for i, pair in enumerate(attach, start=1):
        host, j = pair
        if not 0 <= host < i:
            raise GraphError(f"block {i} attaches to block {host}, which is not an earlier block")
        if not 0 <= j < len(members[host]):
            raise GraphError(f"block {host} has no vertex {j}")
        anchor = members[host][j]
        fresh = list(range(n, n + blocks[i] - 1))
        n += blocks[i] - 1
        members.append([anchor] + fresh)
    edges = set()
    for mem in members:
        for a in range(len(mem)):
            for c in range(a + 1, len(mem)):
                edges.add((mem[a], mem[c]))
    g = Graph(n, frozenset(edges))
    return g, blocks_and_cut_vertices(g)


def vertex_sum(g1: Graph, v: int, g2: Graph, w: int = 0) -> Graph:
    """Identify vertex ``v`` of ``g1`` with vertex ``w`` of ``g2``.

    Vertices of ``g1`` keep their labels; the rest of ``g2`` follows.
    """
    mapping = {}
    nxt = g1.n
    for x in range(g2.n):
        if x == w:
            mapping[x] = v
        else:
            mapping[x] = nxt
            nxt += 1
    edges = set(g1.edges)
    for a, c in g2.edges:
        edges.add((min(mapping[a], mapping[c]), max(mapping[a], mapping[c])))
    return Graph(nxt, frozenset(edges))


def canonical_form(ct: CliqueTreeStructure) -> str:
    """Isomorphism key of a clique tree.

    Blocks are complete, so the block-cut tree decorated with block sizes
    determines the graph.  The key is the AHU encoding of that tree rooted at
    its center, minimized over the (at most two) centers.
    """
    nb = ct.b
    cut_ids = {c: nb + i for i, c in enumerate(sorted(ct.cut_vertices))}
    total = nb + len(cut_ids)
    tree: list[list[int]] = [[] for _ in range(total)]
    for bi, c in ct.block_cut_edges:
        tree[bi].append(cut_ids[c])
        tree[cut_ids[c]].append(bi)
    labels = [f"K{len(bl)}" for bl in ct.blocks] + ["c"] * len(cut_ids)

    def encode(root: int) -> str:
        # post-order without recursion
        order = []
        parent = {root: -1}
        stack = [root]
        while stack:
            u = stack.pop()
            order.append(u)
            for w in tree[u]:
                if w != parent[u]:
                    parent[w] = u
                    stack.append(w)
        code: dict[int, str] = {}
        for u in reversed(order):
            kids = sorted(code[w] for w in tree[u] if w != parent[u])
            code[u] = labels[u] + "(" + "".join(kids) + ")"
        return code[root]

    return min(encode(c) for c in _tree_centers(tree))


def _tree_centers(tree: list[list[int]]) -> list[int]:
    total = len(tree)
    if total <= 2:
        return list(range(total))
    deg = [len(t) for t in tree]
    leaves = [i for i in range(total) if deg[i] <= 1]
    remaining = total
    while remaining > 2:
        remaining -= len(leaves)
        nxt = []
        for u in leaves:
            for w in tree[u]:
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
            deg[u] = 0
        leaves = nxt
    return leaves


def canonical_key(g: Graph) -> str:
    return canonical_form(blocks_and_cut_vertices(g))


# --- file formats ----------------------------------------------------------


def parse_edge_list(text: str) -> Graph:
    """Parse the ``n m`` header followed by ``m`` lines of ``u v``."""
    lines = [(i, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise GraphError("missing header")
    lineno, header = lines[0]
    try:
        n, m = (int(t) for t in header.split())
    except ValueError:
        raise GraphError(f"line {lineno}: header must be 'n m', got {header!r}") from None
    body = lines[1:]
    if len(body) != m:
        raise GraphError(f"header declares {m} edges, found {len(body)}")
    edges = []
    for lineno, ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer vertex in {ln!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"line {lineno}: vertex index out of range 0..{n - 1}")
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at {u}")
        edges.append((u, v))
    try:
        return Graph.from_edges(n, edges)
    except GraphError as exc:
        raise GraphError(f"{exc}") from None


def format_edge_list(g: Graph) -> str:
    rows = [f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(rows) + "\n"


def parse_recipe(text: str) -> Graph:
    try:
        doc = json.loads(text)
        blocks = [int(s) for s in doc["blocks"]]
        attach = [[int(a), int(b)] for a, b in doc.get("attach", [])]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed recipe: {exc}") from None
    return build_clique_tree(blocks, attach)[0]


def load_graph(path: str | Path) -> Graph:
    """Load an edge-list file, or a JSON block recipe if the suffix is ``.json``."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return parse_recipe(text)
    return parse_edge_list(text)


def save_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))
