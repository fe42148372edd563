"""Simple undirected graphs: construction, file I/O, random models, degree bound.

Vertices are labeled 1..n throughout.  The canonical on-disk format is an
edge list: a header line ``n m`` followed by ``m`` lines ``u v``; lines
starting with ``#`` are comments.
"""

import logging
import math

import numpy as np

from .rng import derive_rng

log = logging.getLogger(__name__)


class ParseError(ValueError):
    """Malformed edge-list input; message names the offending line."""


class SizeLimitError(ValueError):
    """Instance exceeds a documented size cap."""


class Graph:
    """Immutable simple undirected graph on vertices 1..n."""

    __slots__ = ("n", "edges", "_adjacency")

    def __init__(self, n, edges):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        canon = set()
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"vertex out of range in edge ({u},{v})")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            canon.add((min(u, v), max(u, v)))
        self.n = n
        self.edges = frozenset(canon)
        self._adjacency = None

    @property
    def adjacency(self):
        """Symmetric 0/1 matrix, a[u-1, v-1] = 1 iff {u,v} is an edge."""
        if self._adjacency is None:
            a = np.zeros((self.n, self.n), dtype=np.int8)
            for u, v in self.edges:
                a[u - 1, v - 1] = 1
                a[v - 1, u - 1] = 1
            a.setflags(write=False)
            self._adjacency = a
        return self._adjacency

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self.edges

    def degree(self, v):
        return int(self.adjacency[v - 1].sum())

    def max_degree(self):
        if self.n == 0:
            return 0
        return int(self.adjacency.sum(axis=1).max())

    def num_edges(self):
        return len(self.edges)

    def density(self):
        pairs = self.n * (self.n - 1) // 2
        return len(self.edges) / pairs if pairs else 0.0

    def relabeled(self, mapping):
        """Graph with vertex u renamed to mapping[u] (a bijection on 1..n)."""
        return Graph(self.n, [(mapping[u], mapping[v]) for u, v in self.edges])

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"


def load_edge_list(text: str) -> Graph:
    """Parse the canonical edge-list format.

    Duplicate edges are collapsed; their count is logged as a warning.
    Raises :class:`ParseError` naming the line number on malformed input.
    """
    header = None
    edges = []
    expected_m = None
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 2:
                raise ParseError(f"line {lineno}: header must be 'n m'")
            try:
                n, expected_m = int(fields[0]), int(fields[1])
            except ValueError:
                raise ParseError(f"line {lineno}: header must be two integers") from None
            if n < 0 or expected_m < 0:
                raise ParseError(f"line {lineno}: negative counts in header")
            header = (n, expected_m)
            continue
        if len(fields) != 2:
            raise ParseError(f"line {lineno}: edge line must be 'u v'")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"line {lineno}: edge endpoints must be integers") from None
        if not (1 <= u <= n):
            raise ParseError(f"line {lineno}: vertex {u} out of range 1..{n}")
        if not (1 <= v <= n):
            raise ParseError(f"line {lineno}: vertex {v} out of range 1..{n}")
        if u == v:
            raise ParseError(f"line {lineno}: self-loop at vertex {u}")
        edges.append((min(u, v), max(u, v)))
    if header is None:
        raise ParseError("line 1: missing 'n m' header")
    if len(edges) != expected_m:
        raise ParseError(f"header announced {expected_m} edges, found {len(edges)}")
    dupes = len(edges) - len(set(edges))
    if dupes:
        log.warning("edge list contains %d duplicate edge(s); collapsed", dupes)
    return Graph(n, edges)


def format_edge_list(graph: Graph, comment: str | None = None) -> str:
    """Serialize to the canonical edge-list format."""
    lines = []
    if comment:
        lines.extend("# " + c for c in comment.splitlines())
    lines.append(f"{graph.n} {len(graph.edges)}")
    lines.extend(f"{u} {v}" for u, v in sorted(graph.edges))
    return "\n".join(lines) + "\n"


def gen_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n,p): each of the C(n,2) pairs is an edge independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    rng = derive_rng(seed, "er")
    draws = rng.random(n * (n - 1) // 2)
    edges = []
    t = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if draws[t] < p:
                edges.append((i, j))
            t += 1
    return Graph(n, edges)


def gen_random_geometric(n: int, d: float, seed: int) -> Graph:
    """U(n,d): n points uniform in the unit cube, edge iff euclidean distance <= d."""
    if d < 0:
        raise ValueError("distance threshold must be non-negative")
    rng = derive_rng(seed, "rgg")
    pts = rng.random((n, 3))
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if math.dist(pts[i], pts[j]) <= d:
                edges.append((i + 1, j + 1))
    return Graph(n, edges)


def degree_lower_bound(graph: Graph) -> int:
    """Combinatorial bound floor((max degree + 1) / 2); 0 for edgeless graphs."""
    if not graph.edges:
        return 0
    return (graph.max_degree() + 1) // 2
