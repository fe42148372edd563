"""Vertex orderings, their 0/1 pairwise encoding, and cutwidth evaluation.

A permutation assigns positions 1..n to vertices.  Its pairwise encoding is a
vector over vertex pairs i<j, with entry 1 iff i is placed before j.  The
cutwidth of a vertex is evaluated here in three interchangeable ways: a direct
edge count, a quadratic polynomial in the pairwise variables ("prod" form,
products written out), and its expanded regrouping into constant, linear and
quadratic parts ("grouped" form).  The grouped form is what the relaxation
builder consumes; the other two serve as its oracles.

Two exact solvers for small instances live here as ground truth: a pruned
search over all orderings (n <= 10, returns a witness) and a subset dynamic
program (n <= 24).
"""

import numpy as np

from .graph import Graph, SizeLimitError

FORM_PROD = "prod"
FORM_GROUPED = "grouped"

BRUTEFORCE_MAX_N = 10
SUBSET_DP_MAX_N = 24


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(i: int, j: int, n: int) -> int:
    """1-based lexicographic rank of the pair (i, j), i < j, among all pairs."""
    if not (1 <= i < j <= n):
        raise ValueError(f"need 1 <= i < j <= n, got ({i},{j}) with n={n}")
    return (i - 1) * n - i * (i - 1) // 2 + (j - i)


def pair_index_table(n: int) -> np.ndarray:
    """(n+1)x(n+1) lookup with table[i, j] = table[j, i] = pair_index(i, j, n)."""
    table = np.zeros((n + 1, n + 1), dtype=np.int32)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            table[i, j] = table[j, i] = pair_index(i, j, n)
    return table


class Permutation:
    """Bijection from vertices 1..n onto positions 1..n; pos[v-1] = position of v."""

    __slots__ = ("pos",)

    def __init__(self, pos):
        pos = tuple(int(p) for p in pos)
        if sorted(pos) != list(range(1, len(pos) + 1)):
            raise ValueError("positions must form a bijection onto 1..n")
        self.pos = pos

    @property
    def n(self):
        return len(self.pos)

    def position(self, v: int) -> int:
        return self.pos[v - 1]

    def order(self):
        """Vertices listed by increasing position."""
        return sorted(range(1, self.n + 1), key=self.position)

    def reversed(self):
        n = self.n
        return Permutation(tuple(n + 1 - p for p in self.pos))

    @classmethod
    def identity(cls, n: int):
        return cls(range(1, n + 1))

    @classmethod
    def from_order(cls, order):
        order = list(order)
        pos = [0] * len(order)
        for k, v in enumerate(order, start=1):
            pos[v - 1] = k
        return cls(pos)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.pos == other.pos

    def __hash__(self):
        return hash(self.pos)

    def __repr__(self):
        return f"Permutation({self.pos})"


class LOVector:
    """Real vector over vertex pairs i<j, indexed via pair_index; may be fractional."""

    __slots__ = ("x", "n")

    def __init__(self, x, n):
        x = np.asarray(x, dtype=float)
        if x.shape != (pair_count(n),):
            raise ValueError(f"expected length {pair_count(n)}, got {x.shape}")
        self.x = x
        self.n = n

    def value(self, i: int, j: int) -> float:
        """Entry for the pair (i, j) with i < j."""
        return float(self.x[pair_index(i, j, self.n) - 1])


def encode_lo(perm: Permutation) -> LOVector:
    """Binary encoding: entry (i,j) is 1 iff i is placed before j."""
    n = perm.n
    x = np.zeros(pair_count(n))
    t = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if perm.position(i) < perm.position(j):
                x[t] = 1.0
            t += 1
    return LOVector(x, n)


def cut_profile(graph: Graph, perm: Permutation):
    """cuts[t-1] = number of edges crossing between positions <= t and > t."""
    n = graph.n
    diff = [0] * (n + 2)
    for u, v in graph.edges:
        lo = min(perm.position(u), perm.position(v))
        hi = max(perm.position(u), perm.position(v))
        diff[lo] += 1
        diff[hi] -= 1
    cuts = []
    running = 0
    for t in range(1, n + 1):
        running += diff[t]
        cuts.append(running)
    return cuts


def cutwidth_of_vertex(graph: Graph, perm: Permutation, v: int) -> int:
    """Edges {u,w} with position(u) <= position(v) < position(w)."""
    pv = perm.position(v)
    count = 0
    for a, b in graph.edges:
        pa, pb = perm.position(a), perm.position(b)
        if min(pa, pb) <= pv < max(pa, pb):
            count += 1
    return count


def cutwidth_of_ordering(graph: Graph, perm: Permutation) -> int:
    if graph.n == 0:
        return 0
    return max(cut_profile(graph, perm))


def cutwidth_vertex_quadratic(graph: Graph, lov: LOVector, v: int, form: str) -> float:
    """Evaluate the quadratic cutwidth expression of vertex v at a (possibly
    fractional) pairwise vector.

    form="prod" evaluates the six product sums literally; form="grouped"
    evaluates the expanded constant/linear/quadratic regrouping.  On binary
    encodings both equal the direct edge count exactly.
    """
    n = graph.n
    a = graph.adjacency
    x = lov.value

    def adj(u, w):
        return float(a[u - 1, w - 1])

    if form == FORM_PROD:
        total = 0.0
        for u in range(1, v):
            for w in range(v + 1, n + 1):
                total += adj(u, w) * x(u, v) * x(v, w)
        for u in range(v + 1, n + 1):
            for w in range(v + 1, n + 1):
                if w != u:
                    total += adj(u, w) * (1.0 - x(v, u)) * x(v, w)
        for u in range(1, v):
            for w in range(1, v):
                if w != u:
                    total += adj(u, w) * x(u, v) * (1.0 - x(w, v))
        for u in range(v + 1, n + 1):
            for w in range(1, v):
                total += adj(u, w) * (1.0 - x(v, u)) * (1.0 - x(w, v))
        for w in range(v + 1, n + 1):
            total += adj(v, w) * x(v, w)
        for w in range(1, v):
            total += adj(v, w) * (1.0 - x(w, v))
        return total

    if form == FORM_GROUPED:
        total = 0.0
        for w in range(1, v):
            for u in range(v, n + 1):
                total += adj(u, w)
        for w in range(v + 1, n + 1):
            for u in range(v, n + 1):
                if u != w:
                    total += adj(u, w) * x(v, w)
        for u in range(1, v):
            for w in range(1, v):
                if w != u:
                    total += adj(u, w) * x(u, v)
        for u in range(v + 1, n + 1):
            for w in range(1, v):
                total -= adj(u, w) * (x(v, u) + x(w, v))
        for w in range(1, v):
            total -= adj(v, w) * x(w, v)
        for u in range(1, v):
            for w in range(v + 1, n + 1):
                total += 2.0 * adj(u, w) * x(u, v) * x(v, w)
        for u in range(v + 1, n + 1):
            for w in range(v + 1, n + 1):
                if w != u:
                    total -= adj(u, w) * x(v, u) * x(v, w)
        for u in range(1, v):
            for w in range(1, v):
                if w != u:
                    total -= adj(u, w) * x(u, v) * x(w, v)
        return total

    raise ValueError(f"unknown form {form!r}")


def exact_cutwidth_bruteforce(graph: Graph):
    """True cutwidth with a witnessing ordering, by exhaustive search over the
    ordering tree (prefixes whose running cut already matches the incumbent are
    skipped, which cannot exclude a strictly better ordering).
    """
    n = graph.n
    if n > BRUTEFORCE_MAX_N:
        raise SizeLimitError(f"bruteforce oracle limited to n <= {BRUTEFORCE_MAX_N}")
    if n == 0:
        return 0, Permutation(())

    deg = [graph.degree(v) for v in range(1, n + 1)]
    nbr = [0] * n
    for u, w in graph.edges:
        nbr[u - 1] |= 1 << (w - 1)
        nbr[w - 1] |= 1 << (u - 1)

    ident = Permutation.identity(n)
    best_val = cutwidth_of_ordering(graph, ident)
    best_order = ident.order()
    order = []

    def dfs(placed, cur_cut, cur_max):
        nonlocal best_val, best_order
        depth = len(order)
        if depth == n:
            best_val = cur_max
            best_order = order.copy()
            return
        for v0 in range(n):
            bit = 1 << v0
            if placed & bit:
                continue
            new_cut = cur_cut + deg[v0] - 2 * (nbr[v0] & placed).bit_count()
            new_max = max(cur_max, new_cut)
            if new_max >= best_val:
                continue
            order.append(v0 + 1)
            dfs(placed | bit, new_cut, new_max)
            order.pop()

    dfs(0, 0, 0)
    return best_val, Permutation.from_order(best_order)


def _popcount(arr: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(arr)
    table = np.array([bin(t).count("1") for t in range(1 << 16)], dtype=np.uint8)
    return table[arr & 0xFFFF].astype(np.int32) + table[(arr >> 16) & 0xFFFF]


def exact_cutwidth_subset_dp(graph: Graph) -> int:
    """Exact cutwidth by dynamic programming over prefix sets:
    f(S) = max(cut(S), min over v in S of f(S minus v)), cut(S) = edges leaving S.
    """
    n = graph.n
    if n > SUBSET_DP_MAX_N:
        raise SizeLimitError(f"subset DP limited to n <= {SUBSET_DP_MAX_N}")
    if n == 0 or not graph.edges:
        return 0

    size = 1 << n
    deg = np.array([graph.degree(v) for v in range(1, n + 1)], dtype=np.int32)
    nbr = np.zeros(n, dtype=np.int32)
    for u, w in graph.edges:
        nbr[u - 1] |= 1 << (w - 1)
        nbr[w - 1] |= 1 << (u - 1)

    # cut[S] via the lowest-bit recurrence; processing v descending guarantees
    # the reduced subset (lowest bit > v) is already available.
    cut = np.zeros(size, dtype=np.int32)
    for v in range(n - 1, -1, -1):
        bases = np.arange(1 << (n - v - 1), dtype=np.int32) << (v + 1)
        links = _popcount((bases & nbr[v]).astype(np.int32)).astype(np.int32)
        cut[bases | (1 << v)] = cut[bases] + deg[v] - 2 * links

    subsets = np.arange(size, dtype=np.int32)
    pc = _popcount(subsets).astype(np.int8)
    by_layer = np.argsort(pc, kind="stable").astype(np.int32)
    bounds = np.searchsorted(pc[by_layer], np.arange(n + 2))

    f = np.zeros(size, dtype=np.int32)
    big = np.iinfo(np.int32).max
    for c in range(1, n + 1):
        layer = by_layer[bounds[c]:bounds[c + 1]]
        g = np.full(layer.shape, big, dtype=np.int32)
        for v in range(n):
            has = (layer >> v) & 1 == 1
            g[has] = np.minimum(g[has], f[layer[has] ^ (1 << v)])
        f[layer] = np.maximum(cut[layer], g)
    return int(f[size - 1])
