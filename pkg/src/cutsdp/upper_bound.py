"""Feasible orderings from the relaxation: rounding plus annealing improvement.

Rounding scores each vertex by its relative position implied by row 0 of the
lifted matrix (the number of vertices expected before it) and sorts; ties
break on the vertex id so the result is deterministic.  The ordering is then
improved by simulated annealing over insertion moves with an incremental
cutwidth evaluation.
"""

import math

import numpy as np

from .graph import Graph
from .ordering import Permutation, cutwidth_of_ordering, pair_index
from .rng import derive_rng

SA_T_INIT = 2.0
SA_COOL = 0.98


def round_to_ordering(xbar: np.ndarray, n: int) -> Permutation:
    """Sort vertices by p_i = sum_{j>i}(1 - x_ij) + sum_{j<i} x_ji, ascending,
    ties broken by ascending vertex id.  Scores are quantized at 1e-9 so that
    mathematically tied values hit the id tie-break despite summation noise."""
    x = np.asarray(xbar)[0, 1:]
    p = np.zeros(n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            xij = x[pair_index(i, j, n) - 1]
            p[i - 1] += 1.0 - xij
            p[j - 1] += xij
    order = sorted(range(1, n + 1), key=lambda v: (round(p[v - 1], 9), v))
    return Permutation.from_order(order)


class _IncrementalCutwidth:
    """Ordering state with O(window) re-evaluation of insertion moves.

    order is 0-indexed by position; cuts[t] counts edges crossing between
    positions <= t and > t (positions 0-based, t in 0..n-2).
    """

    def __init__(self, graph: Graph, perm: Permutation):
        self.graph = graph
        self.n = graph.n
        self.order = [v - 1 for v in perm.order()]
        self.pos = [0] * self.n
        for t, v0 in enumerate(self.order):
            self.pos[v0] = t
        self.nbrs = [[] for _ in range(self.n)]
        for u, w in graph.edges:
            self.nbrs[u - 1].append(w - 1)
            self.nbrs[w - 1].append(u - 1)
        self.deg = [len(a) for a in self.nbrs]
        self.cuts = self._cuts_from_scratch()
        self.value = max(self.cuts) if self.cuts else 0

    def _cuts_from_scratch(self):
        n = self.n
        diff = [0] * (n + 1)
        for u, w in self.graph.edges:
            lo = min(self.pos[u - 1], self.pos[w - 1])
            hi = max(self.pos[u - 1], self.pos[w - 1])
            diff[lo] += 1
            diff[hi] -= 1
        cuts = []
        run = 0
        for t in range(n - 1):
            run += diff[t]
            cuts.append(run)
        return cuts

    def window_after_move(self, src: int, dst: int):
        """Cut values on the affected window if order[src] moved to position dst.

        Only cuts at positions min(src,dst) .. max(src,dst)-1 change; each new
        prefix differs from an old one by exactly the moved vertex.
        """
        v = self.order[src]
        links = 0  # neighbors of v among old positions < lo
        lo, hi = (dst, src) if dst < src else (src, dst)
        nbr_pos = sorted(self.pos[w] for w in self.nbrs[v])
        import bisect

        window = []
        if dst < src:
            # v joins prefixes that used to end one position earlier
            for t in range(lo, hi):
                base = self.cuts[t - 1] if t >= 1 else 0
                links = bisect.bisect_right(nbr_pos, t - 1)
                window.append(base + self.deg[v] - 2 * links)
        else:
            # v leaves prefixes that used to end one position later
            for t in range(lo, hi):
                base = self.cuts[t + 1] if t + 1 <= self.n - 2 else 0
                links = bisect.bisect_right(nbr_pos, t + 1)
                window.append(base - self.deg[v] + 2 * links)
        return lo, window

    def evaluate_move(self, src: int, dst: int) -> int:
        lo, window = self.window_after_move(src, dst)
        hi = lo + len(window)
        best = 0
        for t, c in enumerate(self.cuts):
            if (t < lo or t >= hi) and c > best:
                best = c
        for c in window:
            if c > best:
                best = c
        return best

    def apply_move(self, src: int, dst: int):
        lo, window = self.window_after_move(src, dst)
        v = self.order.pop(src)
        self.order.insert(dst, v)
        for t in range(min(src, dst), max(src, dst) + 1):
            self.pos[self.order[t]] = t
        self.cuts[lo:lo + len(window)] = window
        self.value = max(self.cuts) if self.cuts else 0

    def permutation(self) -> Permutation:
        return Permutation.from_order([v + 1 for v in self.order])


def improve_sa(
    graph: Graph,
    start: Permutation,
    budget: int | None = None,
    seed: int = 0,
) -> Permutation:
    """Anneal over insertion moves; returns the best ordering seen (never worse
    than the start).  Default budget is 50 n^2 move evaluations; temperature
    cools by 0.98 from 2.0 after every n accepted moves."""
    n = graph.n
    if n <= 2 or not graph.edges:
        return start
    if budget is None:
        budget = 50 * n * n
    rng = derive_rng(seed, "ub-sa")
    state = _IncrementalCutwidth(graph, start)
    best_perm = state.permutation()
    best_value = state.value
    temp = SA_T_INIT
    accepted = 0
    for _ in range(budget):
        src = int(rng.integers(n))
        dst = int(rng.integers(n - 1))
        if dst >= src:
            dst += 1
        new_value = state.evaluate_move(src, dst)
        delta = new_value - state.value
        if delta <= 0 or rng.random() < math.exp(-delta / temp):
            state.apply_move(src, dst)
            accepted += 1
            if accepted % n == 0:
                temp *= SA_COOL
            if state.value < best_value:
                best_value = state.value
                best_perm = state.permutation()
    return best_perm


def compute_upper_bound(graph: Graph, xbar: np.ndarray, seed: int = 0, restarts: int = 1):
    """Round the relaxation solution to an ordering, improve it, and return
    (cutwidth, witness ordering).

    With restarts > 1, independent annealing runs start from the same rounded
    ordering on seeds derived from (seed, restart index); the best result wins
    and ties go to the lowest restart index.
    """
    start = round_to_ordering(xbar, graph.n)
    best_value = cutwidth_of_ordering(graph, start)
    best = start
    for index in range(max(1, restarts)):
        run_seed = int(derive_rng(seed, "ub-restart", index).integers(2**63))
        improved = improve_sa(graph, start, seed=run_seed)
        value = cutwidth_of_ordering(graph, improved)
        if value < best_value:
            best_value = value
            best = improved
    return best_value, best
