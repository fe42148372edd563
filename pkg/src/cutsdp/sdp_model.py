"""The basic semidefinite relaxation of the minimum cutwidth problem.

The model minimizes a scalar alpha over the lifted matrix Xbar of order
C(n,2)+1.  Row/column 0 is the homogenizing border (Xbar_00 = 1, row 0 holds
the pairwise vector x); entry (p, q) with p, q >= 1 stands for the product of
the pairwise variables with pair indices p and q.  The base model consists of
one cutwidth inequality per vertex (the grouped quadratic expression minus
alpha), one diagonal linking equality per pair, and the corner equality.
"""

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .ordering import pair_count, pair_index

SENSE_LE = "le"  # value <= 0
SENSE_EQ = "eq"  # value == 0


@dataclass
class LinearConstraint:
    """Sparse linear constraint over (Xbar, alpha).

    value = constant + alpha_coeff * alpha + sum over terms, where a term at
    position (r, c) with r < c multiplies Xbar_rc + Xbar_cr jointly (i.e.
    2*Xbar_rc of a symmetric matrix) and a diagonal term multiplies Xbar_rr.
    The constraint reads value <= 0 (sense "le") or value == 0 (sense "eq").
    """

    sense: str
    constant: float
    alpha_coeff: float
    terms: dict = field(default_factory=dict)
    label: tuple = ()

    def add_entry(self, r: int, c: int, coeff: float):
        """Accumulate coeff on Xbar_rc (single entry of the symmetric matrix)."""
        if r == c:
            self.terms[(r, r)] = self.terms.get((r, r), 0.0) + coeff
        else:
            key = (min(r, c), max(r, c))
            self.terms[key] = self.terms.get(key, 0.0) + 0.5 * coeff

    def add_x(self, p: int, coeff: float):
        """Accumulate coeff on x_p, read as Xbar_{0,p}."""
        self.add_entry(0, p, coeff)


def evaluate_constraint(con: LinearConstraint, xbar: np.ndarray, alpha: float) -> float:
    m1 = xbar.shape[0]
    if xbar.shape != (m1, m1):
        raise ValueError("Xbar must be square")
    value = con.constant + con.alpha_coeff * alpha
    for (r, c), coeff in con.terms.items():
        if r >= m1 or c >= m1:
            raise ValueError(f"term position ({r},{c}) outside matrix of order {m1}")
        if r == c:
            value += coeff * xbar[r, r]
        else:
            value += coeff * (xbar[r, c] + xbar[c, r])
    return value


def constraint_violation(con: LinearConstraint, xbar: np.ndarray, alpha: float) -> float:
    """Positive iff violated: signed value for inequalities, |value| for equalities."""
    value = evaluate_constraint(con, xbar, alpha)
    return abs(value) if con.sense == SENSE_EQ else value


@dataclass
class SdpProblem:
    """min alpha subject to base_constraints + cuts and Xbar PSD of order m+1."""

    n: int
    m: int
    base_constraints: list
    cuts: list = field(default_factory=list)

    def all_constraints(self):
        return self.base_constraints + self.cuts


def build_basic_relaxation(graph: Graph) -> SdpProblem:
    """Assemble the base model: n cutwidth inequalities (grouped quadratic form
    of each vertex, minus alpha), m diagonal equalities Xbar_pp = Xbar_0p, and
    the corner equality Xbar_00 = 1.
    """
    n = graph.n
    if n < 2:
        raise ValueError("relaxation needs at least 2 vertices")
    m = pair_count(n)
    a = graph.adjacency

    def pidx(i, j):
        return pair_index(min(i, j), max(i, j), n)

    constraints = []
    for v in range(1, n + 1):
        con = LinearConstraint(SENSE_LE, 0.0, -1.0, label=("cw", v))
        for w in range(1, v):
            for u in range(v, n + 1):
                con.constant += float(a[u - 1, w - 1])
        for w in range(v + 1, n + 1):
            for u in range(v, n + 1):
                if u != w:
                    con.add_x(pidx(v, w), float(a[u - 1, w - 1]))
        for u in range(1, v):
            for w in range(1, v):
                if w != u:
                    con.add_x(pidx(u, v), float(a[u - 1, w - 1]))
        for u in range(v + 1, n + 1):
            for w in range(1, v):
                auw = float(a[u - 1, w - 1])
                if auw:
                    con.add_x(pidx(v, u), -auw)
                    con.add_x(pidx(w, v), -auw)
        for w in range(1, v):
            con.add_x(pidx(w, v), -float(a[v - 1, w - 1]))
        for u in range(1, v):
            for w in range(v + 1, n + 1):
                auw = float(a[u - 1, w - 1])
                if auw:
                    con.add_entry(pidx(u, v), pidx(v, w), 2.0 * auw)
        for u in range(v + 1, n + 1):
            for w in range(v + 1, n + 1):
                if w != u:
                    con.add_entry(pidx(v, u), pidx(v, w), -float(a[u - 1, w - 1]))
        for u in range(1, v):
            for w in range(1, v):
                if w != u:
                    con.add_entry(pidx(u, v), pidx(w, v), -float(a[u - 1, w - 1]))
        con.terms = {pos: c for pos, c in con.terms.items() if c != 0.0}
        constraints.append(con)

    for p in range(1, m + 1):
        con = LinearConstraint(SENSE_EQ, 0.0, 0.0, label=("diag", p))
        con.add_entry(p, p, 1.0)
        con.add_x(p, -1.0)
        constraints.append(con)

    corner = LinearConstraint(SENSE_EQ, -1.0, 0.0, label=("corner",))
    corner.add_entry(0, 0, 1.0)
    constraints.append(corner)

    return SdpProblem(n=n, m=m, base_constraints=constraints)


def rank_one_lift(x: np.ndarray) -> np.ndarray:
    """Xbar = (1, x)(1, x)^T for a pairwise vector x."""
    v = np.concatenate(([1.0], np.asarray(x, dtype=float)))
    return np.outer(v, v)


def dump_problem(problem: SdpProblem, fp):
    """Plain-text dump (one constraint per line) for cross-solver validation."""
    fp.write(f"order {problem.m + 1} alpha free\n")
    for con in problem.all_constraints():
        terms = ";".join(
            f"{r},{c}:{coeff:.17g}" for (r, c), coeff in sorted(con.terms.items())
        )
        label = "/".join(str(part) for part in con.label)
        fp.write(
            f"{con.sense} const={con.constant:.17g} alpha={con.alpha_coeff:.17g} "
            f"terms={terms} label={label}\n"
        )
