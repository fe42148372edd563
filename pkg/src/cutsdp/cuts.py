"""Strengthening constraint families for the lifted ordering relaxation.

Families (kind tags):
  DICYCLE3      transitivity equality on a vertex triple
  TRI1..TRI5    the five triangle inequalities on lifted product entries
  LO24          the quadruple inequality from the squared ordering polytope
  RLT_XL/XR,    liftings of the linear transitivity bounds, multiplied by
  RLT_1XL/1XR   x_uv (XL/XR) resp. 1-x_uv (1XL/1XR), lower/upper side

A candidate is a kind plus an index tuple ((i,j,k,l),(u,v),(q,w)); each kind
reads a documented sub-tuple.  Sorted groups keep the tuple canonical under
the neighborhood moves of the separation heuristic.
"""

from dataclasses import dataclass
from itertools import combinations, permutations

from .ordering import pair_index, pair_index_table
from .sdp_model import (
    SENSE_EQ,
    SENSE_LE,
    LinearConstraint,
    evaluate_constraint,
)

DICYCLE3 = "DICYCLE3"
TRI1 = "TRI1"
TRI2 = "TRI2"
TRI3 = "TRI3"
TRI4 = "TRI4"
TRI5 = "TRI5"
LO24 = "LO24"
RLT_XL = "RLT_XL"
RLT_XR = "RLT_XR"
RLT_1XL = "RLT_1XL"
RLT_1XR = "RLT_1XR"

TRIANGLE_KINDS = (TRI1, TRI2, TRI3, TRI4, TRI5)
RLT_KINDS = (RLT_XL, RLT_XR, RLT_1XL, RLT_1XR)
ALL_KINDS = (DICYCLE3,) + TRIANGLE_KINDS + (LO24,) + RLT_KINDS

NEG_INF = float("-inf")


@dataclass
class CutCandidate:
    """A constraint kind applied to an index tuple, with its cached violation."""

    kind: str
    quad: tuple  # 3 or 4 sorted distinct vertices (3 only possible when n == 3)
    pair1: tuple  # (u, v), u < v
    pair2: tuple  # (q, w), q < w
    violation: float = NEG_INF

    @property
    def indices(self):
        return (self.quad, self.pair1, self.pair2)

    def args(self):
        """Per-kind argument structure consumed by instantiate_cut."""
        return extract_args(self.kind, self.quad, self.pair1, self.pair2)

    def key(self):
        return canonical_key(self.kind, self.quad, self.pair1, self.pair2)


def extract_args(kind, quad, pair1, pair2):
    if kind == DICYCLE3:
        return quad[:3]
    if kind in (TRI1, TRI2, TRI3):
        return ((quad[0], quad[1]), pair1)
    if kind in (TRI4, TRI5):
        return ((quad[0], quad[1]), pair1, pair2)
    if kind == LO24:
        return quad
    if kind in RLT_KINDS:
        return (quad[:3], pair1)
    raise ValueError(f"unknown cut kind {kind!r}")


def args_valid(kind, args) -> bool:
    """Arity and distinctness rules; invalid tuples rate as never violated."""
    if kind == DICYCLE3:
        i, j, k = args
        return i < j < k
    if kind in (TRI1, TRI2, TRI3):
        a, b = args
        return a[0] < a[1] and b[0] < b[1] and a != b
    if kind in (TRI4, TRI5):
        a, b, c = args
        return (
            a[0] < a[1] and b[0] < b[1] and c[0] < c[1]
            and a != b and a != c and b != c
        )
    if kind == LO24:
        if len(args) != 4:
            return False
        i, j, k, l = args
        return i < j < k < l
    if kind in RLT_KINDS:
        (i, j, k), (u, v) = args
        if not (i < j < k and u < v):
            return False
        return not is_redundant_lifting(kind, (i, j, k), (u, v))
    raise ValueError(f"unknown cut kind {kind!r}")


def is_redundant_lifting(kind, triple, pair) -> bool:
    """True iff the lifting multiplier pair coincides with one of the triple's
    own pairs; those instances are implied by the triangle/transitivity
    constraints and the separator skips them.
    """
    if kind not in RLT_KINDS:
        raise ValueError(f"not a lifting kind: {kind!r}")
    i, j, k = triple
    return pair in ((i, j), (j, k), (i, k))


def canonical_key(kind, quad, pair1, pair2):
    """Key invariant under the symmetries that leave the constraint identical."""
    args = extract_args(kind, quad, pair1, pair2)
    if kind == DICYCLE3:
        return (kind,) + tuple(args)
    if kind in (TRI1, TRI3):
        return (kind,) + tuple(sorted(args))
    if kind == TRI2:
        return (kind,) + tuple(args)
    if kind == TRI4:
        a, hub, c = args
        return (kind, hub) + tuple(sorted((a, c)))
    if kind == TRI5:
        return (kind,) + tuple(sorted(args))
    if kind == LO24:
        return (kind,) + tuple(args)
    (i, j, k), (u, v) = args
    return (kind, i, j, k, u, v)


def instantiate_cut(kind, args, n: int) -> LinearConstraint:
    """Literal linear constraint over Xbar entries (x read from row 0).

    Raises ValueError on arity/distinctness violations.
    """
    if not args_valid(kind, args):
        raise ValueError(f"invalid index tuple {args!r} for kind {kind}")

    def p(pair):
        return pair_index(pair[0], pair[1], n)

    if kind == DICYCLE3:
        i, j, k = args
        con = LinearConstraint(SENSE_EQ, 0.0, 0.0, label=(kind, i, j, k))
        con.add_x(p((i, k)), 1.0)
        con.add_entry(p((i, j)), p((i, k)), -1.0)
        con.add_entry(p((i, k)), p((j, k)), -1.0)
        con.add_entry(p((i, j)), p((j, k)), 1.0)
        return con

    label = canonical_key(kind, *_restore_tuple(kind, args))
    con = LinearConstraint(SENSE_LE, 0.0, 0.0, label=label)

    if kind == TRI1:
        a, b = args
        con.add_entry(p(a), p(b), -1.0)
    elif kind == TRI2:
        a, b = args
        con.add_entry(p(a), p(b), 1.0)
        con.add_entry(p(a), p(a), -1.0)
    elif kind == TRI3:
        a, b = args
        con.add_entry(p(a), p(a), 1.0)
        con.add_entry(p(b), p(b), 1.0)
        con.add_entry(p(a), p(b), -1.0)
        con.constant = -1.0
    elif kind == TRI4:
        a, hub, c = args
        con.add_entry(p(a), p(hub), 1.0)
        con.add_entry(p(c), p(hub), 1.0)
        con.add_entry(p(hub), p(hub), -1.0)
        con.add_entry(p(a), p(c), -1.0)
    elif kind == TRI5:
        a, b, c = args
        con.add_entry(p(a), p(a), 1.0)
        con.add_entry(p(b), p(b), 1.0)
        con.add_entry(p(c), p(c), 1.0)
        con.add_entry(p(a), p(b), -1.0)
        con.add_entry(p(a), p(c), -1.0)
        con.add_entry(p(b), p(c), -1.0)
        con.constant = -1.0
    elif kind == LO24:
        i, j, k, l = args
        con.add_x(p((i, l)), 1.0)
        con.add_entry(p((i, k)), p((j, k)), 1.0)
        con.add_entry(p((j, k)), p((j, l)), 1.0)
        con.add_x(p((i, k)), -1.0)
        con.add_x(p((j, l)), -1.0)
        con.add_entry(p((i, j)), p((k, l)), -1.0)
        con.add_entry(p((i, l)), p((j, k)), -1.0)
    elif kind in RLT_KINDS:
        (i, j, k), uv = args
        pa, pb, pc, pu = p((i, j)), p((j, k)), p((i, k)), p(uv)
        if kind == RLT_XL:
            con.add_entry(pa, pu, -1.0)
            con.add_entry(pb, pu, -1.0)
            con.add_entry(pc, pu, 1.0)
        elif kind == RLT_XR:
            con.add_entry(pa, pu, 1.0)
            con.add_entry(pb, pu, 1.0)
            con.add_entry(pc, pu, -1.0)
            con.add_x(pu, -1.0)
        elif kind == RLT_1XL:
            con.add_x(pa, -1.0)
            con.add_x(pb, -1.0)
            con.add_x(pc, 1.0)
            con.add_entry(pa, pu, 1.0)
            con.add_entry(pb, pu, 1.0)
            con.add_entry(pc, pu, -1.0)
        else:  # RLT_1XR
            con.add_x(pa, 1.0)
            con.add_x(pb, 1.0)
            con.add_x(pc, -1.0)
            con.add_entry(pa, pu, -1.0)
            con.add_entry(pb, pu, -1.0)
            con.add_entry(pc, pu, 1.0)
            con.add_x(pu, 1.0)
            con.constant = -1.0
    else:
        raise ValueError(f"unknown cut kind {kind!r}")
    return con


def _restore_tuple(kind, args):
    """Map per-kind args back to a (quad, pair1, pair2) layout for keying."""
    if kind == DICYCLE3:
        return tuple(args), (0, 0), (0, 0)
    if kind in (TRI1, TRI2, TRI3):
        a, b = args
        return a, b, (0, 0)
    if kind in (TRI4, TRI5):
        a, b, c = args
        return a, b, c
    if kind == LO24:
        return tuple(args), (0, 0), (0, 0)
    (i, j, k), uv = args
    return (i, j, k), uv, (0, 0)


def candidate_violation(cand: CutCandidate, xbar) -> float:
    """Violation of a candidate at Xbar via the instantiated constraint:
    signed value for inequalities, |value| for equalities, -inf when the index
    tuple is invalid for the kind.
    """
    args = cand.args()
    if not args_valid(cand.kind, args):
        return NEG_INF
    n = _n_from_xbar(xbar)
    con = instantiate_cut(cand.kind, args, n)
    value = evaluate_constraint(con, xbar, 0.0)
    return abs(value) if con.sense == SENSE_EQ else value


def _n_from_xbar(xbar) -> int:
    m = xbar.shape[0] - 1
    n = int(round((1 + (1 + 8 * m) ** 0.5) / 2))
    if n * (n - 1) // 2 != m:
        raise ValueError(f"matrix order {m + 1} is not C(n,2)+1 for integer n")
    return n


def make_sa_evaluator(xbar, n: int):
    """Fast violation evaluator for the annealing inner loop.

    Returns ev(kind, quad, pair1, pair2) -> float.  Works on plain lists to
    avoid per-lookup numpy overhead; collapsed tuples and redundant liftings
    evaluate to -inf so the neighborhood walk stays total.
    """
    X = [[float(v) for v in row] for row in xbar]
    P = pair_index_table(n).tolist()
    x0 = X[0]

    def ev(kind, quad, pair1, pair2):
        if kind == DICYCLE3:
            i, j, k = quad[0], quad[1], quad[2]
            pa, pc, pb = P[i][j], P[i][k], P[j][k]
            val = x0[pc] - X[pa][pc] - X[pc][pb] + X[pa][pb]
            return val if val >= 0.0 else -val
        if kind == TRI1 or kind == TRI2 or kind == TRI3:
            a0, a1 = quad[0], quad[1]
            if (a0, a1) == pair1:
                return NEG_INF
            pa, pb = P[a0][a1], P[pair1[0]][pair1[1]]
            if kind == TRI1:
                return -X[pa][pb]
            if kind == TRI2:
                return X[pa][pb] - X[pa][pa]
            return X[pa][pa] + X[pb][pb] - 1.0 - X[pa][pb]
        if kind == TRI4 or kind == TRI5:
            a = (quad[0], quad[1])
            if a == pair1 or a == pair2 or pair1 == pair2:
                return NEG_INF
            pa, pb, pc = P[a[0]][a[1]], P[pair1[0]][pair1[1]], P[pair2[0]][pair2[1]]
            if kind == TRI4:
                return X[pa][pb] + X[pc][pb] - X[pb][pb] - X[pa][pc]
            return (
                X[pa][pa] + X[pb][pb] + X[pc][pc]
                - 1.0 - X[pa][pb] - X[pa][pc] - X[pb][pc]
            )
        if kind == LO24:
            if len(quad) != 4:
                return NEG_INF
            i, j, k, l = quad
            return (
                x0[P[i][l]] + X[P[i][k]][P[j][k]] + X[P[j][k]][P[j][l]]
                - x0[P[i][k]] - x0[P[j][l]]
                - X[P[i][j]][P[k][l]] - X[P[i][l]][P[j][k]]
            )
        # lifting kinds
        i, j, k = quad[0], quad[1], quad[2]
        u, v = pair1
        if pair1 == (i, j) or pair1 == (j, k) or pair1 == (i, k):
            return NEG_INF
        pa, pb, pc, pu = P[i][j], P[j][k], P[i][k], P[u][v]
        lifted = X[pa][pu] + X[pb][pu] - X[pc][pu]
        if kind == RLT_XL:
            return -lifted
        if kind == RLT_XR:
            return lifted - x0[pu]
        plain = x0[pa] + x0[pb] - x0[pc]
        if kind == RLT_1XL:
            return lifted - plain
        if kind == RLT_1XR:
            return plain - lifted - 1.0 + x0[pu]
        raise ValueError(f"unknown cut kind {kind!r}")

    return ev


def iter_family_args(n: int, kind):
    """All instantiable argument tuples of a family on n vertices (test oracle)."""
    vertices = range(1, n + 1)
    pairs = list(combinations(vertices, 2))
    if kind == DICYCLE3:
        yield from combinations(vertices, 3)
    elif kind in (TRI1, TRI3):
        yield from combinations(pairs, 2)
    elif kind == TRI2:
        yield from permutations(pairs, 2)
    elif kind == TRI4:
        for hub in pairs:
            rest = [q for q in pairs if q != hub]
            for a, c in combinations(rest, 2):
                yield (a, hub, c)
    elif kind == TRI5:
        yield from combinations(pairs, 3)
    elif kind == LO24:
        yield from combinations(vertices, 4)
    elif kind in RLT_KINDS:
        for triple in combinations(vertices, 3):
            own = set(combinations(triple, 2))
            for uv in pairs:
                if uv not in own:
                    yield (triple, uv)
    else:
        raise ValueError(f"unknown cut kind {kind!r}")
