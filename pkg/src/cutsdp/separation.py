"""Simulated-annealing search for violated strengthening constraints.

One run walks over index tuples ((i,j,k,l),(u,v),(q,w)) coupled with a
constraint kind: a neighbor replaces one of the eight slots, every enabled
kind is scored on the neighbor tuple, improvements are accepted, worsenings
are accepted with the Metropolis probability (cooling happens on those
acceptances), and the best scoring (tuple, kind) seen is returned.  A batch
runs many independent searches on derived seeds and deduplicates the
surviving candidates by their canonical key.
"""

import math
from dataclasses import dataclass, field

from .cuts import (
    ALL_KINDS,
    NEG_INF,
    CutCandidate,
    candidate_violation,
    make_sa_evaluator,
)
from .ordering import pair_count
from .rng import derive_rng

MIN_VIOLATION_DEFAULT = 1e-4
_RESAMPLE_RETRIES = 12


@dataclass
class SaParams:
    """Annealing schedule; max_iter / max_len_plateau default to C(n,2) and
    floor(n/2) when left as None."""

    t_init: float = 0.042
    cool_factor: float = 0.97
    max_iter: int | None = None
    max_len_plateau: int | None = None
    families: tuple = field(default_factory=lambda: tuple(ALL_KINDS))

    def __post_init__(self):
        if self.t_init <= 0 or not 0 < self.cool_factor:
            raise ValueError("annealing parameters must be positive")
        if not self.families:
            raise ValueError("at least one constraint family must be enabled")

    def resolved_max_iter(self, n):
        return self.max_iter if self.max_iter is not None else pair_count(n)

    def resolved_plateau(self, n):
        return self.max_len_plateau if self.max_len_plateau is not None else n // 2


def random_index_tuple(n: int, rng):
    """Fresh uniform tuple: sorted distinct quadruple (triple when n == 3),
    plus two sorted pairs."""
    quad_size = min(4, n)
    quad = tuple(sorted(int(v) + 1 for v in rng.choice(n, size=quad_size, replace=False)))
    u, v = sorted(int(t) + 1 for t in rng.choice(n, size=2, replace=False))
    q, w = sorted(int(t) + 1 for t in rng.choice(n, size=2, replace=False))
    return (quad, (u, v), (q, w))


def random_neighbor_indices(indices, n: int, rng):
    """Resample one uniformly chosen slot, re-sorting its group; retries keep
    groups duplicate-free, falling back to a fresh uniform tuple."""
    quad, pair1, pair2 = indices
    nslots = len(quad) + 4
    slot = int(rng.integers(nslots))
    for _ in range(_RESAMPLE_RETRIES):
        value = int(rng.integers(1, n + 1))
        if slot < len(quad):
            group = list(quad)
            group[slot] = value
            if len(set(group)) == len(group):
                return (tuple(sorted(group)), pair1, pair2)
        elif slot < len(quad) + 2:
            group = list(pair1)
            group[slot - len(quad)] = value
            if group[0] != group[1]:
                return (quad, (min(group), max(group)), pair2)
        else:
            group = list(pair2)
            group[slot - len(quad) - 2] = value
            if group[0] != group[1]:
                return (quad, pair1, (min(group), max(group)))
    return random_index_tuple(n, rng)


def separate_one(xbar, n: int, params: SaParams, rng):
    """One annealing run; returns (best candidate or None, best violation).

    The returned candidate's cached violation is recomputed through the
    instantiated constraint so it matches later re-evaluations exactly.
    """
    if n < 3:
        return None, NEG_INF
    evaluate = make_sa_evaluator(xbar, n)
    families = params.families
    max_iter = params.resolved_max_iter(n)
    max_plateau = params.resolved_plateau(n)

    indices = random_index_tuple(n, rng)
    current_kind = None
    current_violation = NEG_INF
    best = (indices, None)
    best_violation = NEG_INF
    temp = params.t_init
    cool = params.cool_factor
    iteration = 0
    plateau = 0

    while plateau < max_plateau and iteration < max_iter:
        iteration += 1
        plateau += 1
        neighbor = random_neighbor_indices(indices, n, rng)
        quad, pair1, pair2 = neighbor
        for kind in families:
            violation = evaluate(kind, quad, pair1, pair2)
            if violation > current_violation:
                indices = neighbor
                current_kind = kind
                current_violation = violation
            elif violation > NEG_INF:
                delta = violation - current_violation
                if rng.random() < math.exp(delta / temp):
                    indices = neighbor
                    current_kind = kind
                    current_violation = violation
                    temp *= cool
        if current_violation > best_violation:
            best = (indices, current_kind)
            best_violation = current_violation
            plateau = 0

    if best[1] is None:
        return None, NEG_INF
    (quad, pair1, pair2), kind = best
    cand = CutCandidate(kind=kind, quad=quad, pair1=pair1, pair2=pair2)
    cand.violation = candidate_violation(cand, xbar)
    return cand, cand.violation


def separate_batch(
    xbar,
    n: int,
    params: SaParams,
    count: int,
    master_seed: int,
    min_violation: float = MIN_VIOLATION_DEFAULT,
):
    """`count` independent runs on seeds derived from (master_seed, run index);
    survivors (violation > min_violation) are deduplicated by canonical key,
    keeping the most violated representative, and sorted by violation."""
    found = {}
    for run in range(count):
        rng = derive_rng(master_seed, "separation", run)
        cand, violation = separate_one(xbar, n, params, rng)
        if cand is None or violation <= min_violation:
            continue
        key = cand.key()
        kept = found.get(key)
        if kept is None or violation > kept.violation:
            found[key] = cand
    return sorted(found.values(), key=lambda c: -c.violation)
