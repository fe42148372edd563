"""Cutting-plane driver for the lower bound.

Starting from the basic relaxation, iterations alternate separation and
resolving: a batch of annealing runs proposes violated constraints, the most
violated new ones are appended, the relaxation is resolved warm-started, and
constraints whose dual multiplier is negligible against the mean are dropped.
The family pool widens over the iterations: transitivity equalities first,
triangle inequalities from iteration 3, everything from iteration 5.

All reported bound values are the solver's certified dual bounds, so a loosely
solved relaxation still yields a valid lower bound.  The integer bound rounds
up, since the cutwidth is integral.
"""

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .cuts import ALL_KINDS, DICYCLE3, TRIANGLE_KINDS, instantiate_cut
from .graph import Graph
from .rng import derive_rng
from .sdp_model import build_basic_relaxation, constraint_violation
from .sdp_solver import STATUS_INFEASIBLE, SolverSettings, solve
from .separation import SaParams, separate_batch

log = logging.getLogger(__name__)

ROUND_EPS = 1e-6


def families_for_iteration(iteration: int):
    """Family schedule: transitivity equalities only for iterations 1-2,
    triangles join at 3, the quadruple and lifting families at 5."""
    if iteration < 1:
        raise ValueError("iterations are counted from 1")
    if iteration <= 2:
        return (DICYCLE3,)
    if iteration <= 4:
        return (DICYCLE3,) + TRIANGLE_KINDS
    return tuple(ALL_KINDS)


def dicycle_only_schedule(iteration: int):
    if iteration < 1:
        raise ValueError("iterations are counted from 1")
    return (DICYCLE3,)


def dicycle_triangle_schedule(iteration: int):
    if iteration < 1:
        raise ValueError("iterations are counted from 1")
    return (DICYCLE3,) if iteration <= 2 else (DICYCLE3,) + TRIANGLE_KINDS


SCHEDULES = {
    "all": families_for_iteration,
    "triangle": dicycle_triangle_schedule,
    "dicycle": dicycle_only_schedule,
}


@dataclass
class DriverParams:
    max_iter: int = 7
    improvement_min: float = 1e-2
    num_cuts: int | None = None  # defaults to 2 n^2
    min_violation: float = 1e-4
    prune_factor: float = 0.01
    schedule: object = field(default=families_for_iteration)
    time_limit_sec: float | None = None
    sa_params: SaParams | None = None  # annealing schedule override (families are ignored)

    def resolved_num_cuts(self, n: int) -> int:
        return self.num_cuts if self.num_cuts is not None else 2 * n * n


@dataclass
class IterationRecord:
    iteration: int
    alpha: float
    n_new_cuts: int
    n_pruned: int
    pool_size: int
    solve_time: float
    separation_time: float
    families: tuple
    solver_status: str


@dataclass
class BoundReport:
    n: int
    m_edges: int
    master_seed: int
    alpha_init: float
    alpha_final: float
    lb_integer: int
    iterations: list
    Xbar: np.ndarray
    time_total: float
    time_sdp: float
    time_separation: float
    cuts_added_total: int
    pool_final: int
    status: str  # "ok", "time_limit", "solver_failure"
    pool_constraints: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    ub: int | None = None
    ub_time: float | None = None
    ub_witness: object = None

    def gap_raw(self):
        if self.ub in (None, 0):
            return None
        return (self.ub - self.alpha_final) / self.ub

    def gap_ceiled(self):
        if self.ub in (None, 0):
            return None
        return (self.ub - self.lb_integer) / self.ub


def integer_bound(alpha: float) -> int:
    """ceil(alpha - eps), floored at 0; valid because the cutwidth is integral."""
    if not math.isfinite(alpha):
        return 0
    return max(0, math.ceil(alpha - ROUND_EPS))


def prune_cuts(pool: dict, duals: dict, prune_factor: float):
    """Drop pool cuts whose |dual| falls below prune_factor times the mean
    |dual| over the pool.  Returns (retained pool, number removed).  A zero
    mean removes nothing."""
    if not pool:
        return pool, 0
    values = [abs(duals.get(key, 0.0)) for key in pool]
    mean = sum(values) / len(values)
    if mean <= 0.0:
        return pool, 0
    threshold = prune_factor * mean
    retained = {
        key: cut
        for (key, cut), v in zip(pool.items(), values)
        if v >= threshold
    }
    return retained, len(pool) - len(retained)


def compute_lower_bound(
    graph: Graph,
    params: DriverParams | None = None,
    settings: SolverSettings | None = None,
    master_seed: int = 0,
) -> BoundReport:
    params = params or DriverParams()
    settings = settings or SolverSettings()
    n = graph.n
    if n < 2:
        raise ValueError("lower bound needs at least 2 vertices")
    num_cuts = params.resolved_num_cuts(n)
    t_start = time.perf_counter()
    deadline = (
        t_start + params.time_limit_sec if params.time_limit_sec is not None else None
    )

    problem = build_basic_relaxation(graph)
    solution = solve(problem, settings)
    alpha = solution.dual_bound
    alpha_init = alpha
    time_sdp = solution.solve_time
    time_sep = 0.0
    records = []
    warnings = []
    pool = {}
    cuts_added_total = 0
    status = "ok"
    tol_slack = 2.0 * settings.tol_gap

    if solution.status == STATUS_INFEASIBLE:
        status = "solver_failure"
        warnings.append("initial solve failed; reporting trivial bound")

    improvement = math.inf
    iteration = 0
    while (
        status == "ok"
        and iteration < params.max_iter
        and improvement > params.improvement_min
    ):
        if deadline is not None and time.perf_counter() > deadline:
            status = "time_limit"
            warnings.append(f"time limit hit after iteration {iteration}")
            break
        iteration += 1
        families = tuple(params.schedule(iteration))
        base_sa = params.sa_params or SaParams()
        sa = SaParams(
            t_init=base_sa.t_init,
            cool_factor=base_sa.cool_factor,
            max_iter=base_sa.max_iter,
            max_len_plateau=base_sa.max_len_plateau,
            families=families,
        )
        sep_seed = int(derive_rng(master_seed, "sep-master", iteration).integers(2**63))
        t_sep = time.perf_counter()
        batch = separate_batch(
            solution.Xbar, n, sa, 2 * num_cuts, sep_seed, params.min_violation
        )
        sep_elapsed = time.perf_counter() - t_sep
        time_sep += sep_elapsed

        new_cands = [c for c in batch if c.key() not in pool][:num_cuts]
        if not new_cands:
            improvement = 0.0
            records.append(
                IterationRecord(
                    iteration, alpha, 0, 0, len(pool), 0.0, sep_elapsed,
                    families, "skipped",
                )
            )
            continue
        for cand in new_cands:
            pool[cand.key()] = instantiate_cut(cand.kind, cand.args(), n)
        cuts_added_total += len(new_cands)
        problem.cuts = list(pool.values())

        new_solution = solve(problem, settings.with_warm_start(solution))
        time_sdp += new_solution.solve_time
        if new_solution.status == STATUS_INFEASIBLE:
            status = "solver_failure"
            warnings.append(f"solve failed at iteration {iteration}; keeping last bound")
            records.append(
                IterationRecord(
                    iteration, alpha, len(new_cands), 0, len(pool),
                    new_solution.solve_time, sep_elapsed, families, new_solution.status,
                )
            )
            break
        solution = new_solution
        alpha_new = solution.dual_bound

        pool, n_pruned = prune_cuts(pool, solution.duals, params.prune_factor)
        problem.cuts = list(pool.values())

        if alpha_new < alpha - tol_slack * max(1.0, abs(alpha)):
            warnings.append(
                f"bound decreased at iteration {iteration}: {alpha:.6f} -> {alpha_new:.6f}"
            )
        improvement = alpha_new - alpha
        alpha = max(alpha, alpha_new)
        records.append(
            IterationRecord(
                iteration, alpha_new, len(new_cands), n_pruned, len(pool),
                solution.solve_time, sep_elapsed, families, solution.status,
            )
        )
        log.info(
            "iteration %d: bound %.4f (+%d cuts, -%d pruned, pool %d)",
            iteration, alpha_new, len(new_cands), n_pruned, len(pool),
        )

    return BoundReport(
        n=n,
        m_edges=graph.num_edges(),
        master_seed=master_seed,
        alpha_init=alpha_init,
        alpha_final=alpha,
        lb_integer=integer_bound(alpha),
        iterations=records,
        Xbar=solution.Xbar,
        time_total=time.perf_counter() - t_start,
        time_sdp=time_sdp,
        time_separation=time_sep,
        cuts_added_total=cuts_added_total,
        pool_final=len(pool),
        status=status,
        pool_constraints=list(pool.values()),
        warnings=warnings,
    )


def enforced_cut_violations(report: BoundReport):
    """Recomputed violations of the final pool at the final matrix (diagnostics)."""
    return [
        constraint_violation(con, report.Xbar, report.alpha_final)
        for con in report.pool_constraints
    ]
