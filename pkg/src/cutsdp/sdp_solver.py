"""First-order solver for the lifted relaxation with a dual-based safe bound.

The problem is cast as a cone program over z = (svec(Xbar), alpha):

    min alpha   s.t.   L z + s_lin = b,    s_lin in {0}^eq x R+^ineq,
                       -svec(Xbar) + s_psd = 0,   s_psd in svec(PSD),

where L collects the linear constraint rows.  A two-block operator splitting
alternates (i) a linear solve for z against the augmented Lagrangian and
(ii) projections of the slacks onto their cones, with the scaled multipliers
as dual variables.  The z-system (I + L^T L restricted to the matrix block)
is solved through the matrix inversion identity, so the only factorization is
an LU of the much smaller row-space system I + B B^T.

Dual values of the added cuts come straight from the multipliers.  The
reported lower bound is a certified dual bound: multipliers are clipped to
their sign cone and scaled so the alpha column is dual-feasible, and the
remaining indefiniteness of the aggregated slack matrix is charged against
the trace bound tr(Xbar) <= 1 + m that every feasible point satisfies.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .sdp_model import SENSE_EQ, SENSE_LE, SdpProblem, constraint_violation

DEFAULT_TOL = 1e-5

STATUS_OPTIMAL = "optimal"
STATUS_MAX_ITER = "max_iter"
STATUS_INFEASIBLE = "infeasible"


@dataclass
class SolverSettings:
    tol_primal: float = DEFAULT_TOL
    tol_dual: float = DEFAULT_TOL
    tol_gap: float = DEFAULT_TOL
    tol_psd: float = 1e-7
    max_iterations: int = 20000
    rho: float = 1.0
    over_relax: float = 1.9
    check_every: int = 25
    adapt_every: int = 50
    adapt_factor: float = 2.0
    adapt_deadband: float = 10.0
    row_weight: float = 3.0  # penalty weight of linear rows relative to the PSD block
    warm_start: "SdpSolution | None" = None
    verbose: bool = False
    log_file: str | None = None

    def __post_init__(self):
        if min(self.tol_primal, self.tol_dual, self.tol_gap, self.tol_psd) <= 0:
            raise ValueError("tolerances must be positive")

    def with_warm_start(self, solution):
        return replace(self, warm_start=solution)


@dataclass
class SdpSolution:
    alpha: float
    Xbar: np.ndarray
    duals: dict  # cut label -> multiplier
    status: str
    residuals: tuple  # (primal_infeas, dual_infeas, rel_gap)
    dual_bound: float = float("-inf")  # certified lower bound on the optimum
    dual_objective: float = float("nan")
    row_duals: dict = field(default_factory=dict)  # every row label -> multiplier
    psd_dual: np.ndarray | None = None
    rho: float = 1.0
    iterations: int = 0
    solve_time: float = 0.0


def project_psd(mat: np.ndarray) -> np.ndarray:
    """Nearest PSD matrix: eigendecomposition with negative eigenvalues clipped."""
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("input must be a square matrix")
    scale = max(1.0, float(np.abs(mat).max()))
    if np.abs(mat - mat.T).max() > 1e-8 * scale:
        raise ValueError("input must be symmetric")
    sym = 0.5 * (mat + mat.T)
    vals, vecs = np.linalg.eigh(sym)
    if vals[0] >= 0.0:
        return sym
    clipped = np.clip(vals, 0.0, None)
    out = (vecs * clipped) @ vecs.T
    return 0.5 * (out + out.T)


def _svec_maps(d: int):
    rows, cols = np.triu_indices(d)
    weights = np.where(rows == cols, 1.0, np.sqrt(2.0))
    return rows, cols, weights


def _svec(mat, rows, cols, weights):
    return mat[rows, cols] * weights


def _smat(vec, d, rows, cols, weights):
    mat = np.zeros((d, d))
    mat[rows, cols] = vec / weights
    mat = mat + mat.T
    mat[np.arange(d), np.arange(d)] *= 0.5
    return mat


class _Assembled:
    """Scaled row data for one solve."""

    def __init__(self, problem: SdpProblem, row_weight: float = 1.0):
        d = problem.m + 1
        self.d = d
        self.nx = d * (d + 1) // 2
        self.rows, self.cols, self.weights = _svec_maps(d)
        cons = problem.all_constraints()
        self.labels = [con.label for con in cons]
        self.senses = np.array([con.sense == SENSE_EQ for con in cons])
        p = len(cons)
        data, ridx, cidx = [], [], []
        g = np.zeros(p)
        b = np.zeros(p)
        sq2 = np.sqrt(2.0)
        for r, con in enumerate(cons):
            g[r] = con.alpha_coeff
            b[r] = -con.constant
            for (i, j), coeff in con.terms.items():
                pos = i * d - i * (i - 1) // 2 + (j - i)
                data.append(coeff if i == j else sq2 * coeff)
                ridx.append(r)
                cidx.append(pos)
        B = sp.csr_matrix((data, (ridx, cidx)), shape=(p, self.nx))
        norms = np.sqrt(np.asarray(B.multiply(B).sum(axis=1)).ravel() + g * g)
        norms[norms < 1e-12] = 1.0
        # dividing the normalizer by row_weight scales every row up by the same
        # factor, acting as a per-row penalty; zero and R+ cones are invariant
        norms = norms / row_weight
        self.nu = norms
        scale = sp.diags(1.0 / norms)
        self.B = (scale @ B).tocsr()
        self.g = g / norms
        self.b = b / norms
        self.eq = self.senses
        self.ineq = ~self.senses
        self.alpha_rows = np.abs(g) > 0
        self.p = p

    def factorize(self):
        G = (self.B @ self.B.T).tocsc() + sp.identity(self.p, format="csc")
        self.lu = splu(G)
        Btg = self.B.T @ self.g
        self.w_g = self._apply_kinv(Btg)
        self.sigma = float(self.g @ self.g - Btg @ self.w_g)
        if self.sigma <= 0:
            raise ValueError("alpha coefficient column is degenerate")

    def _apply_kinv(self, v):
        return v - self.B.T @ self.lu.solve(self.B @ v)

    def solve_normal(self, r_x, r_a):
        t = self._apply_kinv(r_x)
        a = (r_a - self.w_g @ r_x) / self.sigma
        return t - a * self.w_g, a


def _initial_point(asm: _Assembled, problem: SdpProblem):
    d = asm.d
    v = np.full(d, 0.5)
    v[0] = 1.0
    X0 = np.outer(v, v)
    idx = np.arange(1, d)
    X0[idx, idx] += 0.25
    x = _svec(X0, asm.rows, asm.cols, asm.weights)
    vals = asm.B @ x - asm.b
    cw = asm.alpha_rows
    a = float((vals[cw] / (-asm.g[cw])).max()) if cw.any() else 0.0
    return x, max(a, 0.0)


def solve(problem: SdpProblem, settings: SolverSettings | None = None) -> SdpSolution:
    """Run the splitting method until the recomputed KKT residuals meet the
    tolerances (status "optimal") or the iteration budget runs out.
    """
    settings = settings or SolverSettings()
    t0 = time.perf_counter()
    asm = _Assembled(problem, row_weight=settings.row_weight)
    asm.factorize()
    d, nx, p = asm.d, asm.nx, asm.p
    B, g, b = asm.B, asm.g, asm.b
    rho = settings.rho
    theta = settings.over_relax

    warm = settings.warm_start
    if warm is not None and warm.Xbar is not None and warm.Xbar.shape == (d, d):
        x = _svec(warm.Xbar, asm.rows, asm.cols, asm.weights)
        a = float(warm.alpha)
        y_lin = np.zeros(p)
        for r, label in enumerate(asm.labels):
            y_lin[r] = warm.row_duals.get(label, 0.0) * asm.nu[r]
        y_psd = (
            _svec(warm.psd_dual, asm.rows, asm.cols, asm.weights)
            if warm.psd_dual is not None
            else np.zeros(nx)
        )
        rho = warm.rho or rho
        u_lin, u_psd = y_lin / rho, y_psd / rho
    else:
        x, a = _initial_point(asm, problem)
        u_lin, u_psd = np.zeros(p), np.zeros(nx)

    s_lin = np.zeros(p)
    s_psd = x.copy()
    log_fp = open(settings.log_file, "w") if settings.log_file else None
    if log_fp:
        log_fp.write("iter,primal_res,dual_res,gap,rho,certified_bound\n")

    status = STATUS_MAX_ITER
    it = 0
    tighten = 0.95
    pri = dua = gap = np.inf
    max_iter = settings.max_iterations
    best_bound = float("-inf")

    def current_measures(az_lin, x, a):
        vals = az_lin - b
        viol = np.where(asm.eq, np.abs(vals), np.maximum(vals, 0.0)) * asm.nu
        pri_lin = float(viol.max()) if p else 0.0
        pri_psd = float(np.abs(x - s_psd).max())
        y_l = rho * u_lin
        y_p = rho * u_psd
        delta_x = B.T @ y_l - y_p
        delta_a = 1.0 + g @ y_l
        dua = max(float(np.abs(delta_x).max()), abs(float(delta_a)))
        dobj = -float(b @ y_l)
        gap = abs(a - dobj) / max(1.0, abs(a), abs(dobj))
        return max(pri_lin, pri_psd), dua, gap

    while it < max_iter:
        it += 1
        # z-update
        v_lin = b - s_lin - u_lin
        r_x = B.T @ v_lin + (s_psd + u_psd)
        r_a = g @ v_lin - 1.0 / rho
        x, a = asm.solve_normal(r_x, r_a)
        az_lin = B @ x + g * a
        # slack update with over-relaxation
        h_lin = theta * az_lin + (1.0 - theta) * (b - s_lin)
        h_psd = theta * (-x) + (1.0 - theta) * (-s_psd)
        w_lin = b - h_lin - u_lin
        s_lin = np.where(asm.eq, 0.0, np.maximum(w_lin, 0.0))
        w_psd = -h_psd - u_psd
        Wm = _smat(w_psd, d, asm.rows, asm.cols, asm.weights)
        vals, vecs = scipy.linalg.eigh(Wm, driver="evd", check_finite=False)
        pos = vals > 0
        if pos.all():
            s_psd = w_psd
        elif not pos.any():
            s_psd = np.zeros(nx)
        else:
            Pm = (vecs[:, pos] * vals[pos]) @ vecs[:, pos].T
            s_psd = _svec(Pm, asm.rows, asm.cols, asm.weights)
        # multiplier update
        u_lin = u_lin + h_lin + s_lin - b
        u_psd = u_psd + h_psd + s_psd

        if it % settings.check_every == 0 or it == max_iter:
            pri, dua, gap = current_measures(az_lin, x, a)
            _, cert = _certified_bound(asm, rho * u_lin, problem.m)
            best_bound = max(best_bound, cert)
            if log_fp:
                log_fp.write(
                    f"{it},{pri:.3e},{dua:.3e},{gap:.3e},{rho:.3e},{cert:.8e}\n"
                )
            if settings.verbose and it % (settings.check_every * 20) == 0:
                print(f"  iter {it}: primal {pri:.2e} dual {dua:.2e} gap {gap:.2e}")
            if (
                pri <= tighten * settings.tol_primal
                and dua <= tighten * settings.tol_dual
                and gap <= tighten * settings.tol_gap
            ):
                # verify against the from-scratch residuals of the projected
                # iterate; the projection may cost a little primal feasibility
                candidate = _finalize(
                    problem, asm, x, a, rho, u_lin, u_psd, STATUS_OPTIMAL, it,
                    best_bound,
                )
                res = candidate.residuals
                if (
                    res[0] <= settings.tol_primal
                    and res[1] <= settings.tol_dual
                    and res[2] <= settings.tol_gap
                ):
                    candidate.solve_time = time.perf_counter() - t0
                    if log_fp:
                        log_fp.close()
                    return candidate
                tighten *= 0.6
            if not np.isfinite(pri) or not np.isfinite(a) or abs(a) > 1e12:
                status = STATUS_INFEASIBLE
                break
        if it % settings.adapt_every == 0 and it < max_iter and np.isfinite(pri):
            scaled_p = pri / settings.tol_primal
            scaled_d = dua / settings.tol_dual
            band, fac = settings.adapt_deadband, settings.adapt_factor
            if scaled_p > band * scaled_d and rho < 1e6:
                rho *= fac
                u_lin /= fac
                u_psd /= fac
            elif scaled_d > band * scaled_p and rho > 1e-6:
                rho /= fac
                u_lin *= fac
                u_psd *= fac

    if log_fp:
        log_fp.close()

    solution = _finalize(problem, asm, x, a, rho, u_lin, u_psd, status, it, best_bound)
    solution.solve_time = time.perf_counter() - t0
    return solution


def _finalize(problem, asm, x, a, rho, u_lin, u_psd, status, iterations, best_bound):
    d = asm.d
    Xraw = _smat(x, d, asm.rows, asm.cols, asm.weights)
    Xbar = project_psd(Xraw)
    y_lin = rho * u_lin
    y_psd = rho * u_psd

    y_orig = y_lin / asm.nu
    y_orig[asm.ineq] = np.maximum(y_orig[asm.ineq], 0.0)
    row_duals = {label: float(y_orig[r]) for r, label in enumerate(asm.labels)}
    cut_duals = {
        con.label: row_duals[con.label]
        for con in problem.cuts
        if con.label in row_duals
    }

    psd_dual = _smat(y_psd, d, asm.rows, asm.cols, asm.weights)
    dual_objective, dual_bound = _certified_bound(asm, y_lin.copy(), problem.m)
    dual_bound = max(dual_bound, best_bound)

    solution = SdpSolution(
        alpha=float(a),
        Xbar=Xbar,
        duals=cut_duals,
        status=status,
        residuals=(np.nan, np.nan, np.nan),
        dual_bound=dual_bound,
        dual_objective=dual_objective,
        row_duals=row_duals,
        psd_dual=psd_dual,
        rho=rho,
        iterations=iterations,
    )
    solution.residuals = residuals(problem, solution)
    return solution


def _certified_bound(asm, y_scaled, m):
    """Dual objective and a bound valid under weak duality for any iterate.

    Multipliers of inequality rows are clipped nonnegative and the rows
    carrying alpha are rescaled so the alpha column of the dual is exactly
    feasible; the aggregated slack matrix S may then fail PSD-ness by a
    margin lambda_min(S) < 0, which is charged against tr(Xbar) <= 1 + m.
    """
    y = y_scaled
    y[asm.ineq] = np.maximum(y[asm.ineq], 0.0)
    cw = asm.alpha_rows
    total = -float(asm.g[cw] @ y[cw])  # = sum of original cw multipliers
    if total <= 1e-12:
        return float("nan"), float("-inf")
    y[cw] = y[cw] / total
    dual_obj = -float(asm.b @ y)
    svec_S = asm.B.T @ y
    S = _smat(svec_S, asm.d, asm.rows, asm.cols, asm.weights)
    lam_min = float(np.linalg.eigvalsh(S)[0])
    bound = dual_obj + min(0.0, lam_min) * (1 + m)
    return dual_obj, bound


def residuals(problem: SdpProblem, solution: SdpSolution):
    """(primal infeasibility, dual infeasibility, relative gap), recomputed
    from the returned matrices and multipliers, independent of solver state.
    """
    Xbar = solution.Xbar
    alpha = solution.alpha
    pri = 0.0
    for con in problem.all_constraints():
        pri = max(pri, constraint_violation(con, Xbar, alpha))
    lam = float(np.linalg.eigvalsh(0.5 * (Xbar + Xbar.T))[0])
    pri = max(pri, -lam if lam < 0 else 0.0)

    d = Xbar.shape[0]
    S = np.zeros((d, d))
    alpha_col = 1.0
    dobj = 0.0
    min_ineq_dual = 0.0
    for con in problem.all_constraints():
        y = solution.row_duals.get(con.label, 0.0)
        if con.sense == SENSE_LE:
            min_ineq_dual = min(min_ineq_dual, y)
        alpha_col += y * con.alpha_coeff
        dobj += y * con.constant
        if y != 0.0:
            for (i, j), coeff in con.terms.items():
                if i == j:
                    S[i, i] += y * coeff
                else:
                    S[i, j] += y * coeff
                    S[j, i] += y * coeff
    if solution.psd_dual is not None:
        S -= solution.psd_dual
        lam_y = float(np.linalg.eigvalsh(solution.psd_dual)[0])
    else:
        lam_y = 0.0
    dua = max(
        float(np.abs(S).max()),
        abs(alpha_col),
        -min_ineq_dual,
        -lam_y if lam_y < 0 else 0.0,
    )
    gap = abs(alpha - dobj) / max(1.0, abs(alpha), abs(dobj))
    return (float(pri), float(dua), float(gap))
