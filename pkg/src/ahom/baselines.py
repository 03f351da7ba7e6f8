"""Second-order and first-order reference optimisers: gradient descent,
adaptive cubic regularisation (iterated SARp) and a Steihaug-CG trust
region."""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .driver import IterationRecord, RunResult
from .errors import NumericError, ParameterError
from .sarp import DEGENERATE_DECREASE, SarpConfig, sarp_step


@dataclass(frozen=True)
class BaselineConfig:
    eps1: float = 1e-6
    eps2: float = 1e-6
    max_iters: int = 5000
    max_time_s: float = math.inf
    # gradient descent with Armijo backtracking
    gd_c1: float = 1e-4
    gd_backtrack: float = 0.5
    gd_initial_step: float = 1.0
    gd_max_backtracks: int = 60
    # trust region
    tr_initial_radius: float = 5.0
    tr_max_radius: float = 1e4
    tr_accept_eta: float = 0.25
    tr_good_eta: float = 0.75
    tr_shrink: float = 0.25
    tr_grow: float = 2.0
    sarp: SarpConfig = field(default_factory=SarpConfig)
    subsolver_mode: str = "krylov"
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.tr_initial_radius <= self.tr_max_radius):
            raise ParameterError("need 0 < initial radius <= max radius")
        if not (0 < self.tr_accept_eta < self.tr_good_eta < 1):
            raise ParameterError("need 0 < accept eta < very-good eta < 1")
        if not (0 < self.tr_shrink < 1 < self.tr_grow):
            raise ParameterError("need 0 < shrink < 1 < grow")
        if not (0 < self.gd_backtrack < 1 and 0 < self.gd_c1 < 1 and self.gd_initial_step > 0):
            raise ParameterError("invalid Armijo constants")


def _lambda_min(H):
    return float(np.linalg.eigvalsh(H)[0])


def _record(k, f, chi1, step_norm, start, chi2=math.nan, sigma=math.nan, rho=math.nan,
            kind=""):
    return IterationRecord(k, float(f), float(chi1), chi2, math.nan, sigma, math.nan, rho,
                           None, None, kind, float(step_norm), time.monotonic() - start)


def gd_run(oracle, x0, cfg=None):
    """Gradient descent with Armijo backtracking.

    The first trial step of every iteration is min(initial_step, 1/||H(x)||_2),
    so the line search starts from the local curvature scale.
    """
    cfg = cfg or BaselineConfig()
    x = np.array(x0, dtype=np.float64)
    f = oracle.value(x)
    g = oracle.gradient(x)
    trace = []
    start = time.monotonic()
    status = "budget_exhausted"
    if np.linalg.norm(g) <= cfg.eps1:
        return RunResult(x, trace, "converged", math.nan, math.nan)
    for k in range(cfg.max_iters):
        if time.monotonic() - start > cfg.max_time_s:
            break
        gg = float(g @ g)
        curv = float(np.linalg.norm(oracle.hessian(x), 2))
        t = cfg.gd_initial_step if curv <= 0 else min(cfg.gd_initial_step, 1.0 / curv)
        for _ in range(cfg.gd_max_backtracks):
            trial = x - t * g
            f_trial = oracle.value(trial)
            if np.isfinite(f_trial) and f_trial <= f - cfg.gd_c1 * t * gg:
                break
            t *= cfg.gd_backtrack
        else:
            status = "line_search_failed"
            break
        step = float(np.linalg.norm(trial - x))
        x, f = trial, f_trial
        g = oracle.gradient(x)
        chi1 = float(np.linalg.norm(g))
        trace.append(_record(k, f, chi1, step, start))
        if chi1 <= cfg.eps1:
            status = "converged"
            break
    return RunResult(x, trace, status, math.nan, math.nan)


def arc_run(oracle, x0, cfg=None, mode=None):
    """Adaptive cubic regularisation: SARp iterated until chi1 <= eps1 and
    chi2 <= eps2."""
    cfg = cfg or BaselineConfig()
    mode = mode or cfg.subsolver_mode
    rng = np.random.default_rng(cfg.seed)
    x = np.array(x0, dtype=np.float64)
    f = oracle.value(x)
    sigma = cfg.sarp.sigma0
    trace = []
    start = time.monotonic()
    status = "budget_exhausted"
    for k in range(cfg.max_iters):
        if time.monotonic() - start > cfg.max_time_s:
            break
        try:
            out = sarp_step(oracle, x, sigma, cfg.sarp, mode, rng, f)
            chi1 = float(np.linalg.norm(oracle.gradient(out.z)))
            chi2 = max(0.0, -_lambda_min(oracle.hessian(out.z)))
        except (NumericError, np.linalg.LinAlgError):
            status = "numeric_failure"
            break
        step = float(np.linalg.norm(out.z - x))
        kind = "sarp_success" if out.successful else "sarp_fail"
        trace.append(_record(k, out.f_z, chi1, step, start, chi2, sigma, out.rho, kind))
        x, f, sigma = out.z, out.f_z, out.sigma_next
        if chi1 <= cfg.eps1 and chi2 <= cfg.eps2:
            status = "converged"
            break
        # a larger sigma only shrinks a model decrease that is already negligible
        if out.model_decrease <= DEGENERATE_DECREASE:
            status = "stalled"
            break
    return RunResult(x, trace, status, math.nan, sigma)


def steihaug_cg(g, H, radius, tol):
    """Truncated CG on the quadratic model inside ||p|| <= radius."""
    n = g.shape[0]
    p = np.zeros(n)
    r = g.copy()
    d = -r
    rr = float(r @ r)
    if math.sqrt(rr) <= tol:
        return p
    for _ in range(2 * n + 10):
        Hd = H @ d
        dHd = float(d @ Hd)
        if dHd <= 0:
            return p + _to_boundary(p, d, radius) * d
        a = rr / dHd
        p_next = p + a * d
        if np.linalg.norm(p_next) >= radius:
            return p + _to_boundary(p, d, radius) * d
        p = p_next
        r = r + a * Hd
        rr_next = float(r @ r)
        if math.sqrt(rr_next) <= tol:
            return p
        d = -r + (rr_next / rr) * d
        rr = rr_next
    return p


def _to_boundary(p, d, radius):
    """tau >= 0 with ||p + tau d|| = radius."""
    a = float(d @ d)
    b = 2.0 * float(p @ d)
    c = float(p @ p) - radius ** 2
    return (-b + math.sqrt(max(b * b - 4 * a * c, 0.0))) / (2 * a)


def tr_run(oracle, x0, cfg=None):
    """Trust-region Newton with Steihaug-CG steps; stops when chi1 <= eps1
    and chi2 <= eps2."""
    cfg = cfg or BaselineConfig()
    x = np.array(x0, dtype=np.float64)
    f = oracle.value(x)
    radius = cfg.tr_initial_radius
    trace = []
    start = time.monotonic()
    status = "budget_exhausted"
    g = oracle.gradient(x)
    H = oracle.hessian(x)
    if np.linalg.norm(g) <= cfg.eps1 and -_lambda_min(H) <= cfg.eps2:
        return RunResult(x, trace, "converged", math.nan, math.nan)
    for k in range(cfg.max_iters):
        if time.monotonic() - start > cfg.max_time_s:
            break
        gnorm = float(np.linalg.norm(g))
        tol = min(0.5, math.sqrt(gnorm)) * gnorm
        p = steihaug_cg(g, H, radius, tol)
        pred = -float(g @ p + 0.5 * p @ H @ p)
        trial = x + p
        f_trial = oracle.value(trial)
        if pred > 0 and np.isfinite(f_trial):
            rho = (f - f_trial) / pred
        else:
            rho = -math.inf
        pnorm = float(np.linalg.norm(p))
        if rho < cfg.tr_accept_eta:
            radius = cfg.tr_shrink * radius
        elif rho > cfg.tr_good_eta and pnorm >= 0.99 * radius:
            radius = min(cfg.tr_grow * radius, cfg.tr_max_radius)
        accepted = rho >= cfg.tr_accept_eta
        if accepted:
            x, f = trial, f_trial
            g = oracle.gradient(x)
            H = oracle.hessian(x)
        chi1 = float(np.linalg.norm(g))
        chi2 = max(0.0, -_lambda_min(H))
        trace.append(_record(k, f, chi1, pnorm if accepted else 0.0, start, chi2,
                             rho=rho, kind="tr_success" if accepted else "tr_fail"))
        if chi1 <= cfg.eps1 and chi2 <= cfg.eps2:
            status = "converged"
            break
        if radius < 1e-300 or pnorm == 0.0 and not accepted:
            status = "stalled"
            break
    return RunResult(x, trace, status, math.nan, math.nan)
