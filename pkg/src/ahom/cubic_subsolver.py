"""Minimisation of the cubic-regularised quadratic model

    m(s) = g.s + 0.5 s.H.s + (sigma/3) ||s||^3

either globally through an eigendecomposition and the scalar secular
equation (``exact``), or inside the Krylov space span{g, Hg, H^2 g, ...}
built by Lanczos with full reorthogonalisation (``krylov``).
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .errors import DimensionError, NumericError, ParameterError

SECULAR_TOL = 1e-12
SECULAR_MAX_ITER = 100
BREAKDOWN_TOL = 1e-12
MODES = ("exact", "krylov")


@dataclass
class ModelSolution:
    step: np.ndarray
    model_decrease: float
    chi_m1: float
    chi_m2: float
    mode_used: str
    conditions_met: bool = True
    krylov_dim: int = 0


def model_value(g, H, sigma, s):
    """g.s + 0.5 s.H.s + sigma/3 ||s||^3 (the constant f(x) is omitted)."""
    g, H, s = _as_arrays(g, H, s)
    if sigma < 0:
        raise ParameterError("sigma must be nonnegative")
    ns = _scaled_norm(s)
    return float(g @ s + 0.5 * s @ H @ s + sigma / 3.0 * ns ** 3)


def model_measures(g, H, sigma, s):
    """(||grad m(s)||, max(0, -lambda_min(hess m(s))))."""
    g, H, s = _as_arrays(g, H, s)
    ns = _scaled_norm(s)
    chi1 = float(_scaled_norm(g + H @ s + sigma * ns * s))
    Hm = H + sigma * ns * np.eye(len(g))
    if ns > 0:
        Hm = Hm + sigma * np.outer(s, s) / ns
    lam_min = np.linalg.eigvalsh(Hm)[0]
    return chi1, max(0.0, -float(lam_min))


def _as_arrays(g, H, s=None):
    g = np.atleast_1d(np.asarray(g, dtype=np.float64))
    H = np.atleast_2d(np.asarray(H, dtype=np.float64))
    n = g.shape[0]
    if H.shape != (n, n):
        raise DimensionError(f"H has shape {H.shape}, expected {(n, n)}")
    if s is None:
        return g, H
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    if s.shape != (n,):
        raise DimensionError(f"s has shape {s.shape}, expected {(n,)}")
    return g, H, s


def _scaled_norm(v):
    m = np.max(np.abs(v)) if v.size else 0.0
    if m == 0.0 or not np.isfinite(m):
        return m
    return m * np.sqrt(np.sum((v / m) ** 2))


def _secular_root(gt, lam, sigma, lo):
    """Root lambda > lo of sigma * ||s(lambda)|| = lambda, where
    s(lambda)_i = -gt_i / (lam_i + lambda).

    Newton on 1/||s|| - sigma/lambda (increasing in lambda), safeguarded
    by a bracket that is tightened every iteration.
    """
    gnorm = _scaled_norm(gt)
    a = lo
    b = 0.5 * (lo + np.sqrt(lo * lo + 4.0 * sigma * gnorm))
    b = max(b, lo * (1 + 1e-15) + 1e-300)
    x = b
    for _ in range(SECULAR_MAX_ITER):
        d = lam + x
        if np.any(d <= 0):
            x = 0.5 * (a + b)
            continue
        r = gt / d
        ns = _scaled_norm(r)
        resid = sigma * ns - x
        if abs(resid) <= SECULAR_TOL * max(1.0, x):
            return x
        if resid > 0:
            a = x
        else:
            b = x
        rh = r / ns
        # d/dlambda (1/||s||) = sum(rh^2 / d) / ||s||
        phi = 1.0 / ns - sigma / x
        dphi = np.sum(rh * rh / d) / ns + sigma / x ** 2
        step = x - phi / dphi if dphi > 0 else np.nan
        if not (a < step < b):
            step = 0.5 * (a + b)
        if b - a <= 4 * np.finfo(float).eps * max(1.0, b):
            return step
        x = step
    return x


def _solve_exact_dense(g, lam, Q, sigma, rng):
    """Global minimiser given H = Q diag(lam) Q^T (lam ascending)."""
    n = g.shape[0]
    gt = Q.T @ g
    gnorm = _scaled_norm(g)
    lam_min = lam[0]
    lo = max(0.0, -lam_min)
    scale = max(1.0, np.max(np.abs(lam)))
    if gnorm == 0.0 and lam_min >= 0.0:
        return np.zeros(n)

    # hard case: g has (numerically) no weight on the leftmost eigenspace
    left = lam <= lam_min + 1e-12 * scale
    g_left = _scaled_norm(gt[left])
    if lo > 0 and g_left <= 1e-12 * max(gnorm, 1e-300) + 1e-300:
        rest = ~left
        denom = lam[rest] + lo
        s_rest = np.zeros(n)
        s_rest[rest] = -gt[rest] / denom
        r_target = lo / sigma
        r_rest = _scaled_norm(s_rest)
        if r_rest <= r_target:
            alpha = np.sqrt(max(r_target ** 2 - r_rest ** 2, 0.0))
            sign = 1.0 if rng is None or rng.random() < 0.5 else -1.0
            coef = s_rest.copy()
            coef[np.flatnonzero(left)[0]] = sign * alpha
            return Q @ coef
    root = _secular_root(gt, lam, sigma, lo)
    return Q @ (-gt / (lam + root))


def _finish(g, H, sigma, theta, s, mode, kdim=0):
    ns = _scaled_norm(s)
    decrease = float(-(g @ s + 0.5 * s @ H @ s))
    chi1, chi2 = model_measures(g, H, sigma, s)
    ok = bool(ns > 0 and chi1 <= theta * ns ** 2 and chi2 <= theta * ns
              and model_value(g, H, sigma, s) < 0.0)
    return ModelSolution(s, decrease, chi1, chi2, mode, ok, kdim)


def solve_exact(g, H, sigma, rng=None):
    g, H = _as_arrays(g, H)
    lam, Q = eigh(H)
    return _solve_exact_dense(g, lam, Q, sigma, rng)


def _krylov(g, H, sigma, theta, rng):
    n = g.shape[0]
    gnorm = _scaled_norm(g)
    Qs = np.zeros((n, n + 1))
    Qs[:, 0] = g / gnorm
    alphas = []
    betas = []
    for j in range(n):
        q = Qs[:, j]
        w = H @ q
        if j > 0:
            w -= betas[-1] * Qs[:, j - 1]
        a = float(q @ w)
        alphas.append(a)
        w -= a * q
        # full reorthogonalisation, twice is enough
        for _ in range(2):
            w -= Qs[:, :j + 1] @ (Qs[:, :j + 1].T @ w)
        lam, Z = eigh_tridiagonal(np.array(alphas), np.array(betas)) if j > 0 else (
            np.array(alphas), np.ones((1, 1)))
        g_red = np.zeros(j + 1)
        g_red[0] = gnorm
        h = _solve_exact_dense(g_red, lam, Z, sigma, rng)
        s = Qs[:, :j + 1] @ h
        best = (s, j + 1)
        ns = _scaled_norm(s)
        # cheap gradient test first; the Hessian test needs an eigensolve
        chi1 = _scaled_norm(g + H @ s + sigma * ns * s)
        if chi1 <= theta * ns ** 2:
            sol = _finish(g, H, sigma, theta, s, "krylov", j + 1)
            if sol.conditions_met:
                return sol
        beta = float(_scaled_norm(w))
        if beta <= BREAKDOWN_TOL:
            break
        betas.append(beta)
        Qs[:, j + 1] = w / beta
    # space saturated without meeting the conditions: report the best we have
    return _finish(g, H, sigma, theta, best[0], "krylov", best[1])


def solve_cubic_model(g, H, sigma, theta=1e-4, mode="krylov", rng=None):
    """Approximate minimiser of the cubic model satisfying
    m(s) < m(0), ||grad m(s)|| <= theta ||s||^2 and
    lambda_min(hess m(s)) >= -theta ||s|| where achievable.

    Returns ``ModelSolution`` with ``step = 0`` when g = 0 and H is positive
    semidefinite (the model is already minimal at the origin).
    """
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if not theta > 0:
        raise ParameterError(f"theta must be positive, got {theta}")
    if mode not in MODES:
        raise ParameterError(f"unknown subsolver mode {mode!r}")
    g, H = _as_arrays(g, H)
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(H)) and np.isfinite(sigma)):
        raise NumericError("non-finite gradient, Hessian or sigma")
    H = 0.5 * (H + H.T)
    n = g.shape[0]
    gnorm = _scaled_norm(g)
    if gnorm == 0.0:
        lam, Q = eigh(H)
        if lam[0] >= 0.0:
            return ModelSolution(np.zeros(n), 0.0, 0.0, 0.0, mode, True, 0)
        # empty Krylov space: only the eigen route can reach negative curvature
        s = _solve_exact_dense(g, lam, Q, sigma, rng)
        return _finish(g, H, sigma, theta, s, "exact")
    if mode == "exact":
        lam, Q = eigh(H)
        s = _solve_exact_dense(g, lam, Q, sigma, rng)
        return _finish(g, H, sigma, theta, s, "exact")
    return _krylov(g, H, sigma, theta, rng)
