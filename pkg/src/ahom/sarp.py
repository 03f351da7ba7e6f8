"""One iteration of the adaptive cubic-regularisation method: model step,
acceptance ratio and regularisation update."""

from dataclasses import dataclass

import numpy as np

from .cubic_subsolver import solve_cubic_model
from .errors import ParameterError

DEGENERATE_DECREASE = 1e-15


@dataclass(frozen=True)
class SarpConfig:
    theta: float = 1e-4
    eta1: float = 0.1
    eta2: float = 0.9
    gamma1: float = 0.5
    gamma2: float = 1.1
    gamma3: float = 2.0
    sigma_min: float = 1e-16
    sigma0: float = 2.0

    def __post_init__(self):
        problems = []
        if not self.theta > 0:
            problems.append("theta > 0")
        if not 0 < self.sigma_min <= self.sigma0:
            problems.append("0 < sigma_min <= sigma0")
        if not 0 < self.eta1 <= self.eta2 < 1:
            problems.append("0 < eta1 <= eta2 < 1")
        if not 0 < self.gamma1 < 1 < self.gamma2 < self.gamma3:
            problems.append("0 < gamma1 < 1 < gamma2 < gamma3")
        if problems:
            raise ParameterError("invalid SARp constants, need " + "; ".join(problems))


@dataclass
class SarpOutcome:
    z: np.ndarray
    sigma_next: float
    rho: float
    successful: bool
    step_norm: float
    model_decrease: float
    f_x: float
    f_z: float
    conditions_met: bool = True


def update_sigma(sigma, rho, cfg):
    if rho >= cfg.eta2:
        return max(cfg.sigma_min, cfg.gamma1 * sigma)
    if rho >= cfg.eta1:
        return sigma
    return cfg.gamma3 * sigma


def sarp_step(oracle, x, sigma, cfg, mode="krylov", rng=None, f_x=None):
    """Compute z_k and sigma_{k+1} from x_k and sigma_k.

    ``f_x`` may be passed to reuse a known objective value at ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    if sigma < cfg.sigma_min:
        raise ParameterError(f"sigma {sigma} below sigma_min {cfg.sigma_min}")
    if f_x is None:
        f_x = oracle.value(x)
    # unbounded objectives eventually overflow; non-finite results are
    # rejected below rather than raised
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_cubic_model(oracle.gradient(x), oracle.hessian(x), sigma, cfg.theta, mode, rng)
        s = sol.step
        step_norm = float(np.linalg.norm(s))
        trial = x + s
        f_trial = oracle.value(trial)
    if not np.isfinite(sol.model_decrease) or not np.all(np.isfinite(trial)):
        return SarpOutcome(x, cfg.gamma3 * sigma, -np.inf, False, step_norm,
                           sol.model_decrease, f_x, f_x, sol.conditions_met)
    if sol.model_decrease <= DEGENERATE_DECREASE:
        return SarpOutcome(x, cfg.gamma3 * sigma, 0.0, False, step_norm,
                           sol.model_decrease, f_x, f_x, sol.conditions_met)
    if np.isfinite(f_trial):
        rho = (f_x - f_trial) / sol.model_decrease
    else:
        rho = -np.inf
    ok = rho >= cfg.eta1
    z, f_z = (trial, f_trial) if ok else (x, f_x)
    return SarpOutcome(z, update_sigma(sigma, rho, cfg), float(rho), bool(ok), step_norm,
                       sol.model_decrease, f_x, f_z, sol.conditions_met)
