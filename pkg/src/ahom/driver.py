"""The adaptive high-order method: a cubic-regularised step followed, when
the third-order measure dominates, by a randomised third-order escape step
whose length is governed by the adaptive estimator kappa."""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ParameterError
from .sarp import SarpConfig, sarp_step
from .third_order import atn, critical_measures

STEP_KINDS = ("sarp_success", "sarp_fail", "escape_success", "escape_fail", "escape_skipped")


@dataclass(frozen=True)
class AhomConfig:
    xi1: float = 1e-9
    zeta: float = 1.1
    beta: float = 20.0
    kappa0: float = 1e-6
    eps1: float = 1e-6
    eps2: float = 1e-6
    eps3: float = 1e-6
    max_iters: int = 5000
    max_time_s: float = math.inf
    sarp: SarpConfig = field(default_factory=SarpConfig)
    subsolver_mode: str = "krylov"
    seed: int = 0
    atn_max_draws: int = 1000

    def __post_init__(self):
        problems = []
        if not 0 < self.xi1 < 1:
            problems.append("0 < xi1 < 1")
        if not self.zeta > 1:
            problems.append("zeta > 1")
        if not self.beta > 0:
            problems.append("beta > 0")
        if not self.kappa0 > 0:
            problems.append("kappa0 > 0")
        if not min(self.eps1, self.eps2, self.eps3) > 0:
            problems.append("eps1, eps2, eps3 > 0")
        if self.max_iters < 0:
            problems.append("max_iters >= 0")
        if self.subsolver_mode not in ("exact", "krylov"):
            problems.append("subsolver_mode in {exact, krylov}")
        if self.atn_max_draws < 1:
            problems.append("atn_max_draws >= 1")
        if problems:
            raise ParameterError("invalid AHOM configuration, need " + "; ".join(problems))


@dataclass
class IterationRecord:
    iter: int
    f: float
    chi1: float
    chi2: float
    chi3: float
    sigma: float
    kappa: float
    rho: float
    phi: float | None
    delta: float | None
    step_kind: str
    step_norm: float
    wall_time_s: float


@dataclass
class EscapeOutcome:
    x_next: np.ndarray
    kappa_next: float
    phi: float
    delta: float
    kind: str
    f_next: float
    u: np.ndarray
    atn_draws: int
    atn_accepted: bool


@dataclass
class RunResult:
    x: np.ndarray
    trace: list
    status: str
    kappa: float
    sigma: float


def escape_trigger(chi1, chi3, kappa, beta):
    """True when chi3 >= beta * (24 chi1 kappa^2)^(1/3) and chi3 > 0."""
    return chi3 > 0 and chi3 >= beta * (24.0 * chi1 * kappa * kappa) ** (1.0 / 3.0)


def escape_attempt(oracle, z, cs, kappa, cfg, rng, f_z=None):
    """Move along -u, u from ATN, by chi3 / (beta kappa) if the relative
    decrease against chi3^4 / (24 beta^4 kappa^3) reaches xi1; otherwise
    stay put and inflate kappa by zeta."""
    if cs.basis.rank == 0:
        raise ParameterError("escape step needs a nonempty competitive subspace")
    if f_z is None:
        f_z = oracle.value(z)
    chi3, beta = cs.chi3, cfg.beta
    res = atn(None, cs.basis, beta, rng, cfg.atn_max_draws, proj_norm=chi3,
              cubic=lambda U: oracle.third_cubic_forms(z, U))
    eps = chi3 / (beta * kappa)
    delta = chi3 ** 4 / (24.0 * beta ** 4 * kappa ** 3)
    trial = z - eps * res.u
    f_trial = oracle.value(trial)
    if np.isfinite(f_trial) and delta > 0:
        phi = (f_z - f_trial) / delta
    else:
        phi = -math.inf
    if phi >= cfg.xi1:
        return EscapeOutcome(trial, kappa, phi, delta, "escape_success", f_trial,
                             res.u, res.draws, res.accepted)
    return EscapeOutcome(np.asarray(z, dtype=np.float64), cfg.zeta * kappa, phi, delta,
                         "escape_fail", f_z, res.u, res.draws, res.accepted)


def ahom_run(oracle, x0, cfg=None, callback=None):
    """Run the method from ``x0``; returns a RunResult with status
    ``converged``, ``budget_exhausted`` or ``numeric_failure``."""
    cfg = cfg or AhomConfig()
    x = np.array(x0, dtype=np.float64)
    if x.shape != (oracle.dim,) or not np.all(np.isfinite(x)):
        raise ParameterError("initial point must be a finite vector of the problem dimension")
    rng = np.random.default_rng(cfg.seed)
    sigma, kappa = cfg.sarp.sigma0, cfg.kappa0
    f_x = oracle.value(x)
    trace = []
    start = time.monotonic()
    status = "budget_exhausted"
    for k in range(cfg.max_iters):
        if time.monotonic() - start > cfg.max_time_s:
            break
        try:
            out = sarp_step(oracle, x, sigma, cfg.sarp, cfg.subsolver_mode, rng, f_x)
            z, f_z = out.z, out.f_z
            cm = critical_measures(oracle, z, cfg.beta, kappa)
        except NumericError:
            status = "numeric_failure"
            break
        phi = delta = None
        kappa_next = kappa
        if cm.satisfied(cfg.eps1, cfg.eps2, cfg.eps3):
            x_next, f_next = z, f_z
            kind = "sarp_success" if out.successful else "sarp_fail"
            status = "converged"
        elif not cm.subspace.empty and escape_trigger(cm.chi1, cm.chi3, kappa, cfg.beta):
            esc = escape_attempt(oracle, z, cm.subspace, kappa, cfg, rng, f_z)
            x_next, f_next, kappa_next = esc.x_next, esc.f_next, esc.kappa_next
            phi, delta, kind = esc.phi, esc.delta, esc.kind
        else:
            x_next, f_next, kind = z, f_z, "escape_skipped"
        rec = IterationRecord(k, float(f_next), cm.chi1, cm.chi2, cm.chi3, sigma, kappa,
                              out.rho, phi, delta, kind,
                              float(np.linalg.norm(x_next - x)), time.monotonic() - start)
        trace.append(rec)
        if callback is not None:
            callback(rec)
        x, f_x = x_next, f_next
        sigma, kappa = out.sigma_next, kappa_next
        if status == "converged":
            break
    return RunResult(x, trace, status, kappa, sigma)


@dataclass
class TheoreticalBounds:
    sigma_max: float | None
    kappa_max: float | None
    u_third1_cap: int | None
    omega: float | None = None
    total_iter_cap: float | None = None


def theoretical_bounds(cfg, meta, f0=None, p=2):
    """Diagnostic constants: the sigma cap, the kappa cap, the cap on failed
    escapes and the total iteration bound. Missing problem constants leave
    the dependent entries as None."""
    sc = cfg.sarp
    L, L3 = meta.known_L, meta.known_L3
    sigma_max = None
    if L is not None:
        sigma_max = max(sc.sigma0, sc.gamma3 * L * (p + 1) / (p * (1.0 - sc.eta2)))
    kappa_max = cap = None
    if L3 is not None:
        kappa_max = max(cfg.kappa0, cfg.zeta * L3 / (2.0 - cfg.xi1))
        cap = int(math.ceil(math.log(kappa_max / cfg.kappa0) / math.log(cfg.zeta) - 1e-12))
        cap = max(cap, 0)
    omega = total = None
    if sigma_max is not None and kappa_max is not None:
        a = (p + 1) / (cfg.sarp.eta1 * sc.sigma_min)
        base = L + sc.theta + sigma_max
        omega = max(
            a * base ** ((p + 1) / p),
            a * ((p - 1) * L + sc.theta + p * sigma_max) ** ((p + 1) / (p - 1)),
            a * (24.0 * cfg.beta ** 3 * kappa_max ** 2 * base) ** ((p + 1) / p),
            cfg.beta * kappa_max ** 3 / cfg.xi1,
        )
        if f0 is not None and meta.lower_bound is not None:
            e = max(cfg.eps1 ** (-(p + 1) / p), cfg.eps2 ** (-(p + 1) / (p - 1)),
                    cfg.eps3 ** -4, cfg.eps3 ** (-3 * (p + 1) / p))
            inner = 2.0 * omega * (f0 - meta.lower_bound) * e \
                + math.log(kappa_max / cfg.kappa0) / math.log(cfg.zeta)
            total = inner * (1.0 + abs(math.log(sc.gamma1)) / math.log(sc.gamma2)) \
                + math.log(sigma_max / sc.sigma0) / math.log(sc.gamma2)
            total = float(math.ceil(total)) if math.isfinite(total) else math.inf
    return TheoreticalBounds(sigma_max, kappa_max, cap, omega, total)
