"""Critical measures, competitive-subspace search and randomised
tensor-norm directions."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericError, ParameterError
from .tensor3 import SubspaceBasis, contract_to_basis, frobenius_norm, trailing_norms

ATN_BATCH = 32


@dataclass
class CompetitiveSubspace:
    basis: SubspaceBasis
    chi3: float
    tau: float
    index: int                # 0-based start of the accepted eigenvector block; n if empty
    eigenvalues: np.ndarray   # Hessian eigenvalues, descending

    @property
    def empty(self):
        return self.basis.rank == 0


@dataclass
class CriticalMeasures:
    chi1: float
    chi2: float
    chi3: float
    subspace: CompetitiveSubspace
    lambda_min: float

    def satisfied(self, eps1, eps2, eps3):
        return self.chi1 <= eps1 and self.chi2 <= eps2 and self.chi3 <= eps3


@dataclass
class AtnResult:
    u: np.ndarray
    cubic_value: float    # T(u, u, u) after the sign correction
    draws: int
    accepted: bool        # False when max_draws ran out below the threshold


def _descending_eig(H):
    H = np.asarray(H, dtype=np.float64)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionError(f"Hessian must be square, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise NumericError("non-finite Hessian")
    lam, V = np.linalg.eigh(0.5 * (H + H.T))
    return lam[::-1], V[:, ::-1]


def _scan(lam, V, full_norm, profile, beta, kappa):
    """First i with chi3(i)^2 / (12 kappa beta^2) >= lam[i], where chi3(i) is
    the projected norm over span(V[:, i:]). ``profile`` is only evaluated when
    the full space does not qualify."""
    n = lam.shape[0]
    denom = 12.0 * kappa * beta ** 2
    chi = full_norm()
    if chi * chi / denom >= lam[0]:
        return CompetitiveSubspace(SubspaceBasis(V, check=False), chi, float(lam[0]), 0, lam)
    norms = profile()
    for i in range(1, n):
        chi = float(norms[i])
        if chi * chi / denom >= lam[i]:
            return CompetitiveSubspace(SubspaceBasis(V[:, i:], check=False), chi,
                                       float(lam[i]), i, lam)
    return CompetitiveSubspace(SubspaceBasis.empty(n), 0.0, 0.0, n, lam)


def _check_accs_params(beta, kappa):
    if not (beta > 0 and kappa > 0 and np.isfinite(beta) and np.isfinite(kappa)):
        raise ParameterError(f"beta and kappa must be positive and finite (got {beta}, {kappa})")


def accs(H, T, beta, kappa):
    """Largest Hessian eigen-subspace whose eigenvalue threshold is covered by
    the projected third-derivative norm."""
    _check_accs_params(beta, kappa)
    lam, V = _descending_eig(H)
    if T.dim != lam.shape[0]:
        raise DimensionError(f"Hessian dim {lam.shape[0]} != tensor dim {T.dim}")
    if not np.all(np.isfinite(T.data)):
        raise NumericError("non-finite third-derivative tensor")
    full = SubspaceBasis(V, check=False)
    return _scan(lam, V, lambda: frobenius_norm(T), lambda: trailing_norms(T, full),
                 beta, kappa)


def accs_oracle(oracle, x, beta, kappa, H=None):
    """``accs`` driven through the oracle's structured third-derivative hooks."""
    _check_accs_params(beta, kappa)
    if H is None:
        H = oracle.hessian(x)
    lam, V = _descending_eig(H)
    full = SubspaceBasis(V, check=False)
    if hasattr(oracle, "third_full_norm"):
        full_norm = lambda: oracle.third_full_norm(x)  # noqa: E731
    else:
        full_norm = lambda: frobenius_norm(oracle.third(x))  # noqa: E731
    return _scan(lam, V, full_norm, lambda: oracle.third_trailing_norms(x, full), beta, kappa)


def atn(T, basis, beta, rng, max_draws=1000, proj_norm=None, cubic=None):
    """Rejection-sample a unit u in span(basis) with T(u,u,u) >= ||Proj T||_F / beta.

    ``cubic`` optionally maps an n x k matrix of directions to their cubic
    forms, replacing the dense tensor route (``T`` may then be None). When
    ``max_draws`` is exhausted the best draw is returned with
    ``accepted=False``.
    """
    if basis.rank == 0:
        raise ParameterError("ATN needs a nonempty subspace")
    if not beta > 0:
        raise ParameterError("beta must be positive")
    V = basis.columns
    if cubic is None:
        R = contract_to_basis(T, basis).data
        if proj_norm is None:
            proj_norm = float(np.sqrt(np.sum(R * R)))

        def cubic_coords(C):
            return np.einsum("abc,ap,bp,cp->p", R, C, C, C)
    else:
        if proj_norm is None:
            proj_norm = frobenius_norm(contract_to_basis(T, basis))

        def cubic_coords(C):
            return np.asarray(cubic(V @ C), dtype=np.float64)

    threshold = proj_norm / beta
    r = basis.rank
    best_val, best_u = -1.0, None
    drawn = 0
    while drawn < max_draws:
        k = min(ATN_BATCH, max_draws - drawn)
        C = rng.standard_normal((r, k))
        C /= np.linalg.norm(C, axis=0)
        vals = cubic_coords(C)
        hits = np.flatnonzero(np.abs(vals) >= threshold)
        if hits.size:
            j = hits[0]
            u = V @ C[:, j]
            val = float(vals[j])
            return AtnResult(u if val > 0 else -u, abs(val), drawn + j + 1, True)
        j = int(np.argmax(np.abs(vals)))
        if abs(vals[j]) > best_val:
            best_val = float(abs(vals[j]))
            u = V @ C[:, j]
            best_u = u if vals[j] > 0 else -u
        drawn += k
    return AtnResult(best_u, best_val, drawn, False)


def critical_measures(oracle, x, beta, kappa):
    """chi1 = ||grad f||, chi2 = max(0, -lambda_min(hess f)), chi3 and the
    competitive subspace from the ACCS scan."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite point")
    H = oracle.hessian(x)
    cs = accs_oracle(oracle, x, beta, kappa, H=H)
    lam_min = float(cs.eigenvalues[-1])
    chi1 = float(np.linalg.norm(oracle.gradient(x)))
    return CriticalMeasures(chi1, max(0.0, -lam_min), cs.chi3, cs, lam_min)
