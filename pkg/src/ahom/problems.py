"""Objective oracles: the two-dimensional saddle examples, a convex quadratic,
the squared-sigmoid logistic loss, and a finite-difference reference oracle."""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import _kernels
from .errors import DimensionError, ParameterError
from .tensor3 import SymTensor3, contract_to_basis, rank_one_cube_sum, trailing_norms

SIGMOID_CLAMP = 500.0


@dataclass(frozen=True)
class ProblemMeta:
    name: str
    dim: int
    default_init: np.ndarray
    known_L3: float | None = None
    known_L: float | None = None
    lower_bound: float | None = None

    def __post_init__(self):
        if self.known_L3 is not None and not (np.isfinite(self.known_L3) and self.known_L3 >= 0):
            raise ParameterError("known_L3 must be finite and nonnegative")
        if self.known_L is not None and not np.isfinite(self.known_L):
            raise ParameterError("known_L must be finite")
        if self.lower_bound is not None and not np.isfinite(self.lower_bound):
            raise ParameterError("lower_bound must be finite")


class ObjectiveOracle:
    """Value and derivatives up to third order at a point.

    Subclasses implement ``value``, ``gradient``, ``hessian`` and ``third``.
    The remaining methods have dense defaults that structured problems may
    override to avoid materialising the ambient third-derivative tensor.
    """

    meta: ProblemMeta

    @property
    def dim(self):
        return self.meta.dim

    def _x(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise DimensionError(f"point has shape {x.shape}, problem dim is {self.dim}")
        return x

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def hessian(self, x):
        raise NotImplementedError

    def third(self, x):
        raise NotImplementedError

    def third_in_basis(self, x, V):
        return contract_to_basis(self.third(x), V)

    def third_trailing_norms(self, x, V):
        """Frobenius norms of the third derivative restricted to span(V[:, i:])."""
        return trailing_norms(self.third(x), V)

    def third_cubic_forms(self, x, U):
        """T(u, u, u) for every column u of ``U``."""
        T = self.third(x).data
        U = np.asarray(U, dtype=np.float64)
        return np.einsum("ijk,ip,jp,kp->p", T, U, U, U)


class Monkey(ObjectiveOracle):
    """f(x) = x0^3 - 3 x0 x1^2."""

    def __init__(self):
        self.meta = ProblemMeta("monkey", 2, np.array([1.0, 0.0]), known_L3=0.0)
        T = np.zeros((2, 2, 2))
        T[0, 0, 0] = 6.0
        T[0, 1, 1] = T[1, 0, 1] = T[1, 1, 0] = -6.0
        self._T = SymTensor3(T, check=False)

    def value(self, x):
        x0, x1 = self._x(x)
        return x0 ** 3 - 3.0 * x0 * x1 ** 2

    def gradient(self, x):
        x0, x1 = self._x(x)
        return np.array([3.0 * x0 ** 2 - 3.0 * x1 ** 2, -6.0 * x0 * x1])

    def hessian(self, x):
        x0, x1 = self._x(x)
        return np.array([[6.0 * x0, -6.0 * x1], [-6.0 * x1, -6.0 * x0]])

    def third(self, x):
        self._x(x)
        return self._T


class Coercive(ObjectiveOracle):
    """f(x) = x0^3/3 + x1^4/4 - x1^2/2."""

    def __init__(self):
        self.meta = ProblemMeta("coercive", 2, np.array([3.0, 3.0]), known_L3=6.0)

    def value(self, x):
        x0, x1 = self._x(x)
        return x0 ** 3 / 3.0 + x1 ** 4 / 4.0 - x1 ** 2 / 2.0

    def gradient(self, x):
        x0, x1 = self._x(x)
        return np.array([x0 ** 2, x1 ** 3 - x1])

    def hessian(self, x):
        x0, x1 = self._x(x)
        return np.array([[2.0 * x0, 0.0], [0.0, 3.0 * x1 ** 2 - 1.0]])

    def third(self, x):
        _, x1 = self._x(x)
        T = np.zeros((2, 2, 2))
        T[0, 0, 0] = 2.0
        T[1, 1, 1] = 6.0 * x1
        return SymTensor3(T, check=False)


class Quadratic(ObjectiveOracle):
    """f(x) = ||x||^2 / 2."""

    def __init__(self, n=2):
        if n < 1:
            raise ParameterError("dimension must be >= 1")
        self.meta = ProblemMeta("quadratic", n, np.ones(n), known_L3=0.0, known_L=1.0, lower_bound=0.0)

    def value(self, x):
        x = self._x(x)
        return 0.5 * float(x @ x)

    def gradient(self, x):
        return self._x(x).copy()

    def hessian(self, x):
        self._x(x)
        return np.eye(self.dim)

    def third(self, x):
        self._x(x)
        return SymTensor3.zeros(self.dim)


def logistic_link_derivatives(z, y):
    """Derivatives of 0.5 * (sigmoid(z) - y)^2 with respect to z, orders 0..3.

    Vectorised over ``z`` and ``y``.
    """
    z = np.clip(np.asarray(z, dtype=np.float64), -SIGMOID_CLAMP, SIGMOID_CLAMP)
    s = expit(z)
    sc = expit(-z)  # 1 - s without cancellation
    d1 = s * sc
    t = sc - s      # 1 - 2s
    d2 = d1 * t
    d3 = d2 * t - 2.0 * d1 * d1
    r = s - y
    g0 = 0.5 * r * r
    g1 = r * d1
    g2 = d1 * d1 + r * d2
    g3 = 3.0 * d1 * d2 + r * d3
    return g0, g1, g2, g3


@dataclass
class LogisticProblem:
    data_matrix: np.ndarray
    labels: np.ndarray
    alpha: float = 1e-5
    name: str = field(default="logistic")

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.data_matrix, dtype=np.float64))
        y = np.asarray(self.labels, dtype=np.float64).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise ParameterError(f"{X.shape[0]} rows but {y.shape[0]} labels")
        if not np.all((y == 0) | (y == 1)):
            raise ParameterError("labels must be 0 or 1")
        if not self.alpha >= 0:
            raise ParameterError("alpha must be nonnegative")
        self.data_matrix = X
        self.labels = y


# Above this sample count the m x m cubed Gram matrix is not cached.
_GRAM_CACHE_LIMIT = 4000


class Logistic(ObjectiveOracle):
    """sum_i 0.5 * (sigmoid(w.x_i) - y_i)^2 + alpha/2 ||w||^2."""

    def __init__(self, problem):
        self.problem = problem
        self.X = problem.data_matrix
        self.y = problem.labels
        self.alpha = float(problem.alpha)
        d = self.X.shape[1]
        self.meta = ProblemMeta(problem.name, d, np.zeros(d), lower_bound=0.0)
        self._gram3 = None
        self._last = (None, None)

    def _link(self, w):
        # single-entry memo: the escape step queries the same point many times
        key = w.tobytes()
        last_key, last_val = self._last
        if key == last_key:
            return last_val
        val = logistic_link_derivatives(self.X @ w, self.y)
        self._last = (key, val)
        return val

    def value(self, x):
        w = self._x(x)
        g0 = self._link(w)[0]
        return float(g0.sum() + 0.5 * self.alpha * (w @ w))

    def gradient(self, x):
        w = self._x(x)
        g1 = self._link(w)[1]
        return self.X.T @ g1 + self.alpha * w

    def hessian(self, x):
        w = self._x(x)
        g2 = self._link(w)[2]
        H = self.X.T @ (g2[:, None] * self.X)
        H = 0.5 * (H + H.T)
        H[np.diag_indices_from(H)] += self.alpha
        return H

    def third(self, x):
        w = self._x(x)
        return rank_one_cube_sum(self.X, self._link(w)[3])

    def third_in_basis(self, x, V):
        w = self._x(x)
        if V.ambient_dim != self.dim:
            raise DimensionError("basis dimension mismatch")
        return rank_one_cube_sum(self.X @ V.columns, self._link(w)[3])

    def third_full_norm(self, x):
        """Frobenius norm of the whole third-derivative tensor."""
        c = self._link(self._x(x))[3]
        if self.X.shape[0] <= _GRAM_CACHE_LIMIT:
            if self._gram3 is None:
                G = self.X @ self.X.T
                self._gram3 = G * G * G
            sq = float(c @ self._gram3 @ c)
        else:
            sq = _kernels.gram_cube_norm_sq(self.X, c)
        return float(np.sqrt(max(sq, 0.0)))

    def third_trailing_norms(self, x, V):
        c = self._link(self._x(x))[3]
        sq = _kernels.trailing_gram_cube_norms_sq(self.X @ V.columns, c)
        return np.sqrt(np.maximum(sq, 0.0))

    def third_cubic_forms(self, x, U):
        c = self._link(self._x(x))[3]
        Z = self.X @ np.asarray(U, dtype=np.float64)
        return c @ (Z * Z * Z)


class FiniteDifferenceOracle(ObjectiveOracle):
    """Central differences of the base oracle's value, gradient and Hessian.

    The step is ``h * max(1, ||x||)``.
    """

    def __init__(self, base, h=1e-5):
        if not h > 0:
            raise ParameterError("finite-difference step must be positive")
        self.base = base
        self.h = h
        self.meta = base.meta

    def _step(self, x):
        return self.h * max(1.0, float(np.linalg.norm(x)))

    def value(self, x):
        return self.base.value(x)

    def gradient(self, x):
        x = self._x(x)
        h = self._step(x)
        g = np.empty(self.dim)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h
            g[i] = (self.base.value(x + e) - self.base.value(x - e)) / (2 * h)
        return g

    def hessian(self, x):
        x = self._x(x)
        h = self._step(x)
        H = np.empty((self.dim, self.dim))
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h
            H[i] = (self.base.gradient(x + e) - self.base.gradient(x - e)) / (2 * h)
        return 0.5 * (H + H.T)

    def third(self, x):
        x = self._x(x)
        h = self._step(x)
        T = np.empty((self.dim,) * 3)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h
            T[i] = (self.base.hessian(x + e) - self.base.hessian(x - e)) / (2 * h)
        return SymTensor3.symmetrize(T)


def make_monkey():
    return Monkey()


def make_coercive():
    return Coercive()


def make_quadratic(n=2):
    return Quadratic(n)


def make_logistic(problem):
    return Logistic(problem)


def finite_difference_oracle(base, h=1e-5):
    return FiniteDifferenceOracle(base, h)


def taylor_gap(oracle, x, s):
    """|f(x+s) - third-order Taylor expansion of f at x evaluated at s|."""
    x = np.asarray(x, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if x.shape != s.shape:
        raise DimensionError("x and s must have the same shape")
    g = oracle.gradient(x)
    H = oracle.hessian(x)
    t3 = oracle.third_cubic_forms(x, s[:, None])[0]
    model = oracle.value(x) + g @ s + 0.5 * s @ H @ s + t3 / 6.0
    return abs(oracle.value(x + s) - model)
