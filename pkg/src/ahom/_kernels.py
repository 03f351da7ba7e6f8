"""Hot numeric kernels.

Each kernel has a numba implementation and a pure-numpy one with identical
semantics. The numba path is used when numba imports cleanly and the
environment variable ``AHOM_DISABLE_NUMBA`` is unset (or ``0``/``false``).
Both variants stay importable under explicit names so tests and the
benchmark can compare them directly.
"""

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


def _numba_requested():
    flag = os.environ.get("AHOM_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


HAVE_NUMBA = njit is not None
USE_NUMBA = HAVE_NUMBA and _numba_requested()


# ---------------------------------------------------------------------------
# numpy reference versions
# ---------------------------------------------------------------------------

def rank_one_cube_sum_numpy(Y, c):
    """Return sum_p c[p] * y_p (x) y_p (x) y_p for the rows y_p of ``Y``."""
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    r = Y.shape[1]
    if Y.shape[0] == 0 or r == 0:
        return np.zeros((r, r, r))
    # (r, m) @ (m, r*r): one BLAS call instead of an m-length python loop
    outer = (Y[:, :, None] * Y[:, None, :]).reshape(Y.shape[0], r * r)
    return ((Y * c[:, None]).T @ outer).reshape(r, r, r)


def trailing_cube_norms_sq_numpy(W):
    """out[i] = sum of W[a,b,c]**2 over a, b, c >= i."""
    n = W.shape[0]
    sq = np.square(W)
    out = np.zeros(n)
    acc = 0.0
    for i in range(n - 1, -1, -1):
        # entries whose smallest index is exactly i
        acc += sq[i, i:, i:].sum() + sq[i + 1:, i, i:].sum() + sq[i + 1:, i + 1:, i].sum()
        out[i] = acc
    return out


def trailing_gram_cube_norms_sq_numpy(Y, c):
    """out[i] = c^T ((Y_i Y_i^T) ** 3) c with Y_i = Y[:, i:] (elementwise cube).

    This is the squared Frobenius norm of sum_p c_p y_p^(x3) restricted to
    the trailing coordinates i..n-1, computed through the m x m Gram matrix.
    """
    Y = np.asarray(Y, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m, n = Y.shape
    out = np.zeros(n)
    if m == 0 or n == 0:
        return out
    G = Y @ Y.T
    for i in range(n):
        out[i] = c @ (G * G * G) @ c
        y = Y[:, i]
        G -= np.outer(y, y)
    return out


def gram_cube_norm_sq_numpy(Y, c):
    """c^T ((Y Y^T) ** 3) c, the squared norm over the full column span."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape[0] == 0:
        return 0.0
    G = Y @ Y.T
    return float(c @ (G * G * G) @ c)


# ---------------------------------------------------------------------------
# numba versions
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def rank_one_cube_sum_numba(Y, c):
        m, r = Y.shape
        T = np.zeros((r, r, r))
        Yt = np.ascontiguousarray(Y.T)
        # T[a, b, k] = sum_p c_p y_pa y_pb y_pk, one GEMV per (a, b) with b >= a
        for a in range(r):
            ca = c * Yt[a]
            for b in range(a, r):
                T[a, b, b:] = np.dot(Yt[b:], ca * Yt[b])
        # mirror the a <= b <= k sector to the other five orderings
        for a in range(r):
            for b in range(a, r):
                for k in range(b, r):
                    v = T[a, b, k]
                    T[a, k, b] = v
                    T[b, a, k] = v
                    T[b, k, a] = v
                    T[k, a, b] = v
                    T[k, b, a] = v
        return T

    @njit(cache=True)
    def trailing_cube_norms_sq_numba(W):
        n = W.shape[0]
        out = np.zeros(n)
        acc = 0.0
        for i in range(n - 1, -1, -1):
            s = 0.0
            for b in range(i, n):
                for k in range(i, n):
                    s += W[i, b, k] * W[i, b, k]
            for a in range(i + 1, n):
                for k in range(i, n):
                    s += W[a, i, k] * W[a, i, k]
            for a in range(i + 1, n):
                for b in range(i + 1, n):
                    s += W[a, b, i] * W[a, b, i]
            acc += s
            out[i] = acc
        return out

    @njit(cache=True)
    def _gram(Y):
        return np.dot(Y, np.ascontiguousarray(Y.T))

    @njit(cache=True)
    def _cube_form(G, c):
        m = G.shape[0]
        s = 0.0
        for p in range(m):
            cp = c[p]
            if cp == 0.0:
                continue
            g = G[p, p]
            s += cp * cp * g * g * g
            acc = 0.0
            for q in range(p + 1, m):
                g = G[p, q]
                acc += c[q] * g * g * g
            s += 2.0 * cp * acc
        return s

    @njit(cache=True)
    def trailing_gram_cube_norms_sq_numba(Y, c):
        m, n = Y.shape
        out = np.zeros(n)
        if m == 0 or n == 0:
            return out
        G = _gram(Y)
        for i in range(n):
            out[i] = _cube_form(G, c)
            for p in range(m):
                yp = Y[p, i]
                if yp == 0.0:
                    continue
                for q in range(m):
                    G[p, q] -= yp * Y[q, i]
        return out

    @njit(cache=True)
    def gram_cube_norm_sq_numba(Y, c):
        if Y.shape[0] == 0:
            return 0.0
        return _cube_form(_gram(Y), c)

else:  # pragma: no cover
    rank_one_cube_sum_numba = rank_one_cube_sum_numpy
    trailing_cube_norms_sq_numba = trailing_cube_norms_sq_numpy
    trailing_gram_cube_norms_sq_numba = trailing_gram_cube_norms_sq_numpy
    gram_cube_norm_sq_numba = gram_cube_norm_sq_numpy


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


if USE_NUMBA:
    def rank_one_cube_sum(Y, c):
        return rank_one_cube_sum_numba(_f64(Y), _f64(c))

    def trailing_cube_norms_sq(W):
        return trailing_cube_norms_sq_numba(_f64(W))

    def trailing_gram_cube_norms_sq(Y, c):
        return trailing_gram_cube_norms_sq_numba(_f64(Y), _f64(c))

    def gram_cube_norm_sq(Y, c):
        return float(gram_cube_norm_sq_numba(_f64(Y), _f64(c)))
else:
    rank_one_cube_sum = rank_one_cube_sum_numpy
    trailing_cube_norms_sq = trailing_cube_norms_sq_numpy
    trailing_gram_cube_norms_sq = trailing_gram_cube_norms_sq_numpy
    gram_cube_norm_sq = gram_cube_norm_sq_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
