"""Dense symmetric order-3 tensors and orthonormal subspace bases."""

import numpy as np

from . import _kernels
from .errors import DimensionError

SYMMETRY_TOL = 1e-10
ORTHONORMAL_TOL = 1e-10

_PERMS = ((0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))


class SymTensor3:
    """Dense n x n x n symmetric tensor.

    The backing array is read-only after construction. Pass ``check=False``
    to skip the symmetry check for arrays symmetric by construction.
    """

    __slots__ = ("data",)

    def __init__(self, data, check=True):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim != 3 or not (arr.shape[0] == arr.shape[1] == arr.shape[2]):
            raise DimensionError(f"expected an n x n x n array, got shape {arr.shape}")
        if check and arr.size:
            scale = max(1.0, float(np.max(np.abs(arr))))
            for perm in _PERMS:
                if np.max(np.abs(arr - arr.transpose(perm))) > SYMMETRY_TOL * scale:
                    raise ValueError("tensor entries are not symmetric under index permutation")
        arr.flags.writeable = False
        self.data = arr

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros((n, n, n)), check=False)

    @classmethod
    def symmetrize(cls, data):
        a = np.asarray(data, dtype=np.float64)
        # summing the six images in sorted order makes the result bitwise symmetric
        stack = np.sort(np.stack([a] + [a.transpose(p) for p in _PERMS]), axis=0)
        return cls(stack.sum(axis=0) / 6.0, check=False)

    @property
    def dim(self):
        return self.data.shape[0]

    def __getitem__(self, idx):
        return self.data[idx]

    def __repr__(self):
        return f"SymTensor3(dim={self.dim})"


class SubspaceBasis:
    """Orthonormal basis (n x r) of a subspace; r = 0 is the empty subspace."""

    __slots__ = ("columns",)

    def __init__(self, columns, check=True):
        V = np.array(columns, dtype=np.float64)
        if V.ndim != 2:
            raise DimensionError(f"basis must be an n x r matrix, got shape {V.shape}")
        if check and V.shape[1]:
            gram = V.T @ V
            if np.max(np.abs(gram - np.eye(V.shape[1]))) > ORTHONORMAL_TOL:
                raise ValueError("basis columns are not orthonormal")
        V.flags.writeable = False
        self.columns = V

    @classmethod
    def empty(cls, n):
        return cls(np.zeros((n, 0)), check=False)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n), check=False)

    @property
    def ambient_dim(self):
        return self.columns.shape[0]

    @property
    def rank(self):
        return self.columns.shape[1]

    def projector(self):
        return self.columns @ self.columns.T

    def __repr__(self):
        return f"SubspaceBasis(ambient_dim={self.ambient_dim}, rank={self.rank})"


def _check_vec(T, v, name="u"):
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (T.dim,):
        raise DimensionError(f"{name} has shape {v.shape}, tensor dim is {T.dim}")
    return v


def cubic_form(T, u):
    """T(u, u, u) = sum_ijk T_ijk u_i u_j u_k."""
    u = _check_vec(T, u)
    return float(u @ (T.data @ u) @ u)


def contract_once(T, v):
    """Fill one slot: M_jk = sum_i T_ijk v_i."""
    v = _check_vec(T, v, "v")
    M = np.tensordot(v, T.data, axes=(0, 0))
    return 0.5 * (M + M.T)


def contract_to_basis(T, V):
    """T(V, V, V) as a rank x rank x rank tensor, by three mode contractions."""
    if V.ambient_dim != T.dim:
        raise DimensionError(f"basis ambient dim {V.ambient_dim} != tensor dim {T.dim}")
    B = V.columns
    A = np.tensordot(T.data, B, axes=(2, 0))              # n n r
    A = np.tensordot(A, B, axes=(1, 0))                   # n r r
    A = np.tensordot(B, A, axes=(0, 0)).transpose(0, 2, 1)  # r r r
    # symmetric in exact arithmetic; only average away rounding when present
    if all(np.array_equal(A, A.transpose(p)) for p in _PERMS):
        return SymTensor3(A, check=False)
    return SymTensor3.symmetrize(A)


def frobenius_norm(T):
    a = T.data
    m = float(np.max(np.abs(a))) if a.size else 0.0
    if m == 0.0 or not np.isfinite(m):
        return m
    return m * float(np.sqrt(np.sum(np.square(a / m))))


def accumulate_rank_one_cube(T, c, x):
    """Return T + c * x (x) x (x) x as a new tensor."""
    x = _check_vec(T, x, "x")
    return SymTensor3(T.data + c * np.einsum("i,j,k->ijk", x, x, x), check=False)


def rank_one_cube_sum(Y, c):
    """sum_p c_p y_p^(x3) over the rows of ``Y`` as a SymTensor3."""
    return SymTensor3(_kernels.rank_one_cube_sum(Y, c), check=False)


def trailing_norms(T, V):
    """Frobenius norms of T restricted to span(V[:, i:]) for every i.

    One full rotation into the basis, then cumulative sums over the
    trailing index cube; returns an array of length V.rank.
    """
    R = contract_to_basis(T, V)
    return np.sqrt(np.maximum(_kernels.trailing_cube_norms_sq(R.data), 0.0))
