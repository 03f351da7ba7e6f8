import numpy as np
import pytest

from ahom.tensor3 import SymTensor3


@pytest.fixture
def monkey_tensor():
    T = np.zeros((2, 2, 2))
    T[0, 0, 0] = 6.0
    T[0, 1, 1] = T[1, 0, 1] = T[1, 1, 0] = -6.0
    return SymTensor3(T)


def random_sym_tensor(rng, n):
    return SymTensor3.symmetrize(rng.standard_normal((n, n, n)))


def random_basis(rng, n, r):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Q[:, :r]
