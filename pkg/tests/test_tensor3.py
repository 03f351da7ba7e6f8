import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ahom.errors import DimensionError
from ahom.tensor3 import (SubspaceBasis, SymTensor3, accumulate_rank_one_cube, contract_once,
                          contract_to_basis, cubic_form, frobenius_norm, rank_one_cube_sum,
                          trailing_norms)

from conftest import random_basis, random_sym_tensor


def test_cubic_form_monkey(monkey_tensor):
    assert cubic_form(monkey_tensor, [1, 0]) == 6.0
    assert cubic_form(monkey_tensor, [0, 1]) == 0.0
    assert cubic_form(SymTensor3.zeros(3), [1.0, -2.0, 0.5]) == 0.0


def test_contract_once_monkey(monkey_tensor):
    np.testing.assert_array_equal(contract_once(monkey_tensor, [1, 0]), [[6, 0], [0, -6]])
    np.testing.assert_array_equal(contract_once(monkey_tensor, [0, 1]), [[0, -6], [-6, 0]])
    np.testing.assert_array_equal(contract_once(SymTensor3.zeros(2), [3, 4]), np.zeros((2, 2)))


def test_contract_to_basis_examples(monkey_tensor):
    e0 = SubspaceBasis([[1.0], [0.0]])
    e1 = SubspaceBasis([[0.0], [1.0]])
    assert contract_to_basis(monkey_tensor, e0).data.ravel().tolist() == [6.0]
    assert contract_to_basis(monkey_tensor, e1).data.ravel().tolist() == [0.0]
    np.testing.assert_array_equal(
        contract_to_basis(monkey_tensor, SubspaceBasis.identity(2)).data, monkey_tensor.data)


def test_contract_to_empty_basis_has_zero_norm(monkey_tensor):
    R = contract_to_basis(monkey_tensor, SubspaceBasis.empty(2))
    assert R.dim == 0
    assert frobenius_norm(R) == 0.0


def test_frobenius_examples(monkey_tensor):
    assert frobenius_norm(monkey_tensor) == pytest.approx(12.0, rel=1e-15)
    T = accumulate_rank_one_cube(SymTensor3.zeros(2), 2.0, [1.0, 1.0])
    assert frobenius_norm(T) == pytest.approx(4 * np.sqrt(2), rel=1e-12)
    assert frobenius_norm(SymTensor3.zeros(4)) == 0.0


def test_accumulate_examples(monkey_tensor):
    T = accumulate_rank_one_cube(SymTensor3.zeros(2), 1.0, [1.0, 0.0])
    expected = np.zeros((2, 2, 2))
    expected[0, 0, 0] = 1.0
    np.testing.assert_array_equal(T.data, expected)
    T = accumulate_rank_one_cube(SymTensor3.zeros(2), 1.0, [1.0, 1.0])
    np.testing.assert_array_equal(T.data, np.ones((2, 2, 2)))
    T = accumulate_rank_one_cube(monkey_tensor, 0.0, [5.0, -3.0])
    np.testing.assert_array_equal(T.data, monkey_tensor.data)


def test_dimension_mismatch_raises(monkey_tensor):
    with pytest.raises(DimensionError):
        cubic_form(monkey_tensor, [1, 0, 0])
    with pytest.raises(DimensionError):
        contract_once(monkey_tensor, [1])
    with pytest.raises(DimensionError):
        contract_to_basis(monkey_tensor, SubspaceBasis.identity(3))
    with pytest.raises(DimensionError):
        accumulate_rank_one_cube(monkey_tensor, 1.0, [1.0])


def test_rejects_asymmetric_and_non_orthonormal():
    with pytest.raises(ValueError):
        SymTensor3(np.arange(8.0).reshape(2, 2, 2))
    with pytest.raises(ValueError):
        SubspaceBasis([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(DimensionError):
        SymTensor3(np.zeros((2, 3, 2)))


def test_tensor_is_read_only(monkey_tensor):
    with pytest.raises(ValueError):
        monkey_tensor.data[0, 0, 0] = 1.0


def test_symmetry_under_random_permutations():
    rng = np.random.default_rng(0)
    T = random_sym_tensor(rng, 5)
    for _ in range(200):
        idx = tuple(rng.integers(0, 5, size=3))
        for p in itertools.permutations(idx):
            assert T[p] == pytest.approx(T[idx], abs=1e-14)


def test_basis_properties():
    B = SubspaceBasis(random_basis(np.random.default_rng(1), 4, 2))
    assert (B.ambient_dim, B.rank) == (4, 2)
    P = B.projector()
    np.testing.assert_allclose(P @ P, P, atol=1e-12)
    assert SubspaceBasis.empty(3).rank == 0


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1), data=st.data())
def test_projection_norm_equivalence(n, seed, data):
    r = data.draw(st.integers(0, n))
    rng = np.random.default_rng(seed)
    T = random_sym_tensor(rng, n)
    V = random_basis(rng, n, r)
    S = V @ V.T
    ambient = np.einsum("ijk,ia,jb,kc->abc", T.data, S, S, S)
    got = frobenius_norm(contract_to_basis(T, SubspaceBasis(V)))
    assert got == pytest.approx(np.sqrt(np.sum(ambient ** 2)), rel=1e-9, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_cubic_form_matches_contraction(n, seed):
    rng = np.random.default_rng(seed)
    T = random_sym_tensor(rng, n)
    u = rng.standard_normal(n)
    lhs = cubic_form(T, u)
    rhs = u @ contract_once(T, u) @ u
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 6), c=st.floats(-1e3, 1e3), seed=st.integers(0, 2**32 - 1))
def test_rank_one_norm(n, c, seed):
    x = np.random.default_rng(seed).standard_normal(n)
    T = accumulate_rank_one_cube(SymTensor3.zeros(n), c, x)
    assert frobenius_norm(T) == pytest.approx(abs(c) * np.linalg.norm(x) ** 3, rel=1e-12, abs=1e-300)


def test_identity_contraction_is_exact():
    T = random_sym_tensor(np.random.default_rng(3), 4)
    np.testing.assert_array_equal(contract_to_basis(T, SubspaceBasis.identity(4)).data, T.data)


def test_rank_one_cube_sum_matches_accumulation():
    rng = np.random.default_rng(4)
    Y = rng.standard_normal((7, 3))
    c = rng.standard_normal(7)
    T = SymTensor3.zeros(3)
    for y, ci in zip(Y, c):
        T = accumulate_rank_one_cube(T, ci, y)
    np.testing.assert_allclose(rank_one_cube_sum(Y, c).data, T.data, atol=1e-12)


def test_trailing_norms_match_direct_contractions():
    rng = np.random.default_rng(5)
    T = random_sym_tensor(rng, 5)
    V = random_basis(rng, 5, 5)
    got = trailing_norms(T, SubspaceBasis(V))
    want = [frobenius_norm(contract_to_basis(T, SubspaceBasis(V[:, i:]))) for i in range(5)]
    np.testing.assert_allclose(got, want, rtol=1e-10)
