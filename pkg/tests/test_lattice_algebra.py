import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_wigner.lattice_algebra import (
    fano_basis,
    fano_matrix,
    labels,
    omega_power,
    structure_matrices,
    weyl_basis,
    weyl_matrix,
    weyl_matrix_forms,
    wrap,
)

ODD_N = [3, 5, 7, 9]


def weyl_elementwise(N, m, n):
    """W(m,n)_ab = w^(-2mn + 2na) if b = a - 2m (mod N), from the matrix
    definitions written out entry by entry."""
    L = labels(N)
    W = np.zeros((N, N), dtype=complex)
    for i, a in enumerate(L):
        for j, b in enumerate(L):
            if (b - a + 2 * m) % N == 0:
                W[i, j] = np.exp(2j * np.pi * (-2 * m * n + 2 * n * a) / N)
    return W


@st.composite
def lattice_point(draw):
    N = draw(st.sampled_from(ODD_N))
    h = (N - 1) // 2
    return N, draw(st.integers(-h, h)), draw(st.integers(-h, h))


def test_omega_power_values():
    assert omega_power(3, 0) == 1
    for N in (3, 5, 7, 11):
        assert abs(omega_power(N, N / 4) - 1j) < 1e-15
    assert abs(omega_power(3, 0.75) - 1j) < 1e-15


def test_labels_descend():
    assert labels(3).tolist() == [1, 0, -1]
    assert labels(5).tolist() == [2, 1, 0, -1, -2]


@pytest.mark.parametrize("N", [2, 4, 1, 0, -3])
def test_rejects_bad_dimension(N):
    with pytest.raises(ValueError):
        structure_matrices(N)


def test_structure_n3():
    Q, P, T = structure_matrices(3)
    w = np.exp(2j * np.pi / 3)
    assert np.allclose(Q, np.diag([w, 1, 1 / w]), atol=1e-12)
    assert np.array_equal(T, np.fliplr(np.eye(3)))
    # first row of P has its 1 in the last column
    assert np.array_equal(P, np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]]))


@pytest.mark.parametrize("N", ODD_N)
def test_structure_relations(N):
    Q, P, T = structure_matrices(N)
    I = np.eye(N)
    assert np.allclose(np.linalg.matrix_power(Q, N), I, atol=1e-12)
    assert np.allclose(np.linalg.matrix_power(P, N), I, atol=1e-12)
    assert np.allclose(T @ T, I, atol=1e-12)
    assert np.allclose(P @ Q, omega_power(N, 1) * Q @ P, atol=1e-12)


def test_weyl_examples():
    Q, P, _ = structure_matrices(3)
    assert np.allclose(weyl_matrix(3, 0, 0), np.eye(3), atol=1e-12)
    assert np.allclose(weyl_matrix(3, 0, 1), Q @ Q, atol=1e-12)
    Pinv = np.linalg.inv(P)
    assert np.allclose(weyl_matrix(3, 1, 1), Pinv @ Q @ Q @ Pinv, atol=1e-12)


@pytest.mark.parametrize("N", ODD_N)
def test_weyl_forms_and_entries(N):
    L = labels(N)
    for m, n in itertools.product(L, L):
        W = weyl_matrix(N, m, n)
        assert np.abs(W - weyl_elementwise(N, m, n)).max() < 1e-12
        for form in weyl_matrix_forms(N, m, n):
            assert np.abs(form - W).max() < 1e-12


def test_fano_examples():
    _, _, T = structure_matrices(3)
    assert np.allclose(fano_matrix(3, 0, 0), T)


def test_fano_orthonormality_brute_force_n3():
    L = labels(3)
    for (m, n), (mp, np_) in itertools.product(itertools.product(L, L), repeat=2):
        tr = np.trace(fano_matrix(3, m, n) @ fano_matrix(3, mp, np_))
        expected = 3.0 if (m, n) == (mp, np_) else 0.0
        assert abs(tr - expected) < 1e-12


@pytest.mark.parametrize("N", ODD_N)
def test_trace_orthonormality(N):
    Wb = weyl_basis(N).reshape(N * N, N, N)
    Fb = fano_basis(N).reshape(N * N, N, N)
    gram_w = np.einsum("kba,lba->kl", Wb.conj(), Wb)  # Tr[W_k^dag W_l]
    gram_f = np.einsum("kab,lba->kl", Fb, Fb)
    eye = N * np.eye(N * N)
    assert np.abs(gram_w - eye).max() < 1e-10
    assert np.abs(gram_f - eye).max() < 1e-10


@given(lattice_point())
def test_weyl_adjoint(point):
    N, m, n = point
    assert np.abs(weyl_matrix(N, m, n).conj().T - weyl_matrix(N, -m, -n)).max() < 1e-12


@given(lattice_point())
def test_fano_hermitian(point):
    N, m, n = point
    D = fano_matrix(N, m, n)
    assert np.abs(D - D.conj().T).max() < 1e-12


@settings(max_examples=50)
@given(lattice_point(), st.integers(-20, 20), st.integers(-20, 20))
def test_labels_wrap(point, dm, dn):
    N, m, n = point
    assert np.array_equal(weyl_matrix(N, m + N * dm, n + N * dn), weyl_matrix(N, m, n))
    h = (N - 1) // 2
    assert -h <= wrap(m + dm, N) <= h
