import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_wigner.lattice_algebra import index_of, labels, wrap
from lattice_wigner.testing import random_density, random_pure_state
from lattice_wigner.wigner import (
    check_density,
    density_from_state,
    density_from_wigner,
    dft_matrix,
    marginals,
    wigner_from_density,
)

S2 = np.sqrt(2)


def wigner_brute_force(rho):
    """rho(m,n) = N^-1 sum_a rho[2m - a, a] w^(2n(a - m)), the trace written
    out with Delta(m,n)_ab = w^(2n(a-m)) [a + b = 2m]."""
    N = rho.shape[0]
    L = labels(N)
    out = np.zeros((N, N), dtype=complex)
    for i, m in enumerate(L):
        for j, n in enumerate(L):
            for a in L:
                out[i, j] += rho[index_of(2 * m - a, N), index_of(a, N)] * np.exp(2j * np.pi * 2 * n * (a - m) / N)
    return out / N


def at(W, m, n):
    N = W.shape[0]
    return W[index_of(m, N), index_of(n, N)]


def test_maximally_mixed():
    W = wigner_from_density(np.eye(3) / 3)
    assert np.allclose(W, 1 / 9, atol=1e-15)


def test_sz3_state(sz3):
    W = sz3.W
    assert np.allclose(W, wigner_brute_force(sz3.rho).real, atol=1e-14)
    assert abs(at(W, 0, 0) - 1 / 3) < 1e-12
    for m, n in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
        assert abs(at(W, m, n) - (1 - S2) / 12) < 1e-12
    # the shift-direction axis carries (1 + 2 sqrt 2)/12, the phase-direction axis 1/12
    for m in (1, -1):
        assert abs(at(W, m, 0) - (1 + 2 * S2) / 12) < 1e-12
        assert abs(at(W, 0, m) - 1 / 12) < 1e-12
    assert abs(W.sum() - 1) < 1e-12


@pytest.mark.parametrize("N", [3, 5, 7])
def test_brute_force_agreement(N, rng):
    for _ in range(10):
        rho = random_density(rng, N)
        assert np.abs(wigner_from_density(rho) - wigner_brute_force(rho)).max() < 1e-13


@pytest.mark.parametrize("N", [3, 5, 7])
def test_pure_state_bound_and_roundtrip(N, rng):
    for _ in range(100):
        rho = random_density(rng, N, rank=rng.integers(1, N + 1))
        W = wigner_from_density(rho)
        assert np.abs(W).max() <= 1 / N + 1e-10
        assert abs(W.sum() - 1) < 1e-10
        assert np.abs(density_from_wigner(W) - rho).max() < 1e-12


def test_density_from_wigner_examples():
    assert np.allclose(density_from_wigner(np.full((3, 3), 1 / 9)), np.eye(3) / 3, atol=1e-15)
    assert np.array_equal(density_from_wigner(np.zeros((5, 5))), np.zeros((5, 5)))


def test_rejects_non_hermitian():
    rho = np.eye(3, dtype=complex) / 3
    rho[0, 1] = 0.2j
    with pytest.raises(ValueError):
        wigner_from_density(rho)
    with pytest.raises(ValueError):
        check_density(rho)


def test_density_validation():
    with pytest.raises(ValueError):
        check_density(np.eye(3) / 2)
    with pytest.raises(ValueError):
        check_density(np.diag([1.5, 0, -0.5]), positive=True)
    with pytest.raises(ValueError):
        density_from_state([1, 1, 0])


def test_sz3_marginals(sz3):
    pos, mom = marginals(sz3.W)
    assert np.allclose(pos, [0.25, 0.5, 0.25], atol=1e-10)
    expected = np.array([(3 - 2 * S2) / 12, (3 + 2 * S2) / 6, (3 - 2 * S2) / 12])
    assert np.allclose(mom, expected, atol=1e-10)
    # independent route: DFT of the state vector
    assert np.allclose(np.abs(dft_matrix(3) @ sz3.psi) ** 2, expected, atol=1e-12)


def test_mixed_marginals():
    pos, mom = marginals(np.full((3, 3), 1 / 9))
    assert np.allclose(pos, 1 / 3) and np.allclose(mom, 1 / 3)


@pytest.mark.parametrize("N", [3, 5, 7])
def test_marginals_match_probabilities(N, rng):
    L = labels(N)
    for _ in range(50):
        psi = random_pure_state(rng, N)
        pos, mom = marginals(wigner_from_density(density_from_state(psi)))
        ft = np.array([sum(np.exp(2j * np.pi * p * q / N) * psi[k] for k, q in enumerate(L)) for p in L]) / np.sqrt(N)
        assert np.abs(pos - np.abs(psi) ** 2).max() < 1e-10
        assert np.abs(mom - np.abs(ft) ** 2).max() < 1e-10
        assert pos.min() > -1e-10 and mom.min() > -1e-10


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([3, 5, 7]),
    st.integers(0, 2**32 - 1),
    st.floats(-3, 3, allow_nan=False),
    st.floats(-3, 3, allow_nan=False),
)
def test_linearity(N, seed, a, b):
    rng = np.random.default_rng(seed)
    r1, r2 = random_density(rng, N), random_density(rng, N)
    lhs = wigner_from_density(a * r1 + b * r2)
    rhs = a * wigner_from_density(r1) + b * wigner_from_density(r2)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_wrap_index_consistency():
    for N in (3, 5, 7):
        L = labels(N)
        assert np.array_equal(index_of(L, N), np.arange(N))
        assert np.array_equal(wrap(L + N, N), L)
