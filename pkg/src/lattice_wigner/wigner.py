"""Density matrix <-> lattice Wigner function, and axis marginals.

A Wigner function is a real (N, N) array ``W[i_m, i_n]`` holding the Fano
coefficients rho(m, n) = Tr[rho Delta(m, n)] / N.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from lattice_wigner.lattice_algebra import check_dimension, fano_basis, index_of, labels

IMAG_TOL = 1e-10


class Marginals(NamedTuple):
    position: np.ndarray
    momentum: np.ndarray


def density_from_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state vector must have unit norm, got {norm:.3g}")
    return np.outer(psi, psi.conj())


def check_density(rho: np.ndarray, *, tol: float = 1e-10, positive: bool = False) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    check_dimension(rho.shape[0])
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real:.3g}, expected 1")
    if positive and np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix has negative eigenvalues")
    return rho


def wigner_from_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    N = check_dimension(rho.shape[0])
    # Tr[rho D] = sum_ab rho_ab D_ba
    vals = np.einsum("ab,mnba->mn", rho, fano_basis(N)) / N
    if np.abs(vals.imag).max() >= IMAG_TOL:
        raise ValueError("Wigner function has an imaginary residue; input is not Hermitian")
    return np.ascontiguousarray(vals.real)


def density_from_wigner(W) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    N = check_dimension(W.shape[0])
    return np.einsum("mn,mnab->ab", W, fano_basis(N))


def marginals(W) -> Marginals:
    """Axis sums of a Wigner function.

    ``position[k]`` is the probability of the basis state with label
    ``labels(N)[k]``; ``momentum[k]`` is |psi~(p)|^2 for p = ``labels(N)[k]``
    with psi~(p) = N^-1/2 sum_q w^(pq) psi(q).  The shift label m plays the
    role of position and the phase label n = -p that of momentum.
    """
    W = np.asarray(W, dtype=float)
    N = W.shape[0]
    position = W.sum(axis=1)
    momentum = W.sum(axis=0)[index_of(-labels(N), N)]
    return Marginals(position, momentum)


def dft_matrix(N: int) -> np.ndarray:
    L = labels(N)
    return np.exp(2j * np.pi * np.outer(L, L) / N) / np.sqrt(N)


def expectation(W, operator) -> float:
    """<A> = sum_(m,n) rho(m,n) Tr[Delta(m,n) A]."""
    W = np.asarray(W, dtype=float)
    return float(np.real(np.einsum("mn,mnab,ba->", W, fano_basis(W.shape[0]), operator)))


def observable_weights(operator) -> np.ndarray:
    """Per-site coefficients c(m,n) with <A> = sum rho(m,n) c(m,n)."""
    operator = np.asarray(operator, dtype=complex)
    N = operator.shape[0]
    return np.real(np.einsum("mnab,ba->mn", fano_basis(N), operator))
