"""Random states and Hamiltonians for tests and experiment scripts."""

from __future__ import annotations

import numpy as np


def random_pure_state(rng: np.random.Generator, N: int) -> np.ndarray:
    psi = rng.normal(size=N) + 1j * rng.normal(size=N)
    return psi / np.linalg.norm(psi)


def random_density(rng: np.random.Generator, N: int, rank: int | None = None) -> np.ndarray:
    """Random mixed state rho = A A^dagger / Tr with A of shape (N, rank)."""
    A = rng.normal(size=(N, rank or N)) + 1j * rng.normal(size=(N, rank or N))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng: np.random.Generator, N: int) -> np.ndarray:
    """GUE-type matrix scaled so its spectrum stays O(1) in N."""
    A = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    return (A + A.conj().T) / (2 * np.sqrt(2 * N))
