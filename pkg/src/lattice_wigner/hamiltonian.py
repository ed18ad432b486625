"""Weyl expansion of the Hamiltonian, its polar form and the jump table."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from lattice_wigner.lattice_algebra import check_dimension, index_of, labels, weyl_basis

logger = logging.getLogger(__name__)

# relative to the largest |H~|
ZERO_THRESHOLD = 1e-12


def check_hermitian(H, tol: float = 1e-10) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got shape {H.shape}")
    check_dimension(H.shape[0])
    if np.abs(H - H.conj().T).max() > tol:
        raise ValueError("Hamiltonian is not Hermitian")
    return H


def weyl_coefficients(H) -> np.ndarray:
    """H~(m, n) = Tr[W(m,n)^dagger H] / N as a complex (N, N) array."""
    H = check_hermitian(H)
    N = H.shape[0]
    # Tr[W^dag H] = sum_ab conj(W_ab) H_ab
    c = np.einsum("mnab,ab->mn", weyl_basis(N).conj(), H) / N
    # H~(-m,-n) = conj(H~(m,n)) for Hermitian H; enforce it so mirrored
    # displacements get bit-identical strengths.  Label reversal is [::-1].
    return 0.5 * (c + c[::-1, ::-1].conj())


def hamiltonian_from_coefficients(coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    return np.einsum("mn,mnab->ab", coeffs, weyl_basis(coeffs.shape[0]))


@dataclass(frozen=True)
class PolarTable:
    """H~(m,n) = strength(m,n) * w^theta(m,n), theta in [0, N)."""

    strength: np.ndarray
    theta: np.ndarray

    @property
    def N(self) -> int:
        return self.strength.shape[0]

    def coefficients(self) -> np.ndarray:
        return self.strength * np.exp(2j * np.pi * self.theta / self.N)


def polar_decompose(coeffs) -> PolarTable:
    coeffs = np.asarray(coeffs, dtype=complex)
    N = check_dimension(coeffs.shape[0])
    strength = np.abs(coeffs)
    theta = np.mod(np.angle(coeffs) * N / (2 * np.pi), N)
    theta[theta >= N] = 0.0  # mod can round up to exactly N
    theta[strength <= ZERO_THRESHOLD * max(strength.max(), np.finfo(float).tiny)] = 0.0
    return PolarTable(strength, theta)


@dataclass(frozen=True)
class JumpTable:
    """Displacements reachable in one jump, their probabilities and phases.

    ``displacements[k] = (dm, dn)`` as wrapped labels. ``rate`` is the jump
    rate D = 2|h~|/hbar, with |h~| summed over the off-origin entries.
    """

    N: int
    displacements: np.ndarray
    probabilities: np.ndarray
    theta: np.ndarray
    total_strength: float
    hbar: float

    @property
    def rate(self) -> float:
        return 2.0 * self.total_strength / self.hbar

    @property
    def is_free(self) -> bool:
        return len(self.probabilities) == 0

    def __len__(self) -> int:
        return len(self.probabilities)


def jump_table(polar: PolarTable, hbar: float = 1.0) -> JumpTable:
    if not hbar > 0:
        raise ValueError(f"hbar must be positive, got {hbar}")
    N = polar.N
    L = labels(N)
    h = polar.strength
    cut = ZERO_THRESHOLD * max(h.max(), np.finfo(float).tiny)
    disp, strength, theta = [], [], []
    for i, m in enumerate(L):
        for j, n in enumerate(L):
            if (m, n) == (0, 0) or h[i, j] <= cut:
                continue
            disp.append((m, n))
            strength.append(h[i, j])
            theta.append(polar.theta[i, j])
    total = float(np.sum(strength))
    if not disp:
        logger.info("no off-origin Weyl coefficients: free evolution, D = 0")
        return JumpTable(N, np.zeros((0, 2), int), np.zeros(0), np.zeros(0), 0.0, hbar)
    return JumpTable(
        N,
        np.array(disp, dtype=int),
        np.array(strength) / total,
        np.array(theta),
        total,
        float(hbar),
    )


def format_table(coeffs, polar: PolarTable, table: JumpTable) -> str:
    """Plain-text listing of H~, h~, theta and jump probability per displacement."""
    N = polar.N
    L = labels(N)
    prob = {tuple(d): p for d, p in zip(table.displacements.tolist(), table.probabilities)}
    lines = [f"{'m':>3} {'n':>3} {'Re H~':>12} {'Im H~':>12} {'h~':>12} {'theta':>10} {'p':>10}"]
    for m in L:
        for n in L:
            i, j = index_of(m, N), index_of(n, N)
            c = coeffs[i, j]
            if polar.strength[i, j] <= ZERO_THRESHOLD * max(polar.strength.max(), 1e-300):
                continue
            p = prob.get((int(m), int(n)), 0.0)
            lines.append(
                f"{m:>3} {n:>3} {c.real:>12.8f} {c.imag:>12.8f} "
                f"{polar.strength[i, j]:>12.8f} {polar.theta[i, j]:>10.6f} {p:>10.6f}"
            )
    lines.append(f"|h~| = {table.total_strength:.12g}  D = {table.rate:.12g}  hbar = {table.hbar:g}")
    return "\n".join(lines)
