"""Exact (non-stochastic) evolution of the density matrix and Wigner function.

Two independent routes: unitary conjugation by exp(-iHt/hbar) through the
eigendecomposition of H, and fixed-step RK4 integration of the linear
equation of motion for the Fano coefficients built from (h~, theta).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from lattice_wigner.hamiltonian import PolarTable, check_hermitian
from lattice_wigner.lattice_algebra import index_of, labels
from lattice_wigner.wigner import IMAG_TOL, wigner_from_density


@dataclass
class EvolutionResult:
    times: np.ndarray
    states: np.ndarray  # (len(times), N, N) Wigner snapshots
    method: str


def _check_times(times) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted ascending")
    return times


def evolve_unitary(rho0, H, times, hbar: float = 1.0, *, densities: bool = False):
    """rho(t) = U rho0 U^dagger with U = exp(-i H t / hbar).

    Returns an :class:`EvolutionResult`; with ``densities=True`` also the
    stack of density matrices.
    """
    H = check_hermitian(H)
    rho0 = np.asarray(rho0, dtype=complex)
    times = _check_times(times)
    try:
        energies, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigendecomposition of H failed: {exc}") from exc
    if not np.all(np.isfinite(energies)):
        raise np.linalg.LinAlgError("eigendecomposition of H produced non-finite values")
    r0 = V.conj().T @ rho0 @ V
    rhos = []
    for t in times:
        phase = np.exp(-1j * energies * t / hbar)
        rhos.append(V @ (phase[:, None] * r0 * phase.conj()[None, :]) @ V.conj().T)
    rhos = np.array(rhos)
    result = EvolutionResult(times, np.array([wigner_from_density(r) for r in rhos]), "unitary")
    return (result, rhos) if densities else result


def _phase_exponents(N: int):
    """Cross term X = m n' - n m' for every destination/origin pair, with the
    wrapped displacement indices (i_dm, i_dn), all shaped (N, N, N, N)."""
    L = labels(N)
    m = L[:, None, None, None]
    n = L[None, :, None, None]
    mp = L[None, None, :, None]
    np_ = L[None, None, None, :]
    X = m * np_ - n * mp
    X, di, dj = np.broadcast_arrays(X, index_of(m - mp, N), index_of(n - np_, N))
    return X, di, dj


@lru_cache(maxsize=32)
def _cached_exponents(N: int):
    return _phase_exponents(N)


def check_polar_symmetry(polar: PolarTable, tol: float = 1e-10) -> None:
    """A Hermitian H has h~(-d) = h~(d) and theta(-d) = -theta(d) mod N."""
    N = polar.N
    flip = index_of(-labels(N), N)
    h, th = polar.strength, polar.theta
    hm = h[np.ix_(flip, flip)]
    scale = max(h.max(), 1.0)
    if np.abs(h - hm).max() > tol * scale:
        raise ValueError("Weyl table is not Hermitian: h~(-m,-n) != h~(m,n)")
    z = h * np.exp(2j * np.pi * th / N)
    if np.abs(z - z[np.ix_(flip, flip)].conj()).max() > tol * scale:
        raise ValueError("Weyl table is not Hermitian: theta(-m,-n) != -theta(m,n)")


def liouville_generator(polar: PolarTable, hbar: float = 1.0) -> np.ndarray:
    """Real (N^2, N^2) matrix L with d/dt vec(W) = L vec(W), vec row-major."""
    N = polar.N
    check_polar_symmetry(polar)
    X, di, dj = _cached_exponents(N)
    h = polar.strength[di, dj]
    a = -2 * X + polar.theta[di, dj] - N / 4
    z = h * (np.exp(2j * np.pi * a / N) + np.exp(-2j * np.pi * a / N)) / hbar
    # the diagonal term vanishes identically; drop it
    same = (di == index_of(0, N)) & (dj == index_of(0, N))
    z = np.where(same, 0.0, z)
    if np.abs(z.imag).max() >= IMAG_TOL:
        raise ValueError("Liouville generator has an imaginary residue; broken (h~, theta) table")
    return np.ascontiguousarray(z.real.reshape(N * N, N * N))


def liouville_rhs(W, polar: PolarTable, hbar: float = 1.0) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    N = W.shape[0]
    return (liouville_generator(polar, hbar) @ W.ravel()).reshape(N, N)


def evolve_wigner_ode(W0, polar: PolarTable, times, hbar: float = 1.0, step: float = 1e-3) -> EvolutionResult:
    """Classic RK4 at fixed step on the Fano-coefficient equation of motion.

    Each interval between snapshots is split into ceil(dt/step) equal steps so
    that every requested time is hit exactly.
    """
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    W0 = np.asarray(W0, dtype=float)
    N = W0.shape[0]
    times = _check_times(times)
    L = liouville_generator(polar, hbar)
    y = W0.ravel().copy()
    t = 0.0
    out = []
    for target in times:
        if target < t:
            raise ValueError("times must be non-negative and ascending")
        span = target - t
        nsteps = int(np.ceil(span / step - 1e-9)) if span > 0 else 0
        if nsteps:
            h = span / nsteps
            for _ in range(nsteps):
                k1 = L @ y
                k2 = L @ (y + 0.5 * h * k1)
                k3 = L @ (y + 0.5 * h * k2)
                k4 = L @ (y + h * k3)
                y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = target
        out.append(y.reshape(N, N).copy())
    return EvolutionResult(times, np.array(out), "coefficient-ode")


__all__ = [
    "EvolutionResult",
    "evolve_unitary",
    "evolve_wigner_ode",
    "liouville_generator",
    "liouville_rhs",
]
