"""Non-negative lifted distributions phi(alpha, m, n) over U(1) x Z_N x Z_N.

phi is stored as a list of weighted atoms; the Wigner function is recovered
by ``contract``: rho(m,n) = sum over atoms at (m,n) of w cos(alpha).  Every
constructor emits atoms in mirror pairs (alpha, 2 pi - alpha) with equal
weight and keeps them away from the stopping points alpha = 0, pi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lattice_wigner.lattice_algebra import check_dimension, index_of, labels

TWO_PI = 2.0 * np.pi
STOP_TOL = 1e-9


@dataclass
class LiftedDistribution:
    N: int
    m: np.ndarray
    n: np.ndarray
    alpha: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=np.int64)
        self.n = np.asarray(self.n, dtype=np.int64)
        self.alpha = np.mod(np.asarray(self.alpha, dtype=float), TWO_PI)
        self.weight = np.asarray(self.weight, dtype=float)
        if not (len(self.m) == len(self.n) == len(self.alpha) == len(self.weight)):
            raise ValueError("atom arrays must have equal length")
        if np.any(self.weight < 0):
            raise ValueError("atom weights must be non-negative")

    def __len__(self) -> int:
        return len(self.weight)

    @property
    def total_mass(self) -> float:
        return float(self.weight.sum())

    def near_stopping_points(self, tol: float = STOP_TOL) -> np.ndarray:
        return np.abs(np.sin(self.alpha)) < tol

    def is_mirror_symmetric(self, tol: float = 1e-12) -> bool:
        """Same multiset of (site, alpha, w) after alpha -> 2 pi - alpha."""

        def key(alpha):
            a = np.round(np.mod(alpha, TWO_PI) / tol) * tol
            a[np.isclose(a, TWO_PI, atol=tol)] = 0.0
            order = np.lexsort((np.round(self.weight / tol), a, self.n, self.m))
            return np.stack([self.m[order], self.n[order], a[order], np.round(self.weight[order] / tol)])

        return bool(np.allclose(key(self.alpha), key(TWO_PI - self.alpha), atol=tol))


def contract(phi: LiftedDistribution) -> np.ndarray:
    N = phi.N
    out = np.zeros((N, N))
    np.add.at(out, (index_of(phi.m, N), index_of(phi.n, N)), phi.weight * np.cos(phi.alpha))
    return out


def contract_sine(phi: LiftedDistribution) -> np.ndarray:
    """The sine part of the phase integral; zero for mirror-symmetric phi."""
    N = phi.N
    out = np.zeros((N, N))
    np.add.at(out, (index_of(phi.m, N), index_of(phi.n, N)), phi.weight * np.sin(phi.alpha))
    return out


def _site_arrays(W):
    W = np.asarray(W, dtype=float)
    N = check_dimension(W.shape[0])
    L = labels(N)
    mm, nn = np.meshgrid(L, L, indexing="ij")
    return N, mm.ravel(), nn.ravel(), W.ravel()


def lift_two_atom(W, positive_angle: float = np.pi / 3, negative_angle: float = 2 * np.pi / 3) -> LiftedDistribution:
    """Two atoms per nonzero site: +-pi/3 for rho > 0, +-2pi/3 for rho < 0.

    Weights are |rho| / (2 |cos alpha0|), so each mirror pair contracts back
    to rho exactly.
    """
    if not np.cos(positive_angle) > 0 or not np.cos(negative_angle) < 0:
        raise ValueError("positive_angle needs cos > 0 and negative_angle cos < 0")
    N, m, n, rho = _site_arrays(W)
    keep = rho != 0
    m, n, rho = m[keep], n[keep], rho[keep]
    a0 = np.where(rho > 0, positive_angle, negative_angle)
    w = np.abs(rho) / (2.0 * np.abs(np.cos(a0)))
    return LiftedDistribution(
        N,
        np.repeat(m, 2),
        np.repeat(n, 2),
        np.stack([a0, TWO_PI - a0], axis=1).ravel(),
        np.repeat(w, 2),
    )


def lift_smooth(W, grid: int = 720) -> LiftedDistribution:
    """Per-site density proportional to sin^2(alpha) on the half circle whose
    cosine has the sign of rho, sampled on a midpoint grid of ``grid`` angles.

    The midpoint grid never contains 0, pi/2, pi or 3pi/2 when ``grid`` is a
    multiple of 4.
    """
    if grid % 4:
        raise ValueError("grid must be a multiple of 4")
    N, m, n, rho = _site_arrays(W)
    alpha = (np.arange(grid) + 0.5) * TWO_PI / grid
    shape = np.sin(alpha) ** 2
    c = np.cos(alpha)
    pos = np.where(c > 0, shape, 0.0)
    neg = np.where(c < 0, shape, 0.0)
    pos /= np.sum(pos * c)
    neg /= -np.sum(neg * c)
    keep = rho != 0
    m, n, rho = m[keep], n[keep], rho[keep]
    weights = np.where(rho[:, None] > 0, pos[None, :], neg[None, :]) * np.abs(rho)[:, None]
    mask = weights > 0
    k = mask.sum(axis=1)
    return LiftedDistribution(
        N,
        np.repeat(m, k),
        np.repeat(n, k),
        np.broadcast_to(alpha, weights.shape)[mask],
        weights[mask],
    )
