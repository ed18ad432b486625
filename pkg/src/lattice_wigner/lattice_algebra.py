"""Phase, shift, parity, Weyl and Fano matrices on Z_N for odd N.

Rows and columns are ordered by descending site label, (N-1)/2 down to
-(N-1)/2, so ``Q`` is literally ``diag(w^((N-1)/2), ..., 1, ..., w^-((N-1)/2))``.
Array index ``i`` corresponds to label ``(N-1)/2 - i`` throughout the package.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

ATOL = 1e-12


class StructureMatrices(NamedTuple):
    Q: np.ndarray
    P: np.ndarray
    T: np.ndarray


def check_dimension(N: int) -> int:
    if isinstance(N, bool) or int(N) != N:
        raise ValueError(f"N must be an integer, got {N!r}")
    N = int(N)
    if N < 3 or N % 2 == 0:
        raise ValueError(f"N must be odd and >= 3, got {N}")
    return N


def labels(N: int) -> np.ndarray:
    """Site labels in array order: (N-1)/2, ..., 0, ..., -(N-1)/2."""
    h = (check_dimension(N) - 1) // 2
    return np.arange(h, -h - 1, -1)


def wrap(x, N: int):
    """Reduce integer labels modulo N into the symmetric range."""
    h = (N - 1) // 2
    return (np.asarray(x) + h) % N - h


def index_of(label, N: int):
    """Array index of a (wrapped) site label."""
    return (N - 1) // 2 - wrap(label, N)


def omega_power(N: int, x: float) -> complex:
    """exp(2 pi i x / N); ``x`` may be fractional."""
    check_dimension(N)
    return complex(np.exp(2j * np.pi * x / N))


@lru_cache(maxsize=None)
def _structure(N: int) -> StructureMatrices:
    L = labels(N)
    Q = np.diag(np.exp(2j * np.pi * L / N))
    # P_{ab} = 1 iff b = a + 1 (mod N); T_{ab} = 1 iff a + b = 0 (mod N)
    P = (wrap(L[:, None] + 1 - L[None, :], N) == 0).astype(complex)
    T = (wrap(L[:, None] + L[None, :], N) == 0).astype(complex)
    for a in (Q, P, T):
        a.flags.writeable = False
    return StructureMatrices(Q, P, T)


def structure_matrices(N: int) -> StructureMatrices:
    return _structure(check_dimension(N))


def _mpow(A: np.ndarray, k: int, N: int) -> np.ndarray:
    # Q, P have order N, so negative powers reduce mod N
    return np.linalg.matrix_power(A, int(k) % N)


@lru_cache(maxsize=None)
def _weyl(N: int, m: int, n: int) -> np.ndarray:
    Q, P, _ = _structure(N)
    W = omega_power(N, -2 * m * n) * _mpow(Q, 2 * n, N) @ _mpow(P, -2 * m, N)
    W.flags.writeable = False
    return W


def weyl_matrix(N: int, m: int, n: int) -> np.ndarray:
    """W(m,n) = w^(-2mn) Q^(2n) P^(-2m)."""
    N = check_dimension(N)
    return _weyl(N, int(wrap(m, N)), int(wrap(n, N)))


def weyl_matrix_forms(N: int, m: int, n: int) -> list[np.ndarray]:
    """The four equivalent product forms of W(m,n), for cross-checking."""
    N = check_dimension(N)
    Q, P, _ = _structure(N)
    return [
        omega_power(N, -2 * m * n) * _mpow(Q, 2 * n, N) @ _mpow(P, -2 * m, N),
        omega_power(N, 2 * m * n) * _mpow(P, -2 * m, N) @ _mpow(Q, 2 * n, N),
        _mpow(P, -m, N) @ _mpow(Q, 2 * n, N) @ _mpow(P, -m, N),
        _mpow(Q, n, N) @ _mpow(P, -2 * m, N) @ _mpow(Q, n, N),
    ]


def fano_matrix(N: int, m: int, n: int) -> np.ndarray:
    """Delta(m,n) = W(m,n) T, a Hermitian phase-point operator."""
    N = check_dimension(N)
    return weyl_matrix(N, m, n) @ _structure(N).T


@lru_cache(maxsize=None)
def _stack(N: int, kind: str) -> np.ndarray:
    L = labels(N)
    make = weyl_matrix if kind == "weyl" else fano_matrix
    out = np.array([[make(N, m, n) for n in L] for m in L])
    out.flags.writeable = False
    return out


def weyl_basis(N: int) -> np.ndarray:
    """All Weyl matrices, shape (N, N, N, N) indexed [i_m, i_n, row, col]."""
    return _stack(check_dimension(N), "weyl")


def fano_basis(N: int) -> np.ndarray:
    """All Fano matrices, shape (N, N, N, N) indexed [i_m, i_n, row, col]."""
    return _stack(check_dimension(N), "fano")
