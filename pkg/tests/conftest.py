import numpy as np
import pytest

from lattice_wigner.cli_io import spin_matrices, sz3_state
from lattice_wigner.hamiltonian import jump_table, polar_decompose, weyl_coefficients
from lattice_wigner.wigner import density_from_state, wigner_from_density

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


class SZ3:
    N = 3
    H = spin_matrices(3)["sz"]
    psi = sz3_state()
    rho = density_from_state(psi)
    W = wigner_from_density(rho)
    coeffs = weyl_coefficients(H)
    polar = polar_decompose(coeffs)
    table = jump_table(polar, 1.0)


@pytest.fixture(scope="session")
def sz3():
    return SZ3


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
