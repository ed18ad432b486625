"""Stationary particle process for the lattice Wigner function on U(1) x Z_N x Z_N."""

from lattice_wigner.lattice_algebra import (
    fano_matrix,
    labels,
    omega_power,
    structure_matrices,
    weyl_matrix,
)
from lattice_wigner.wigner import density_from_wigner, marginals, wigner_from_density
from lattice_wigner.hamiltonian import jump_table, polar_decompose, weyl_coefficients
from lattice_wigner.liouville_oracle import evolve_unitary, evolve_wigner_ode
from lattice_wigner.phase_lift import LiftedDistribution, contract, lift_two_atom
from lattice_wigner.markov_engine import EngineConfig, run

__version__ = "0.1.0"

__all__ = [
    "EngineConfig",
    "LiftedDistribution",
    "contract",
    "density_from_wigner",
    "evolve_unitary",
    "evolve_wigner_ode",
    "fano_matrix",
    "jump_table",
    "labels",
    "lift_two_atom",
    "marginals",
    "omega_power",
    "polar_decompose",
    "run",
    "structure_matrices",
    "weyl_coefficients",
    "weyl_matrix",
    "wigner_from_density",
]
