"""Exact-diagonalization toolkit for drive-assisted superexchange cluster
state generation in spin-orbit-coupled fermionic lattices."""

from .basis import (
    FockBasis,
    Spin1Basis,
    SpinBasis,
    apply_fermion,
    build_fock_basis,
    spin1_embedding,
    spin_half_embedding,
)
from .evolve import (
    ConvergenceError,
    Model,
    ProtocolSchedule,
    QuenchError,
    global_pulse,
    make_model,
    propagate,
    propagate_series,
    quench_omega,
    run_echo_ising,
    run_time_reversal,
    two_site_unitary_offdiag,
)
from .hamiltonian import (
    DivergenceError,
    HubbardParams,
    build_fermi_hubbard_gauged,
    build_fermi_hubbard_literal,
    build_ising,
    build_spin1_hole,
    build_superexchange,
    cluster_time,
    j_zz,
    superexchange_2site_oracle,
    two_site_downfolding,
)
from .lattice import GeometryError, LatticeGeometry, mid_sites, neighbor_pairs, stagger_sign
from .observables import (
    analytic_sx_1d,
    analytic_sx_2d,
    analytic_sx_expectation,
    collective_cluster_estimate,
    collective_spin,
    fidelity,
    hole_density,
    otoc,
    stabilizer,
    stabilizer_spec,
)
from .operators import SparseHermitianOperator, collective_spin_operator, site_spin_operator
from .states import (
    StateVector,
    fock_left_product,
    spin1_left_product,
    spin_left_product,
)

__version__ = "0.1.0"
