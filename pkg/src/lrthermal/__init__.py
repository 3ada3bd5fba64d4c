"""Thermal area laws in long-range interacting lattice models.

Free-fermion thermal states (correlation matrices, entropies, mutual
information and the SSR logarithmic negativity), exact diagonalization of
long-range Heisenberg chains, numerical evaluation of rigorous correlation
bounds, and a seeded experiment harness.
"""
from .errors import (
    BranchCutError, CapacityError, GeometryError, LrThermalError, NumericalError,
    PartitionError, SingularStateError, ValidationError,
)
from .kernels import BACKEND
from .lattice import (
    Bipartition, Lattice, bipartition, boundary_double_sum, boundary_set, boundary_size,
    build_lattice, distance, half_bipartition, manhattan_distance,
)
from .models import (
    CouplingSpec, CouplingTable, SingleParticleHamiltonian, coupling_envelope_check,
    heisenberg_couplings, hopping_matrix,
)
from .gaussian import (
    CorrelationMatrix, gaussian_mutual_information, subsystem_entropy,
    thermal_correlation_matrix, two_point_sweep,
)
from .negativity import pfaffian, slogpfaffian, ssr_negativity, ssr_negativity_details
from .ed import (
    dense_ssr_negativity, fermion_fock_oracle, gibbs_state, heisenberg_dense,
    mutual_information_ed, tfd_entanglement_entropy,
)
from .bounds import (
    BoundParams, beta_c, lambert_w, product_lemma_check, theorem1_rhs, theorem2_rhs,
    u_factor, wolf_rhs,
)
from .harness import ExperimentConfig, emit_csv, resolve_preset, run_experiment

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Bipartition", "BoundParams", "BranchCutError", "CapacityError",
    "CorrelationMatrix", "CouplingSpec", "CouplingTable", "ExperimentConfig",
    "GeometryError", "Lattice", "LrThermalError", "NumericalError", "PartitionError",
    "SingleParticleHamiltonian", "SingularStateError", "ValidationError", "beta_c",
    "bipartition", "boundary_double_sum", "boundary_set", "boundary_size", "build_lattice",
    "coupling_envelope_check", "dense_ssr_negativity", "distance", "emit_csv",
    "fermion_fock_oracle", "gaussian_mutual_information", "gibbs_state", "half_bipartition",
    "heisenberg_couplings", "heisenberg_dense", "hopping_matrix", "lambert_w",
    "manhattan_distance", "mutual_information_ed", "pfaffian", "product_lemma_check",
    "resolve_preset", "run_experiment", "slogpfaffian", "ssr_negativity",
    "ssr_negativity_details", "subsystem_entropy", "tfd_entanglement_entropy",
    "theorem1_rhs", "theorem2_rhs", "thermal_correlation_matrix", "two_point_sweep",
    "u_factor", "wolf_rhs",
]
