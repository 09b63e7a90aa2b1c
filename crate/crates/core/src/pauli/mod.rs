//! Evolution of the hybrid (spatial ⊗ spin-½) marginal.

mod analytic;
mod evolve;
mod hamiltonian;
mod kernel;
mod lattice;
pub(crate) mod marginal;

pub use analytic::{
    analytic_landau_solution, analytic_landau_solution_with_rate, analytic_trapped_solution, landau_initial_state, trapped_initial_state, LANDAU_PRINTED_RATE,
    LANDAU_RATE, TRAPPED_RATE,
};
pub use hamiltonian::HamiltonianSpec;
pub use kernel::{apply_theta, theta_kernel, ApplyOptions, ThetaKernel};
pub use marginal::{hybrid_marginal, HybridPoint};
pub use evolve::{evolve, max_step, EvolutionProblem, EvolutionResult, INSTABILITY_DRIFT};
pub use lattice::{free_rhs, lattice_rhs, spin_rhs, trapped_rhs, CartesianSlice, HybridMarginal, RingLattice};
