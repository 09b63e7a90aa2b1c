//! Independent ground truth: dense von Neumann propagation and brute-force
//! marginals by direct quadrature.
//!
//! Nothing here calls into the fast paths of `symtomo`, `spintomo` or
//! `landau`; rotation matrices come from matrix exponentials and spatial
//! amplitudes from literal chirp integrals.

pub mod marginal;
pub mod propagate;
pub mod rotation;
