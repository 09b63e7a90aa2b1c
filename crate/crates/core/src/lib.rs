//! Tomographic-probability ("marginal distribution") representation of a
//! spin-½ particle with spatial degrees of freedom.
//!
//! The crate provides the forward tomography maps for the symplectic
//! (continuous) and rotation (spin) schemes, their inverse kernels, the
//! evolution equation obeyed by the hybrid marginal, and an independent
//! von Neumann oracle used to cross-check every fast path.

pub mod error;
pub mod quadrature;
pub mod specfun;
pub mod qstate;
pub mod symtomo;
pub mod spintomo;
pub mod landau;
pub mod pauli;
pub mod oracle;
pub mod io;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix used for operators and density matrices.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex vector used for state amplitudes.
pub type CVector = nalgebra::DVector<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
