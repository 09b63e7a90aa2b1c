//! Special functions behind both tomography schemes.

mod halfint;
mod hermite;
mod jacobi;
mod laguerre;
mod threej;
mod wigner;

pub use halfint::HalfInt;
pub use hermite::{hermite_multivar, HermiteMatrixParam, HermiteTable, DEFAULT_MAX_HERMITE_ORDER};
pub use jacobi::jacobi_poly;
pub use laguerre::laguerre;
pub use threej::wigner_3j;
pub use wigner::{half_phase, wigner_d_matrix, wigner_big_d, wigner_big_d_matrix, wigner_small_d, MAX_J_TWICE};
