//! Rotation matrices from angular-momentum generators, independent of the
//! Jacobi-polynomial d-functions.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::specfun::HalfInt;
use crate::{CMatrix, Complex64};

/// `exp(-i t H)` for Hermitian `H`, by dense eigendecomposition.
pub fn exp_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
    v * phases * v.adjoint()
}

/// `J_z` in the descending-m basis.
pub fn jz(j: HalfInt) -> CMatrix {
    let n = j.multiplicity();
    CMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(j.value() - r as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `J_+` in the descending-m basis.
pub fn jplus(j: HalfInt) -> CMatrix {
    let n = j.multiplicity();
    let jv = j.value();
    CMatrix::from_fn(n, n, |r, c| {
        // ⟨m+1|J+|m⟩ with row r ↔ m' = j - r.
        let m = jv - c as f64;
        if c == r + 1 {
            Complex64::new((jv * (jv + 1.0) - m * (m + 1.0)).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn jy(j: HalfInt) -> CMatrix {
    let p = jplus(j);
    let m = p.adjoint();
    (p - m) * Complex64::new(0.0, -0.5)
}

pub fn jx(j: HalfInt) -> CMatrix {
    let p = jplus(j);
    let m = p.adjoint();
    (p + m) * Complex64::new(0.5, 0.0)
}

/// `exp(-iβJ_y)` as a real matrix.
pub fn small_d_oracle(j: HalfInt, beta: f64) -> DMatrix<f64> {
    exp_hermitian(&jy(j), beta).map(|z| z.re)
}

/// `exp(iγJ_z) exp(-iβJ_y) exp(iαJ_z)`, whose entries are
/// `e^{im'γ} d_{m'm}(β) e^{imα}`.
pub fn rotation_oracle(j: HalfInt, alpha: f64, beta: f64, gamma: f64) -> CMatrix {
    let z = jz(j);
    exp_hermitian(&z, -gamma) * exp_hermitian(&jy(j), beta) * exp_hermitian(&z, -alpha)
}
