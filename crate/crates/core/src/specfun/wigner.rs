use nalgebra::DMatrix;

use super::jacobi::jacobi_poly;
use super::HalfInt;
use crate::{CMatrix, Complex64, Error, Result};

/// Largest supported `2j`.
pub const MAX_J_TWICE: i32 = 24;

fn check_pair(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.twice() < 0 || j.twice() > MAX_J_TWICE {
        return Err(Error::QuantumNumbers(format!("j={j} outside [0, {}]", MAX_J_TWICE / 2)));
    }
    if !j.same_parity(m) {
        return Err(Error::QuantumNumbers(format!("j={j} and m={m} have different parity")));
    }
    if m.abs() > j {
        return Err(Error::QuantumNumbers(format!("|m|={} exceeds j={j}", m.abs())));
    }
    Ok(())
}

fn factorial(n: i32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `(-1)^h` as `e^{iπh}`: real ±1 for integer `h`, ±i for half-integer `h`.
///
/// Products of such phases compose additively in the exponent, so
/// `half_phase(a) * half_phase(b) == half_phase(a + b)` for all half-integers.
pub fn half_phase(h: HalfInt) -> Complex64 {
    match h.twice().rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Jacobi-polynomial expression for the small d-function, evaluated where
/// `mp >= |m|` so that both Jacobi parameters are non-negative.
fn jacobi_form(j: HalfInt, mp: HalfInt, m: HalfInt, beta: f64) -> f64 {
    let jpm = (j + mp).twice() / 2;
    let jmm_p = (j - mp).twice() / 2;
    let jm = (j + m).twice() / 2;
    let jmm = (j - m).twice() / 2;
    let pref = (factorial(jpm) * factorial(jmm_p) / (factorial(jm) * factorial(jmm))).sqrt();
    let a = (mp - m).twice() / 2;
    let b = (mp + m).twice() / 2;
    let (s, c) = (0.5 * beta).sin_cos();
    pref * c.powi(b) * s.powi(a) * jacobi_poly(jmm_p as usize, a as f64, b as f64, beta.cos())
}

/// Wigner small-d function `d^j_{m'm}(β) = ⟨j m'| e^{-iβ J_y} |j m⟩`.
///
/// The Jacobi-polynomial closed form is evaluated in the sector `m' >= |m|`
/// and mapped to the other sectors with `d_{m'm} = (-1)^{m'-m} d_{mm'}` and
/// `d_{m'm} = d_{-m,-m'}`. In that sector the closed form carries an extra
/// `(-1)^{m'-m}` relative to the matrix element of `e^{-iβJ_y}`.
pub fn wigner_small_d(j: HalfInt, mp: HalfInt, m: HalfInt, beta: f64) -> Result<f64> {
    check_pair(j, mp)?;
    check_pair(j, m)?;
    Ok(small_d_unchecked(j, mp, m, beta))
}

fn small_d_unchecked(j: HalfInt, mp: HalfInt, m: HalfInt, beta: f64) -> f64 {
    let sign = |h: HalfInt| if (h.twice() / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let canonical = |mp: HalfInt, m: HalfInt| sign(mp - m) * jacobi_form(j, mp, m, beta);
    if mp >= m.abs() {
        canonical(mp, m)
    } else if m >= mp.abs() {
        sign(mp - m) * canonical(m, mp)
    } else if -mp >= m.abs() {
        sign(mp - m) * canonical(-mp, -m)
    } else {
        canonical(-m, -mp)
    }
}

/// Full `(2j+1)×(2j+1)` small-d matrix, rows and columns in descending `m`.
pub fn wigner_d_matrix(j: HalfInt, beta: f64) -> Result<DMatrix<f64>> {
    check_pair(j, j)?;
    let n = j.multiplicity();
    Ok(DMatrix::from_fn(n, n, |r, c| {
        let mp = HalfInt::from_twice(j.twice() - 2 * r as i32);
        let m = HalfInt::from_twice(j.twice() - 2 * c as i32);
        small_d_unchecked(j, mp, m, beta)
    }))
}

/// Wigner D-function in the phase convention `D^j_{m'm}(α,β,γ) =
/// e^{i m' γ} d^j_{m'm}(β) e^{i m α}`.
pub fn wigner_big_d(j: HalfInt, mp: HalfInt, m: HalfInt, alpha: f64, beta: f64, gamma: f64) -> Result<Complex64> {
    let d = wigner_small_d(j, mp, m, beta)?;
    Ok(Complex64::from_polar(d, mp.value() * gamma + m.value() * alpha))
}

/// Full D-matrix, rows `m'` and columns `m` in descending order.
pub fn wigner_big_d_matrix(j: HalfInt, alpha: f64, beta: f64, gamma: f64) -> Result<CMatrix> {
    let d = wigner_d_matrix(j, beta)?;
    let n = d.nrows();
    let mval = |k: usize| j.value() - k as f64;
    Ok(CMatrix::from_fn(n, n, |r, c| {
        Complex64::from_polar(d[(r, c)], mval(r) * gamma + mval(c) * alpha)
    }))
}
