//! Marginals by literal numerical integration of the chirp transform
//! `w(x, μ, ν) = |∫ exp(iμy²/(2ν) - ixy/ν) ψ(y) dy|² / (2π|ν|)`.
//!
//! Hermite functions are generated here from the unnormalized physicists'
//! recurrence rather than shared with the state module.

use crate::quadrature::UniformGrid;
use crate::{CMatrix, Complex64, Error, Result};

/// Relative error tolerated between the full and the half-resolution
/// trapezoid sums before a quadrature is declared unconverged.
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// Oscillator eigenfunctions `ψ_0..ψ_{levels-1}` at `y` via `H_n` and an
/// explicit `√(2ⁿ n! √π)` normalization, accumulated in log space.
pub fn hermite_functions(levels: usize, y: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(levels);
    for n in 0..levels {
        let v = match n {
            0 => 1.0,
            1 => 2.0 * y,
            _ => 2.0 * y * h[n - 1] - 2.0 * (n - 1) as f64 * h[n - 2],
        };
        h.push(v);
    }
    let gauss = (-0.5 * y * y).exp();
    let mut log_norm = 0.25 * std::f64::consts::PI.ln();
    h.iter()
        .enumerate()
        .map(|(n, hv)| {
            if n > 0 {
                log_norm += 0.5 * (2.0 * n as f64).ln();
            }
            hv * gauss * (-log_norm).exp()
        })
        .collect()
}

/// Chirp kernel `exp(iμy²/(2ν) - ixy/ν)` times trapezoid weights.
fn chirp(grid: &UniformGrid, x: f64, mu: f64, nu: f64, stride: usize) -> Vec<(usize, Complex64)> {
    let nodes = grid.nodes();
    let h = grid.step() * stride as f64;
    let last = (nodes.len() - 1) / stride * stride;
    (0..nodes.len())
        .step_by(stride)
        .map(|i| {
            let y = nodes[i];
            let w = if i == 0 || i == last { 0.5 * h } else { h };
            (i, Complex64::from_polar(w, mu * y * y / (2.0 * nu) - x * y / nu))
        })
        .collect()
}

fn check(fine: f64, coarse: f64) -> Result<f64> {
    let estimate = (fine - coarse).abs();
    if estimate > CONVERGENCE_TOL * fine.abs().max(1.0) {
        return Err(Error::Quadrature { estimate });
    }
    Ok(fine)
}

/// Single-mode marginal of samples `psi[i] = ψ(y_i)` on `grid`.
///
/// For `ν = 0` the position density `|ψ(x/μ)|²/|μ|` is interpolated
/// linearly from the samples.
pub fn chirp_marginal_1d(psi: &[Complex64], grid: &UniformGrid, x: f64, mu: f64, nu: f64) -> Result<f64> {
    if psi.len() != grid.points || grid.points < 3 {
        return Err(Error::Lattice("wavefunction samples do not match the grid".into()));
    }
    if nu == 0.0 {
        if mu == 0.0 {
            return Err(Error::DegenerateFrame { mu, nu, reason: "mu and nu both zero" });
        }
        let y = x / mu;
        let pos = (y - grid.start) / grid.step();
        if pos < 0.0 || pos > (grid.points - 1) as f64 {
            return Ok(0.0);
        }
        let i = (pos.floor() as usize).min(grid.points - 2);
        let t = pos - i as f64;
        let v = psi[i].norm_sqr() * (1.0 - t) + psi[i + 1].norm_sqr() * t;
        return Ok(v / mu.abs());
    }
    let eval = |stride: usize| {
        let amp: Complex64 = chirp(grid, x, mu, nu, stride).into_iter().map(|(i, k)| k * psi[i]).sum();
        amp.norm_sqr() / (2.0 * std::f64::consts::PI * nu.abs())
    };
    check(eval(1), eval(2))
}

/// Two-mode marginal of samples `psi[(i, k)] = Ψ(y_i, y_k)` on `grid × grid`.
pub fn chirp_marginal_2d(psi: &CMatrix, grid: &UniformGrid, xs: [f64; 2], frames: [(f64, f64); 2]) -> Result<f64> {
    if psi.nrows() != grid.points || psi.ncols() != grid.points || grid.points < 3 {
        return Err(Error::Lattice("wavefunction samples do not match the grid".into()));
    }
    for &(mu, nu) in &frames {
        if nu == 0.0 {
            return Err(Error::DegenerateFrame { mu, nu, reason: "two-mode chirp integral needs nu != 0" });
        }
    }
    let eval = |stride: usize| {
        let k1 = chirp(grid, xs[0], frames[0].0, frames[0].1, stride);
        let k2 = chirp(grid, xs[1], frames[1].0, frames[1].1, stride);
        let mut amp = Complex64::new(0.0, 0.0);
        for &(i, a) in &k1 {
            let mut row = Complex64::new(0.0, 0.0);
            for &(k, b) in &k2 {
                row += b * psi[(i, k)];
            }
            amp += a * row;
        }
        amp.norm_sqr() / (4.0 * std::f64::consts::PI.powi(2) * (frames[0].1 * frames[1].1).abs())
    };
    check(eval(1), eval(2))
}

/// Single-mode marginal of a Fock density matrix by chirp quadrature of
/// each number state, `Σ_mn ρ_mn a_m a_n*`.
pub fn direct_marginal_fock(rho: &CMatrix, grid: &UniformGrid, x: f64, mu: f64, nu: f64) -> Result<f64> {
    let levels = rho.nrows();
    let table: Vec<Vec<f64>> = grid.nodes().iter().map(|&y| hermite_functions(levels, y)).collect();
    if nu == 0.0 {
        // Position density Σ ρ_mn ψ_m ψ_n at y = x/μ.
        let f = hermite_functions(levels, x / mu);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..levels {
            for n in 0..levels {
                acc += rho[(m, n)] * f[m] * f[n];
            }
        }
        return Ok(acc.re / mu.abs());
    }
    let amps = |stride: usize| -> Vec<Complex64> {
        let k = chirp(grid, x, mu, nu, stride);
        (0..levels)
            .map(|n| k.iter().map(|&(i, c)| c * table[i][n]).sum())
            .collect()
    };
    let value = |a: &[Complex64]| {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..levels {
            for n in 0..levels {
                acc += rho[(m, n)] * a[m] * a[n].conj();
            }
        }
        acc.re / (2.0 * std::f64::consts::PI * nu.abs())
    };
    check(value(&amps(1)), value(&amps(2)))
}
