//! Symplectic tomography of continuous variables: marginals of the
//! observable `X = μq + νp` and their inversion.

mod reconstruct;

pub use reconstruct::{
    displacement_matrix, kernel_matrix, reconstruct_density, reconstruct_density_with, sample_circle, CircleLattice, QuadratureMarginal,
    SymplecticReconstruction, DEFAULT_HERMITICITY_THRESHOLD,
};

use serde::{Deserialize, Serialize};

use crate::qstate::{fock_wavefunctions, BasisDescriptor, DensityMatrix};
use crate::{c, Complex64, Error, Result};

/// Reference frame `(μ, ν)` of one continuous mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticFrame {
    pub mu: f64,
    pub nu: f64,
}

impl SymplecticFrame {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(mu.is_finite() && nu.is_finite()) || (mu == 0.0 && nu == 0.0) {
            return Err(Error::DegenerateFrame { mu, nu, reason: "mu and nu both zero" });
        }
        Ok(Self { mu, nu })
    }

    /// `μ = r cos θ`, `ν = r sin θ`.
    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    /// Scale `σ = √(μ² + ν²)`.
    pub fn sigma(&self) -> f64 {
        self.mu.hypot(self.nu)
    }

    /// Rotation angle `θ = atan2(ν, μ)`.
    pub fn theta(&self) -> f64 {
        self.nu.atan2(self.mu)
    }
}

/// Rotation-and-scaling parameters with `μ = λ cos φ`, `ν = sin φ / λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameAngles {
    pub phi: f64,
    pub lambda: f64,
}

impl FrameAngles {
    pub fn frame(&self) -> (f64, f64) {
        (self.lambda * self.phi.cos(), self.phi.sin() / self.lambda)
    }
}

/// Eigenfunction `⟨q|x⟩⟩ = |ν|^{-1/2} exp[i(x/ν)q - (i/2)(μ/ν)q²]` of `μq + νp`.
///
/// For `ν = 0` the eigenfunction is a position delta; callers then use the
/// position density directly.
pub fn quad_eigenfunction(x: f64, frame: SymplecticFrame, q: f64) -> Result<Complex64> {
    let SymplecticFrame { mu, nu } = frame;
    if nu == 0.0 {
        return Err(Error::DegenerateFrame { mu, nu, reason: "position-basis delta" });
    }
    let phase = x / nu * q - 0.5 * mu / nu * q * q;
    Ok(Complex64::from_polar(nu.abs().powf(-0.5), phase))
}

/// Tomographic amplitudes `⟨⟨x|n⟩` for `n < levels`, up to an
/// `n`-independent phase: `σ^{-1/2} e^{-inθ} ψ_n(x/σ)`.
///
/// The common phase cancels in every marginal, and the expression is
/// continuous through `ν = 0` where it reduces to `ψ_n(x/μ)`.
pub fn fock_amplitudes(levels: usize, x: f64, frame: SymplecticFrame) -> Vec<Complex64> {
    let sigma = frame.sigma();
    let theta = frame.theta();
    let scale = sigma.powf(-0.5);
    fock_wavefunctions(levels, x / sigma)
        .into_iter()
        .enumerate()
        .map(|(n, psi)| Complex64::from_polar(scale * psi, -(n as f64) * theta))
        .collect()
}

fn fock_levels(basis: &BasisDescriptor) -> Result<usize> {
    match basis {
        BasisDescriptor::Fock { levels } => Ok(*levels),
        other => Err(Error::Basis(format!("expected a Fock basis, found {other:?}"))),
    }
}

/// `w(x, μ, ν) = ⟨⟨x|ρ|x⟩⟩` for a single-mode Fock density matrix.
pub fn marginal_1d(rho: &DensityMatrix, x: f64, frame: SymplecticFrame) -> Result<f64> {
    let levels = fock_levels(rho.basis())?;
    let amps = fock_amplitudes(levels, x, frame);
    Ok(sandwich(rho, &amps))
}

/// `Σ_{mn} a_m ρ_{mn} a_n*`, real part.
pub(crate) fn sandwich(rho: &DensityMatrix, amps: &[Complex64]) -> f64 {
    let m = rho.matrix();
    let mut acc = c(0.0, 0.0);
    for (r, ar) in amps.iter().enumerate() {
        let mut row = c(0.0, 0.0);
        for (col, ac) in amps.iter().enumerate() {
            row += m[(r, col)] * ac.conj();
        }
        acc += ar * row;
    }
    acc.re
}

/// Joint marginal of a multimode Fock density matrix, one frame per mode.
pub fn marginal_multimode(rho: &DensityMatrix, xs: &[f64], frames: &[SymplecticFrame]) -> Result<f64> {
    let factors = rho.basis().factors();
    if factors.len() != xs.len() || xs.len() != frames.len() {
        return Err(Error::Basis(format!(
            "{} modes but {} outcomes and {} frames",
            factors.len(),
            xs.len(),
            frames.len()
        )));
    }
    let mut amps = vec![c(1.0, 0.0)];
    for ((f, &x), &frame) in factors.iter().zip(xs).zip(frames) {
        let levels = fock_levels(f)?;
        let a = fock_amplitudes(levels, x, frame);
        amps = amps.iter().flat_map(|p| a.iter().map(move |q| p * q)).collect();
    }
    Ok(sandwich(rho, &amps))
}

/// Inverts `μ = λ cos φ`, `ν = sin φ / λ` with `λ > 0`.
///
/// From `μν = ½ sin 2φ` the angle is one of four branches of
/// `½ asin(2μν)`; the branch reproducing both relations is returned.
pub fn frame_angles(frame: SymplecticFrame) -> Result<FrameAngles> {
    let SymplecticFrame { mu, nu } = frame;
    let prod = 2.0 * mu * nu;
    if prod.abs() > 1.0 + 1e-15 {
        return Err(Error::UnsolvableFrame { mu, nu });
    }
    let phi0 = 0.5 * prod.clamp(-1.0, 1.0).asin();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let candidates = [phi0, half_pi - phi0, phi0 + std::f64::consts::PI, 3.0 * half_pi - phi0];
    let mut best: Option<(f64, FrameAngles)> = None;
    for phi in candidates {
        let (s, co) = phi.sin_cos();
        let lambda = if co.abs() >= s.abs() { mu / co } else { s / nu };
        if !(lambda.is_finite() && lambda > 0.0) {
            continue;
        }
        let angles = FrameAngles { phi, lambda };
        let (m, n) = angles.frame();
        let residual = (m - mu).abs().max((n - nu).abs());
        if residual < 1e-10 && best.is_none_or(|(r, _)| residual < r - 1e-15) {
            best = Some((residual, angles));
        }
    }
    best.map(|(_, a)| a).ok_or(Error::UnsolvableFrame { mu, nu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{density_from_pure, random_density, PureState};
    use crate::quadrature::UniformGrid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn fock(levels: usize, n: usize) -> DensityMatrix {
        density_from_pure(&PureState::basis_state(BasisDescriptor::fock(levels), n).unwrap())
    }

    fn frame(mu: f64, nu: f64) -> SymplecticFrame {
        SymplecticFrame::new(mu, nu).unwrap()
    }

    #[test]
    fn eigenfunction_modulus_and_equation() {
        let f = frame(0.6, -1.3);
        let x = 0.8;
        for &q in &[-2.0, 0.0, 1.5] {
            let v = quad_eigenfunction(x, f, q).unwrap();
            assert!((v.norm_sqr() - 1.0 / 1.3).abs() < 1e-14);
            // x f = μ q f - iν ∂_q f by a centred difference.
            let h = 1e-5;
            let d = (quad_eigenfunction(x, f, q + h).unwrap() - quad_eigenfunction(x, f, q - h).unwrap()) / (2.0 * h);
            let residual = x * v - (f.mu * q * v - crate::I * f.nu * d);
            assert!(residual.norm() < 1e-8, "{residual}");
        }
        assert!(matches!(
            quad_eigenfunction(x, frame(1.0, 0.0), 0.0),
            Err(Error::DegenerateFrame { .. })
        ));
    }

    #[test]
    fn eigenfunction_overlap_peaks_on_the_diagonal() {
        let f = frame(0.4, 1.0);
        let grid = UniformGrid::new(-30.0, 30.0, 6001);
        let overlap = |x: f64, xp: f64| {
            let mut acc = c(0.0, 0.0);
            for (q, w) in grid.nodes().into_iter().zip(grid.weights()) {
                acc += w * quad_eigenfunction(x, f, q).unwrap().conj() * quad_eigenfunction(xp, f, q).unwrap();
            }
            acc.norm()
        };
        let on = overlap(0.3, 0.3);
        assert!(on > 10.0 * overlap(0.3, 1.3));
        assert!(overlap(0.3, 0.8) > overlap(0.3, 1.8));
    }

    #[test]
    fn fock_zero_and_one_closed_forms() {
        let (rho0, rho1) = (fock(3, 0), fock(3, 1));
        for &(mu, nu) in &[(1.0, 0.0), (0.3, 0.9), (-1.2, 0.4), (0.0, -2.0)] {
            let f = frame(mu, nu);
            let s2 = mu * mu + nu * nu;
            for &x in &[-1.5, 0.0, 0.7, 2.4] {
                let g = (-x * x / s2).exp();
                let w0 = g / (PI * s2).sqrt();
                let w1 = 2.0 * x * x * g / (PI * s2 * s2 * s2).sqrt();
                assert!((marginal_1d(&rho0, x, f).unwrap() - w0).abs() < 1e-14);
                assert!((marginal_1d(&rho1, x, f).unwrap() - w1).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn near_position_frame_tends_to_position_density() {
        let rho0 = fock(2, 0);
        for &x in &[-1.0, 0.2, 1.1] {
            let got = marginal_1d(&rho0, x, frame(1.0, 1e-3)).unwrap();
            let want = (-x * x).exp() / PI.sqrt();
            assert!((got - want).abs() < 1e-5);
        }
    }

    #[test]
    fn multimode_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_density(BasisDescriptor::fock(3), &mut rng).unwrap();
        let b = random_density(BasisDescriptor::fock(2), &mut rng).unwrap();
        let ab = crate::qstate::tensor_product(&a, &b).unwrap();
        let frames = [frame(0.7, -0.4), frame(1.1, 0.9)];
        let xs = [0.4, -0.9];
        let joint = marginal_multimode(&ab, &xs, &frames).unwrap();
        let product = marginal_1d(&a, xs[0], frames[0]).unwrap() * marginal_1d(&b, xs[1], frames[1]).unwrap();
        assert!((joint - product).abs() < 1e-14);
        assert!(marginal_multimode(&ab, &xs[..1], &frames[..1]).is_err());
    }

    #[test]
    fn frame_angles_examples() {
        let a = frame_angles(frame(1.0, 0.0)).unwrap();
        assert!(a.phi.abs() < 1e-15 && (a.lambda - 1.0).abs() < 1e-15);
        let a = frame_angles(frame(0.0, 1.0)).unwrap();
        assert!((a.phi - PI / 2.0).abs() < 1e-12 && (a.lambda - 1.0).abs() < 1e-12);
        let a = frame_angles(frame(0.6, 0.5)).unwrap();
        let (m, n) = a.frame();
        assert!((m - 0.6).abs() < 1e-10 && (n - 0.5).abs() < 1e-10);
        assert!(matches!(frame_angles(frame(1.0, 1.0)), Err(Error::UnsolvableFrame { .. })));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let mu: f64 = rng.gen_range(-2.0..2.0);
            let nu: f64 = rng.gen_range(-2.0..2.0);
            if (mu * nu).abs() > 0.5 {
                continue;
            }
            let a = frame_angles(frame(mu, nu)).unwrap();
            let (m, n) = a.frame();
            assert!(a.lambda > 0.0);
            assert!((m - mu).abs() < 1e-10 && (n - nu).abs() < 1e-10, "({mu},{nu}) -> {a:?}");
        }
    }
}
