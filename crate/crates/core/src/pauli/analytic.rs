//! Closed-form hybrid marginals of the two entangled examples.

use crate::landau::{fock_marginal_components, TwoModeFrame};
use crate::qstate::{density_from_pure, landau_fock_state, BasisDescriptor, DensityMatrix, PureState};
use crate::specfun::HalfInt;
use crate::spintomo::EulerFrame;
use crate::symtomo::SymplecticFrame;
use crate::{Complex64, Result};

use super::marginal::spin_row;

/// Energy gap between `|1⟩⊗|½⟩` and `|0⟩⊗|-½⟩` for the trapped electron.
pub const TRAPPED_RATE: f64 = 3.0;

/// Energy gap between the Landau states `Ψ_10 ⊗ |½⟩` and `Ψ_00 ⊗ |-½⟩`.
pub const LANDAU_RATE: f64 = 4.0;

/// The rate `3` often quoted for the Landau example by analogy with the
/// trapped electron; it does not match the spectrum (see `LANDAU_RATE`).
pub const LANDAU_PRINTED_RATE: f64 = 3.0;

/// `(|0⟩⊗|-½⟩ + |1⟩⊗|½⟩)/√2` with the oscillator truncated at `levels`.
pub fn trapped_initial_state(levels: usize) -> Result<DensityMatrix> {
    let basis = BasisDescriptor::product(vec![BasisDescriptor::fock(levels.max(2)), BasisDescriptor::spin_half()]);
    let mut v = crate::CVector::zeros(basis.dim());
    v[1] = Complex64::new(1.0, 0.0);
    v[2] = Complex64::new(1.0, 0.0);
    Ok(density_from_pure(&PureState::normalized(basis, v)?))
}

/// `(Ψ_00⊗|-½⟩ + Ψ_10⊗|½⟩)/√2` with each mode truncated at `levels`.
pub fn landau_initial_state(levels: usize) -> Result<DensityMatrix> {
    let down = PureState::basis_state(BasisDescriptor::spin_half(), 1)?;
    let up = PureState::basis_state(BasisDescriptor::spin_half(), 0)?;
    let a = landau_fock_state(0, 0, levels)?.tensor(&down)?;
    let b = landau_fock_state(1, 0, levels)?.tensor(&up)?;
    Ok(density_from_pure(&PureState::normalized(a.basis().clone(), a.amplitudes() + b.amplitudes())?))
}

/// `(D_{s,½}, D_{s,-½})`.
fn spin_factors(s: HalfInt, spin: EulerFrame) -> Result<(Complex64, Complex64)> {
    let [up, down] = spin_row(s, spin)?;
    Ok((up, down))
}

/// Hybrid marginal at time `t` of `(|0⟩⊗|-½⟩ + |1⟩⊗|½⟩)/√2` evolving under
/// the trapped-electron Hamiltonian.
pub fn analytic_trapped_solution(x: f64, frame: SymplecticFrame, s: HalfInt, spin: EulerFrame, t: f64) -> Result<f64> {
    let (up, down) = spin_factors(s, spin)?;
    let s2 = frame.mu * frame.mu + frame.nu * frame.nu;
    let gauss = (-x * x / s2).exp() / (std::f64::consts::PI * s2).sqrt();
    let w00 = gauss * down.norm_sqr();
    let w11 = 2.0 * x * x / s2 * gauss * up.norm_sqr();
    let spatial = Complex64::new(frame.mu, frame.nu) * (std::f64::consts::SQRT_2 * x / s2) * gauss;
    let w01 = spatial * down * up.conj() * Complex64::from_polar(1.0, TRAPPED_RATE * t);
    Ok(0.5 * (w00 + w11) + w01.re)
}

/// Hybrid marginal at time `t` of `(Ψ_00⊗|-½⟩ + Ψ_10⊗|½⟩)/√2` in the
/// Landau problem.
pub fn analytic_landau_solution(x1: f64, x2: f64, frame: TwoModeFrame, s: HalfInt, spin: EulerFrame, t: f64) -> Result<f64> {
    analytic_landau_solution_with_rate(x1, x2, frame, s, spin, t, LANDAU_RATE)
}

/// As `analytic_landau_solution` with the cross-term phase rate supplied.
pub fn analytic_landau_solution_with_rate(
    x1: f64,
    x2: f64,
    frame: TwoModeFrame,
    s: HalfInt,
    spin: EulerFrame,
    t: f64,
    rate: f64,
) -> Result<f64> {
    let (up, down) = spin_factors(s, spin)?;
    let w0000 = fock_marginal_components([0, 0, 0, 0], x1, x2, frame)?.re;
    let w1010 = fock_marginal_components([1, 1, 0, 0], x1, x2, frame)?.re;
    let cross = fock_marginal_components([0, 1, 0, 0], x1, x2, frame)?;
    let w01 = cross * down * up.conj() * Complex64::from_polar(1.0, rate * t);
    Ok(0.5 * (w0000 * down.norm_sqr() + w1010 * up.norm_sqr()) + w01.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::propagate::vonneumann_evolve;
    use crate::pauli::{hybrid_marginal, HamiltonianSpec, HybridPoint};

    #[test]
    fn trapped_matches_oracle() {
        let rho = trapped_initial_state(16).unwrap();
        let evolved = vonneumann_evolve(&rho, &HamiltonianSpec::Trapped, 0.5, 1e-8).unwrap();
        for &(x, mu, nu) in &[(0.3, 0.7, 0.9), (-1.2, 1.1, -0.4), (0.8, 0.0, 1.0)] {
            let frame = SymplecticFrame::new(mu, nu).unwrap();
            for s in [HalfInt::HALF, -HalfInt::HALF] {
                let spin = EulerFrame::new(0.4, 1.3, 0.0);
                let p = HybridPoint::single(x, frame, s, spin).unwrap();
                let want = hybrid_marginal(&evolved.rho_t, &p).unwrap();
                let got = analytic_trapped_solution(x, frame, s, spin, 0.5).unwrap();
                assert!((got - want).abs() < 1e-12, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn landau_matches_oracle_only_at_rate_four() {
        let rho = landau_initial_state(6).unwrap();
        let t = 0.4;
        let evolved = vonneumann_evolve(&rho, &HamiltonianSpec::Landau, t, 1e-8).unwrap();
        let frame = TwoModeFrame::new(0.6, 0.8, -0.3, 1.1).unwrap();
        let spin = EulerFrame::new(1.0, 0.9, 0.0);
        let (x1, x2) = (0.4, -0.3);
        let p = HybridPoint::new(vec![x1, x2], frame.modes().to_vec(), HalfInt::HALF, spin).unwrap();
        let want = hybrid_marginal(&evolved.rho_t, &p).unwrap();
        let got = analytic_landau_solution(x1, x2, frame, HalfInt::HALF, spin, t).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        let printed = analytic_landau_solution_with_rate(x1, x2, frame, HalfInt::HALF, spin, t, LANDAU_PRINTED_RATE).unwrap();
        assert!((printed - want).abs() > 1e-3);
    }
}
