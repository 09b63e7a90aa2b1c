use serde::{Deserialize, Serialize};

use crate::qstate::{BasisDescriptor, DensityMatrix};
use crate::specfun::{wigner_big_d_matrix, HalfInt};
use crate::spintomo::EulerFrame;
use crate::symtomo::{fock_amplitudes, sandwich, SymplecticFrame};
use crate::{c, Complex64, Error, Result};

/// One outcome of the hybrid measurement: a quadrature value per mode in
/// its own frame, and a spin projection `s` along the axis `(α, β)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridPoint {
    pub xs: Vec<f64>,
    pub frames: Vec<SymplecticFrame>,
    pub s: HalfInt,
    pub spin: EulerFrame,
}

impl HybridPoint {
    pub fn new(xs: Vec<f64>, frames: Vec<SymplecticFrame>, s: HalfInt, spin: EulerFrame) -> Result<Self> {
        if xs.len() != frames.len() {
            return Err(Error::Lattice(format!("{} outcomes for {} frames", xs.len(), frames.len())));
        }
        if s.abs() != HalfInt::HALF {
            return Err(Error::QuantumNumbers(format!("spin projection {s} is not ±1/2")));
        }
        Ok(Self { xs, frames, s, spin })
    }

    pub fn single(x: f64, frame: SymplecticFrame, s: HalfInt, spin: EulerFrame) -> Result<Self> {
        Self::new(vec![x], vec![frame], s, spin)
    }
}

/// Fock cutoffs of a hybrid basis and whether a trailing spin-½ is present.
pub(crate) fn hybrid_layout(basis: &BasisDescriptor) -> Result<(Vec<usize>, bool)> {
    let factors = basis.factors();
    let mut modes = Vec::new();
    let mut spin = false;
    for (k, f) in factors.iter().enumerate() {
        match f {
            BasisDescriptor::Fock { levels } => modes.push(*levels),
            BasisDescriptor::Spin { j } if *j == HalfInt::HALF && k + 1 == factors.len() => spin = true,
            other => {
                return Err(Error::Basis(format!(
                    "hybrid states are Fock modes followed by an optional spin-1/2, found {other:?}"
                )))
            }
        }
    }
    Ok((modes, spin))
}

/// Row `s` of `D^{(1/2)}(α, β, γ)`.
pub(crate) fn spin_row(s: HalfInt, spin: EulerFrame) -> Result<[Complex64; 2]> {
    let d = wigner_big_d_matrix(HalfInt::HALF, spin.alpha, spin.beta, spin.gamma)?;
    let r = HalfInt::HALF.index_of(s);
    Ok([d[(r, 0)], d[(r, 1)]])
}

/// Amplitudes `⟨⟨x⃗, s|n⃗, m⟩` over the full hybrid basis.
pub(crate) fn hybrid_amplitudes(modes: &[usize], spin: bool, p: &HybridPoint) -> Result<Vec<Complex64>> {
    if p.xs.len() != modes.len() {
        return Err(Error::Basis(format!("{} modes but {} outcomes", modes.len(), p.xs.len())));
    }
    let mut amps = vec![c(1.0, 0.0)];
    for ((&levels, &x), &frame) in modes.iter().zip(&p.xs).zip(&p.frames) {
        let a = fock_amplitudes(levels, x, frame);
        amps = amps.iter().flat_map(|u| a.iter().map(move |v| u * v)).collect();
    }
    if spin {
        let row = spin_row(p.s, p.spin)?;
        amps = amps.iter().flat_map(|u| row.iter().map(move |v| u * v)).collect();
    }
    Ok(amps)
}

/// Hybrid marginal `w(x⃗, μ⃗, ν⃗, s, α, β)` of a state on Fock modes with an
/// optional trailing spin-½. Without a spin factor `s` and the axis are
/// ignored.
pub fn hybrid_marginal(rho: &DensityMatrix, p: &HybridPoint) -> Result<f64> {
    let (modes, spin) = hybrid_layout(rho.basis())?;
    let amps = hybrid_amplitudes(&modes, spin, p)?;
    Ok(sandwich(rho, &amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{density_from_pure, tensor_product, PureState};
    use crate::spintomo::spin_marginal;
    use crate::symtomo::marginal_1d;

    #[test]
    fn product_state_factorizes() {
        let fock = density_from_pure(&PureState::normalized(BasisDescriptor::fock(3), nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.3, 0.2), c(0.0, -0.5)])).unwrap());
        let spin = density_from_pure(&PureState::normalized(BasisDescriptor::spin_half(), nalgebra::DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)])).unwrap());
        let rho = tensor_product(&fock, &spin).unwrap();
        let frame = SymplecticFrame::new(0.8, -0.4).unwrap();
        let axis = EulerFrame::new(0.3, 1.1, 0.0);
        for s in [HalfInt::HALF, -HalfInt::HALF] {
            let p = HybridPoint::single(0.37, frame, s, axis).unwrap();
            let want = marginal_1d(&fock, 0.37, frame).unwrap() * spin_marginal(&spin, s, axis).unwrap();
            assert!((hybrid_marginal(&rho, &p).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn spin_must_be_last() {
        let basis = BasisDescriptor::product(vec![BasisDescriptor::spin_half(), BasisDescriptor::fock(2)]);
        assert!(hybrid_layout(&basis).is_err());
    }
}
