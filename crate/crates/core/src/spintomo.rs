//! Spin tomography: marginals of the spin projection along rotated axes and
//! their inversion by sphere quadrature.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::qstate::{BasisDescriptor, DensityMatrix};
use crate::quadrature::SphereGrid;
use crate::specfun::{half_phase, wigner_3j, wigner_big_d_matrix, wigner_small_d, HalfInt};
use crate::{c, CMatrix, Complex64, Error, Result};

/// Largest `2j` accepted by the spin tomography entry points.
pub const MAX_SPIN_TWICE: i32 = 4;

/// Reconstructions whose Hermiticity defect exceeds this are rejected.
pub const DEFAULT_HERMITICITY_THRESHOLD: f64 = 1e-8;

/// Euler angles of a rotated quantization axis. `gamma` never affects a
/// marginal but is carried so that frames compose.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerFrame {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
}

impl EulerFrame {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn direction(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta, gamma: 0.0 }
    }
}

fn check_spin(j: HalfInt) -> Result<()> {
    if j.twice() < 0 || j.twice() > MAX_SPIN_TWICE {
        return Err(Error::QuantumNumbers(format!("spin j={j} outside [0, {}]", MAX_SPIN_TWICE / 2)));
    }
    Ok(())
}

fn spin_of(rho: &DensityMatrix) -> Result<HalfInt> {
    match rho.basis() {
        BasisDescriptor::Spin { j } => Ok(*j),
        other => Err(Error::Basis(format!("expected a spin basis, found {other:?}"))),
    }
}

fn index_of(j: HalfInt, m: HalfInt) -> Result<usize> {
    if m.abs() > j || !j.same_parity(m) {
        return Err(Error::QuantumNumbers(format!("projection {m} invalid for j={j}")));
    }
    Ok(j.index_of(m))
}

/// All marginals `w(s, α, β)` at one frame, `s` descending from `j`.
pub fn spin_marginals_at(rho: &DensityMatrix, frame: EulerFrame) -> Result<Vec<f64>> {
    let j = spin_of(rho)?;
    let d = wigner_big_d_matrix(j, frame.alpha, frame.beta, frame.gamma)?;
    let m = rho.matrix();
    Ok((0..d.nrows())
        .map(|s| {
            let mut acc = c(0.0, 0.0);
            for a in 0..d.ncols() {
                for b in 0..d.ncols() {
                    acc += d[(s, a)] * m[(a, b)] * d[(s, b)].conj();
                }
            }
            acc.re
        })
        .collect())
}

/// `w(s, α, β) = Σ_{m1 m2} D_{s m1} ρ_{m1 m2} D*_{s m2}`.
pub fn spin_marginal(rho: &DensityMatrix, s: HalfInt, frame: EulerFrame) -> Result<f64> {
    let j = spin_of(rho)?;
    let k = index_of(j, s)?;
    Ok(spin_marginals_at(rho, frame)?[k])
}

/// `Φ(m1, m2) = (-1)^{m2} Σ_{m3} D^{j3}_{0 m3}(α, β, 0) W^{j j j3}_{m1, -m2, m3}`.
pub fn phi_function(j: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, frame: EulerFrame) -> Result<Complex64> {
    index_of(j, m1)?;
    index_of(j, m2)?;
    if !j3.is_integer() || j3.twice() < 0 || j3 > j + j {
        return Err(Error::QuantumNumbers(format!("j3={j3} outside 0..=2j for j={j}")));
    }
    Ok(phi_unchecked(j, j3, m1, m2, frame.alpha, frame.beta))
}

fn phi_unchecked(j: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, alpha: f64, beta: f64) -> Complex64 {
    // Only m3 = m2 - m1 survives the 3j selection rule.
    let m3 = m2 - m1;
    if m3.abs() > j3 {
        return c(0.0, 0.0);
    }
    let w = wigner_3j(j, j, j3, m1, -m2, m3);
    if w == 0.0 {
        return c(0.0, 0.0);
    }
    let d = wigner_small_d(j3, HalfInt::ZERO, m3, beta).expect("validated quantum numbers");
    half_phase(m2) * Complex64::from_polar(d * w, m3.value() * alpha)
}

/// `A^{(j3)}(α, β)` with entries `(2j3+1)² Φ(m1, m2)`, rows and columns in
/// descending `m`.
fn a_operator(j: HalfInt, j3: HalfInt, alpha: f64, beta: f64) -> CMatrix {
    let n = j.multiplicity();
    let weight = ((j3.twice() + 1) as f64).powi(2);
    let ms: Vec<HalfInt> = j.projections().collect();
    CMatrix::from_fn(n, n, |r, col| phi_unchecked(j, j3, ms[r], ms[col], alpha, beta) * weight)
}

/// Reconstruction kernel `K^{(j)}(s, α, β) = (-1)^{-s} Σ_{j3} W^{j j j3}_{s,-s,0} A^{(j3)}(α, β)`.
///
/// The phase is `e^{-iπs}`; with `e^{+iπs}` every half-integer
/// reconstruction comes out as `-ρ`.
pub fn kernel_k_spin(j: HalfInt, s: HalfInt, frame: EulerFrame) -> Result<CMatrix> {
    check_spin(j)?;
    index_of(j, s)?;
    let n = j.multiplicity();
    let mut k = CMatrix::zeros(n, n);
    for j3 in 0..=j.twice() {
        let j3 = HalfInt::from_int(j3);
        let w = wigner_3j(j, j, j3, s, -s, HalfInt::ZERO);
        if w != 0.0 {
            k += a_operator(j, j3, frame.alpha, frame.beta) * c(w, 0.0);
        }
    }
    Ok(k * half_phase(-s))
}

/// Spin marginal sampled on a sphere quadrature, all projections `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinMarginal {
    pub j: HalfInt,
    pub n_alpha: usize,
    pub n_beta: usize,
    /// `values[(k_s * n_alpha + ia) * n_beta + ib]` with `k_s = j - s`.
    pub values: Vec<f64>,
}

impl SpinMarginal {
    pub fn new(j: HalfInt, n_alpha: usize, n_beta: usize, values: Vec<f64>) -> Result<Self> {
        check_spin(j)?;
        if n_alpha == 0 || n_beta == 0 {
            return Err(Error::Lattice("sphere grid needs at least one node per angle".into()));
        }
        if values.len() != j.multiplicity() * n_alpha * n_beta {
            return Err(Error::Lattice(format!(
                "{} values for j={j} on a {n_alpha}x{n_beta} sphere grid",
                values.len()
            )));
        }
        Ok(Self { j, n_alpha, n_beta, values })
    }

    /// Forward map on the product quadrature.
    pub fn sample(rho: &DensityMatrix, grid: &SphereGrid) -> Result<Self> {
        let j = spin_of(rho)?;
        check_spin(j)?;
        let (na, nb) = (grid.n_alpha(), grid.n_beta());
        let per_node: Vec<Vec<f64>> = (0..na * nb)
            .into_par_iter()
            .map(|idx| spin_marginals_at(rho, EulerFrame::direction(grid.alphas[idx / nb], grid.betas[idx % nb])))
            .collect::<Result<_>>()?;
        let n = j.multiplicity();
        let mut values = vec![0.0; n * na * nb];
        for (idx, ws) in per_node.iter().enumerate() {
            for (k, w) in ws.iter().enumerate() {
                values[k * na * nb + idx] = *w;
            }
        }
        Self::new(j, na, nb, values)
    }

    /// A marginal that is the same for every `s` and direction.
    pub fn uniform(j: HalfInt, grid: &SphereGrid) -> Result<Self> {
        let n = j.multiplicity();
        Self::new(j, grid.n_alpha(), grid.n_beta(), vec![1.0 / n as f64; n * grid.len()])
    }

    pub fn grid(&self) -> SphereGrid {
        SphereGrid::new(self.n_alpha, self.n_beta)
    }

    #[inline]
    pub fn get(&self, k_s: usize, ia: usize, ib: usize) -> f64 {
        self.values[(k_s * self.n_alpha + ia) * self.n_beta + ib]
    }

    /// Largest `|Σ_s w - 1|` over directions.
    pub fn normalization_defect(&self) -> f64 {
        let n = self.j.multiplicity();
        let mut worst: f64 = 0.0;
        for ia in 0..self.n_alpha {
            for ib in 0..self.n_beta {
                let total: f64 = (0..n).map(|k| self.get(k, ia, ib)).sum();
                worst = worst.max((total - 1.0).abs());
            }
        }
        worst
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Reconstructed spin density matrix with its Hermiticity defect.
#[derive(Clone, Debug)]
pub struct SpinReconstruction {
    pub rho: DensityMatrix,
    pub hermiticity_defect: f64,
}

/// `ρ = Σ_s ∫ dΩ/(8π²) w(s, α, β) K^{(j)}(s, α, β)` on the marginal's grid.
pub fn reconstruct_spin_density(w: &SpinMarginal) -> Result<SpinReconstruction> {
    reconstruct_spin_density_with(w, DEFAULT_HERMITICITY_THRESHOLD)
}

pub fn reconstruct_spin_density_with(w: &SpinMarginal, threshold: f64) -> Result<SpinReconstruction> {
    let j = w.j;
    check_spin(j)?;
    let grid = w.grid();
    let n = j.multiplicity();
    let ss: Vec<HalfInt> = j.projections().collect();
    // W^{j j j3}_{s,-s,0} e^{-iπs}, per (s, j3).
    let coupling: Vec<Vec<Complex64>> = ss
        .iter()
        .map(|&s| {
            (0..=j.twice())
                .map(|j3| half_phase(-s) * wigner_3j(j, j, HalfInt::from_int(j3), s, -s, HalfInt::ZERO))
                .collect()
        })
        .collect();

    let partial: Vec<CMatrix> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (ia, ib) = (idx / grid.n_beta(), idx % grid.n_beta());
            let (alpha, beta) = (grid.alphas[ia], grid.betas[ib]);
            let gw = grid.group_weight(ia, ib);
            let mut acc = CMatrix::zeros(n, n);
            for j3 in 0..=j.twice() {
                let mut scale = c(0.0, 0.0);
                for (k, coup) in coupling.iter().enumerate() {
                    scale += coup[j3 as usize] * w.get(k, ia, ib);
                }
                if scale.norm() != 0.0 {
                    acc += a_operator(j, HalfInt::from_int(j3), alpha, beta) * (scale * gw);
                }
            }
            acc
        })
        .collect();
    // Fixed summation order keeps the result bit-stable across thread counts.
    let rho = partial.into_iter().fold(CMatrix::zeros(n, n), |acc, m| acc + m);
    let hermiticity_defect = crate::max_abs(&(&rho - rho.adjoint()));
    if hermiticity_defect > threshold {
        return Err(Error::Reconstruction { defect: hermiticity_defect, threshold });
    }
    Ok(SpinReconstruction {
        rho: DensityMatrix::new_unchecked(BasisDescriptor::spin(j), rho)?,
        hermiticity_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::rotation::rotation_oracle;
    use crate::qstate::{density_from_pure, random_density, PureState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn spin_up() -> DensityMatrix {
        density_from_pure(&PureState::basis_state(BasisDescriptor::spin_half(), 0).unwrap())
    }

    #[test]
    fn spin_up_marginals() {
        let rho = spin_up();
        for k in 0..32 {
            let beta = PI * k as f64 / 31.0;
            let f = EulerFrame::new(0.37, beta, -1.1);
            let up = spin_marginal(&rho, h(1), f).unwrap();
            let down = spin_marginal(&rho, h(-1), f).unwrap();
            assert!((up - (0.5 * beta).cos().powi(2)).abs() < 1e-15);
            assert!((down - (0.5 * beta).sin().powi(2)).abs() < 1e-15);
        }
        assert!(spin_marginal(&rho, h(3), EulerFrame::direction(0.0, 0.0)).is_err());
    }

    #[test]
    fn maximally_mixed_is_isotropic() {
        let rho = DensityMatrix::maximally_mixed(BasisDescriptor::spin(h(3))).unwrap();
        for w in spin_marginals_at(&rho, EulerFrame::new(1.2, 0.4, 2.0)).unwrap() {
            assert!((w - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn random_spin_one_matches_rotated_basis_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_density(BasisDescriptor::spin(h(2)), &mut rng).unwrap();
        let f = EulerFrame::new(0.9, 1.3, 0.0);
        let u = rotation_oracle(h(2), f.alpha, f.beta, f.gamma);
        let rotated = &u * rho.matrix() * u.adjoint();
        let got = spin_marginals_at(&rho, f).unwrap();
        for (k, w) in got.iter().enumerate() {
            assert!((w - rotated[(k, k)].re).abs() < 1e-13);
        }
    }

    #[test]
    fn gamma_does_not_enter_marginals() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_density(BasisDescriptor::spin(h(3)), &mut rng).unwrap();
        let a = spin_marginals_at(&rho, EulerFrame::new(0.5, 2.0, 0.0)).unwrap();
        let b = spin_marginals_at(&rho, EulerFrame::new(0.5, 2.0, 1.7)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn phi_reduces_for_scalar_coupling() {
        let f = EulerFrame::direction(0.3, 1.1);
        for jt in [1, 2, 3] {
            let j = h(jt);
            for m in j.projections() {
                let got = phi_function(j, HalfInt::ZERO, m, m, f).unwrap();
                let want = half_phase(m) * wigner_3j(j, j, HalfInt::ZERO, m, -m, HalfInt::ZERO);
                assert!((got - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn phi_spin_half_three_term_sum() {
        let (alpha, beta) = (0.8, 2.1);
        let f = EulerFrame::direction(alpha, beta);
        let got = phi_function(h(1), h(2), h(1), h(-1), f).unwrap();
        let mut want = c(0.0, 0.0);
        for m3 in [-2, 0, 2] {
            let d0 = crate::oracle::rotation::rotation_oracle(h(2), alpha, beta, 0.0);
            // Row m' = 0 is index 1; column m3 is index (2 - m3)/2.
            let dval = d0[(1, ((2 - m3) / 2) as usize)];
            want += dval * wigner_3j(h(1), h(1), h(2), h(1), h(1), h(m3));
        }
        want *= half_phase(h(-1));
        assert!((got - want).norm() < 1e-14, "{got} vs {want}");
    }

    #[test]
    fn kernel_completeness() {
        for jt in 1..=4 {
            let j = h(jt);
            let grid = SphereGrid::default();
            let n = j.multiplicity();
            let mut total = CMatrix::zeros(n, n);
            for (ia, &a) in grid.alphas.iter().enumerate() {
                for (ib, &b) in grid.betas.iter().enumerate() {
                    for s in j.projections() {
                        total += kernel_k_spin(j, s, EulerFrame::direction(a, b)).unwrap() * c(grid.group_weight(ia, ib), 0.0);
                    }
                }
            }
            let want = CMatrix::identity(n, n);
            assert!(crate::max_abs(&(total - want)) < 1e-12, "j={j}");
        }
    }

    #[test]
    fn spin_half_kernel_is_first_harmonic() {
        // Projecting K onto e^{2iα} must vanish.
        let n_alpha = 16;
        for s in [h(1), h(-1)] {
            let mut acc = CMatrix::zeros(2, 2);
            for k in 0..n_alpha {
                let a = 2.0 * PI * k as f64 / n_alpha as f64;
                acc += kernel_k_spin(h(1), s, EulerFrame::direction(a, 0.9)).unwrap() * Complex64::from_polar(1.0, -2.0 * a);
            }
            assert!(crate::max_abs(&acc) < 1e-12);
        }
    }

    #[test]
    fn spin_up_round_trip_and_uniform_marginal() {
        let grid = SphereGrid::default();
        let w = SpinMarginal::sample(&spin_up(), &grid).unwrap();
        let rec = reconstruct_spin_density(&w).unwrap();
        let want = spin_up();
        assert!(rec.rho.distance(want.matrix()) < 1e-10);

        let uni = SpinMarginal::uniform(h(1), &grid).unwrap();
        let rec = reconstruct_spin_density(&uni).unwrap();
        let half = DensityMatrix::maximally_mixed(BasisDescriptor::spin_half()).unwrap();
        assert!(rec.rho.distance(half.matrix()) < 1e-12);
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let grid = SphereGrid::default();
        for jt in 1..=4 {
            for _ in 0..3 {
                let rho = random_density(BasisDescriptor::spin(h(jt)), &mut rng).unwrap();
                let w = SpinMarginal::sample(&rho, &grid).unwrap();
                assert!(w.normalization_defect() < 1e-12);
                let rec = reconstruct_spin_density(&w).unwrap();
                assert!(rec.rho.distance(rho.matrix()) < 1e-10);
                assert!(rec.rho.report().passes());
            }
        }
        assert!(SpinMarginal::sample(
            &DensityMatrix::maximally_mixed(BasisDescriptor::spin(h(5))).unwrap(),
            &grid
        )
        .is_err());
    }

    /// Euler angles of `U_F U_G` at j = ½, read off the SU(2) matrix.
    fn compose(f: EulerFrame, g: EulerFrame) -> EulerFrame {
        let m = rotation_oracle(h(1), f.alpha, f.beta, f.gamma) * rotation_oracle(h(1), g.alpha, g.beta, g.gamma);
        let beta = 2.0 * m[(0, 1)].norm().atan2(m[(0, 0)].norm());
        let alpha = m[(0, 0)].arg() - m[(0, 1)].arg() + PI;
        let gamma = m[(0, 0)].arg() + m[(0, 1)].arg() - PI;
        EulerFrame::new(alpha, beta, gamma)
    }

    #[test]
    fn covariance_under_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for jt in [1, 2] {
            let j = h(jt);
            for _ in 0..5 {
                let rho = random_density(BasisDescriptor::spin(j), &mut rng).unwrap();
                let g = EulerFrame::new(rng.gen_range(0.0..6.0), rng.gen_range(0.2..3.0), rng.gen_range(0.0..6.0));
                let f = EulerFrame::new(rng.gen_range(0.0..6.0), rng.gen_range(0.2..3.0), 0.0);
                let r = rotation_oracle(j, g.alpha, g.beta, g.gamma);
                let rotated = DensityMatrix::new_unchecked(BasisDescriptor::spin(j), &r * rho.matrix() * r.adjoint()).unwrap();
                let lhs = spin_marginals_at(&rotated, f).unwrap();
                let rhs = spin_marginals_at(&rho, compose(f, g)).unwrap();
                for (a, b) in lhs.iter().zip(&rhs) {
                    assert!((a - b).abs() < 1e-10, "j={j}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn projection_identity() {
        // Feeding a reconstruction back through the forward map returns the marginal.
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let grid = SphereGrid::new(12, 10);
        let rho = random_density(BasisDescriptor::spin(h(2)), &mut rng).unwrap();
        let w = SpinMarginal::sample(&rho, &grid).unwrap();
        let back = SpinMarginal::sample(&reconstruct_spin_density(&w).unwrap().rho, &grid).unwrap();
        let worst = w.values.iter().zip(&back.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8);
    }
}
