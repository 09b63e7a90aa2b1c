use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{marginal_1d, SymplecticFrame};
use crate::qstate::{BasisDescriptor, DensityMatrix};
use crate::quadrature::{gauss_legendre_on, UniformGrid};
use crate::specfun::laguerre;
use crate::{c, CMatrix, Complex64, Error, Result};

/// Reconstructions whose Hermiticity defect exceeds this are rejected.
pub const DEFAULT_HERMITICITY_THRESHOLD: f64 = 1e-6;

const RADIAL_NODES: usize = 256;

/// `⟨m|D(β)|n⟩` for `m, n < levels`, `D(β) = exp(βa† - β*a)`.
pub fn displacement_matrix(beta: Complex64, levels: usize) -> CMatrix {
    let b2 = beta.norm_sqr();
    let gauss = (-0.5 * b2).exp();
    // log-factorials keep √(n!/m!) finite for large levels.
    let lf: Vec<f64> = (0..levels)
        .scan(0.0, |acc, k| {
            if k > 0 {
                *acc += (k as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    CMatrix::from_fn(levels, levels, |m, n| {
        let (hi, lo, z) = if m >= n { (m, n, beta) } else { (n, m, -beta.conj()) };
        let k = hi - lo;
        let ratio = (0.5 * (lf[lo] - lf[hi])).exp();
        z.powu(k as u32) * (ratio * gauss * laguerre(lo, k as f64, b2))
    })
}

/// Symplectic reconstruction kernel `K(x, μ, ν) = (1/2π) e^{-ix + iμν/2}
/// e^{iμq} e^{iνp}` in the Fock basis, which equals
/// `(1/2π) e^{-ix} D((iμ - ν)/√2)`.
pub fn kernel_matrix(x: f64, frame: SymplecticFrame, levels: usize) -> CMatrix {
    let beta = c(-frame.nu, frame.mu) * std::f64::consts::FRAC_1_SQRT_2;
    displacement_matrix(beta, levels) * Complex64::from_polar(1.0 / (2.0 * std::f64::consts::PI), -x)
}

/// Sampled marginal `w(x, μ, ν)`: one row of `x` values per frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMarginal {
    pub grid: UniformGrid,
    pub frames: Vec<SymplecticFrame>,
    /// `values[k][i] = w(x_i, frames[k])`.
    pub values: Vec<Vec<f64>>,
}

impl QuadratureMarginal {
    pub fn new(grid: UniformGrid, frames: Vec<SymplecticFrame>, values: Vec<Vec<f64>>) -> Result<Self> {
        if frames.is_empty() || grid.points == 0 {
            return Err(Error::Lattice("empty frame lattice or outcome grid".into()));
        }
        if values.len() != frames.len() || values.iter().any(|row| row.len() != grid.points) {
            return Err(Error::Lattice("values do not match the grid and frame counts".into()));
        }
        Ok(Self { grid, frames, values })
    }

    /// Forward map on an arbitrary list of frames.
    pub fn sample(rho: &DensityMatrix, grid: UniformGrid, frames: Vec<SymplecticFrame>) -> Result<Self> {
        let xs = grid.nodes();
        let values = frames
            .par_iter()
            .map(|&f| xs.iter().map(|&x| marginal_1d(rho, x, f)).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, frames, values)
    }

    /// Largest `|∫ w dx - 1|` over frames.
    pub fn normalization_defect(&self) -> f64 {
        self.values
            .iter()
            .map(|row| (self.grid.integrate(row) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.grid != other.grid || self.frames != other.frames {
            return Err(Error::Lattice("marginals live on different lattices".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(v1, v2)| a * v1 + b * v2).collect())
            .collect();
        Self::new(self.grid.clone(), self.frames.clone(), values)
    }
}

/// Unit-circle frame lattice `μ = cos θ_k`, `ν = sin θ_k` with
/// `θ_k = 2πk/angles` and a uniform outcome grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleLattice {
    pub grid: UniformGrid,
    pub angles: usize,
}

impl Default for CircleLattice {
    fn default() -> Self {
        Self { grid: UniformGrid::new(-8.0, 8.0, 128), angles: 32 }
    }
}

impl CircleLattice {
    pub fn frames(&self) -> Vec<SymplecticFrame> {
        (0..self.angles)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / self.angles as f64;
                SymplecticFrame { mu: t.cos(), nu: t.sin() }
            })
            .collect()
    }
}

/// Forward map on a circle lattice.
pub fn sample_circle(rho: &DensityMatrix, lattice: &CircleLattice) -> Result<QuadratureMarginal> {
    if lattice.angles == 0 {
        return Err(Error::Lattice("circle lattice needs at least one angle".into()));
    }
    QuadratureMarginal::sample(rho, lattice.grid.clone(), lattice.frames())
}

/// Reconstructed density matrix with its Hermiticity defect.
#[derive(Clone, Debug)]
pub struct SymplecticReconstruction {
    pub rho: DensityMatrix,
    pub hermiticity_defect: f64,
}

/// Pattern functions `K_mn(u) = ∫_0^∞ r e^{-iru} ⟨m|e^{irq}|n⟩ dr` on the
/// outcome grid; index `[u][m * levels + n]`.
fn pattern_functions(us: &[f64], levels: usize) -> Vec<Vec<Complex64>> {
    let r_max = 2.0 * (45.0 + 4.0 * levels as f64).sqrt();
    let (rs, ws) = gauss_legendre_on(RADIAL_NODES, 0.0, r_max);
    // ⟨m|e^{irq}|n⟩ = ⟨m|D(ir/√2)|n⟩.
    let elements: Vec<CMatrix> = rs
        .iter()
        .map(|&r| displacement_matrix(c(0.0, r * std::f64::consts::FRAC_1_SQRT_2), levels))
        .collect();
    us.par_iter()
        .map(|&u| {
            let mut out = vec![c(0.0, 0.0); levels * levels];
            for ((&r, &w), e) in rs.iter().zip(&ws).zip(&elements) {
                let f = Complex64::from_polar(w * r, -r * u);
                for m in 0..levels {
                    for n in 0..levels {
                        out[m * levels + n] += f * e[(m, n)];
                    }
                }
            }
            out
        })
        .collect()
}

/// Inverts the symplectic forward map into a `levels`-dimensional Fock
/// density matrix, rejecting defects above
/// [`DEFAULT_HERMITICITY_THRESHOLD`].
pub fn reconstruct_density(w: &QuadratureMarginal, levels: usize) -> Result<SymplecticReconstruction> {
    reconstruct_density_with(w, levels, DEFAULT_HERMITICITY_THRESHOLD)
}

/// As [`reconstruct_density`] with an explicit Hermiticity threshold.
///
/// The unbounded `(μ, ν)` integral is reduced to the unit circle by the
/// homogeneity `w(κx, κμ, κν) = w(x, μ, ν)/|κ|`; the radial integral is
/// then folded into the pattern functions. The frames must therefore be
/// `θ_k = 2πk/n` on the unit circle.
pub fn reconstruct_density_with(
    w: &QuadratureMarginal,
    levels: usize,
    threshold: f64,
) -> Result<SymplecticReconstruction> {
    let n = w.frames.len();
    for (k, f) in w.frames.iter().enumerate() {
        let want = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let (ws, wc) = want.sin_cos();
        if (f.mu - wc).abs() > 1e-9 || (f.nu - ws).abs() > 1e-9 {
            return Err(Error::Lattice(format!(
                "frame {k} is ({}, {}), expected the unit-circle angle {want}",
                f.mu, f.nu
            )));
        }
    }
    if levels == 0 {
        return Err(Error::Basis("reconstruction needs at least one Fock level".into()));
    }
    let us = w.grid.nodes();
    let uw = w.grid.weights();
    let pattern = pattern_functions(&us, levels);

    let mut rho = CMatrix::zeros(levels, levels);
    for (k, row) in w.values.iter().enumerate() {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let mut acc = vec![c(0.0, 0.0); levels * levels];
        for ((value, weight), kern) in row.iter().zip(&uw).zip(&pattern) {
            let s = value * weight;
            for (a, kv) in acc.iter_mut().zip(kern) {
                *a += kv * s;
            }
        }
        for m in 0..levels {
            for l in 0..levels {
                let phase = Complex64::from_polar(1.0 / n as f64, (m as f64 - l as f64) * theta);
                rho[(m, l)] += acc[m * levels + l] * phase;
            }
        }
    }
    let hermiticity_defect = crate::max_abs(&(&rho - rho.adjoint()));
    if hermiticity_defect > threshold {
        return Err(Error::Reconstruction { defect: hermiticity_defect, threshold });
    }
    Ok(SymplecticReconstruction {
        rho: DensityMatrix::new_unchecked(BasisDescriptor::fock(levels), rho)?,
        hermiticity_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::rotation::exp_hermitian;
    use crate::qstate::{density_from_pure, random_density, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn displacement_matches_matrix_exponential() {
        let beta = c(0.4, -0.7);
        let big = 60;
        let a = CMatrix::from_fn(big, big, |r, col| if col == r + 1 { c((col as f64).sqrt(), 0.0) } else { c(0.0, 0.0) });
        let gen = (a.adjoint() * beta - &a * beta.conj()) * crate::I;
        let oracle = exp_hermitian(&gen, 1.0);
        let got = displacement_matrix(beta, 8);
        for m in 0..8 {
            for n in 0..8 {
                assert!((got[(m, n)] - oracle[(m, n)]).norm() < 1e-12, "({m},{n})");
            }
        }
    }

    #[test]
    fn kernel_prefactor_and_ordering() {
        // e^{iμq}e^{iνp} = e^{i(μq+νp)} e^{-iμν/2}, so the kernel is a pure displacement.
        let f = SymplecticFrame::new(0.3, -0.8).unwrap();
        let k = kernel_matrix(0.0, f, 6);
        let d = displacement_matrix(c(0.8, 0.3) * std::f64::consts::FRAC_1_SQRT_2, 6);
        assert!(crate::max_abs(&(k * c(2.0 * std::f64::consts::PI, 0.0) - d)) < 1e-14);
    }

    fn vacuum(levels: usize) -> DensityMatrix {
        density_from_pure(&PureState::basis_state(BasisDescriptor::fock(levels), 0).unwrap())
    }

    #[test]
    fn round_trip_vacuum_and_mixture() {
        let lattice = CircleLattice::default();
        let w = sample_circle(&vacuum(4), &lattice).unwrap();
        assert!(w.normalization_defect() < 1e-10);
        let rec = reconstruct_density(&w, 4).unwrap();
        assert!(rec.rho.distance(vacuum(4).matrix()) < 1e-3);

        let mixed = DensityMatrix::maximally_mixed(BasisDescriptor::fock(2)).unwrap();
        let rec = reconstruct_density(&sample_circle(&mixed, &lattice).unwrap(), 2).unwrap();
        assert!(rec.rho.distance(mixed.matrix()) < 1e-3);
    }

    #[test]
    fn reconstruction_is_linear() {
        let lattice = CircleLattice { grid: UniformGrid::new(-8.0, 8.0, 96), angles: 16 };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r1 = random_density(BasisDescriptor::fock(3), &mut rng).unwrap();
        let r2 = random_density(BasisDescriptor::fock(3), &mut rng).unwrap();
        let w1 = sample_circle(&r1, &lattice).unwrap();
        let w2 = sample_circle(&r2, &lattice).unwrap();
        let avg = w1.linear_combination(0.5, &w2, 0.5).unwrap();
        let lhs = reconstruct_density(&avg, 3).unwrap().rho.into_matrix();
        let rhs = (reconstruct_density(&w1, 3).unwrap().rho.into_matrix()
            + reconstruct_density(&w2, 3).unwrap().rho.into_matrix())
            * c(0.5, 0.0);
        assert!(crate::max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn rejects_off_circle_lattice() {
        let w = QuadratureMarginal::sample(
            &vacuum(2),
            UniformGrid::new(-4.0, 4.0, 16),
            vec![SymplecticFrame::new(2.0, 0.0).unwrap()],
        )
        .unwrap();
        assert!(matches!(reconstruct_density(&w, 2), Err(Error::Lattice(_))));
        assert!(QuadratureMarginal::new(UniformGrid::new(0.0, 1.0, 3), vec![], vec![]).is_err());
    }
}
