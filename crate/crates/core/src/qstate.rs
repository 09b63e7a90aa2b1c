//! Quantum states in truncated Fock, spin-j and tensor-product bases.

use nalgebra::SymmetricEigen;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::specfun::HalfInt;
use crate::{c, CMatrix, CVector, Complex64, Error, Result};

/// Largest total dimension accepted for any basis.
pub const MAX_DIMENSION: usize = 4096;

/// Largest Fock level accepted by [`fock_wavefunction`].
pub const MAX_FOCK_LEVEL: usize = 128;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;

/// Basis of a (possibly composite) truncated Hilbert space.
///
/// `Fock { levels }` keeps number states `0..levels`. Product factors are
/// ordered with the first factor most significant in the Kronecker index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisDescriptor {
    Fock { levels: usize },
    Spin { j: HalfInt },
    Product { factors: Vec<BasisDescriptor> },
}

impl BasisDescriptor {
    pub fn fock(levels: usize) -> Self {
        Self::Fock { levels }
    }

    pub fn spin(j: HalfInt) -> Self {
        Self::Spin { j }
    }

    pub fn spin_half() -> Self {
        Self::Spin { j: HalfInt::HALF }
    }

    pub fn product(factors: Vec<BasisDescriptor>) -> Self {
        Self::Product { factors }
    }

    /// Dimension, saturating instead of overflowing for absurd products.
    pub fn dim(&self) -> usize {
        match self {
            Self::Fock { levels } => *levels,
            Self::Spin { j } => j.multiplicity(),
            Self::Product { factors } => factors.iter().fold(1usize, |acc, f| acc.saturating_mul(f.dim())),
        }
    }

    /// Checks the dimension cap and that every factor is non-empty.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Fock { levels } if *levels == 0 => Err(Error::Basis("Fock basis with zero levels".into())),
            Self::Spin { j } if j.twice() < 0 => Err(Error::Basis(format!("negative spin {j}"))),
            Self::Product { factors } if factors.is_empty() => Err(Error::Basis("empty product basis".into())),
            Self::Product { factors } => {
                for f in factors {
                    f.validate()?;
                }
                self.check_cap()
            }
            _ => self.check_cap(),
        }
    }

    fn check_cap(&self) -> Result<()> {
        let dim = self.dim();
        if dim > MAX_DIMENSION {
            return Err(Error::DimensionCap { dim, cap: MAX_DIMENSION });
        }
        Ok(())
    }

    /// The flat list of factors (a non-product basis is its own single factor).
    pub fn factors(&self) -> Vec<&BasisDescriptor> {
        match self {
            Self::Product { factors } => factors.iter().flat_map(|f| f.factors()).collect(),
            other => vec![other],
        }
    }
}

/// Diagnostics for the density-matrix invariants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    /// `max |ρ - ρ†|`.
    pub hermiticity: f64,
    /// `|Tr ρ - 1|`.
    pub trace_error: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
}

impl InvariantReport {
    pub fn of(m: &CMatrix) -> Self {
        let hermiticity = crate::max_abs(&(m - m.adjoint()));
        let trace_error = (m.trace() - c(1.0, 0.0)).norm();
        let herm = (m + m.adjoint()) * c(0.5, 0.0);
        let min_eigenvalue = if herm.nrows() == 0 {
            0.0
        } else {
            SymmetricEigen::new(herm).eigenvalues.min()
        };
        Self { hermiticity, trace_error, min_eigenvalue }
    }

    pub fn passes(&self) -> bool {
        self.hermiticity <= HERMITICITY_TOL && self.trace_error <= TRACE_TOL && self.min_eigenvalue >= -POSITIVITY_TOL
    }

    fn check(&self) -> Result<()> {
        if self.hermiticity > HERMITICITY_TOL {
            return Err(Error::Invariant(format!("not Hermitian: max |ρ-ρ†| = {:e}", self.hermiticity)));
        }
        if self.trace_error > TRACE_TOL {
            return Err(Error::Invariant(format!("trace off by {:e}", self.trace_error)));
        }
        if self.min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::Invariant(format!("negative eigenvalue {:e}", self.min_eigenvalue)));
        }
        Ok(())
    }
}

/// Density matrix in a declared basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    basis: BasisDescriptor,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian, unit trace and positive semidefinite.
    pub fn new(basis: BasisDescriptor, entries: CMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(basis, entries)?;
        rho.report().check()?;
        Ok(rho)
    }

    /// Checks only the shape; used for reconstructions whose invariants are
    /// reported rather than enforced.
    pub fn new_unchecked(basis: BasisDescriptor, entries: CMatrix) -> Result<Self> {
        basis.validate()?;
        let dim = basis.dim();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::Basis(format!(
                "matrix is {}x{} but basis has dimension {dim}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { basis, entries })
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn report(&self) -> InvariantReport {
        InvariantReport::of(&self.entries)
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(basis: BasisDescriptor) -> Result<Self> {
        basis.validate()?;
        let d = basis.dim();
        let entries = CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0);
        Ok(Self { basis, entries })
    }

    /// Max-norm distance to another matrix of the same size.
    pub fn distance(&self, other: &CMatrix) -> f64 {
        crate::max_abs(&(&self.entries - other))
    }
}

/// Normalized state vector in a declared basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    basis: BasisDescriptor,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(basis: BasisDescriptor, amplitudes: CVector) -> Result<Self> {
        basis.validate()?;
        if amplitudes.len() != basis.dim() {
            return Err(Error::Basis(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Invariant(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Rescales to unit norm before validating.
    pub fn normalized(basis: BasisDescriptor, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Self::new(basis, amplitudes.unscale(norm))
    }

    /// Basis vector `e_k`.
    pub fn basis_state(basis: BasisDescriptor, k: usize) -> Result<Self> {
        let dim = basis.dim();
        if k >= dim {
            return Err(Error::Basis(format!("basis index {k} outside dimension {dim}")));
        }
        let mut v = CVector::zeros(dim);
        v[k] = c(1.0, 0.0);
        Self::new(basis, v)
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let basis = BasisDescriptor::product(vec![self.basis.clone(), other.basis.clone()]);
        basis.validate()?;
        Self::new(basis, self.amplitudes.kronecker(&other.amplitudes))
    }
}

/// Rank-one projector `|ψ⟩⟨ψ|`.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let v = psi.amplitudes();
    DensityMatrix {
        basis: psi.basis().clone(),
        entries: v * v.adjoint(),
    }
}

/// Embeds `rho` in a basis where every Fock factor has at least `levels`
/// levels; added levels are unpopulated.
pub fn pad_fock(rho: &DensityMatrix, levels: usize) -> Result<DensityMatrix> {
    let old: Vec<BasisDescriptor> = rho.basis().factors().into_iter().cloned().collect();
    let new: Vec<BasisDescriptor> = old
        .iter()
        .map(|f| match f {
            BasisDescriptor::Fock { levels: l } => BasisDescriptor::fock((*l).max(levels)),
            other => other.clone(),
        })
        .collect();
    let basis = if new.len() == 1 { new[0].clone() } else { BasisDescriptor::product(new.clone()) };
    basis.validate()?;
    let map = |mut idx: usize| {
        let mut out = 0;
        let mut scale = 1;
        for (o, n) in old.iter().zip(&new).rev() {
            out += (idx % o.dim()) * scale;
            idx /= o.dim();
            scale *= n.dim();
        }
        out
    };
    let d = rho.dim();
    let index: Vec<usize> = (0..d).map(map).collect();
    let mut m = CMatrix::zeros(basis.dim(), basis.dim());
    for r in 0..d {
        for col in 0..d {
            m[(index[r], index[col])] = rho.matrix()[(r, col)];
        }
    }
    DensityMatrix::new_unchecked(basis, m)
}

/// Kronecker product `a ⊗ b` with a product basis.
pub fn tensor_product(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let basis = BasisDescriptor::product(vec![a.basis.clone(), b.basis.clone()]);
    basis.validate()?;
    Ok(DensityMatrix {
        basis,
        entries: a.entries.kronecker(&b.entries),
    })
}

/// Random full-rank density matrix `G G† / Tr(G G†)` with entries of `G`
/// uniform in the unit square.
pub fn random_density<R: Rng + ?Sized>(basis: BasisDescriptor, rng: &mut R) -> Result<DensityMatrix> {
    basis.validate()?;
    let d = basis.dim();
    let g = CMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let mut entries = m.unscale(tr);
    // Remove rounding asymmetry so the exact invariants hold.
    entries = (&entries + entries.adjoint()) * c(0.5, 0.0);
    DensityMatrix::new(basis, entries)
}

/// Random normalized state vector.
pub fn random_pure<R: Rng + ?Sized>(basis: BasisDescriptor, rng: &mut R) -> Result<PureState> {
    basis.validate()?;
    let v = CVector::from_fn(basis.dim(), |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    PureState::normalized(basis, v)
}

/// Harmonic-oscillator eigenfunction `ψ_n(q)` (unit mass and frequency).
pub fn fock_wavefunction(n: usize, q: f64) -> Result<f64> {
    if n > MAX_FOCK_LEVEL {
        return Err(Error::FockTruncation { level: n, truncation: MAX_FOCK_LEVEL });
    }
    Ok(fock_wavefunctions(n + 1, q)[n])
}

/// `ψ_0(q), …, ψ_{levels-1}(q)` by the normalized three-term recurrence.
pub fn fock_wavefunctions(levels: usize, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(levels);
    if levels == 0 {
        return out;
    }
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * q * q).exp();
    out.push(psi0);
    if levels > 1 {
        out.push(std::f64::consts::SQRT_2 * q * psi0);
    }
    for n in 1..levels.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * q * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Complex coherent labels of a charged particle in a magnetic field.
///
/// `beta_c` is the second coherent label, not an Euler angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandauCoherentParams {
    pub alpha: Complex64,
    pub beta_c: Complex64,
}

impl LandauCoherentParams {
    pub fn new(alpha: Complex64, beta_c: Complex64) -> Self {
        Self { alpha, beta_c }
    }
}

/// Coherent-state wavefunction `Ψ_{αβ}(q1, q2)` in the symmetric gauge with
/// field strength 2.
pub fn landau_coherent_wavefunction(params: LandauCoherentParams, q1: f64, q2: f64) -> Complex64 {
    let a = params.alpha;
    let b = params.beta_c;
    let i = crate::I;
    let exponent = -0.5 * (q1 * q1 + q2 * q2) - 0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() - i * a * b
        + b * c(q1, q2)
        + i * a * c(q1, -q2);
    exponent.exp() / std::f64::consts::PI.sqrt()
}

/// Creation operator on `Fock { levels }`, truncated at the top level.
fn creation(levels: usize) -> CMatrix {
    CMatrix::from_fn(levels, levels, |r, col| {
        if r == col + 1 {
            c((r as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Landau-level eigenstate `Ψ_{n n'}` expanded in Cartesian number states
/// `|k1⟩⊗|k2⟩` with `levels` retained per mode.
///
/// `Ψ_{nn'} = (A†)^n (B†)^{n'} |00⟩ / √(n! n'!)` with
/// `A† = (i a1† + a2†)/√2` and `B† = (a1† + i a2†)/√2`, the combinations
/// generated by expanding `Ψ_{αβ}` in powers of `α` and `β`.
pub fn landau_fock_state(n: usize, np: usize, levels: usize) -> Result<PureState> {
    if n + np >= levels {
        return Err(Error::FockTruncation { level: n + np, truncation: levels.saturating_sub(1) });
    }
    let basis = BasisDescriptor::product(vec![BasisDescriptor::fock(levels), BasisDescriptor::fock(levels)]);
    basis.validate()?;
    let ad = creation(levels);
    let id = CMatrix::identity(levels, levels);
    let a1 = ad.kronecker(&id);
    let a2 = id.kronecker(&ad);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let big_a = (&a1 * c(0.0, s)) + (&a2 * c(s, 0.0));
    let big_b = (&a1 * c(s, 0.0)) + (&a2 * c(0.0, s));
    let mut v = CVector::zeros(levels * levels);
    v[0] = c(1.0, 0.0);
    for _ in 0..n {
        v = &big_a * v;
    }
    for _ in 0..np {
        v = &big_b * v;
    }
    let fact = |k: usize| (1..=k).fold(1.0, |acc, i| acc * i as f64);
    let v = v.unscale((fact(n) * fact(np)).sqrt());
    PureState::new(basis, v)
}
