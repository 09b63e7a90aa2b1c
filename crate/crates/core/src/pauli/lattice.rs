//! Sampled hybrid marginals and the lattice form of the evolution operator.
//!
//! Each mode's frame is kept on the unit circle `(μ, ν) = (cos θ, sin θ)`.
//! Homogeneity `w(λx, λμ, λν) = w/λ` turns the radial derivative into
//! `∂_r w = -(w + x ∂_x w)` there, so the ring is closed under every linear
//! frame flow; values at other radii follow from the same law.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::qstate::DensityMatrix;
use crate::quadrature::{SphereGrid, UniformGrid};
use crate::specfun::HalfInt;
use crate::spintomo::{EulerFrame, SpinMarginal};
use crate::symtomo::{fock_amplitudes, SymplecticFrame};
use crate::{c, Complex64, Error, Result};

use super::marginal::{hybrid_layout, spin_row};
use super::{HamiltonianSpec, HybridPoint};

/// Geometry of a sampled hybrid marginal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingLattice {
    pub x: UniformGrid,
    /// Angles per mode on the unit frame circle.
    pub angles: usize,
    pub modes: usize,
    pub spin: bool,
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl RingLattice {
    /// One mode plus spin: 128 points on `[-8, 8]`, 16 angles, 8×8 sphere.
    pub fn single_mode() -> Self {
        Self { x: UniformGrid::new(-8.0, 8.0, 128), angles: 16, modes: 1, spin: true, n_alpha: 8, n_beta: 8 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes > 2 {
            return Err(Error::Lattice(format!("{} modes; at most 2 are supported", self.modes)));
        }
        if self.modes > 0 && (self.x.points < 5 || self.angles < 3) {
            return Err(Error::Lattice("lattice too small for the stencils (need ≥5 x points, ≥3 angles)".into()));
        }
        if !(self.x.start < self.x.end) && self.modes > 0 {
            return Err(Error::Lattice("x grid must be increasing".into()));
        }
        if self.spin && (self.n_alpha < 3 || self.n_beta < 2) {
            return Err(Error::Lattice("sphere grid needs ≥3 α and ≥2 β nodes".into()));
        }
        let len = self.dims().iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        match len {
            Some(n) if n <= 1 << 28 => Ok(()),
            _ => Err(Error::Lattice("lattice exceeds 2^28 samples".into())),
        }
    }

    fn sphere_len(&self) -> usize {
        if self.spin {
            self.n_alpha * self.n_beta
        } else {
            1
        }
    }

    fn spin_len(&self) -> usize {
        if self.spin {
            2
        } else {
            1
        }
    }

    /// Axis sizes: x per mode, θ per mode, s, sphere node.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.x.points; self.modes];
        d.extend(std::iter::repeat_n(self.angles, self.modes));
        d.push(self.spin_len());
        d.push(self.sphere_len());
        d
    }

    pub fn len(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn strides(&self) -> Vec<usize> {
        let dims = self.dims();
        let mut s = vec![1; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            s[k] = s[k + 1] * dims[k + 1];
        }
        s
    }

    pub fn sphere(&self) -> SphereGrid {
        SphereGrid::new(self.n_alpha, self.n_beta)
    }

    pub fn theta(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.angles as f64
    }

    fn decode(&self, mut idx: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut out = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            out[k] = idx % dims[k];
            idx /= dims[k];
        }
        out
    }

    /// Measurement outcome at flat index `idx`.
    pub fn point(&self, idx: usize) -> HybridPoint {
        self.point_in(&self.x.nodes(), &self.sphere(), idx)
    }

    /// As [`Self::point`] with the position nodes and sphere grid precomputed.
    pub(crate) fn point_in(&self, nodes: &[f64], sph: &SphereGrid, idx: usize) -> HybridPoint {
        let coords = self.decode(idx);
        let m = self.modes;
        let xs = (0..m).map(|k| nodes[coords[k]]).collect();
        let frames = (0..m)
            .map(|k| {
                let t = self.theta(coords[m + k]);
                SymplecticFrame { mu: t.cos(), nu: t.sin() }
            })
            .collect();
        let s = if coords[2 * m] == 0 { HalfInt::HALF } else { -HalfInt::HALF };
        let spin = if self.spin {
            let ia = coords[2 * m + 1] / self.n_beta;
            let ib = coords[2 * m + 1] % self.n_beta;
            EulerFrame::direction(sph.alphas[ia], sph.betas[ib])
        } else {
            EulerFrame::direction(0.0, 0.0)
        };
        HybridPoint { xs, frames, s, spin }
    }
}

/// A hybrid marginal sampled on a [`RingLattice`] at one time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridMarginal {
    pub lattice: RingLattice,
    pub time: f64,
    pub values: Vec<f64>,
}

impl HybridMarginal {
    pub fn new(lattice: RingLattice, time: f64, values: Vec<f64>) -> Result<Self> {
        lattice.validate()?;
        if values.len() != lattice.len() {
            return Err(Error::Lattice(format!("{} values for a lattice of {}", values.len(), lattice.len())));
        }
        Ok(Self { lattice, time, values })
    }

    /// Samples `rho` (Fock modes, optional trailing spin-½) on `lattice`.
    pub fn sample(rho: &DensityMatrix, lattice: RingLattice) -> Result<Self> {
        lattice.validate()?;
        let (modes, spin) = hybrid_layout(rho.basis())?;
        if modes.len() != lattice.modes || spin != lattice.spin {
            return Err(Error::Lattice(format!(
                "state has {} modes (spin: {spin}), lattice has {} (spin: {})",
                modes.len(),
                lattice.modes,
                lattice.spin
            )));
        }
        let ns = lattice.spin_len();
        let spatial_dim: usize = modes.iter().product();
        let m = rho.matrix();
        let nodes = lattice.x.nodes();
        // Spin rows per (s, sphere node).
        let sph = lattice.sphere();
        let sphere_len = lattice.sphere_len();
        let rows: Vec<[Complex64; 2]> = if spin {
            let mut r = Vec::with_capacity(2 * sphere_len);
            for s in [HalfInt::HALF, -HalfInt::HALF] {
                for ia in 0..lattice.n_alpha {
                    for ib in 0..lattice.n_beta {
                        r.push(spin_row(s, EulerFrame::direction(sph.alphas[ia], sph.betas[ib]))?);
                    }
                }
            }
            r
        } else {
            vec![[c(1.0, 0.0), c(0.0, 0.0)]]
        };
        let block = ns * sphere_len;
        let spatial_points = lattice.len() / block;
        let mut values = vec![0.0; lattice.len()];
        values.par_chunks_mut(block).enumerate().for_each(|(sp, out)| {
            let coords = lattice.decode(sp * block);
            let mut amps = vec![c(1.0, 0.0)];
            for (k, &levels) in modes.iter().enumerate() {
                let t = lattice.theta(coords[lattice.modes + k]);
                let a = fock_amplitudes(levels, nodes[coords[k]], SymplecticFrame { mu: t.cos(), nu: t.sin() });
                amps = amps.iter().flat_map(|u| a.iter().map(move |v| u * v)).collect();
            }
            // B_{ab} = Σ a_n ρ_{(n,a),(n',b)} a*_{n'} over spin labels a, b.
            let sdim = if spin { 2 } else { 1 };
            let mut b = [[c(0.0, 0.0); 2]; 2];
            for (sa, brow) in b.iter_mut().enumerate().take(sdim) {
                for (sb, entry) in brow.iter_mut().enumerate().take(sdim) {
                    let mut acc = c(0.0, 0.0);
                    for n in 0..spatial_dim {
                        let mut row = c(0.0, 0.0);
                        for np in 0..spatial_dim {
                            row += m[(n * sdim + sa, np * sdim + sb)] * amps[np].conj();
                        }
                        acc += amps[n] * row;
                    }
                    *entry = acc;
                }
            }
            for (j, o) in out.iter_mut().enumerate() {
                let r = rows[if spin { j } else { 0 }];
                let mut acc = c(0.0, 0.0);
                for sa in 0..sdim {
                    for sb in 0..sdim {
                        acc += r[sa] * b[sa][sb] * r[sb].conj();
                    }
                }
                *o = acc.re;
            }
        });
        debug_assert_eq!(spatial_points * block, values.len());
        Self::new(lattice, 0.0, values)
    }

    /// `Σ_s ∫ w dx⃗` for every frame on the lattice.
    pub fn frame_norms(&self) -> Vec<f64> {
        let lat = &self.lattice;
        let m = lat.modes;
        let weights = lat.x.weights();
        let frames = lat.angles.pow(m as u32) * lat.sphere_len();
        let mut norms = vec![0.0; frames];
        for (idx, &v) in self.values.iter().enumerate() {
            let coords = lat.decode(idx);
            let mut w = v;
            let mut f = 0;
            for k in 0..m {
                w *= weights[coords[k]];
                f = f * lat.angles + coords[m + k];
            }
            f = f * lat.sphere_len() + coords[2 * m + 1];
            norms[f] += w;
        }
        norms
    }

    /// Largest `|Σ_s ∫ w dx⃗ - 1|` over frames.
    pub fn normalization_defect(&self) -> f64 {
        self.frame_norms().iter().fold(0.0, |acc, n| acc.max((n - 1.0).abs()))
    }

    pub fn mean_norm(&self) -> f64 {
        let n = self.frame_norms();
        n.iter().sum::<f64>() / n.len() as f64
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest absolute difference from `f` evaluated at every lattice point.
    pub fn max_deviation<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&HybridPoint) -> Result<f64> + Sync,
    {
        let (nodes, sph) = (self.lattice.x.nodes(), self.lattice.sphere());
        self.values
            .par_iter()
            .enumerate()
            .map(|(idx, &v)| f(&self.lattice.point_in(&nodes, &sph, idx)).map(|want| (v - want).abs()))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }
}

/// Fourth-order centered `∂` along `axis` with zero values beyond the ends.
fn diff_x(lat: &RingLattice, v: &[f64], axis: usize) -> Vec<f64> {
    let dims = lat.dims();
    let stride = lat.strides()[axis];
    let n = dims[axis];
    let h = lat.x.step();
    (0..v.len())
        .into_par_iter()
        .map(|idx| {
            let i = (idx / stride) % n;
            let at = |o: isize| {
                let j = i as isize + o;
                if j < 0 || j >= n as isize {
                    0.0
                } else {
                    v[(idx as isize + o * stride as isize) as usize]
                }
            };
            (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h)
        })
        .collect()
}

/// Fourier differentiation matrix on `n` equispaced points of `[0, 2π)`.
fn spectral_matrix(n: usize) -> Vec<f64> {
    let mut d = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let x = (j as f64 - k as f64) * std::f64::consts::PI / n as f64;
                let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
                d[j * n + k] = if n % 2 == 0 { 0.5 * sign / x.tan() } else { 0.5 * sign / x.sin() };
            }
        }
    }
    d
}

fn diff_theta(lat: &RingLattice, v: &[f64], axis: usize, d: &[f64]) -> Vec<f64> {
    let stride = lat.strides()[axis];
    let n = lat.angles;
    (0..v.len())
        .into_par_iter()
        .map(|idx| {
            let i = (idx / stride) % n;
            let base = idx - i * stride;
            (0..n).map(|k| d[i * n + k] * v[base + k * stride]).sum()
        })
        .collect()
}

/// `∫_{x_0}^{x} f` along `axis`: trapezoid with the endpoint-derivative
/// correction, fourth order for smooth `f`.
fn cumulative_x(lat: &RingLattice, f: &[f64], fx: &[f64], axis: usize) -> Vec<f64> {
    let stride = lat.strides()[axis];
    let n = lat.x.points;
    let h = lat.x.step();
    let mut out = vec![0.0; f.len()];
    for start in 0..f.len() {
        if (start / stride) % n != 0 {
            continue;
        }
        let mut sum = 0.0;
        for i in 0..n {
            let idx = start + i * stride;
            sum += f[idx];
            let trap = h * (sum - 0.5 * (f[start] + f[idx]));
            out[idx] = trap - h * h / 12.0 * (fx[idx] - fx[start]);
        }
    }
    out
}

/// Sphere moments `(C, S) = ∫ dΩ/8π² w sinβ (cos α, sin α)` of each block.
fn spin_term(lat: &RingLattice, v: &[f64], coeff: f64) -> Vec<f64> {
    let sph = lat.sphere();
    let nb = lat.n_beta;
    let mut out = vec![0.0; v.len()];
    out.par_chunks_mut(lat.sphere_len())
        .zip(v.par_chunks(lat.sphere_len()))
        .for_each(|(o, w)| {
            let (mut cm, mut sm) = (0.0, 0.0);
            for (j, &wv) in w.iter().enumerate() {
                let (ia, ib) = (j / nb, j % nb);
                let g = sph.group_weight(ia, ib) * wv * sph.betas[ib].sin();
                cm += g * sph.alphas[ia].cos();
                sm += g * sph.alphas[ia].sin();
            }
            for (j, ov) in o.iter_mut().enumerate() {
                let (ia, ib) = (j / nb, j % nb);
                let a = sph.alphas[ia];
                *ov = coeff * sph.betas[ib].sin() * (a.sin() * cm - a.cos() * sm);
            }
        });
    out
}

/// Right-hand side `∂_t w` on the lattice for Hamiltonian `h`.
pub fn lattice_rhs(h: &HamiltonianSpec, w: &HybridMarginal) -> Result<Vec<f64>> {
    let lat = &w.lattice;
    let v = &w.values;
    let m = lat.modes;
    if h.spatial_modes() != 0 && h.spatial_modes() != m {
        return Err(Error::Lattice(format!("{} needs {} modes, lattice has {m}", h.name(), h.spatial_modes())));
    }
    let mut out = if lat.spin && h.spin_coefficient() != 0.0 {
        spin_term(lat, v, h.spin_coefficient())
    } else {
        vec![0.0; v.len()]
    };
    if matches!(h, HamiltonianSpec::SpinDiag { .. }) || m == 0 {
        return Ok(out);
    }
    let g = h.frame_generator();
    let dmat = spectral_matrix(lat.angles);
    let wx: Vec<Vec<f64>> = (0..m).map(|k| diff_x(lat, v, k)).collect();
    let wt: Vec<Vec<f64>> = (0..m).map(|k| diff_theta(lat, v, m + k, &dmat)).collect();
    let nodes = lat.x.nodes();
    let cos: Vec<f64> = (0..lat.angles).map(|k| lat.theta(k).cos()).collect();
    let sin: Vec<f64> = (0..lat.angles).map(|k| lat.theta(k).sin()).collect();
    let strides = lat.strides();
    let dims = lat.dims();
    let coord = |idx: usize, axis: usize| (idx / strides[axis]) % dims[axis];
    out.par_iter_mut().enumerate().for_each(|(idx, o)| {
        for k in 0..m {
            let it = coord(idx, m + k);
            let (mu, nu) = (cos[it], sin[it]);
            let b = [[g[2 * k][2 * k], g[2 * k][2 * k + 1]], [g[2 * k + 1][2 * k], g[2 * k + 1][2 * k + 1]]];
            let vm = b[0][0] * mu + b[0][1] * nu;
            let vn = b[1][0] * mu + b[1][1] * nu;
            let vr = mu * vm + nu * vn;
            let vt = mu * vn - nu * vm;
            let x = nodes[coord(idx, k)];
            *o += vr * -(v[idx] + x * wx[k][idx]) + vt * wt[k][idx];
        }
    });
    if matches!(h, HamiltonianSpec::Landau) {
        // (σ1·σ2)(x1 ∂_{x2} - x2 ∂_{x1}) w - (σ1⊥·σ2)(∂_{x2} I1 + ∂_{x1} I2),
        // I_k = ∫^{x_k} ∂_{θ_k} w.
        let mut cross = Vec::with_capacity(2);
        for k in 0..2 {
            let gx = diff_x(lat, &wt[k], k);
            let ik = cumulative_x(lat, &wt[k], &gx, k);
            cross.push(diff_x(lat, &ik, 1 - k));
        }
        out.par_iter_mut().enumerate().for_each(|(idx, o)| {
            let (t1, t2) = (lat.theta(coord(idx, 2)), lat.theta(coord(idx, 3)));
            let (x1, x2) = (nodes[coord(idx, 0)], nodes[coord(idx, 1)]);
            *o += (t1 - t2).cos() * (x1 * wx[1][idx] - x2 * wx[0][idx]);
            *o -= (t2 - t1).sin() * (cross[0][idx] + cross[1][idx]);
        });
    }
    Ok(out)
}

/// `(μ∂_ν - ν∂_μ) w + 6 sinβ ∫ dΩ'/8π² w sinβ' sin(α - α')` on a ring lattice.
pub fn trapped_rhs(w: &HybridMarginal) -> Result<Vec<f64>> {
    lattice_rhs(&HamiltonianSpec::Trapped, w)
}

/// `3(a - c) sinβ ∫ dΩ'/8π² w(s, α', β') sinβ' sin(α - α')`, same `s`.
pub fn spin_rhs(w: &SpinMarginal, a: f64, c: f64) -> Result<SpinMarginal> {
    if w.j != HalfInt::HALF {
        return Err(Error::QuantumNumbers(format!("spin_rhs needs j = 1/2, got {}", w.j)));
    }
    let lat = RingLattice {
        x: UniformGrid::new(0.0, 1.0, 1),
        angles: 1,
        modes: 0,
        spin: true,
        n_alpha: w.n_alpha,
        n_beta: w.n_beta,
    };
    let values = spin_term(&lat, &w.values, 3.0 * (a - c));
    SpinMarginal::new(w.j, w.n_alpha, w.n_beta, values)
}

/// Single-mode marginal on a Cartesian `(x, μ, ν)` lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartesianSlice {
    pub x: Vec<f64>,
    pub mu: Vec<f64>,
    pub nu: UniformGrid,
    /// `values[(ix * mu.len() + imu) * nu.points + inu]`.
    pub values: Vec<f64>,
}

impl CartesianSlice {
    /// Samples a marginal function on the lattice.
    pub fn sample<F: Fn(f64, f64, f64) -> f64>(x: Vec<f64>, mu: Vec<f64>, nu: UniformGrid, f: F) -> Self {
        let nus = nu.nodes();
        let mut values = Vec::with_capacity(x.len() * mu.len() * nus.len());
        for &xv in &x {
            for &m in &mu {
                for &n in &nus {
                    values.push(f(xv, m, n));
                }
            }
        }
        Self { x, mu, nu, values }
    }
}

/// `μ ∂_ν w` by fourth-order differences: centered in the interior,
/// one-sided over the two points nearest each `ν` edge.
pub fn free_rhs(w: &CartesianSlice) -> Result<CartesianSlice> {
    let n = w.nu.points;
    if n < 5 {
        return Err(Error::Lattice(format!("{n} ν points; the stencil needs at least 5")));
    }
    if w.values.len() != w.x.len() * w.mu.len() * n {
        return Err(Error::Lattice("value count does not match the (x, μ, ν) lattice".into()));
    }
    let h = w.nu.step();
    const CENTER: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    const EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let mut values = vec![0.0; w.values.len()];
    for (line, (out, inp)) in values.chunks_mut(n).zip(w.values.chunks(n)).enumerate() {
        let mu = w.mu[line % w.mu.len()];
        for i in 0..n {
            let (coef, base, sign) = match i {
                0 => (EDGE0, 0, 1.0),
                1 => (EDGE1, 0, 1.0),
                _ if i + 2 >= n => {
                    let e = if i + 1 == n { EDGE0 } else { EDGE1 };
                    (e, n - 5, -1.0)
                }
                _ => (CENTER, i - 2, 1.0),
            };
            let d: f64 = if sign > 0.0 {
                (0..5).map(|k| coef[k] * inp[base + k]).sum()
            } else {
                -(0..5).map(|k| coef[k] * inp[n - 1 - k]).sum::<f64>()
            };
            out[i] = mu * d / (12.0 * h);
        }
    }
    Ok(CartesianSlice { x: w.x.clone(), mu: w.mu.clone(), nu: w.nu.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::propagate::five_point;
    use crate::pauli::{analytic_trapped_solution, hybrid_marginal};
    use crate::qstate::{density_from_pure, random_density, BasisDescriptor, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_lattice() -> RingLattice {
        RingLattice { x: UniformGrid::new(-8.0, 8.0, 96), angles: 12, modes: 1, spin: true, n_alpha: 6, n_beta: 4 }
    }

    fn analytic_field(lat: &RingLattice, t: f64) -> HybridMarginal {
        let values = (0..lat.len())
            .map(|i| {
                let p = lat.point(i);
                analytic_trapped_solution(p.xs[0], p.frames[0], p.s, p.spin, t).unwrap()
            })
            .collect();
        HybridMarginal::new(lat.clone(), t, values).unwrap()
    }

    #[test]
    fn sampling_matches_pointwise_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis = BasisDescriptor::product(vec![BasisDescriptor::fock(3), BasisDescriptor::spin_half()]);
        let rho = random_density(basis, &mut rng).unwrap();
        let w = HybridMarginal::sample(&rho, small_lattice()).unwrap();
        assert!(w.max_deviation(|p| hybrid_marginal(&rho, p)).unwrap() < 1e-14);
        assert!(w.normalization_defect() < 1e-8);
    }

    #[test]
    fn spin_rhs_of_first_harmonic() {
        let grid = SphereGrid::new(8, 6);
        // w(±½) = ¼(1 ± sinβ cosα) + ¼: rhs = ±(a-c)/4 · sinβ sinα.
        let mut vals = Vec::new();
        for sign in [1.0, -1.0] {
            for &a in &grid.alphas {
                for &b in &grid.betas {
                    vals.push(0.25 * (1.0 + sign * b.sin() * a.cos()) + 0.25);
                }
            }
        }
        let w = SpinMarginal::new(HalfInt::HALF, 8, 6, vals).unwrap();
        let r = spin_rhs(&w, 1.5, -0.5).unwrap();
        let mut k = 0;
        for sign in [1.0, -1.0] {
            for &a in &grid.alphas {
                for &b in &grid.betas {
                    let want = sign * 2.0 / 4.0 * b.sin() * a.sin();
                    assert!((r.values[k] - want).abs() < 1e-12);
                    k += 1;
                }
            }
        }
        let half = r.values.len() / 2;
        for i in 0..half {
            assert!((r.values[i] + r.values[half + i]).abs() < 1e-12);
        }
        assert!(spin_rhs(&w, 0.3, 0.3).unwrap().values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn trapped_rhs_is_time_derivative_of_solution() {
        let lat = small_lattice();
        let rhs = trapped_rhs(&analytic_field(&lat, 0.3)).unwrap();
        let mut worst: f64 = 0.0;
        for (i, r) in rhs.iter().enumerate() {
            let p = lat.point(i);
            let dt = five_point(|t| analytic_trapped_solution(p.xs[0], p.frames[0], p.s, p.spin, t).unwrap(), 0.3, 1e-3);
            worst = worst.max((r - dt).abs());
        }
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn stationary_components_have_zero_rhs() {
        let lat = small_lattice();
        let basis = BasisDescriptor::product(vec![BasisDescriptor::fock(2), BasisDescriptor::spin_half()]);
        for k in [1, 2] {
            let rho = density_from_pure(&PureState::basis_state(basis.clone(), k).unwrap());
            let rhs = trapped_rhs(&HybridMarginal::sample(&rho, lat.clone()).unwrap()).unwrap();
            assert!(rhs.iter().all(|v| v.abs() < 1e-6));
        }
    }

    #[test]
    fn free_flow_misses_the_trapped_rotation() {
        let lat = small_lattice();
        let w = analytic_field(&lat, 0.0);
        let free = lattice_rhs(&HamiltonianSpec::Free, &w).unwrap();
        let trapped = trapped_rhs(&w).unwrap();
        let gap = free.iter().zip(&trapped).fold(0.0f64, |a, (f, t)| a.max((f - t).abs()));
        assert!(gap > 0.1);
    }

    #[test]
    fn spin_diag_never_mixes_sectors() {
        let lat = small_lattice();
        let mut w = analytic_field(&lat, 0.0);
        let block = lat.n_alpha * lat.n_beta;
        // Zero the s = -½ sector; its rhs must stay zero.
        for chunk in w.values.chunks_mut(2 * block) {
            chunk[block..].iter_mut().for_each(|v| *v = 0.0);
        }
        let rhs = lattice_rhs(&HamiltonianSpec::SpinDiag { a: 2.0, c: 0.5 }, &w).unwrap();
        for chunk in rhs.chunks(2 * block) {
            assert!(chunk[block..].iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn free_rhs_on_cartesian_slice() {
        let gauss = |x: f64, mu: f64, nu: f64| {
            let s2 = mu * mu + nu * nu;
            (-x * x / s2).exp() / (std::f64::consts::PI * s2).sqrt()
        };
        let slice = CartesianSlice::sample(vec![-0.5, 0.3], vec![0.8, 1.2], UniformGrid::new(-1.0, 1.0, 81), gauss);
        let r = free_rhs(&slice).unwrap();
        let nus = slice.nu.nodes();
        let mut k = 0;
        for &x in &slice.x {
            for &mu in &slice.mu {
                for &nu in &nus {
                    let want = mu * five_point(|n| gauss(x, mu, n), nu, 1e-4);
                    assert!((r.values[k] - want).abs() < 1e-6, "{} vs {want}", r.values[k]);
                    k += 1;
                }
            }
        }
        let flat = CartesianSlice::sample(vec![0.0], vec![1.0], UniformGrid::new(0.0, 1.0, 5), |x, _, _| x + 1.0);
        assert!(free_rhs(&flat).unwrap().values.iter().all(|v| v.abs() < 1e-12));
        let tiny = CartesianSlice::sample(vec![0.0], vec![1.0], UniformGrid::new(0.0, 1.0, 4), |_, _, _| 1.0);
        assert!(matches!(free_rhs(&tiny), Err(Error::Lattice(_))));
    }
}
