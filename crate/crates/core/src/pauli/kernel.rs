//! The evolution kernel `Θ` and its action on a marginal given as a function.
//!
//! For quadratic Hamiltonians `Θ` is a distribution: a local first-order
//! operator in the frame variables (plus, when modes are coupled, a
//! cumulative-integral term in `x`) and a separable spin integral. The
//! regular parts are returned as numbers; the local part is described by
//! the flow field at the target point.

use crate::quadrature::{gauss_legendre_on, SphereGrid};
use crate::spintomo::EulerFrame;
use crate::symtomo::SymplecticFrame;
use crate::{Error, Result};

use super::{HamiltonianSpec, HybridPoint};

/// Symbolic value of `Θ(to, from)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaKernel {
    /// Coefficient of `δ(x⃗ - x⃗')δ(σ - σ')` in the spin term:
    /// `3(a - c) sinβ sinβ' sin(α - α') δ_{ss'}` (measure `dΩ'/8π²`).
    pub spin_term: f64,
    /// Frame flow `dσ/dt` at `to`, `(μ1, ν1, μ2, ν2)` truncated to the
    /// number of modes. The local term is `Σ flow_k ∂_{σ_k}` acting on
    /// `δ(Ω - Ω')δ_{ss'}`.
    pub flow: Vec<f64>,
    /// Whether the modes are coupled, which adds a cumulative-integral term
    /// in `x` to the local part.
    pub mode_coupling: bool,
}

fn frame_vector(p: &HybridPoint) -> Vec<f64> {
    p.frames.iter().flat_map(|f| [f.mu, f.nu]).collect()
}

fn check_modes(h: &HamiltonianSpec, p: &HybridPoint) -> Result<()> {
    let want = h.spatial_modes();
    if want != 0 && p.xs.len() != want {
        return Err(Error::Lattice(format!("{} needs {} modes, point has {}", h.name(), want, p.xs.len())));
    }
    Ok(())
}

/// `Θ(to, from)` for the supported Hamiltonians.
pub fn theta_kernel(h: &HamiltonianSpec, to: &HybridPoint, from: &HybridPoint) -> Result<ThetaKernel> {
    h.validate()?;
    check_modes(h, to)?;
    check_modes(h, from)?;
    let spin_term = if to.s == from.s {
        h.spin_coefficient()
            * to.spin.beta.sin()
            * from.spin.beta.sin()
            * (to.spin.alpha - from.spin.alpha).sin()
    } else {
        0.0
    };
    let g = h.frame_generator();
    let sigma = frame_vector(to);
    let flow = (0..sigma.len())
        .map(|r| (0..sigma.len()).map(|k| g[r][k] * sigma[k]).sum())
        .collect();
    Ok(ThetaKernel { spin_term, flow, mode_coupling: matches!(h, HamiltonianSpec::Landau) })
}

/// Step and node counts used by [`apply_theta`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApplyOptions {
    /// Finite-difference step in frame variables and `x`.
    pub step: f64,
    /// Lower limit of the cumulative `x` integrals.
    pub x_min: f64,
    /// Gauss–Legendre nodes for the cumulative integrals.
    pub nodes: usize,
}

impl Default for ApplyOptions {
    fn default() -> Self {
        Self { step: 1e-3, x_min: -10.0, nodes: 96 }
    }
}

fn shifted(p: &HybridPoint, dir: &[f64], eps: f64) -> Result<HybridPoint> {
    let mut q = p.clone();
    for (k, f) in q.frames.iter_mut().enumerate() {
        *f = SymplecticFrame::new(f.mu + eps * dir[2 * k], f.nu + eps * dir[2 * k + 1])?;
    }
    Ok(q)
}

fn five_point<F: Fn(f64) -> Result<f64>>(f: F, h: f64) -> Result<f64> {
    Ok((f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h))
}

/// Mode `k` frame rotated by `dθ` at fixed radius.
fn rotated(p: &HybridPoint, k: usize, dtheta: f64) -> Result<HybridPoint> {
    let mut q = p.clone();
    let f = q.frames[k];
    let (s, c) = dtheta.sin_cos();
    q.frames[k] = SymplecticFrame::new(c * f.mu - s * f.nu, s * f.mu + c * f.nu)?;
    Ok(q)
}

/// `∂_t w` at `p` for a marginal supplied as a function, i.e. `Θ` applied
/// to `w` with every derivative taken by finite differences and every
/// integral by quadrature.
pub fn apply_theta<W>(h: &HamiltonianSpec, w: &W, p: &HybridPoint, opts: ApplyOptions) -> Result<f64>
where
    W: Fn(&HybridPoint) -> Result<f64>,
{
    h.validate()?;
    check_modes(h, p)?;
    let spatial = match h {
        HamiltonianSpec::SpinDiag { .. } => 0.0,
        HamiltonianSpec::Free | HamiltonianSpec::Trapped => {
            let kernel = theta_kernel(h, p, p)?;
            five_point(|e| w(&shifted(p, &kernel.flow, e)?), opts.step)?
        }
        HamiltonianSpec::Landau => landau_spatial(w, p, opts)?,
    };
    Ok(spatial + spin_integral(h, w, p)?)
}

/// Spin term `3(a - c) sinβ ∫ dΩ'/8π² w(α', β') sinβ' sin(α - α')`.
///
/// Spin-½ marginals are first harmonics on the sphere, so a 4×4 product
/// rule integrates the moments exactly.
fn spin_integral<W>(h: &HamiltonianSpec, w: &W, p: &HybridPoint) -> Result<f64>
where
    W: Fn(&HybridPoint) -> Result<f64>,
{
    let coeff = h.spin_coefficient();
    if coeff == 0.0 {
        return Ok(0.0);
    }
    let grid = SphereGrid::new(4, 4);
    let mut acc = 0.0;
    for (ia, &a) in grid.alphas.iter().enumerate() {
        for (ib, &b) in grid.betas.iter().enumerate() {
            let mut q = p.clone();
            q.spin = EulerFrame::new(a, b, 0.0);
            acc += grid.group_weight(ia, ib) * w(&q)? * b.sin() * (p.spin.alpha - a).sin();
        }
    }
    Ok(coeff * p.spin.beta.sin() * acc)
}

/// Spatial part of the Landau generator at `p`:
/// intra-mode rotations, the coupled radial term
/// `(σ1·σ2)(x1 ∂_{x2}/r1² - x2 ∂_{x1}/r2²) w`, and the cumulative terms
/// `-(σ1⊥·σ2/r1²) ∂_{x2} ∫^{x1} ∂_{θ1} w + (σ2⊥·σ1/r2²) ∂_{x1} ∫^{x2} ∂_{θ2} w`.
fn landau_spatial<W>(w: &W, p: &HybridPoint, opts: ApplyOptions) -> Result<f64>
where
    W: Fn(&HybridPoint) -> Result<f64>,
{
    let h = opts.step;
    let [s1, s2] = [p.frames[0], p.frames[1]];
    let rot = |k: usize| five_point(|e| w(&rotated(p, k, e)?), h);
    let at_x = |k: usize, dx: f64| {
        let mut q = p.clone();
        q.xs[k] += dx;
        q
    };
    let dx = |k: usize| five_point(|e| w(&at_x(k, e)), h);
    let r1 = s1.mu * s1.mu + s1.nu * s1.nu;
    let r2 = s2.mu * s2.mu + s2.nu * s2.nu;
    let dot = s1.mu * s2.mu + s1.nu * s2.nu;
    let perp12 = -s1.nu * s2.mu + s1.mu * s2.nu;
    let perp21 = -s2.nu * s1.mu + s2.mu * s1.nu;
    let (x1, x2) = (p.xs[0], p.xs[1]);
    let mut out = rot(0)? + rot(1)?;
    out += dot * (x1 / r1 * dx(1)? - x2 / r2 * dx(0)?);
    out -= perp12 / r1 * cumulative_mixed(w, p, 0, opts)?;
    out += perp21 / r2 * cumulative_mixed(w, p, 1, opts)?;
    Ok(out)
}

/// `∂_{x_other} ∫_{x_min}^{x_k} ∂_{θ_k} w dx_k'`.
fn cumulative_mixed<W>(w: &W, p: &HybridPoint, k: usize, opts: ApplyOptions) -> Result<f64>
where
    W: Fn(&HybridPoint) -> Result<f64>,
{
    let other = 1 - k;
    let upper = p.xs[k];
    if upper <= opts.x_min {
        return Ok(0.0);
    }
    let (nodes, weights) = gauss_legendre_on(opts.nodes, opts.x_min, upper);
    let e = opts.step;
    let mut acc = 0.0;
    for (y, wt) in nodes.into_iter().zip(weights) {
        let mut sum = 0.0;
        for (sx, st, sign) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
            let mut q = rotated(p, k, st * e)?;
            q.xs[k] = y;
            q.xs[other] += sx * e;
            sum += sign * w(&q)?;
        }
        acc += wt * sum / (4.0 * e * e);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landau::TwoModeFrame;
    use crate::oracle::propagate::{five_point as dt5, vonneumann_evolve};
    use crate::pauli::{analytic_landau_solution, analytic_trapped_solution, hybrid_marginal};
    use crate::qstate::{density_from_pure, random_pure, BasisDescriptor};
    use crate::specfun::HalfInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn point1(x: f64, mu: f64, nu: f64, s: HalfInt, a: f64, b: f64) -> HybridPoint {
        HybridPoint::single(x, SymplecticFrame::new(mu, nu).unwrap(), s, EulerFrame::new(a, b, 0.0)).unwrap()
    }

    #[test]
    fn spin_diag_with_equal_levels_has_no_spin_term() {
        let p = point1(0.1, 1.0, 0.5, HalfInt::HALF, 0.3, 1.2);
        let q = point1(0.1, 1.0, 0.5, HalfInt::HALF, 2.0, 0.4);
        let k = theta_kernel(&HamiltonianSpec::SpinDiag { a: 0.7, c: 0.7 }, &p, &q).unwrap();
        assert_eq!(k.spin_term, 0.0);
    }

    #[test]
    fn free_kernel_on_vacuum_is_nu_derivative() {
        let vac = |q: &HybridPoint| {
            let f = q.frames[0];
            let s2 = f.mu * f.mu + f.nu * f.nu;
            Ok((-q.xs[0] * q.xs[0] / s2).exp() / (std::f64::consts::PI * s2).sqrt())
        };
        let p = point1(0.6, 0.8, 0.3, HalfInt::HALF, 0.0, 0.0);
        let got = apply_theta(&HamiltonianSpec::Free, &vac, &p, ApplyOptions::default()).unwrap();
        let want = 0.8 * dt5(|nu| vac(&point1(0.6, 0.8, nu, HalfInt::HALF, 0.0, 0.0)).unwrap(), 0.3, 1e-3);
        assert!((got - want).abs() < 1e-9);
    }

    #[test]
    fn trapped_kernel_reproduces_time_derivative() {
        for &(x, mu, nu, s, a, b) in &[(0.4, 0.9, 0.5, HalfInt::HALF, 0.3, 1.0), (-1.1, -0.3, 1.2, -HalfInt::HALF, 2.0, 2.5)] {
            let p = point1(x, mu, nu, s, a, b);
            let w = |q: &HybridPoint| analytic_trapped_solution(q.xs[0], q.frames[0], q.s, q.spin, 0.0);
            let rhs = apply_theta(&HamiltonianSpec::Trapped, &w, &p, ApplyOptions::default()).unwrap();
            let dt = dt5(|t| analytic_trapped_solution(x, p.frames[0], s, p.spin, t).unwrap(), 0.0, 1e-3);
            assert!((rhs - dt).abs() < 1e-8, "{rhs} vs {dt}");
        }
    }

    #[test]
    fn free_kernel_matches_oracle_for_random_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let basis = BasisDescriptor::product(vec![BasisDescriptor::fock(4), BasisDescriptor::spin_half()]);
        let mut v = random_pure(basis.clone(), &mut rng).unwrap().amplitudes().clone();
        for k in 0..2 {
            v[6 + k] = crate::c(0.0, 0.0);
        }
        let mut big = nalgebra::DVector::zeros(2 * 40);
        big.rows_mut(0, 8).copy_from(&v);
        let basis = BasisDescriptor::product(vec![BasisDescriptor::fock(40), BasisDescriptor::spin_half()]);
        let rho = density_from_pure(&crate::qstate::PureState::normalized(basis, big).unwrap());
        let p = point1(0.3, 0.7, -0.6, HalfInt::HALF, 0.5, 0.8);
        let at = |t: f64| {
            let r = vonneumann_evolve(&rho, &HamiltonianSpec::Free, t, 1e-8).unwrap().rho_t;
            move |q: &HybridPoint| hybrid_marginal(&r, q)
        };
        let rhs = apply_theta(&HamiltonianSpec::Free, &at(0.0), &p, ApplyOptions::default()).unwrap();
        let dt = dt5(|t| at(t)(&p).unwrap(), 0.0, 1e-3);
        assert!((rhs - dt).abs() < 1e-7, "{rhs} vs {dt}");
    }

    #[test]
    fn landau_kernel_reproduces_time_derivative() {
        let frame = TwoModeFrame::new(0.6, 0.8, -0.3, 1.1).unwrap();
        let p = HybridPoint::new(vec![0.4, -0.3], frame.modes().to_vec(), HalfInt::HALF, EulerFrame::new(1.0, 0.9, 0.0)).unwrap();
        let w = |q: &HybridPoint| {
            let f = TwoModeFrame { mu1: q.frames[0].mu, nu1: q.frames[0].nu, mu2: q.frames[1].mu, nu2: q.frames[1].nu };
            analytic_landau_solution(q.xs[0], q.xs[1], f, q.s, q.spin, 0.2)
        };
        let rhs = apply_theta(&HamiltonianSpec::Landau, &w, &p, ApplyOptions::default()).unwrap();
        let dt = dt5(|t| analytic_landau_solution(0.4, -0.3, frame, HalfInt::HALF, p.spin, t).unwrap(), 0.2, 1e-3);
        assert!((rhs - dt).abs() < 1e-6, "{rhs} vs {dt}");
    }
}
