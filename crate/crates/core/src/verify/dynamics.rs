//! Criteria that evolve a state.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{report, worst, CriterionReport, ToleranceProfile};
use crate::landau::{landau_level_marginal, TwoModeFrame};
use crate::oracle::marginal::{chirp_marginal_2d, hermite_functions};
use crate::oracle::propagate::{five_point, residual_check, vonneumann_evolve, DEFAULT_LEAK_THRESHOLD};
use crate::pauli::{
    analytic_landau_solution_with_rate, analytic_trapped_solution, apply_theta, evolve, free_rhs,
    hybrid_marginal, landau_initial_state, trapped_initial_state, ApplyOptions, CartesianSlice, EvolutionProblem,
    HamiltonianSpec, HybridPoint, RingLattice, LANDAU_PRINTED_RATE, LANDAU_RATE, TRAPPED_RATE,
};
use crate::qstate::{density_from_pure, landau_fock_state, BasisDescriptor, DensityMatrix, PureState};
use crate::quadrature::UniformGrid;
use crate::specfun::HalfInt;
use crate::spintomo::EulerFrame;
use crate::symtomo::{marginal_1d, SymplecticFrame};
use crate::{c, CMatrix, CVector, Result};

/// Truncated coherent state `|α⟩`.
fn coherent(alpha: crate::Complex64, levels: usize) -> Result<DensityMatrix> {
    let mut v = CVector::zeros(levels);
    let mut term = c((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..levels {
        v[n] = term;
        term *= alpha / ((n + 1) as f64).sqrt();
    }
    Ok(density_from_pure(&PureState::normalized(BasisDescriptor::fock(levels), v)?))
}

/// Oracle states at `t + k·h` for `k = -2..=2`.
fn stencil(rho: &DensityMatrix, h: &HamiltonianSpec, t: f64, step: f64) -> Result<Vec<DensityMatrix>> {
    (-2..=2)
        .map(|k| Ok(vonneumann_evolve(rho, h, t + k as f64 * step, DEFAULT_LEAK_THRESHOLD)?.rho_t))
        .collect()
}

fn time_derivative(states: &[DensityMatrix], step: f64, w: impl Fn(&DensityMatrix) -> Result<f64>) -> Result<f64> {
    let v = states.iter().map(w).collect::<Result<Vec<_>>>()?;
    Ok((v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * step))
}

/// Free particle: oracle time derivative against `μ ∂_ν w`.
pub fn criterion_5(p: ToleranceProfile) -> Vec<CriterionReport> {
    let tol = 1e-5 * p.scale();
    let (t, step) = (0.6, 1e-2);
    let states = coherent(c(0.6, -0.4), 60).and_then(|rho| stencil(&rho, &HamiltonianSpec::Free, t, step));
    let states = match states {
        Ok(s) => s,
        Err(e) => return vec![CriterionReport::errored("5", "free evolution vs mu d/dnu", tol, &e)],
    };
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let pointwise = worst((0..20).map(|_| {
        let f = SymplecticFrame::from_polar(r.gen_range(0.6..1.4), r.gen_range(0.0..2.0 * PI))?;
        let x = r.gen_range(-2.0..2.0);
        let lhs = time_derivative(&states, step, |rho| marginal_1d(rho, x, f))?;
        let at = |nu: f64| marginal_1d(&states[2], x, SymplecticFrame { mu: f.mu, nu }).unwrap_or(f64::NAN);
        Ok((lhs - f.mu * five_point(at, f.nu, 1e-3)).abs())
    }));
    let slice = (|| -> Result<f64> {
        let nu = UniformGrid::new(-1.0, 1.0, 201);
        let (xs, mus) = (vec![-1.0, 0.5], vec![0.7, -1.1]);
        let sample = |rho: &DensityMatrix| {
            CartesianSlice::sample(xs.clone(), mus.clone(), nu.clone(), |x, mu, nu| {
                marginal_1d(rho, x, SymplecticFrame { mu, nu }).unwrap_or(f64::NAN)
            })
        };
        let slices: Vec<CartesianSlice> = states.iter().map(sample).collect();
        let rhs = free_rhs(&slices[2])?;
        let lhs: Vec<f64> = (0..rhs.values.len())
            .map(|i| {
                let v: Vec<f64> = slices.iter().map(|s| s.values[i]).collect();
                (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * step)
            })
            .collect();
        residual_check(&lhs, &rhs.values)
    })();
    vec![
        report("5a", "free evolution: oracle dw/dt vs mu dw/dnu", tol, pointwise),
        report("5b", "free evolution: lattice stencil vs oracle dw/dt", tol, slice),
    ]
}

/// Residual of the best fit `a + b cos ωt + c sin ωt` summed over every series.
fn fit_residual(times: &[f64], series: &[Vec<f64>], omega: f64) -> f64 {
    let basis: Vec<Vector3<f64>> = times.iter().map(|&t| Vector3::new(1.0, (omega * t).cos(), (omega * t).sin())).collect();
    let gram: Matrix3<f64> = basis.iter().map(|b| b * b.transpose()).sum();
    let Some(inv) = gram.try_inverse() else { return f64::INFINITY };
    series
        .iter()
        .map(|y| {
            let rhs: Vector3<f64> = basis.iter().zip(y).map(|(b, &v)| b * v).sum();
            let coef = inv * rhs;
            basis.iter().zip(y).map(|(b, &v)| (v - coef.dot(b)).powi(2)).sum::<f64>()
        })
        .sum()
}

/// Least-squares angular frequency of a family of sampled sinusoids, searched
/// on `[lo, hi]`.
pub fn fit_frequency(times: &[f64], series: &[Vec<f64>], lo: f64, hi: f64) -> f64 {
    let n = 1000;
    let grid_step = (hi - lo) / n as f64;
    let coarse = (0..=n)
        .map(|k| lo + k as f64 * grid_step)
        .map(|w| (w, fit_residual(times, series, w)))
        .fold((lo, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    // Golden-section refinement around the best grid point.
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (coarse.0 - grid_step, coarse.0 + grid_step);
    for _ in 0..60 {
        let (c1, c2) = (b - g * (b - a), a + g * (b - a));
        if fit_residual(times, series, c1) < fit_residual(times, series, c2) {
            b = c2;
        } else {
            a = c1;
        }
    }
    0.5 * (a + b)
}

/// Trapped electron on the ring lattice against the closed form, and the
/// oscillation frequency of the spin-orbit cross term.
pub fn criterion_6(p: ToleranceProfile) -> Vec<CriterionReport> {
    let (tol_w, tol_f) = (1e-3 * p.scale(), 1e-2 * p.scale());
    let times: Vec<f64> = (1..=40).map(|k| 0.05 * k as f64).collect();
    let run = trapped_initial_state(2).and_then(|initial| {
        evolve(&EvolutionProblem {
            hamiltonian: HamiltonianSpec::Trapped,
            initial,
            lattice: RingLattice::single_mode(),
            dt: 0.05,
            snapshots: times.clone(),
            full_landau: false,
        })
    });
    let run = match run {
        Ok(r) => r,
        Err(e) => {
            return vec![
                CriterionReport::errored("6a", "trapped lattice run vs closed form", tol_w, &e),
                CriterionReport::errored("6b", "cross-term frequency", tol_f, &e),
            ]
        }
    };
    let deviation = worst(run.snapshots.iter().map(|snap| {
        snap.max_deviation(|q| analytic_trapped_solution(q.xs[0], q.frames[0], q.s, q.spin, snap.time))
    }));
    let probes: Vec<usize> = (0..run.snapshots[0].values.len()).step_by(997).collect();
    let series: Vec<Vec<f64>> = probes.iter().map(|&i| run.snapshots.iter().map(|s| s.values[i]).collect()).collect();
    let omega = fit_frequency(&times, &series, 0.5, 6.0);
    vec![
        report("6a", "trapped lattice run vs closed form, t <= 2", tol_w, deviation)
            .with_detail(format!("norm drift {:.1e}", run.norm_drift)),
        report("6b", "trapped cross-term frequency |omega - 3|", tol_f, Ok((omega - TRAPPED_RATE).abs()))
            .with_detail(format!("omega = {omega:.6}")),
    ]
}

const LANDAU_FRAMES: [([f64; 2], [f64; 4]); 3] =
    [([0.4, -0.3], [0.6, 0.8, -0.3, 1.1]), ([-1.0, 0.8], [-0.5, 0.9, 0.7, 0.75]), ([1.3, 0.2], [0.2, 1.2, 0.4, -0.9])];

fn landau_frames() -> Result<Vec<([f64; 2], TwoModeFrame)>> {
    LANDAU_FRAMES.iter().map(|&(x, f)| Ok((x, TwoModeFrame::new(f[0], f[1], f[2], f[3])?))).collect()
}

/// Landau-level marginals against chirp quadrature of the wavefunctions.
fn landau_levels() -> Result<f64> {
    let levels = 5;
    let grid = UniformGrid::new(-9.0, 9.0, 361);
    let table: Vec<Vec<f64>> = grid.nodes().iter().map(|&y| hermite_functions(levels, y)).collect();
    let frames = landau_frames()?;
    let cases: Vec<(usize, usize)> = (0..=2).flat_map(|n| (0..=2).map(move |np| (n, np))).collect();
    worst(
        cases
            .par_iter()
            .map(|&(n, np)| {
                let psi = landau_fock_state(n, np, levels)?;
                let amps = psi.amplitudes();
                let wave = CMatrix::from_fn(grid.points, grid.points, |i, k| {
                    let mut acc = c(0.0, 0.0);
                    for k1 in 0..levels {
                        for k2 in 0..levels {
                            acc += amps[k1 * levels + k2] * table[i][k1] * table[k][k2];
                        }
                    }
                    acc
                });
                worst(frames.iter().map(|&(x, f)| {
                    let want = chirp_marginal_2d(&wave, &grid, x, [(f.mu1, f.nu1), (f.mu2, f.nu2)])?;
                    Ok((landau_level_marginal(n, np, x[0], x[1], f)? - want).abs())
                }))
            })
            .collect::<Vec<_>>(),
    )
}

fn point(x: [f64; 2], f: TwoModeFrame, s: HalfInt, spin: EulerFrame) -> Result<HybridPoint> {
    HybridPoint::new(x.to_vec(), f.modes().to_vec(), s, spin)
}

/// Oracle evolution against the closed form at the given cross-term rate.
fn landau_closed_form(rho: &DensityMatrix, rate: f64) -> Result<f64> {
    let frames = landau_frames()?;
    let spin = EulerFrame::new(1.0, 0.9, 0.0);
    let mut err = 0.0f64;
    for t in [0.2, 0.4] {
        let rho_t = vonneumann_evolve(rho, &HamiltonianSpec::Landau, t, DEFAULT_LEAK_THRESHOLD)?.rho_t;
        for &(x, f) in &frames {
            for s in [HalfInt::HALF, HalfInt::from_twice(-1)] {
                let want = hybrid_marginal(&rho_t, &point(x, f, s, spin)?)?;
                let got = analytic_landau_solution_with_rate(x[0], x[1], f, s, spin, t, rate)?;
                err = err.max((got - want).abs());
            }
        }
    }
    Ok(err)
}

/// Oracle time derivative against the evolution generator applied pointwise.
fn landau_generator(rho: &DensityMatrix) -> Result<f64> {
    let (t, step) = (0.2, 1e-2);
    let states = stencil(rho, &HamiltonianSpec::Landau, t, step)?;
    let spin = EulerFrame::new(1.0, 0.9, 0.0);
    let frames = landau_frames()?;
    worst(
        frames
            .par_iter()
            .map(|&(x, f)| {
                let q = point(x, f, HalfInt::HALF, spin)?;
                let lhs = time_derivative(&states, step, |r| hybrid_marginal(r, &q))?;
                let w = |p: &HybridPoint| hybrid_marginal(&states[2], p);
                let rhs = apply_theta(&HamiltonianSpec::Landau, &w, &q, ApplyOptions::default())?;
                Ok((lhs - rhs).abs())
            })
            .collect::<Vec<_>>(),
    )
}

/// Landau problem: level marginals, closed-form evolution and the generator.
pub fn criterion_7(p: ToleranceProfile) -> Vec<CriterionReport> {
    let s = p.scale();
    let rho = landau_initial_state(6);
    let with_rho = |f: &dyn Fn(&DensityMatrix) -> Result<f64>| match &rho {
        Ok(r) => f(r),
        Err(e) => Err(crate::Error::Invariant(e.to_string())),
    };
    vec![
        report("7a", "Landau level marginals vs chirp quadrature", 1e-6 * s, landau_levels()),
        report("7b", "Landau closed form (rate 4) vs oracle", 1e-4 * s, with_rho(&|r| landau_closed_form(r, LANDAU_RATE))),
        report("7c", "Landau generator vs oracle dw/dt", 1e-5 * s, with_rho(&landau_generator)),
        report("7d", "Landau closed form at rate 3 vs oracle", 1e-4 * s, with_rho(&|r| landau_closed_form(r, LANDAU_PRINTED_RATE)))
            .informational(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_fit_recovers_known_rate() {
        let times: Vec<f64> = (1..=40).map(|k| 0.05 * k as f64).collect();
        let series = vec![
            times.iter().map(|t| 0.3 + 0.1 * (2.7 * t + 0.4).cos()).collect(),
            times.iter().map(|t| -0.2 * (2.7 * t).sin()).collect(),
        ];
        assert!((fit_frequency(&times, &series, 0.5, 6.0) - 2.7).abs() < 1e-8);
    }

    #[test]
    fn coherent_state_is_normalized() {
        let rho = coherent(c(0.6, -0.4), 30).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }
}

