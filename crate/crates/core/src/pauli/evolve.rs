use serde::{Deserialize, Serialize};

use crate::qstate::DensityMatrix;
use crate::{Error, Result};

use super::lattice::{lattice_rhs, HybridMarginal, RingLattice};
use super::HamiltonianSpec;

/// Largest step allowed: 40 steps per period of the fastest phase.
pub fn max_step(h: &HamiltonianSpec) -> f64 {
    let rate = match h {
        HamiltonianSpec::Free => 1.0,
        HamiltonianSpec::SpinDiag { a, c } => (a - c).abs().max(1.0),
        HamiltonianSpec::Trapped => super::TRAPPED_RATE,
        HamiltonianSpec::Landau => super::LANDAU_RATE,
    };
    2.0 * std::f64::consts::PI / (40.0 * rate)
}

/// Relative norm drift that aborts a run.
pub const INSTABILITY_DRIFT: f64 = 0.1;

#[derive(Clone, Debug)]
pub struct EvolutionProblem {
    pub hamiltonian: HamiltonianSpec,
    pub initial: DensityMatrix,
    pub lattice: RingLattice,
    /// Requested step; clamped to [`max_step`].
    pub dt: f64,
    /// Snapshot times, ascending, all ≥ 0.
    pub snapshots: Vec<f64>,
    /// Allows Landau runs on the full two-mode lattice.
    pub full_landau: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvolutionResult {
    pub snapshots: Vec<HybridMarginal>,
    pub steps: usize,
    /// Largest `|mean norm(t) - mean norm(0)|` seen at any step.
    pub norm_drift: f64,
}

fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(yv, xv)| yv + a * xv).collect()
}

fn rk4_step(h: &HamiltonianSpec, w: &HybridMarginal, dt: f64) -> Result<Vec<f64>> {
    let at = |vals: Vec<f64>| HybridMarginal { lattice: w.lattice.clone(), time: w.time, values: vals };
    let k1 = lattice_rhs(h, w)?;
    let k2 = lattice_rhs(h, &at(axpy(0.5 * dt, &k1, &w.values)))?;
    let k3 = lattice_rhs(h, &at(axpy(0.5 * dt, &k2, &w.values)))?;
    let k4 = lattice_rhs(h, &at(axpy(dt, &k3, &w.values)))?;
    Ok(w.values
        .iter()
        .enumerate()
        .map(|(i, v)| v + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Integrates `∂_t w = Θ w` by RK4 from the sampled initial state and
/// returns the marginal at every requested time.
pub fn evolve(problem: &EvolutionProblem) -> Result<EvolutionResult> {
    let h = &problem.hamiltonian;
    h.validate()?;
    if matches!(h, HamiltonianSpec::Landau) && !problem.full_landau {
        return Err(Error::UnsupportedHamiltonian(
            "landau lattice evolution is off by default; set full_landau (large lattice) or use the pointwise check".into(),
        ));
    }
    if !(problem.dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {}", problem.dt)));
    }
    if problem.snapshots.iter().any(|t| !(*t >= 0.0)) || problem.snapshots.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::Config("snapshot times must be non-negative and ascending".into()));
    }
    let dt_max = problem.dt.min(max_step(h));
    let mut w = HybridMarginal::sample(&problem.initial, problem.lattice.clone())?;
    let norm0 = w.mean_norm();
    let mut drift: f64 = 0.0;
    let mut steps = 0;
    let mut out = Vec::with_capacity(problem.snapshots.len());
    for &target in &problem.snapshots {
        let start = w.time;
        let span = target - start;
        let n = (span / dt_max).ceil() as usize;
        for k in 0..n {
            let dt = span / n as f64;
            w.values = rk4_step(h, &w, dt)?;
            w.time = start + dt * (k + 1) as f64;
            steps += 1;
            let norm = w.mean_norm();
            drift = drift.max((norm - norm0).abs());
            if !norm.is_finite() || (norm - norm0).abs() > INSTABILITY_DRIFT * norm0.abs() {
                return Err(Error::Unstable { time: w.time, norm });
            }
        }
        w.time = target;
        out.push(w.clone());
    }
    Ok(EvolutionResult { snapshots: out, steps, norm_drift: drift })
}
