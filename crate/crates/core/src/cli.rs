//! Command-line front end: config parsing, command dispatch and exit codes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use crate::io::{
    hybrid_to_csv, quadrature_from_csv, quadrature_to_csv, read_state, render_density, spin_from_csv, spin_to_csv,
    CsvTable, RunManifest,
};
use crate::oracle::propagate::vonneumann_evolve;
use crate::pauli::{
    analytic_landau_solution, analytic_trapped_solution, evolve, hybrid_marginal, EvolutionProblem, HamiltonianSpec,
    HybridMarginal, RingLattice,
};
use crate::landau::TwoModeFrame;
use crate::qstate::{pad_fock, DensityMatrix};
use crate::quadrature::SphereGrid;
use crate::spintomo::{reconstruct_spin_density_with, SpinMarginal};
use crate::symtomo::{reconstruct_density_with, sample_circle, CircleLattice};
use crate::verify::{run_suite, Suite, ToleranceProfile};
use crate::{Error, Result};

/// Exit code for a run whose results failed an invariant check.
pub const EXIT_INVARIANT: i32 = 1;
/// Exit code for malformed input or usage errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tomoprob", version, about = "Tomographic-probability marginals: forward maps, reconstruction and evolution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory for tables and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value = "default", value_parser = parse_profile)]
    pub tolerance_profile: ToleranceProfile,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the marginal of a state on a frame lattice.
    Marginal {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rebuild a density matrix from a marginal table.
    Reconstruct {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evolve a hybrid marginal on a ring lattice.
    Evolve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a self-check suite.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
}

fn parse_profile(s: &str) -> std::result::Result<ToleranceProfile, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Config(_) | Error::Io(_) | Error::Lattice(_) | Error::Basis(_) => EXIT_USAGE,
        _ => EXIT_INVARIANT,
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    #[serde(default = "Checks::default_normalization")]
    pub normalization: f64,
    #[serde(default = "Checks::default_min_value")]
    pub min_value: f64,
}

impl Checks {
    fn default_normalization() -> f64 {
        1e-6
    }

    fn default_min_value() -> f64 {
        -1e-10
    }
}

impl Default for Checks {
    fn default() -> Self {
        Self { normalization: Self::default_normalization(), min_value: Self::default_min_value() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarginalLattice {
    Spin { n_alpha: usize, n_beta: usize },
    Circle(CircleLattice),
    Hybrid(RingLattice),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalConfig {
    pub state: PathBuf,
    pub lattice: MarginalLattice,
    #[serde(default)]
    pub checks: Checks,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    pub input: PathBuf,
    /// Fock truncation for quadrature tables.
    pub levels: Option<usize>,
    /// Largest accepted Hermiticity defect before symmetrization.
    pub threshold: Option<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Closed form of the trapped or Landau example.
    Analytic,
    /// Dense von Neumann propagation of the initial state.
    Oracle,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Validation {
    pub reference: Reference,
    #[serde(default = "Validation::default_tolerance")]
    pub tolerance: f64,
    /// Fock levels per mode for the oracle; the state is zero-padded.
    pub oracle_levels: Option<usize>,
}

impl Validation {
    fn default_tolerance() -> f64 {
        1e-3
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub state: PathBuf,
    pub hamiltonian: HamiltonianSpec,
    pub lattice: RingLattice,
    pub dt: f64,
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub full_landau: bool,
    pub validate: Option<Validation>,
}

/// A config file with its raw text and directory.
struct Loaded<T> {
    config: T,
    text: String,
    dir: PathBuf,
}

/// Parses one run config, reporting the line of the first error.
pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| crate::io::toml_error(text, e))
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<Loaded<T>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let config = parse_config(&text)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { config, text, dir })
}

fn load_state(path: &Path) -> Result<DensityMatrix> {
    match read_state(path) {
        Err(Error::Io(e)) => Err(Error::Config(format!("cannot read state {}: {e}", path.display()))),
        other => other,
    }
}

fn resolve(dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

/// Result of a successful command: whether every check passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub passed: bool,
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        // A global pool can only be installed once per process; later calls keep the first.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let scale = cli.tolerance_profile.scale();
    match &cli.command {
        Command::Marginal { config } => cmd_marginal(config, &cli.out, scale),
        Command::Reconstruct { config } => cmd_reconstruct(config, &cli.out, scale),
        Command::Evolve { config } => cmd_evolve(config, &cli.out, scale),
        Command::Verify { suite } => cmd_verify(*suite, cli.tolerance_profile, &cli.out),
    }
}

fn prepare_out(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    Ok(())
}

fn cmd_marginal(path: &Path, out: &Path, scale: f64) -> Result<Outcome> {
    let start = Instant::now();
    let Loaded { config, text, dir } = load::<MarginalConfig>(path)?;
    let rho = load_state(&resolve(&dir, &config.state))?;
    let checks = Checks { normalization: config.checks.normalization * scale, min_value: config.checks.min_value };
    let (name, table, grids, defect, min) = match &config.lattice {
        MarginalLattice::Spin { n_alpha, n_beta } => {
            if *n_alpha == 0 || *n_beta == 0 {
                return Err(Error::Lattice("empty sphere grid".into()));
            }
            let w = SpinMarginal::sample(&rho, &SphereGrid::new(*n_alpha, *n_beta))?;
            let grids = json!({"kind": "spin", "n_alpha": n_alpha, "n_beta": n_beta});
            ("spin_marginal.csv", spin_to_csv(&w), grids, w.normalization_defect(), w.min_value())
        }
        MarginalLattice::Circle(lattice) => {
            if lattice.angles == 0 || lattice.grid.points < 2 {
                return Err(Error::Lattice("empty frame lattice".into()));
            }
            let w = sample_circle(&rho, lattice)?;
            let grids = json!({"kind": "circle", "lattice": lattice});
            ("quadrature_marginal.csv", quadrature_to_csv(&w), grids, w.normalization_defect(), w.min_value())
        }
        MarginalLattice::Hybrid(lattice) => {
            lattice.validate()?;
            let w = HybridMarginal::sample(&rho, lattice.clone())?;
            let (defect, min) = (w.normalization_defect(), w.min_value());
            let grids = json!({"kind": "hybrid", "lattice": lattice});
            ("hybrid_marginal.csv", hybrid_to_csv(&[w])?, grids, defect, min)
        }
    };
    let passed = defect <= checks.normalization && min >= checks.min_value;
    prepare_out(out)?;
    let mut manifest = RunManifest::new("marginal", &text);
    manifest.write_file(out, name, &table.render())?;
    manifest.grids = grids;
    manifest.tolerances = json!({"normalization": checks.normalization, "min_value": checks.min_value});
    manifest.diagnostics = json!({"normalization_defect": defect, "min_value": min, "passed": passed});
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(out)?;
    report_checks("normalization defect", defect, checks.normalization);
    Ok(Outcome { passed })
}

fn report_checks(what: &str, value: f64, tol: f64) {
    let verdict = if value <= tol { "ok" } else { "FAILED" };
    eprintln!("{what}: {value:.3e} (tolerance {tol:.1e}) {verdict}");
}

fn cmd_reconstruct(path: &Path, out: &Path, scale: f64) -> Result<Outcome> {
    let start = Instant::now();
    let Loaded { config, text, dir } = load::<ReconstructConfig>(path)?;
    let input = resolve(&dir, &config.input);
    let body = std::fs::read_to_string(&input)
        .map_err(|e| Error::Config(format!("cannot read marginal table {}: {e}", input.display())))?;
    let table = CsvTable::parse(&body)?;
    let (rho, defect, threshold): (DensityMatrix, f64, f64) = match table.kind()?.as_str() {
        "spin" => {
            let w = spin_from_csv(&table)?;
            let threshold = config.threshold.unwrap_or(crate::spintomo::DEFAULT_HERMITICITY_THRESHOLD) * scale;
            let r = reconstruct_spin_density_with(&w, threshold)?;
            (r.rho, r.hermiticity_defect, threshold)
        }
        "symplectic" => {
            let levels = config
                .levels
                .ok_or_else(|| Error::Config("quadrature reconstruction needs `levels`".into()))?;
            let w = quadrature_from_csv(&table)?;
            let threshold = config.threshold.unwrap_or(crate::symtomo::DEFAULT_HERMITICITY_THRESHOLD) * scale;
            let r = reconstruct_density_with(&w, levels, threshold)?;
            (r.rho, r.hermiticity_defect, threshold)
        }
        other => return Err(Error::parse(1, format!("cannot reconstruct from a {other} table"))),
    };
    let report = rho.report();
    let passed = report.passes();
    prepare_out(out)?;
    let mut manifest = RunManifest::new("reconstruct", &text);
    manifest.write_file(out, "density.toml", &render_density(&rho)?)?;
    manifest.grids = table.header.clone();
    manifest.tolerances = json!({"hermiticity_threshold": threshold});
    manifest.diagnostics = json!({"hermiticity_defect": defect, "invariants": report, "passed": passed});
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(out)?;
    eprintln!(
        "trace error {:.3e}, hermiticity {:.3e}, min eigenvalue {:.3e}",
        report.trace_error, report.hermiticity, report.min_eigenvalue
    );
    Ok(Outcome { passed })
}

/// Largest deviation of every snapshot from the requested reference.
fn validate_run(config: &EvolveConfig, rho: &DensityMatrix, snaps: &[HybridMarginal], v: &Validation) -> Result<f64> {
    let mut worst = 0.0f64;
    for snap in snaps {
        let t = snap.time;
        let dev = match (v.reference, &config.hamiltonian) {
            (Reference::Analytic, HamiltonianSpec::Trapped) => {
                snap.max_deviation(|p| analytic_trapped_solution(p.xs[0], p.frames[0], p.s, p.spin, t))?
            }
            (Reference::Analytic, HamiltonianSpec::Landau) => snap.max_deviation(|p| {
                let f = TwoModeFrame { mu1: p.frames[0].mu, nu1: p.frames[0].nu, mu2: p.frames[1].mu, nu2: p.frames[1].nu };
                analytic_landau_solution(p.xs[0], p.xs[1], f, p.s, p.spin, t)
            })?,
            (Reference::Analytic, h) => {
                return Err(Error::Config(format!("no closed form for the {} Hamiltonian", h.name())));
            }
            (Reference::Oracle, h) => {
                let big = match v.oracle_levels {
                    Some(levels) => pad_fock(rho, levels)?,
                    None => rho.clone(),
                };
                let rho_t = vonneumann_evolve(&big, h, t, crate::oracle::propagate::DEFAULT_LEAK_THRESHOLD)?.rho_t;
                snap.max_deviation(|p| hybrid_marginal(&rho_t, p))?
            }
        };
        worst = worst.max(dev);
    }
    Ok(worst)
}

fn cmd_evolve(path: &Path, out: &Path, scale: f64) -> Result<Outcome> {
    let start = Instant::now();
    let Loaded { config, text, dir } = load::<EvolveConfig>(path)?;
    let rho = load_state(&resolve(&dir, &config.state))?;
    let problem = EvolutionProblem {
        hamiltonian: config.hamiltonian,
        initial: rho.clone(),
        lattice: config.lattice.clone(),
        dt: config.dt,
        snapshots: config.snapshots.clone(),
        full_landau: config.full_landau,
    };
    let run = evolve(&problem)?;
    let mut diagnostics = json!({"steps": run.steps, "norm_drift": run.norm_drift});
    let mut passed = true;
    let mut tolerances = json!({"instability_drift": crate::pauli::INSTABILITY_DRIFT});
    if let Some(v) = &config.validate {
        let tol = v.tolerance * scale;
        let dev = validate_run(&config, &rho, &run.snapshots, v)?;
        passed = dev <= tol;
        diagnostics["max_deviation"] = json!(dev);
        diagnostics["reference"] = json!(format!("{:?}", v.reference).to_lowercase());
        tolerances["max_deviation"] = json!(tol);
        report_checks("max deviation from reference", dev, tol);
    }
    diagnostics["passed"] = json!(passed);
    prepare_out(out)?;
    let mut manifest = RunManifest::new("evolve", &text);
    manifest.write_file(out, "evolution.csv", &hybrid_to_csv(&run.snapshots)?.render())?;
    manifest.grids = json!({"lattice": config.lattice, "dt": config.dt, "snapshots": config.snapshots});
    manifest.tolerances = tolerances;
    manifest.diagnostics = diagnostics;
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(out)?;
    eprintln!("{} steps, norm drift {:.3e}", run.steps, run.norm_drift);
    Ok(Outcome { passed })
}

fn cmd_verify(suite: Suite, profile: ToleranceProfile, out: &Path) -> Result<Outcome> {
    let start = Instant::now();
    let reports = run_suite(suite, profile);
    for r in &reports {
        println!("{}", r.line());
    }
    let passed = reports.iter().all(|r| !r.is_failure());
    prepare_out(out)?;
    let text = format!("verify {suite:?} {profile:?}");
    let mut manifest = RunManifest::new("verify", &text);
    let body = serde_json::to_string_pretty(&reports).map_err(|e| Error::Config(e.to_string()))?;
    manifest.write_file(out, "verify.json", &(body + "\n"))?;
    manifest.tolerances = json!({"profile": profile, "scale": profile.scale()});
    manifest.diagnostics = json!({"criteria": reports.len(), "passed": passed});
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(out)?;
    Ok(Outcome { passed })
}
