//! Experiment harness: each experiment kind is a strategy behind the
//! [`Experiment`] trait, registered by name and selected at runtime from
//! the config's `experiment.kind`.

mod config;
mod kinds;
mod spec;

use std::io::Write;

use thiserror::Error;

use crate::analytic::{self, SolverOptions};
use crate::error::{DegreeError, ModelError, SimError, SolverError};
use crate::simulate::{self, epidemic_cutoff};

pub use config::{validate_config, validate_config_with_kind};
pub use kinds::{find_threshold, REGISTRY};
pub use spec::{DistSpec, ExperimentSpec, ModelSpec, SimSettings, SweepAxis, ThresholdSettings};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config errors:\n{}", .0.join("\n"))]
    Config(Vec<String>),
    #[error("unknown experiment kind '{0}'")]
    UnknownKind(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("bracket [{lo}, {hi}] does not straddle R0 = 1")]
    BracketDoesNotStraddle { lo: f64, hi: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    /// Process exit code: 1 config error, 2 solver non-convergence, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Solver(SolverError::NonConvergence { .. }) => 2,
            ExperimentError::Io(_) => 3,
            _ => 1,
        }
    }
}

/// One experiment kind: a named strategy that runs a full sweep and writes
/// its CSV to `out`.
pub trait Experiment: Sync {
    fn kind(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, spec: &ExperimentSpec, out: &mut dyn Write) -> Result<(), ExperimentError>;
}

pub fn lookup(kind: &str) -> Option<&'static dyn Experiment> {
    REGISTRY.iter().copied().find(|e| e.kind() == kind)
}

/// Run the experiment selected by `spec.kind`, writing CSV to the spec's
/// output path (stdout when unset).
pub fn run_experiment(spec: &ExperimentSpec) -> Result<(), ExperimentError> {
    let experiment =
        lookup(&spec.kind).ok_or_else(|| ExperimentError::UnknownKind(spec.kind.clone()))?;
    match &spec.output_path {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            let mut w = std::io::BufWriter::new(file);
            experiment.run(spec, &mut w)?;
            w.flush()?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            experiment.run(spec, &mut w)
        }
    }
}

/// Analytics only, at the spec's base parameter point.
pub fn solve_point(spec: &ExperimentSpec, out: &mut dyn Write) -> Result<(), ExperimentError> {
    let dist = spec.dist.build()?;
    let params = spec.model.params(spec.m)?;
    let opts = SolverOptions::default();
    let analogue = analytic::mutation_map(&params);
    let r0 = analytic::r0(&dist, &params);
    let em = analytic::emergence_probability(&dist, &params, opts)?;
    let sz = analytic::epidemic_size(&dist, &params, opts)?;
    let mu = analytic::mutation_epidemic_size(&dist, &analogue, opts)?;
    writeln!(out, "mean_degree = {}", dist.mean_degree())?;
    writeln!(out, "m = {}", params.m)?;
    for (name, v) in [
        ("T11", params.t[0][0]),
        ("T12", params.t[0][1]),
        ("T21", params.t[1][0]),
        ("T22", params.t[1][1]),
        ("Q1", analogue.q[0]),
        ("Q2", analogue.q[1]),
        ("mu11", analogue.mu[0][0]),
        ("mu12", analogue.mu[0][1]),
        ("mu21", analogue.mu[1][0]),
        ("mu22", analogue.mu[1][1]),
        ("R0", r0),
        ("extinction_masked_p0", em.extinction[0]),
        ("extinction_unmasked_p0", em.extinction[1]),
        ("emergence_masked_p0", em.emergence[0]),
        ("emergence_unmasked_p0", em.emergence[1]),
        ("emergence_mixed", em.emergence_mixed),
        ("S1", sz.s[0]),
        ("S2", sz.s[1]),
        ("S", sz.total),
        ("S1_pop", sz.s[0] * params.m),
        ("mutation_size_strain1", mu.by_strain[0]),
        ("mutation_size_strain2", mu.by_strain[1]),
        ("mutation_size_total", mu.total),
    ] {
        writeln!(out, "{name} = {v}")?;
    }
    writeln!(out, "emergence_iterations = {}", em.diagnostics.iterations)?;
    writeln!(out, "size_iterations = {}", sz.diagnostics.iterations)?;
    Ok(())
}

/// One Monte Carlo ensemble at the spec's base point; prints the summary
/// and, when an output path is set, streams per-trial records there.
pub fn simulate_point(spec: &ExperimentSpec, out: &mut dyn Write) -> Result<(), ExperimentError> {
    let dist = spec.dist.build()?;
    let params = spec.model.params(spec.m)?;
    let config = spec.simulation_config(params, 0);
    let outcome = simulate::run_ensemble(&config, &dist, spec.n)?;
    writeln!(out, "n = {}", spec.n)?;
    writeln!(out, "cutoff = {}", epidemic_cutoff(spec.n, config.cutoff))?;
    simulate::write_summary(&outcome.summary, &mut *out)?;
    if let Some(path) = &spec.output_path {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        simulate::write_trials_csv(&outcome.results, &mut w)?;
        w.flush()?;
    }
    Ok(())
}
