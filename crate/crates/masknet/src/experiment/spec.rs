//! Resolved experiment specification and per-grid-point parameter
//! resolution.

use std::path::PathBuf;

use crate::degree::DegreeDistribution;
use crate::error::{DegreeError, ModelError};
use crate::model::MaskModelParams;
use crate::simulate::{CutoffRule, EdgeSemantics, PatientZeroPolicy, SimulationConfig};

use super::ExperimentError;

#[derive(Debug, Clone, PartialEq)]
pub enum DistSpec {
    Poisson { mean: f64 },
    PowerLaw { exponent: f64, kmin: usize, kmax: usize },
    Empirical { path: PathBuf },
}

impl DistSpec {
    pub fn build(&self) -> Result<DegreeDistribution, DegreeError> {
        match self {
            DistSpec::Poisson { mean } => Ok(DegreeDistribution::poisson(*mean)),
            DistSpec::PowerLaw { exponent, kmin, kmax } => {
                DegreeDistribution::power_law(*exponent, *kmin, *kmax)
            }
            DistSpec::Empirical { path } => DegreeDistribution::from_pmf_file(path),
        }
    }

    pub fn with_mean(&self, mean: f64) -> Result<DegreeDistribution, ExperimentError> {
        match self {
            DistSpec::Poisson { .. } => Ok(DegreeDistribution::poisson(mean)),
            _ => Err(ExperimentError::Config(vec![
                "sweeping the mean degree requires a Poisson distribution".into(),
            ])),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Explicit {
        t: [[f64; 2]; 2],
    },
    Factored {
        t: f64,
        t_mask1: f64,
        t_mask2: f64,
        t21_override: Option<f64>,
    },
}

impl ModelSpec {
    pub fn params(&self, m: f64) -> Result<MaskModelParams, ModelError> {
        match self {
            ModelSpec::Explicit { t } => MaskModelParams::new(m, *t),
            ModelSpec::Factored { t, t_mask1, t_mask2, t21_override } => {
                MaskModelParams::from_factored(m, *t, *t_mask1, *t_mask2, *t21_override)
            }
        }
    }

    pub fn params_with_baseline(
        &self,
        m: f64,
        baseline: f64,
    ) -> Result<MaskModelParams, ExperimentError> {
        match self {
            ModelSpec::Factored { t_mask1, t_mask2, t21_override, .. } => Ok(
                MaskModelParams::from_factored(m, baseline, *t_mask1, *t_mask2, *t21_override)?,
            ),
            ModelSpec::Explicit { .. } => Err(ExperimentError::Config(vec![
                "sweeping the baseline T requires the factored model form".into(),
            ])),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    MeanDegree,
    MaskFraction,
    BaselineT,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::MeanDegree => "mean_degree",
            SweepAxis::MaskFraction => "m",
            SweepAxis::BaselineT => "T",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    pub trials: usize,
    pub master_seed: u64,
    pub cutoff: CutoffRule,
    pub patient_zero: PatientZeroPolicy,
    pub regenerate_network_per_trial: bool,
    pub edge_semantics: EdgeSemantics,
    pub simple_graph: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSettings {
    /// Mean-degree bracket scanned for the critical point.
    pub bracket: (f64, f64),
    /// Grid step for the empirical scan.
    pub step: f64,
    /// Emergence frequency above which a grid point counts as supercritical.
    pub empirical_cutoff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: String,
    pub n: usize,
    pub dist: DistSpec,
    pub m: f64,
    pub model: ModelSpec,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub sim: SimSettings,
    pub output_path: Option<PathBuf>,
    pub threshold: ThresholdSettings,
}

impl ExperimentSpec {
    /// Resolve the distribution and model parameters at one value of the
    /// sweep axis.
    pub fn resolve_point(
        &self,
        value: f64,
    ) -> Result<(DegreeDistribution, MaskModelParams), ExperimentError> {
        match self.axis {
            SweepAxis::MeanDegree => Ok((self.dist.with_mean(value)?, self.model.params(self.m)?)),
            SweepAxis::MaskFraction => Ok((self.dist.build()?, self.model.params(value)?)),
            SweepAxis::BaselineT => Ok((
                self.dist.build()?,
                self.model.params_with_baseline(self.m, value)?,
            )),
        }
    }

    pub fn simulation_config(
        &self,
        params: MaskModelParams,
        point_index: u64,
    ) -> SimulationConfig {
        SimulationConfig {
            params,
            trials: self.sim.trials,
            cutoff: self.sim.cutoff,
            patient_zero: self.sim.patient_zero,
            regenerate_network_per_trial: self.sim.regenerate_network_per_trial,
            // each grid point gets its own deterministic seed stream
            master_seed: crate::simulate::mix_seed(self.sim.master_seed, point_index),
            edge_semantics: self.sim.edge_semantics,
            simple_graph: self.sim.simple_graph,
        }
    }
}
