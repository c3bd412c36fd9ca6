//! Config parsing and validation for experiment specs.
//!
//! The format is flat `section.key = value` text (TOML); every violation is
//! reported, not just the first one. Defaults are applied for missing keys
//! and echoed in the resolved spec.

use std::collections::BTreeSet;
use std::path::PathBuf;

use toml::Value;

use crate::simulate::{CutoffRule, EdgeSemantics, PatientZeroPolicy};

use super::spec::{
    DistSpec, ExperimentSpec, ModelSpec, SimSettings, SweepAxis, ThresholdSettings,
};

/// Parse and fully validate a config document. On failure, the error list
/// contains one message per violation.
pub fn validate_config(raw: &str) -> Result<ExperimentSpec, Vec<String>> {
    validate_config_with_kind(raw, None)
}

/// Like [`validate_config`], but with the experiment kind forced by the
/// caller (CLI subcommands). The override also drives the per-kind axis
/// and grid defaults; a conflicting `experiment.kind` in the config is an
/// error.
pub fn validate_config_with_kind(
    raw: &str,
    kind_override: Option<&str>,
) -> Result<ExperimentSpec, Vec<String>> {
    let table: toml::Table = raw
        .parse()
        .map_err(|e| vec![format!("config is not valid TOML: {e}")])?;

    let mut errors = Vec::new();
    let mut cfg = Reader {
        table: &table,
        errors: &mut errors,
        seen: BTreeSet::new(),
    };

    let config_kind = cfg.string("experiment.kind");
    let kind = match (kind_override, config_kind) {
        (Some(forced), Some(declared)) if forced != declared => {
            cfg.errors.push(format!(
                "experiment.kind '{declared}' conflicts with the '{forced}' subcommand"
            ));
            forced.to_string()
        }
        (Some(forced), _) => forced.to_string(),
        (None, Some(declared)) => declared,
        (None, None) => "emergence".to_string(),
    };
    let known_kinds = ["emergence", "size", "threshold", "mask_sweep", "T_sweep", "mutation_compare"];
    if !known_kinds.contains(&kind.as_str()) {
        cfg.errors.push(format!(
            "experiment.kind '{kind}' unknown; expected one of {known_kinds:?}"
        ));
    }

    let n = cfg.integer("network.n").unwrap_or(100_000);
    if n < 2 {
        cfg.errors.push(format!("network.n must be >= 2, got {n}"));
    }
    let dist_kind = cfg
        .string("network.distribution")
        .unwrap_or_else(|| "poisson".to_string());
    let dist = match dist_kind.as_str() {
        "poisson" => {
            let mean = cfg.float("network.mean_degree").unwrap_or(5.0);
            if mean < 0.0 {
                cfg.errors
                    .push(format!("network.mean_degree must be >= 0, got {mean}"));
            }
            DistSpec::Poisson { mean }
        }
        "powerlaw" => {
            let exponent = cfg.float("network.exponent").unwrap_or(2.5);
            let kmin = cfg.integer("network.kmin").unwrap_or(1).max(0) as usize;
            let kmax = cfg.integer("network.kmax").unwrap_or(1000).max(0) as usize;
            if exponent <= 0.0 {
                cfg.errors
                    .push(format!("network.exponent must be > 0, got {exponent}"));
            }
            if kmin == 0 || kmin > kmax {
                cfg.errors
                    .push(format!("network support [{kmin}, {kmax}] is empty"));
            }
            DistSpec::PowerLaw { exponent, kmin, kmax }
        }
        "empirical" => match cfg.string("network.pmf_file") {
            Some(path) => DistSpec::Empirical {
                path: PathBuf::from(path),
            },
            None => {
                cfg.errors
                    .push("network.pmf_file is required for distribution = \"empirical\"".into());
                DistSpec::Poisson { mean: 5.0 }
            }
        },
        other => {
            cfg.errors.push(format!(
                "network.distribution '{other}' unknown; expected poisson, powerlaw or empirical"
            ));
            DistSpec::Poisson { mean: 5.0 }
        }
    };
    let simple_graph = cfg.boolean("network.simple_graph").unwrap_or(false);

    let m = cfg.float("model.m").unwrap_or(0.45);
    if !(0.0..=1.0).contains(&m) {
        cfg.errors.push(format!("model.m must lie in [0,1], got {m}"));
    }
    let explicit: Vec<Option<f64>> = ["model.T11", "model.T12", "model.T21", "model.T22"]
        .iter()
        .map(|k| cfg.float(k))
        .collect();
    let factored_t = cfg.float("model.T");
    let t_mask1 = cfg.float("model.T_mask1");
    let t_mask2 = cfg.float("model.T_mask2");
    let t21_override = cfg.float("model.T21_override");
    let has_explicit = explicit.iter().any(Option::is_some);
    let has_factored = factored_t.is_some() || t_mask1.is_some() || t_mask2.is_some();
    let model = if has_explicit && has_factored {
        cfg.errors.push(
            "specify exactly one of the explicit T matrix (model.T11..T22) and the factored form \
             (model.T, model.T_mask1, model.T_mask2), not both"
                .into(),
        );
        ModelSpec::Explicit { t: [[0.0; 2]; 2] }
    } else if has_factored {
        ModelSpec::Factored {
            t: factored_t.unwrap_or(0.6),
            t_mask1: t_mask1.unwrap_or(0.3),
            t_mask2: t_mask2.unwrap_or(0.7),
            t21_override,
        }
    } else {
        let mut t = [[0.126, 0.18], [0.42, 0.6]];
        let slots = [(0, 0), (0, 1), (1, 0), (1, 1)];
        for ((i, j), v) in slots.into_iter().zip(&explicit) {
            if let Some(v) = v {
                t[i][j] = *v;
            }
        }
        ModelSpec::Explicit { t }
    };
    for (label, v) in [
        ("model.T11", model_entry(&model, 0, 0)),
        ("model.T12", model_entry(&model, 0, 1)),
        ("model.T21", model_entry(&model, 1, 0)),
        ("model.T22", model_entry(&model, 1, 1)),
    ] {
        if !(0.0..=1.0).contains(&v) {
            cfg.errors
                .push(format!("{label} resolves to {v}, outside [0,1]"));
        }
    }

    let axis = match cfg
        .string("sweep.axis")
        .unwrap_or_else(|| default_axis(&kind).to_string())
        .as_str()
    {
        "mean_degree" => SweepAxis::MeanDegree,
        "m" => SweepAxis::MaskFraction,
        "T" => SweepAxis::BaselineT,
        other => {
            cfg.errors.push(format!(
                "sweep.axis '{other}' unknown; expected mean_degree, m or T"
            ));
            SweepAxis::MeanDegree
        }
    };
    let grid = cfg.grid(axis);
    if let SweepAxis::BaselineT = axis {
        if matches!(model, ModelSpec::Explicit { .. }) {
            cfg.errors.push(
                "sweep.axis = \"T\" requires the factored model form (model.T, model.T_mask1, model.T_mask2)"
                    .into(),
            );
        }
    }

    let trials = cfg.integer("sim.trials").unwrap_or(2_000);
    if trials < 0 {
        cfg.errors.push(format!("sim.trials must be >= 0, got {trials}"));
    }
    let master_seed = cfg.integer("sim.master_seed").unwrap_or(20_200_901) as u64;
    let cutoff_floor = cfg.integer("sim.cutoff_floor").unwrap_or(100);
    if cutoff_floor < 2 {
        cfg.errors
            .push(format!("sim.cutoff_floor must be >= 2, got {cutoff_floor}"));
    }
    let cutoff_fraction = cfg.float("sim.cutoff_fraction").unwrap_or(0.0025);
    if !(cutoff_fraction > 0.0 && cutoff_fraction < 1.0) {
        cfg.errors.push(format!(
            "sim.cutoff_fraction must lie in (0,1), got {cutoff_fraction}"
        ));
    }
    let patient_zero = match cfg
        .string("sim.patient_zero")
        .unwrap_or_else(|| "random".to_string())
        .as_str()
    {
        "random" => PatientZeroPolicy::Random,
        "masked" => PatientZeroPolicy::ForceMasked,
        "unmasked" => PatientZeroPolicy::ForceUnmasked,
        other => {
            cfg.errors.push(format!(
                "sim.patient_zero '{other}' unknown; expected random, masked or unmasked"
            ));
            PatientZeroPolicy::Random
        }
    };
    let regenerate = cfg.boolean("sim.regenerate_network").unwrap_or(true);
    let edge_semantics = match cfg
        .string("sim.edge_semantics")
        .unwrap_or_else(|| "semi_directed".to_string())
        .as_str()
    {
        "semi_directed" => EdgeSemantics::SemiDirected,
        "undirected" => EdgeSemantics::Undirected,
        other => {
            cfg.errors.push(format!(
                "sim.edge_semantics '{other}' unknown; expected semi_directed or undirected"
            ));
            EdgeSemantics::SemiDirected
        }
    };

    let output_path = cfg.string("output.path").map(PathBuf::from);

    let bracket_lo = cfg.float("threshold.bracket_lo").unwrap_or(0.05);
    let bracket_hi = cfg.float("threshold.bracket_hi").unwrap_or(10.0);
    if bracket_lo >= bracket_hi {
        cfg.errors.push(format!(
            "threshold bracket [{bracket_lo}, {bracket_hi}] is empty"
        ));
    }
    let empirical_cutoff = cfg.float("threshold.empirical_cutoff").unwrap_or(0.05);
    let step = cfg.float("threshold.step").unwrap_or(0.5);
    if step <= 0.0 {
        cfg.errors.push(format!("threshold.step must be > 0, got {step}"));
    }

    cfg.report_unknown_keys();

    if errors.is_empty() {
        Ok(ExperimentSpec {
            kind,
            n: n as usize,
            dist,
            m,
            model,
            axis,
            grid,
            sim: SimSettings {
                trials: trials as usize,
                master_seed,
                cutoff: CutoffRule {
                    floor: cutoff_floor as usize,
                    fraction: cutoff_fraction,
                },
                patient_zero,
                regenerate_network_per_trial: regenerate,
                edge_semantics,
                simple_graph,
            },
            output_path,
            threshold: ThresholdSettings {
                bracket: (bracket_lo, bracket_hi),
                step,
                empirical_cutoff,
            },
        })
    } else {
        Err(errors)
    }
}

fn default_axis(kind: &str) -> &'static str {
    match kind {
        "mask_sweep" | "threshold" => "m",
        "T_sweep" => "T",
        _ => "mean_degree",
    }
}

fn model_entry(model: &ModelSpec, i: usize, j: usize) -> f64 {
    match model {
        ModelSpec::Explicit { t } => t[i][j],
        ModelSpec::Factored { t, t_mask1, t_mask2, t21_override } => {
            let full = [
                [t_mask1 * t_mask2 * t, t_mask2 * t],
                [t21_override.unwrap_or(t_mask1 * t), *t],
            ];
            full[i][j]
        }
    }
}

struct Reader<'a> {
    table: &'a toml::value::Table,
    errors: &'a mut Vec<String>,
    seen: BTreeSet<String>,
}

impl Reader<'_> {
    fn get(&mut self, dotted: &str) -> Option<&Value> {
        self.seen.insert(dotted.to_string());
        let (section, key) = dotted.split_once('.').unwrap();
        self.table.get(section)?.as_table()?.get(key)
    }

    fn string(&mut self, key: &str) -> Option<String> {
        let v = self.get(key)?.clone();
        match v.as_str() {
            Some(s) => Some(s.to_string()),
            None => {
                self.errors.push(format!("{key} must be a string"));
                None
            }
        }
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        let v = self.get(key)?.clone();
        match v {
            Value::Float(f) => Some(f),
            Value::Integer(i) => Some(i as f64),
            _ => {
                self.errors.push(format!("{key} must be a number"));
                None
            }
        }
    }

    fn integer(&mut self, key: &str) -> Option<i64> {
        let v = self.get(key)?.clone();
        match v.as_integer() {
            Some(i) => Some(i),
            None => {
                self.errors.push(format!("{key} must be an integer"));
                None
            }
        }
    }

    fn boolean(&mut self, key: &str) -> Option<bool> {
        let v = self.get(key)?.clone();
        match v.as_bool() {
            Some(b) => Some(b),
            None => {
                self.errors.push(format!("{key} must be a boolean"));
                None
            }
        }
    }

    /// `sweep.grid = [..]` wins; otherwise start/stop/step; otherwise a
    /// per-axis default. The grid must be finite, sorted and in-domain.
    fn grid(&mut self, axis: SweepAxis) -> Vec<f64> {
        let explicit = match self.get("sweep.grid").cloned() {
            Some(Value::Array(items)) => {
                let mut grid = Vec::new();
                for item in items {
                    match item {
                        Value::Float(f) => grid.push(f),
                        Value::Integer(i) => grid.push(i as f64),
                        _ => {
                            self.errors.push("sweep.grid entries must be numbers".into());
                            return Vec::new();
                        }
                    }
                }
                Some(grid)
            }
            Some(_) => {
                self.errors.push("sweep.grid must be an array".into());
                None
            }
            None => None,
        };
        let grid = explicit.unwrap_or_else(|| {
            let (start, stop, step) = match (
                self.float("sweep.start"),
                self.float("sweep.stop"),
                self.float("sweep.step"),
            ) {
                (Some(a), Some(b), Some(s)) if s > 0.0 && b >= a => (a, b, s),
                (None, None, None) => match axis {
                    SweepAxis::MeanDegree => (0.5, 10.0, 0.5),
                    SweepAxis::MaskFraction => (0.0, 1.0, 0.05),
                    SweepAxis::BaselineT => (0.1, 1.0, 0.05),
                },
                _ => {
                    self.errors.push(
                        "sweep.start/stop/step must all be present with step > 0 and stop >= start"
                            .into(),
                    );
                    return Vec::new();
                }
            };
            let count = ((stop - start) / step).round() as usize + 1;
            (0..count).map(|i| start + i as f64 * step).collect()
        });
        if grid.is_empty() {
            self.errors.push("sweep grid is empty".into());
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            self.errors.push("sweep grid must be strictly increasing".into());
        }
        let domain = match axis {
            SweepAxis::MeanDegree => (0.0, f64::INFINITY),
            SweepAxis::MaskFraction => (0.0, 1.0),
            SweepAxis::BaselineT => (0.0, 1.0),
        };
        for &v in &grid {
            if v < domain.0 || v > domain.1 || !v.is_finite() {
                self.errors
                    .push(format!("sweep grid value {v} outside the axis domain"));
            }
        }
        grid
    }

    fn report_unknown_keys(&mut self) {
        for (section, value) in self.table {
            match value.as_table() {
                Some(sub) => {
                    for key in sub.keys() {
                        let dotted = format!("{section}.{key}");
                        if !self.seen.contains(&dotted) {
                            self.errors.push(format!("unknown key '{dotted}'"));
                        }
                    }
                }
                None => self
                    .errors
                    .push(format!("top-level key '{section}' is not a section")),
            }
        }
    }
}
