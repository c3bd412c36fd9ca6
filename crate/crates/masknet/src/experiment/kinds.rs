//! The experiment strategies behind the registry: plain analytic+simulation
//! sweeps, the per-patient-zero-type baseline-T sweep, the critical-degree
//! curve, and the mask-vs-mutation size comparison.

use std::io::Write;

use crate::analytic::{self, SolverOptions};
use crate::degree::DegreeDistribution;
use crate::model::MaskModelParams;
use crate::simulate::{self, epidemic_cutoff, EnsembleSummary, PatientZeroPolicy};

use super::spec::ExperimentSpec;
use super::{Experiment, ExperimentError};

/// All registered experiment kinds, selectable by name.
pub static REGISTRY: &[&dyn Experiment] = &[
    &EmergenceSweep,
    &SizeSweep,
    &MaskSweep,
    &BaselineTSweep,
    &ThresholdCurve,
    &MutationCompare,
];

pub struct EmergenceSweep;
pub struct SizeSweep;
pub struct MaskSweep;
pub struct BaselineTSweep;
pub struct ThresholdCurve;
pub struct MutationCompare;

impl Experiment for EmergenceSweep {
    fn kind(&self) -> &'static str {
        "emergence"
    }
    fn description(&self) -> &'static str {
        "emergence probability vs the sweep axis, analytic and simulated"
    }
    fn run(&self, spec: &ExperimentSpec, out: &mut dyn Write) -> Result<(), ExperimentError> {
        standard_sweep(spec, out)
    }
}

impl Experiment for SizeSweep {
    fn kind(&self) -> &'static str {
        "size"
    }
    fn description(&self) -> &'static str {
        "conditional epidemic size vs the sweep axis, analytic and simulated"
    }
    fn run(&self, spec: &ExperimentSpec, out: &mut dyn Write) -> Result<(), ExperimentError> {
        standard_sweep(spec, out)
    }
}

impl Experiment for MaskSweep {
    fn kind(&self) -> &'static str {
        "mask_sweep"
    }
    fn description(&self) -> &'static str {
        "total/masked/unmasked infections as a function of the mask fraction"
    }
    fn run(&self, spec: &ExperimentSpec, out: &mut dyn Write) -> Result<(), ExperimentError> {
        standard_sweep(spec, out)
    }
}

fn param_header() -> &'static str {
    "axis,value,n,mean_degree,m,T11,T12,T21,T22,trials,master_seed,cutoff"
}

fn write_param_cells(
    out: &mut dyn Write,
    spec: &ExperimentSpec,
    value: f64,
    dist: &DegreeDistribution,
    params: &MaskModelParams,
) -> std::io::Result<()> {
    write!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        spec.axis.name(),
        value,
        spec.n,
        dist.mean_degree(),
        params.m,
        params.t[0][0],
        params.t[0][1],
        params.t[1][0],
        params.t[1][1],
        spec.sim.trials,
        spec.sim.master_seed,
        epidemic_cutoff(spec.n, spec.sim.cutoff),
    )
}

fn write_analytic_cells(
    out: &mut dyn Write,
    dist: &DegreeDistribution,
    params: &MaskModelParams,
) -> Result<(), ExperimentError> {
    let opts = SolverOptions::default();
    let r0 = analytic::r0(dist, params);
    let em = analytic::emergence_probability(dist, params, opts)?;
    let sz = analytic::epidemic_size(dist, params, opts)?;
    write!(
        out,
        ",{},{},{},{},{},{},{},{}",
        r0,
        em.emergence[0],
        em.emergence[1],
        em.emergence_mixed,
        sz.s[0],
        sz.s[1],
        sz.total,
        sz.s[0] * params.m,
    )?;
    Ok(())
}

fn write_sim_cells(out: &mut dyn Write, summary: Option<&EnsembleSummary>) -> std::io::Result<()> {
    match summary {
        Some(s) => write!(
            out,
            ",{},{},{},{},{},{},{},{},{}",
            s.emergence_freq,
            s.emergence_se,
            s.emergence_freq_by_type[0],
            s.emergence_freq_by_type[1],
            s.mean_total_frac,
            s.total_frac_se,
            s.mean_masked_frac,
            s.mean_unmasked_frac,
            s.mean_masked_pop_frac,
        ),
        None => write!(out, ",,,,,,,,,"),
    }
}

/// Shared runner for the emergence/size/mask_sweep kinds: analytic columns
/// always, simulation columns when trials > 0. Analytic values never depend
/// on the simulation settings.
fn standard_sweep(spec: &ExperimentSpec, out: &mut dyn Write) -> Result<(), ExperimentError> {
    writeln!(
        out,
        "{},R0,emergence_masked_p0,emergence_unmasked_p0,emergence_mixed,S1,S2,S,S1_pop,\
         sim_emergence_freq,sim_emergence_se,sim_emergence_freq_masked_p0,\
         sim_emergence_freq_unmasked_p0,sim_total_frac,sim_total_frac_se,sim_masked_frac,\
         sim_unmasked_frac,sim_masked_pop_frac",
        param_header()
    )?;
    for (index, &value) in spec.grid.iter().enumerate() {
        let (dist, params) = spec.resolve_point(value)?;
        write_param_cells(out, spec, value, &dist, &params)?;
        write_analytic_cells(out, &dist, &params)?;
        let summary = if spec.sim.trials > 0 {
            let config = spec.simulation_config(params, index as u64);
            Some(simulate::run_ensemble(&config, &dist, spec.n)?.summary)
        } else {
            None
        };
        write_sim_cells(out, summary.as_ref())?;
        writeln!(out)?;
    }
    Ok(())
}

impl Experiment for BaselineTSweep {
    fn kind(&self) -> &'static str {
        "T_sweep"
    }
    fn description(&self) -> &'static str {
        "emergence and size vs baseline T with factored masks, conditioned on patient-zero type"
    }
    fn run(&self, spec: &ExperimentSpec, out: &mut dyn Write) -> Result<(), ExperimentError> {
        writeln!(
            out,
            "{},R0,emergence_masked_p0,emergence_unmasked_p0,emergence_mixed,S1,S2,S,S1_pop,\
             sim_emergence_freq_random,sim_total_frac_random,sim_emergence_freq_masked_p0,\
             sim_total_frac_masked_p0,sim_emergence_freq_unmasked_p0,sim_total_frac_unmasked_p0",
            param_header()
        )?;
        let policies = [
            PatientZeroPolicy::Random,
            PatientZeroPolicy::ForceMasked,
            PatientZeroPolicy::ForceUnmasked,
        ];
        for (index, &value) in spec.grid.iter().enumerate() {
            let (dist, params) = spec.resolve_point(value)?;
            write_param_cells(out, spec, value, &dist, &params)?;
            write_analytic_cells(out, &dist, &params)?;
            if spec.sim.trials > 0 {
                // three runs per grid point, one per patient-zero policy
                for (offset, policy) in policies.iter().enumerate() {
                    let mut config = spec
                        .simulation_config(params, (index * policies.len() + offset) as u64);
                    config.patient_zero = *policy;
                    let s = simulate::run_ensemble(&config, &dist, spec.n)?.summary;
                    write!(out, ",{},{}", s.emergence_freq, s.mean_total_frac)?;
                }
            } else {
                write!(out, ",,,,,,")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Bisection on R0(axis) - 1 to absolute tolerance `tol`. The map is
/// assumed monotone over the bracket.
pub fn find_threshold(
    r0_at: &dyn Fn(f64) -> Result<f64, ExperimentError>,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64, ExperimentError> {
    let (mut lo, mut hi) = bracket;
    let f_lo = r0_at(lo)? - 1.0;
    let f_hi = r0_at(hi)? - 1.0;
    if f_lo * f_hi > 0.0 {
        return Err(ExperimentError::BracketDoesNotStraddle { lo, hi });
    }
    let rising = f_hi >= 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (r0_at(mid)? >= 1.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl Experiment for ThresholdCurve {
    fn kind(&self) -> &'static str {
        "threshold"
    }
    fn description(&self) -> &'static str {
        "critical mean degree as a function of the mask fraction, analytic and empirical"
    }
    fn run(&self, spec: &ExperimentSpec, out: &mut dyn Write) -> Result<(), ExperimentError> {
        writeln!(
            out,
            "m,n,T11,T12,T21,T22,trials,master_seed,empirical_cutoff,step,\
             analytic_critical_degree,analytic_grid_crossing,empirical_critical_degree"
        )?;
        let (lo, hi) = spec.threshold.bracket;
        let step = spec.threshold.step;
        let count = ((hi - lo) / step).floor() as usize + 1;
        let lambda_grid: Vec<f64> = (0..count).map(|i| lo + i as f64 * step).collect();
        for (index, &m) in spec.grid.iter().enumerate() {
            let params = spec.model.params(m)?;
            let exact = find_threshold(
                &|lambda| Ok(analytic::r0(&DegreeDistribution::poisson(lambda), &params)),
                spec.threshold.bracket,
                1e-6,
            );
            // The empirical threshold is the smallest grid point whose
            // emergence frequency exceeds the cutoff; the analytic curve is
            // thresholded the same way so the two are comparable.
            let mut analytic_crossing = None;
            for &lambda in &lambda_grid {
                let dist = DegreeDistribution::poisson(lambda);
                let em =
                    analytic::emergence_probability(&dist, &params, SolverOptions::default())?;
                if em.emergence_mixed > spec.threshold.empirical_cutoff {
                    analytic_crossing = Some(lambda);
                    break;
                }
            }
            let mut empirical_crossing = None;
            if spec.sim.trials > 0 {
                for (li, &lambda) in lambda_grid.iter().enumerate() {
                    let dist = DegreeDistribution::poisson(lambda);
                    let config = spec
                        .simulation_config(params, (index * lambda_grid.len() + li) as u64);
                    let s = simulate::run_ensemble(&config, &dist, spec.n)?.summary;
                    if s.emergence_freq > spec.threshold.empirical_cutoff {
                        empirical_crossing = Some(lambda);
                        break;
                    }
                }
            }
            let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                m,
                spec.n,
                params.t[0][0],
                params.t[0][1],
                params.t[1][0],
                params.t[1][1],
                spec.sim.trials,
                spec.sim.master_seed,
                spec.threshold.empirical_cutoff,
                step,
                cell(exact.ok()),
                cell(analytic_crossing),
                cell(empirical_crossing),
            )?;
        }
        Ok(())
    }
}

impl Experiment for MutationCompare {
    fn kind(&self) -> &'static str {
        "mutation_compare"
    }
    fn description(&self) -> &'static str {
        "mask-model epidemic size against the two-strain mutation analogue"
    }
    fn run(&self, spec: &ExperimentSpec, out: &mut dyn Write) -> Result<(), ExperimentError> {
        writeln!(
            out,
            "{},Q1,Q2,mu11,mu12,mu21,mu22,R0,S1,S2,S,mutation_strain1,mutation_strain2,\
             mutation_total,gap",
            param_header()
        )?;
        let opts = SolverOptions::default();
        for &value in &spec.grid {
            let (dist, params) = spec.resolve_point(value)?;
            let analogue = analytic::mutation_map(&params);
            let sz = analytic::epidemic_size(&dist, &params, opts)?;
            let mu_sz = analytic::mutation_epidemic_size(&dist, &analogue, opts)?;
            write_param_cells(out, spec, value, &dist, &params)?;
            writeln!(
                out,
                ",{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                analogue.q[0],
                analogue.q[1],
                analogue.mu[0][0],
                analogue.mu[0][1],
                analogue.mu[1][0],
                analogue.mu[1][1],
                analytic::r0(&dist, &params),
                sz.s[0],
                sz.s[1],
                sz.total,
                mu_sz.by_strain[0],
                mu_sz.by_strain[1],
                mu_sz.total,
                (sz.total - mu_sz.total).abs(),
            )?;
        }
        Ok(())
    }
}
