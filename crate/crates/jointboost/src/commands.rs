//! The four command-line operations, callable as library functions.

use std::path::{Path, PathBuf};

use jointboost_core::tuning::make_folds;
use jointboost_core::{boost_fit, simulate, validate, FitResult, JointData, SimulatedData, TuningResult};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::parallel;
use crate::replicate::{replicate, write_replicate, ReplicateReport};
use crate::report::{write_fit, write_json, write_tuning};
use crate::table::{output_path, read_longitudinal, read_survival, write_longitudinal, write_survival};

#[derive(Serialize)]
struct TruthSidecar<'a> {
    config: &'a RunConfig,
    informative_l: Vec<&'a str>,
    informative_s: Vec<&'a str>,
    informative_ls: Vec<&'a str>,
    individuals: Vec<IndividualTruth>,
}

#[derive(Serialize)]
struct IndividualTruth {
    id: i64,
    gamma0: f64,
    gamma1: f64,
    /// `None` when the event never occurs.
    uncensored_event_time: Option<f64>,
}

fn informative<'a>(names: &'a [String], mask: &[bool]) -> Vec<&'a str> {
    names.iter().zip(mask).filter(|(_, &m)| m).map(|(n, _)| n.as_str()).collect()
}

/// Writes `longitudinal.csv`, `survival.csv` and the `truth.json` sidecar.
pub fn simulate_to(config: &RunConfig, out: &Path) -> Result<SimulatedData> {
    let sim = simulate(&config.simulation.to_core(config.require_seed()?))?;
    write_longitudinal(&output_path(out, "longitudinal.csv")?, &sim.longitudinal)?;
    write_survival(&output_path(out, "survival.csv")?, &sim.survival)?;
    let t = &sim.truth;
    let sidecar = TruthSidecar {
        config,
        informative_l: informative(sim.longitudinal.x_l.names(), &t.informative_l),
        informative_s: informative(sim.survival.x_s.names(), &t.informative_s),
        informative_ls: informative(sim.longitudinal.x_ls.names(), &t.informative_ls),
        individuals: sim
            .survival
            .ids
            .iter()
            .enumerate()
            .map(|(i, &id)| IndividualTruth {
                id,
                gamma0: t.gamma0[i],
                gamma1: t.gamma1[i],
                uncensored_event_time: Some(t.uncensored_event_time[i]).filter(|x| x.is_finite()),
            })
            .collect(),
    };
    write_json(&output_path(out, "truth.json")?, &sidecar)?;
    Ok(sim)
}

/// Reads and validates a dataset pair.
pub fn load_data(long: &Path, surv: &Path) -> Result<JointData> {
    Ok(validate(read_longitudinal(long)?, read_survival(surv)?)?)
}

/// Fits at the configured stopping iterations and writes the fit report.
pub fn fit_to(data: &JointData, config: &RunConfig, out: &Path) -> Result<FitResult> {
    let fit = boost_fit(data, &config.boosting.to_core(true)?)?;
    write_fit(out, data, &fit, config)?;
    Ok(fit)
}

/// Grid search on the configured split, run on `config.threads` workers. With
/// `tuning.refit` the data are refitted at the best triple into `out/refit`.
pub fn tune_to(data: &JointData, config: &RunConfig, out: &Path) -> Result<TuningResult> {
    let seed = config.require_seed()?;
    let grid = config.tuning.grid()?;
    let base = config.boosting.to_core(false)?;
    let folds = make_folds(data, config.tuning.split_plan(), seed)?;
    let result = parallel::pool(config.threads).install(|| parallel::grid_search(&folds, &grid, &base))?;
    write_tuning(out, &result, config)?;
    if config.tuning.refit {
        let (m_l, m_s, m_ls) = result.best_triple;
        let mut refit = config.clone();
        refit.boosting.m_stop_l = m_l;
        refit.boosting.m_stop_s = m_s;
        refit.boosting.m_stop_ls = m_ls;
        fit_to(data, &refit, &out.join("refit"))?;
    }
    Ok(result)
}

/// Runs the simulation study and writes its aggregate tables.
pub fn replicate_to(config: &RunConfig, out: &Path) -> Result<ReplicateReport> {
    let seed = config.require_seed()?;
    let report = parallel::pool(config.threads).install(|| replicate(config, seed))?;
    write_replicate(out, &report)?;
    Ok(report)
}

/// Effective configuration from an optional file plus flag overrides.
pub fn effective_config(path: Option<&PathBuf>, seed: Option<u64>, threads: Option<usize>) -> Result<RunConfig> {
    let mut config = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if seed.is_some() {
        config.seed = seed;
    }
    if let Some(t) = threads {
        config.threads = t;
    }
    Ok(config)
}
