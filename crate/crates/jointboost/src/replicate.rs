//! Multi-seed simulation study: simulate a training and an independent test
//! set, tune the stopping triple on the test set, refit on the training data
//! at the selected triple, then aggregate estimates and selection rates.

use std::path::Path;

use jointboost_core::boosting::Step;
use jointboost_core::tuning::Fold;
use jointboost_core::{boost_fit, simulate, validate, BoostingConfig, Grid, LearnerId, SimulatedTruth};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::parallel;
use crate::report::write_json;
use crate::table::{format_float, output_path, write_rows};

/// Training and test seeds of replication `r`.
pub fn replication_seeds(seed: u64, r: usize) -> (u64, u64) {
    let train = seed.wrapping_add(2 * r as u64);
    (train, train.wrapping_add(1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Replication {
    pub replication: usize,
    pub train_seed: u64,
    pub test_seed: u64,
    pub events: usize,
    pub best_triple: (usize, usize, usize),
    pub at_upper_boundary: [bool; 3],
    /// Estimates in the order of [`ReplicateReport::parameters`].
    pub estimates: Vec<f64>,
    /// Selected covariate columns (0-based) of the longitudinal, survival and
    /// shared predictors.
    pub selected: [Vec<usize>; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParameterSummary {
    pub name: String,
    pub truth: f64,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionSummary {
    pub predictor: String,
    pub informative: usize,
    pub noise: usize,
    /// Share of (informative column, replication) pairs selected.
    pub tp_rate: f64,
    /// Share of (noise column, replication) pairs selected.
    pub fp_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicateReport {
    pub config: RunConfig,
    pub parameters: Vec<ParameterSummary>,
    pub selection: Vec<SelectionSummary>,
    pub mean_stopping_iterations: [f64; 3],
    /// Replications whose best triple sits on an upper grid boundary.
    pub boundary_hits: usize,
    pub replications: Vec<Replication>,
}

/// Names and true values of the signal parameters.
fn truth_table(truth: &SimulatedTruth) -> Vec<(String, f64)> {
    let p = &truth.parameters;
    let mut rows = vec![("beta0".to_owned(), p.beta0)];
    for (prefix, values) in [("beta_l", &p.beta_l), ("beta_s", &p.beta_s), ("beta_ls", &p.beta_ls)] {
        rows.extend(values.iter().enumerate().map(|(k, &v)| (format!("{prefix}{}", k + 1), v)));
    }
    rows.extend([
        ("beta_t".to_owned(), p.beta_t),
        ("alpha".to_owned(), p.alpha),
        ("lambda0".to_owned(), p.lambda0),
        ("sigma2".to_owned(), p.sigma2),
    ]);
    rows
}

fn informative_columns(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &m)| m).map(|(k, _)| k).collect()
}

fn run_one(config: &RunConfig, seed: u64, r: usize, grid: &Grid, base: &BoostingConfig) -> Result<(Replication, SimulatedTruth)> {
    let (train_seed, test_seed) = replication_seeds(seed, r);
    let sim = simulate(&config.simulation.to_core(train_seed))?;
    let test_sim = simulate(&jointboost_core::SimulationConfig {
        n: config.replicate.n_test,
        ..config.simulation.to_core(test_seed)
    })?;
    let truth = sim.truth;
    let train = validate(sim.longitudinal, sim.survival)?;
    let test = validate(test_sim.longitudinal, test_sim.survival)?;
    let folds = [Fold { train, test }];
    let tuned = parallel::grid_search(&folds, grid, base)?;
    let (m_l, m_s, m_ls) = tuned.best_triple;
    let [Fold { train, .. }] = folds;
    let fit = boost_fit(&train, &base.with_stops(m_l, m_s, m_ls))?;

    // Only the folded constant is identified, so compare it with the truth.
    let s = &fit.final_state.canonical();
    let pick = |beta: &[f64], mask: &[bool]| informative_columns(mask).into_iter().map(|k| beta[k]).collect::<Vec<_>>();
    let mut estimates = vec![s.beta0];
    estimates.extend(pick(&s.beta_l, &truth.informative_l));
    estimates.extend(pick(&s.beta_s, &truth.informative_s));
    estimates.extend(pick(&s.beta_ls, &truth.informative_ls));
    estimates.extend([s.beta_t, s.alpha, s.lambda0, s.sigma2]);
    let selected = [Step::Longitudinal, Step::Survival, Step::Shared].map(|step| {
        fit.ever_selected(step)
            .into_iter()
            .filter_map(|l| match l {
                LearnerId::Covariate(k) => Some(k),
                _ => None,
            })
            .collect()
    });
    let replication = Replication {
        replication: r + 1,
        train_seed,
        test_seed,
        events: train.survival().event.iter().filter(|&&e| e).count(),
        best_triple: tuned.best_triple,
        at_upper_boundary: tuned.at_upper_boundary,
        estimates,
        selected,
    };
    Ok((replication, truth))
}

fn mean_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let sd = if n > 1.0 {
        (values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

/// Runs every replication on the current rayon pool. The report depends only
/// on `config` and `seed`.
pub fn replicate(config: &RunConfig, seed: u64) -> Result<ReplicateReport> {
    let grid = config.tuning.grid()?;
    let base = config.boosting.to_core(false)?;
    let runs: Vec<(Replication, SimulatedTruth)> = (0..config.replicate.replications)
        .into_par_iter()
        .map(|r| run_one(config, seed, r, &grid, &base))
        .collect::<Result<_>>()?;
    let n_reps = runs.len();
    let truth = runs.first().map(|(_, t)| t.clone());

    let parameters = truth.as_ref().map_or_else(Vec::new, |t| {
        truth_table(t)
            .into_iter()
            .enumerate()
            .map(|(j, (name, truth))| {
                let (mean, sd) = mean_sd(runs.iter().map(move |(r, _)| r.estimates[j]));
                ParameterSummary { name, truth, mean, sd }
            })
            .collect()
    });

    let selection = ["longitudinal", "survival", "shared"]
        .iter()
        .enumerate()
        .map(|(p, &predictor)| {
            let (mut tp, mut fp, mut informative, mut noise) = (0usize, 0usize, 0usize, 0usize);
            for (rep, t) in &runs {
                let mask = [&t.informative_l, &t.informative_s, &t.informative_ls][p];
                let hits = rep.selected[p].iter().filter(|&&k| mask[k]).count();
                tp += hits;
                fp += rep.selected[p].len() - hits;
                informative = mask.iter().filter(|&&m| m).count();
                noise = mask.len() - informative;
            }
            let rate = |hits: usize, per_rep: usize| {
                if per_rep == 0 || n_reps == 0 {
                    0.0
                } else {
                    hits as f64 / (per_rep * n_reps) as f64
                }
            };
            SelectionSummary {
                predictor: predictor.to_owned(),
                informative,
                noise,
                tp_rate: rate(tp, informative),
                fp_rate: rate(fp, noise),
            }
        })
        .collect();

    let stops = |f: fn(&(usize, usize, usize)) -> usize| mean_sd(runs.iter().map(move |(r, _)| f(&r.best_triple) as f64)).0;
    Ok(ReplicateReport {
        config: config.clone(),
        parameters,
        selection,
        mean_stopping_iterations: [stops(|t| t.0), stops(|t| t.1), stops(|t| t.2)],
        boundary_hits: runs.iter().filter(|(r, _)| r.at_upper_boundary.iter().any(|&b| b)).count(),
        replications: runs.into_iter().map(|(r, _)| r).collect(),
    })
}

/// Writes `replicate.json`, `parameters.csv` and `selection.csv`.
pub fn write_replicate(dir: &Path, report: &ReplicateReport) -> Result<()> {
    write_json(&output_path(dir, "replicate.json")?, report)?;
    write_rows(
        &output_path(dir, "parameters.csv")?,
        &["name", "truth", "mean", "sd"],
        report
            .parameters
            .iter()
            .map(|p| [p.name.clone(), format_float(p.truth), format_float(p.mean), format_float(p.sd)]),
    )?;
    write_rows(
        &output_path(dir, "selection.csv")?,
        &["predictor", "informative", "noise", "tp_rate", "fp_rate"],
        report.selection.iter().map(|s| {
            [
                s.predictor.clone(),
                s.informative.to_string(),
                s.noise.to_string(),
                format_float(s.tp_rate),
                format_float(s.fp_rate),
            ]
        }),
    )
}
