//! Fit and tuning outputs: coefficient tables, paths, selection history,
//! risk traces and risk surfaces.

use std::path::Path;

use jointboost_core::{FitResult, JointData, LearnerId, ParameterState, TuningResult};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::table::{format_float, output_path, write_rows};

/// Fixed-effect and nuisance parameter names in report order: `beta0`, the
/// covariate columns of each predictor, the shared constant `beta_ls0`,
/// `beta_t`, `alpha`, `lambda0`, `sigma2`.
pub fn parameter_names(data: &JointData) -> Vec<String> {
    let long = data.longitudinal();
    let mut names = vec!["beta0".to_owned()];
    names.extend(long.x_l.names().iter().cloned());
    names.extend(data.survival().x_s.names().iter().cloned());
    names.extend(long.x_ls.names().iter().cloned());
    names.extend(["beta_ls0", "beta_t", "alpha", "lambda0", "sigma2"].map(String::from));
    names
}

/// Values in the order of [`parameter_names`].
pub fn parameter_values(state: &ParameterState) -> Vec<f64> {
    let mut v = vec![state.beta0];
    v.extend(&state.beta_l);
    v.extend(&state.beta_s);
    v.extend(&state.beta_ls);
    v.extend([state.beta_ls0, state.beta_t, state.alpha, state.lambda0, state.sigma2]);
    v
}

/// Column name of a selected learner within its predictor.
pub fn learner_name(learner: Option<LearnerId>, columns: &[String]) -> String {
    match learner {
        None => String::new(),
        Some(LearnerId::Covariate(k)) => columns[k].clone(),
        Some(LearnerId::Intercept) => "intercept".into(),
        Some(LearnerId::RandomEffects) => "random_effects".into(),
        Some(LearnerId::Time) => "time".into(),
    }
}

#[derive(Serialize)]
struct NamedValue {
    name: String,
    value: f64,
}

#[derive(Serialize)]
struct FitSummary<'a> {
    config: &'a RunConfig,
    individuals: usize,
    observations: usize,
    events: usize,
    stopping_iterations: (usize, usize, usize),
    coefficients: Vec<NamedValue>,
    final_train_risk: f64,
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `coefficients.csv`, `random_effects.csv`, `selection.csv`,
/// `risk_trace.csv`, `paths.csv` (when paths were recorded) and `fit.json`.
pub fn write_fit(dir: &Path, data: &JointData, fit: &FitResult, config: &RunConfig) -> Result<()> {
    let names = parameter_names(data);
    let values = parameter_values(&fit.final_state);
    write_rows(
        &output_path(dir, "coefficients.csv")?,
        &["name", "value"],
        names.iter().zip(&values).map(|(n, v)| [n.clone(), format_float(*v)]),
    )?;

    let state = &fit.final_state;
    write_rows(
        &output_path(dir, "random_effects.csv")?,
        &["id", "gamma0", "gamma1"],
        (0..data.n_individuals())
            .map(|i| [data.external_id(i).to_string(), format_float(state.gamma0[i]), format_float(state.gamma1[i])]),
    )?;

    let long = data.longitudinal();
    let (cols_l, cols_s, cols_ls) = (long.x_l.names(), data.survival().x_s.names(), long.x_ls.names());
    write_rows(
        &output_path(dir, "selection.csv")?,
        &["iteration", "longitudinal", "survival", "shared"],
        fit.selection_history.iter().enumerate().map(|(m, s)| {
            [
                (m + 1).to_string(),
                learner_name(s.longitudinal, cols_l),
                learner_name(s.survival, cols_s),
                learner_name(s.shared, cols_ls),
            ]
        }),
    )?;

    write_rows(
        &output_path(dir, "risk_trace.csv")?,
        &["iteration", "risk"],
        fit.train_risk_trace.iter().enumerate().map(|(m, r)| [m.to_string(), format_float(*r)]),
    )?;

    if !fit.paths.is_empty() {
        let header: Vec<&str> = std::iter::once("iteration").chain(names.iter().map(String::as_str)).collect();
        write_rows(
            &output_path(dir, "paths.csv")?,
            &header,
            fit.paths.iter().enumerate().map(|(m, s)| {
                std::iter::once(m.to_string()).chain(parameter_values(s).into_iter().map(format_float))
            }),
        )?;
    }

    let b = &config.boosting;
    let summary = FitSummary {
        config,
        individuals: data.n_individuals(),
        observations: data.n_observations(),
        events: data.survival().event.iter().filter(|&&e| e).count(),
        stopping_iterations: (b.m_stop_l, b.m_stop_s, b.m_stop_ls),
        coefficients: names.into_iter().zip(values).map(|(name, value)| NamedValue { name, value }).collect(),
        final_train_risk: *fit.train_risk_trace.last().expect("trace holds the initial risk"),
    };
    write_json(&output_path(dir, "fit.json")?, &summary)
}

/// Rows `m_l, m_s, m_ls, fold, risk` of a tuning surface, one per fold and
/// triple, folds numbered from 1.
pub fn surface_rows(result: &TuningResult) -> Vec<[String; 5]> {
    result
        .surface
        .iter()
        .flat_map(|p| {
            p.fold_risks.iter().enumerate().map(move |(f, r)| {
                [
                    p.triple.0.to_string(),
                    p.triple.1.to_string(),
                    p.triple.2.to_string(),
                    (f + 1).to_string(),
                    format_float(*r),
                ]
            })
        })
        .collect()
}

#[derive(Serialize)]
struct TuneSummary<'a> {
    config: &'a RunConfig,
    grid_points: usize,
    folds: usize,
    best_triple: (usize, usize, usize),
    best_risk: f64,
    /// Best triple on the upper end of the (m_l, m_s, m_ls) axes.
    at_upper_boundary: [bool; 3],
}

/// Writes `surface.csv` and `tune.json`.
pub fn write_tuning(dir: &Path, result: &TuningResult, config: &RunConfig) -> Result<()> {
    write_rows(&output_path(dir, "surface.csv")?, &["m_l", "m_s", "m_ls", "fold", "risk"], surface_rows(result))?;
    let summary = TuneSummary {
        config,
        grid_points: result.surface.len(),
        folds: result.surface.first().map_or(0, |p| p.fold_risks.len()),
        best_triple: result.best_triple,
        best_risk: result.best_risk,
        at_upper_boundary: result.at_upper_boundary,
    };
    write_json(&output_path(dir, "tune.json")?, &summary)
}
