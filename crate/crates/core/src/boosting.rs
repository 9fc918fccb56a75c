//! The boosting loop.
//!
//! Each iteration `m = 1..=m_stop` runs four steps in order, each step seeing
//! the state left by the previous one:
//!
//! 1. longitudinal predictor (intercept, η_l covariates, random effects, time
//!    slope), while `m ≤ m_stop_l`;
//! 2. survival predictor (η_s covariates) followed by the profile update of
//!    λ₀, while `m ≤ m_stop_s`;
//! 3. shared predictor (η_ls covariates), while `m ≤ m_stop_ls`;
//! 4. σ² while `m ≤ max(m_stop_l, m_stop_ls)`, then α while `m ≤ m_stop_ls`.
//!
//! A predictor past its stopping iteration keeps its coefficients unchanged.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::baselearners::{
    fit_intercept, fit_linear, fit_random_effects, fit_time, select_best, BaseLearnerFit, Increment,
    LearnerId,
};
use crate::data::{compute_predictors, DimensionError, JointData, ParameterState, PredictorValues};
use crate::likelihood::{
    cum_hazard_factor, longitudinal_gradient, loglik_from_predictors, shared_gradient, survival_gradient,
    survival_loglik,
};
pub use crate::likelihood::SharedGradient;
use crate::optimize::brent_maximize;
use crate::PARAMETER_FLOOR;

#[derive(Clone, Debug, PartialEq)]
pub struct BoostingConfig {
    pub m_stop_l: usize,
    pub m_stop_s: usize,
    pub m_stop_ls: usize,
    pub nu_l: f64,
    pub nu_s: f64,
    pub nu_ls: f64,
    /// Ridge penalty of the random-effects base-learner.
    pub re_ridge: f64,
    pub alpha_interval: (f64, f64),
    pub alpha_tol: f64,
    pub record_paths: bool,
    pub shared_gradient: SharedGradient,
    /// Factor applied to per-individual mean residuals when initializing the
    /// random intercepts; 0 starts them at zero.
    pub re_init_shrinkage: f64,
    /// Fit the linear learners on mean-centered columns. The implied constant
    /// goes to β₀ in step 1, to the λ₀ update in step 2 and to the shared
    /// constant β_ls0 in step 3.
    pub centered_learners: bool,
}

impl Default for BoostingConfig {
    fn default() -> Self {
        Self {
            m_stop_l: 100,
            m_stop_s: 100,
            m_stop_ls: 100,
            nu_l: 0.1,
            nu_s: 0.3,
            nu_ls: 0.1,
            re_ridge: 1000.0,
            alpha_interval: (-10.0, 10.0),
            alpha_tol: 1e-8,
            record_paths: false,
            shared_gradient: SharedGradient::Exact,
            re_init_shrinkage: 0.0,
            centered_learners: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ConfigError {
    #[error("step length {name} = {value} outside (0, 1]")]
    StepLength { name: &'static str, value: f64 },
    #[error("random-effects ridge must be finite and non-negative, got {0}")]
    Ridge(f64),
    #[error("alpha search interval ({0}, {1}) must be finite with lower < upper")]
    AlphaInterval(f64, f64),
    #[error("alpha tolerance must be positive, got {0}")]
    AlphaTolerance(f64),
    #[error("random-intercept initial shrinkage must lie in [0, 1], got {0}")]
    InitShrinkage(f64),
}

impl BoostingConfig {
    /// Same configuration with different stopping iterations.
    pub fn with_stops(&self, m_l: usize, m_s: usize, m_ls: usize) -> Self {
        Self {
            m_stop_l: m_l,
            m_stop_s: m_s,
            m_stop_ls: m_ls,
            ..self.clone()
        }
    }

    pub fn m_stop(&self) -> usize {
        self.m_stop_l.max(self.m_stop_s).max(self.m_stop_ls)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [("nu_l", self.nu_l), ("nu_s", self.nu_s), ("nu_ls", self.nu_ls)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(ConfigError::StepLength { name, value });
            }
        }
        if !(self.re_ridge >= 0.0 && self.re_ridge.is_finite()) {
            return Err(ConfigError::Ridge(self.re_ridge));
        }
        let (lo, hi) = self.alpha_interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ConfigError::AlphaInterval(lo, hi));
        }
        if !(self.alpha_tol > 0.0) {
            return Err(ConfigError::AlphaTolerance(self.alpha_tol));
        }
        if !(0.0..=1.0).contains(&self.re_init_shrinkage) {
            return Err(ConfigError::InitShrinkage(self.re_init_shrinkage));
        }
        Ok(())
    }
}

/// One of the four sub-steps of an iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    Longitudinal,
    Survival,
    Shared,
    Nuisance,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Step::Longitudinal => "longitudinal",
            Step::Survival => "survival",
            Step::Shared => "shared",
            Step::Nuisance => "nuisance",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum BoostError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("total follow-up time is zero; baseline hazard cannot be initialized")]
    ZeroExposure,
    #[error("non-finite value at iteration {iteration}, {step} step")]
    NonFinite {
        iteration: usize,
        step: Step,
        state: Box<ParameterState>,
    },
    #[error("alpha search failed on ({lo}, {hi}): likelihood not finite")]
    AlphaSearch { lo: f64, hi: f64 },
}

/// Learners selected in one iteration; `None` when the step was skipped or
/// had no usable candidate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IterationSelection {
    pub longitudinal: Option<LearnerId>,
    pub survival: Option<LearnerId>,
    pub shared: Option<LearnerId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub final_state: ParameterState,
    /// State after each iteration, index 0 being the initialization. Empty
    /// unless paths were requested.
    pub paths: Vec<ParameterState>,
    /// Entry `m − 1` holds the selections of iteration `m`.
    pub selection_history: Vec<IterationSelection>,
    /// Negative joint log-likelihood on the training data, index 0 being the
    /// initialization.
    pub train_risk_trace: Vec<f64>,
}

impl FitResult {
    /// Learners selected at least once in the given step.
    pub fn ever_selected(&self, step: Step) -> BTreeSet<LearnerId> {
        self.selection_history
            .iter()
            .filter_map(|s| match step {
                Step::Longitudinal => s.longitudinal,
                Step::Survival => s.survival,
                Step::Shared => s.shared,
                Step::Nuisance => None,
            })
            .collect()
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Starting values: β₀ = mean(y), fixed effects zero, random intercepts at
/// `re_init_shrinkage` times the per-individual mean residual, α = 0, exponential-model λ₀ and the
/// sample variance of y as σ².
pub fn initialize(data: &JointData, config: &BoostingConfig) -> Result<ParameterState, BoostError> {
    let y = &data.longitudinal().outcome;
    let surv = data.survival();
    let exposure: f64 = surv.time.iter().sum();
    if !(exposure > 0.0) {
        return Err(BoostError::ZeroExposure);
    }
    let mut state = ParameterState::zeros_for(data);
    state.beta0 = mean(y);
    for (i, rows) in data.groups().enumerate() {
        state.gamma0[i] = config.re_init_shrinkage * (mean(&y[rows]) - state.beta0);
    }
    let events = surv.event.iter().filter(|&&e| e).count() as f64;
    state.lambda0 = (events / exposure).max(PARAMETER_FLOOR);
    let n = y.len() as f64;
    let var = if y.len() > 1 {
        y.iter().map(|v| (v - state.beta0) * (v - state.beta0)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    state.sigma2 = var.max(PARAMETER_FLOOR);
    Ok(state)
}

/// Residual variance `Σ r² / (N − p)` with the denominator floored at 1 and
/// the result floored at 1e-8.
pub fn sigma2_from_predictors(pred: &PredictorValues, data: &JointData, p: usize) -> f64 {
    let rss: f64 = data
        .longitudinal()
        .outcome
        .iter()
        .zip(&pred.eta_l)
        .zip(&pred.eta_ls_obs)
        .map(|((y, l), ls)| (y - l - ls) * (y - l - ls))
        .sum();
    let denom = (data.n_observations() as f64 - p as f64).max(1.0);
    (rss / denom).max(PARAMETER_FLOOR)
}

pub fn update_sigma2(state: &ParameterState, data: &JointData, p: usize) -> Result<f64, DimensionError> {
    let pred = compute_predictors(state, data)?;
    Ok(sigma2_from_predictors(&pred, data, p))
}

/// Profile maximizer of the likelihood in λ₀: `Σδ / Σ exp(η_s) ∫₀^T exp(α η_ls)`.
pub fn lambda0_from_predictors(pred: &PredictorValues, alpha: f64, data: &JointData) -> f64 {
    let surv = data.survival();
    let events = surv.event.iter().filter(|&&e| e).count() as f64;
    let exposure: f64 = (0..surv.time.len())
        .map(|i| {
            libm::exp(pred.eta_s[i])
                * cum_hazard_factor(pred.eta_ls_minus_t[i], pred.slope[i], alpha, surv.time[i])
        })
        .sum();
    let value = events / exposure;
    if value.is_finite() {
        value.max(PARAMETER_FLOOR)
    } else {
        PARAMETER_FLOOR
    }
}

pub fn update_lambda0(state: &ParameterState, data: &JointData) -> Result<f64, DimensionError> {
    let pred = compute_predictors(state, data)?;
    Ok(lambda0_from_predictors(&pred, state.alpha, data))
}

const ALPHA_MAX_ITER: usize = 500;

/// Maximizer of the likelihood in α over `interval`, with all other
/// parameters held at their current values.
pub fn alpha_from_predictors(
    pred: &PredictorValues,
    lambda0: f64,
    previous: f64,
    data: &JointData,
    interval: (f64, f64),
    tol: f64,
) -> Result<f64, BoostError> {
    let objective = |a: f64| survival_loglik(pred, a, lambda0, data);
    let (lo, hi) = interval;
    let first = brent_maximize(objective, lo, hi, tol, ALPHA_MAX_ITER);
    if !first.saw_non_finite {
        return Ok(first.x);
    }
    let centre = previous.clamp(lo, hi);
    let (lo, hi) = (centre + 0.5 * (lo - centre), centre + 0.5 * (hi - centre));
    let retry = brent_maximize(objective, lo, hi, tol, ALPHA_MAX_ITER);
    if retry.saw_non_finite || !retry.value.is_finite() {
        return Err(BoostError::AlphaSearch { lo, hi });
    }
    Ok(retry.x)
}

pub fn update_alpha(
    state: &ParameterState,
    data: &JointData,
    interval: (f64, f64),
    tol: f64,
) -> Result<f64, BoostError> {
    let pred = compute_predictors(state, data)?;
    alpha_from_predictors(&pred, state.lambda0, state.alpha, data, interval, tol)
}

/// Design columns as seen by the linear learners of one predictor.
struct LearnerColumns {
    columns: Vec<Vec<f64>>,
    /// Subtracted column means (zero when not centering).
    means: Vec<f64>,
}

impl LearnerColumns {
    fn new<'a>(columns: impl Iterator<Item = &'a [f64]>, centered: bool) -> Self {
        let mut out = Self {
            columns: Vec::new(),
            means: Vec::new(),
        };
        for c in columns {
            let m = if centered && !c.is_empty() { mean(c) } else { 0.0 };
            out.columns.push(c.iter().map(|x| x - m).collect());
            out.means.push(m);
        }
        out
    }

    fn candidates(&self, u: &[f64], out: &mut Vec<BaseLearnerFit>) {
        for (k, x) in self.columns.iter().enumerate() {
            if let Ok(fit) = fit_linear(u, x, LearnerId::Covariate(k)) {
                out.push(fit);
            }
        }
    }
}

fn scalar(fit: &BaseLearnerFit) -> f64 {
    match fit.increment {
        Increment::Scalar(b) => b,
        Increment::RandomEffects { .. } => unreachable!("random-effects learner has no scalar increment"),
    }
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Runs the boosting algorithm on `data`.
pub fn boost_fit(data: &JointData, config: &BoostingConfig) -> Result<FitResult, BoostError> {
    config.validate()?;
    let mut state = initialize(data, config)?;
    let mut pred = compute_predictors(&state, data)?;
    let m_stop = config.m_stop();
    let long = data.longitudinal();
    let times = &long.time;
    let centered = config.centered_learners;
    let design_l = LearnerColumns::new(long.x_l.columns(), centered);
    let design_s = LearnerColumns::new(data.survival().x_s.columns(), centered);
    let design_t = LearnerColumns::new(core::iter::once(times.as_slice()), centered);
    let design_ls = LearnerColumns::new(long.x_ls.columns(), centered);

    let risk = |state: &ParameterState, pred: &PredictorValues| {
        -loglik_from_predictors(pred, state.alpha, state.lambda0, state.sigma2, data)
    };
    let non_finite = |iteration, step, state: &ParameterState| BoostError::NonFinite {
        iteration,
        step,
        state: Box::new(state.clone()),
    };

    let initial_risk = risk(&state, &pred);
    if !initial_risk.is_finite() {
        return Err(non_finite(0, Step::Nuisance, &state));
    }
    let mut paths = Vec::new();
    if config.record_paths {
        paths.reserve(m_stop + 1);
        paths.push(state.clone());
    }
    let mut selection_history = Vec::with_capacity(m_stop);
    let mut train_risk_trace = Vec::with_capacity(m_stop + 1);
    train_risk_trace.push(initial_risk);
    // learners entering the σ² degrees-of-freedom correction
    let mut mean_structure: BTreeSet<(Step, LearnerId)> = BTreeSet::new();
    let mut candidates = Vec::new();

    for m in 1..=m_stop {
        let mut selection = IterationSelection::default();

        if m <= config.m_stop_l {
            let u = longitudinal_gradient(&pred, state.sigma2, data);
            if !all_finite(&u) {
                return Err(non_finite(m, Step::Longitudinal, &state));
            }
            candidates.clear();
            candidates.push(fit_intercept(&u));
            design_l.candidates(&u, &mut candidates);
            candidates.push(fit_random_effects(&u, data.groups(), times, config.re_ridge));
            if let Ok(fit) = fit_time(&u, &design_t.columns[0]) {
                candidates.push(fit);
            }
            let best = select_best(&candidates).expect("intercept is always a candidate");
            let nu = config.nu_l;
            match (&best.learner, &best.increment) {
                (LearnerId::Intercept, _) => state.beta0 += nu * scalar(best),
                (LearnerId::Covariate(k), _) => {
                    let step = nu * scalar(best);
                    state.beta_l[*k] += step;
                    state.beta0 -= step * design_l.means[*k];
                }
                (LearnerId::Time, _) => {
                    let step = nu * scalar(best);
                    state.beta_t += step;
                    state.beta0 -= step * design_t.means[0];
                }
                (LearnerId::RandomEffects, Increment::RandomEffects { intercepts, slopes }) => {
                    for (g, a) in state.gamma0.iter_mut().zip(intercepts) {
                        *g += nu * a;
                    }
                    for (g, a) in state.gamma1.iter_mut().zip(slopes) {
                        *g += nu * a;
                    }
                }
                (LearnerId::RandomEffects, Increment::Scalar(_)) => unreachable!(),
            }
            selection.longitudinal = Some(best.learner);
            mean_structure.insert((Step::Longitudinal, best.learner));
            pred = compute_predictors(&state, data)?;
        }

        if m <= config.m_stop_s {
            let u = survival_gradient(&pred, state.alpha, state.lambda0, data);
            if !all_finite(&u) {
                return Err(non_finite(m, Step::Survival, &state));
            }
            candidates.clear();
            design_s.candidates(&u, &mut candidates);
            if let Ok(best) = select_best(&candidates) {
                if let LearnerId::Covariate(k) = best.learner {
                    state.beta_s[k] += config.nu_s * scalar(best);
                }
                selection.survival = Some(best.learner);
                pred = compute_predictors(&state, data)?;
            }
            state.lambda0 = lambda0_from_predictors(&pred, state.alpha, data);
        }

        if m <= config.m_stop_ls {
            let u = shared_gradient(
                &pred,
                state.alpha,
                state.lambda0,
                state.sigma2,
                data,
                config.shared_gradient,
            );
            if !all_finite(&u) {
                return Err(non_finite(m, Step::Shared, &state));
            }
            candidates.clear();
            design_ls.candidates(&u, &mut candidates);
            if let Ok(best) = select_best(&candidates) {
                if let LearnerId::Covariate(k) = best.learner {
                    let step = config.nu_ls * scalar(best);
                    state.beta_ls[k] += step;
                    state.beta_ls0 -= step * design_ls.means[k];
                }
                selection.shared = Some(best.learner);
                mean_structure.insert((Step::Shared, best.learner));
                pred = compute_predictors(&state, data)?;
            }
        }

        if m <= config.m_stop_l.max(config.m_stop_ls) {
            state.sigma2 = sigma2_from_predictors(&pred, data, mean_structure.len());
        }
        if m <= config.m_stop_ls {
            state.alpha = alpha_from_predictors(
                &pred,
                state.lambda0,
                state.alpha,
                data,
                config.alpha_interval,
                config.alpha_tol,
            )?;
        }

        let r = risk(&state, &pred);
        if !r.is_finite() {
            return Err(non_finite(m, Step::Nuisance, &state));
        }
        train_risk_trace.push(r);
        selection_history.push(selection);
        if config.record_paths {
            paths.push(state.clone());
        }
    }

    Ok(FitResult {
        final_state: state,
        paths,
        selection_history,
        train_risk_trace,
    })
}
