//! Synthetic joint-model data.
//!
//! Individuals attend a survey once a year for `n_i` years on a uniformly
//! drawn day; times are shifted so the first visit is at 0 and scaled to the
//! unit interval. Event times are drawn by inverting the cumulative hazard,
//! censored at the last planned visit, and visits after the event are
//! dropped. Non-informative covariates are appended last.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::data::{Covariates, LongitudinalDataset, ParameterState, SurvivalDataset};

/// Data-generating parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct TrueParameters {
    pub beta0: f64,
    pub beta_l: Vec<f64>,
    pub beta_s: Vec<f64>,
    pub beta_ls: Vec<f64>,
    pub beta_t: f64,
    pub alpha: f64,
    pub lambda0: f64,
    pub sigma2: f64,
}

impl TrueParameters {
    /// Low-dimensional reference setting: β₀ = 2, β_l = (1, −2),
    /// β_s = (−1, 2, 1), β_ls = (1, −2), β_t = 2, α = 0.5, λ₀ = 0.1, σ² = 0.1.
    pub fn reference() -> Self {
        Self {
            beta0: 2.0,
            beta_l: vec![1.0, -2.0],
            beta_s: vec![-1.0, 2.0, 1.0],
            beta_ls: vec![1.0, -2.0],
            beta_t: 2.0,
            alpha: 0.5,
            lambda0: 0.1,
            sigma2: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub n: usize,
    /// Planned measurements per individual.
    pub n_i: usize,
    pub truth: TrueParameters,
    pub re_sd_intercept: f64,
    pub re_sd_slope: f64,
    pub n_noise_l: usize,
    pub n_noise_s: usize,
    pub n_noise_ls: usize,
    pub covariate_low: f64,
    pub covariate_high: f64,
    pub seed: u64,
}

impl SimulationConfig {
    /// Reference setting with `n = 500`, `n_i = 5`, five noise covariates per
    /// predictor and random-effect standard deviations of 0.1.
    pub fn reference(seed: u64) -> Self {
        Self {
            n: 500,
            n_i: 5,
            truth: TrueParameters::reference(),
            re_sd_intercept: 0.1,
            re_sd_slope: 0.1,
            n_noise_l: 5,
            n_noise_s: 5,
            n_noise_ls: 5,
            covariate_low: 0.0,
            covariate_high: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        let bad = |field: &'static str, reason: &'static str| Err(SimulationError::InvalidConfig { field, reason });
        if self.n < 1 {
            return bad("n", "must be at least 1");
        }
        if self.n_i < 2 {
            return bad("n_i", "must be at least 2");
        }
        if !(self.re_sd_intercept >= 0.0 && self.re_sd_intercept.is_finite()) {
            return bad("re_sd_intercept", "must be finite and non-negative");
        }
        if !(self.re_sd_slope >= 0.0 && self.re_sd_slope.is_finite()) {
            return bad("re_sd_slope", "must be finite and non-negative");
        }
        if !(self.truth.lambda0 > 0.0 && self.truth.lambda0.is_finite()) {
            return bad("lambda0", "must be positive");
        }
        if !(self.truth.sigma2 >= 0.0 && self.truth.sigma2.is_finite()) {
            return bad("sigma2", "must be finite and non-negative");
        }
        if !(self.covariate_low < self.covariate_high)
            || !self.covariate_low.is_finite()
            || !self.covariate_high.is_finite()
        {
            return bad("covariate_low/covariate_high", "need finite low < high");
        }
        let t = &self.truth;
        let coefficients = [t.beta0, t.beta_t, t.alpha]
            .into_iter()
            .chain(t.beta_l.iter().copied())
            .chain(t.beta_s.iter().copied())
            .chain(t.beta_ls.iter().copied());
        for v in coefficients {
            if !v.is_finite() {
                return bad("truth", "coefficients must be finite");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SimulationError {
    #[error("invalid simulation config: {field} {reason}")]
    InvalidConfig {
        field: &'static str,
        reason: &'static str,
    },
}

/// Generated quantities that are not part of the observed data.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulatedTruth {
    pub parameters: TrueParameters,
    /// Per column of the generated matrices: `true` for signal columns.
    pub informative_l: Vec<bool>,
    pub informative_s: Vec<bool>,
    pub informative_ls: Vec<bool>,
    pub gamma0: Vec<f64>,
    pub gamma1: Vec<f64>,
    /// Event times before censoring; `+∞` when the event never occurs.
    pub uncensored_event_time: Vec<f64>,
}

impl SimulatedTruth {
    /// Data-generating state, with zero coefficients on noise columns and the
    /// realized random effects.
    pub fn true_state(&self) -> ParameterState {
        let p = &self.parameters;
        let pad = |signal: &[f64], mask: &[bool]| {
            let mut it = signal.iter();
            mask.iter()
                .map(|&m| if m { *it.next().unwrap_or(&0.0) } else { 0.0 })
                .collect::<Vec<f64>>()
        };
        ParameterState {
            beta0: p.beta0,
            beta_l: pad(&p.beta_l, &self.informative_l),
            beta_s: pad(&p.beta_s, &self.informative_s),
            beta_ls: pad(&p.beta_ls, &self.informative_ls),
            beta_ls0: 0.0,
            beta_t: p.beta_t,
            gamma0: self.gamma0.clone(),
            gamma1: self.gamma1.clone(),
            alpha: p.alpha,
            lambda0: p.lambda0,
            sigma2: p.sigma2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulatedData {
    pub longitudinal: LongitudinalDataset,
    pub survival: SurvivalDataset,
    pub truth: SimulatedTruth,
}

/// One uniform day in `1..=365` per planned visit.
pub fn generate_days<R: Rng>(n: usize, n_i: usize, rng: &mut R) -> Vec<Vec<u32>> {
    (0..n)
        .map(|_| (0..n_i).map(|_| rng.random_range(1..=365u32)).collect())
        .collect()
}

/// Visit `j` (0-based) falls on day `j·365 + d_j`; times are shifted so the
/// first visit is 0 and divided by `n_i·365`.
pub fn times_from_days(days: &[u32]) -> Vec<f64> {
    let n_i = days.len();
    let raw: Vec<u32> = days.iter().enumerate().map(|(j, &d)| j as u32 * 365 + d).collect();
    let scale = (n_i * 365) as f64;
    raw.iter().map(|&r| (r - raw[0]) as f64 / scale).collect()
}

pub fn generate_times<R: Rng>(n: usize, n_i: usize, rng: &mut R) -> Vec<Vec<f64>> {
    generate_days(n, n_i, rng).iter().map(|d| times_from_days(d)).collect()
}

/// Event time with cumulative hazard `−log(1 − u)` under hazard
/// `λ₀ exp(η_s + α(a + s·t))`, where `a` is the time-constant shared part and
/// `s` its slope. Returns `+∞` when the cumulative hazard stays bounded below
/// the target.
pub fn invert_event_time(u: f64, eta_s: f64, eta_ls_minus_t: f64, slope: f64, alpha: f64, lambda0: f64) -> f64 {
    let target = -libm::log1p(-u);
    let rate = alpha * slope;
    let scale = lambda0 * libm::exp(eta_s + alpha * eta_ls_minus_t);
    if rate == 0.0 {
        return target / scale;
    }
    // log(target·rate/(λ₀e^{η_s}) + e^{αa}) − αa = log1p(target·rate/scale).
    // log1p keeps this exact as rate → 0, where a limit switch would be off by
    // a relative rate·T/2 at large T.
    let z = target * rate / scale;
    if z <= -1.0 || z.is_nan() {
        f64::INFINITY
    } else {
        libm::log1p(z) / rate
    }
}

fn uniform_column<R: Rng>(rng: &mut R, len: usize, low: f64, high: f64) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(low..high)).collect()
}

fn names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|k| format!("{prefix}{k}")).collect()
}

/// Generates one dataset pair with its truth.
pub fn simulate(config: &SimulationConfig) -> Result<SimulatedData, SimulationError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (n, n_i) = (config.n, config.n_i);
    let (lo, hi) = (config.covariate_low, config.covariate_high);
    let truth = &config.truth;
    let (p_l, p_s, p_ls) = (truth.beta_l.len(), truth.beta_s.len(), truth.beta_ls.len());

    let times = generate_times(n, n_i, &mut rng);
    let x_l: Vec<Vec<f64>> = (0..p_l).map(|_| uniform_column(&mut rng, n * n_i, lo, hi)).collect();
    let x_ls: Vec<Vec<f64>> = (0..p_ls).map(|_| uniform_column(&mut rng, n, lo, hi)).collect();
    let x_s: Vec<Vec<f64>> = (0..p_s).map(|_| uniform_column(&mut rng, n, lo, hi)).collect();

    let re0 = Normal::new(0.0, config.re_sd_intercept).expect("validated sd");
    let re1 = Normal::new(0.0, config.re_sd_slope).expect("validated sd");
    let gamma0: Vec<f64> = (0..n).map(|_| re0.sample(&mut rng)).collect();
    let gamma1: Vec<f64> = (0..n).map(|_| re1.sample(&mut rng)).collect();

    let eta_s: Vec<f64> = (0..n)
        .map(|i| x_s.iter().zip(&truth.beta_s).map(|(c, b)| b * c[i]).sum())
        .collect();
    let eta_ls_minus_t: Vec<f64> = (0..n)
        .map(|i| gamma0[i] + x_ls.iter().zip(&truth.beta_ls).map(|(c, b)| b * c[i]).sum::<f64>())
        .collect();
    let slope: Vec<f64> = gamma1.iter().map(|g| truth.beta_t + g).collect();

    let noise = Normal::new(0.0, libm::sqrt(truth.sigma2)).expect("validated variance");
    let mut y = Vec::with_capacity(n * n_i);
    for i in 0..n {
        for (j, &t) in times[i].iter().enumerate() {
            let row = i * n_i + j;
            let eta_l = truth.beta0 + x_l.iter().zip(&truth.beta_l).map(|(c, b)| b * c[row]).sum::<f64>();
            let eta_ls = eta_ls_minus_t[i] + slope[i] * t;
            y.push(eta_l + eta_ls + noise.sample(&mut rng));
        }
    }

    let uncensored: Vec<f64> = (0..n)
        .map(|i| {
            let u: f64 = rng.random();
            invert_event_time(u, eta_s[i], eta_ls_minus_t[i], slope[i], truth.alpha, truth.lambda0)
        })
        .collect();

    let mut event_time = Vec::with_capacity(n);
    let mut event = Vec::with_capacity(n);
    let mut kept_rows = Vec::new();
    for i in 0..n {
        let last = times[i][n_i - 1];
        let t = uncensored[i].min(last);
        event_time.push(t);
        event.push(uncensored[i] <= last);
        kept_rows.extend((0..n_i).filter(|&j| times[i][j] <= t).map(|j| i * n_i + j));
    }

    let n_rows = kept_rows.len();
    let ids: Vec<i64> = kept_rows.iter().map(|&r| (r / n_i) as i64 + 1).collect();
    let time: Vec<f64> = kept_rows.iter().map(|&r| times[r / n_i][r % n_i]).collect();
    let outcome: Vec<f64> = kept_rows.iter().map(|&r| y[r]).collect();
    let mut x_l_cols: Vec<Vec<f64>> = x_l
        .iter()
        .map(|c| kept_rows.iter().map(|&r| c[r]).collect())
        .collect();
    let mut x_ls_ind = x_ls;
    let mut x_s_cols = x_s;

    for _ in 0..config.n_noise_l {
        x_l_cols.push(uniform_column(&mut rng, n_rows, lo, hi));
    }
    for _ in 0..config.n_noise_ls {
        x_ls_ind.push(uniform_column(&mut rng, n, lo, hi));
    }
    for _ in 0..config.n_noise_s {
        x_s_cols.push(uniform_column(&mut rng, n, lo, hi));
    }
    let x_ls_cols: Vec<Vec<f64>> = x_ls_ind
        .iter()
        .map(|c| kept_rows.iter().map(|&r| c[r / n_i]).collect())
        .collect();

    let mask = |signal: usize, noise: usize| {
        let mut m = vec![true; signal];
        m.extend(core::iter::repeat_n(false, noise));
        m
    };
    let n_l = x_l_cols.len();
    let n_ls = x_ls_cols.len();
    let n_s = x_s_cols.len();
    let longitudinal = LongitudinalDataset {
        ids,
        time,
        outcome,
        x_l: Covariates::from_columns(n_rows, names("l_", n_l), x_l_cols).expect("row counts agree"),
        x_ls: Covariates::from_columns(n_rows, names("ls_", n_ls), x_ls_cols).expect("row counts agree"),
    };
    let survival = SurvivalDataset {
        ids: (1..=n as i64).collect(),
        time: event_time,
        event,
        x_s: Covariates::from_columns(n, names("s_", n_s), x_s_cols).expect("row counts agree"),
    };
    Ok(SimulatedData {
        longitudinal,
        survival,
        truth: SimulatedTruth {
            parameters: truth.clone(),
            informative_l: mask(p_l, config.n_noise_l),
            informative_s: mask(p_s, config.n_noise_s),
            informative_ls: mask(p_ls, config.n_noise_ls),
            gamma0,
            gamma1,
            uncensored_event_time: uncensored,
        },
    })
}
