//! Independent reference implementations used by the test suites: a direct
//! transcription of the joint log-likelihood with numerical quadrature for the
//! hazard integral, finite differences on top of it, and a random instance
//! generator.

#![allow(dead_code)]

use jointboost_core::{
    validate, Covariates, JointData, LongitudinalDataset, ParameterState, SurvivalDataset,
};
use rand::Rng;

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // below a few ulps of the panel value further halving only adds roundoff
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Predictors recomputed from the raw data, one entry per row (`eta_l`) or
/// per individual (the rest). Individuals are in order of first appearance.
#[derive(Clone, Debug)]
pub struct Predictors {
    pub eta_l: Vec<f64>,
    pub eta_s: Vec<f64>,
    /// Time-constant part of the shared predictor.
    pub shared_const: Vec<f64>,
    pub slope: Vec<f64>,
}

/// Row ranges per individual, assuming rows are grouped.
pub fn row_groups(ids: &[i64]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for r in 1..=ids.len() {
        if r == ids.len() || ids[r] != ids[start] {
            out.push(start..r);
            start = r;
        }
    }
    out
}

pub fn predictors(data: &JointData, state: &ParameterState) -> Predictors {
    let long = data.longitudinal();
    let surv = data.survival();
    let groups = row_groups(&long.ids);
    let dot = |x: &Covariates, row: usize, beta: &[f64]| -> f64 {
        (0..x.n_cols()).map(|k| x.get(row, k) * beta[k]).sum()
    };
    let eta_l = (0..long.ids.len())
        .map(|r| state.beta0 + dot(&long.x_l, r, &state.beta_l))
        .collect();
    let eta_s = (0..surv.ids.len()).map(|i| dot(&surv.x_s, i, &state.beta_s)).collect();
    let shared_const = groups
        .iter()
        .enumerate()
        .map(|(i, rows)| state.beta_ls0 + state.gamma0[i] + dot(&long.x_ls, rows.start, &state.beta_ls))
        .collect();
    let slope = state.gamma1.iter().map(|g| state.beta_t + g).collect();
    Predictors {
        eta_l,
        eta_s,
        shared_const,
        slope,
    }
}

/// Joint log-likelihood written out term by term, with the hazard integral
/// evaluated by quadrature.
pub fn loglik(data: &JointData, p: &Predictors, alpha: f64, lambda0: f64, sigma2: f64) -> f64 {
    let long = data.longitudinal();
    let surv = data.survival();
    let groups = row_groups(&long.ids);
    let mut total = 0.0;
    for (i, rows) in groups.iter().enumerate() {
        for r in rows.clone() {
            let shared = p.shared_const[i] + p.slope[i] * long.time[r];
            let res = long.outcome[r] - p.eta_l[r] - shared;
            total += -0.5 * (2.0 * std::f64::consts::PI * sigma2).ln() - res * res / (2.0 * sigma2);
        }
        let t_end = surv.time[i];
        let (a, s) = (p.shared_const[i], p.slope[i]);
        let integrand = |u: f64| (alpha * (a + s * u)).exp();
        let integral = simpson(&integrand, 0.0, t_end, 1e-15);
        if surv.event[i] {
            total += lambda0.ln() + p.eta_s[i] + alpha * (a + s * t_end);
        }
        total -= lambda0 * p.eta_s[i].exp() * integral;
    }
    total
}

pub fn loglik_state(data: &JointData, state: &ParameterState) -> f64 {
    loglik(data, &predictors(data, state), state.alpha, state.lambda0, state.sigma2)
}

/// Central differences of [`loglik`] with unit offsets on one predictor.
pub enum Offset {
    /// η_l of one row.
    Longitudinal,
    /// η_s of one individual.
    Survival,
    /// The time-constant shared part of one individual (all rows and hazard).
    Shared,
}

pub fn finite_differences(data: &JointData, state: &ParameterState, which: Offset, h: f64) -> Vec<f64> {
    let base = predictors(data, state);
    let units = match which {
        Offset::Longitudinal => base.eta_l.len(),
        _ => base.eta_s.len(),
    };
    let eval = |k: usize, d: f64| {
        let mut p = base.clone();
        match which {
            Offset::Longitudinal => p.eta_l[k] += d,
            Offset::Survival => p.eta_s[k] += d,
            Offset::Shared => p.shared_const[k] += d,
        }
        loglik(data, &p, state.alpha, state.lambda0, state.sigma2)
    };
    (0..units).map(|k| (eval(k, h) - eval(k, -h)) / (2.0 * h)).collect()
}

/// Shape limits for [`random_instance`].
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_n: usize,
    pub max_ni: usize,
    pub max_p: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Self {
            max_n: 10,
            max_ni: 4,
            max_p: 3,
        }
    }
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn covariates<R: Rng>(rng: &mut R, prefix: &str, rows: usize, p: usize) -> Vec<(String, Vec<f64>)> {
    (0..p)
        .map(|k| (format!("{prefix}{k}"), (0..rows).map(|_| uniform(rng, -1.0, 1.0)).collect()))
        .collect()
}

fn matrix(rows: usize, cols: Vec<(String, Vec<f64>)>) -> Covariates {
    let (names, columns) = cols.into_iter().unzip();
    Covariates::from_columns(rows, names, columns).unwrap()
}

/// A small valid dataset together with a random parameter state.
///
/// A quarter of the instances draw `|α · slope|` below 1e-9 for some
/// individuals so the closed-form limit branch is exercised.
pub fn random_instance<R: Rng>(rng: &mut R, shape: Shape) -> (JointData, ParameterState) {
    let n = rng.random_range(1..=shape.max_n);
    let (p_l, p_s, p_ls) = (
        rng.random_range(0..=shape.max_p),
        rng.random_range(0..=shape.max_p),
        rng.random_range(0..=shape.max_p),
    );
    let mut ids = Vec::new();
    let mut time = Vec::new();
    let mut surv_time = Vec::new();
    let mut event = Vec::new();
    let mut ls_rows: Vec<Vec<f64>> = Vec::new();
    let ls_individual: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p_ls).map(|_| uniform(rng, -1.0, 1.0)).collect())
        .collect();
    for (i, ls) in ls_individual.iter().enumerate() {
        let n_i = rng.random_range(1..=shape.max_ni);
        let mut t = 0.0;
        for j in 0..n_i {
            if j > 0 {
                t += uniform(rng, 0.02, 0.25);
            }
            ids.push(i as i64 + 1);
            time.push(t);
            ls_rows.push(ls.clone());
        }
        surv_time.push(t + uniform(rng, 0.0, 0.25));
        event.push(rng.random_bool(0.5));
    }
    let rows = ids.len();
    let outcome = (0..rows).map(|_| uniform(rng, -2.0, 2.0)).collect();
    let x_l = matrix(rows, covariates(rng, "l", rows, p_l));
    let x_ls = matrix(
        rows,
        (0..p_ls)
            .map(|k| (format!("ls{k}"), ls_rows.iter().map(|r| r[k]).collect()))
            .collect(),
    );
    let x_s = matrix(n, covariates(rng, "s", n, p_s));
    let long = LongitudinalDataset {
        ids: ids.clone(),
        time,
        outcome,
        x_l,
        x_ls,
    };
    let surv = SurvivalDataset {
        ids: (1..=n as i64).collect(),
        time: surv_time,
        event,
        x_s,
    };
    let data = validate(long, surv).expect("generated data is valid");

    let coef = |rng: &mut R, p: usize| (0..p).map(|_| uniform(rng, -1.0, 1.0)).collect::<Vec<_>>();
    let near_limit = rng.random_bool(0.25);
    let beta_t = uniform(rng, -1.0, 1.0);
    let gamma1 = (0..n)
        .map(|_| {
            if near_limit && rng.random_bool(0.5) {
                // slope within 1e-10 of zero
                -beta_t + uniform(rng, -1e-10, 1e-10)
            } else {
                uniform(rng, -0.5, 0.5)
            }
        })
        .collect();
    let state = ParameterState {
        beta0: uniform(rng, -1.0, 1.0),
        beta_l: coef(rng, p_l),
        beta_s: coef(rng, p_s),
        beta_ls: coef(rng, p_ls),
        beta_ls0: uniform(rng, -0.5, 0.5),
        beta_t,
        gamma0: (0..n).map(|_| uniform(rng, -0.5, 0.5)).collect(),
        gamma1,
        alpha: uniform(rng, -1.5, 1.5),
        lambda0: uniform(rng, 0.05, 2.0),
        sigma2: uniform(rng, 0.2, 2.0),
    };
    (data, state)
}
