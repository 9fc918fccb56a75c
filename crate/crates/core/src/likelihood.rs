//! Joint log-likelihood and its functional gradients.
//!
//! With a constant baseline hazard and a shared predictor that is linear in
//! time, the cumulative hazard has a closed form, so nothing here integrates
//! numerically. [`fd_gradient`] is a central finite-difference oracle over the
//! same likelihood, used to check the analytic gradients.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::data::{compute_predictors, DimensionError, JointData, ParameterState, PredictorValues};
use crate::SLOPE_LIMIT_EPS;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LikelihoodError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("log-likelihood evaluated to a non-finite value ({0})")]
    NonFinite(f64),
}

/// `∫₀ᵀ exp(α (a + s·u)) du` for time-constant part `a` and slope `s`.
///
/// Falls back to the limit `T·exp(α a)` when `|α s| ≤ 1e-10`.
pub fn cum_hazard_factor(eta_ls_minus_t: f64, slope: f64, alpha: f64, t: f64) -> f64 {
    let rate = alpha * slope;
    let base = libm::exp(alpha * eta_ls_minus_t);
    if rate.abs() <= SLOPE_LIMIT_EPS {
        t * base
    } else {
        // exp(α(a + sT)) − exp(αa) = exp(αa)·expm1(αsT)
        base * libm::expm1(rate * t) / rate
    }
}

/// Gaussian part: Σ_ij [−log √(2πσ²) − (y − η_l − η_ls)² / (2σ²)].
pub fn longitudinal_loglik(pred: &PredictorValues, sigma2: f64, data: &JointData) -> f64 {
    let y = &data.longitudinal().outcome;
    let rss: f64 = y
        .iter()
        .zip(&pred.eta_l)
        .zip(&pred.eta_ls_obs)
        .map(|((y, l), ls)| {
            let r = y - l - ls;
            r * r
        })
        .sum();
    let n = y.len() as f64;
    -0.5 * n * libm::log(2.0 * PI * sigma2) - rss / (2.0 * sigma2)
}

/// Survival part: Σ_i δ_i[log λ₀ + η_s + α η_ls(T_i)] − λ₀ exp(η_s) ∫₀^{T_i} exp(α η_ls).
pub fn survival_loglik(pred: &PredictorValues, alpha: f64, lambda0: f64, data: &JointData) -> f64 {
    let surv = data.survival();
    let log_lambda0 = libm::log(lambda0);
    let mut total = 0.0;
    for i in 0..surv.time.len() {
        let t = surv.time[i];
        let a = pred.eta_ls_minus_t[i];
        let s = pred.slope[i];
        if surv.event[i] {
            total += log_lambda0 + pred.eta_s[i] + alpha * (a + s * t);
        }
        total -= lambda0 * libm::exp(pred.eta_s[i]) * cum_hazard_factor(a, s, alpha, t);
    }
    total
}

/// Log-likelihood from precomputed predictors. May be non-finite.
pub fn loglik_from_predictors(
    pred: &PredictorValues,
    alpha: f64,
    lambda0: f64,
    sigma2: f64,
    data: &JointData,
) -> f64 {
    longitudinal_loglik(pred, sigma2, data) + survival_loglik(pred, alpha, lambda0, data)
}

/// Joint log-likelihood of `state` on `data`.
pub fn joint_loglik(state: &ParameterState, data: &JointData) -> Result<f64, LikelihoodError> {
    let pred = compute_predictors(state, data)?;
    let ll = loglik_from_predictors(&pred, state.alpha, state.lambda0, state.sigma2, data);
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(LikelihoodError::NonFinite(ll))
    }
}

/// How the survival contribution of the shared gradient is spread over an
/// individual's observation rows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SharedGradient {
    /// Each row carries `1/n_i` of the individual's survival term, so the sum
    /// over an individual's rows is exactly `∂ℓ/∂η_ls−t,i`.
    #[default]
    Exact,
    /// Every row carries the full survival term (the per-row formula written
    /// for the original algorithm). Overweights the survival part by `n_i`.
    Replicated,
}

/// Negative-loss gradients with respect to the three predictors.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientVectors {
    /// Per observation.
    pub u_l: Vec<f64>,
    /// Per individual.
    pub u_s: Vec<f64>,
    /// Per observation.
    pub u_ls: Vec<f64>,
}

/// `(y − η_l − η_ls) / σ²` per row.
pub fn longitudinal_gradient(pred: &PredictorValues, sigma2: f64, data: &JointData) -> Vec<f64> {
    data.longitudinal()
        .outcome
        .iter()
        .zip(&pred.eta_l)
        .zip(&pred.eta_ls_obs)
        .map(|((y, l), ls)| (y - l - ls) / sigma2)
        .collect()
}

/// `δ_i − λ₀ exp(η_s,i) ∫₀^{T_i} exp(α η_ls)` per individual.
pub fn survival_gradient(pred: &PredictorValues, alpha: f64, lambda0: f64, data: &JointData) -> Vec<f64> {
    let surv = data.survival();
    (0..surv.time.len())
        .map(|i| {
            let delta = if surv.event[i] { 1.0 } else { 0.0 };
            delta
                - lambda0
                    * libm::exp(pred.eta_s[i])
                    * cum_hazard_factor(pred.eta_ls_minus_t[i], pred.slope[i], alpha, surv.time[i])
        })
        .collect()
}

/// Residual term plus `δ_i α − λ₀ exp(η_s,i) α ∫₀^{T_i} exp(α η_ls)`, the
/// survival part being spread over rows according to `form`.
pub fn shared_gradient(
    pred: &PredictorValues,
    alpha: f64,
    lambda0: f64,
    sigma2: f64,
    data: &JointData,
    form: SharedGradient,
) -> Vec<f64> {
    let surv = data.survival();
    let mut u = longitudinal_gradient(pred, sigma2, data);
    for i in 0..data.n_individuals() {
        let delta = if surv.event[i] { 1.0 } else { 0.0 };
        let c = cum_hazard_factor(pred.eta_ls_minus_t[i], pred.slope[i], alpha, surv.time[i]);
        let term = delta * alpha - lambda0 * libm::exp(pred.eta_s[i]) * alpha * c;
        let rows = data.rows_of(i);
        let per_row = match form {
            SharedGradient::Exact => term / rows.len() as f64,
            SharedGradient::Replicated => term,
        };
        for r in rows {
            u[r] += per_row;
        }
    }
    u
}

pub fn gradient_longitudinal(state: &ParameterState, data: &JointData) -> Result<Vec<f64>, DimensionError> {
    let pred = compute_predictors(state, data)?;
    Ok(longitudinal_gradient(&pred, state.sigma2, data))
}

pub fn gradient_survival(state: &ParameterState, data: &JointData) -> Result<Vec<f64>, DimensionError> {
    let pred = compute_predictors(state, data)?;
    Ok(survival_gradient(&pred, state.alpha, state.lambda0, data))
}

pub fn gradient_shared(
    state: &ParameterState,
    data: &JointData,
    form: SharedGradient,
) -> Result<Vec<f64>, DimensionError> {
    let pred = compute_predictors(state, data)?;
    Ok(shared_gradient(&pred, state.alpha, state.lambda0, state.sigma2, data, form))
}

/// All three gradients at one state.
pub fn gradients(
    state: &ParameterState,
    data: &JointData,
    form: SharedGradient,
) -> Result<GradientVectors, DimensionError> {
    let pred = compute_predictors(state, data)?;
    Ok(GradientVectors {
        u_l: longitudinal_gradient(&pred, state.sigma2, data),
        u_s: survival_gradient(&pred, state.alpha, state.lambda0, data),
        u_ls: shared_gradient(&pred, state.alpha, state.lambda0, state.sigma2, data, form),
    })
}

/// Predictor perturbed by the finite-difference oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredictorTarget {
    /// Offset on η_l of one observation row.
    Longitudinal,
    /// Offset on η_s of one individual.
    Survival,
    /// Constant shift of individual i's time-constant shared part η_ls−t,
    /// applied to all of that individual's rows and to its hazard.
    SharedTimeConstant,
}

/// Central finite differences of the joint log-likelihood under unit-wise
/// predictor offsets of size `h`.
pub fn fd_gradient(
    state: &ParameterState,
    data: &JointData,
    target: PredictorTarget,
    h: f64,
) -> Result<Vec<f64>, LikelihoodError> {
    let pred = compute_predictors(state, data)?;
    let ll = |p: &PredictorValues| loglik_from_predictors(p, state.alpha, state.lambda0, state.sigma2, data);
    let units = match target {
        PredictorTarget::Longitudinal => data.n_observations(),
        PredictorTarget::Survival | PredictorTarget::SharedTimeConstant => data.n_individuals(),
    };
    let mut out = vec![0.0; units];
    let mut work = pred.clone();
    for (k, g) in out.iter_mut().enumerate() {
        let mut eval = |offset: f64| {
            match target {
                PredictorTarget::Longitudinal => work.eta_l[k] = pred.eta_l[k] + offset,
                PredictorTarget::Survival => work.eta_s[k] = pred.eta_s[k] + offset,
                PredictorTarget::SharedTimeConstant => {
                    work.eta_ls_minus_t[k] = pred.eta_ls_minus_t[k] + offset;
                    for r in data.rows_of(k) {
                        work.eta_ls_obs[r] = pred.eta_ls_obs[r] + offset;
                    }
                }
            }
            ll(&work)
        };
        let plus = eval(h);
        let minus = eval(-h);
        eval(0.0);
        *g = (plus - minus) / (2.0 * h);
        if !g.is_finite() {
            return Err(LikelihoodError::NonFinite(*g));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::tests::toy;
    use crate::data::{validate, Covariates, LongitudinalDataset, SurvivalDataset};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cum_hazard_limit_case() {
        assert_eq!(cum_hazard_factor(0.0, 0.0, 0.5, 2.0), 2.0);
    }

    #[test]
    fn cum_hazard_unit_exponential() {
        let v = cum_hazard_factor(0.0, 1.0, 1.0, 1.0);
        assert!(close(v, core::f64::consts::E - 1.0, 1e-14));
    }

    #[test]
    fn cum_hazard_continuous_at_zero_rate() {
        let limit = cum_hazard_factor(0.4, 0.0, 0.7, 1.3);
        for rate in [1e-8, -1e-8] {
            let v = cum_hazard_factor(0.4, rate / 0.7, 0.7, 1.3);
            assert!(((v - limit) / limit).abs() < 1e-7, "{v} vs {limit}");
        }
    }

    fn single(y: f64, event: bool, t: f64, n_obs: usize) -> JointData {
        let long = LongitudinalDataset {
            ids: vec![1; n_obs],
            time: vec![0.0; n_obs],
            outcome: vec![y; n_obs],
            x_l: Covariates::empty(n_obs),
            x_ls: Covariates::empty(n_obs),
        };
        let surv = SurvivalDataset {
            ids: vec![1],
            time: vec![t],
            event: vec![event],
            x_s: Covariates::empty(1),
        };
        validate(long, surv).unwrap()
    }

    #[test]
    fn loglik_hand_evaluation() {
        // y = η exactly, σ² = 1/(2π), censored, λ₀·factor = 1
        let data = single(0.0, false, 1.0, 1);
        let mut s = ParameterState::zeros_for(&data);
        s.sigma2 = 1.0 / (2.0 * PI);
        s.lambda0 = 1.0;
        let ll = joint_loglik(&s, &data).unwrap();
        assert!(close(ll, -1.0, 1e-14), "{ll}");
    }

    #[test]
    fn survival_unit_case() {
        let data = single(0.0, true, 1.0, 1);
        let mut s = ParameterState::zeros_for(&data);
        s.alpha = 3.7;
        s.lambda0 = 1.0;
        let pred = compute_predictors(&s, &data).unwrap();
        assert!(close(survival_loglik(&pred, s.alpha, s.lambda0, &data), -1.0, 1e-14));
    }

    #[test]
    fn nonfinite_loglik_reported() {
        let data = single(0.0, true, 1.0, 1);
        let mut s = ParameterState::zeros_for(&data);
        s.gamma0[0] = 800.0;
        s.alpha = 1.0;
        assert!(matches!(joint_loglik(&s, &data), Err(LikelihoodError::NonFinite(_))));
    }

    #[test]
    fn longitudinal_gradient_by_hand() {
        let data = single(3.0, false, 1.0, 1);
        let mut s = ParameterState::zeros_for(&data);
        s.beta0 = 1.0;
        s.sigma2 = 0.5;
        assert_eq!(gradient_longitudinal(&s, &data).unwrap(), vec![4.0]);
        s.beta0 = 3.0;
        assert_eq!(gradient_longitudinal(&s, &data).unwrap(), vec![0.0]);
    }

    #[test]
    fn survival_gradient_limits() {
        let data = single(0.0, false, 2.0, 1);
        let mut s = ParameterState::zeros_for(&data);
        s.lambda0 = 1.0;
        assert!(close(gradient_survival(&s, &data).unwrap()[0], -2.0, 1e-14));

        let data = single(0.0, true, 2.0, 1);
        s.lambda0 = 1e-300;
        assert!(close(gradient_survival(&s, &data).unwrap()[0], 1.0, 1e-12));
    }

    #[test]
    fn shared_gradient_decoupled_when_alpha_zero() {
        let data = single(2.0, true, 0.7, 3);
        let mut s = ParameterState::zeros_for(&data);
        s.beta0 = 2.0;
        s.alpha = 0.0;
        for form in [SharedGradient::Exact, SharedGradient::Replicated] {
            let u = gradient_shared(&s, &data, form).unwrap();
            assert!(u.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn shared_gradient_by_hand() {
        // δ=1, zero residual, α·factor = 0.2 at α = 0.5 → factor = 0.4
        let data = single(0.0, true, 0.4, 1);
        let mut s = ParameterState::zeros_for(&data);
        s.alpha = 0.5;
        s.lambda0 = 1.0;
        let u = gradient_shared(&s, &data, SharedGradient::Exact).unwrap();
        assert!(close(u[0], 0.3, 1e-14), "{}", u[0]);
    }

    #[test]
    fn replicated_form_repeats_survival_term() {
        let data = single(0.0, true, 0.4, 3);
        let mut s = ParameterState::zeros_for(&data);
        s.alpha = 0.5;
        s.lambda0 = 1.0;
        let rep = gradient_shared(&s, &data, SharedGradient::Replicated).unwrap();
        let exact = gradient_shared(&s, &data, SharedGradient::Exact).unwrap();
        for (r, e) in rep.iter().zip(&exact) {
            assert!(close(*r, 0.3, 1e-14));
            assert!(close(*e, 0.1, 1e-14));
        }
    }

    fn smooth_state(data: &JointData) -> ParameterState {
        let mut s = ParameterState::zeros_for(data);
        s.beta0 = 0.3;
        s.beta_l = vec![0.8];
        s.beta_s = vec![-0.6];
        s.beta_ls = vec![0.9];
        s.beta_t = 0.7;
        s.gamma0 = (0..data.n_individuals()).map(|i| 0.1 * i as f64 - 0.1).collect();
        s.gamma1 = (0..data.n_individuals()).map(|i| 0.2 - 0.15 * i as f64).collect();
        s.alpha = 0.6;
        s.lambda0 = 0.8;
        s.sigma2 = 0.4;
        s
    }

    #[test]
    fn fd_oracle_second_order() {
        let data = toy(&[&[0.0, 0.4], &[0.0, 0.2, 0.7], &[0.0]], &[0.5, 0.8, 0.1], &[true, false, true]);
        let s = smooth_state(&data);
        let exact = gradient_survival(&s, &data).unwrap();
        let err = |h| {
            let fd = fd_gradient(&s, &data, PredictorTarget::Survival, h).unwrap();
            fd.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let ratio = err(1e-2) / err(5e-3);
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn fd_oracle_matches_longitudinal() {
        let data = toy(&[&[0.0, 0.4], &[0.0, 0.2, 0.7]], &[0.5, 0.8], &[true, false]);
        let s = smooth_state(&data);
        let fd = fd_gradient(&s, &data, PredictorTarget::Longitudinal, 1e-5).unwrap();
        let u = gradient_longitudinal(&s, &data).unwrap();
        for (a, b) in fd.iter().zip(&u) {
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0));
        }
    }
}
