//! TOML run configuration. Every field has a default, and the effective
//! configuration (defaults expanded) is written into each report.

use std::path::Path;

use jointboost_core::tuning::SplitPlan;
use jointboost_core::{BoostingConfig, Grid, SharedGradient, SimulationConfig, TrueParameters};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Required by `simulate`, `replicate` and k-fold tuning; `--seed` overrides it.
    pub seed: Option<u64>,
    /// Worker threads for tuning; 0 uses every core.
    pub threads: usize,
    pub simulation: SimulationSettings,
    pub boosting: BoostingSettings,
    pub tuning: TuningSettings,
    pub replicate: ReplicateSettings,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            e => e,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Config("a seed is required (config `seed` or --seed)".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruthSettings {
    pub beta0: f64,
    pub beta_l: Vec<f64>,
    pub beta_s: Vec<f64>,
    pub beta_ls: Vec<f64>,
    pub beta_t: f64,
    pub alpha: f64,
    pub lambda0: f64,
    pub sigma2: f64,
}

impl Default for TruthSettings {
    fn default() -> Self {
        let t = TrueParameters::reference();
        Self {
            beta0: t.beta0,
            beta_l: t.beta_l,
            beta_s: t.beta_s,
            beta_ls: t.beta_ls,
            beta_t: t.beta_t,
            alpha: t.alpha,
            lambda0: t.lambda0,
            sigma2: t.sigma2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSettings {
    pub n: usize,
    pub n_i: usize,
    pub re_sd_intercept: f64,
    pub re_sd_slope: f64,
    pub n_noise_l: usize,
    pub n_noise_s: usize,
    pub n_noise_ls: usize,
    pub covariate_low: f64,
    pub covariate_high: f64,
    pub truth: TruthSettings,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        let c = SimulationConfig::reference(0);
        Self {
            n: c.n,
            n_i: c.n_i,
            re_sd_intercept: c.re_sd_intercept,
            re_sd_slope: c.re_sd_slope,
            n_noise_l: c.n_noise_l,
            n_noise_s: c.n_noise_s,
            n_noise_ls: c.n_noise_ls,
            covariate_low: c.covariate_low,
            covariate_high: c.covariate_high,
            truth: TruthSettings::default(),
        }
    }
}

impl SimulationSettings {
    pub fn to_core(&self, seed: u64) -> SimulationConfig {
        let t = &self.truth;
        SimulationConfig {
            n: self.n,
            n_i: self.n_i,
            truth: TrueParameters {
                beta0: t.beta0,
                beta_l: t.beta_l.clone(),
                beta_s: t.beta_s.clone(),
                beta_ls: t.beta_ls.clone(),
                beta_t: t.beta_t,
                alpha: t.alpha,
                lambda0: t.lambda0,
                sigma2: t.sigma2,
            },
            re_sd_intercept: self.re_sd_intercept,
            re_sd_slope: self.re_sd_slope,
            n_noise_l: self.n_noise_l,
            n_noise_s: self.n_noise_s,
            n_noise_ls: self.n_noise_ls,
            covariate_low: self.covariate_low,
            covariate_high: self.covariate_high,
            seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientForm {
    Exact,
    Replicated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostingSettings {
    pub m_stop_l: usize,
    pub m_stop_s: usize,
    pub m_stop_ls: usize,
    pub nu_l: f64,
    pub nu_s: f64,
    pub nu_ls: f64,
    pub re_ridge: f64,
    pub alpha_lower: f64,
    pub alpha_upper: f64,
    pub alpha_tol: f64,
    pub shared_gradient: GradientForm,
    pub re_init_shrinkage: f64,
    pub centered_learners: bool,
}

impl Default for BoostingSettings {
    fn default() -> Self {
        let c = BoostingConfig::default();
        Self {
            m_stop_l: c.m_stop_l,
            m_stop_s: c.m_stop_s,
            m_stop_ls: c.m_stop_ls,
            nu_l: c.nu_l,
            nu_s: c.nu_s,
            nu_ls: c.nu_ls,
            re_ridge: c.re_ridge,
            alpha_lower: c.alpha_interval.0,
            alpha_upper: c.alpha_interval.1,
            alpha_tol: c.alpha_tol,
            shared_gradient: match c.shared_gradient {
                SharedGradient::Exact => GradientForm::Exact,
                SharedGradient::Replicated => GradientForm::Replicated,
            },
            re_init_shrinkage: c.re_init_shrinkage,
            centered_learners: c.centered_learners,
        }
    }
}

impl BoostingSettings {
    /// Core configuration, checked for invalid values.
    pub fn to_core(&self, record_paths: bool) -> Result<BoostingConfig> {
        let config = BoostingConfig {
            m_stop_l: self.m_stop_l,
            m_stop_s: self.m_stop_s,
            m_stop_ls: self.m_stop_ls,
            nu_l: self.nu_l,
            nu_s: self.nu_s,
            nu_ls: self.nu_ls,
            re_ridge: self.re_ridge,
            alpha_interval: (self.alpha_lower, self.alpha_upper),
            alpha_tol: self.alpha_tol,
            record_paths,
            shared_gradient: match self.shared_gradient {
                GradientForm::Exact => SharedGradient::Exact,
                GradientForm::Replicated => SharedGradient::Replicated,
            },
            re_init_shrinkage: self.re_init_shrinkage,
            centered_learners: self.centered_learners,
        };
        config.validate().map_err(|e| Error::Config(format!("boosting: {e}")))?;
        Ok(config)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanKind {
    Holdout,
    Kfold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningSettings {
    pub m_l: Vec<usize>,
    pub m_s: Vec<usize>,
    pub m_ls: Vec<usize>,
    pub plan: PlanKind,
    /// Share of individuals held out under `holdout`.
    pub test_fraction: f64,
    /// Number of folds under `kfold`.
    pub folds: usize,
    /// Refit on all data at the selected triple.
    pub refit: bool,
}

impl Default for TuningSettings {
    fn default() -> Self {
        let axis: Vec<usize> = (60..=300).step_by(30).collect();
        Self {
            m_l: axis.clone(),
            m_s: axis.clone(),
            m_ls: axis,
            plan: PlanKind::Kfold,
            test_fraction: 0.5,
            folds: 10,
            refit: true,
        }
    }
}

impl TuningSettings {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.m_l.clone(), self.m_s.clone(), self.m_ls.clone()).map_err(|e| Error::Config(format!("tuning: {e}")))
    }

    pub fn split_plan(&self) -> SplitPlan {
        match self.plan {
            PlanKind::Holdout => SplitPlan::Holdout {
                test_fraction: self.test_fraction,
            },
            PlanKind::Kfold => SplitPlan::KFold { k: self.folds },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReplicateSettings {
    pub replications: usize,
    /// Individuals in each independently simulated test set.
    pub n_test: usize,
}

impl Default for ReplicateSettings {
    fn default() -> Self {
        Self {
            replications: 10,
            n_test: 1000,
        }
    }
}
