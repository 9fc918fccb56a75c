//! Grid search over stopping-iteration triples.
//!
//! Every triple gets its own fit on each training fold; risk is the negative
//! joint log-likelihood on the held-out individuals with their random effects
//! set to zero. Results are assembled in grid order, so a parallel evaluator
//! that calls [`evaluate_point`] per triple and hands the risks to
//! [`assemble`] produces exactly the surface of [`grid_search`].

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::boosting::{boost_fit, BoostError, BoostingConfig};
use crate::data::{DimensionError, JointData, ParameterState};
use crate::likelihood::{joint_loglik, LikelihoodError};

pub type Triple = (usize, usize, usize);

/// Training and test individual indices of one fold.
pub type Split = (Vec<usize>, Vec<usize>);

#[derive(Clone, Debug, PartialEq, Error)]
pub enum TuningError {
    #[error("grid axis {axis} must be non-empty and strictly increasing")]
    InvalidGrid { axis: &'static str },
    #[error("cannot split {n} individuals into {k} folds")]
    TooManyFolds { n: usize, k: usize },
    #[error("test fraction {0} must lie in (0, 1)")]
    TestFraction(f64),
    #[error("need at least two individuals to split, got {0}")]
    TooFewIndividuals(usize),
    #[error("empty test set")]
    EmptyTestSet,
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Fit(#[from] BoostError),
}

/// Candidate stopping iterations per predictor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    l: Vec<usize>,
    s: Vec<usize>,
    ls: Vec<usize>,
}

impl Grid {
    pub fn new(l: Vec<usize>, s: Vec<usize>, ls: Vec<usize>) -> Result<Self, TuningError> {
        for (axis, v) in [("m_l", &l), ("m_s", &s), ("m_ls", &ls)] {
            if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) {
                return Err(TuningError::InvalidGrid { axis });
            }
        }
        Ok(Self { l, s, ls })
    }

    /// `{start, start + step, …, ≤ end}` on every axis.
    pub fn arithmetic(l: (usize, usize, usize), s: (usize, usize, usize), ls: (usize, usize, usize)) -> Result<Self, TuningError> {
        let axis = |(start, step, end): (usize, usize, usize)| -> Vec<usize> {
            if step == 0 {
                return alloc::vec![start];
            }
            (start..=end).step_by(step).collect()
        };
        Self::new(axis(l), axis(s), axis(ls))
    }

    pub fn axes(&self) -> (&[usize], &[usize], &[usize]) {
        (&self.l, &self.s, &self.ls)
    }

    pub fn len(&self) -> usize {
        self.l.len() * self.s.len() * self.ls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Triples in lexicographic order `(m_l, m_s, m_ls)`.
    pub fn triples(&self) -> Vec<Triple> {
        let mut out = Vec::with_capacity(self.len());
        for &a in &self.l {
            for &b in &self.s {
                for &c in &self.ls {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    /// Which components of `t` sit on the upper end of their axis.
    pub fn upper_boundary(&self, t: Triple) -> [bool; 3] {
        [
            self.l.len() > 1 && Some(&t.0) == self.l.last(),
            self.s.len() > 1 && Some(&t.1) == self.s.last(),
            self.ls.len() > 1 && Some(&t.2) == self.ls.last(),
        ]
    }
}

/// How individuals are split into training and test sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SplitPlan {
    /// One random split with the given share of individuals held out.
    Holdout { test_fraction: f64 },
    /// `k` disjoint test folds covering every individual once.
    KFold { k: usize },
}

/// Training and test individual indices for each fold. Indices within a set
/// are ascending.
pub fn split_individuals(n: usize, plan: SplitPlan, seed: u64) -> Result<Vec<Split>, TuningError> {
    if n < 2 {
        return Err(TuningError::TooFewIndividuals(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let sorted = |mut v: Vec<usize>| {
        v.sort_unstable();
        v
    };
    match plan {
        SplitPlan::Holdout { test_fraction } => {
            if !(test_fraction > 0.0 && test_fraction < 1.0) {
                return Err(TuningError::TestFraction(test_fraction));
            }
            let n_test = (libm::round(n as f64 * test_fraction) as usize).clamp(1, n - 1);
            let test = sorted(order[..n_test].to_vec());
            let train = sorted(order[n_test..].to_vec());
            Ok(alloc::vec![(train, test)])
        }
        SplitPlan::KFold { k } => {
            if k < 2 || k > n {
                return Err(TuningError::TooManyFolds { n, k });
            }
            let mut folds = Vec::with_capacity(k);
            let mut start = 0;
            for f in 0..k {
                let size = n / k + usize::from(f < n % k);
                let test = sorted(order[start..start + size].to_vec());
                let train = sorted(order[..start].iter().chain(&order[start + size..]).copied().collect());
                folds.push((train, test));
                start += size;
            }
            Ok(folds)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fold {
    pub train: JointData,
    pub test: JointData,
}

pub fn make_folds(data: &JointData, plan: SplitPlan, seed: u64) -> Result<Vec<Fold>, TuningError> {
    Ok(split_individuals(data.n_individuals(), plan, seed)?
        .into_iter()
        .map(|(train, test)| Fold {
            train: data.subset(&train),
            test: data.subset(&test),
        })
        .collect())
}

/// Negative log-likelihood of `state` on unseen individuals, whose random
/// effects are set to zero. A non-finite likelihood gives `+∞`.
pub fn heldout_risk(state: &ParameterState, test: &JointData) -> Result<f64, TuningError> {
    if test.n_individuals() == 0 {
        return Err(TuningError::EmptyTestSet);
    }
    let population = state.population_level(test.n_individuals());
    match joint_loglik(&population, test) {
        Ok(ll) => Ok(-ll),
        Err(LikelihoodError::NonFinite(_)) => Ok(f64::INFINITY),
        Err(LikelihoodError::Dimension(e)) => Err(e.into()),
    }
}

/// Held-out risk of one triple on every fold.
pub fn evaluate_point(folds: &[Fold], triple: Triple, base: &BoostingConfig) -> Result<Vec<f64>, TuningError> {
    let config = BoostingConfig {
        record_paths: false,
        ..base.with_stops(triple.0, triple.1, triple.2)
    };
    folds
        .iter()
        .map(|fold| match boost_fit(&fold.train, &config) {
            Ok(fit) => heldout_risk(&fit.final_state, &fold.test),
            Err(BoostError::NonFinite { .. } | BoostError::AlphaSearch { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e.into()),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub triple: Triple,
    /// Mean of `fold_risks`.
    pub risk: f64,
    pub fold_risks: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuningResult {
    pub grid: Grid,
    /// One entry per triple, in grid order.
    pub surface: Vec<GridPoint>,
    pub best_triple: Triple,
    pub best_risk: f64,
    /// Best triple sits on the upper end of the `(m_l, m_s, m_ls)` axes.
    pub at_upper_boundary: [bool; 3],
}

impl TuningResult {
    pub fn is_interior(&self) -> bool {
        !self.at_upper_boundary.iter().any(|&b| b)
    }
}

fn total(t: Triple) -> usize {
    t.0 + t.1 + t.2
}

/// Builds the result from per-triple fold risks given in grid order.
pub fn assemble(grid: &Grid, fold_risks: Vec<Vec<f64>>) -> TuningResult {
    let triples = grid.triples();
    assert_eq!(triples.len(), fold_risks.len(), "one risk vector per grid triple");
    let surface: Vec<GridPoint> = triples
        .into_iter()
        .zip(fold_risks)
        .map(|(triple, fold_risks)| {
            let risk = fold_risks.iter().sum::<f64>() / fold_risks.len() as f64;
            GridPoint { triple, risk, fold_risks }
        })
        .collect();
    let best = surface
        .iter()
        .min_by(|a, b| match a.risk.total_cmp(&b.risk) {
            Ordering::Equal => total(a.triple).cmp(&total(b.triple)).then(a.triple.cmp(&b.triple)),
            o => o,
        })
        .expect("grid is non-empty");
    let (best_triple, best_risk) = (best.triple, best.risk);
    TuningResult {
        at_upper_boundary: grid.upper_boundary(best_triple),
        grid: grid.clone(),
        surface,
        best_triple,
        best_risk,
    }
}

/// Sequential grid search.
pub fn grid_search(folds: &[Fold], grid: &Grid, base: &BoostingConfig) -> Result<TuningResult, TuningError> {
    if folds.is_empty() {
        return Err(TuningError::EmptyTestSet);
    }
    let risks = grid
        .triples()
        .into_iter()
        .map(|t| evaluate_point(folds, t, base))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(grid, risks))
}
