//! Least-squares base-learners fitted to a gradient vector.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::Range;

use thiserror::Error;

/// Identifies a base-learner within one predictor. The derived order is the
/// tie-break order used by [`select_best`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LearnerId {
    Intercept,
    /// Column index into the predictor's covariate matrix.
    Covariate(usize),
    RandomEffects,
    Time,
}

impl fmt::Display for LearnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerId::Intercept => f.write_str("intercept"),
            LearnerId::Covariate(k) => write!(f, "covariate:{k}"),
            LearnerId::RandomEffects => f.write_str("random-effects"),
            LearnerId::Time => f.write_str("time"),
        }
    }
}

/// Update carried by a fitted base-learner, before step-length scaling.
#[derive(Clone, Debug, PartialEq)]
pub enum Increment {
    Scalar(f64),
    RandomEffects {
        intercepts: Vec<f64>,
        slopes: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaseLearnerFit {
    pub learner: LearnerId,
    pub rss: f64,
    pub increment: Increment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum LearnerError {
    #[error("learner {0} has an all-zero design column")]
    ZeroColumn(LearnerId),
    #[error("no candidate base-learners")]
    NoCandidates,
}

fn rss_scaled(u: &[f64], x: &[f64], b: f64) -> f64 {
    u.iter()
        .zip(x)
        .map(|(u, x)| {
            let r = u - b * x;
            r * r
        })
        .sum()
}

/// Slope-only least squares `b = ⟨u,x⟩/⟨x,x⟩` through the origin.
pub fn fit_linear(u: &[f64], x: &[f64], learner: LearnerId) -> Result<BaseLearnerFit, LearnerError> {
    debug_assert_eq!(u.len(), x.len());
    let xx: f64 = x.iter().map(|x| x * x).sum();
    if xx == 0.0 {
        return Err(LearnerError::ZeroColumn(learner));
    }
    let ux: f64 = u.iter().zip(x).map(|(u, x)| u * x).sum();
    let b = ux / xx;
    Ok(BaseLearnerFit {
        learner,
        rss: rss_scaled(u, x, b),
        increment: Increment::Scalar(b),
    })
}

pub fn fit_intercept(u: &[f64]) -> BaseLearnerFit {
    let b = if u.is_empty() {
        0.0
    } else {
        u.iter().sum::<f64>() / u.len() as f64
    };
    BaseLearnerFit {
        learner: LearnerId::Intercept,
        rss: u.iter().map(|u| (u - b) * (u - b)).sum(),
        increment: Increment::Scalar(b),
    }
}

pub fn fit_time(u: &[f64], t: &[f64]) -> Result<BaseLearnerFit, LearnerError> {
    fit_linear(u, t, LearnerId::Time)
}

/// Per-individual ridge-penalized random intercept and slope.
///
/// For each group solves `min Σ_j (u_j − a0 − a1 t_j)² + ridge (a0² + a1²)`.
/// A singular 2×2 system (e.g. one observation at `ridge = 0`) falls back to
/// an intercept-only fit for that individual.
pub fn fit_random_effects<I>(u: &[f64], groups: I, t: &[f64], ridge: f64) -> BaseLearnerFit
where
    I: IntoIterator<Item = Range<usize>>,
{
    let mut intercepts = Vec::new();
    let mut slopes = Vec::new();
    let mut rss = 0.0;
    for rows in groups {
        let (mut s1, mut s2, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0);
        for r in rows.clone() {
            s1 += t[r];
            s2 += t[r] * t[r];
            r0 += u[r];
            r1 += u[r] * t[r];
        }
        let a00 = rows.len() as f64 + ridge;
        let a11 = s2 + ridge;
        let det = a00 * a11 - s1 * s1;
        let (a0, a1) = if a00 > 0.0 && det > 1e-12 * a00 * a11 {
            ((a11 * r0 - s1 * r1) / det, (a00 * r1 - s1 * r0) / det)
        } else if a00 > 0.0 {
            (r0 / a00, 0.0)
        } else {
            (0.0, 0.0)
        };
        for r in rows {
            let e = u[r] - a0 - a1 * t[r];
            rss += e * e;
        }
        intercepts.push(a0);
        slopes.push(a1);
    }
    BaseLearnerFit {
        learner: LearnerId::RandomEffects,
        rss,
        increment: Increment::RandomEffects { intercepts, slopes },
    }
}

/// Candidate with minimal RSS; ties go to the lowest [`LearnerId`].
pub fn select_best(candidates: &[BaseLearnerFit]) -> Result<&BaseLearnerFit, LearnerError> {
    candidates
        .iter()
        .min_by(|a, b| match a.rss.total_cmp(&b.rss) {
            Ordering::Equal => a.learner.cmp(&b.learner),
            o => o,
        })
        .ok_or(LearnerError::NoCandidates)
}
