//! Datasets, parameter containers and linear predictors.
//!
//! Longitudinal data is kept in long format (one row per observation), grouped
//! by individual and sorted by time. [`validate`] checks the raw datasets and
//! produces a [`JointData`] in which individuals carry a dense 0-based index,
//! in order of first appearance in the longitudinal rows.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use thiserror::Error;

/// Column-major covariate matrix with named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Covariates {
    n_rows: usize,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Covariates {
    /// A matrix with `n_rows` rows and no columns.
    pub fn empty(n_rows: usize) -> Self {
        Self {
            n_rows,
            names: Vec::new(),
            columns: Vec::new(),
        }
    }

    /// Builds a matrix from named columns. Every column must have `n_rows`
    /// entries.
    pub fn from_columns(
        n_rows: usize,
        names: Vec<String>,
        columns: Vec<Vec<f64>>,
    ) -> Result<Self, DimensionError> {
        if names.len() != columns.len() {
            return Err(DimensionError {
                what: "covariate names",
                expected: columns.len(),
                found: names.len(),
            });
        }
        for column in &columns {
            if column.len() != n_rows {
                return Err(DimensionError {
                    what: "covariate column length",
                    expected: n_rows,
                    found: column.len(),
                });
            }
        }
        Ok(Self {
            n_rows,
            names,
            columns,
        })
    }

    /// Appends a column.
    pub fn push_column(&mut self, name: String, values: Vec<f64>) -> Result<(), DimensionError> {
        if values.len() != self.n_rows {
            return Err(DimensionError {
                what: "covariate column length",
                expected: self.n_rows,
                found: values.len(),
            });
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.columns[k]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.columns.iter().map(Vec::as_slice)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    /// Matrix made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            n_rows: rows.len(),
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
        }
    }

    /// `X·β` evaluated row by row, plus `offset`.
    pub fn linear_combination(&self, coefficients: &[f64], offset: f64) -> Vec<f64> {
        debug_assert_eq!(coefficients.len(), self.n_cols());
        let mut out = vec![offset; self.n_rows];
        for (column, &b) in self.columns.iter().zip(coefficients) {
            if b == 0.0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(column) {
                *o += b * x;
            }
        }
        out
    }
}

/// Raw longitudinal observations, one row per measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct LongitudinalDataset {
    /// External individual identifier per row.
    pub ids: Vec<i64>,
    /// Standardized observation time in `[0, 1]`.
    pub time: Vec<f64>,
    pub outcome: Vec<f64>,
    /// Time-varying covariates entering η_l.
    pub x_l: Covariates,
    /// Time-constant covariates entering η_ls (repeated on every row).
    pub x_ls: Covariates,
}

/// Raw survival records, one row per individual.
#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalDataset {
    pub ids: Vec<i64>,
    pub time: Vec<f64>,
    /// `true` for an observed event, `false` for a censored record.
    pub event: Vec<bool>,
    /// Baseline covariates entering η_s.
    pub x_s: Covariates,
}

/// A single failed data check.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Violation {
    #[error("no individuals in longitudinal data")]
    Empty,
    #[error("length mismatch in {field}: expected {expected}, found {found}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value in {field} at row {row}")]
    NonFinite { field: &'static str, row: usize },
    #[error("rows of individual {id} are not contiguous")]
    RowsNotGrouped { id: i64 },
    #[error("unsorted times for individual {id}")]
    UnsortedTimes { id: i64 },
    #[error("time {time} of individual {id} outside [0, 1]")]
    TimeOutOfRange { id: i64, time: f64 },
    #[error("shared covariate {column} varies within individual {id}")]
    SharedCovariateNotConstant { id: i64, column: String },
    #[error("individual mismatch: {id} has longitudinal rows but no survival record")]
    MissingSurvivalRecord { id: i64 },
    #[error("individual mismatch: survival record {id} has no longitudinal rows")]
    UnknownIndividual { id: i64 },
    #[error("duplicate survival record for individual {id}")]
    DuplicateSurvivalRecord { id: i64 },
    #[error("event time {event_time} of individual {id} precedes last observation {last_time}")]
    EventBeforeLastObservation {
        id: i64,
        event_time: f64,
        last_time: f64,
    },
}

/// Every violation found while validating a dataset pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} data violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "; {v}")?;
        }
        Ok(())
    }
}

impl core::error::Error for ValidationError {}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("dimension mismatch in {what}: expected {expected}, found {found}")]
pub struct DimensionError {
    pub what: &'static str,
    pub expected: usize,
    pub found: usize,
}

/// A validated longitudinal/survival pair with dense individual indexing.
#[derive(Clone, Debug, PartialEq)]
pub struct JointData {
    long: LongitudinalDataset,
    surv: SurvivalDataset,
    row_individual: Vec<usize>,
    starts: Vec<usize>,
    x_ls_individual: Covariates,
}

impl JointData {
    pub fn longitudinal(&self) -> &LongitudinalDataset {
        &self.long
    }

    /// Survival records ordered by dense individual index.
    pub fn survival(&self) -> &SurvivalDataset {
        &self.surv
    }

    /// Number of individuals `n`.
    pub fn n_individuals(&self) -> usize {
        self.starts.len() - 1
    }

    /// Total number of longitudinal rows `N`.
    pub fn n_observations(&self) -> usize {
        self.long.time.len()
    }

    pub fn p_l(&self) -> usize {
        self.long.x_l.n_cols()
    }

    pub fn p_s(&self) -> usize {
        self.surv.x_s.n_cols()
    }

    pub fn p_ls(&self) -> usize {
        self.long.x_ls.n_cols()
    }

    /// Dense individual index of each longitudinal row.
    pub fn row_individual(&self) -> &[usize] {
        &self.row_individual
    }

    /// Row range of individual `i`.
    pub fn rows_of(&self, i: usize) -> Range<usize> {
        self.starts[i]..self.starts[i + 1]
    }

    pub fn groups(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.starts.windows(2).map(|w| w[0]..w[1])
    }

    /// External identifier of individual `i`.
    pub fn external_id(&self, i: usize) -> i64 {
        self.surv.ids[i]
    }

    /// Shared covariates with one row per individual.
    pub fn x_ls_individual(&self) -> &Covariates {
        &self.x_ls_individual
    }

    /// Data restricted to the given individuals (dense indices), in that order.
    pub fn subset(&self, individuals: &[usize]) -> JointData {
        let rows: Vec<usize> = individuals.iter().flat_map(|&i| self.rows_of(i)).collect();
        let long = LongitudinalDataset {
            ids: rows.iter().map(|&r| self.long.ids[r]).collect(),
            time: rows.iter().map(|&r| self.long.time[r]).collect(),
            outcome: rows.iter().map(|&r| self.long.outcome[r]).collect(),
            x_l: self.long.x_l.select_rows(&rows),
            x_ls: self.long.x_ls.select_rows(&rows),
        };
        let surv = SurvivalDataset {
            ids: individuals.iter().map(|&i| self.surv.ids[i]).collect(),
            time: individuals.iter().map(|&i| self.surv.time[i]).collect(),
            event: individuals.iter().map(|&i| self.surv.event[i]).collect(),
            x_s: self.surv.x_s.select_rows(individuals),
        };
        assemble(long, surv)
    }
}

/// Checks every invariant of the dataset pair and returns the validated data,
/// or all violations found.
pub fn validate(
    long: LongitudinalDataset,
    surv: SurvivalDataset,
) -> Result<JointData, ValidationError> {
    let mut violations = Vec::new();
    let n_rows = long.ids.len();
    let n_surv = surv.ids.len();

    let mut check_len = |field, expected: usize, found: usize| {
        if expected != found {
            violations.push(Violation::LengthMismatch {
                field,
                expected,
                found,
            });
        }
    };
    check_len("longitudinal time", n_rows, long.time.len());
    check_len("longitudinal outcome", n_rows, long.outcome.len());
    check_len("longitudinal covariates", n_rows, long.x_l.n_rows());
    check_len("shared covariates", n_rows, long.x_ls.n_rows());
    check_len("survival time", n_surv, surv.time.len());
    check_len("survival status", n_surv, surv.event.len());
    check_len("survival covariates", n_surv, surv.x_s.n_rows());
    if !violations.is_empty() {
        return Err(ValidationError { violations });
    }
    if n_rows == 0 {
        return Err(ValidationError {
            violations: vec![Violation::Empty],
        });
    }

    let mut non_finite = |field, values: &[f64]| {
        for (row, v) in values.iter().enumerate() {
            if !v.is_finite() {
                violations.push(Violation::NonFinite { field, row });
            }
        }
    };
    non_finite("longitudinal time", &long.time);
    non_finite("longitudinal outcome", &long.outcome);
    for c in long.x_l.columns() {
        non_finite("longitudinal covariates", c);
    }
    for c in long.x_ls.columns() {
        non_finite("shared covariates", c);
    }
    non_finite("survival time", &surv.time);
    for c in surv.x_s.columns() {
        non_finite("survival covariates", c);
    }

    // Group contiguity, ordering and range.
    let mut first_row: BTreeMap<i64, usize> = BTreeMap::new();
    let mut last_time: BTreeMap<i64, f64> = BTreeMap::new();
    let mut start = 0;
    while start < n_rows {
        let id = long.ids[start];
        let mut end = start + 1;
        while end < n_rows && long.ids[end] == id {
            end += 1;
        }
        if first_row.insert(id, start).is_some() {
            violations.push(Violation::RowsNotGrouped { id });
        }
        let times = &long.time[start..end];
        if times.windows(2).any(|w| w[1] < w[0]) {
            violations.push(Violation::UnsortedTimes { id });
        }
        for &t in times {
            if !(0.0..=1.0).contains(&t) {
                violations.push(Violation::TimeOutOfRange { id, time: t });
            }
        }
        for (k, column) in long.x_ls.columns().enumerate() {
            let v = column[start];
            if column[start..end].iter().any(|&x| x != v) {
                violations.push(Violation::SharedCovariateNotConstant {
                    id,
                    column: long.x_ls.names()[k].clone(),
                });
            }
        }
        let lt = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        last_time.insert(id, lt);
        start = end;
    }

    let mut seen: BTreeMap<i64, usize> = BTreeMap::new();
    for (row, &id) in surv.ids.iter().enumerate() {
        if seen.insert(id, row).is_some() {
            violations.push(Violation::DuplicateSurvivalRecord { id });
            continue;
        }
        match last_time.get(&id) {
            None => violations.push(Violation::UnknownIndividual { id }),
            Some(&lt) => {
                let t = surv.time[row];
                if t < lt || t < 0.0 {
                    violations.push(Violation::EventBeforeLastObservation {
                        id,
                        event_time: t,
                        last_time: lt,
                    });
                }
            }
        }
    }
    for &id in first_row.keys() {
        if !seen.contains_key(&id) {
            violations.push(Violation::MissingSurvivalRecord { id });
        }
    }

    if !violations.is_empty() {
        return Err(ValidationError { violations });
    }

    // Reorder survival rows to the order of first appearance.
    let mut order: Vec<(usize, i64)> = first_row.iter().map(|(&id, &r)| (r, id)).collect();
    order.sort_unstable();
    let surv_rows: Vec<usize> = order.iter().map(|(_, id)| seen[id]).collect();
    let surv = SurvivalDataset {
        ids: surv_rows.iter().map(|&r| surv.ids[r]).collect(),
        time: surv_rows.iter().map(|&r| surv.time[r]).collect(),
        event: surv_rows.iter().map(|&r| surv.event[r]).collect(),
        x_s: surv.x_s.select_rows(&surv_rows),
    };
    Ok(assemble(long, surv))
}

/// Builds indexing for data already known to be valid and ordered.
fn assemble(long: LongitudinalDataset, surv: SurvivalDataset) -> JointData {
    let n_rows = long.ids.len();
    let mut starts = Vec::with_capacity(surv.ids.len() + 1);
    let mut row_individual = Vec::with_capacity(n_rows);
    for row in 0..n_rows {
        if row == 0 || long.ids[row] != long.ids[row - 1] {
            starts.push(row);
        }
        row_individual.push(starts.len() - 1);
    }
    starts.push(n_rows);
    let first_rows: Vec<usize> = starts[..starts.len() - 1].to_vec();
    let x_ls_individual = long.x_ls.select_rows(&first_rows);
    JointData {
        long,
        surv,
        row_individual,
        starts,
        x_ls_individual,
    }
}

/// All model coefficients, random effects and nuisance parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterState {
    pub beta0: f64,
    pub beta_l: Vec<f64>,
    pub beta_s: Vec<f64>,
    pub beta_ls: Vec<f64>,
    /// Constant of the shared predictor. It collects the centering offsets of
    /// shared updates, so the longitudinal intercept stays frozen once its
    /// step stops. Only `beta0 + beta_ls0` and `lambda0·exp(alpha·beta_ls0)`
    /// are identified; see [`ParameterState::canonical`].
    pub beta_ls0: f64,
    pub beta_t: f64,
    /// Random intercepts, one per individual.
    pub gamma0: Vec<f64>,
    /// Random slopes, one per individual.
    pub gamma1: Vec<f64>,
    pub alpha: f64,
    pub lambda0: f64,
    pub sigma2: f64,
}

impl ParameterState {
    /// All coefficients zero, unit nuisance parameters.
    pub fn zeros(p_l: usize, p_s: usize, p_ls: usize, n: usize) -> Self {
        Self {
            beta0: 0.0,
            beta_l: vec![0.0; p_l],
            beta_s: vec![0.0; p_s],
            beta_ls: vec![0.0; p_ls],
            beta_ls0: 0.0,
            beta_t: 0.0,
            gamma0: vec![0.0; n],
            gamma1: vec![0.0; n],
            alpha: 0.0,
            lambda0: 1.0,
            sigma2: 1.0,
        }
    }

    /// Zero state sized for `data`.
    pub fn zeros_for(data: &JointData) -> Self {
        Self::zeros(data.p_l(), data.p_s(), data.p_ls(), data.n_individuals())
    }

    pub fn check_dims(&self, data: &JointData) -> Result<(), DimensionError> {
        let checks = [
            ("beta_l", data.p_l(), self.beta_l.len()),
            ("beta_s", data.p_s(), self.beta_s.len()),
            ("beta_ls", data.p_ls(), self.beta_ls.len()),
            ("gamma0", data.n_individuals(), self.gamma0.len()),
            ("gamma1", data.n_individuals(), self.gamma1.len()),
        ];
        for (what, expected, found) in checks {
            if expected != found {
                return Err(DimensionError {
                    what,
                    expected,
                    found,
                });
            }
        }
        Ok(())
    }

    /// Equivalent state with the shared constant folded into `beta0` and
    /// `lambda0`; the likelihood is unchanged.
    pub fn canonical(&self) -> Self {
        let c = self.beta_ls0;
        Self {
            beta0: self.beta0 + c,
            beta_ls0: 0.0,
            lambda0: self.lambda0 * libm::exp(self.alpha * c),
            ..self.clone()
        }
    }

    /// The same fixed effects and nuisance parameters with random effects
    /// reset to zero for `n` individuals.
    pub fn population_level(&self, n: usize) -> Self {
        Self {
            gamma0: vec![0.0; n],
            gamma1: vec![0.0; n],
            ..self.clone()
        }
    }
}

/// Linear predictors evaluated on a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictorValues {
    /// η_l per observation.
    pub eta_l: Vec<f64>,
    /// η_s per individual.
    pub eta_s: Vec<f64>,
    /// η_ls at each observation time.
    pub eta_ls_obs: Vec<f64>,
    /// Time-constant part β_ls0 + γ0_i + β_lsᵀx_ls,i per individual.
    pub eta_ls_minus_t: Vec<f64>,
    /// β_t + γ1_i per individual.
    pub slope: Vec<f64>,
}

impl PredictorValues {
    /// Shared predictor of individual `i` at time `t`.
    pub fn eta_ls_at(&self, i: usize, t: f64) -> f64 {
        self.eta_ls_minus_t[i] + self.slope[i] * t
    }
}

pub fn compute_predictors(
    state: &ParameterState,
    data: &JointData,
) -> Result<PredictorValues, DimensionError> {
    state.check_dims(data)?;
    let long = data.longitudinal();
    let eta_l = long.x_l.linear_combination(&state.beta_l, state.beta0);
    let eta_s = data.survival().x_s.linear_combination(&state.beta_s, 0.0);
    let mut eta_ls_minus_t = data
        .x_ls_individual()
        .linear_combination(&state.beta_ls, state.beta_ls0);
    for (e, g) in eta_ls_minus_t.iter_mut().zip(&state.gamma0) {
        *e += g;
    }
    let slope: Vec<f64> = state.gamma1.iter().map(|g| state.beta_t + g).collect();
    let eta_ls_obs = data
        .row_individual()
        .iter()
        .zip(&long.time)
        .map(|(&i, &t)| eta_ls_minus_t[i] + slope[i] * t)
        .collect();
    Ok(PredictorValues {
        eta_l,
        eta_s,
        eta_ls_obs,
        eta_ls_minus_t,
        slope,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use alloc::string::ToString;

    /// Builds a small valid dataset: `times[i]` are individual i's observation
    /// times, outcome = row index, one l and one ls covariate.
    pub(crate) fn toy(times: &[&[f64]], event_times: &[f64], events: &[bool]) -> JointData {
        let mut ids = Vec::new();
        let mut time = Vec::new();
        let mut xl = Vec::new();
        let mut xls = Vec::new();
        for (i, ts) in times.iter().enumerate() {
            for (j, &t) in ts.iter().enumerate() {
                ids.push(i as i64 + 1);
                time.push(t);
                xl.push(0.1 * (j as f64 + 1.0) + 0.05 * i as f64);
                xls.push(0.3 + 0.2 * i as f64);
            }
        }
        let n_rows = ids.len();
        let long = LongitudinalDataset {
            ids,
            time,
            outcome: (0..n_rows).map(|r| r as f64 * 0.5).collect(),
            x_l: Covariates::from_columns(n_rows, vec!["l_1".to_string()], vec![xl]).unwrap(),
            x_ls: Covariates::from_columns(n_rows, vec!["ls_1".to_string()], vec![xls]).unwrap(),
        };
        let n = times.len();
        let surv = SurvivalDataset {
            ids: (1..=n as i64).collect(),
            time: event_times.to_vec(),
            event: events.to_vec(),
            x_s: Covariates::from_columns(
                n,
                vec!["s_1".to_string()],
                vec![(0..n).map(|i| i as f64 * 0.25).collect()],
            )
            .unwrap(),
        };
        validate(long, surv).unwrap()
    }

    fn raw(times: Vec<f64>, ids: Vec<i64>, surv_ids: Vec<i64>, t: Vec<f64>) -> (LongitudinalDataset, SurvivalDataset) {
        let n_rows = times.len();
        let n = surv_ids.len();
        (
            LongitudinalDataset {
                ids,
                time: times,
                outcome: vec![1.0; n_rows],
                x_l: Covariates::empty(n_rows),
                x_ls: Covariates::empty(n_rows),
            },
            SurvivalDataset {
                ids: surv_ids,
                event: vec![true; n],
                time: t,
                x_s: Covariates::empty(n),
            },
        )
    }

    #[test]
    fn minimal_pair_is_valid() {
        let (l, s) = raw(vec![0.0, 0.5], vec![7, 7], vec![7], vec![0.5]);
        let data = validate(l, s).unwrap();
        assert_eq!(data.n_individuals(), 1);
        assert_eq!(data.n_observations(), 2);
        assert_eq!(data.external_id(0), 7);
    }

    #[test]
    fn unsorted_times_rejected() {
        let (l, s) = raw(vec![0.5, 0.2], vec![1, 1], vec![1], vec![0.6]);
        let err = validate(l, s).unwrap_err();
        assert!(err.violations.contains(&Violation::UnsortedTimes { id: 1 }));
        assert!(err.to_string().contains("unsorted times"));
    }

    #[test]
    fn unknown_survival_individual_rejected() {
        let (l, s) = raw(vec![0.0], vec![1], vec![1, 2], vec![0.5, 0.5]);
        let err = validate(l, s).unwrap_err();
        assert_eq!(err.violations, vec![Violation::UnknownIndividual { id: 2 }]);
        assert!(err.to_string().contains("individual mismatch"));
    }

    #[test]
    fn reports_every_violation() {
        let (mut l, s) = raw(vec![0.5, 0.2, 1.5], vec![1, 1, 3], vec![1, 2], vec![0.1, 0.5]);
        l.outcome[0] = f64::NAN;
        let err = validate(l, s).unwrap_err();
        let v = &err.violations;
        assert!(v.contains(&Violation::NonFinite { field: "longitudinal outcome", row: 0 }));
        assert!(v.contains(&Violation::UnsortedTimes { id: 1 }));
        assert!(v.contains(&Violation::TimeOutOfRange { id: 3, time: 1.5 }));
        assert!(v.contains(&Violation::UnknownIndividual { id: 2 }));
        assert!(v.contains(&Violation::MissingSurvivalRecord { id: 3 }));
        assert!(v.iter().any(|x| matches!(x, Violation::EventBeforeLastObservation { id: 1, .. })));
    }

    #[test]
    fn interleaved_rows_rejected() {
        let (l, s) = raw(vec![0.0, 0.0, 0.5], vec![1, 2, 1], vec![1, 2], vec![1.0, 1.0]);
        let err = validate(l, s).unwrap_err();
        assert!(err.violations.contains(&Violation::RowsNotGrouped { id: 1 }));
    }

    #[test]
    fn shared_covariate_must_be_constant() {
        let (mut l, s) = raw(vec![0.0, 0.5], vec![1, 1], vec![1], vec![1.0]);
        l.x_ls = Covariates::from_columns(2, vec!["ls_a".to_string()], vec![vec![1.0, 2.0]]).unwrap();
        let err = validate(l, s).unwrap_err();
        assert!(matches!(err.violations[0], Violation::SharedCovariateNotConstant { id: 1, .. }));
    }

    #[test]
    fn survival_rows_follow_longitudinal_order() {
        let (l, s) = raw(vec![0.0, 0.0, 0.3], vec![5, 2, 2], vec![2, 5], vec![0.5, 0.9]);
        let data = validate(l, s).unwrap();
        assert_eq!(data.survival().ids, vec![5, 2]);
        assert_eq!(data.survival().time, vec![0.9, 0.5]);
        assert_eq!(data.rows_of(1), 1..3);
        assert_eq!(data.row_individual(), &[0, 1, 1]);
    }

    #[test]
    fn zero_state_gives_zero_predictors() {
        let data = toy(&[&[0.0, 0.4], &[0.0, 0.2, 0.7]], &[0.5, 0.8], &[true, false]);
        let p = compute_predictors(&ParameterState::zeros_for(&data), &data).unwrap();
        for v in [&p.eta_l, &p.eta_s, &p.eta_ls_obs, &p.eta_ls_minus_t, &p.slope] {
            assert!(v.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn intercept_only_state() {
        let data = toy(&[&[0.0, 0.4], &[0.0, 0.2, 0.7]], &[0.5, 0.8], &[true, false]);
        let mut s = ParameterState::zeros_for(&data);
        s.beta0 = 2.0;
        let p = compute_predictors(&s, &data).unwrap();
        assert!(p.eta_l.iter().all(|&x| x == 2.0));
    }

    #[test]
    fn shared_predictor_by_hand() {
        let (l, s) = raw(vec![0.0, 0.5], vec![1, 1], vec![1], vec![0.5]);
        let data = validate(l, s).unwrap();
        let mut st = ParameterState::zeros_for(&data);
        st.gamma0[0] = 1.0;
        st.beta_t = 2.0;
        let p = compute_predictors(&st, &data).unwrap();
        assert_eq!(p.eta_ls_obs[1], 2.0);
    }

    #[test]
    fn dimension_mismatch_detected() {
        let data = toy(&[&[0.0, 0.4]], &[0.5], &[true]);
        let s = ParameterState::zeros(2, 1, 1, 1);
        assert!(compute_predictors(&s, &data).is_err());
    }

    #[test]
    fn subset_keeps_requested_order() {
        let data = toy(&[&[0.0, 0.4], &[0.0], &[0.0, 0.1, 0.2]], &[0.5, 0.8, 0.3], &[true, false, true]);
        let sub = data.subset(&[2, 0]);
        assert_eq!(sub.survival().ids, vec![3, 1]);
        assert_eq!(sub.n_observations(), 5);
        assert_eq!(sub.rows_of(1), 3..5);
        assert_eq!(sub.x_ls_individual().column(0), &[0.7, 0.3]);
    }
}
