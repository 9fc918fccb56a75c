//! Grid search spread over a rayon pool. Every (triple, fold) pair is an
//! independent fit; results are gathered in grid order, so the surface is
//! identical to the sequential search for any thread count.

use jointboost_core::tuning::{assemble, evaluate_point, Fold, TuningError};
use jointboost_core::{BoostingConfig, Grid, TuningResult};
use rayon::prelude::*;

/// Pool with `threads` workers; 0 uses rayon's default.
pub fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool starts")
}

/// Parallel equivalent of [`jointboost_core::grid_search`], run on the
/// current rayon pool.
pub fn grid_search(folds: &[Fold], grid: &Grid, base: &BoostingConfig) -> Result<TuningResult, TuningError> {
    if folds.is_empty() {
        return Err(TuningError::EmptyTestSet);
    }
    let triples = grid.triples();
    let k = folds.len();
    let flat: Vec<f64> = (0..triples.len() * k)
        .into_par_iter()
        .map(|job| {
            let fold = job % k;
            evaluate_point(&folds[fold..=fold], triples[job / k], base).map(|r| r[0])
        })
        .collect::<Result<_, _>>()?;
    Ok(assemble(grid, flat.chunks(k).map(<[f64]>::to_vec).collect()))
}
