//! Parallel ensemble generation.
//!
//! Trajectory i always comes from child stream i, and rayon's indexed
//! collect keeps results in index order, so the output does not depend on
//! the thread count.

use fbmre_core::simulate::{simulate_indexed, CholeskySampler, ConditionalSampler, CHOLESKY_MAX_N};
use fbmre_core::{Ensemble, Error, ProcessKind, ProcessSpec, Result, TimeGrid, Trajectory};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circulant::CirculantSampler;

/// Path generator selection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dense Cholesky up to its cap, circulant embedding beyond it (FBM only).
    #[default]
    Auto,
    Cholesky,
    Circulant,
}

/// A sampler chosen at run time.
pub enum Sampler {
    Cholesky(CholeskySampler),
    Circulant(CirculantSampler),
}

impl Sampler {
    pub fn new(spec: &ProcessSpec, grid: TimeGrid, method: Method) -> Result<Self> {
        let circulant = match method {
            Method::Cholesky => false,
            Method::Circulant => true,
            Method::Auto => spec.kind == ProcessKind::Fbm && grid.n > CHOLESKY_MAX_N,
        };
        Ok(if circulant {
            Self::Circulant(CirculantSampler::new(spec, grid)?)
        } else {
            Self::Cholesky(CholeskySampler::new(spec, grid)?)
        })
    }

    fn as_dyn(&self) -> &(dyn ConditionalSampler + Sync) {
        match self {
            Self::Cholesky(s) => s,
            Self::Circulant(s) => s,
        }
    }
}

/// Applies `reduce` to every trajectory without keeping the paths, in
/// trajectory order.
pub fn map_paths<T, F>(
    spec: &ProcessSpec,
    grid: TimeGrid,
    count: usize,
    master_seed: u64,
    sampler: &Sampler,
    reduce: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Trajectory) -> Result<T> + Sync,
{
    let s = sampler.as_dyn();
    (0..count as u64)
        .into_par_iter()
        .map(|i| reduce(&simulate_indexed(spec, grid, s, master_seed, i)?))
        .collect()
}

/// Parallel counterpart of `simulate_ensemble_with`; the result is identical.
pub fn par_ensemble(
    spec: &ProcessSpec,
    grid: TimeGrid,
    count: usize,
    master_seed: u64,
    sampler: &Sampler,
) -> Result<Ensemble> {
    if count == 0 {
        return Err(Error::EnsembleTooSmall { have: 0, need: 1 });
    }
    let trajectories = map_paths(spec, grid, count, master_seed, sampler, |t| Ok(t.clone()))?;
    Ok(Ensemble {
        spec: spec.clone(),
        grid,
        trajectories,
        master_seed,
    })
}
