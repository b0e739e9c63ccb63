//! Exact-in-law sampling on uniform grids.
//!
//! A path is drawn in two stages: first h from the Hurst law, then a centred
//! Gaussian vector whose covariance is the fixed-h FBM or RL FBM covariance
//! at the grid points. Conditional on h an FBMRE path is just FBM, so the
//! normalising constant of the moving-average representation never enters.
//!
//! Trajectory `i` of an ensemble uses its own ChaCha8 stream `i` under the
//! master seed, so ensembles can be generated in any order or in parallel
//! and still come out bit-identical.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::analytic::{fbm_cov, rlfbm_cov, ProcessKind};
use crate::error::{Error, Result};
use crate::hurst::HurstModel;
use crate::randomized::ProcessSpec;

/// Largest grid the dense Cholesky sampler accepts.
pub const CHOLESKY_MAX_N: usize = 8192;

/// Diagonal jitter tried in turn, as multiples of the largest variance.
pub const JITTER_LEVELS: [f64; 3] = [0.0, 1e-12, 1e-10];

/// Points t_i = i·dt for i = 0..=n.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeGrid {
    pub n: usize,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(n: usize, dt: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("n must be at least 1"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidGrid("dt must be finite and positive"));
        }
        Ok(Self { n, dt })
    }

    #[inline]
    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    /// T = n·dt.
    pub fn horizon(&self) -> f64 {
        self.t(self.n)
    }
}

/// One sampled path with the exponent it was drawn with.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    /// n + 1 values; `values[0] == 0`.
    pub values: Vec<f64>,
    pub h_draw: f64,
    pub stream_id: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub spec: ProcessSpec,
    pub grid: TimeGrid,
    pub trajectories: Vec<Trajectory>,
    pub master_seed: u64,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }
}

/// Child stream `i` of `master_seed`.
pub fn child_rng(master_seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(i);
    rng
}

/// Covariance of the fixed-h process between grid times s and t.
pub fn grid_cov(kind: ProcessKind, h: f64, s: f64, t: f64) -> f64 {
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    match kind {
        ProcessKind::Fbm => fbm_cov(h, lo, hi - lo),
        ProcessKind::RlFbm => rlfbm_cov(h, lo, hi - lo),
    }
}

/// Lower Cholesky factor in packed row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>,
    jitter: f64,
}

#[inline]
fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

impl CholeskyFactor {
    /// Factors the n×n matrix with entries `entry(i, j)` (j ≤ i), retrying
    /// with each of [`JITTER_LEVELS`] on a non-positive pivot.
    pub fn new<F: FnMut(usize, usize) -> f64>(n: usize, mut entry: F) -> Result<Self> {
        let mut a = vec![0.0; row_start(n)];
        for i in 0..n {
            for j in 0..=i {
                a[row_start(i) + j] = entry(i, j);
            }
        }
        let max_diag = (0..n).map(|i| a[row_start(i) + i]).fold(0.0, f64::max);
        let mut last_pivot = 0;
        for level in JITTER_LEVELS {
            let jitter = level * max_diag;
            match Self::factor(n, &a, jitter) {
                Ok(l) => return Ok(Self { n, l, jitter }),
                Err(p) => last_pivot = p,
            }
        }
        Err(Error::NotPositiveDefinite { pivot: last_pivot })
    }

    fn factor(n: usize, a: &[f64], jitter: f64) -> core::result::Result<Vec<f64>, usize> {
        let mut l = vec![0.0; a.len()];
        for i in 0..n {
            let ri = row_start(i);
            for j in 0..=i {
                let rj = row_start(j);
                let dot: f64 = l[ri..ri + j].iter().zip(&l[rj..rj + j]).map(|(x, y)| x * y).sum();
                let v = a[ri + j] - dot;
                if i == j {
                    let d = v + jitter;
                    if !(d > 0.0) {
                        return Err(i);
                    }
                    l[ri + i] = libm::sqrt(d);
                } else {
                    l[ri + j] = v / l[rj + j];
                }
            }
        }
        Ok(l)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Diagonal jitter that was needed (0 for a clean factorisation).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// out = L·z.
    pub fn mul(&self, z: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let r = row_start(i);
            *o = self.l[r..=r + i].iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }
}

/// Factor of the covariance of the nonzero grid points t_1..t_n.
pub fn covariance_factor(kind: ProcessKind, h: f64, grid: &TimeGrid) -> Result<CholeskyFactor> {
    if grid.n > CHOLESKY_MAX_N {
        return Err(Error::OutOfRange {
            what: "Cholesky grid size",
            index: grid.n,
            limit: CHOLESKY_MAX_N,
        });
    }
    CholeskyFactor::new(grid.n, |i, j| grid_cov(kind, h, grid.t(j + 1), grid.t(i + 1)))
}

/// Draws a path conditional on the exponent.
pub trait ConditionalSampler {
    /// Writes n + 1 values, starting with 0, into `out`.
    fn fill(&self, h: f64, rng: &mut dyn RngCore, out: &mut [f64]) -> Result<()>;
}

/// Dense Cholesky sampler for either process. Factors for the atoms of an
/// atomic law are computed once; a tabulated law factors per draw.
#[derive(Debug, Clone)]
pub struct CholeskySampler {
    kind: ProcessKind,
    grid: TimeGrid,
    cached: Vec<(f64, CholeskyFactor)>,
}

impl CholeskySampler {
    pub fn new(spec: &ProcessSpec, grid: TimeGrid) -> Result<Self> {
        let mut cached = Vec::new();
        if let Some(atoms) = spec.hurst.atoms() {
            for h in atoms {
                cached.push((h, covariance_factor(spec.kind, h, &grid)?));
            }
        }
        Ok(Self {
            kind: spec.kind,
            grid,
            cached,
        })
    }
}

impl ConditionalSampler for CholeskySampler {
    fn fill(&self, h: f64, rng: &mut dyn RngCore, out: &mut [f64]) -> Result<()> {
        let n = self.grid.n;
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        out[0] = 0.0;
        match self.cached.iter().find(|(a, _)| *a == h) {
            Some((_, f)) => f.mul(&z, &mut out[1..=n]),
            None => covariance_factor(self.kind, h, &self.grid)?.mul(&z, &mut out[1..=n]),
        }
        Ok(())
    }
}

/// Draws 𝓗 and then a path from `rng`.
pub fn sample_with<S: ConditionalSampler + ?Sized>(
    hurst: &HurstModel,
    grid: TimeGrid,
    sampler: &S,
    rng: &mut ChaCha8Rng,
    stream_id: u64,
) -> Result<Trajectory> {
    let h = hurst.sample_h(rng);
    let mut values = vec![0.0; grid.n + 1];
    sampler.fill(h, rng, &mut values)?;
    Ok(Trajectory {
        grid,
        values,
        h_draw: h,
        stream_id,
    })
}

/// One trajectory from a caller-supplied stream.
pub fn simulate_path(spec: &ProcessSpec, grid: TimeGrid, rng: &mut ChaCha8Rng) -> Result<Trajectory> {
    let sampler = CholeskySampler::new(spec, grid)?;
    sample_with(&spec.hurst, grid, &sampler, rng, 0)
}

/// Trajectory `i` of the ensemble with `master_seed`.
pub fn simulate_indexed<S: ConditionalSampler + ?Sized>(
    spec: &ProcessSpec,
    grid: TimeGrid,
    sampler: &S,
    master_seed: u64,
    i: u64,
) -> Result<Trajectory> {
    let mut rng = child_rng(master_seed, i);
    sample_with(&spec.hurst, grid, sampler, &mut rng, i)
}

/// `count` independent trajectories, trajectory i on child stream i.
pub fn simulate_ensemble(
    spec: &ProcessSpec,
    grid: TimeGrid,
    count: usize,
    master_seed: u64,
) -> Result<Ensemble> {
    let sampler = CholeskySampler::new(spec, grid)?;
    simulate_ensemble_with(spec, grid, count, master_seed, &sampler)
}

pub fn simulate_ensemble_with<S: ConditionalSampler + ?Sized>(
    spec: &ProcessSpec,
    grid: TimeGrid,
    count: usize,
    master_seed: u64,
    sampler: &S,
) -> Result<Ensemble> {
    if count == 0 {
        return Err(Error::EnsembleTooSmall { have: 0, need: 1 });
    }
    let trajectories = (0..count as u64)
        .map(|i| simulate_indexed(spec, grid, sampler, master_seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble {
        spec: spec.clone(),
        grid,
        trajectories,
        master_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(kind: ProcessKind, h: f64) -> ProcessSpec {
        ProcessSpec::new(kind, HurstModel::deterministic(h).unwrap())
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0, 1.0).is_err());
        assert!(TimeGrid::new(4, 0.0).is_err());
        assert!(TimeGrid::new(4, f64::NAN).is_err());
        let g = TimeGrid::new(10, 0.1).unwrap();
        assert_eq!(g.t(3), 3.0 * 0.1);
        assert_eq!(g.horizon(), 10.0 * 0.1);
    }

    #[test]
    fn cholesky_reproduces_matrix() {
        let g = TimeGrid::new(12, 0.5).unwrap();
        let f = covariance_factor(ProcessKind::RlFbm, 0.3, &g).unwrap();
        assert_eq!(f.jitter(), 0.0);
        for i in 0..12 {
            for j in 0..=i {
                let (ri, rj) = (row_start(i), row_start(j));
                let llt: f64 = (0..=j).map(|k| f.l[ri + k] * f.l[rj + k]).sum();
                let want = grid_cov(ProcessKind::RlFbm, 0.3, g.t(j + 1), g.t(i + 1));
                assert!((llt - want).abs() < 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn indefinite_matrix_is_reported() {
        // a correlation above one cannot come from a covariance
        let r = CholeskyFactor::new(2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert_eq!(r, Err(Error::NotPositiveDefinite { pivot: 1 }));
    }

    #[test]
    fn cap_is_enforced() {
        let g = TimeGrid::new(CHOLESKY_MAX_N + 1, 1.0).unwrap();
        assert!(matches!(
            covariance_factor(ProcessKind::Fbm, 0.5, &g),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn paths_start_at_origin() {
        let g = TimeGrid::new(64, 0.1).unwrap();
        let mut rng = child_rng(3, 0);
        for kind in [ProcessKind::Fbm, ProcessKind::RlFbm] {
            let p = simulate_path(&det(kind, 0.25), g, &mut rng).unwrap();
            assert_eq!(p.values.len(), 65);
            assert_eq!(p.values[0], 0.0);
            assert_eq!(p.h_draw, 0.25);
        }
    }

    #[test]
    fn ensemble_matches_single_path_and_repeats() {
        let spec = ProcessSpec::new(ProcessKind::RlFbm, HurstModel::two_point(0.25, 0.75, 0.5).unwrap());
        let g = TimeGrid::new(32, 0.1).unwrap();
        let one = simulate_ensemble(&spec, g, 1, 99).unwrap();
        let mut rng = child_rng(99, 0);
        let p = simulate_path(&spec, g, &mut rng).unwrap();
        assert_eq!(one.trajectories[0].values, p.values);
        let a = simulate_ensemble(&spec, g, 5, 7).unwrap();
        let b = simulate_ensemble(&spec, g, 5, 7).unwrap();
        assert_eq!(a, b);
        let ids: Vec<u64> = a.trajectories.iter().map(|t| t.stream_id).collect();
        assert_eq!(ids, [0, 1, 2, 3, 4]);
        assert!(simulate_ensemble(&spec, g, 0, 7).is_err());
    }

    #[test]
    fn brownian_single_step_variance() {
        let spec = det(ProcessKind::Fbm, 0.5);
        let g = TimeGrid::new(1, 1.0).unwrap();
        let ens = simulate_ensemble(&spec, g, 100_000, 11).unwrap();
        let var = ens.trajectories.iter().map(|t| t.values[1] * t.values[1]).sum::<f64>() / 1e5;
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn tabulated_law_factors_per_draw() {
        let tab = HurstModel::tabulated(&[(0.3, 0.0), (0.5, 5.0), (0.7, 0.0)]).unwrap();
        let spec = ProcessSpec::new(ProcessKind::Fbm, tab);
        let g = TimeGrid::new(16, 0.2).unwrap();
        let ens = simulate_ensemble(&spec, g, 4, 5).unwrap();
        for t in &ens.trajectories {
            assert!(t.h_draw > 0.3 && t.h_draw < 0.7);
            assert!(t.values.iter().all(|v| v.is_finite()));
        }
    }
}
