//! Circulant-embedding (Davies–Harte) sampler for FBM paths.
//!
//! The autocovariance of unit-step fractional Gaussian noise is embedded in
//! a circulant matrix of order 2n, whose eigenvalues are nonnegative for
//! every H in (0, 1). A path costs one complex FFT of length 2n, which makes
//! grids well past the dense Cholesky cap practical.

use std::sync::Arc;

use fbmre_core::simulate::{ConditionalSampler, TimeGrid};
use fbmre_core::{Error, HurstModel, ProcessKind, ProcessSpec, Result};
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Eigenvalues below this multiple of the largest are treated as rounding.
const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

/// Autocovariance of unit-step fractional Gaussian noise at lag k.
pub fn fgn_autocov(h: f64, k: usize) -> f64 {
    let e = 2.0 * h;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

#[derive(Clone)]
struct Embedding {
    h: f64,
    /// sqrt(λ_j / 2n)
    scale: Vec<f64>,
}

/// FBM sampler by circulant embedding. RL FBM increments are not
/// stationary, so only [`ProcessKind::Fbm`] is accepted.
#[derive(Clone)]
pub struct CirculantSampler {
    grid: TimeGrid,
    fft: Arc<dyn Fft<f64>>,
    cached: Vec<Embedding>,
}

impl std::fmt::Debug for CirculantSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantSampler")
            .field("grid", &self.grid)
            .field("atoms", &self.cached.iter().map(|e| e.h).collect::<Vec<_>>())
            .finish()
    }
}

impl CirculantSampler {
    pub fn new(spec: &ProcessSpec, grid: TimeGrid) -> Result<Self> {
        if spec.kind != ProcessKind::Fbm {
            return Err(Error::UnsupportedModel {
                op: "circulant embedding",
                model: "Riemann-Liouville",
            });
        }
        let fft = FftPlanner::new().plan_fft_forward(2 * grid.n);
        let mut s = Self {
            grid,
            fft,
            cached: Vec::new(),
        };
        if let HurstModel::Deterministic(_) | HurstModel::TwoPoint(_) = spec.hurst {
            for h in spec.hurst.atoms().unwrap_or_default() {
                let e = s.embed(h)?;
                s.cached.push(e);
            }
        }
        Ok(s)
    }

    fn embed(&self, h: f64) -> Result<Embedding> {
        let n = self.grid.n;
        let m = 2 * n;
        let mut c: Vec<Complex64> = (0..m)
            .map(|j| {
                let k = if j <= n { j } else { m - j };
                Complex64::new(fgn_autocov(h, k), 0.0)
            })
            .collect();
        self.fft.process(&mut c);
        let top = c.iter().map(|z| z.re).fold(0.0, f64::max);
        let mut scale = Vec::with_capacity(m);
        for (j, z) in c.iter().enumerate() {
            if z.re < -NEGATIVE_EIGEN_TOL * top {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            scale.push((z.re.max(0.0) / m as f64).sqrt());
        }
        Ok(Embedding { h, scale })
    }

    fn draw(&self, emb: &Embedding, rng: &mut dyn RngCore, out: &mut [f64]) {
        let n = self.grid.n;
        let mut buf: Vec<Complex64> = emb
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        let step = self.grid.dt.powf(2.0 * emb.h).sqrt();
        out[0] = 0.0;
        let mut acc = 0.0;
        for i in 0..n {
            acc += buf[i].re * step;
            out[i + 1] = acc;
        }
    }
}

impl ConditionalSampler for CirculantSampler {
    fn fill(&self, h: f64, rng: &mut dyn RngCore, out: &mut [f64]) -> Result<()> {
        match self.cached.iter().find(|e| e.h == h) {
            Some(e) => self.draw(e, rng, out),
            None => {
                let e = self.embed(h)?;
                self.draw(&e, rng, out);
            }
        }
        Ok(())
    }
}
