//! Estimators computed from sampled paths.
//!
//! Ensemble reductions run sequentially in trajectory order so results are
//! reproducible to the bit. Standard errors are the plain sample standard
//! deviation over √N.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::simulate::{Ensemble, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    pub abscissa: f64,
    pub value: f64,
    pub stderr: Option<f64>,
}

/// A named curve with free-form metadata.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StatCurve {
    pub stat_name: String,
    pub params: BTreeMap<String, String>,
    pub points: Vec<CurvePoint>,
}

impl StatCurve {
    pub fn new(stat_name: impl Into<String>) -> Self {
        Self {
            stat_name: stat_name.into(),
            ..Self::default()
        }
    }

    pub fn with_param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    /// Appends a point; abscissas must increase strictly.
    pub fn push(&mut self, point: CurvePoint) -> Result<()> {
        if let Some(last) = self.points.last() {
            if !(point.abscissa > last.abscissa) {
                return Err(Error::NonMonotoneAbscissa {
                    prev: last.abscissa,
                    next: point.abscissa,
                });
            }
        }
        if let Some(se) = point.stderr {
            if !(se >= 0.0) {
                return Err(Error::Degenerate("standard error must be nonnegative"));
            }
        }
        self.points.push(point);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Running mean and variance (Welford). Identical inputs give an exactly
/// zero variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; `None` below two observations.
    pub fn variance(&self) -> Option<f64> {
        (self.n >= 2).then(|| self.m2 / (self.n - 1) as f64)
    }

    pub fn stderr(&self) -> Option<f64> {
        self.variance().map(|v| libm::sqrt(v / self.n as f64))
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

fn require_nonempty(ens: &Ensemble) -> Result<()> {
    if ens.is_empty() {
        return Err(Error::EnsembleTooSmall { have: 0, need: 1 });
    }
    Ok(())
}

fn check_index(what: &'static str, index: usize, limit: usize) -> Result<()> {
    if index > limit {
        return Err(Error::OutOfRange { what, index, limit });
    }
    Ok(())
}

/// δ(k) = Σ_{i=0}^{n−k} (x_{i+k} − x_i)² / (n − k + 1), for 1 ≤ k < n.
pub fn tamsd(traj: &Trajectory, k: usize) -> Result<f64> {
    let n = traj.values.len() - 1;
    if k == 0 || k >= n {
        return Err(Error::OutOfRange {
            what: "TAMSD lag",
            index: k,
            limit: n.saturating_sub(1),
        });
    }
    let x = &traj.values;
    let sum: f64 = (0..=n - k).map(|i| (x[i + k] - x[i]) * (x[i + k] - x[i])).sum();
    Ok(sum / (n - k + 1) as f64)
}

/// Per-trajectory TAMSD at lag k, in ensemble order.
pub fn tamsd_samples(ens: &Ensemble, k: usize) -> Result<Vec<f64>> {
    ens.trajectories.iter().map(|t| tamsd(t, k)).collect()
}

fn point(abscissa: f64, m: &Moments) -> CurvePoint {
    CurvePoint {
        abscissa,
        value: m.mean(),
        stderr: m.stderr(),
    }
}

/// Ensemble mean of δ(k) at each lag, abscissa k·dt.
pub fn mean_tamsd(ens: &Ensemble, lags: &[usize]) -> Result<StatCurve> {
    require_nonempty(ens)?;
    let mut curve = StatCurve::new("mean_tamsd");
    for &k in lags {
        let m: Moments = tamsd_samples(ens, k)?.into_iter().collect();
        curve.push(point(ens.grid.t(k), &m))?;
    }
    Ok(curve)
}

/// Ensemble mean of x_i² at each index, abscissa t_i.
pub fn emsd(ens: &Ensemble, indices: &[usize]) -> Result<StatCurve> {
    require_nonempty(ens)?;
    let mut curve = StatCurve::new("emsd");
    for &i in indices {
        check_index("EMSD index", i, ens.grid.n)?;
        let m: Moments = ens.trajectories.iter().map(|t| t.values[i] * t.values[i]).collect();
        curve.push(point(ens.grid.t(i), &m))?;
    }
    Ok(curve)
}

/// Ensemble mean of (x_{i+k} − x_i)², abscissa t_i.
pub fn inc_sm_hat(ens: &Ensemble, i: usize, k: usize) -> Result<CurvePoint> {
    require_nonempty(ens)?;
    check_index("increment end", i + k, ens.grid.n)?;
    let m: Moments = ens
        .trajectories
        .iter()
        .map(|t| {
            let d = t.values[i + k] - t.values[i];
            d * d
        })
        .collect();
    Ok(point(ens.grid.t(i), &m))
}

/// Raw-product covariance estimate of (x_i, x_j) with its standard error;
/// the paths are centred by construction.
pub fn sample_cov_point(ens: &Ensemble, i: usize, j: usize) -> Result<CurvePoint> {
    if ens.len() < 2 {
        return Err(Error::EnsembleTooSmall {
            have: ens.len(),
            need: 2,
        });
    }
    check_index("covariance index", i.max(j), ens.grid.n)?;
    let m: Moments = ens.trajectories.iter().map(|t| t.values[i] * t.values[j]).collect();
    Ok(point(ens.grid.t(i.min(j)), &m))
}

pub fn sample_cov(ens: &Ensemble, i: usize, j: usize) -> Result<f64> {
    sample_cov_point(ens, i, j).map(|p| p.value)
}

/// EB(k) = mean(δ²)/mean(δ)² − 1 over the per-trajectory TAMSDs.
pub fn eb_parameter(ens: &Ensemble, k: usize) -> Result<f64> {
    if ens.len() < 2 {
        return Err(Error::EnsembleTooSmall {
            have: ens.len(),
            need: 2,
        });
    }
    let d = tamsd_samples(ens, k)?;
    eb_from_samples(&d)
}

/// EB from precomputed TAMSD values, evaluated as the equivalent
/// population variance over the squared mean.
pub fn eb_from_samples(d: &[f64]) -> Result<f64> {
    let m: Moments = d.iter().copied().collect();
    if !(m.mean() != 0.0) {
        return Err(Error::Degenerate("mean TAMSD is zero"));
    }
    Ok(m.m2 / m.n as f64 / (m.mean() * m.mean()))
}

/// Ordinary least-squares line with the usual standard error of the slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Degenerate("linear fit needs at least three paired points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("abscissas are all equal"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - intercept - slope * a;
            r * r
        })
        .sum();
    let slope_se = libm::sqrt(rss / (n - 2.0) / sxx);
    Ok(LinearFit {
        slope,
        intercept,
        slope_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::ProcessKind;
    use crate::hurst::HurstModel;
    use crate::randomized::ProcessSpec;
    use crate::simulate::{simulate_ensemble, TimeGrid};
    use alloc::vec;
    use proptest::prelude::*;

    fn path(values: Vec<f64>, dt: f64) -> Trajectory {
        Trajectory {
            grid: TimeGrid::new(values.len() - 1, dt).unwrap(),
            values,
            h_draw: 0.5,
            stream_id: 0,
        }
    }

    fn ensemble_of(paths: Vec<Trajectory>) -> Ensemble {
        Ensemble {
            spec: ProcessSpec::new(ProcessKind::Fbm, HurstModel::deterministic(0.5).unwrap()),
            grid: paths[0].grid,
            trajectories: paths,
            master_seed: 0,
        }
    }

    #[test]
    fn tamsd_constant_and_linear() {
        assert_eq!(tamsd(&path(vec![3.0; 11], 0.1), 2).unwrap(), 0.0);
        let dt = 0.25;
        let lin = path((0..=16).map(|i| i as f64 * dt).collect(), dt);
        for k in [1, 3, 7] {
            let want = (k as f64 * dt) * (k as f64 * dt);
            assert!((tamsd(&lin, k).unwrap() - want).abs() < 1e-14);
        }
        assert!(tamsd(&lin, 0).is_err());
        assert!(tamsd(&lin, 16).is_err());
    }

    #[test]
    fn identical_paths_have_zero_stderr_and_eb() {
        let p = path((0..=8).map(|i| libm::sin(i as f64) * 0.3).collect(), 0.1);
        let ens = ensemble_of(vec![p.clone(), p.clone(), p]);
        let c = mean_tamsd(&ens, &[1, 2, 5]).unwrap();
        assert!(c.points.iter().all(|pt| pt.stderr == Some(0.0)));
        assert_eq!(eb_parameter(&ens, 2).unwrap(), 0.0);
    }

    #[test]
    fn emsd_and_increment_edges() {
        let spec = ProcessSpec::new(ProcessKind::RlFbm, HurstModel::two_point(0.25, 0.75, 0.5).unwrap());
        let ens = simulate_ensemble(&spec, TimeGrid::new(20, 0.1).unwrap(), 50, 3).unwrap();
        let e = emsd(&ens, &[0, 4, 9]).unwrap();
        assert_eq!(e.points[0].value, 0.0);
        let inc = inc_sm_hat(&ens, 0, 9).unwrap();
        assert_eq!(inc.value, e.points[2].value);
        assert_eq!(sample_cov(&ens, 0, 7).unwrap(), 0.0);
        assert_eq!(sample_cov(&ens, 9, 9).unwrap(), e.points[2].value);
        assert!(inc_sm_hat(&ens, 15, 6).is_err());
        assert!(emsd(&ens, &[4, 4]).is_err());
    }

    #[test]
    fn curve_rejects_bad_points() {
        let mut c = StatCurve::new("x");
        c.push(CurvePoint { abscissa: 1.0, value: 0.0, stderr: None }).unwrap();
        assert!(c.push(CurvePoint { abscissa: 1.0, value: 0.0, stderr: None }).is_err());
        assert!(c.push(CurvePoint { abscissa: 2.0, value: 0.0, stderr: Some(-1.0) }).is_err());
    }

    #[test]
    fn brownian_tamsd_is_unbiased() {
        let spec = ProcessSpec::new(ProcessKind::Fbm, HurstModel::deterministic(0.5).unwrap());
        let ens = simulate_ensemble(&spec, TimeGrid::new(100, 0.1).unwrap(), 2000, 17).unwrap();
        let c = mean_tamsd(&ens, &[10]).unwrap();
        let p = c.points[0];
        assert!((p.value - 1.0).abs() < 3.0 * p.stderr.unwrap(), "{p:?}");
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-14 && (f.intercept + 1.0).abs() < 1e-13);
        assert!(f.slope_se < 1e-13);
    }

    proptest! {
        #[test]
        fn tamsd_shift_invariant(vals in proptest::collection::vec(-10.0f64..10.0, 4..40),
                                 shift in -1e3f64..1e3, k in 1usize..3) {
            let mut v = vals.clone();
            v[0] = 0.0;
            let a = tamsd(&path(v.clone(), 0.1), k).unwrap();
            let shifted: Vec<f64> = v.iter().map(|x| x + shift).collect();
            let b = tamsd(&path(shifted, 0.1), k).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn welford_matches_two_pass(vals in proptest::collection::vec(-1e3f64..1e3, 2..100)) {
            let m: Moments = vals.iter().copied().collect();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            prop_assert!((m.mean() - mean).abs() <= 1e-9 * mean.abs().max(1.0));
            prop_assert!((m.variance().unwrap() - var).abs() <= 1e-9 * var.max(1.0));
        }

        #[test]
        fn eb_nonnegative(vals in proptest::collection::vec(0.01f64..10.0, 2..50)) {
            prop_assert!(eb_from_samples(&vals).unwrap() >= 0.0);
        }
    }
}
