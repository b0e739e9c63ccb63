//! The random Hurst exponent: deterministic, two-point and tabulated laws.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance on the trapezoid integral of a tabulated density.
pub const DENSITY_NORM_TOL: f64 = 1e-9;

/// A Hurst exponent in the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Hurst(f64);

impl Hurst {
    pub const HALF: Hurst = Hurst(0.5);

    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h < 1.0 {
            Ok(Self(h))
        } else {
            Err(Error::InvalidModel(format!("Hurst exponent {h} is not in (0, 1)")))
        }
    }

    #[inline]
    pub const fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Hurst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// p·δ(h − H₁) + (1 − p)·δ(h − H₂) with H₁ < H₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPoint {
    h1: Hurst,
    h2: Hurst,
    p: f64,
}

impl TwoPoint {
    pub fn new(h1: f64, h2: f64, p: f64) -> Result<Self> {
        let (h1, h2) = (Hurst::new(h1)?, Hurst::new(h2)?);
        if h1 >= h2 {
            return Err(Error::InvalidModel(format!(
                "two-point law needs H1 < H2, got {h1} and {h2}"
            )));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidModel(format!("weight p = {p} is not in (0, 1)")));
        }
        Ok(Self { h1, h2, p })
    }

    pub fn h1(&self) -> f64 {
        self.h1.get()
    }

    pub fn h2(&self) -> f64 {
        self.h2.get()
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// A density given at strictly increasing nodes in (0, 1), linear in between
/// and zero outside the outermost nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    h: Vec<f64>,
    density: Vec<f64>,
    // Trapezoid CDF at each node, cdf[0] = 0.
    cdf: Vec<f64>,
}

impl Tabulated {
    pub fn new(nodes: &[(f64, f64)]) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidModel("tabulated density needs at least two nodes".into()));
        }
        for &(h, d) in nodes {
            Hurst::new(h)?;
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::InvalidModel(format!("density {d} at h = {h} is not a finite nonnegative number")));
            }
        }
        for w in nodes.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidModel(format!(
                    "tabulated nodes must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        let h: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let density: Vec<f64> = nodes.iter().map(|n| n.1).collect();
        let mut cdf = Vec::with_capacity(h.len());
        cdf.push(0.0);
        for i in 1..h.len() {
            let area = 0.5 * (density[i] + density[i - 1]) * (h[i] - h[i - 1]);
            cdf.push(cdf[i - 1] + area);
        }
        let total = cdf[cdf.len() - 1];
        if (total - 1.0).abs() > DENSITY_NORM_TOL {
            return Err(Error::InvalidModel(format!(
                "tabulated density integrates to {total}, not 1"
            )));
        }
        Ok(Self { h, density, cdf })
    }

    /// Uniform density on [lo, hi] sampled at `n` equally spaced nodes.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::InvalidModel("uniform table needs n ≥ 2 and lo < hi".into()));
        }
        let d = 1.0 / (hi - lo);
        let step = (hi - lo) / (n - 1) as f64;
        let nodes: Vec<(f64, f64)> = (0..n)
            .map(|i| (if i + 1 == n { hi } else { lo + step * i as f64 }, d))
            .collect();
        Self::new(&nodes)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.h.iter().copied().zip(self.density.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    fn pdf(&self, x: f64) -> f64 {
        let n = self.h.len();
        if x < self.h[0] || x > self.h[n - 1] {
            return 0.0;
        }
        let i = self.h.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (x0, x1) = (self.h[i - 1], self.h[i]);
        let (d0, d1) = (self.density[i - 1], self.density[i]);
        d0 + (d1 - d0) * (x - x0) / (x1 - x0)
    }

    fn trapezoid<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut prev = self.density[0] * f(self.h[0]);
        let mut acc = 0.0;
        for i in 1..self.h.len() {
            let cur = self.density[i] * f(self.h[i]);
            acc += 0.5 * (prev + cur) * (self.h[i] - self.h[i - 1]);
            prev = cur;
        }
        acc
    }

    fn inverse_cdf(&self, u: f64) -> f64 {
        let n = self.h.len();
        let target = u * self.cdf[n - 1];
        let i = self.cdf.partition_point(|&c| c <= target).clamp(1, n - 1);
        let r = target - self.cdf[i - 1];
        let (x0, x1) = (self.h[i - 1], self.h[i]);
        let (d0, d1) = (self.density[i - 1], self.density[i]);
        let slope = (d1 - d0) / (x1 - x0);
        // d0·x + slope·x²/2 = r, written to avoid cancellation
        let disc = (d0 * d0 + 2.0 * slope * r).max(0.0);
        let denom = d0 + libm::sqrt(disc);
        let x = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
        (x0 + x).clamp(x0, x1)
    }
}

/// Law of the random Hurst exponent 𝓗.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "repr::HurstModelRepr", into = "repr::HurstModelRepr")
)]
pub enum HurstModel {
    Deterministic(Hurst),
    TwoPoint(TwoPoint),
    Tabulated(Tabulated),
}

impl HurstModel {
    pub fn deterministic(h: f64) -> Result<Self> {
        Hurst::new(h).map(Self::Deterministic)
    }

    pub fn two_point(h1: f64, h2: f64, p: f64) -> Result<Self> {
        TwoPoint::new(h1, h2, p).map(Self::TwoPoint)
    }

    pub fn tabulated(nodes: &[(f64, f64)]) -> Result<Self> {
        Tabulated::new(nodes).map(Self::Tabulated)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Deterministic(_) => "deterministic",
            Self::TwoPoint(_) => "two-point",
            Self::Tabulated(_) => "tabulated",
        }
    }

    /// E[f(𝓗)]: exact for atoms, trapezoid over the nodes for a table.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        match self {
            Self::Deterministic(h) => f(h.get()),
            Self::TwoPoint(tp) => tp.p * f(tp.h1()) + (1.0 - tp.p) * f(tp.h2()),
            Self::Tabulated(tab) => tab.trapezoid(f),
        }
    }

    /// Fallible variant of [`expect`](Self::expect); the first error wins.
    pub fn try_expect<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut err = None;
        let v = self.expect(|h| match f(h) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    /// Moment generating function M(s) = E[e^{s𝓗}].
    pub fn mgf(&self, s: f64) -> f64 {
        if s == 0.0 {
            // A table integrates to 1 only within DENSITY_NORM_TOL.
            return 1.0;
        }
        self.expect(|h| libm::exp(s * h))
    }

    pub fn mean(&self) -> f64 {
        self.expect(|h| h)
    }

    /// Pointwise density of a tabulated law. Atomic laws have none.
    pub fn pdf_eval(&self, h: f64) -> Result<f64> {
        match self {
            Self::Tabulated(tab) => {
                Hurst::new(h)?;
                Ok(tab.pdf(h))
            }
            other => Err(Error::UnsupportedModel {
                op: "pdf_eval",
                model: other.name(),
            }),
        }
    }

    /// One draw of 𝓗.
    pub fn sample_h<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Deterministic(h) => h.get(),
            Self::TwoPoint(tp) => {
                if rng.random::<f64>() < tp.p {
                    tp.h1()
                } else {
                    tp.h2()
                }
            }
            Self::Tabulated(tab) => tab.inverse_cdf(rng.random::<f64>()),
        }
    }

    /// Support points of an atomic law, in increasing order.
    pub fn atoms(&self) -> Option<Vec<f64>> {
        match self {
            Self::Deterministic(h) => Some(alloc::vec![h.get()]),
            Self::TwoPoint(tp) => Some(alloc::vec![tp.h1(), tp.h2()]),
            Self::Tabulated(_) => None,
        }
    }
}

#[cfg(feature = "serde")]
mod repr {
    use super::*;
    use alloc::vec::Vec;

    #[derive(serde::Serialize, serde::Deserialize)]
    #[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
    pub enum HurstModelRepr {
        Deterministic { h: f64 },
        TwoPoint { h1: f64, h2: f64, p: f64 },
        Tabulated { nodes: Vec<[f64; 2]> },
    }

    impl TryFrom<HurstModelRepr> for HurstModel {
        type Error = Error;

        fn try_from(r: HurstModelRepr) -> Result<Self> {
            match r {
                HurstModelRepr::Deterministic { h } => HurstModel::deterministic(h),
                HurstModelRepr::TwoPoint { h1, h2, p } => HurstModel::two_point(h1, h2, p),
                HurstModelRepr::Tabulated { nodes } => {
                    let pairs: Vec<(f64, f64)> = nodes.iter().map(|n| (n[0], n[1])).collect();
                    HurstModel::tabulated(&pairs)
                }
            }
        }
    }

    impl From<HurstModel> for HurstModelRepr {
        fn from(m: HurstModel) -> Self {
            match m {
                HurstModel::Deterministic(h) => Self::Deterministic { h: h.get() },
                HurstModel::TwoPoint(tp) => Self::TwoPoint {
                    h1: tp.h1(),
                    h2: tp.h2(),
                    p: tp.p(),
                },
                HurstModel::Tabulated(tab) => Self::Tabulated {
                    nodes: tab.nodes().map(|(h, d)| [h, d]).collect(),
                },
            }
        }
    }
}
