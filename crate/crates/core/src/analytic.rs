//! Closed-form statistics of FBM and Riemann-Liouville FBM for a fixed Hurst
//! exponent, with their short- and long-ratio expansions.
//!
//! Every function takes the exponent as a plain `f64` in (0, 1) and returns
//! NaN outside its domain, in the manner of `libm`. H = ½ is an exact special
//! case throughout: both processes are then Brownian motion.

use crate::error::{domain, Result};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{gamma_fn, hyp2f1, sin_pi, Hyp2F1Args};

/// Which Gaussian process a statistic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProcessKind {
    Fbm,
    RlFbm,
}

impl ProcessKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Fbm => "fbm",
            Self::RlFbm => "rlfbm",
        }
    }
}

/// Asymptotic regime: `ShortRatio` for t/τ ≪ 1 (or τ ≪ 1 when the statistic
/// depends on τ alone), `LongRatio` for the opposite limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    ShortRatio,
    LongRatio,
}

/// Representation used for the RL FBM increment second moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IncrementForm {
    /// 2Hτ^{2H}(I(t,τ;H) + 1/(2H)) with I by quadrature.
    Kernel,
    /// (t+τ)^{2H} + t^{2H} − 2 Cov.
    Closed,
}

/// Tolerance used for the kernel integral I(t, τ; H).
pub const KERNEL_QUAD: QuadOptions = QuadOptions::new(1e-13, 1e-12);

#[inline]
fn valid_h(h: f64) -> bool {
    h > 0.0 && h < 1.0
}

#[inline]
fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// FBM autocovariance Cov(B(t), B(t+τ)).
pub fn fbm_cov(h: f64, t: f64, tau: f64) -> f64 {
    if !valid_h(h) || !(t >= 0.0) || !(tau >= 0.0) {
        return f64::NAN;
    }
    let e = 2.0 * h;
    0.5 * (pow(t + tau, e) + pow(t, e) - pow(tau, e))
}

/// RL FBM autocovariance Cov(B*(t), B*(t+τ)) through ₂F₁.
pub fn rlfbm_cov(h: f64, t: f64, tau: f64) -> f64 {
    if !valid_h(h) || !(t >= 0.0) || !(tau >= 0.0) {
        return f64::NAN;
    }
    if t == 0.0 {
        return 0.0;
    }
    if tau == 0.0 {
        return pow(t, 2.0 * h);
    }
    if h == 0.5 {
        return t;
    }
    let z = t / (t + tau);
    let pre = 2.0 * h / (h + 0.5) * pow(t + tau, h - 0.5) * pow(t, h + 0.5);
    match hyp2f1(Hyp2F1Args::new(0.5 - h, 1.0, 1.5 + h, z)) {
        Ok(f) => pre * f,
        Err(_) => f64::NAN,
    }
}

/// (1+u)^{H−½} − u^{H−½}, evaluated without cancellation for large u.
#[inline]
fn kernel_gap(h: f64, u: f64) -> f64 {
    let e = h - 0.5;
    pow(u, e) * libm::expm1(e * libm::log1p(1.0 / u))
}

/// I(t, τ; H) = ∫₀^{t/τ} [(1+u)^{H−½} − u^{H−½}]² du, with x = t/τ.
///
/// On [0, min(x, 1)] the substitution u = v^{1/(2H)} removes the u^{2H−1}
/// endpoint behaviour; on [1, x] u = e^s flattens the algebraic tail.
pub fn kernel_integral(h: f64, x: f64) -> Result<f64> {
    if !valid_h(h) {
        return Err(domain("H", h, "Hurst exponent must lie in (0, 1)"));
    }
    if !(x >= 0.0) || x.is_infinite() {
        return Err(domain("t/tau", x, "ratio must be finite and nonnegative"));
    }
    if x == 0.0 || h == 0.5 {
        return Ok(0.0);
    }
    let inv = 1.0 / (2.0 * h);
    let near = x.min(1.0);
    let head = integrate(
        |v| {
            if v <= 0.0 {
                // limit of g(u)·du/dv as v → 0
                return inv;
            }
            let u = pow(v, inv);
            let g = kernel_gap(h, u);
            g * g * inv * u / v
        },
        0.0,
        pow(near, 2.0 * h),
        KERNEL_QUAD,
    )?
    .value;
    if x <= 1.0 {
        return Ok(head);
    }
    let tail = integrate(
        |s| {
            let u = libm::exp(s);
            let g = kernel_gap(h, u);
            g * g * u
        },
        0.0,
        libm::log(x),
        KERNEL_QUAD,
    )?
    .value;
    Ok(head + tail)
}

/// Second moment of the RL FBM increment B*(t+τ) − B*(t).
pub fn rlfbm_inc_sm(h: f64, t: f64, tau: f64, form: IncrementForm) -> Result<f64> {
    if !valid_h(h) {
        return Err(domain("H", h, "Hurst exponent must lie in (0, 1)"));
    }
    if !(t >= 0.0) || !(tau > 0.0) {
        return Err(domain("t, tau", t, "need t >= 0 and tau > 0"));
    }
    if h == 0.5 {
        return Ok(tau);
    }
    let e = 2.0 * h;
    match form {
        IncrementForm::Kernel => {
            let i = kernel_integral(h, t / tau)?;
            Ok(e * pow(tau, e) * (i + 1.0 / e))
        }
        IncrementForm::Closed => {
            if t == 0.0 {
                return Ok(pow(tau, e));
            }
            Ok(pow(t + tau, e) + pow(t, e) - 2.0 * rlfbm_cov(h, t, tau))
        }
    }
}

/// Expected TAMSD of RL FBM observed on [0, T] at lag τ.
///
/// The three terms cancel down from O(T^{2H}) to O(τ^{2H}), so roughly
/// (T/τ)^{2H}·ε of relative accuracy is lost for very long horizons.
pub fn rlfbm_etamsd(h: f64, tau: f64, horizon: f64) -> f64 {
    if !valid_h(h) || !(tau > 0.0) || !(horizon > tau) || horizon.is_infinite() {
        return f64::NAN;
    }
    if h == 0.5 {
        return tau;
    }
    let d = horizon - tau;
    let k = 2.0 * h + 1.0;
    let smooth = (pow(horizon, k) - pow(tau, k)) / (k * d) + pow(d, 2.0 * h) / k;
    let z = (tau - horizon) / tau;
    let f = match hyp2f1(Hyp2F1Args::new(0.5 + h, 0.5 - h, 2.5 + h, z)) {
        Ok(f) => f,
        Err(_) => return f64::NAN,
    };
    let cross = 4.0 * h / ((h + 0.5) * (h + 1.5)) * pow(d, h + 0.5) * pow(tau, h - 0.5) * f;
    smooth - cross
}

/// C(H) = 2H Γ(½+H)² / (Γ(1+2H) sin πH), the long-time TAMSD prefactor of
/// RL FBM. C(½) = 1.
pub fn rl_prefactor(h: f64) -> f64 {
    if !valid_h(h) {
        return f64::NAN;
    }
    if h == 0.5 {
        return 1.0;
    }
    let g = match (gamma_fn(0.5 + h), gamma_fn(1.0 + 2.0 * h)) {
        (Ok(a), Ok(b)) => a * a / b,
        _ => return f64::NAN,
    };
    2.0 * h * g / sin_pi(h)
}

/// Three-term expansion of the FBM or RL FBM autocovariance.
pub fn cov_asymptotic(kind: ProcessKind, h: f64, t: f64, tau: f64, regime: Regime) -> f64 {
    if !valid_h(h) || !(t > 0.0) || !(tau > 0.0) {
        return f64::NAN;
    }
    let e = 2.0 * h;
    let lin = h * (e - 1.0);
    match (kind, regime) {
        (ProcessKind::Fbm, Regime::ShortRatio) => {
            let x = t / tau;
            0.5 * pow(tau, e) * (e * x + pow(x, e) + lin * x * x)
        }
        (ProcessKind::Fbm, Regime::LongRatio) => {
            let y = tau / t;
            0.5 * pow(t, e) * (2.0 + e * y - pow(y, e) + lin * y * y)
        }
        (ProcessKind::RlFbm, Regime::ShortRatio) => {
            let x = t / tau;
            let c0 = e / (0.5 + h);
            let c1 = e * (0.5 - h) / (1.5 + h);
            let c2 = h * (0.5 - h) * (1.5 - h) / (2.5 + h);
            pow(tau, e) * pow(x, h + 0.5) * (c0 - c1 * x + c2 * x * x)
        }
        (ProcessKind::RlFbm, Regime::LongRatio) => {
            let y = tau / t;
            0.5 * pow(t, e) * (2.0 + e * y - rl_prefactor(h) * pow(y, e) + lin * y * y)
        }
    }
}

/// Large-T/τ form C(H)·τ^{2H} of the expected RL FBM TAMSD.
pub fn rlfbm_etamsd_asymptotic(h: f64, tau: f64) -> f64 {
    if !(tau > 0.0) {
        return f64::NAN;
    }
    rl_prefactor(h) * pow(tau, 2.0 * h)
}

/// τ^{2H} for t/τ ≪ 1 and C(H)·τ^{2H} for t/τ ≫ 1.
pub fn rlfbm_inc_sm_asymptotic(h: f64, tau: f64, regime: Regime) -> f64 {
    if !valid_h(h) || !(tau > 0.0) {
        return f64::NAN;
    }
    match regime {
        Regime::ShortRatio => pow(tau, 2.0 * h),
        Regime::LongRatio => rlfbm_etamsd_asymptotic(h, tau),
    }
}
