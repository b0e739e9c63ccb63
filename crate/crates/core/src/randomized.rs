//! Statistics of FBM and RL FBM with a random Hurst exponent.
//!
//! Conditional on 𝓗 = h each path is an ordinary FBM or RL FBM, so every
//! statistic here is E[s(𝓗)] for the corresponding fixed-h statistic s,
//! taken with [`HurstModel::expect`].

use core::f64::consts::PI;

use crate::analytic::{
    cov_asymptotic, fbm_cov, rl_prefactor, rlfbm_cov, rlfbm_etamsd, rlfbm_inc_sm, IncrementForm,
    ProcessKind, Regime,
};
use crate::error::{domain, Error, Result};
use crate::hurst::HurstModel;
use crate::specfun::gamma_fn;

/// A process family together with the law of its Hurst exponent.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub hurst: HurstModel,
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, hurst: HurstModel) -> Self {
        Self { kind, hurst }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            ProcessKind::Fbm => "fbmre",
            ProcessKind::RlFbm => "rlfbmre",
        }
    }
}

/// The statistics that have two-point asymptotic forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Stat {
    SecondMoment,
    Cov,
    Etamsd,
    IncSm,
}

impl Stat {
    pub fn label(self) -> &'static str {
        match self {
            Self::SecondMoment => "second_moment",
            Self::Cov => "cov",
            Self::Etamsd => "etamsd",
            Self::IncSm => "inc_sm",
        }
    }
}

/// Selects one asymptotic formula of the two-point case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MixtureStat {
    pub stat: Stat,
    pub kind: ProcessKind,
    pub regime: Regime,
}

impl MixtureStat {
    pub const fn new(stat: Stat, kind: ProcessKind, regime: Regime) -> Self {
        Self { stat, kind, regime }
    }
}

#[inline]
fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Density of X(t): a mixture of centred Gaussians with variance t^{2h}.
/// Identical for FBMRE and RL FBMRE.
pub fn re_pdf(spec: &ProcessSpec, x: f64, t: f64) -> f64 {
    if !(t > 0.0) {
        return f64::NAN;
    }
    spec.hurst.expect(|h| {
        let var = pow(t, 2.0 * h);
        libm::exp(-0.5 * x * x / var) / libm::sqrt(2.0 * PI * var)
    })
}

/// E|X(t)|^q = c_q · M(q ln t) with c_q = 2^{q/2} Γ((q+1)/2) / √π.
pub fn re_abs_moment(spec: &ProcessSpec, q: f64, t: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(domain("q", q, "moment order must be positive"));
    }
    if !(t > 0.0) {
        return Err(domain("t", t, "time must be positive"));
    }
    let c_q = pow(2.0, 0.5 * q) * gamma_fn(0.5 * (q + 1.0))? / libm::sqrt(PI);
    Ok(c_q * spec.hurst.mgf(q * libm::log(t)))
}

/// E[X(t)²] = M(2 ln t), the same for both processes.
pub fn second_moment(hurst: &HurstModel, t: f64) -> f64 {
    if !(t >= 0.0) {
        return f64::NAN;
    }
    hurst.expect(|h| pow(t, 2.0 * h))
}

/// FBMRE autocovariance ½[M(2 ln(t+τ)) + M(2 ln t) − M(2 ln τ)].
///
/// Summed component by component, which is the same quantity but keeps the
/// (t+τ)^{2h} − τ^{2h} cancellation inside each fixed-h term.
pub fn fbmre_cov(hurst: &HurstModel, t: f64, tau: f64) -> f64 {
    hurst.expect(|h| fbm_cov(h, t, tau))
}

/// Expected FBMRE TAMSD, M(2 ln τ). It does not depend on the horizon.
pub fn fbmre_etamsd(hurst: &HurstModel, tau: f64) -> f64 {
    if !(tau > 0.0) {
        return f64::NAN;
    }
    hurst.expect(|h| pow(tau, 2.0 * h))
}

/// FBMRE increments are stationary, so this equals [`fbmre_etamsd`].
pub fn fbmre_inc_sm(hurst: &HurstModel, t: f64, tau: f64) -> f64 {
    if !(t >= 0.0) {
        return f64::NAN;
    }
    fbmre_etamsd(hurst, tau)
}

pub fn rlfbmre_cov(hurst: &HurstModel, t: f64, tau: f64) -> f64 {
    hurst.expect(|h| rlfbm_cov(h, t, tau))
}

pub fn rlfbmre_etamsd(hurst: &HurstModel, tau: f64, horizon: f64) -> f64 {
    hurst.expect(|h| rlfbm_etamsd(h, tau, horizon))
}

pub fn rlfbmre_inc_sm(hurst: &HurstModel, t: f64, tau: f64) -> Result<f64> {
    hurst.try_expect(|h| rlfbm_inc_sm(h, t, tau, IncrementForm::Closed))
}

/// E[C(𝓗) τ^{2𝓗}], the T/τ ≫ 1 limit of the RL FBMRE TAMSD with every
/// mixture component kept.
pub fn rlfbmre_etamsd_asymptotic(hurst: &HurstModel, tau: f64) -> f64 {
    if !(tau > 0.0) {
        return f64::NAN;
    }
    hurst.expect(|h| rl_prefactor(h) * pow(tau, 2.0 * h))
}

/// Large-T plateau of the ergodicity-breaking parameter,
/// E[s²]/E[s]² − 1 with s(h) the per-path TAMSD limit (τ^{2h} for FBM,
/// C(h)τ^{2h} for RL FBM).
pub fn eb_plateau(spec: &ProcessSpec, tau: f64) -> f64 {
    if !(tau > 0.0) {
        return f64::NAN;
    }
    let s = |h: f64| match spec.kind {
        ProcessKind::Fbm => pow(tau, 2.0 * h),
        ProcessKind::RlFbm => rl_prefactor(h) * pow(tau, 2.0 * h),
    };
    let m1 = spec.hurst.expect(s);
    let m2 = spec.hurst.expect(|h| {
        let v = s(h);
        v * v
    });
    m2 / (m1 * m1) - 1.0
}

/// Exact value of `stat` for `spec`. `t` is ignored by the TAMSD and
/// `horizon` is only read by the RL FBMRE TAMSD.
pub fn exact(spec: &ProcessSpec, stat: Stat, t: f64, tau: f64, horizon: Option<f64>) -> Result<f64> {
    let m = &spec.hurst;
    let v = match (stat, spec.kind) {
        (Stat::SecondMoment, _) => second_moment(m, t),
        (Stat::Cov, ProcessKind::Fbm) => fbmre_cov(m, t, tau),
        (Stat::Cov, ProcessKind::RlFbm) => rlfbmre_cov(m, t, tau),
        (Stat::Etamsd, ProcessKind::Fbm) => fbmre_etamsd(m, tau),
        (Stat::Etamsd, ProcessKind::RlFbm) => {
            let horizon = horizon.ok_or(Error::Degenerate("RL FBMRE TAMSD needs a horizon T"))?;
            rlfbmre_etamsd(m, tau, horizon)
        }
        (Stat::IncSm, ProcessKind::Fbm) => fbmre_inc_sm(m, t, tau),
        (Stat::IncSm, ProcessKind::RlFbm) => rlfbmre_inc_sm(m, t, tau)?,
    };
    if v.is_nan() {
        return Err(domain("argument", t, "statistic undefined at these arguments"));
    }
    Ok(v)
}

/// Two-point asymptotic forms, with every printed term kept.
///
/// `t` is the time for `SecondMoment`, `Cov` and `IncSm`; `Etamsd` reads
/// only `tau` (and checks `tau < T` when a horizon is given).
pub fn mixture_asymptotic(
    stat: MixtureStat,
    hurst: &HurstModel,
    t: f64,
    tau: f64,
    horizon: Option<f64>,
) -> Result<f64> {
    let tp = match hurst {
        HurstModel::TwoPoint(tp) => tp,
        other => {
            return Err(Error::UnsupportedModel {
                op: "mixture_asymptotic",
                model: other.name(),
            })
        }
    };
    if let Some(big_t) = horizon {
        if !(tau < big_t) {
            return Err(domain("tau", tau, "lag must be below the horizon"));
        }
    }
    let (h1, h2, p) = (tp.h1(), tp.h2(), tp.p());
    let q = 1.0 - p;
    let short = matches!(stat.regime, Regime::ShortRatio);
    let v = match (stat.stat, stat.kind) {
        (Stat::SecondMoment, _) => {
            if short {
                p * pow(t, 2.0 * h1)
            } else {
                q * pow(t, 2.0 * h2)
            }
        }
        (Stat::Cov, kind) => {
            p * cov_asymptotic(kind, h1, t, tau, stat.regime)
                + q * cov_asymptotic(kind, h2, t, tau, stat.regime)
        }
        (Stat::Etamsd, ProcessKind::Fbm) | (Stat::IncSm, ProcessKind::Fbm) => {
            if short {
                p * pow(tau, 2.0 * h1)
            } else {
                q * pow(tau, 2.0 * h2)
            }
        }
        (Stat::Etamsd, ProcessKind::RlFbm) => {
            if short {
                p * rl_prefactor(h1) * pow(tau, 2.0 * h1)
            } else {
                q * rl_prefactor(h2) * pow(tau, 2.0 * h2)
            }
        }
        (Stat::IncSm, ProcessKind::RlFbm) => {
            if short {
                p * pow(tau, 2.0 * h1) + q * pow(tau, 2.0 * h2)
            } else {
                p * rl_prefactor(h1) * pow(tau, 2.0 * h1) + q * rl_prefactor(h2) * pow(tau, 2.0 * h2)
            }
        }
    };
    if v.is_nan() {
        return Err(domain("argument", t, "asymptote undefined at these arguments"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::rlfbm_etamsd;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn tp(p: f64) -> HurstModel {
        HurstModel::two_point(0.25, 0.75, p).unwrap()
    }

    fn det(h: f64) -> HurstModel {
        HurstModel::deterministic(h).unwrap()
    }

    fn spec(kind: ProcessKind, hurst: HurstModel) -> ProcessSpec {
        ProcessSpec::new(kind, hurst)
    }

    #[test]
    fn pdf_examples() {
        let inv = 1.0 / libm::sqrt(2.0 * PI);
        assert!(rel(re_pdf(&spec(ProcessKind::Fbm, det(0.5)), 0.0, 1.0), inv) < 1e-15);
        assert!(rel(re_pdf(&spec(ProcessKind::RlFbm, tp(0.5)), 0.0, 1.0), inv) < 1e-15);
    }

    #[test]
    fn pdf_normalises() {
        let tab = HurstModel::tabulated(&[(0.1, 0.0), (0.5, 2.5), (0.9, 0.0)]).unwrap();
        for m in [det(0.3), tp(0.1), tab] {
            let s = spec(ProcessKind::Fbm, m);
            let t = 2.5;
            let (lo, hi, n) = (-60.0, 60.0, 120_000);
            let dx = (hi - lo) / n as f64;
            let mut acc = 0.5 * (re_pdf(&s, lo, t) + re_pdf(&s, hi, t));
            for i in 1..n {
                acc += re_pdf(&s, lo + dx * i as f64, t);
            }
            assert!((acc * dx - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn abs_moment_examples() {
        let s = spec(ProcessKind::Fbm, tp(0.1));
        let t: f64 = 10.0;
        let want = 0.1 * libm::sqrt(10.0) + 0.9 * libm::pow(10.0, 1.5);
        assert!(rel(re_abs_moment(&s, 2.0, t).unwrap(), want) < 1e-13);
        let d = spec(ProcessKind::RlFbm, det(0.35));
        assert!(rel(re_abs_moment(&d, 2.0, 3.0).unwrap(), libm::pow(3.0, 0.7)) < 1e-13);
        // E|Z| = √(2/π) for a standard normal
        let bm = spec(ProcessKind::Fbm, det(0.5));
        assert!(rel(re_abs_moment(&bm, 1.0, 1.0).unwrap(), libm::sqrt(2.0 / PI)) < 1e-14);
        assert!(re_abs_moment(&bm, 0.0, 1.0).is_err());
    }

    #[test]
    fn fbmre_cov_examples() {
        let want = (libm::pow(2.0, 0.5) + libm::pow(2.0, 1.5)) / 4.0;
        assert!(rel(fbmre_cov(&tp(0.5), 1.0, 1.0), want) < 1e-15);
        let mix = 0.9 * fbm_cov(0.25, 0.5, 0.1) + 0.1 * fbm_cov(0.75, 0.5, 0.1);
        assert!(rel(fbmre_cov(&tp(0.9), 0.5, 0.1), mix) < 1e-15);
        // the MGF form of the same quantity
        let m = tp(0.9);
        let (t, tau) = (0.5f64, 0.1f64);
        let mgf_form = 0.5
            * (m.mgf(2.0 * libm::log(t + tau)) + m.mgf(2.0 * libm::log(t)) - m.mgf(2.0 * libm::log(tau)));
        assert!(rel(fbmre_cov(&m, t, tau), mgf_form) < 1e-13);
    }

    #[test]
    fn etamsd_examples() {
        assert_eq!(fbmre_etamsd(&det(0.5), 3.0), 3.0);
        assert!(rel(fbmre_etamsd(&tp(0.5), 1.0), 1.0) < 1e-15);
        assert!(rel(fbmre_etamsd(&tp(0.1), 0.01), 0.0109) < 1e-14);
        assert_eq!(rlfbmre_etamsd(&det(0.5), 0.3, 10.0), 0.3);
        let m = tp(0.5);
        let mix = 0.5 * rlfbm_etamsd(0.25, 0.1, 2e4) + 0.5 * rlfbm_etamsd(0.75, 0.1, 2e4);
        assert!(rel(rlfbmre_etamsd(&m, 0.1, 2e4), mix) < 1e-15);
    }

    #[test]
    fn rl_tamsd_approaches_dominant_component() {
        let m = tp(0.1);
        let mut prev = f64::INFINITY;
        for tau in [10.0, 30.0, 100.0] {
            let exact = rlfbmre_etamsd(&m, tau, 2e6);
            let lead = 0.9 * rl_prefactor(0.75) * libm::pow(tau, 1.5);
            let gap = rel(exact, lead);
            assert!(gap < prev, "tau={tau} gap={gap}");
            prev = gap;
        }
        assert!(prev < 0.02);
    }

    #[test]
    fn rlfbmre_cov_examples() {
        let m = tp(0.3);
        let (t, want) = (2.0f64, 0.3 * libm::sqrt(2.0) + 0.7 * libm::pow(2.0, 1.5));
        assert!(rel(rlfbmre_cov(&m, t, 0.0), want) < 1e-15);
        // 40-digit references for the two components at t = τ = 1
        let mix = 0.5 * 0.613_977_837_766_164_876_7 + 0.5 * 1.336_020_337_976_286_015;
        assert!(rel(rlfbmre_cov(&tp(0.5), 1.0, 1.0), mix) < 1e-13);
    }

    #[test]
    fn rl_increment_examples() {
        let m = tp(0.5);
        let tau = 0.7;
        assert!(rel(rlfbmre_inc_sm(&m, 0.0, tau).unwrap(), m.mgf(2.0 * libm::log(tau))) < 1e-14);
        assert!(rel(rlfbmre_inc_sm(&det(0.5), 4.0, tau).unwrap(), tau) < 1e-15);
        let exact = rlfbmre_inc_sm(&m, 1e4 * tau, tau).unwrap();
        let asym = mixture_asymptotic(
            MixtureStat::new(Stat::IncSm, ProcessKind::RlFbm, Regime::LongRatio),
            &m,
            1e4 * tau,
            tau,
            None,
        )
        .unwrap();
        assert!(rel(asym, exact) < 5e-3);
    }

    #[test]
    fn second_moment_asymptotes() {
        let m = tp(0.4);
        let short = MixtureStat::new(Stat::SecondMoment, ProcessKind::Fbm, Regime::ShortRatio);
        let long = MixtureStat::new(Stat::SecondMoment, ProcessKind::Fbm, Regime::LongRatio);
        let r = |t: f64, s| second_moment(&m, t) / mixture_asymptotic(s, &m, t, 1.0, None).unwrap();
        assert!(r(1e-6, short) < r(1e-4, short) && r(1e-6, short) - 1.0 < 1e-2);
        assert!(r(1e6, long) < r(1e4, long) && r(1e6, long) - 1.0 < 1e-2);
    }

    #[test]
    fn rl_short_cov_asymptote() {
        let m = tp(0.5);
        let s = MixtureStat::new(Stat::Cov, ProcessKind::RlFbm, Regime::ShortRatio);
        let a = mixture_asymptotic(s, &m, 1e-3, 0.1, None).unwrap();
        assert!(rel(a, rlfbmre_cov(&m, 1e-3, 0.1)) < 1e-2);
    }

    #[test]
    fn asymptote_rejects_non_two_point() {
        let s = MixtureStat::new(Stat::Cov, ProcessKind::Fbm, Regime::ShortRatio);
        assert!(matches!(
            mixture_asymptotic(s, &det(0.3), 0.1, 1.0, None),
            Err(Error::UnsupportedModel { .. })
        ));
    }

    #[test]
    fn accelerating_diffusion_slopes() {
        let s = spec(ProcessKind::Fbm, tp(0.5));
        let slope = |a: f64, b: f64| {
            let (ma, mb) = (re_abs_moment(&s, 2.0, a).unwrap(), re_abs_moment(&s, 2.0, b).unwrap());
            libm::log(mb / ma) / libm::log(b / a)
        };
        assert!((slope(1e-3, 1e-2) - 0.5).abs() < 0.05);
        assert!((slope(1e3, 1e4) - 1.5).abs() < 0.05);
    }

    #[test]
    fn short_ratio_order_gap() {
        let m = tp(0.5);
        let tau = 0.1;
        let order = |f: &dyn Fn(f64) -> f64, t: f64| libm::log(f(t) / f(t / 10.0)) / libm::log(10.0);
        let rl = |t: f64| rlfbmre_cov(&m, t, tau);
        let fb = |t: f64| fbmre_cov(&m, t, tau);
        // local order of rlfbmre_cov tends to H₁ + ½ as t → 0
        assert!((order(&rl, 1e-9) - 0.75).abs() < 1e-3);
        // the FBMRE local order tends to 1 only once τ^{2H₁}(t/τ) dominates t^{2H₁}/2
        assert!((order(&fb, 1e-12) - 0.5).abs() < 0.05);
    }

    #[test]
    fn eb_plateau_values() {
        let s = spec(ProcessKind::Fbm, tp(0.5));
        let (a, b) = (libm::pow(0.1, 0.5), libm::pow(0.1, 1.5));
        let want = (0.5 * a * a + 0.5 * b * b) / libm::pow(0.5 * a + 0.5 * b, 2.0) - 1.0;
        assert!(rel(eb_plateau(&s, 0.1), want) < 1e-13);
        assert!(eb_plateau(&spec(ProcessKind::RlFbm, det(0.3)), 0.1).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn mixture_linearity(h1 in 0.05f64..0.45, h2 in 0.55f64..0.95, p in 0.01f64..0.99,
                             t in 0.0f64..30.0, tau in 0.01f64..10.0) {
            let m = HurstModel::two_point(h1, h2, p).unwrap();
            let mix = |f: &dyn Fn(f64) -> f64| p * f(h1) + (1.0 - p) * f(h2);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-300);
            prop_assert!(close(fbmre_cov(&m, t, tau), mix(&|h| fbm_cov(h, t, tau))));
            prop_assert!(close(rlfbmre_cov(&m, t, tau), mix(&|h| rlfbm_cov(h, t, tau))));
            prop_assert!(close(fbmre_etamsd(&m, tau), mix(&|h| libm::pow(tau, 2.0 * h))));
            let horizon = tau + 50.0;
            prop_assert!(close(rlfbmre_etamsd(&m, tau, horizon), mix(&|h| rlfbm_etamsd(h, tau, horizon))));
            let inc = rlfbmre_inc_sm(&m, t, tau).unwrap();
            let inc_mix = mix(&|h| rlfbm_inc_sm(h, t, tau, IncrementForm::Closed).unwrap());
            prop_assert!(close(inc, inc_mix));
        }

        #[test]
        fn degeneracy(h in 0.02f64..0.98, t in 0.0f64..30.0, tau in 0.01f64..10.0) {
            let m = HurstModel::deterministic(h).unwrap();
            prop_assert_eq!(fbmre_cov(&m, t, tau), fbm_cov(h, t, tau));
            prop_assert_eq!(rlfbmre_cov(&m, t, tau), rlfbm_cov(h, t, tau));
            prop_assert_eq!(rlfbmre_etamsd(&m, tau, tau + 5.0), rlfbm_etamsd(h, tau, tau + 5.0));
            prop_assert_eq!(fbmre_etamsd(&m, tau), libm::pow(tau, 2.0 * h));
        }

        #[test]
        fn fbmre_increment_is_flat(t1 in 0.0f64..100.0, t2 in 0.0f64..100.0, tau in 0.01f64..10.0) {
            let m = tp(0.3);
            prop_assert_eq!(fbmre_inc_sm(&m, t1, tau), fbmre_inc_sm(&m, t2, tau));
            prop_assert_eq!(fbmre_inc_sm(&m, t1, tau), fbmre_etamsd(&m, tau));
        }
    }
}
