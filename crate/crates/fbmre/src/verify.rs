//! Acceptance suite: oracle equivalence, figure reproduction, Monte Carlo
//! fidelity and the ergodicity checks.
//!
//! The functions under test are reached through a [`Subject`] of plain
//! function pointers so a deliberately broken implementation can be run
//! through the same criteria. `fast` runs the analytic criteria; `full` adds
//! the ensembles.

use std::fmt;
use std::str::FromStr;

use fbmre_core::analytic::{rlfbm_cov, rlfbm_etamsd, rlfbm_inc_sm, IncrementForm};
use fbmre_core::estimate::{eb_from_samples, emsd, inc_sm_hat, linear_fit, mean_tamsd, tamsd};
use fbmre_core::oracle::{quad_etamsd, quad_ito_cov, rl_prefactor_ref, series_2f1_ref};
use fbmre_core::randomized::{
    exact, fbmre_cov, fbmre_etamsd, rlfbmre_cov, rlfbmre_etamsd, Stat,
};
use fbmre_core::specfun::{hyp2f1, Hyp2F1Args};
use fbmre_core::{Ensemble, HurstModel, ProcessKind, ProcessSpec, Result, TimeGrid};
use serde::Serialize;

use crate::ensemble::{map_paths, par_ensemble, Method, Sampler};
use crate::experiment::{compute, regime_label};
use crate::figures::{preset, preset_names};

pub const TOL_HYP2F1: f64 = 1e-10;
pub const TOL_RL_COV: f64 = 1e-7;
pub const TOL_INC_FORMS: f64 = 1e-8;
pub const TOL_ETAMSD: f64 = 1e-6;
pub const TOL_HALF_IDENTITY: f64 = 1e-12;
pub const TOL_PREFACTOR: f64 = 0.01;
pub const TOL_FIGURE: f64 = 0.02;
pub const SE_EMSD: f64 = 3.0;
pub const SE_TAMSD: f64 = 3.0;
pub const SE_INC_SM: f64 = 4.0;
pub const EB_DECAY_FACTOR: f64 = 4.0;
pub const TOL_EB_PLATEAU: f64 = 0.10;
pub const TOL_SLOPE: f64 = 0.05;

pub const H_GRID: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];
pub const Z_GRID: [f64; 8] = [-1e4, -10.0, -1.0, 0.0, 0.3, 0.6, 0.9, 0.99];
pub const T_GRID: [f64; 3] = [0.1, 1.0, 10.0];

/// Fixed seeds of the Monte Carlo criteria.
pub const SEED_FIDELITY: u64 = 0x5eed_0007;
pub const SEED_EB: u64 = 0x5eed_0008;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fast" => Ok(Self::Fast),
            "full" => Ok(Self::Full),
            other => Err(format!("unknown verify level `{other}` (fast or full)")),
        }
    }
}

/// Direction of the pass condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bound {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: Bound,
    pub tolerance: f64,
    pub detail: String,
}

impl CriterionReport {
    fn new(id: &str, name: &str, measured: f64, bound: Bound, tolerance: f64, detail: String) -> Self {
        let passed = match bound {
            Bound::AtMost => measured <= tolerance,
            Bound::AtLeast => measured >= tolerance,
        };
        Self {
            id: id.to_owned(),
            name: name.to_owned(),
            passed,
            measured,
            bound,
            tolerance,
            detail,
        }
    }

    fn at_most(id: &str, name: &str, measured: f64, tol: f64, detail: String) -> Self {
        Self::new(id, name, measured, Bound::AtMost, tol, detail)
    }

    /// A criterion whose computation itself failed.
    fn errored(id: &str, name: &str, err: impl fmt::Display) -> Self {
        Self {
            id: id.to_owned(),
            name: name.to_owned(),
            passed: false,
            measured: f64::NAN,
            bound: Bound::AtMost,
            tolerance: f64::NAN,
            detail: format!("error: {err}"),
        }
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        write!(
            f,
            "{} {:<3} {:<44} measured {:.3e} {op} {:.3e}  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.tolerance,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

/// The implementations a run exercises.
#[derive(Clone, Copy)]
pub struct Subject {
    pub hyp2f1: fn(Hyp2F1Args) -> Result<f64>,
    pub rlfbm_cov: fn(f64, f64, f64) -> f64,
    /// Closed-form RL FBM increment second moment.
    pub rlfbm_inc_sm: fn(f64, f64, f64) -> Result<f64>,
    pub rlfbm_etamsd: fn(f64, f64, f64) -> f64,
}

fn closed_inc(h: f64, t: f64, tau: f64) -> Result<f64> {
    rlfbm_inc_sm(h, t, tau, IncrementForm::Closed)
}

impl Subject {
    pub fn library() -> Self {
        Self {
            hyp2f1,
            rlfbm_cov,
            rlfbm_inc_sm: closed_inc,
            rlfbm_etamsd,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

/// Tracks the worst case of a sweep; NaN always wins.
struct Worst {
    value: f64,
    at: String,
}

impl Default for Worst {
    fn default() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            at: String::new(),
        }
    }
}

impl Worst {
    fn see(&mut self, v: f64, at: impl FnOnce() -> String) {
        if v.is_nan() || (!self.value.is_nan() && v > self.value) {
            self.value = v;
            self.at = at();
        }
    }

    fn detail(&self) -> String {
        format!("worst at {}", self.at)
    }
}

pub fn criterion_hyp2f1(s: &Subject) -> CriterionReport {
    let name = "hyp2f1 vs compensated series";
    let mut w = Worst::default();
    for h in H_GRID {
        for z in Z_GRID {
            for (fam, args) in [
                ("cov", Hyp2F1Args::new(0.5 - h, 1.0, 1.5 + h, z)),
                ("tamsd", Hyp2F1Args::new(0.5 + h, 0.5 - h, 2.5 + h, z)),
            ] {
                let r = match ((s.hyp2f1)(args), series_2f1_ref(args)) {
                    (Ok(a), Ok(b)) => rel(a, b),
                    (Err(e), _) | (_, Err(e)) => return CriterionReport::errored("1", name, e),
                };
                w.see(r, || format!("{fam} H={h} z={z}"));
            }
        }
    }
    CriterionReport::at_most("1", name, w.value, TOL_HYP2F1, w.detail())
}

pub fn criterion_rl_cov(s: &Subject) -> CriterionReport {
    let name = "rlfbm_cov vs Ito quadrature";
    let mut w = Worst::default();
    for h in H_GRID {
        for t in T_GRID {
            for tau in T_GRID {
                let q = match quad_ito_cov(h, t, tau) {
                    Ok(q) => q,
                    Err(e) => return CriterionReport::errored("2", name, e),
                };
                w.see(rel((s.rlfbm_cov)(h, t, tau), q), || format!("H={h} t={t} tau={tau}"));
            }
        }
    }
    CriterionReport::at_most("2", name, w.value, TOL_RL_COV, w.detail())
}

pub fn criterion_inc_forms(s: &Subject) -> CriterionReport {
    let name = "kernel vs closed rlfbm_inc_sm";
    let mut w = Worst::default();
    for h in H_GRID {
        for t in T_GRID {
            for tau in T_GRID {
                let r = match (rlfbm_inc_sm(h, t, tau, IncrementForm::Kernel), (s.rlfbm_inc_sm)(h, t, tau)) {
                    (Ok(k), Ok(c)) => rel(c, k),
                    (Err(e), _) | (_, Err(e)) => return CriterionReport::errored("3", name, e),
                };
                w.see(r, || format!("H={h} t={t} tau={tau}"));
            }
        }
    }
    CriterionReport::at_most("3", name, w.value, TOL_INC_FORMS, w.detail())
}

pub fn criterion_etamsd(s: &Subject) -> CriterionReport {
    let name = "rlfbm_etamsd vs time-averaged quadrature";
    let mut w = Worst::default();
    for h in [0.25, 0.75] {
        for tau in [0.1, 1.0] {
            for horizon in [100.0, 20000.0] {
                let q = match quad_etamsd(h, tau, horizon) {
                    Ok(q) => q,
                    Err(e) => return CriterionReport::errored("4a", name, e),
                };
                w.see(rel((s.rlfbm_etamsd)(h, tau, horizon), q), || {
                    format!("H={h} tau={tau} T={horizon}")
                });
            }
        }
    }
    CriterionReport::at_most("4a", name, w.value, TOL_ETAMSD, w.detail())
}

pub fn criterion_half_identity(s: &Subject) -> CriterionReport {
    let mut w = Worst::default();
    for tau in [0.1, 1.0, 7.0] {
        for horizon in [10.0, 100.0, 20000.0] {
            w.see(rel((s.rlfbm_etamsd)(0.5, tau, horizon), tau), || format!("tau={tau} T={horizon}"));
        }
    }
    CriterionReport::at_most("4b", "E[TAMSD] = tau at H = 1/2", w.value, TOL_HALF_IDENTITY, w.detail())
}

pub fn criterion_prefactor(s: &Subject) -> CriterionReport {
    let name = "TAMSD/tau^2H vs C(0.25)";
    let (h, tau, horizon) = (0.25, 0.1, 20000.0);
    let c = match rl_prefactor_ref(h) {
        Ok(c) => c,
        Err(e) => return CriterionReport::errored("5", name, e),
    };
    let ratio = (s.rlfbm_etamsd)(h, tau, horizon) / tau.powf(2.0 * h);
    CriterionReport::at_most("5", name, rel(ratio, c), TOL_PREFACTOR, format!("ratio {ratio:.6} C {c:.6}"))
}

/// Largest exact-vs-asymptote deviation over the twelve figure panels.
pub fn criterion_figures() -> CriterionReport {
    let name = "figure panels, exact vs asymptote";
    let mut w = Worst::default();
    for panel in preset_names() {
        let cfg = preset(&panel).expect("listed preset");
        let out = match compute(&cfg) {
            Ok(o) => o,
            Err(e) => return CriterionReport::errored("6", name, e),
        };
        let regime = regime_label(cfg.regime.expect("presets set a regime"));
        let stat = if cfg.times.is_empty() { "etamsd" } else { "cov" };
        for label in ["fbmre", "rlfbmre"] {
            let ex = out.curve(&format!("{label}_{stat}_exact"));
            let asym = out.curve(&format!("{label}_{stat}_asymptote_{regime}"));
            let (Some(ex), Some(asym)) = (ex, asym) else {
                return CriterionReport::errored("6", name, format!("{panel}: missing {label} curves"));
            };
            for (a, b) in ex.points.iter().zip(&asym.points) {
                w.see(rel(b.value, a.value), || format!("{panel} {label} x={:.3e}", a.abscissa));
            }
        }
    }
    CriterionReport::at_most("6", name, w.value, TOL_FIGURE, w.detail())
}

pub fn criterion_slopes() -> Vec<CriterionReport> {
    let hurst = HurstModel::two_point(0.25, 0.75, 0.5).expect("valid law");
    let tau = 0.1;
    let ts: Vec<f64> = crate::figures::logspace(1e-4 * tau, 1e-3 * tau, 21);
    let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let slope = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let ly: Vec<f64> = ts.iter().map(|&t| f(t).ln()).collect();
        Ok(linear_fit(&lx, &ly)?.slope)
    };
    let mut out = Vec::new();
    for (id, name, target, f) in [
        ("9a", "RL FBMRE short-ratio cov slope = H1+1/2", 0.75, &(|t| rlfbmre_cov(&hurst, t, tau)) as &dyn Fn(f64) -> f64),
        ("9b", "FBMRE short-ratio cov slope = 1", 1.0, &|t| fbmre_cov(&hurst, t, tau)),
    ] {
        out.push(match slope(f) {
            Ok(s) => CriterionReport::at_most(id, name, (s - target).abs(), TOL_SLOPE, format!("slope {s:.4}")),
            Err(e) => CriterionReport::errored(id, name, e),
        });
    }
    out
}

fn fidelity_spec(kind: ProcessKind) -> ProcessSpec {
    ProcessSpec::new(kind, HurstModel::two_point(0.25, 0.75, 0.5).expect("valid law"))
}

pub const FIDELITY_PATHS: usize = 2000;
pub const FIDELITY_N: usize = 1024;
pub const FIDELITY_DT: f64 = 0.01;
pub const EMSD_INDICES: [usize; 10] = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1024];
pub const TAMSD_LAGS: [usize; 8] = [1, 2, 4, 8, 16, 32, 64, 128];
pub const INC_PAIRS: [(usize, usize); 10] = [
    (0, 1),
    (1, 1),
    (10, 1),
    (100, 1),
    (1000, 1),
    (0, 10),
    (10, 10),
    (100, 10),
    (500, 50),
    (900, 100),
];

/// The two 2000-path ensembles behind criterion 7, FBMRE first.
pub fn fidelity_ensembles() -> Result<[Ensemble; 2]> {
    let grid = TimeGrid::new(FIDELITY_N, FIDELITY_DT)?;
    let make = |kind| {
        let spec = fidelity_spec(kind);
        let sampler = Sampler::new(&spec, grid, Method::Cholesky)?;
        par_ensemble(&spec, grid, FIDELITY_PATHS, SEED_FIDELITY, &sampler)
    };
    Ok([make(ProcessKind::Fbm)?, make(ProcessKind::RlFbm)?])
}

fn z(value: f64, stderr: Option<f64>, target: f64) -> f64 {
    match stderr {
        Some(se) if se > 0.0 => (value - target).abs() / se,
        _ => f64::INFINITY,
    }
}

pub fn criterion_emsd(ens: &[Ensemble; 2]) -> CriterionReport {
    let name = "emsd vs p t^2H1 + (1-p) t^2H2";
    let mut w = Worst::default();
    for e in ens {
        let curve = match emsd(e, &EMSD_INDICES) {
            Ok(c) => c,
            Err(err) => return CriterionReport::errored("7a", name, err),
        };
        for p in &curve.points {
            let t = p.abscissa;
            let want = 0.5 * t.powf(0.5) + 0.5 * t.powf(1.5);
            w.see(z(p.value, p.stderr, want), || format!("{} t={t}", e.spec.label()));
        }
    }
    CriterionReport::at_most("7a", name, w.value, SE_EMSD, format!("max |z|, {}", w.detail()))
}

pub fn criterion_tamsd(ens: &Ensemble) -> CriterionReport {
    let (id, name) = match ens.spec.kind {
        ProcessKind::Fbm => ("7b", "mean TAMSD vs fbmre_etamsd"),
        ProcessKind::RlFbm => ("7c", "mean TAMSD vs rlfbmre_etamsd"),
    };
    let curve = match mean_tamsd(ens, &TAMSD_LAGS) {
        Ok(c) => c,
        Err(e) => return CriterionReport::errored(id, name, e),
    };
    let horizon = ens.grid.horizon();
    let mut w = Worst::default();
    for p in &curve.points {
        let tau = p.abscissa;
        let want = match ens.spec.kind {
            ProcessKind::Fbm => fbmre_etamsd(&ens.spec.hurst, tau),
            ProcessKind::RlFbm => rlfbmre_etamsd(&ens.spec.hurst, tau, horizon),
        };
        w.see(z(p.value, p.stderr, want), || format!("tau={tau}"));
    }
    CriterionReport::at_most(id, name, w.value, SE_TAMSD, format!("max |z|, {}", w.detail()))
}

pub fn criterion_inc_sm(ens: &[Ensemble; 2]) -> CriterionReport {
    let name = "increment second moment vs analytic";
    let mut w = Worst::default();
    for e in ens {
        for (i, k) in INC_PAIRS {
            let got = inc_sm_hat(e, i, k);
            let want = exact(&e.spec, Stat::IncSm, e.grid.t(i), e.grid.t(k), None);
            let (p, want) = match (got, want) {
                (Ok(p), Ok(v)) => (p, v),
                (Err(err), _) | (_, Err(err)) => return CriterionReport::errored("7d", name, err),
            };
            w.see(z(p.value, p.stderr, want), || format!("{} i={i} k={k}", e.spec.label()));
        }
    }
    CriterionReport::at_most("7d", name, w.value, SE_INC_SM, format!("max |z|, {}", w.detail()))
}

fn eb_at(spec: &ProcessSpec, n: usize, dt: f64, paths: usize, seed: u64) -> Result<f64> {
    let grid = TimeGrid::new(n, dt)?;
    let sampler = Sampler::new(spec, grid, Method::Auto)?;
    let d = map_paths(spec, grid, paths, seed, &sampler, |t| tamsd(t, 1))?;
    eb_from_samples(&d)
}

pub const EB_FBM_PATHS: usize = 1000;
pub const EB_FBMRE_PATHS: usize = 4000;

pub fn criterion_eb_decay() -> CriterionReport {
    let name = "FBM H=0.7 EB decay from n=2^10 to 2^14";
    let spec = ProcessSpec::new(ProcessKind::Fbm, HurstModel::deterministic(0.7).expect("valid"));
    match (
        eb_at(&spec, 1 << 10, 1.0, EB_FBM_PATHS, SEED_EB),
        eb_at(&spec, 1 << 14, 1.0, EB_FBM_PATHS, SEED_EB + 1),
    ) {
        (Ok(a), Ok(b)) => CriterionReport::new(
            "8a",
            name,
            a / b,
            Bound::AtLeast,
            EB_DECAY_FACTOR,
            format!("EB {a:.3e} -> {b:.3e}"),
        ),
        (Err(e), _) | (_, Err(e)) => CriterionReport::errored("8a", name, e),
    }
}

pub fn criterion_eb_plateau() -> CriterionReport {
    let name = "FBMRE EB at n=2^14 vs mixture plateau";
    let (p, tau) = (0.5, 0.1f64);
    let spec = fidelity_spec(ProcessKind::Fbm);
    let a = tau.powf(0.5);
    let b = tau.powf(1.5);
    let plateau = (p * a * a + (1.0 - p) * b * b) / (p * a + (1.0 - p) * b).powi(2) - 1.0;
    match eb_at(&spec, 1 << 14, tau, EB_FBMRE_PATHS, SEED_EB + 2) {
        Ok(eb) => CriterionReport::at_most(
            "8b",
            name,
            rel(eb, plateau),
            TOL_EB_PLATEAU,
            format!("EB {eb:.4} plateau {plateau:.4}"),
        ),
        Err(e) => CriterionReport::errored("8b", name, e),
    }
}

/// Criteria that need no simulation.
pub fn fast_criteria(s: &Subject) -> Vec<CriterionReport> {
    let mut v = vec![
        criterion_hyp2f1(s),
        criterion_rl_cov(s),
        criterion_inc_forms(s),
        criterion_etamsd(s),
        criterion_half_identity(s),
        criterion_prefactor(s),
        criterion_figures(),
    ];
    v.extend(criterion_slopes());
    v
}

pub fn monte_carlo_criteria() -> Vec<CriterionReport> {
    let mut v = match fidelity_ensembles() {
        Ok(ens) => vec![
            criterion_emsd(&ens),
            criterion_tamsd(&ens[0]),
            criterion_tamsd(&ens[1]),
            criterion_inc_sm(&ens),
        ],
        Err(e) => vec![CriterionReport::errored("7", "Monte Carlo fidelity", e)],
    };
    v.push(criterion_eb_decay());
    v.push(criterion_eb_plateau());
    v
}

pub fn run_verify(level: Level, subject: &Subject) -> VerifyReport {
    let mut criteria = fast_criteria(subject);
    if level == Level::Full {
        criteria.extend(monte_carlo_criteria());
    }
    criteria.sort_by(|a, b| a.id.cmp(&b.id));
    VerifyReport {
        level,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}
