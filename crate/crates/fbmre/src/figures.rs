//! The twelve reference panels as ready-made configurations.
//!
//! All panels use a two-point law with H₁ = 0.25 and H₂ = 0.75, τ = 0.1 and
//! T = 20000. Figures 1 and 2 plot the autocovariance against t for
//! t/τ ∈ [1e-5, 1e-2] and [1e2, 1e5]; figures 3 and 4 plot the expected TAMSD
//! against τ ∈ [1e-5, 1e-3] and [10, 100]. Panels are named `fig<F>-p<PP>`
//! with p = 0.1, 0.5, 0.9.

use std::collections::BTreeSet;

use fbmre_core::{HurstModel, Regime, TimeGrid};

use crate::config::{ExperimentConfig, KindChoice, Lag, ProcessConfig, Statistic};
use crate::ensemble::Method;

pub const H1: f64 = 0.25;
pub const H2: f64 = 0.75;
pub const TAU: f64 = 0.1;
pub const HORIZON: f64 = 20000.0;
pub const PS: [f64; 3] = [0.1, 0.5, 0.9];
pub const POINTS: usize = 25;

/// `m` points spaced evenly in log10 between `lo` and `hi`, both included.
pub fn logspace(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..m)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == m => hi,
            _ => 10f64.powf(a + (b - a) * i as f64 / (m - 1) as f64),
        })
        .collect()
}

fn p_tag(p: f64) -> String {
    format!("p{:02}", (p * 10.0).round() as u32)
}

/// Every preset name in figure order.
pub fn preset_names() -> Vec<String> {
    (1..=4)
        .flat_map(|f| PS.iter().map(move |&p| format!("fig{f}-{}", p_tag(p))))
        .collect()
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let (fig, tag) = name.split_once('-')?;
    let p = *PS.iter().find(|&&p| p_tag(p) == tag)?;
    let fig: u8 = fig.strip_prefix("fig")?.parse().ok()?;
    let (regime, times, lags, stat) = match fig {
        1 => (Regime::ShortRatio, logspace(1e-5 * TAU, 1e-2 * TAU, POINTS), vec![], Statistic::Cov),
        2 => (Regime::LongRatio, logspace(1e2 * TAU, 1e5 * TAU, POINTS), vec![], Statistic::Cov),
        3 => (Regime::ShortRatio, vec![], logspace(1e-5, 1e-3, POINTS), Statistic::Tamsd),
        4 => (Regime::LongRatio, vec![], logspace(10.0, 100.0, POINTS), Statistic::Tamsd),
        _ => return None,
    };
    Some(ExperimentConfig {
        name: name.to_owned(),
        process: ProcessConfig {
            kind: KindChoice::Both,
            hurst: HurstModel::two_point(H1, H2, p).expect("valid preset law"),
        },
        grid: TimeGrid::new(1024, HORIZON / 1024.0).expect("valid preset grid"),
        ensemble_size: 0,
        master_seed: 0,
        lags: lags.into_iter().map(Lag::Time).collect(),
        times,
        statistics: BTreeSet::from([stat, Statistic::AnalyticOverlay, Statistic::AsymptoteOverlay]),
        output_path: None,
        horizon: Some(HORIZON),
        tau: Some(TAU),
        regime: Some(regime),
        method: Method::Auto,
    })
}
