//! Runs an [`ExperimentConfig`]: simulation when an estimator is requested,
//! analytic and asymptotic overlays on the same abscissas, then one CSV per
//! curve (asymptotes grouped per statistic) and a manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use fbmre_core::estimate::{eb_parameter, emsd, inc_sm_hat, mean_tamsd, sample_cov_point};
use fbmre_core::randomized::{
    eb_plateau, exact, fbmre_etamsd, mixture_asymptotic, rlfbmre_etamsd_asymptotic,
};
use fbmre_core::{
    CurvePoint, Ensemble, MixtureStat, ProcessKind, ProcessSpec, Regime, Stat, StatCurve,
};

use crate::config::{ExperimentConfig, Statistic};
use crate::ensemble::{par_ensemble, Sampler};
use crate::output::{write_run, CurveFile, Manifest, ManifestCurve, OUT_DIR_ENV};

pub fn regime_label(r: Regime) -> &'static str {
    match r {
        Regime::ShortRatio => "short",
        Regime::LongRatio => "long",
    }
}

/// Everything a run produced, before or after writing.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<CurveFile>,
    pub simulated: bool,
}

impl RunOutput {
    pub fn curve(&self, stat_name: &str) -> Option<&StatCurve> {
        self.files
            .iter()
            .flat_map(|f| &f.curves)
            .find(|c| c.stat_name == stat_name)
    }
}

struct Builder<'a> {
    cfg: &'a ExperimentConfig,
    spec: &'a ProcessSpec,
}

impl Builder<'_> {
    fn curve(&self, stat: &str, source: &str) -> StatCurve {
        let c = self.cfg;
        let mut curve = StatCurve::new(format!("{}_{stat}_{source}", self.spec.label()))
            .with_param("process", self.spec.label())
            .with_param("hurst", self.spec.hurst.name())
            .with_param("source", source)
            .with_param("T", c.horizon());
        if let Some(tau) = c.tau {
            curve = curve.with_param("tau", tau);
        }
        if source == "mc" {
            curve = curve
                .with_param("ensemble_size", c.ensemble_size)
                .with_param("master_seed", c.master_seed)
                .with_param("n", c.grid.n)
                .with_param("dt", c.grid.dt);
        }
        curve
    }

    fn tabulate<F: FnMut(f64) -> fbmre_core::Result<f64>>(
        &self,
        mut curve: StatCurve,
        xs: &[f64],
        mut f: F,
    ) -> Result<StatCurve> {
        for &x in xs {
            let value = f(x).with_context(|| format!("{} at {x}", curve.stat_name))?;
            curve.push(CurvePoint {
                abscissa: x,
                value,
                stderr: None,
            })?;
        }
        Ok(curve)
    }

    fn lag_times(&self) -> Vec<f64> {
        self.cfg.lags.iter().map(|&l| self.cfg.lag_time(l)).collect()
    }

    fn exact_curve(&self, stat: Statistic) -> Result<Option<StatCurve>> {
        let c = self.cfg;
        let s = self.spec;
        let tau = c.tau.unwrap_or(f64::NAN);
        let horizon = Some(c.horizon());
        Ok(Some(match stat {
            Statistic::Emsd => self.tabulate(self.curve("emsd", "exact"), &c.times, |t| {
                exact(s, Stat::SecondMoment, t, 0.0, None)
            })?,
            Statistic::Tamsd => self.tabulate(self.curve("etamsd", "exact"), &self.lag_times(), |l| {
                exact(s, Stat::Etamsd, 0.0, l, horizon)
            })?,
            Statistic::Cov => self.tabulate(self.curve("cov", "exact"), &c.times, |t| {
                exact(s, Stat::Cov, t, tau, None)
            })?,
            Statistic::IncSm => self.tabulate(self.curve("inc_sm", "exact"), &c.times, |t| {
                exact(s, Stat::IncSm, t, tau, None)
            })?,
            Statistic::Eb => self.tabulate(self.curve("eb", "plateau"), &self.lag_times(), |l| {
                Ok(eb_plateau(s, l))
            })?,
            _ => return Ok(None),
        }))
    }

    fn asymptote_curves(&self, stat: Statistic, regime: Regime) -> Result<Vec<StatCurve>> {
        let c = self.cfg;
        let s = self.spec;
        let tau = c.tau.unwrap_or(f64::NAN);
        let r = regime_label(regime);
        let asym = |st: Stat| MixtureStat::new(st, s.kind, regime);
        let curve = |stat: &str, kind: &str| {
            self.curve(stat, &format!("{kind}_{r}")).with_param("regime", r)
        };
        Ok(match stat {
            Statistic::Emsd => vec![self.tabulate(curve("emsd", "asymptote"), &c.times, |t| {
                mixture_asymptotic(asym(Stat::SecondMoment), &s.hurst, t, 0.0, None)
            })?],
            Statistic::Cov => vec![self.tabulate(curve("cov", "asymptote"), &c.times, |t| {
                mixture_asymptotic(asym(Stat::Cov), &s.hurst, t, tau, None)
            })?],
            Statistic::IncSm => vec![self.tabulate(curve("inc_sm", "asymptote"), &c.times, |t| {
                mixture_asymptotic(asym(Stat::IncSm), &s.hurst, t, tau, None)
            })?],
            Statistic::Tamsd => {
                let lags = self.lag_times();
                // every component's large-T/τ form; for FBMRE this is exact
                let all = self.tabulate(curve("etamsd", "asymptote"), &lags, |l| {
                    Ok(match s.kind {
                        ProcessKind::Fbm => fbmre_etamsd(&s.hurst, l),
                        ProcessKind::RlFbm => rlfbmre_etamsd_asymptotic(&s.hurst, l),
                    })
                })?;
                let lead = self.tabulate(curve("etamsd", "leading"), &lags, |l| {
                    mixture_asymptotic(asym(Stat::Etamsd), &s.hurst, 0.0, l, Some(c.horizon()))
                })?;
                vec![all, lead]
            }
            _ => Vec::new(),
        })
    }

    fn mc_curve(&self, stat: Statistic, ens: &Ensemble) -> Result<Option<StatCurve>> {
        let c = self.cfg;
        let indices = || -> Vec<usize> {
            c.times
                .iter()
                .map(|&t| c.time_index(t).expect("validated grid time"))
                .collect()
        };
        let steps = || -> Vec<usize> {
            c.lags
                .iter()
                .map(|&l| c.lag_steps(l).expect("validated grid lag"))
                .collect()
        };
        let relabel = |mut got: StatCurve, stat: &str| {
            let named = self.curve(stat, "mc");
            got.stat_name = named.stat_name;
            got.params = named.params;
            got
        };
        Ok(Some(match stat {
            Statistic::Emsd => relabel(emsd(ens, &indices())?, "emsd"),
            Statistic::Tamsd => relabel(mean_tamsd(ens, &steps())?, "tamsd"),
            Statistic::Cov | Statistic::IncSm => {
                let k = c.tau_steps().expect("validated tau");
                let mut curve = self.curve(if stat == Statistic::Cov { "cov" } else { "inc_sm" }, "mc");
                for i in indices() {
                    let p = if stat == Statistic::Cov {
                        sample_cov_point(ens, i, i + k)?
                    } else {
                        inc_sm_hat(ens, i, k)?
                    };
                    curve.push(p)?;
                }
                curve
            }
            Statistic::Eb => {
                let mut curve = self.curve("eb", "mc");
                for k in steps() {
                    curve.push(CurvePoint {
                        abscissa: ens.grid.t(k),
                        value: eb_parameter(ens, k)?,
                        stderr: None,
                    })?;
                }
                curve
            }
            _ => return Ok(None),
        }))
    }
}

fn stat_file_label(stat: Statistic) -> &'static str {
    match stat {
        Statistic::Tamsd => "etamsd",
        other => other.label(),
    }
}

/// Computes every requested curve in memory.
pub fn compute(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let simulate = cfg.simulates();
    let specs = cfg.process.specs();
    let base: Vec<Statistic> = cfg.statistics.iter().copied().filter(|s| !s.is_overlay()).collect();
    let mut files: Vec<CurveFile> = Vec::new();
    let mut grouped: Vec<CurveFile> = Vec::new();
    for spec in &specs {
        let b = Builder { cfg, spec };
        if simulate {
            let sampler = Sampler::new(spec, cfg.grid, cfg.method)?;
            let ens = par_ensemble(spec, cfg.grid, cfg.ensemble_size, cfg.master_seed, &sampler)?;
            for &stat in &base {
                if let Some(curve) = b.mc_curve(stat, &ens)? {
                    files.push(single(curve));
                }
            }
        }
        if cfg.statistics.contains(&Statistic::AnalyticOverlay) {
            for &stat in &base {
                if let Some(curve) = b.exact_curve(stat)? {
                    files.push(single(curve));
                }
            }
        }
        if let (true, Some(regime)) = (cfg.statistics.contains(&Statistic::AsymptoteOverlay), cfg.regime) {
            for &stat in &base {
                let curves = b.asymptote_curves(stat, regime)?;
                if curves.is_empty() {
                    continue;
                }
                let file = format!("{}_asymptote_{}.csv", stat_file_label(stat), regime_label(regime));
                match grouped.iter_mut().find(|f| f.file == file) {
                    Some(f) => f.curves.extend(curves),
                    None => grouped.push(CurveFile { file, curves }),
                }
            }
        }
    }
    files.extend(grouped);
    Ok(RunOutput {
        files,
        simulated: simulate,
    })
}

fn single(curve: StatCurve) -> CurveFile {
    CurveFile {
        file: format!("{}.csv", curve.stat_name),
        curves: vec![curve],
    }
}

/// Output directory: explicit flag, then the config, then the environment,
/// then `./fbmre-out`.
pub fn resolve_out_dir(flag: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output_path.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("fbmre-out"))
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub written: Vec<PathBuf>,
    pub manifest: Manifest,
}

/// Computes and writes one experiment into `dir`.
pub fn run_experiment(cfg: &ExperimentConfig, dir: &Path) -> Result<RunSummary> {
    let start = Instant::now();
    let out = compute(cfg)?;
    let curves = out
        .files
        .iter()
        .flat_map(|f| {
            f.curves.iter().map(|c| ManifestCurve {
                file: f.file.clone(),
                stat_name: c.stat_name.clone(),
                points: c.len(),
                params: c.params.clone(),
            })
        })
        .collect();
    let manifest = Manifest {
        name: cfg.name.clone(),
        library_version: env!("CARGO_PKG_VERSION").to_owned(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        simulated: out.simulated,
        config: cfg.clone(),
        curves,
    };
    let written = write_run(dir, &out.files, &manifest)?;
    Ok(RunSummary {
        dir: dir.to_owned(),
        written,
        manifest,
    })
}
