use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fbmre::config::ExperimentConfig;
use fbmre::experiment::{resolve_out_dir, run_experiment};
use fbmre::figures::{preset, preset_names};
use fbmre::output::OUT_DIR_ENV;
use fbmre::verify::{run_verify, Level, Subject};
use fbmre_core::hurst::Tabulated;
use fbmre_core::randomized::{exact, mixture_asymptotic};
use fbmre_core::{HurstModel, MixtureStat, ProcessKind, ProcessSpec, Regime, Stat};

#[derive(Parser)]
#[command(version, about = "FBM and Riemann-Liouville FBM with a random Hurst exponent")]
struct Cli {
    /// Worker threads for ensemble generation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one closed-form statistic
    Analytic(AnalyticArgs),
    /// Run an experiment described by a JSON config
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's master seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
    /// Reproduce a figure panel, e.g. fig1-p05, or `all`
    Figure {
        preset: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite
    Verify {
        /// fast or full
        level: Level,
        /// Also write verify_report.json into this directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the report as JSON instead of one line per criterion
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    SecondMoment,
    Cov,
    Etamsd,
    IncSm,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Fbm,
    RlFbm,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Short,
    Long,
}

#[derive(clap::Args)]
struct AnalyticArgs {
    #[arg(long, value_enum)]
    stat: StatArg,
    #[arg(long, value_enum, default_value = "fbm")]
    process: KindArg,
    /// `0.3`, `two-point:0.25,0.75,0.5` or `uniform:0.2,0.8,101`
    #[arg(long, value_parser = parse_hurst)]
    hurst: HurstModel,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Observation horizon T of the TAMSD
    #[arg(long = "horizon")]
    horizon: Option<f64>,
    /// Evaluate the two-point asymptote in this regime instead
    #[arg(long, value_enum)]
    asymptote: Option<RegimeArg>,
}

fn parse_hurst(s: &str) -> Result<HurstModel, String> {
    let nums = |rest: &str| -> Result<Vec<f64>, String> {
        rest.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x}: {e}")))
            .collect()
    };
    let model = match s.split_once(':') {
        None => HurstModel::deterministic(s.parse().map_err(|e| format!("{s}: {e}"))?),
        Some(("two-point", rest)) => match nums(rest)?[..] {
            [h1, h2, p] => HurstModel::two_point(h1, h2, p),
            _ => return Err("two-point takes h1,h2,p".into()),
        },
        Some(("uniform", rest)) => match nums(rest)?[..] {
            [lo, hi, n] if n >= 2.0 && n.fract() == 0.0 => {
                Tabulated::uniform(lo, hi, n as usize).map(HurstModel::Tabulated)
            }
            _ => return Err("uniform takes lo,hi,n with integer n >= 2".into()),
        },
        Some((other, _)) => return Err(format!("unknown Hurst law `{other}`")),
    };
    model.map_err(|e| e.to_string())
}

fn analytic(a: &AnalyticArgs) -> Result<f64> {
    let kind = match a.process {
        KindArg::Fbm => ProcessKind::Fbm,
        KindArg::RlFbm => ProcessKind::RlFbm,
    };
    let stat = match a.stat {
        StatArg::SecondMoment => Stat::SecondMoment,
        StatArg::Cov => Stat::Cov,
        StatArg::Etamsd => Stat::Etamsd,
        StatArg::IncSm => Stat::IncSm,
    };
    let spec = ProcessSpec::new(kind, a.hurst.clone());
    let v = match a.asymptote {
        None => exact(&spec, stat, a.t, a.tau, a.horizon)?,
        Some(r) => {
            let regime = match r {
                RegimeArg::Short => Regime::ShortRatio,
                RegimeArg::Long => Regime::LongRatio,
            };
            mixture_asymptotic(MixtureStat::new(stat, kind, regime), &spec.hurst, a.t, a.tau, a.horizon)?
        }
    };
    Ok(v)
}

fn run_config(mut cfg: ExperimentConfig, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    let dir = resolve_out_dir(out, &cfg);
    let summary = run_experiment(&cfg, &dir)?;
    for p in &summary.written {
        println!("{}", p.display());
    }
    eprintln!(
        "{}: {} curves in {:.2}s",
        cfg.name,
        summary.manifest.curves.len(),
        summary.manifest.wall_time_seconds
    );
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Analytic(a) => println!("{}", fbmre::output::fmt_f64(analytic(&a)?)),
        Command::Simulate { config, seed, out } => {
            run_config(ExperimentConfig::load(&config)?, seed, out.as_deref())?
        }
        Command::Figure { preset: name, seed, out } => {
            let names = if name == "all" { preset_names() } else { vec![name] };
            for n in names {
                let Some(cfg) = preset(&n) else {
                    bail!("unknown preset `{n}`; expected one of {}", preset_names().join(", "));
                };
                let out = out.as_ref().map(|d| d.join(&n));
                run_config(cfg, seed, out.as_deref())?;
            }
        }
        Command::Verify { level, out, json } => {
            let report = run_verify(level, &Subject::library());
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for c in &report.criteria {
                    println!("{c}");
                }
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("verify_report.json"), serde_json::to_string_pretty(&report)?)?;
            }
            if !report.passed {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
