use std::fs;

use fbmre::config::ExperimentConfig;
use fbmre::experiment::{compute, run_experiment};
use fbmre::figures::preset;
use fbmre::output::{read_csv, Manifest, MANIFEST_FILE};

const SIM: &str = r#"{
    "name": "small",
    "process": { "kind": "both", "hurst": { "kind": "two_point", "h1": 0.25, "h2": 0.75, "p": 0.5 } },
    "grid": { "n": 64, "dt": 0.05 },
    "ensemble_size": 200,
    "master_seed": 11,
    "lags": [1, 2, 4, 0.4],
    "times": [0.1, 0.5, 1.0],
    "tau": 0.1,
    "T": 3.2,
    "statistics": ["emsd", "tamsd", "cov", "inc_sm", "eb", "analytic-overlay"]
}"#;

#[test]
fn simulation_is_byte_identical_across_runs() {
    let cfg = ExperimentConfig::from_json(SIM).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_experiment(&cfg, a.path()).unwrap();
    run_experiment(&cfg, b.path()).unwrap();
    assert!(ra.manifest.simulated);
    let csvs: Vec<_> = ra.written.iter().filter(|p| p.extension().unwrap() == "csv").collect();
    // five estimators and five overlays for each of two processes
    assert_eq!(csvs.len(), 20);
    for p in csvs {
        let name = p.file_name().unwrap();
        assert_eq!(fs::read(p).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name:?}");
    }
}

#[test]
fn monte_carlo_curves_carry_standard_errors() {
    let cfg = ExperimentConfig::from_json(SIM).unwrap();
    let out = compute(&cfg).unwrap();
    let emsd = out.curve("rlfbmre_emsd_mc").unwrap();
    assert_eq!(emsd.len(), 3);
    assert!(emsd.points.iter().all(|p| p.stderr.unwrap() > 0.0));
    let tamsd = out.curve("fbmre_tamsd_mc").unwrap();
    let taus: Vec<f64> = tamsd.points.iter().map(|p| p.abscissa).collect();
    assert_eq!(taus, vec![0.05, 0.1, 0.2, 0.4]);
    assert!(out.curve("fbmre_eb_plateau").is_some());
    assert!(out.curve("fbmre_eb_mc").unwrap().points.iter().all(|p| p.stderr.is_none()));
}

#[test]
fn analytic_only_mode_skips_simulation() {
    let mut v: serde_json::Value = serde_json::from_str(SIM).unwrap();
    v["ensemble_size"] = 0.into();
    v["statistics"] = serde_json::json!(["cov", "tamsd", "analytic-overlay"]);
    let cfg = ExperimentConfig::from_json(&v.to_string()).unwrap();
    let out = compute(&cfg).unwrap();
    assert!(!out.simulated);
    let names: Vec<&str> = out.files.iter().map(|f| f.file.as_str()).collect();
    assert_eq!(
        names,
        ["fbmre_etamsd_exact.csv", "fbmre_cov_exact.csv", "rlfbmre_etamsd_exact.csv", "rlfbmre_cov_exact.csv"]
    );
}

#[test]
fn manifest_round_trips_to_config() {
    let cfg = preset("fig2-p09").unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg, dir.path()).unwrap();
    let m = Manifest::load(&dir.path().join(MANIFEST_FILE)).unwrap();
    assert_eq!(m.config, cfg);
    assert_eq!(m.library_version, env!("CARGO_PKG_VERSION"));
    assert!(m.wall_time_seconds >= 0.0);
    let text = serde_json::to_string(&m.config).unwrap();
    assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
}

#[test]
fn figure_one_middle_panel_has_three_files() {
    let cfg = preset("fig1-p05").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let run = run_experiment(&cfg, dir.path()).unwrap();
    let mut files: Vec<String> = run
        .written
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    files.sort();
    assert_eq!(
        files,
        ["cov_asymptote_short.csv", "fbmre_cov_exact.csv", "manifest.json", "rlfbmre_cov_exact.csv"]
    );
    let asym = read_csv(&dir.path().join("cov_asymptote_short.csv")).unwrap();
    let names: Vec<&str> = asym.iter().map(|c| c.stat_name.as_str()).collect();
    assert_eq!(names, ["fbmre_cov_asymptote_short", "rlfbmre_cov_asymptote_short"]);
    let exact = read_csv(&dir.path().join("fbmre_cov_exact.csv")).unwrap();
    assert_eq!(exact[0].len(), 25);
    for (e, a) in exact[0].points.iter().zip(&asym[0].points) {
        assert_eq!(e.abscissa, a.abscissa);
        assert!(((a.value - e.value) / e.value).abs() < 1e-6);
    }
}

#[test]
fn tamsd_panels_carry_leading_terms() {
    let out = compute(&preset("fig4-p05").unwrap()).unwrap();
    let lead = out.curve("rlfbmre_etamsd_leading_long").unwrap();
    let all = out.curve("rlfbmre_etamsd_asymptote_long").unwrap();
    for (l, a) in lead.points.iter().zip(&all.points) {
        assert!(l.value < a.value);
    }
}
