use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use superengine_cli::config::{parse_str, BranchName, RunConfig, ShapeName};

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superengine"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

const PULSE_CFG: &str = "N = 60\ngamma_down = 0.01\nT = -0.5\n";

#[test]
fn pulse_then_fit_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), PULSE_CFG).unwrap();
    let o = bin(&["pulse", "--config", "run.toml", "--out", "a", "--quiet"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let a = dir.path().join("a");
    let exact = read(&a.join("exact.csv"));
    assert!(exact.starts_with("t,jz,jpjm,jmjp,trace,energy,intensity\n"));
    assert!(read(&a.join("mean_field.csv")).starts_with("t,intensity,sx,sy,sz\n"));
    let cmp: serde_json::Value = serde_json::from_str(&read(&a.join("comparison.json"))).unwrap();
    assert!(cmp["comparison"]["peak_rel_err"].as_f64().unwrap() < 0.25);
    let tau = cmp["mean_field"]["params"]["tau"].as_f64().unwrap();

    let o = bin(&["fit", "a/exact.csv", "--out", "b"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fit: serde_json::Value = serde_json::from_str(&read(&dir.path().join("b/fit.json"))).unwrap();
    let tau_fit = fit["fit"]["tau_fit"].as_f64().unwrap();
    assert!((tau_fit / tau - 1.0).abs() < 0.2, "{tau_fit} vs {tau}");
    assert!(fit["fit"]["I0"].as_f64().unwrap() > 0.0);
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["r1", "r2"] {
        let o = bin(
            &[
                "cycle",
                "--set",
                "N=20",
                "--set",
                "gamma_down=0.01",
                "--set",
                "T=0.5",
                "--set",
                "n_cycles=2",
                "--out",
                out,
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in [
        "cycles.csv",
        "intensity.csv",
        "report.json",
        "config.toml",
        "cycle1_abs.csv",
        "cycle2_em.csv",
    ] {
        assert_eq!(
            read(&dir.path().join("r1").join(f)),
            read(&dir.path().join("r2").join(f)),
            "{f}"
        );
    }
    let report: serde_json::Value = serde_json::from_str(&read(&dir.path().join("r1/report.json"))).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 2);
    assert!(report["records"][1]["W_em"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_over_n_writes_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "N = 20\ngamma_down = 0.01\nT = 0.5\nn_cycles = 2\nsweep_axis = \"N\"\nsweep_grid = [10, 20, 40]\n";
    fs::write(dir.path().join("s.toml"), cfg).unwrap();
    let o = bin(&["sweep", "--config", "s.toml", "--out", "s"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = dir.path().join("s");
    assert!(read(&s.join("sweep.csv")).starts_with("N,eta,power,valid,error\n"));
    let fit: serde_json::Value = serde_json::from_str(&read(&s.join("scaling.json"))).unwrap();
    let b = fit["exponent"].as_f64().unwrap();
    assert!((1.5..2.3).contains(&b), "{b}");
}

#[test]
fn errors_are_json_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.toml"), "").unwrap();
    let o = bin(&["pulse", "--config", "empty.toml"], dir.path());
    assert!(!o.status.success());
    let err: serde_json::Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(err["error"], "missing_fields");
    for f in ["n_emitters", "gamma_down", "temperature"] {
        assert!(err["message"].as_str().unwrap().contains(f));
    }

    let o = bin(
        &["cycle", "--set", "N=4", "--set", "gamma_down=0.01", "--set", "T=-0.5"],
        dir.path(),
    );
    assert!(!o.status.success());
    let err: serde_json::Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(err["error"], "invalid_parameter");

    let o = bin(&["fit", "missing.csv"], dir.path());
    let err: serde_json::Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(err["error"], "io");
}

#[test]
fn unknown_subcommand_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["launch"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn validity_warning_reaches_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(
        &[
            "cycle",
            "--set",
            "N=6",
            "--set",
            "gamma_down=0.01",
            "--set",
            "T=0.5",
            "--set",
            "x=20",
            "--set",
            "n_cycles=1",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    (
        1usize..500,
        1e-4f64..1.0,
        prop_oneof![-5.0f64..-0.01, 0.01f64..5.0],
        proptest::option::of(0.01f64..10.0),
        proptest::option::of(prop_oneof![Just(BranchName::Emission), Just(BranchName::Absorption)]),
        prop_oneof![Just(ShapeName::Smooth), Just(ShapeName::Hard)],
        proptest::collection::vec(0.001f64..100.0, 0..5),
        1usize..10,
    )
        .prop_map(|(n, gd, t, tau, branch, shape, grid, cycles)| {
            let mut c = RunConfig::new(n, gd, t);
            c.tau_switch = tau;
            c.branch = branch;
            c.pump_shape = shape;
            c.sweep_grid = grid;
            c.n_cycles = cycles;
            c
        })
}

proptest! {
    #[test]
    fn config_round_trips(cfg in arb_config()) {
        prop_assert_eq!(parse_str(&cfg.emit(), "emit", &[]).unwrap(), cfg);
    }
}
