use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["dgsim"];
    argv.extend_from_slice(args);
    dgsim::run(argv)
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn overlap_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("overlap_D1.cfg");
    assert_eq!(run(&["overlap", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]), 0);
    let r = report(tmp.path());
    assert_eq!(r["command"], "overlap");
    assert_eq!(r["config"]["D"], 1.0);
    assert_eq!(r["config"]["grid"]["n"], 4096);
    let numeric = r["result"]["overlap"]["numeric"].as_f64().unwrap();
    let analytic = r["result"]["overlap"]["analytic"].as_f64().unwrap();
    assert!((numeric - 0.7549397).abs() < 1e-6);
    assert!((analytic - 0.754939708714).abs() < 1e-12);
    let csv = std::fs::read_to_string(tmp.path().join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,numeric,gap,pre_gauge_overlap"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn missing_config_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.cfg");
    assert_eq!(run(&["overlap", "--config", missing.to_str().unwrap()]), 2);
    assert_eq!(run(&["overlap", "--config"]), 2);
    assert_eq!(run(&["overlap"]), 2);
    assert_eq!(run(&["teleport", "--config", "x.cfg"]), 2);
}

#[test]
fn invalid_configs_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out = out.to_str().unwrap();
    for (name, body) in [
        ("n.cfg", "D = 1\n[grid]\nn = 1000\n"),
        ("window.cfg", "D = 1\n[potential]\nkind = \"gaussian\"\nheight = 1.0\nwidth = 1.0\nt_on = 2.0\nt_off = 1.0\n"),
        ("unknown.cfg", "D = 1\nwidth = 3\n"),
        ("missing.cfg", "dt = 0.01\n"),
        ("type.cfg", "D = \"large\"\n"),
    ] {
        let cfg = write(tmp.path(), name, body);
        assert_eq!(run(&["evolve", "--config", &cfg, "--out", out]), 2, "{name}");
    }
    assert!(!Path::new(out).exists());
}

#[test]
fn experiment_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    // two-plateau state needs D > 0
    let cfg = write(tmp.path(), "c.cfg", "D = 0\n[grid]\nn = 256\n");
    let out = tmp.path().join("out");
    assert_eq!(run(&["conservation", "--config", &cfg, "--out", out.to_str().unwrap()]), 1);
}

#[test]
fn linear_gauge_is_bit_identical_to_linear_dynamics() {
    let tmp = tempfile::tempdir().unwrap();
    let base = "D = 0\ndt = 1e-3\nt_final = 0.5\nseed = 7\n[grid]\nn = 512\n\
                [potential]\nkind = \"harmonic\"\nomega = 1.0\nt_on = 0.1\n[evolve]\nk0 = 1.5\ncenter = -1.0\n";
    let dg = write(tmp.path(), "dg.cfg", &format!("{base}dynamics = \"dg\"\n"));
    let lin = write(tmp.path(), "lin.cfg", &format!("{base}dynamics = \"linear\"\n"));
    let (a, b) = (tmp.path().join("dg"), tmp.path().join("lin"));
    assert_eq!(run(&["evolve", "--config", &dg, "--out", a.to_str().unwrap()]), 0);
    assert_eq!(run(&["evolve", "--config", &lin, "--out", b.to_str().unwrap()]), 0);
    for f in ["initial.csv", "final.csv"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(ra["result"]["norm_final"], rb["result"]["norm_final"]);
    assert_eq!(ra["result"]["mean_x_final"], rb["result"]["mean_x_final"]);
}

#[test]
fn reports_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "g.cfg",
        "D = 0.5\nseed = 11\nout_dir = \"unused\"\n[grid]\nn = 256\nx_min = -16.0\nx_max = 16.0\n[gpvm]\nstates = 3\n",
    );
    let out = tmp.path().join("out");
    let files = || ["report.json", "probabilities.csv"].map(|f| std::fs::read(out.join(f)).unwrap());
    assert_eq!(run(&["gpvm-check", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let first = files();
    assert_eq!(run(&["gpvm-check", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    assert_eq!(first, files());
}

#[test]
fn infinite_endpoints_survive_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "g.cfg", "D = 1\n[grid]\nn = 256\nx_min = -16.0\nx_max = 16.0\n[gpvm]\nstates = 2\n");
    let out = tmp.path().join("out");
    assert_eq!(run(&["gpvm-check", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let r = report(&out);
    let edges = r["config"]["gpvm"]["edges"].as_array().unwrap();
    assert_eq!(edges.first().unwrap(), "-inf");
    assert_eq!(edges.last().unwrap(), "inf");
    assert_eq!(r["config"]["gpvm"]["conservation_set"]["b"], "inf");
    // the embedded config parses back into the same run
    let back: dgsim::RunConfig = serde_json::from_value(r["config"].clone()).unwrap();
    assert_eq!(back.gpvm.edges[0], f64::NEG_INFINITY);
    assert_eq!(back.gpvm.conservation_set.b, f64::INFINITY);
    let csv = std::fs::read_to_string(out.join("probabilities.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("-inf,"));
}

#[test]
fn binary_reports_summary_and_thread_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("mixture_D1.cfg");
    let out = tmp.path().join("out");
    let ok = Command::new(env!("CARGO_BIN_EXE_dgsim"))
        .args(["mixture", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("DGSIM_THREADS", "1")
        .output()
        .unwrap();
    assert!(ok.status.success());
    let stdout = String::from_utf8(ok.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.starts_with("mixture: D=1"), "{stdout}");
    assert!(out.join("mixture.csv").exists());

    let bad = Command::new(env!("CARGO_BIN_EXE_dgsim"))
        .args(["mixture", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("DGSIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8(bad.stderr).unwrap().contains("DGSIM_THREADS"));
}

#[test]
fn every_checked_in_config_parses() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            dgsim::parse_config(&path).unwrap_or_else(|e| panic!("{e}"));
            n += 1;
        }
    }
    assert!(n >= 13);
}
