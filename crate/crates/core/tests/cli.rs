use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vlc-secrecy")).args(args).output().unwrap()
}

fn value(stdout: &str, section: &str, key: &str) -> f64 {
    let body = stdout.split(&format!("[{section}]")).nth(1).unwrap();
    let line = body.lines().find(|l| l.starts_with(&format!("{key} = "))).unwrap();
    line.split(" = ").nth(1).unwrap().parse().unwrap()
}

#[test]
fn missing_config_exits_with_one() {
    let out = run(&["sweep", "--config", "/no/such/file.cfg", "--out", "/tmp/never.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/file.cfg"));
}

#[test]
fn unknown_flag_prints_usage_and_exits_with_one() {
    let out = run(&["sweep", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn bad_config_value_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "sim.trials = 0\n").unwrap();
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn absent_eavesdropper_gives_matching_zf_and_sdr_rates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("blind.cfg");
    std::fs::write(&cfg, "geometry.eavesdropper = false\nqos.r_th = 1\n").unwrap();
    let out = run(&["solve", "--config", cfg.to_str().unwrap(), "--method", "sdr,zf"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let (sdr, zf) = (value(&text, "sdr", "secrecy_rate"), value(&text, "zf", "secrecy_rate"));
    assert!((sdr - zf).abs() <= 1e-3, "{sdr} vs {zf}");
}

#[test]
fn sweep_writes_csv_and_plot_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    std::fs::write(&cfg, "sweep.variable = d_d\nsweep.values = 4, 6\n").unwrap();
    let csv = dir.path().join("s.csv");
    let svg = dir.path().join("s.svg");
    let args = [
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
        "--trials",
        "5",
        "--method",
        "zf",
        "--seed",
        "9",
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let first = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(first.lines().count(), 3);
    assert!(first.lines().skip(1).all(|l| l.contains(",zf,")));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
    assert_eq!(run(&args).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), first);
}

#[test]
fn oracle_reports_the_largest_gap() {
    let out = run(&["oracle", "--instances", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let gap: f64 = text.lines().last().unwrap().rsplit(" = ").next().unwrap().parse().unwrap();
    assert!(gap <= 1e-2);
}
