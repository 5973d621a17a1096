use std::path::Path;
use std::process::{Command, Output};

use toml::Table;

fn rydrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydrep")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn results(o: &Output) -> Table {
    let doc: Table = stdout(o).parse().unwrap();
    doc["results"].as_table().unwrap().clone()
}

fn get(t: &Table, key: &str) -> f64 {
    match &t[key] {
        toml::Value::Float(x) => *x,
        toml::Value::Integer(i) => *i as f64,
        other => panic!("{key} = {other}"),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analytics_defaults() {
    let o = rydrep(&["analytics"]);
    assert!(o.status.success());
    let r = results(&o);
    assert!((get(&r, "p0") - 0.0100).abs() < 0.0005);
    assert!((get(&r, "p1") - 0.713).abs() < 0.005);
    assert!((get(&r, "total_time_s") - 0.32).abs() < 0.01);
    assert!((get(&r, "direct_time_n_l0_s") / 5.5e9 - 1.0).abs() < 0.1);
    let o = rydrep(&["analytics", "--p0", "0.01"]);
    assert!((get(&results(&o), "n_bar") - 455.0).abs() < 1.0);
}

#[test]
fn analytics_perfect_chain_takes_two_segments() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("perfect.toml");
    std::fs::write(&cfg, "gamma_hz = 0.0\neta_ion = 1.0\np0 = 1.0\n").unwrap();
    let csv = dir.path().join("a.csv");
    let o = rydrep(&["analytics", "--config", path(&cfg), "--out", path(&csv)]);
    assert!(o.status.success());
    assert_eq!(get(&results(&o), "total_time_s"), 2.0 * 100e3 / 2e8);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("quantity,value\n"));
    assert!(text.contains("total_time_s,1.0000000000000000e-3\n"), "{text}");
}

#[test]
fn malformed_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "n_nodes = 10\neta_ion = [1\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = rydrep(&["analytics", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert!(!out.exists());
    let o = rydrep(&["simulate", "--eta-ion", "1.5", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn unknown_flags_are_validation_errors() {
    assert_eq!(rydrep(&["simulate", "--bogus"]).status.code(), Some(1));
    assert_eq!(rydrep(&["simulate", "--mode", "slow"]).status.code(), Some(1));
}

#[test]
fn verify_passes_and_catches_a_wrong_phase() {
    let o = rydrep(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("PASS generation step xii"));
    assert!(text.ends_with("50 checks, 0 failed\n"), "{text}");
    // transmission settings play no part in the noiseless replay
    assert_eq!(rydrep(&["verify", "--l0-km", "1000"]).status.code(), Some(0));
    let o = rydrep(&["verify", "--flip-plr-sign"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL swap N=3"));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path, threads: &str| {
        rydrep(&[
            "simulate", "--trials", "2000", "--p0", "0.1", "--seed", "7", "--threads", threads, "--out", path(out),
        ])
    };
    assert!(args(&a, "1").status.success());
    assert!(args(&b, "3").status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(a.with_extension("summary.toml")).unwrap(),
        std::fs::read(b.with_extension("summary.toml")).unwrap()
    );
    let header = std::fs::read_to_string(&a).unwrap();
    assert!(header.starts_with("trial,rounds_phase1,rounds_phase2,protocol_repeats,total_time_s,end_state\n"));
    assert_eq!(header.lines().count(), 2001);
}

#[test]
fn summary_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let first = rydrep(&["simulate", "--trials", "500", "--p0", "0.2", "--n-nodes", "6", "--out", path(&a)]);
    assert!(first.status.success());
    let summary = a.with_extension("summary.toml");
    let again = rydrep(&["simulate", "--config", path(&summary), "--out", path(&b)]);
    assert!(again.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(stdout(&first), stdout(&again));
}

#[test]
fn simulate_rejects_bad_runs_before_starting() {
    assert_eq!(rydrep(&["simulate", "--trials", "0"]).status.code(), Some(1));
    let o = rydrep(&["simulate", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn simulate_link_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("link.csv");
    let o = rydrep(&["simulate", "--level", "link", "--trials", "3000", "--l0-km", "10", "--out", path(&out)]);
    assert!(o.status.success());
    let r = results(&o);
    assert!(get(&r, "z_vs_coded").abs() < 4.0);
    assert_eq!(get(&r, "trials"), 3000.0);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("round,verdict,failure_cause,elapsed_s\n"));
}

#[test]
fn simulate_chain_matches_closed_form() {
    let o = rydrep(&["simulate", "--trials", "20000", "--p0", "0.3", "--n-nodes", "8"]);
    assert!(o.status.success());
    let r = results(&o);
    assert!(get(&r, "z_rounds_per_repeat").abs() < 3.0);
    assert!(get(&r, "z_protocol_repeats").abs() < 3.0);
    assert!((get(&r, "time_ratio") - 1.0).abs() < 0.03);
}

fn read_csv(p: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn figure_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = rydrep(&["figures", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let fig3 = read_csv(&dir.path().join("fig3.csv"));
    let at_1000 = fig3.iter().find(|r| r[0] == 1000.0).unwrap();
    assert!(at_1000[2] < at_1000[1]);

    let a1 = read_csv(&dir.path().join("fig_a1.csv"));
    for p0 in [0.1, 0.2, 0.3] {
        let series: Vec<&Vec<f64>> = a1.iter().filter(|r| r[0] == p0).collect();
        let peak = series.iter().position(|r| series.iter().all(|s| s[2] <= r[2])).unwrap();
        // rises to the peak, then falls
        assert!(series[..=peak].windows(2).all(|w| w[0][2] <= w[1][2]));
        assert!(series[peak..].windows(2).all(|w| w[0][2] >= w[1][2]));
        let predicted = -(1000f64).ln() / (1.0 - p0).ln();
        assert!((series[peak][1] - predicted).abs() <= 2.0, "p0={p0}: {} vs {predicted}", series[peak][1]);
    }

    let a2 = read_csv(&dir.path().join("fig_a2.csv"));
    assert!(!a2.is_empty());
    for row in &a2 {
        assert!(row[2] >= row[3], "{row:?}");
    }
}
