use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn zeris(args: &[&str], workers: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeris")).args(args).env("ZERIS_WORKERS", workers).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_defaults_to_the_preset_optimum() {
    let o = zeris(&["analyze"], "1");
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("#n tau n1 proposed benchmark branch"));
    let row: Vec<&str> = lines.next().unwrap().split(' ').collect();
    assert_eq!(row[0], "250");
    let proposed: f64 = row[3].parse().unwrap();
    let benchmark: f64 = row[4].parse().unwrap();
    assert!(proposed < benchmark, "{text}");
}

#[test]
fn nmin_reports_both_models() {
    let o = zeris(&["nmin", "--format", "csv"], "1");
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("target,nmin_proposed,nmin_benchmark\r\n"), "{text}");
    let row: Vec<u64> = text.lines().nth(1).unwrap().split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert!(row[0] < row[1], "{text}");
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "preset = \"paper-table-1\"\n[scheme]\ntau = 1.2\n");
    let o = zeris(&["analyze", "--config", &bad], "1");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau"));

    let typo = write(dir.path(), "typo.toml", "preset = \"paper-table-1\"\n[system]\ntransmit_pwr = 1\n");
    assert_eq!(zeris(&["analyze", "--config", &typo], "1").status.code(), Some(2));

    let empty = write(dir.path(), "empty.toml", "");
    let o = zeris(&["analyze", "--config", &empty], "1");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("frequency_hz"));

    let small = write(dir.path(), "small.toml", "preset = \"paper-table-1\"\n[scheme]\nn = 10\n");
    assert_eq!(zeris(&["analyze", "--config", &small], "1").status.code(), Some(3));

    let weak = write(dir.path(), "weak.toml", "preset = \"paper-table-1\"\n[system]\ntransmit_power_w = 1e-9\n");
    assert_eq!(zeris(&["nmin", "--config", &weak], "1").status.code(), Some(4));

    assert_eq!(zeris(&["analyze"], "zero").status.code(), Some(2));
    assert_eq!(zeris(&["analyze", "--config", "/nonexistent/x.toml"], "1").status.code(), Some(1));
}

#[test]
fn sweep_output_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "split.toml",
        r#"
preset = "paper-table-1"
scenario = "outage-vs-split"
[deployment]
side = "ue-side"
los_distance = 15
fading_distance = 45
[scheme]
kind = "es"
n = 1500
[grid]
start = 0.6
stop = 0.9
points = 4
[mc]
trials = 3000
"#,
    );
    let mut files = Vec::new();
    for (sub, workers) in [("a", "1"), ("b", "4")] {
        fs::create_dir(dir.path().join(sub)).unwrap();
        let out = dir.path().join(sub).join("t.csv");
        let o = zeris(
            &[
                "sweep",
                "--config",
                &cfg,
                "--seed",
                "9",
                "--mode",
                "physical",
                "--format",
                "csv",
                "--out",
                out.to_str().unwrap(),
            ],
            workers,
        );
        assert!(o.status.success(), "{o:?}");
        let prov = fs::read_to_string(out.with_file_name("t.csv.provenance.toml")).unwrap();
        files.push((fs::read(&out).unwrap(), prov.replace(&format!("/{sub}/"), "/")));
    }
    assert_eq!(files[0], files[1]);
    let prov = &files[0].1;
    assert!(prov.contains("seed = 9"), "{prov}");
    assert!(prov.contains("mode = \"physical\""), "{prov}");
    assert!(!prov.contains("mc.seed") && !prov.contains("output.format"), "{prov}");
    let table = String::from_utf8(files[0].0.clone()).unwrap();
    assert_eq!(table.lines().count(), 5);
}

#[test]
fn simulate_and_validate_agree_with_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ts.toml", "preset = \"paper-table-1\"\n[scheme]\ntau = 0.57\n");
    let o = zeris(&["validate", "--config", &cfg, "--trials", "20000", "--seed", "1"], "1");
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).trim_end().ends_with("pass"), "{}", stdout(&o));

    let o = zeris(&["simulate", "--config", &cfg, "--trials", "5000"], "1");
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("#n tau n1 proposed benchmark mc "));
}

#[test]
fn validate_without_simulation_only_checks_config() {
    let o = zeris(&["validate"], "1");
    assert!(o.status.success());
    assert_eq!(stdout(&o), "#check result\nconfig pass\n");
}

#[test]
fn ee_over_a_grid_runs_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ee.toml",
        "preset = \"paper-table-1\"\n[scheme]\nkind = \"es\"\n[grid]\nvalues = [200, 250, 300]\n",
    );
    let o = zeris(&["ee", "--config", &cfg], "1");
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert!(text.starts_with("#n ee_proposed ee_benchmark"));
    assert_eq!(text.lines().count(), 4);
}
