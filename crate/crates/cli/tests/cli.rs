use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fdnet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdnet")).args(args).current_dir(dir).output().expect("spawn fdnet")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn without_timestamp(manifest: &str) -> String {
    manifest.lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn dmt_starts_at_full_diversity() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdnet(&["dmt", "--antennas", "2,1,1,2", "--w", "0.2", "--alpha-s", "1", "--csit"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("r,d_lp,d_closed_form,regime\n"));
    let first = &rows(&out)[0];
    assert_eq!((first[0].as_str(), first[1].as_str()), ("0", "2"));
    assert_eq!(rows(&out).len(), 201);
}

#[test]
fn no_side_channel_matches_formula() {
    // SISO without CSIT or side-channel: min(1 - r, 2 (1 - 2 r))
    let dir = tempfile::tempdir().unwrap();
    let o = fdnet(&["dmt", "--antennas", "1,1,1,1", "--w", "0", "--points", "50"], dir.path());
    assert!(o.status.success());
    for row in rows(&stdout(&o)) {
        let r: f64 = row[0].parse().unwrap();
        let lp: f64 = row[1].parse().unwrap();
        let cf: f64 = row[2].parse().unwrap();
        let want = (1.0 - r).min(2.0 * (1.0 - 2.0 * r)).max(0.0);
        assert!((cf - want).abs() < 1e-11 && (lp - want).abs() < 1e-9, "r={r}: {lp} {cf} {want}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["dmt", "--w", "0.2"][..],
        &["dmt", "--antennas", "1,2"],
        &["dmt", "--antennas", "1,1,1,1", "--bogus"],
        &["bandwidth", "--mode", "gdof", "--antennas", "3,2,3,3"],
        &["bandwidth", "--antennas", "4,2,3,4"],
        &["outage", "--antennas", "1,1,1,1", "--trials", "0"],
    ] {
        let o = fdnet(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn bandwidth_and_gdof_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdnet(
        &["bandwidth", "--mode", "interference-free", "--antennas", "3,2,2,3", "--alpha-s", "1", "--csit"],
        dir.path(),
    );
    assert_eq!(rows(&stdout(&o))[0][1], "1");
    let o = fdnet(&["gdof", "--case", "B", "--alpha-i", "1", "--w", "0", "--antennas", "3,2,3,3"], dir.path());
    // m_X / m_I = 3 / 2
    assert_eq!(rows(&stdout(&o))[0][7], "1.5");
    let o = fdnet(&["bandwidth", "--antennas", "3,1,1,3", "--alpha-s", "1,1.5"], dir.path());
    let r = rows(&stdout(&o));
    assert_eq!(r[0][1], "0.25");
    assert_eq!((r[0][4].as_str(), r[1][4].as_str()), ("false", "true"));
}

#[test]
fn manifest_reruns_reproduce_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (cmd, args) in [
        ("dmt", vec!["--antennas", "3,2,3,3", "--w", "0.4", "--alpha-s", "2", "--points", "40"]),
        ("outage", vec!["--antennas", "1,1,1,1", "--trials", "3000", "--rho-db", "10,20,30", "--seed", "8"]),
        ("capacity", vec!["--antennas", "2,1,2,2", "--samples", "5", "--w", "1"]),
    ] {
        let mut full = vec![cmd, "--out", "run.csv"];
        full.extend(&args);
        assert!(fdnet(&full, d).status.success(), "{cmd}");
        let csv = fs::read(d.join("run.csv")).unwrap();
        let manifest = fs::read_to_string(d.join("run.manifest.json")).unwrap();
        fs::rename(d.join("run.manifest.json"), d.join("first.json")).unwrap();
        fs::remove_file(d.join("run.csv")).unwrap();
        let o = fdnet(&[cmd, "--config", "first.json", "--out", "run.csv"], d);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(fs::read(d.join("run.csv")).unwrap(), csv, "{cmd}");
        let again = fs::read_to_string(d.join("run.manifest.json")).unwrap();
        assert_eq!(without_timestamp(&again), without_timestamp(&manifest), "{cmd}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("c.json"), r#"{"antennas": [2, 1, 1, 2], "w": 0.2, "csit": true, "points": 4}"#).unwrap();
    let base = rows(&stdout(&fdnet(&["dmt", "--config", "c.json"], d)));
    assert_eq!(base.len(), 5);
    let over = rows(&stdout(&fdnet(&["dmt", "--config", "c.json", "--points", "2"], d)));
    assert_eq!(over.len(), 3);
    fs::write(d.join("bad.json"), r#"{"antennas": [2, 1, 1, 2], "wide": 1}"#).unwrap();
    let o = fdnet(&["dmt", "--config", "bad.json"], d);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key `wide`"));
}

#[test]
fn manifest_from_other_command_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(fdnet(&["gdof", "--antennas", "2,2,2,2", "--out", "g.csv"], d).status.success());
    assert_eq!(fdnet(&["dmt", "--config", "g.manifest.json"], d).status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_outage() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["outage", "--antennas", "2,1,1,2", "--trials", "5000", "--rho-db", "10,20", "--w", "0.5"];
    let run = |t: &str| {
        let mut a = vec!["--threads", t];
        a.extend(args);
        stdout(&fdnet(&a, dir.path()))
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn validate_passes_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdnet(&["validate", "--points", "20"], dir.path());
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert_eq!(out.matches("PASS").count(), 6, "{out}");
    let o = fdnet(&["validate", "--points", "5", "--tol", "1e-300"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}
