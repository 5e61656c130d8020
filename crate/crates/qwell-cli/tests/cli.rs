//! End-to-end checks of the `qwell` binary: output bytes, exit codes, and
//! the physics encoded in the CSV tables.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qwell::potential::from_dimensionless;
use qwell::spectrum::spectrum_residual;
use tempfile::TempDir;

fn qwell_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qwell"))
}

fn write_file(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).expect("fixture write");
    path
}

fn run(args: &[&str], files: &[&Path]) -> Output {
    let mut cmd = qwell_bin();
    cmd.arg(args[0]);
    for f in files {
        cmd.arg(f);
    }
    cmd.args(&args[1..]);
    cmd.output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

const BOX_WELL: &str = r#"{"v1": "inf", "v2": "inf", "d": 1.0}"#;

#[test]
fn solve_prints_box_levels_byte_exactly() {
    let dir = TempDir::new().unwrap();
    let well = write_file(&dir, "box.json", BOX_WELL);
    let out = run(&["solve", "--emax", "100"], &[&well]);
    assert_eq!(
        stdout_of(&out),
        "9.869604401089\n39.478417604357\n88.826439609804\n"
    );
}

#[test]
fn solve_reports_the_narrow_well_level_count() {
    let dir = TempDir::new().unwrap();
    let spec = from_dimensionless(0.2, 0.0, 0.0, 5.0).unwrap();
    let well = write_file(&dir, "x02.json", &serde_json::to_string(&spec).unwrap());
    let out = run(&["solve"], &[&well]);
    assert_eq!(stdout_of(&out).lines().count(), 4);
}

#[test]
fn printed_energies_reproduce_small_residuals() {
    let dir = TempDir::new().unwrap();
    let spec = from_dimensionless(0.3, 0.0, 2.0, 5.0).unwrap();
    let well = write_file(&dir, "x03.json", &serde_json::to_string(&spec).unwrap());
    let out = run(&["solve"], &[&well]);
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let e: f64 = line.parse().expect("energy line");
        let r = spectrum_residual(&spec, e).unwrap().abs();
        assert!(r < 1e-8, "E = {e} parsed from output has residual {r:.3e}");
    }
}

#[test]
fn solve_flags_reach_the_solver() {
    let dir = TempDir::new().unwrap();
    let well = write_file(&dir, "box.json", BOX_WELL);
    let out = run(
        &[
            "solve", "--emax", "100", "--grid", "4001", "--tol-e", "1e-9", "--tol-res", "1e-6",
            "--emin-offset", "1e-8",
        ],
        &[&well],
    );
    let text = stdout_of(&out);
    let energies: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(energies.len(), 3);
    for (i, e) in energies.iter().enumerate() {
        let exact = ((i + 1) as f64 * std::f64::consts::PI).powi(2);
        assert!((e - exact).abs() < 1e-6);
    }
}

#[test]
fn solve_validate_appends_oracle_lines() {
    let dir = TempDir::new().unwrap();
    let well = write_file(&dir, "fin.json", r#"{"v1": 25.0, "v2": 25.0, "d": 1.0}"#);
    let out = run(&["solve", "--validate"], &[&well]);
    let text = stdout_of(&out);
    let energies: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    let oracle: Vec<&str> = text.lines().filter(|l| l.starts_with("# oracle")).collect();
    assert_eq!(energies.len(), 2);
    assert_eq!(oracle.len(), 2);
    for (lev, orc) in energies.iter().zip(&oracle) {
        let e: f64 = lev.parse().unwrap();
        let fd: f64 = orc.split_whitespace().nth(2).unwrap().parse().unwrap();
        assert!((e - fd).abs() / e < 1e-3, "solver {e} vs oracle {fd}");
    }
}

#[test]
fn oracle_states_below_the_well_bottom_are_noted_not_paired() {
    let dir = TempDir::new().unwrap();
    // The g = −3 spike binds its ground state below the well bottom,
    // outside the solver window; the oracle lines must stay aligned with
    // the printed levels anyway.
    let well = write_file(
        &dir,
        "deep.json",
        r#"{"v1": 25.0, "v2": 30.0, "d": 2.0,
            "elements": [{"type": "delta", "x": 1.6, "g": -3.0}]}"#,
    );
    let out = run(&["solve", "--validate"], &[&well]);
    let text = stdout_of(&out);
    assert!(text.contains("# note: oracle finds 1 state(s) below the well bottom"));
    let energies: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect();
    let oracle: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("# oracle"))
        .map(|l| l.split_whitespace().nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(oracle.len(), energies.len());
    // Misalignment would pair levels ~5 apart; discretization error on the
    // weakly bound top level reaches a few 1e-3 relative, nowhere near that.
    for (e, fd) in energies.iter().zip(&oracle) {
        assert!((e - fd).abs() / e < 1e-2, "solver {e} paired with oracle {fd}");
    }
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = TempDir::new().unwrap();
    let bad = write_file(&dir, "bad.json", "{\"v1\": 5.0,");
    assert_eq!(run(&["solve"], &[&bad]).status.code(), Some(2));

    let extra = write_file(&dir, "extra.json", r#"{"v1": "inf", "v2": "inf", "d": 1.0, "mass": 2}"#);
    assert_eq!(run(&["solve", "--emax", "10"], &[&extra]).status.code(), Some(2));

    // Hard walls leave the window unbounded above; --emax is required.
    let well = write_file(&dir, "box.json", BOX_WELL);
    assert_eq!(run(&["solve"], &[&well]).status.code(), Some(2));

    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["solve"], &[&missing]).status.code(), Some(2));

    // Unknown flags are usage errors.
    assert_eq!(run(&["solve", "--bogus"], &[&well]).status.code(), Some(2));
}

#[test]
fn exhausted_iteration_budget_exits_with_code_3() {
    let dir = TempDir::new().unwrap();
    let well = write_file(&dir, "box.json", BOX_WELL);
    let out = run(&["solve", "--emax", "100", "--max-iter", "2"], &[&well]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no convergence"));
}

#[test]
fn height_sweep_crosses_equidistance_near_the_known_point() {
    let dir = TempDir::new().unwrap();
    let sweep = write_file(
        &dir,
        "sweep.json",
        r#"{"mode": "barrier_height", "x": 0.3, "v": 5.0,
            "param": {"from": 1.0, "to": 2.5, "steps": 31}, "n_levels": 3}"#,
    );
    let out = run(&["sweep"], &[&sweep]);
    let (header, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(header, ["param", "E1", "E2", "E3"]);
    assert_eq!(rows.len(), 31);

    // (E3 − E2) − (E2 − E1) falls through zero exactly once, near u = 1.845.
    let gap_diff: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let v: Vec<f64> = r.iter().map(|s| s.parse().unwrap()).collect();
            (v[0], (v[3] - v[2]) - (v[2] - v[1]))
        })
        .collect();
    let crossings: Vec<f64> = gap_diff
        .windows(2)
        .filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0))
        .map(|w| 0.5 * (w[0].0 + w[1].0))
        .collect();
    assert_eq!(crossings.len(), 1, "gap differences: {gap_diff:?}");
    assert!(
        (crossings[0] - 1.845).abs() < 0.05,
        "equidistance crossing at u ≈ {}",
        crossings[0]
    );
}

#[test]
fn position_sweep_is_mirror_symmetric() {
    let dir = TempDir::new().unwrap();
    // Center of the allowed offset range is y = (1/x − 1)/2 = 7/6; sweep
    // ends chosen symmetric about it.
    let sweep = write_file(
        &dir,
        "sweep.json",
        r#"{"mode": "barrier_position", "x": 0.3, "v": 5.0, "u": 2.0,
            "param": {"from": 0.2, "to": 2.133333333333333, "steps": 9}, "n_levels": 3}"#,
    );
    let out = run(&["sweep"], &[&sweep]);
    let (_, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(rows.len(), 9);
    for i in 0..rows.len() / 2 {
        let a = &rows[i];
        let b = &rows[rows.len() - 1 - i];
        for (x, y) in a[1..].iter().zip(&b[1..]) {
            let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
            assert!(
                (x - y).abs() < 1e-9,
                "rows {i} and {} break mirror symmetry: {x} vs {y}",
                rows.len() - 1 - i
            );
        }
    }
}

#[test]
fn periodic_sweep_forms_clusters_once_barriers_are_tall() {
    let dir = TempDir::new().unwrap();
    let sweep = write_file(
        &dir,
        "sweep.json",
        r#"{"mode": "periodic_height", "N": 3,
            "param": {"from": 0.0, "to": 60.0, "steps": 4}, "n_levels": 8}"#,
    );
    let out = run(&["sweep"], &[&sweep]);
    let (header, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(header.len(), 9);

    let levels = |row: &[String]| -> Vec<f64> {
        row[1..].iter().map(|s| s.parse().unwrap()).collect()
    };
    // Tall barriers: 4 sub-wells → clusters of 4 split by a wide gap.
    let tall = levels(&rows[3]);
    let spread = tall[3] - tall[0];
    let gap = tall[4] - tall[3];
    assert!(gap > 4.0 * spread, "cluster spread {spread}, gap {gap}");
    // No barriers: plain box spectrum, no gap at the same place.
    let flat = levels(&rows[0]);
    assert!(flat[4] - flat[3] < flat[3] - flat[0]);
}

#[test]
fn escaped_levels_print_a_sentinel_not_a_number() {
    let dir = TempDir::new().unwrap();
    let sweep = write_file(
        &dir,
        "sweep.json",
        r#"{"mode": "barrier_height", "x": 0.3, "v": 5.0,
            "param": {"from": 3.0, "to": 5.0, "steps": 5}, "n_levels": 3}"#,
    );
    let out = run(&["sweep"], &[&sweep]);
    let (_, rows) = parse_csv(&stdout_of(&out));
    // The third level leaves the well somewhere between u = 3 and u = 3.5.
    assert_eq!(rows[0][3].parse::<f64>().unwrap().floor(), 4.0);
    for row in &rows[1..] {
        assert_eq!(row[3], "escaped");
        assert!(row[2].parse::<f64>().is_ok());
    }
}

#[test]
fn sweep_output_is_deterministic_and_written_to_out_files() {
    let dir = TempDir::new().unwrap();
    let sweep = write_file(
        &dir,
        "sweep.json",
        r#"{"mode": "barrier_height", "x": 0.25, "y": 0.5, "v": 8.0,
            "param": {"from": 0.0, "to": 4.0, "steps": 13}, "n_levels": 4}"#,
    );
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let run_to = |path: &Path| {
        let out = qwell_bin()
            .args(["sweep"])
            .arg(&sweep)
            .arg("--out")
            .arg(path)
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        std::fs::read(path).expect("csv written")
    };
    let bytes_a = run_to(&out_a);
    let bytes_b = run_to(&out_b);
    assert_eq!(bytes_a, bytes_b, "repeat runs must agree byte for byte");

    let streamed = stdout_of(&run(&["sweep"], &[&sweep]));
    assert_eq!(streamed.into_bytes(), bytes_a);
    assert!(bytes_a.ends_with(b"\n"));
}

#[test]
fn sweep_rejects_malformed_descriptions() {
    let dir = TempDir::new().unwrap();
    let cases = [
        // Unknown field.
        r#"{"mode": "barrier_height", "x": 0.3, "v": 5.0, "bogus": 1,
            "param": {"from": 0.0, "to": 5.0, "steps": 11}, "n_levels": 3}"#,
        // Field from another mode.
        r#"{"mode": "barrier_position", "x": 0.3, "v": 5.0,
            "param": {"from": 0.0, "to": 2.0, "steps": 11}, "n_levels": 3}"#,
        // Degenerate range.
        r#"{"mode": "barrier_height", "x": 0.3, "v": 5.0,
            "param": {"from": 5.0, "to": 5.0, "steps": 11}, "n_levels": 3}"#,
        // Single step.
        r#"{"mode": "barrier_height", "x": 0.3, "v": 5.0,
            "param": {"from": 0.0, "to": 5.0, "steps": 1}, "n_levels": 3}"#,
    ];
    for (i, text) in cases.iter().enumerate() {
        let sweep = write_file(&dir, &format!("s{i}.json"), text);
        let out = run(&["sweep"], &[&sweep]);
        assert_eq!(out.status.code(), Some(2), "case {i} should be rejected");
    }
}

#[test]
fn validate_passes_and_honors_filter_and_tolerance() {
    let out = qwell_bin().arg("validate").output().expect("binary runs");
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.contains("pass")));

    let out = qwell_bin()
        .args(["validate", "--filter", "flux"])
        .output()
        .expect("binary runs");
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("flux"));

    let out = qwell_bin()
        .args(["validate", "--filter", "no-such-check"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));

    // An impossible residual tolerance must fail the reduction check.
    let out = qwell_bin()
        .args(["validate", "--tol-res", "1e-30"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}
