mod support;

use std::fs;
use std::process::Command;

use support::{bin, cfscore, write_parquet, Col, Rows};

use cfscore_core::io::{read_score_table, read_submission, write_observations, write_point_submission};
use cfscore_core::{Level, MonthId, ObservationPanel, UnitId};

fn windows(dir: &std::path::Path) {
    fs::write(dir.join("windows.txt"), "# one test year\n2020,2019-10,2020-01\n").unwrap();
}

fn zero_panel(dir: &std::path::Path, units: u32) {
    let first = MonthId::from_date(2018, 1).unwrap();
    let mut panel = ObservationPanel::new(Level::Cm);
    for id in 1..=units {
        panel.insert_series(UnitId::cm(id).unwrap(), first, vec![0; 36]).unwrap();
    }
    write_observations(&dir.join("obs.parquet"), &panel).unwrap();
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = cfscore(dir.path(), &["score", "x.parquet", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = cfscore(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cfscore(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unreadable_input_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let out = cfscore(dir.path(), &["validate", "missing.parquet", "--level", "cm"]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(dir.path().join("junk.parquet"), b"junk").unwrap();
    let out = cfscore(dir.path(), &["validate", "junk.parquet", "--level", "cm"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_fourteen_draws() {
    let dir = tempfile::tempdir().unwrap();
    Rows::grid(&[4], &[500], 14).write(&dir.path().join("s.parquet"));
    let out = cfscore(dir.path(), &["validate", "s.parquet", "--level", "cm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("draw-count below 15"));
}

#[test]
fn validate_missing_column_and_invalid_id() {
    let dir = tempfile::tempdir().unwrap();
    let (m, u, d, _) = Rows::grid(&[4], &[500], 20).columns();
    write_parquet(
        &dir.path().join("nopred.parquet"),
        &[Col::I32("month_id", m.clone()), Col::I32("country_id", u), Col::I32("draw", d.clone())],
    );
    let out = cfscore(dir.path(), &["validate", "nopred.parquet", "--level", "cm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("missing column"));

    let mut rows = Rows::grid(&[4], &[500], 20);
    rows.0[0].1 = -4;
    rows.write(&dir.path().join("badid.parquet"));
    let out = cfscore(dir.path(), &["validate", "badid.parquet", "--level", "cm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("invalid unit or month id"));
}

#[test]
fn score_refuses_invalid_submission() {
    let dir = tempfile::tempdir().unwrap();
    windows(dir.path());
    zero_panel(dir.path(), 2);
    Rows::grid(&[1], &[MonthId::from_date(2020, 1).unwrap().get() as i32], 14).write(&dir.path().join("s.parquet"));
    let out = cfscore(dir.path(), &["score", "s.parquet", "--obs", "obs.parquet", "--windows", "windows.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exactly_zero_on_zero_panel_scores_the_floor() {
    let dir = tempfile::tempdir().unwrap();
    windows(dir.path());
    zero_panel(dir.path(), 3);
    let run = |args: &[&str]| {
        let out = cfscore(dir.path(), args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    run(&["benchmark", "exactly_zero", "--obs", "obs.parquet", "--windows", "windows.txt", "--out", "z.parquet"]);
    let printed = run(&["score", "z.parquet", "--obs", "obs.parquet", "--windows", "windows.txt", "--out", "s.parquet"]);
    assert!(printed.contains("Overall"), "{printed}");
    let table = read_score_table(&dir.path().join("s.parquet")).unwrap();
    assert_eq!(table.rows().len(), 36);
    let floor = -(1001f64 / 1011.0).log2();
    for r in table.rows() {
        assert_eq!(r.scores.crps, 0.0);
        assert_eq!(r.scores.mis, 0.0);
        assert!((r.scores.ign - floor).abs() < 1e-15);
    }
    let sub = read_submission(&dir.path().join("z.parquet")).unwrap();
    assert_eq!(sub.len(), 36);
}

#[test]
fn point_submissions_are_expanded() {
    let dir = tempfile::tempdir().unwrap();
    windows(dir.path());
    zero_panel(dir.path(), 2);
    let pts: Vec<_> = (1..=2)
        .flat_map(|u| (0..12).map(move |k| (UnitId::cm(u).unwrap(), MonthId::from_date(2020, 1).unwrap().plus(k), 0.0)))
        .collect();
    write_point_submission(&dir.path().join("p.parquet"), Level::Cm, &pts).unwrap();
    let out = cfscore(
        dir.path(),
        &["score", "p.parquet", "--points", "--n-draws", "50", "--obs", "obs.parquet", "--windows", "windows.txt"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0.00"));
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let status = Command::new(bin())
            .current_dir(dir.path())
            .env("SCORE_THREADS", threads)
            .args(["synth", "--level", "pgm", "--units", "50", "--months", "2010-01..2012-12", "--seed", "3", "--out", out])
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("1", "a.parquet"), run("4", "b.parquet"));
    let bad = Command::new(bin())
        .env("SCORE_THREADS", "zero")
        .args(["report", "x.parquet"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("SCORE_THREADS"));
}

#[test]
fn pgm_benchmark_with_mask_and_neighbours() {
    let dir = tempfile::tempdir().unwrap();
    windows(dir.path());
    let run = |args: &[&str]| {
        let out = cfscore(dir.path(), args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    };
    run(&["synth", "--level", "pgm", "--units", "16", "--months", "2018-01..2020-12", "--seed", "2", "--out", "obs.parquet"]);
    let panel = cfscore_core::io::read_observations(&dir.path().join("obs.parquet")).unwrap();
    let mask: Vec<String> = panel.units().take(9).map(|u| u.id().to_string()).collect();
    fs::write(dir.path().join("mask.txt"), mask.join("\n")).unwrap();
    run(&[
        "benchmark", "conflictology_neighbors12", "--obs", "obs.parquet", "--windows", "windows.txt", "--mask", "mask.txt",
        "--out", "n.parquet",
    ]);
    let sub = read_submission(&dir.path().join("n.parquet")).unwrap();
    assert_eq!(sub.level(), Level::Pgm);
    assert_eq!(sub.len(), 9 * 12);
    let out = cfscore(dir.path(), &["validate", "n.parquet", "--level", "pgm", "--universe", "obs.parquet"]);
    // The universe spans every observed month, so most cells are missing.
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn report_formats() {
    let dir = tempfile::tempdir().unwrap();
    windows(dir.path());
    zero_panel(dir.path(), 2);
    for kind in ["exactly_zero", "last_historical"] {
        let sub = format!("{kind}.parquet");
        let scores = format!("{kind}_scores.parquet");
        assert!(cfscore(dir.path(), &["benchmark", kind, "--obs", "obs.parquet", "--windows", "windows.txt", "--out", &sub])
            .status
            .success());
        assert!(cfscore(dir.path(), &["score", &sub, "--obs", "obs.parquet", "--windows", "windows.txt", "--out", &scores])
            .status
            .success());
    }
    let md = cfscore(dir.path(), &["report", "exactly_zero_scores.parquet", "last_historical_scores.parquet"]);
    let md = String::from_utf8(md.stdout).unwrap();
    assert!(md.contains("## Leaderboard"));
    assert!(md.contains("|    1 | exactly_zero_scores"), "{md}");
    let csv = cfscore(dir.path(), &["report", "exactly_zero_scores.parquet", "--format", "csv"]);
    let csv = String::from_utf8(csv.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "submission,window,n_cells,crps,ign,mis");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("exactly_zero_scores,overall,24,0,"));
}
