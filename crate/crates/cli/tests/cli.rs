use std::f64::consts::PI;
use std::process::Command;

use gic_cli::bounds::{Selection, ASYMMETRIC};
use gic_cli::config::{OneOrMany, Settings};
use gic_cli::reproduce::reproduce;
use gic_cli::run::{evaluate, run_surface, sweep_points, SurfaceSpec, HEADER};
use gic_core::SearchConfig;

fn gic() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gic"))
}

fn alpha_settings(bounds: &str) -> Settings {
    Settings {
        k: Some(3),
        p: Some(10.0),
        axis: Some("alpha".into()),
        range: Some("-1:1:0.05".into()),
        bounds: Some(bounds.into()),
        ..Default::default()
    }
}

#[test]
fn alpha_sweep_shape_and_dominance() {
    let s = alpha_settings("new_upper,kramer,etw,gen_kramer,z_ext");
    let points = sweep_points(&s).unwrap();
    assert_eq!(points.len(), 41);
    let sel = Selection::parse(s.bounds.as_deref().unwrap()).unwrap();
    let rows = evaluate(&points, &sel, &SearchConfig::fast(), 1).unwrap();
    assert_eq!(rows.len(), 41 * 5);
    // The new bound is strictly lowest on a long contiguous run of α,
    // the weak-interference side of the sweep.
    let wins: Vec<bool> = rows
        .chunks(5)
        .map(|c| c[1..].iter().all(|b| c[0].result.sum_rate < b.result.sum_rate))
        .collect();
    let mut longest = (0, 0);
    let mut start = 0;
    for i in 0..=wins.len() {
        if i == wins.len() || !wins[i] {
            if i - start > longest.1 - longest.0 {
                longest = (start, i);
            }
            start = i + 1;
        }
    }
    assert!(longest.1 - longest.0 >= 10, "{wins:?}");
    assert!(!wins.iter().all(|&w| w), "{wins:?}");
}

#[test]
fn upper_bounds_never_below_best_lower() {
    let s = alpha_settings("all");
    let points = sweep_points(&Settings {
        range: Some("-1:2:0.25".into()),
        ..s
    })
    .unwrap();
    let rows = evaluate(&points, &Selection::All, &SearchConfig::fast(), 1).unwrap();
    for chunk in rows.chunk_by(|a, b| a.point == b.point) {
        let lower = chunk
            .iter()
            .find(|r| r.result.name == "lower_best")
            .unwrap()
            .result
            .sum_rate;
        for r in chunk.iter().filter(|r| !r.result.name.starts_with("lower_")) {
            assert!(!ASYMMETRIC.contains(&r.result.name.as_str()));
            assert!(
                r.result.sum_rate >= lower - 1e-9,
                "{} at {:?}: {} < {lower}",
                r.result.name,
                r.point.axis_value,
                r.result.sum_rate
            );
        }
    }
}

#[test]
fn phase_sweep_peaks_at_quarter_turns() {
    let s = Settings {
        k: Some(3),
        p: Some(10.0),
        g2: Some(OneOrMany::One(1.0)),
        axis: Some("phase".into()),
        range: Some("0:2pi:0.125pi".into()),
        ..Default::default()
    };
    let points = sweep_points(&s).unwrap();
    assert_eq!(points.len(), 16);
    let rows = evaluate(
        &points,
        &Selection::parse("best_upper").unwrap(),
        &SearchConfig::fast(),
        1,
    )
    .unwrap();
    let vals: Vec<f64> = rows.iter().map(|r| r.result.normalized).collect();
    let max = vals.iter().cloned().fold(f64::MIN, f64::max);
    let capacity = 0.25 * 21f64.log2();
    for idx in [4, 12] {
        assert!((vals[idx] - max).abs() < 1e-9, "{vals:?}");
        assert!((vals[idx] - capacity).abs() < 1e-6);
    }
    // Real gain: the bound meets time division.
    assert!(vals[0] < max - 0.2);
}

#[test]
fn empty_bound_list_gives_header_only() {
    let out = gic()
        .args(["sweep", "--axis", "g2", "--range", "0:1:0.5", "--bounds", ""])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim_end(), HEADER.join(","));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        let out = gic()
            .args([
                "sweep",
                "--axis",
                "alpha",
                "--range",
                "-0.5:0.5:0.25",
                "--bounds",
                "all",
                "--threads",
                threads,
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let a = run("1");
    assert_eq!(a, run("2"));
    assert_eq!(a, run("1"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| gic().args(args).output().unwrap().status.code();
    assert_eq!(code(&["eval", "--g", "0.5", "--bounds", "prop2"]), Some(0));
    assert_eq!(code(&["eval", "--bounds", "nope"]), Some(2));
    assert_eq!(code(&["eval", "--p", "10", "--p-db", "10"]), Some(2));
    assert_eq!(code(&["eval", "--g", "1+"]), Some(2));
    assert_eq!(code(&["eval", "--g2", "2", "--bounds", "thm5,prop1"]), Some(3));
    assert_eq!(code(&["reproduce", "fig99"]), Some(2));
    assert_eq!(code(&["surface", "--grid", "4"]), Some(2));
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"k": 4, "p_db": 10, "g": "0.5", "bounds": "prop2,lower_best"}"#,
    )
    .unwrap();
    let from_file = gic()
        .args(["eval", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    let from_flags = gic()
        .args([
            "eval",
            "--k",
            "4",
            "--p",
            "10",
            "--g",
            "0.5",
            "--bounds",
            "prop2,lower_best",
        ])
        .output()
        .unwrap();
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, from_flags.stdout);
    let overridden = gic()
        .args(["eval", "--config", cfg.to_str().unwrap(), "--k", "5"])
        .output()
        .unwrap();
    assert!(String::from_utf8(overridden.stdout)
        .unwrap()
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("5,"));
    std::fs::write(&cfg, r#"{"users": 4}"#).unwrap();
    let bad = gic()
        .args(["eval", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn surface_swap_symmetry_and_tdm() {
    let spec = SurfaceSpec {
        mags: (0.3, 0.3),
        p: 10.0,
        grid_n: 8,
    };
    let (rows, report) = run_surface(&spec, &Selection::List(vec![]), &SearchConfig::fast(), 1).unwrap();
    assert_eq!(rows.len(), 64 * 2);
    assert!((report.tdm_normalized - 0.8257).abs() < 1e-4);
    assert!(rows
        .iter()
        .filter(|r| r.result.name == "lower_tdm")
        .all(|r| (r.result.normalized - 0.825699385).abs() < 1e-9));
    assert!(report.swap_asymmetry.unwrap() < 1e-9);
}

#[test]
fn unequal_surface_reports_extrema() {
    let spec = SurfaceSpec {
        mags: (0.3, 0.7),
        p: 10.0,
        grid_n: 8,
    };
    let (_, report) = run_surface(&spec, &Selection::List(vec![]), &SearchConfig::fast(), 1).unwrap();
    assert!(report.swap_asymmetry.is_none());
    assert!(!report.extrema.is_empty());
    // Reported distances are rounded to nine significant digits.
    let cap = PI / 5f64.sqrt() + 1e-8;
    for e in &report.extrema {
        for d in e.dist_max_lines.iter().chain(&e.dist_min_lines) {
            assert!(*d >= 0.0 && *d <= cap, "{e:?}");
        }
        assert!(e.kind == "max" || e.kind == "min");
    }
}

#[test]
fn reproduce_large_k_figure() {
    let dir = tempfile::tempdir().unwrap();
    let done = reproduce("fig12", dir.path(), None, &SearchConfig::fast(), 1).unwrap();
    let text = std::fs::read_to_string(&done.csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), HEADER.join(","));
    // 2 powers × 101 gains × 9 bounds.
    assert_eq!(lines.count(), 2 * 101 * 9);
    assert!(done.rows.iter().all(|r| r.point.k == 100_000));
}

#[test]
fn scenario_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    std::fs::write(
        &path,
        r#"{"k": 3, "field": "real", "p": 10, "h": [
            [{"re": 1}, {"re": 0.2}, {"re": 0.4}],
            [{"re": 0.1}, {"re": 1}, {"re": 0.3}],
            [{"re": 0.5}, {"re": 0.6}, {"re": 1}]]}"#,
    )
    .unwrap();
    let out = gic()
        .args([
            "eval",
            "--scenario",
            path.to_str().unwrap(),
            "--bounds",
            "new_upper,lower_tdm,kramer",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let upper: f64 = rows[0][10].parse().unwrap();
    let tdm: f64 = rows[1][10].parse().unwrap();
    assert!(upper.is_finite() && upper > tdm);
    // Unequal cross magnitudes: the two-user bound does not apply.
    assert_eq!(rows[2][12], "false");

    std::fs::write(&path, r#"{"sym": {"g": {"re": 0.5, "im": 0}, "p": 10}}"#).unwrap();
    let from_file = gic()
        .args([
            "eval",
            "--scenario",
            path.to_str().unwrap(),
            "--bounds",
            "prop2,lower_best",
        ])
        .output()
        .unwrap();
    let from_flags = gic()
        .args(["eval", "--g", "0.5", "--p", "10", "--bounds", "prop2,lower_best"])
        .output()
        .unwrap();
    assert_eq!(from_file.stdout, from_flags.stdout);
    let clash = gic()
        .args(["eval", "--scenario", path.to_str().unwrap(), "--g", "0.1"])
        .output()
        .unwrap();
    assert_eq!(clash.status.code(), Some(2));
}
