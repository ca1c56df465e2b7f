//! Sweeps, surfaces and single-point evaluation, all producing rows in the
//! common CSV schema.

use std::f64::consts::PI;
use std::io::Write;

use gic_core::kuser::{affine_approx, eta_regime, offset_db};
use gic_core::{closed_form_best, BoundResult64, Complex, Field, SearchConfig, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{is_lower, Evaluator, Point, Selection, COMBINED};
use crate::config::Settings;
use crate::fmt::{round9, sig9};
use crate::CliError;

pub const HEADER: [&str; 13] = [
    "k",
    "field",
    "p_linear",
    "g1_re",
    "g1_im",
    "g2_re",
    "g2_im",
    "axis",
    "axis_value",
    "bound",
    "sum_rate_bits",
    "normalized",
    "feasible",
];

/// One output line.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub point: Point,
    pub result: BoundResult64,
}

impl Row {
    pub fn record(&self, normalize: bool) -> Vec<String> {
        let pt = &self.point;
        let g = |i: usize, im: bool| {
            pt.gains
                .get(i)
                .map(|c| sig9(if im { c.im } else { c.re }))
                .unwrap_or_default()
        };
        vec![
            pt.k.to_string(),
            match pt.field {
                Field::Real => "real".into(),
                Field::Complex => "complex".into(),
            },
            sig9(pt.p),
            g(0, false),
            g(0, true),
            g(1, false),
            g(1, true),
            pt.axis.clone(),
            pt.axis_value.map(sig9).unwrap_or_default(),
            self.result.name.clone(),
            sig9(self.result.sum_rate),
            if normalize {
                sig9(self.result.normalized)
            } else {
                String::new()
            },
            self.result.feasible.to_string(),
        ]
    }
}

/// Write rows as CSV (header always present).
pub fn write_csv<W: Write>(out: W, rows: &[Row], normalize: bool) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(io)?;
    for r in rows {
        w.write_record(r.record(normalize)).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Evaluate `sel` at every point on a pool of `threads` workers. Rows come
/// back grid-major, bound-minor, independent of the thread count.
pub fn evaluate(points: &[Point], sel: &Selection, cfg: &SearchConfig, threads: usize) -> Result<Vec<Row>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let per_point: Vec<Result<Vec<Row>, CliError>> = pool.install(|| {
        points
            .par_iter()
            .map(|pt| {
                let ev = Evaluator::new(pt, cfg)?;
                Ok(sel
                    .names(pt)
                    .iter()
                    .map(|n| Row {
                        point: pt.clone(),
                        result: ev.eval(n),
                    })
                    .collect())
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Upper-bound rows exist and none is feasible.
pub fn infeasible_everywhere(rows: &[Row]) -> bool {
    let mut uppers = rows.iter().filter(|r| !is_lower(&r.result.name)).peekable();
    uppers.peek().is_some() && uppers.all(|r| !r.result.feasible)
}

// ---------------------------------------------------------------------------
// Axes

/// Sweep axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Alpha,
    G2,
    Phase,
    SnrDb,
    K,
}

impl Axis {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "alpha" => Ok(Axis::Alpha),
            "g2" => Ok(Axis::G2),
            "phase" => Ok(Axis::Phase),
            "snr_db" => Ok(Axis::SnrDb),
            "K" | "k" => Ok(Axis::K),
            _ => Err(CliError::Config(format!("unknown axis '{s}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::Alpha => "alpha",
            Axis::G2 => "g2",
            Axis::Phase => "phase",
            Axis::SnrDb => "snr_db",
            Axis::K => "K",
        }
    }

    fn default_range(self) -> (f64, f64, f64) {
        match self {
            Axis::Alpha => (-1.0, 1.0, 0.05),
            Axis::G2 => (0.0, 2.0, 0.05),
            Axis::Phase => (0.0, 2.0 * PI, PI / 16.0),
            Axis::SnrDb => (0.0, 40.0, 1.0),
            Axis::K => (3.0, 10.0, 1.0),
        }
    }
}

/// `start, start+step, …` up to `stop` (inclusive within rounding); phase
/// grids stop short of `2π`.
pub fn grid_values(axis: Axis, (start, stop, step): (f64, f64, f64)) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !(start <= stop) || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Config(format!("bad range {start}:{stop}:{step}")));
    }
    if axis == Axis::Phase && (start < 0.0 || stop > 2.0 * PI + 1e-9) {
        return Err(CliError::Config("phase range must lie in [0, 2π]".into()));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let mut v: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
    if axis == Axis::Phase {
        v.retain(|&x| x < 2.0 * PI - 1e-9);
    }
    Ok(v)
}

/// Sweep points for the symmetric scenario in `s`.
pub fn sweep_points(s: &Settings) -> Result<Vec<Point>, CliError> {
    let axis = Axis::parse(s.axis.as_deref().unwrap_or("alpha"))?;
    let range = s.range()?.unwrap_or(axis.default_range());
    let values = grid_values(axis, range)?;
    let k = s.k()?;
    let p = s.power()?;
    let mut fixed = s.clone();
    match axis {
        Axis::Alpha => fixed.alpha = None,
        Axis::G2 => fixed.g2 = None,
        Axis::SnrDb => {
            fixed.p = None;
            fixed.p_db = None;
        }
        _ => {}
    }
    if axis == Axis::Alpha && s.alpha.is_some() || axis == Axis::G2 && s.g2.is_some() {
        return Err(CliError::Config(format!(
            "{} is the sweep axis; do not fix it",
            axis.name()
        )));
    }
    let base_g = fixed.gain(p)?;
    let phase = base_g.arg();
    let complex_data = axis == Axis::Phase || base_g.im != 0.0;
    let field = s.field(complex_data)?;
    if axis == Axis::Phase && field == Field::Real {
        return Err(CliError::Config("phase sweeps need the complex field".into()));
    }
    values
        .into_iter()
        .map(|v| {
            let (k, p, g) = match axis {
                Axis::Alpha => {
                    let g2 = gic_core::alpha_to_gain(v, p).map_err(|e| CliError::Config(e.to_string()))?;
                    (k, p, Complex::from_polar(g2.sqrt(), phase))
                }
                Axis::G2 => (k, p, Complex::from_polar(v.max(0.0).sqrt(), phase)),
                Axis::Phase => (k, p, Complex::from_polar(base_g.norm(), v)),
                Axis::SnrDb => (k, 10f64.powf(v / 10.0), base_g),
                Axis::K => {
                    if v < 2.0 || v.fract() != 0.0 {
                        return Err(CliError::Config(format!("K = {v} is not an integer ≥ 2")));
                    }
                    (v as usize, p, base_g)
                }
            };
            Ok(Point::symmetric(k, p, g, field).on_axis(axis.name(), v))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Surfaces

/// Semi-symmetric three-user phase torus.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub mags: (f64, f64),
    pub p: f64,
    pub grid_n: usize,
}

impl SurfaceSpec {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        if s.k()? != 3 {
            return Err(CliError::Config("surfaces are three-user".into()));
        }
        if s.g.is_some() || s.alpha.is_some() {
            return Err(CliError::Config("surfaces take squared magnitudes via g2".into()));
        }
        let m = s.g2.clone().map(|v| v.into_vec()).unwrap_or_else(|| vec![0.3]);
        let mags = match m.as_slice() {
            [a] => (*a, *a),
            [a, b] => (*a, *b),
            _ => return Err(CliError::Config("g2 takes one or two squared magnitudes".into())),
        };
        if !(mags.0 >= 0.0 && mags.1 >= 0.0) {
            return Err(CliError::Config("magnitudes must be nonnegative".into()));
        }
        let grid_n = s.grid.unwrap_or(32);
        if grid_n < 8 {
            return Err(CliError::Config(format!("grid {grid_n} < 8")));
        }
        if s.field.as_deref() == Some("real") {
            return Err(CliError::Config("surfaces need the complex field".into()));
        }
        Ok(SurfaceSpec {
            mags,
            p: s.power()?,
            grid_n,
        })
    }

    pub fn phases(&self) -> Vec<f64> {
        (0..self.grid_n)
            .map(|i| 2.0 * PI * i as f64 / self.grid_n as f64)
            .collect()
    }

    /// Row-major over `(φ₁, φ₂)`, `φ₁` outer.
    pub fn points(&self) -> Vec<Point> {
        let ph = self.phases();
        let (a, b) = (self.mags.0.sqrt(), self.mags.1.sqrt());
        let mut out = Vec::with_capacity(ph.len() * ph.len());
        for &p1 in &ph {
            for &p2 in &ph {
                out.push(Point {
                    k: 3,
                    p: self.p,
                    gains: vec![Complex::from_polar(a, p1), Complex::from_polar(b, p2)],
                    field: Field::Complex,
                    axis: "phi1".into(),
                    axis_value: Some(p1),
                    matrix: None,
                });
            }
        }
        out
    }
}

/// One local extremum of the surface and its distance to each family of
/// conjectured lines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremum {
    pub phi1: f64,
    pub phi2: f64,
    pub value: f64,
    pub kind: String,
    /// Distances to `2φ₁−φ₂+π ≡ 0` and `2φ₂−φ₁+π ≡ 0` (maxima lines).
    pub dist_max_lines: [f64; 2],
    /// Distances to `2φ₁−φ₂ ≡ 0` and `2φ₂−φ₁ ≡ 0` (minima lines).
    pub dist_min_lines: [f64; 2],
    /// Distance to the nearest line of the family matching `kind`.
    pub dist_expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub mags: [f64; 2],
    pub p_linear: f64,
    pub grid: usize,
    pub tdm_normalized: f64,
    pub surface_max: f64,
    pub surface_min: f64,
    /// `max |S(φ₁,φ₂) − S(φ₂,φ₁)|`, reported when the magnitudes agree.
    pub swap_asymmetry: Option<f64>,
    pub extrema: Vec<Extremum>,
}

/// Distance on the torus from `(φ₁, φ₂)` to `{aφ₁ + bφ₂ + c ≡ 0 mod 2π}`.
pub fn line_distance(phi1: f64, phi2: f64, a: f64, b: f64, c: f64) -> f64 {
    let v = (a * phi1 + b * phi2 + c).rem_euclid(2.0 * PI);
    v.min(2.0 * PI - v) / (a * a + b * b).sqrt()
}

/// Locate extrema by comparison with the eight torus neighbours and
/// measure their distance to the conjectured lines. `values` is row-major
/// over `spec.phases()`.
pub fn conjecture_report(spec: &SurfaceSpec, values: &[f64]) -> ConjectureReport {
    let n = spec.grid_n;
    let ph = spec.phases();
    let at = |i: usize, j: usize| values[(i % n) * n + (j % n)];
    let tol = 1e-9;
    let mut extrema = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = at(i, j);
            if !v.is_finite() {
                continue;
            }
            let nb: Vec<f64> = [
                (n - 1, n - 1),
                (n - 1, 0),
                (n - 1, 1),
                (0, n - 1),
                (0, 1),
                (1, n - 1),
                (1, 0),
                (1, 1),
            ]
            .iter()
            .map(|&(di, dj)| at(i + di, j + dj))
            .collect();
            let is_max = nb.iter().all(|&x| v >= x - tol) && nb.iter().any(|&x| v > x + tol);
            let is_min = nb.iter().all(|&x| v <= x + tol) && nb.iter().any(|&x| v < x - tol);
            if !(is_max || is_min) {
                continue;
            }
            let (p1, p2) = (ph[i], ph[j]);
            let dmax = [
                line_distance(p1, p2, 2.0, -1.0, PI),
                line_distance(p1, p2, -1.0, 2.0, PI),
            ];
            let dmin = [
                line_distance(p1, p2, 2.0, -1.0, 0.0),
                line_distance(p1, p2, -1.0, 2.0, 0.0),
            ];
            let (kind, expected) = if is_max { ("max", dmax) } else { ("min", dmin) };
            extrema.push(Extremum {
                phi1: round9(p1),
                phi2: round9(p2),
                value: round9(v),
                kind: kind.into(),
                dist_max_lines: dmax.map(round9),
                dist_min_lines: dmin.map(round9),
                dist_expected: round9(expected[0].min(expected[1])),
            });
        }
    }
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let swap_asymmetry = (spec.mags.0 == spec.mags.1).then(|| {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (at(i, j), at(j, i));
                if a.is_finite() || b.is_finite() {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        round9(worst)
    });
    ConjectureReport {
        mags: [spec.mags.0, spec.mags.1],
        p_linear: round9(spec.p),
        grid: n,
        tdm_normalized: round9((1.0 + 3.0 * spec.p).log2() / 6.0),
        surface_max: round9(finite.clone().fold(f64::NEG_INFINITY, f64::max)),
        surface_min: round9(finite.fold(f64::INFINITY, f64::min)),
        swap_asymmetry,
        extrema,
    }
}

/// Surface rows (`best_upper`, `lower_tdm`, then any extra bounds) and the
/// report built from the `best_upper` values.
pub fn run_surface(
    spec: &SurfaceSpec,
    extra: &Selection,
    cfg: &SearchConfig,
    threads: usize,
) -> Result<(Vec<Row>, ConjectureReport), CliError> {
    let mut names = vec![COMBINED.to_string(), "lower_tdm".to_string()];
    if let Selection::List(v) = extra {
        for n in v {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
    }
    let rows = evaluate(&spec.points(), &Selection::List(names), cfg, threads)?;
    let values: Vec<f64> = rows
        .iter()
        .filter(|r| r.result.name == COMBINED)
        .map(|r| r.result.normalized)
        .collect();
    let report = conjecture_report(spec, &values);
    Ok((rows, report))
}

// ---------------------------------------------------------------------------
// Large K

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LargeKReport {
    pub k: usize,
    pub p_linear: f64,
    pub g_re: f64,
    pub g_im: f64,
    pub dof_per_user: f64,
    pub ell_star_bits: f64,
    pub ell_star_db: f64,
    pub eta: f64,
    pub closed_form_bound: String,
    pub closed_form_sum_rate_bits: f64,
    pub closed_form_per_user_bits: f64,
    pub closed_form_normalized: f64,
    pub affine_per_user_bits: f64,
}

pub fn largek(k: usize, p: f64, g: C64) -> Result<LargeKReport, CliError> {
    if k < 3 {
        return Err(CliError::Config("large-K summary needs K ≥ 3".into()));
    }
    if !(p > 0.0) {
        return Err(CliError::Config("large-K summary needs P > 0".into()));
    }
    let r = eta_regime(p, g);
    let best = closed_form_best(k, g, p);
    Ok(LargeKReport {
        k,
        p_linear: round9(p),
        g_re: round9(g.re),
        g_im: round9(g.im),
        dof_per_user: r.d_k,
        ell_star_bits: round9(r.ell_star),
        ell_star_db: round9(offset_db(r.ell_star)),
        eta: r.eta.unwrap_or(f64::NAN),
        closed_form_bound: best.name.clone(),
        closed_form_sum_rate_bits: round9(best.sum_rate),
        closed_form_per_user_bits: round9(best.per_user()),
        closed_form_normalized: round9(best.normalized),
        affine_per_user_bits: round9(affine_approx(k, p, g)),
    })
}
