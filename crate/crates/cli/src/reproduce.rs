//! Data recipes for the standard figures. Each recipe is a list of sweeps
//! and surfaces written to `<dir>/<id>.csv` (plus a conjecture report per
//! surface).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use gic_core::{Complex, Field, SearchConfig};

use crate::bounds::{Point, Selection};
use crate::run::{evaluate, grid_values, run_surface, write_csv, Axis, ConjectureReport, Row, SurfaceSpec};
use crate::CliError;

pub const FIGURES: [&str; 10] = [
    "fig1",
    "fig4",
    "fig4a",
    "fig11",
    "fig12",
    "fig13-like",
    "fig2",
    "fig5",
    "fig6",
    "fig8",
];

const THREE_GENIE: &str = "thm1,thm2a,thm2b,thm3_i0,thm3_i1,new_upper";
const LOWERS: &str = "lower_tin,lower_tdm,lower_snd,lower_best";

enum Job {
    Sweep { points: Vec<Point>, bounds: String },
    Surface(SurfaceSpec),
}

fn sym(k: usize, p: f64, g: Complex<f64>, field: Field, axis: Axis, v: f64) -> Point {
    Point::symmetric(k, p, g, field).on_axis(axis.name(), v)
}

fn g2_sweep(k: usize, p: f64, range: (f64, f64, f64), bounds: &str) -> Result<Job, CliError> {
    let points = grid_values(Axis::G2, range)?
        .into_iter()
        .map(|v| sym(k, p, Complex::new(v.sqrt(), 0.0), Field::Real, Axis::G2, v))
        .collect();
    Ok(Job::Sweep {
        points,
        bounds: bounds.into(),
    })
}

fn alpha_sweep(p: f64, range: (f64, f64, f64)) -> Result<Job, CliError> {
    let points = grid_values(Axis::Alpha, range)?
        .into_iter()
        .map(|a| {
            let g2 = p.powf(a - 1.0);
            sym(3, p, Complex::new(g2.sqrt(), 0.0), Field::Real, Axis::Alpha, a)
        })
        .collect();
    Ok(Job::Sweep {
        points,
        bounds: format!("new_upper,kramer,etw,gen_kramer,z_ext,best_upper,{LOWERS}"),
    })
}

/// Phase sweeps at each `|g|²`: axis `phase`, magnitude in the gain columns.
fn phase_family(k: usize, p: f64, mags: &[f64], phases: &[f64], bounds: &str) -> Job {
    let mut points = Vec::new();
    for &m in mags {
        for &ph in phases {
            points.push(sym(
                k,
                p,
                Complex::from_polar(m.sqrt(), ph),
                Field::Complex,
                Axis::Phase,
                ph,
            ));
        }
    }
    Job::Sweep {
        points,
        bounds: bounds.into(),
    }
}

fn recipe(id: &str, grid: Option<usize>) -> Result<Vec<Job>, CliError> {
    let surface = |m1: f64, m2: f64| {
        Job::Surface(SurfaceSpec {
            mags: (m1, m2),
            p: 10.0,
            grid_n: grid.unwrap_or(32),
        })
    };
    let upto = |stop: f64, step: f64| -> Vec<f64> {
        (0..)
            .map(|i| i as f64 * step)
            .take_while(|&x| x <= stop + 1e-9)
            .collect()
    };
    Ok(match id {
        "fig1" => vec![g2_sweep(3, 10.0, (0.0, 1.0, 0.02), &format!("{THREE_GENIE},{LOWERS}"))?],
        "fig4" => vec![alpha_sweep(10.0, (-1.0, 1.0, 0.05))?],
        "fig4a" => vec![alpha_sweep(100.0, (0.0, 2.0, 0.05))?],
        "fig11" => [3, 5, 10, 100]
            .into_iter()
            .map(|k| {
                g2_sweep(
                    k,
                    10.0,
                    (0.0, 2.0, 0.02),
                    &format!("prop1,prop2,prop3,kramer,closed_form_best,{LOWERS}"),
                )
            })
            .collect::<Result<_, _>>()?,
        "fig12" => [5.0, 100.0]
            .into_iter()
            .map(|p| {
                g2_sweep(
                    100_000,
                    p,
                    (0.0, 2.0, 0.02),
                    &format!("prop1,prop2,prop3,kramer,closed_form_best,{LOWERS}"),
                )
            })
            .collect::<Result<_, _>>()?,
        "fig13-like" => {
            let mut jobs = Vec::new();
            for (g2, ks) in [
                (1.1, vec![3, 5, 10, 30, 100, 1000]),
                (0.7, vec![3, 5, 10, 30, 100, 1000]),
                (1.5, vec![1000]),
            ] {
                for k in ks {
                    let points = grid_values(Axis::SnrDb, (0.0, 80.0, 2.0))?
                        .into_iter()
                        .map(|db| {
                            sym(
                                k,
                                10f64.powf(db / 10.0),
                                Complex::new(f64::sqrt(g2), 0.0),
                                Field::Real,
                                Axis::SnrDb,
                                db,
                            )
                        })
                        .collect();
                    jobs.push(Job::Sweep {
                        points,
                        bounds: "prop2,prop3,closed_form_best,lower_tdm,lower_snd,lower_best".into(),
                    });
                }
            }
            jobs
        }
        "fig2" => {
            let phases: Vec<f64> = (0..32).map(|i| PI * i as f64 / 16.0).collect();
            vec![phase_family(
                3,
                10.0,
                &upto(2.0, 0.1),
                &phases,
                &format!("{THREE_GENIE},kramer,etw,gen_kramer,z_ext,best_upper,{LOWERS}"),
            )]
        }
        "fig5" => {
            let phases: Vec<f64> = (0..=4).map(|i| PI * i as f64 / 8.0).collect();
            vec![phase_family(
                4,
                10.0,
                &upto(2.0, 0.05),
                &phases,
                &format!("thm5,thm6,kramer,etw,best_upper,{LOWERS}"),
            )]
        }
        "fig6" => vec![
            surface(0.3, 0.3),
            surface(0.5, 0.5),
            surface(0.7, 0.7),
            surface(1.0, 1.0),
        ],
        "fig8" => vec![surface(0.3, 0.7)],
        _ => {
            return Err(CliError::Config(format!(
                "unknown figure '{id}'; known: {}",
                FIGURES.join(", ")
            )))
        }
    })
}

/// Files written by [`reproduce`].
#[derive(Debug)]
pub struct Reproduced {
    pub csv: PathBuf,
    pub reports: Vec<PathBuf>,
    pub rows: Vec<Row>,
}

pub fn reproduce(
    id: &str,
    dir: &Path,
    grid: Option<usize>,
    cfg: &SearchConfig,
    threads: usize,
) -> Result<Reproduced, CliError> {
    let jobs = recipe(id, grid)?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut rows = Vec::new();
    let mut reports: Vec<ConjectureReport> = Vec::new();
    for job in jobs {
        match job {
            Job::Sweep { points, bounds } => rows.extend(evaluate(&points, &Selection::parse(&bounds)?, cfg, threads)?),
            Job::Surface(spec) => {
                let (r, rep) = run_surface(&spec, &Selection::List(vec![]), cfg, threads)?;
                rows.extend(r);
                reports.push(rep);
            }
        }
    }
    let csv = dir.join(format!("{id}.csv"));
    let file = std::fs::File::create(&csv).map_err(|e| CliError::Io(format!("{}: {e}", csv.display())))?;
    write_csv(std::io::BufWriter::new(file), &rows, true)?;
    let mut paths = Vec::new();
    for (i, rep) in reports.iter().enumerate() {
        let path = dir.join(format!("{id}_conjecture_{}.json", i + 1));
        let text = serde_json::to_string_pretty(rep).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        paths.push(path);
    }
    Ok(Reproduced {
        csv,
        reports: paths,
        rows,
    })
}
