use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gic_cli::bounds::{Point, Selection};
use gic_cli::config::{OneOrMany, Settings};
use gic_cli::reproduce::reproduce;
use gic_cli::run::{evaluate, infeasible_everywhere, largek, run_surface, sweep_points, write_csv, Row, SurfaceSpec};
use gic_cli::scenario::load_scenario;
use gic_cli::CliError;

#[derive(Parser)]
#[command(
    name = "gic",
    version,
    about = "Sum-capacity bounds for K-user Gaussian interference channels"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Evaluate bounds at one scenario.
    Eval(Common),
    /// Sweep one axis (alpha, g2, phase, snr_db, K).
    Sweep(Common),
    /// Three-user semi-symmetric phase surface with a conjecture report.
    Surface(Common),
    /// Power offset, DoF regime and closed-form bound for large K.
    Largek(Common),
    /// Write the data behind a standard figure.
    Reproduce {
        /// fig1, fig4, fig4a, fig11, fig12, fig13-like, fig2, fig5, fig6, fig8
        id: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON file with any of the options below (flags take precedence).
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON scenario file (gain matrix, sym or semisym); eval only.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    /// Power, linear.
    #[arg(long)]
    p: Option<f64>,
    /// Power in dB.
    #[arg(long = "p-db", allow_hyphen_values = true)]
    p_db: Option<f64>,
    /// Complex cross gain, e.g. 0.3+0.4i.
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    /// Squared cross-gain magnitude; surfaces take two, comma separated.
    #[arg(long, value_delimiter = ',')]
    g2: Option<Vec<f64>>,
    /// log INR / log SNR.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// real or complex.
    #[arg(long)]
    field: Option<String>,
    /// Comma list of bound names, or "all".
    #[arg(long)]
    bounds: Option<String>,
    /// Points per phase axis of a surface.
    #[arg(long)]
    grid: Option<usize>,
    /// Output file (directory for reproduce); stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Sweep axis.
    #[arg(long)]
    axis: Option<String>,
    /// Sweep range start:stop:step (pi multiples allowed, e.g. 0:2pi:0.125pi).
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Search preset: fast (default) or default.
    #[arg(long)]
    search: Option<String>,
}

impl Common {
    fn settings(&self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let flags = Settings {
            k: self.k,
            p: self.p,
            p_db: self.p_db,
            g: self.g.clone(),
            g2: self.g2.clone().map(OneOrMany::Many),
            alpha: self.alpha,
            field: self.field.clone(),
            bounds: self.bounds.clone(),
            grid: self.grid,
            out: self.out.clone(),
            threads: self.threads,
            axis: self.axis.clone(),
            range: self.range.clone(),
            search: self.search.clone(),
            normalize: None,
        };
        Ok(file.overlay(flags))
    }
}

fn emit(s: &Settings, rows: &[Row]) -> Result<(), CliError> {
    let normalize = s.normalize.unwrap_or(true);
    match &s.out {
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            write_csv(std::io::BufWriter::new(f), rows, normalize)?;
        }
        None => write_csv(std::io::stdout().lock(), rows, normalize)?,
    }
    if infeasible_everywhere(rows) {
        return Err(CliError::InfeasibleEverywhere);
    }
    Ok(())
}

fn write_json(path: Option<&PathBuf>, value: &impl serde::Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.verb {
        Verb::Eval(c) => {
            let s = c.settings()?;
            let pt = match &c.scenario {
                Some(path) => {
                    if s.p.is_some() || s.p_db.is_some() || s.g.is_some() || s.g2.is_some() || s.alpha.is_some() {
                        return Err(CliError::Config("the scenario file fixes power and gains".into()));
                    }
                    load_scenario(path, s.k)?
                }
                None => {
                    let (k, p) = (s.k()?, s.power()?);
                    let g = s.gain(p)?;
                    Point::symmetric(k, p, g, s.field(g.im != 0.0)?)
                }
            };
            let sel = Selection::parse(s.bounds.as_deref().unwrap_or("all"))?;
            let rows = evaluate(&[pt], &sel, &s.search()?, s.threads()?)?;
            emit(&s, &rows)
        }
        Verb::Sweep(c) => {
            let s = c.settings()?;
            let sel = Selection::parse(s.bounds.as_deref().unwrap_or("all"))?;
            let points = sweep_points(&s)?;
            let rows = evaluate(&points, &sel, &s.search()?, s.threads()?)?;
            emit(&s, &rows)
        }
        Verb::Surface(c) => {
            let s = c.settings()?;
            let spec = SurfaceSpec::from_settings(&s)?;
            let extra = Selection::parse(s.bounds.as_deref().unwrap_or(""))?;
            let (rows, report) = run_surface(&spec, &extra, &s.search()?, s.threads()?)?;
            let report_path = s.out.as_ref().map(|p| p.with_extension("conjecture.json"));
            match &report_path {
                Some(_) => write_json(report_path.as_ref(), &report)?,
                None => eprintln!(
                    "{}",
                    serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?
                ),
            }
            emit(&s, &rows)
        }
        Verb::Largek(c) => {
            let s = c.settings()?;
            let p = s.power()?;
            let report = largek(s.k.unwrap_or(100_000), p, s.gain(p)?)?;
            write_json(s.out.as_ref(), &report)
        }
        Verb::Reproduce { id, common } => {
            let s = common.settings()?;
            let dir = s.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let done = reproduce(&id, &dir, s.grid, &s.search()?, s.threads()?)?;
            eprintln!("wrote {} ({} rows)", done.csv.display(), done.rows.len());
            for r in &done.reports {
                eprintln!("wrote {}", r.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gic: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
