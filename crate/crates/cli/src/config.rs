//! Settings shared by every verb, read from flags and an optional JSON file
//! with the same keys. Flags win over the file.

use std::path::{Path, PathBuf};

use gic_core::{Complex, Field, SearchConfig};
use serde::Deserialize;

use crate::CliError;

/// A scalar or a list in JSON.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Raw settings; every field optional so file and flags can be layered.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub p_db: Option<f64>,
    pub g: Option<String>,
    pub g2: Option<OneOrMany>,
    pub alpha: Option<f64>,
    pub field: Option<String>,
    pub bounds: Option<String>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub axis: Option<String>,
    pub range: Option<String>,
    pub search: Option<String>,
    pub normalize: Option<bool>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            k: over.k.or(self.k),
            p: over.p.or(self.p),
            p_db: over.p_db.or(self.p_db),
            g: over.g.or(self.g),
            g2: over.g2.or(self.g2),
            alpha: over.alpha.or(self.alpha),
            field: over.field.or(self.field),
            bounds: over.bounds.or(self.bounds),
            grid: over.grid.or(self.grid),
            out: over.out.or(self.out),
            threads: over.threads.or(self.threads),
            axis: over.axis.or(self.axis),
            range: over.range.or(self.range),
            search: over.search.or(self.search),
            normalize: over.normalize.or(self.normalize),
        }
    }

    pub fn k(&self) -> Result<usize, CliError> {
        let k = self.k.unwrap_or(3);
        if k < 2 {
            return Err(CliError::Config(format!("k = {k}: need at least 2 users")));
        }
        Ok(k)
    }

    /// Linear power from `p` or `p_db` (default 10).
    pub fn power(&self) -> Result<f64, CliError> {
        let p = match (self.p, self.p_db) {
            (Some(_), Some(_)) => return Err(CliError::Config("give p or p_db, not both".into())),
            (Some(p), None) => p,
            (None, Some(db)) => 10f64.powf(db / 10.0),
            (None, None) => 10.0,
        };
        if !(p.is_finite() && p >= 0.0) {
            return Err(CliError::Config(format!("power {p} must be finite and nonnegative")));
        }
        Ok(p)
    }

    /// The single cross gain of a symmetric scenario from `g`, `g2` or
    /// `alpha` (at most one; default 0).
    pub fn gain(&self, p: f64) -> Result<Complex<f64>, CliError> {
        let given = [self.g.is_some(), self.g2.is_some(), self.alpha.is_some()];
        if given.iter().filter(|&&b| b).count() > 1 {
            return Err(CliError::Config("give only one of g, g2, alpha".into()));
        }
        if let Some(s) = &self.g {
            return parse_complex(s);
        }
        if let Some(g2) = &self.g2 {
            let v = g2.clone().into_vec();
            if v.len() != 1 {
                return Err(CliError::Config("g2 takes one value here".into()));
            }
            return magnitude(v[0]);
        }
        if let Some(a) = self.alpha {
            let g2 = gic_core::alpha_to_gain(a, p).map_err(|e| CliError::Config(e.to_string()))?;
            return magnitude(g2);
        }
        Ok(Complex::new(0.0, 0.0))
    }

    /// Requested field, or the one implied by the data.
    pub fn field(&self, complex_data: bool) -> Result<Field, CliError> {
        match self.field.as_deref() {
            None => Ok(if complex_data { Field::Complex } else { Field::Real }),
            Some("complex") => Ok(Field::Complex),
            Some("real") if complex_data => Err(CliError::Config("real field with complex gains".into())),
            Some("real") => Ok(Field::Real),
            Some(other) => Err(CliError::Config(format!("unknown field '{other}'"))),
        }
    }

    pub fn search(&self) -> Result<SearchConfig, CliError> {
        match self.search.as_deref() {
            None | Some("fast") => Ok(SearchConfig::fast()),
            Some("default") => Ok(SearchConfig::default()),
            Some(other) => Err(CliError::Config(format!("unknown search preset '{other}'"))),
        }
    }

    pub fn threads(&self) -> Result<usize, CliError> {
        match self.threads {
            Some(0) => Err(CliError::Config("threads must be positive".into())),
            Some(t) => Ok(t),
            None => Ok(1),
        }
    }

    /// `start:stop:step`.
    pub fn range(&self) -> Result<Option<(f64, f64, f64)>, CliError> {
        let Some(s) = &self.range else { return Ok(None) };
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Config(format!("range '{s}' is not start:stop:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|x| parse_real(x))
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        Ok(Some((v[0], v[1], v[2])))
    }
}

fn magnitude(g2: f64) -> Result<Complex<f64>, CliError> {
    if !(g2.is_finite() && g2 >= 0.0) {
        return Err(CliError::Config(format!("g2 = {g2} must be nonnegative")));
    }
    Ok(Complex::new(g2.sqrt(), 0.0))
}

/// Real literal, also accepting `pi` and `2pi`-style multiples.
pub fn parse_real(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    let bad = || CliError::Config(format!("'{s}' is not a number"));
    if let Some(m) = t.strip_suffix("pi") {
        let m = m.trim_end_matches('*');
        let f = match m {
            "" => 1.0,
            "-" => -1.0,
            _ => m.parse::<f64>().map_err(|_| bad())?,
        };
        return Ok(f * std::f64::consts::PI);
    }
    t.parse::<f64>().map_err(|_| bad())
}

/// Complex literal `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex<f64>, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Config(format!("'{s}' is not a complex number a+bi"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not the leading one or part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |x: &str| -> Result<f64, CliError> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex::new(re, imag(&body[i..])?))
        }
        None => Ok(Complex::new(0.0, imag(body)?)),
    }
}
