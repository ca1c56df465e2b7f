//! JSON scenario files: an explicit gain matrix, a symmetric channel or a
//! circulant one.
//!
//! ```json
//! {"k": 3, "field": "complex", "p": 10, "h": [[{"re": 1, "im": 0}, ...], ...]}
//! {"sym": {"g": {"re": 0.5, "im": 0}, "p": 10}}
//! {"semisym": {"g_list": [{"re": 0.3}, {"re": 0.5}], "p": 10}}
//! ```

use std::path::Path;

use gic_core::{Channel64, Complex, Field, C64};
use serde::Deserialize;

use crate::bounds::Point;
use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct JsonComplex {
    re: f64,
    #[serde(default)]
    im: f64,
}

impl From<JsonComplex> for C64 {
    fn from(c: JsonComplex) -> Self {
        Complex::new(c.re, c.im)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Matrix {
    k: usize,
    #[serde(default)]
    field: Option<String>,
    p: f64,
    h: Vec<Vec<JsonComplex>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymBody {
    g: JsonComplex,
    p: f64,
    #[serde(default)]
    k: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sym {
    sym: SymBody,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SemiSymBody {
    g_list: Vec<JsonComplex>,
    p: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SemiSym {
    semisym: SemiSymBody,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScenarioFile {
    Matrix(Matrix),
    Sym(Sym),
    SemiSym(SemiSym),
}

fn bad(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

fn check_power(p: f64) -> Result<f64, CliError> {
    if p.is_finite() && p >= 0.0 {
        Ok(p)
    } else {
        Err(bad(format!("power {p} must be finite and nonnegative")))
    }
}

fn parse_field(s: Option<&str>, complex_data: bool) -> Result<Field, CliError> {
    match s {
        None => Ok(if complex_data { Field::Complex } else { Field::Real }),
        Some("complex") => Ok(Field::Complex),
        Some("real") => Ok(Field::Real),
        Some(other) => Err(bad(format!("unknown field '{other}'"))),
    }
}

/// Parse a scenario document. `k` supplies the user count of a `sym`
/// document that does not carry one (default 3).
pub fn parse_scenario(text: &str, k: Option<usize>) -> Result<Point, CliError> {
    let doc: ScenarioFile = serde_json::from_str(text)
        .map_err(|_| bad("scenario must be {k, field, p, h}, {\"sym\": {g, p}} or {\"semisym\": {g_list, p}}"))?;
    match doc {
        ScenarioFile::Sym(Sym { sym }) => {
            let k = sym.k.or(k).unwrap_or(3);
            if k < 2 {
                return Err(bad(format!("k = {k}: need at least 2 users")));
            }
            let g = C64::from(sym.g);
            Ok(Point::symmetric(
                k,
                check_power(sym.p)?,
                g,
                parse_field(None, g.im != 0.0)?,
            ))
        }
        ScenarioFile::SemiSym(SemiSym { semisym }) => {
            let gains: Vec<C64> = semisym.g_list.into_iter().map(C64::from).collect();
            if gains.is_empty() {
                return Err(bad("g_list needs at least one gain"));
            }
            let p = check_power(semisym.p)?;
            let field = parse_field(None, gains.iter().any(|g| g.im != 0.0))?;
            let mut pt = Point::symmetric(gains.len() + 1, p, gains[0], field);
            pt.gains = gains;
            Ok(pt)
        }
        ScenarioFile::Matrix(m) => {
            if m.h.len() != m.k {
                return Err(bad(format!("h has {} rows for k = {}", m.h.len(), m.k)));
            }
            let rows: Vec<Vec<C64>> =
                m.h.into_iter()
                    .map(|r| r.into_iter().map(C64::from).collect())
                    .collect();
            let complex_data = rows.iter().flatten().any(|c| c.im != 0.0);
            let field = parse_field(m.field.as_deref(), complex_data)?;
            let p = check_power(m.p)?;
            let ch = Channel64::new(rows, vec![p; m.k], field).map_err(bad)?;
            Ok(Point::from_channel(ch))
        }
    }
}

pub fn load_scenario(path: &Path, k: Option<usize>) -> Result<Point, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    parse_scenario(&text, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_shapes() {
        let pt = parse_scenario(r#"{"sym": {"g": {"re": 0.5, "im": 0}, "p": 10}}"#, Some(4)).unwrap();
        assert_eq!((pt.k, pt.gains.len(), pt.field), (4, 1, Field::Real));
        let pt = parse_scenario(
            r#"{"semisym": {"g_list": [{"re": 0.3}, {"re": 0, "im": 0.5}], "p": 10}}"#,
            None,
        )
        .unwrap();
        assert_eq!((pt.k, pt.gains.len(), pt.field), (3, 2, Field::Complex));
        assert!(pt.matrix.is_none());
        let h = r#"{"k": 3, "field": "real", "p": 10, "h": [
            [{"re": 1}, {"re": 0.2}, {"re": 0.4}],
            [{"re": 0.1}, {"re": 1}, {"re": 0.3}],
            [{"re": 0.5}, {"re": 0.6}, {"re": 1}]]}"#;
        let pt = parse_scenario(h, None).unwrap();
        assert!(pt.matrix.is_some());
        assert_eq!(pt.channel().unwrap().h(2, 0), Complex::new(0.5, 0.0));
    }

    #[test]
    fn matrix_that_is_symmetric_collapses() {
        let h = r#"{"k": 3, "field": "complex", "p": 10, "h": [
            [{"re": 1}, {"re": 0.2}, {"re": 0.2}],
            [{"re": 0.2}, {"re": 1}, {"re": 0.2}],
            [{"re": 0.2}, {"re": 0.2}, {"re": 1}]]}"#;
        let pt = parse_scenario(h, None).unwrap();
        assert!(pt.matrix.is_none());
        assert_eq!(pt.symmetric_gain(), Some(Complex::new(0.2, 0.0)));
        assert_eq!(pt.field, Field::Complex);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_scenario(r#"{"sym": {"g": {"re": 0.5}, "p": 10, "x": 1}}"#, None).is_err());
        assert!(parse_scenario(
            r#"{"k": 2, "p": 10, "h": [[{"re": 2}, {"re": 0}], [{"re": 0}, {"re": 1}]]}"#,
            None
        )
        .is_err());
        assert!(parse_scenario(
            r#"{"k": 2, "field": "real", "p": 10, "h": [[{"re": 1}, {"re": 0, "im": 1}], [{"re": 0}, {"re": 1}]]}"#,
            None
        )
        .is_err());
        assert!(parse_scenario(r#"{"semisym": {"g_list": [], "p": 10}}"#, None).is_err());
    }
}
