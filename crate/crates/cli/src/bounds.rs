//! Bound registry: names accepted by `--bounds`, their applicability, and
//! evaluation at one scenario point.

use std::cell::OnceCell;

use gic_core::baselines::{etw_two_user, z_extension_three};
use gic_core::genie3::{baseline_uppers_three, three_user_bounds, ThreeUserBounds};
use gic_core::kuser::{asym_kub2b_optimize, asym_kub3b_optimize, prop3_best, thm5_bound, thm6_bound};
use gic_core::{
    closed_form_best, gen_kramer_three, kramer_two_user, lower_bounds, make_semi_symmetric, min_result, prop1_closed,
    prop2_closed, BoundResult64, Channel64, Complex, Field, SearchConfig, TieMode, C64,
};

use crate::CliError;

/// Genie bounds of the three-user channel (any coefficients).
pub const THREE_USER: [&str; 6] = ["thm1", "thm2a", "thm2b", "thm3_i0", "thm3_i1", "new_upper"];
/// Prior three-user bounds; `gen_kramer` needs a symmetric channel.
pub const THREE_USER_BASELINES: [&str; 2] = ["gen_kramer", "z_ext"];
/// Two-user bounds scaled to K users; need equal cross magnitudes.
pub const TWO_USER: [&str; 2] = ["kramer", "etw"];
/// Symmetric K-user bounds and closed forms.
pub const K_USER: [&str; 6] = ["thm5", "thm6", "prop1", "prop2", "prop3", "closed_form_best"];
pub const COMBINED: &str = "best_upper";
pub const LOWER: [&str; 4] = ["lower_tin", "lower_tdm", "lower_snd", "lower_best"];
/// Asymmetric forms that can fall below achievable rates; only evaluated
/// when named explicitly and never part of `all` or `best_upper`.
pub const ASYMMETRIC: [&str; 2] = ["kub2b", "kub3b"];

pub fn is_known(name: &str) -> bool {
    THREE_USER
        .iter()
        .chain(&THREE_USER_BASELINES)
        .chain(&TWO_USER)
        .chain(&K_USER)
        .chain(&LOWER)
        .chain(&ASYMMETRIC)
        .any(|n| *n == name)
        || name == COMBINED
}

pub fn is_lower(name: &str) -> bool {
    name.starts_with("lower_")
}

/// `all`, or an explicit list (possibly empty).
#[derive(Clone, Debug, PartialEq)]
pub enum Selection {
    All,
    List(Vec<String>),
}

impl Selection {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let spec = spec.trim();
        if spec == "all" {
            return Ok(Selection::All);
        }
        let names: Vec<String> = spec
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        for n in &names {
            if !is_known(n) {
                return Err(CliError::Config(format!("unknown bound '{n}'")));
            }
        }
        Ok(Selection::List(names))
    }

    pub fn names(&self, pt: &Point) -> Vec<String> {
        match self {
            Selection::List(v) => v.clone(),
            Selection::All => applicable(pt),
        }
    }
}

/// One scenario: a symmetric channel (`gains.len() == 1`), a circulant
/// one (`gains.len() == K − 1`) or an explicit gain matrix, tagged with its
/// sweep coordinate. With a matrix, `gains` holds `h[0][1]` and `h[0][2]`
/// for display only.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub k: usize,
    pub p: f64,
    pub gains: Vec<C64>,
    pub field: Field,
    pub axis: String,
    pub axis_value: Option<f64>,
    pub matrix: Option<Channel64>,
}

impl Point {
    pub fn symmetric(k: usize, p: f64, g: C64, field: Field) -> Self {
        Point {
            k,
            p,
            gains: vec![g],
            field,
            axis: "none".into(),
            axis_value: None,
            matrix: None,
        }
    }

    /// Symmetric or circulant channels become the compact form; anything
    /// else keeps its matrix. Requires a common power.
    pub fn from_channel(ch: Channel64) -> Self {
        let k = ch.k();
        let p = ch.p(0);
        let field = ch.field();
        if let Some(g) = ch.symmetric_gain() {
            return Point::symmetric(k, p, g, field);
        }
        let first: Vec<C64> = (1..k).map(|i| ch.h(0, i)).collect();
        let circulant =
            ch.common_power().is_some() && (0..k).all(|r| (1..k).all(|i| ch.h(r, (r + i) % k) == first[i - 1]));
        let mut pt = Point::symmetric(k, p, first[0], field);
        if circulant {
            pt.gains = first;
        } else {
            pt.gains = first.into_iter().take(2).collect();
            pt.matrix = Some(ch);
        }
        pt
    }

    pub fn on_axis(mut self, axis: &str, value: f64) -> Self {
        self.axis = axis.into();
        self.axis_value = Some(value);
        self
    }

    pub fn symmetric_gain(&self) -> Option<C64> {
        if self.matrix.is_some() {
            return None;
        }
        if self.gains.len() == 1 || self.gains.windows(2).all(|w| w[0] == w[1]) {
            self.gains.first().copied()
        } else {
            None
        }
    }

    fn equal_magnitude(&self) -> Option<f64> {
        if let Some(ch) = &self.matrix {
            return ch.equal_cross_magnitude();
        }
        let m = self.gains.first()?.norm();
        self.gains
            .iter()
            .all(|g| (g.norm() - m).abs() <= 1e-12 * m.max(1.0))
            .then_some(m)
    }

    pub fn channel(&self) -> Result<Channel64, CliError> {
        if let Some(ch) = &self.matrix {
            return Ok(ch.clone());
        }
        let list = if self.gains.len() == 1 {
            vec![self.gains[0]; self.k - 1]
        } else {
            self.gains.clone()
        };
        make_semi_symmetric(self.k, &list, self.p).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Every safe bound that applies to the point, in registry order.
pub fn applicable(pt: &Point) -> Vec<String> {
    let sym = pt.symmetric_gain().is_some();
    let mut out: Vec<&str> = Vec::new();
    if pt.k == 3 {
        out.extend(THREE_USER);
        if sym {
            out.push("gen_kramer");
        }
        out.push("z_ext");
    }
    if pt.equal_magnitude().is_some() {
        out.extend(TWO_USER);
    }
    if sym && pt.k >= 3 {
        out.extend(K_USER);
    }
    if pt.k == 3 || sym {
        out.push(COMBINED);
    }
    if sym {
        out.extend(LOWER);
    } else {
        out.push("lower_tdm");
    }
    out.into_iter().map(String::from).collect()
}

/// Largest K for which the per-coefficient bounds are attempted.
pub const MAX_DENSE_K: usize = 2000;

/// Lazily shared intermediate results for one point.
pub struct Evaluator<'a> {
    pt: &'a Point,
    cfg: &'a SearchConfig,
    ch: OnceCell<Channel64>,
    three: OnceCell<Option<ThreeUserBounds<f64>>>,
    thm5: OnceCell<BoundResult64>,
    thm6: OnceCell<BoundResult64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(pt: &'a Point, cfg: &'a SearchConfig) -> Result<Self, CliError> {
        if pt.matrix.is_none() && (pt.k < 2 || (pt.gains.len() != 1 && pt.gains.len() != pt.k - 1)) {
            return Err(CliError::Config(format!(
                "{} gains do not describe a {}-user channel",
                pt.gains.len(),
                pt.k
            )));
        }
        Ok(Evaluator {
            pt,
            cfg,
            ch: OnceCell::new(),
            three: OnceCell::new(),
            thm5: OnceCell::new(),
            thm6: OnceCell::new(),
        })
    }

    fn k(&self) -> usize {
        self.pt.k
    }

    /// The dense gain matrix holds K² entries, so it is built only for the
    /// bounds that read individual coefficients.
    fn ch(&self) -> Option<&Channel64> {
        (self.k() <= MAX_DENSE_K).then(|| self.ch.get_or_init(|| self.pt.channel().expect("validated in new")))
    }

    fn infeasible(&self, name: &str) -> BoundResult64 {
        BoundResult64::infeasible(name, self.k())
    }

    fn three(&self) -> Option<&ThreeUserBounds<f64>> {
        self.three
            .get_or_init(|| {
                if self.k() == 3 {
                    three_user_bounds(self.ch()?, self.cfg).ok()
                } else {
                    None
                }
            })
            .as_ref()
    }

    fn sym(&self) -> Option<C64> {
        if self.k() >= 3 {
            self.pt.symmetric_gain()
        } else {
            None
        }
    }

    fn two_user(&self, etw: bool) -> Option<BoundResult64> {
        let m = self.pt.equal_magnitude()?;
        let g = Complex::new(m, 0.0);
        let r = if etw {
            etw_two_user(self.pt.p, g)
        } else {
            kramer_two_user(self.pt.p, g)
        };
        Some(r.for_users(self.k()))
    }

    fn thm5(&self) -> BoundResult64 {
        self.thm5
            .get_or_init(|| match self.sym() {
                Some(g) => thm5_bound(self.k(), g, self.pt.p, self.cfg, TieMode::Tied)
                    .unwrap_or_else(|_| self.infeasible("thm5")),
                None => self.infeasible("thm5"),
            })
            .clone()
    }

    fn thm6(&self) -> BoundResult64 {
        self.thm6
            .get_or_init(|| match self.sym() {
                Some(g) => thm6_bound(self.k(), g, self.pt.p, self.cfg, TieMode::Tied)
                    .unwrap_or_else(|_| self.infeasible("thm6")),
                None => self.infeasible("thm6"),
            })
            .clone()
    }

    fn best_upper(&self) -> BoundResult64 {
        let k = self.k();
        let mut all = Vec::new();
        if k == 3 {
            if let Some(t) = self.three() {
                all.push(t.min());
            }
            if let Ok(b) = baseline_uppers_three(self.ch().unwrap(), self.cfg) {
                all.extend(b);
            }
        } else {
            all.extend(self.two_user(false));
            all.extend(self.two_user(true));
            if let Some(g) = self.sym() {
                all.push(self.thm5());
                all.push(self.thm6());
                all.push(closed_form_best(k, g, self.pt.p));
            }
        }
        min_result(COMBINED, k, all)
    }

    fn lower(&self, name: &str) -> BoundResult64 {
        let k = self.k();
        let g = match self.pt.symmetric_gain() {
            Some(g) => g,
            // Time division does not see the cross gains.
            None if name == "lower_tdm" => Complex::new(0.0, 0.0),
            None => return self.infeasible(name),
        };
        let lb = lower_bounds(k, g, self.pt.p);
        let v = match name {
            "lower_tin" => lb.tin,
            "lower_tdm" => lb.tdm,
            "lower_snd" => lb.snd,
            _ => lb.best,
        };
        BoundResult64::new(name, k, v * k as f64)
    }

    /// Evaluate one registered bound; inapplicable bounds come back
    /// infeasible.
    pub fn eval(&self, name: &str) -> BoundResult64 {
        let k = self.k();
        let r = match name {
            "thm1" => self.three().map(|t| t.thm1.clone()),
            "thm2a" => self.three().map(|t| t.thm2a.clone()),
            "thm2b" => self.three().map(|t| t.thm2b.clone()),
            "thm3_i0" => self.three().map(|t| t.thm3_i0.clone()),
            "thm3_i1" => self.three().map(|t| t.thm3_i1.clone()),
            "new_upper" => self.three().map(|t| t.min()),
            "gen_kramer" => (k == 3).then(|| gen_kramer_three(self.ch()?, self.cfg).ok()).flatten(),
            "z_ext" => (k == 3).then(|| z_extension_three(self.ch()?).ok()).flatten(),
            "kramer" => self.two_user(false),
            "etw" => self.two_user(true),
            "thm5" => Some(self.thm5()),
            "thm6" => Some(self.thm6()),
            "prop1" => self.sym().map(|g| prop1_closed(k, g, self.pt.p)),
            "prop2" => self.sym().map(|g| prop2_closed(k, g, self.pt.p)),
            "prop3" => self.sym().map(|g| prop3_best(k, g, self.pt.p)),
            "closed_form_best" => self.sym().map(|g| closed_form_best(k, g, self.pt.p)),
            "best_upper" => Some(self.best_upper()),
            "kub2b" => (k >= 3)
                .then(|| asym_kub2b_optimize(self.ch()?, None, self.cfg).ok())
                .flatten(),
            "kub3b" => (k >= 3)
                .then(|| asym_kub3b_optimize(self.ch()?, None, self.cfg).ok())
                .flatten(),
            n if is_lower(n) => Some(self.lower(n)),
            _ => None,
        };
        r.unwrap_or_else(|| self.infeasible(name)).renamed(name)
    }
}
