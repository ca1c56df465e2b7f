//! Prior-work upper bounds (two-user Kramer and ETW, three-user generalized
//! Kramer, Z-channel extension) and the simple lower bounds.

use num_complex::Complex;
use thiserror::Error;

use crate::bound::{min_result, BoundResult};
use crate::channel::Channel;
use crate::perm::permutations;
use crate::scalar::{log2, Real, C};
use crate::search::{coordinate_descent, line_min, linspace, phase_grid, Coord, SearchConfig};
use crate::system::{mi, UserSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("bound needs a symmetric {0}-user channel")]
    NotSymmetric(usize),
    #[error("bound needs K = {expected}, got {got}")]
    WrongK { expected: usize, got: usize },
    #[error("invalid permutation {0:?}")]
    BadPermutation(Vec<usize>),
}

fn two<T: Real>() -> T {
    T::lit(2.0)
}

/// Two-user Kramer bound on the symmetric rate, reported as a two-user
/// result (`sum_rate` = 2 × per-user). Use [`BoundResult::for_users`] for
/// K users.
///
/// `|g| < 1`: `½log(1+P) + ½log(1+P/(1+|g|²P))`; otherwise `½log(1+P+|g|²P)`.
pub fn kramer_two_user<T: Real>(p: T, g: C<T>) -> BoundResult<T> {
    let g2 = g.norm_sqr();
    let half = T::lit(0.5);
    let per = if g2 < T::one() {
        half * log2(T::one() + p) + half * log2(T::one() + p / (T::one() + g2 * p))
    } else {
        half * log2(T::one() + p + g2 * p)
    };
    BoundResult::new("kramer", 2, two::<T>() * per)
}

/// ETW bound on the symmetric rate: `log(1 + |g|²P + P/(1+|g|²P))`.
pub fn etw_two_user<T: Real>(p: T, g: C<T>) -> BoundResult<T> {
    let inr = g.norm_sqr() * p;
    let per = log2(T::one() + inr + p / (T::one() + inr));
    BoundResult::new("etw", 2, two::<T>() * per)
}

/// Objective of the generalized Kramer bound in the admissible branch;
/// `+∞` where the quadratic-form condition `2|g|²(1-Re ρ)/(1-|ρ|²) ≥ 1`
/// fails or `|ρ| ≥ 1`.
pub fn gen_kramer_objective<T: Real>(p: T, g: C<T>, rho: C<T>) -> T {
    let r2 = rho.norm_sqr();
    if !(r2 < T::one()) {
        return T::infinity();
    }
    let g2 = g.norm_sqr();
    let q = two::<T>() * g2 * (T::one() - rho.re) / (T::one() - r2);
    if q < T::one() - T::feas_tol() {
        return T::infinity();
    }
    gen_kramer_value(p, g, rho)
}

/// The generalized Kramer expression without the admissibility check.
///
/// Written in `δ = 1 − ρ`: the infimum sits at `ρ → 1`, where the direct
/// form `P+|g|²P+1 − |ḡ(g+1)P + ρ̄|²/(2|g|²P+1)` cancels catastrophically.
/// Expanding gives the numerator `|1−g|²P(|g|²P+1) + 2Re((u+1)δ) − |δ|²`
/// with `u = ḡ(g+1)P`, and `1 − |ρ|² = 2Re δ − |δ|²`.
pub fn gen_kramer_value<T: Real>(p: T, g: C<T>, rho: C<T>) -> T {
    let g2 = g.norm_sqr();
    let one = T::one();
    let delta = Complex::new(one - rho.re, -rho.im);
    let d2 = delta.norm_sqr();
    let den = two::<T>() * delta.re - d2;
    let a = (p + two::<T>() * g2 * p + one) / den;
    let u = g.conj() * (g + one) * p;
    let lead = Complex::new(one - g.re, -g.im).norm_sqr() * p * (g2 * p + one);
    let num = lead + two::<T>() * ((u + one) * delta).re - d2;
    let b = num / (two::<T>() * g2 * p + one);
    if !(a > T::zero() && b > T::zero()) {
        return T::infinity();
    }
    log2(a) + log2(b)
}

/// Three-user generalized Kramer bound (sum rate), minimized over the
/// noise correlation `ρ`. Real `ρ` for real `g`, magnitude/phase grid
/// otherwise, each followed by local refinement.
pub fn gen_kramer_three<T: Real>(ch: &Channel<T>, cfg: &SearchConfig) -> Result<BoundResult<T>, BoundError> {
    if ch.k() != 3 {
        return Err(BoundError::WrongK {
            expected: 3,
            got: ch.k(),
        });
    }
    let g = ch.symmetric_gain().ok_or(BoundError::NotSymmetric(3))?;
    let p = ch.common_power().unwrap();
    let (rho, val) = if g.im == T::zero() {
        let hi = (two::<T>() * g.norm_sqr() - T::one()).min(T::one());
        if hi <= -T::one() {
            (Complex::default(), T::infinity())
        } else {
            let f = |r: T| gen_kramer_objective(p, g, Complex::new(r, T::zero()));
            let n = cfg.gen_kramer_mag_points * 2;
            let (r, v) = line_min(f, -T::one(), hi, n);
            (Complex::new(r, T::zero()), v)
        }
    } else {
        let f = |x: &[T]| gen_kramer_objective(p, g, Complex::from_polar(x[0], x[1]));
        let mags = linspace(T::zero(), T::one(), cfg.gen_kramer_mag_points);
        let phases = phase_grid::<T>(cfg.phase_points);
        let mut best = (vec![T::zero(), T::zero()], T::infinity());
        for &m in &mags {
            for &ph in &phases {
                let v = f(&[m, ph]);
                if v < best.1 {
                    best = (vec![m, ph], v);
                }
            }
        }
        let coords = [
            Coord::new(T::zero(), T::one(), cfg.gen_kramer_mag_points),
            Coord::phase(cfg.phase_points),
        ];
        let (x, v) = coordinate_descent(f, &coords, best.0, 1, cfg.refine_factor);
        let (x, v) = polish_polar(&f, x, v);
        (Complex::from_polar(x[0], x[1]), v)
    };
    Ok(BoundResult::new("gen_kramer", 3, val).with_params(vec![("rho_re".into(), rho.re), ("rho_im".into(), rho.im)]))
}

/// Alternating golden-section polish on (magnitude, phase).
fn polish_polar<T: Real>(f: &impl Fn(&[T]) -> T, mut x: Vec<T>, mut v: T) -> (Vec<T>, T) {
    if !v.is_finite() {
        return (x, v);
    }
    let dm = T::lit(0.01);
    let dp = T::lit(0.05);
    for _ in 0..4 {
        let ph = x[1];
        let (m, vm) = crate::search::golden_min(
            |m| f(&[m, ph]),
            (x[0] - dm).max(T::zero()),
            (x[0] + dm).min(T::one()),
            50,
        );
        if vm < v {
            x[0] = m;
            v = vm;
        }
        let mg = x[0];
        let (p, vp) = crate::search::golden_min(|p| f(&[mg, p]), x[1] - dp, x[1] + dp, 50);
        if vp < v {
            x[1] = p;
            v = vp;
        }
    }
    (x, v)
}

/// Z-channel extension value for one ordering, or `+∞` when
/// `|h12|², |h23|², |h31|² ≤ 1` fails.
pub fn z_extension_value<T: Real>(ch: &Channel<T>) -> T {
    if (0..3).any(|k| ch.h(k, (k + 1) % 3).norm_sqr() > T::one() + T::feas_tol()) {
        return T::infinity();
    }
    let s = UserSystem::new(ch);
    let mut total = T::zero();
    for k in 0..3 {
        let prev = (k + 2) % 3;
        let next = (k + 1) % 3;
        let xk = std::slice::from_ref(&s.x[k]);
        let yk = std::slice::from_ref(&s.y[k]);
        total += mi(xk, yk, &s.xs(&[next, prev]));
        total += mi(xk, yk, &s.xs(&[prev]));
    }
    total * T::lit(0.5)
}

/// Z-channel extension bound, minimized over the six user orderings that
/// satisfy its coefficient conditions.
pub fn z_extension_three<T: Real>(ch: &Channel<T>) -> Result<BoundResult<T>, BoundError> {
    if ch.k() != 3 {
        return Err(BoundError::WrongK {
            expected: 3,
            got: ch.k(),
        });
    }
    Ok(min_result(
        "z_ext",
        3,
        permutations(3).into_iter().map(|perm| {
            let v = z_extension_value(&ch.permuted(&perm));
            BoundResult::new("z_ext", 3, v).with_permutation(perm)
        }),
    ))
}

/// Symmetric-rate lower bounds, bits per complex use per user.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBounds<T: Real> {
    pub tin: T,
    pub tdm: T,
    pub snd: T,
    pub best: T,
}

impl<T: Real> LowerBounds<T> {
    /// Named results for `k` users.
    pub fn results(&self, k: usize) -> Vec<BoundResult<T>> {
        let kk = T::from_usize(k).unwrap();
        vec![
            BoundResult::new("lower_best", k, self.best * kk),
            BoundResult::new("lower_snd", k, self.snd * kk),
            BoundResult::new("lower_tdm", k, self.tdm * kk),
            BoundResult::new("lower_tin", k, self.tin * kk),
        ]
    }
}

/// Treating interference as noise, time division with power control, and
/// simultaneous non-unique decoding (subsets containing the intended user).
pub fn lower_bounds<T: Real>(k: usize, g: C<T>, p: T) -> LowerBounds<T> {
    let g2 = g.norm_sqr();
    let kf = T::from_usize(k).unwrap();
    let one = T::one();
    let tin = log2(one + p / (one + (kf - one) * g2 * p));
    let tdm = log2(one + kf * p) / kf;
    let snd = (1..=k)
        .map(|s| {
            let sf = T::from_usize(s).unwrap();
            log2(one + p + (sf - one) * g2 * p) / sf
        })
        .fold(T::infinity(), T::min);
    let best = tin.max(tdm).max(snd);
    LowerBounds { tin, tdm, snd, best }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::make_symmetric;

    #[test]
    fn kramer_examples() {
        let r = kramer_two_user(10.0, Complex::new(0.0, 0.0));
        assert!((r.per_user() - 11f64.log2()).abs() < 1e-12);
        let r = kramer_two_user(10.0, Complex::new(2f64.sqrt(), 0.0));
        assert!((r.per_user() - 0.5 * 31f64.log2()).abs() < 1e-12);
        let r = kramer_two_user(5.0, Complex::new(0.9f64.sqrt(), 0.0)).for_users(3);
        assert!((r.normalized - 0.8795).abs() < 5e-4);
    }

    #[test]
    fn etw_examples() {
        let r = etw_two_user(10.0, Complex::new(0.5f64.sqrt(), 0.0));
        assert!((r.per_user() - 2.9386).abs() < 1e-4);
        let r = etw_two_user(10.0f64, Complex::new(1.0, 0.0));
        // log2(1 + 10 + 10/11)
        assert!((r.per_user() - 3.573991).abs() < 1e-6);
    }

    #[test]
    fn lower_examples() {
        let lb = lower_bounds(3, Complex::new(0.0f64, 0.0), 10.0);
        assert!((lb.tdm / 2.0 - 0.8257).abs() < 1e-4);
        assert!((lb.best - 11f64.log2()).abs() < 1e-12);
        let lb = lower_bounds(3, Complex::new(1.0f64, 0.0), 10.0);
        assert!((lb.snd - lb.tdm).abs() < 1e-12);
    }

    #[test]
    fn gen_kramer_rejects_asymmetric() {
        let ch =
            crate::channel::make_semi_symmetric(3, &[Complex::new(0.3, 0.0), Complex::new(0.4, 0.0)], 10.0).unwrap();
        assert!(gen_kramer_three(&ch, &SearchConfig::fast()).is_err());
        let ch4 = make_symmetric(4, Complex::new(0.3, 0.0), 10.0);
        assert!(gen_kramer_three(&ch4, &SearchConfig::fast()).is_err());
    }
}
