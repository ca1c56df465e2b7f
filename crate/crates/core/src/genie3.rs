//! Three-user genie-aided bounds: change-of-interference (`thm1`),
//! Etkin-type single genie (`thm2*`), the hybrid time-shared bound
//! (`thm3*`), its symmetric simplification `min(R0, R1)`, and the combined
//! minimum.
//!
//! Users are zero-based and cyclic: `next = k+1`, `prev = k-1 (mod 3)`.
//! Evaluators take an already-permuted channel; the `*_bound` wrappers
//! apply a permutation first.
//!
//! Each penalty term is evaluated as `I(U_k; X_k + Z_k − W_k + Ṽ)`, the
//! quantity the worst-additive-noise step actually produces.

use num_complex::Complex;

use crate::baselines::{etw_two_user, gen_kramer_three, kramer_two_user, z_extension_three, BoundError};
use crate::bound::{min_result, BoundResult, NoiseParam};
use crate::channel::Channel;
use crate::gaussian::{cond_var, GaussVar};
use crate::optimize::{optimize_noises, ParamMode};
use crate::perm::{is_permutation, permutations};
use crate::scalar::{log2, Real, C};
use crate::search::{line_min, SearchConfig};
use crate::system::{mi, UserSystem};

/// Which validity condition (and closed form) of the single-genie bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Thm2Branch {
    First,
    Second,
}

/// Which penalty set of the hybrid bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Thm3Branch {
    I0,
    I1,
}

/// Change-of-interference noises `W` and Etkin-type noises `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenieConfig3<T: Real> {
    pub w: [NoiseParam<T>; 3],
    pub n: [NoiseParam<T>; 3],
}

impl<T: Real> GenieConfig3<T> {
    pub fn symmetric(w: NoiseParam<T>, n: NoiseParam<T>) -> Self {
        GenieConfig3 { w: [w; 3], n: [n; 3] }
    }

    pub fn valid(&self) -> bool {
        self.w.iter().chain(self.n.iter()).all(|p| p.valid())
    }
}

fn tol<T: Real>() -> T {
    T::feas_tol()
}

fn is_zero<T: Real>(c: C<T>) -> bool {
    c.norm_sqr() <= T::singular_eps()
}

fn nx(k: usize) -> usize {
    (k + 1) % 3
}

fn pv(k: usize) -> usize {
    (k + 2) % 3
}

fn one_slice<T: Real>(v: &GaussVar<T>) -> &[GaussVar<T>] {
    std::slice::from_ref(v)
}

fn check_three<T: Real>(ch: &Channel<T>, perm: &[usize]) -> Result<Channel<T>, BoundError> {
    if ch.k() != 3 {
        return Err(BoundError::WrongK {
            expected: 3,
            got: ch.k(),
        });
    }
    if !is_permutation(perm, 3) {
        return Err(BoundError::BadPermutation(perm.to_vec()));
    }
    Ok(ch.permuted(perm))
}

// ---------------------------------------------------------------------------
// Change-of-interference bound

/// Sum-rate value of the change-of-interference bound, `+∞` if infeasible.
pub fn thm1_value<T: Real>(ch: &Channel<T>, w: &[NoiseParam<T>; 3]) -> T {
    if w.iter().any(|p| !p.valid()) {
        return T::infinity();
    }
    let a: Vec<T> = (0..3).map(|k| ch.h(k, nx(k)).norm_sqr()).collect();
    if a.iter().any(|&v| v > T::one() + tol() || v <= T::singular_eps()) {
        return T::infinity();
    }
    let mut s = UserSystem::new(ch);
    let ws: Vec<GaussVar<T>> = (0..3)
        .map(|k| {
            let z = s.z[k].clone();
            w[k].build(&mut s.basis, &z).expect("validated noise")
        })
        .collect();
    let dzw: Vec<T> = (0..3).map(|k| (&s.z[k] - &ws[k]).variance()).collect();
    let vw: Vec<T> = (0..3).map(|k| cond_var(&ws[k], &[&s.z[k] - &ws[k]])).collect();
    // Ṽ_{W_k} pairs with user k+1.
    let mut tilde = Vec::with_capacity(3);
    for k in 0..3 {
        if vw[k] < a[k] * dzw[nx(k)] - tol() {
            return T::infinity();
        }
        let var = vw[k] / a[k] - dzw[nx(k)];
        tilde.push(s.fresh_var(var));
    }
    let u: Vec<GaussVar<T>> = (0..3).map(|k| &s.mix(k, &[k]) + &ws[k]).collect();
    let mut total = T::zero();
    for k in 0..3 {
        let p = pv(k);
        let xk = one_slice(&s.x[k]);
        let yk = one_slice(&s.y[k]);
        let xp = s.x[p].clone();
        total += mi(xk, yk, &[xp.clone(), u[k].clone()]);
        total += mi(xk, yk, one_slice(&xp));
        let target = &(&(&s.x[k] + &s.z[k]) - &ws[k]) + &tilde[p];
        total += mi(one_slice(&u[k]), one_slice(&target), one_slice(&xp));
    }
    total * T::lit(0.5)
}

pub fn thm1_bound<T: Real>(
    ch: &Channel<T>,
    w: &[NoiseParam<T>; 3],
    perm: &[usize],
) -> Result<BoundResult<T>, BoundError> {
    let c = check_three(ch, perm)?;
    let mut params = Vec::new();
    for (k, p) in w.iter().enumerate() {
        p.push_params(&format!("w{}", k + 1), &mut params);
    }
    Ok(BoundResult::new("thm1", 3, thm1_value(&c, w))
        .with_params(params)
        .with_permutation(perm.to_vec()))
}

// ---------------------------------------------------------------------------
// Single-genie bound

/// Conditional variances `Var(N2 | Z2 − (h23/h13)N2)` and
/// `Var(Z2 | N2 − (h13/h23)Z2)`; `None` when the ratio's denominator is 0.
fn thm2_vs<T: Real>(s: &UserSystem<T>, n2: &GaussVar<T>) -> (Option<T>, Option<T>) {
    let h13 = s.ch.h(0, 2);
    let h23 = s.ch.h(1, 2);
    let z2 = &s.z[1];
    let v = (!is_zero(h13)).then(|| cond_var(n2, &[z2 - &n2.scale(h23 / h13)]));
    let vp = (!is_zero(h23)).then(|| cond_var(z2, &[n2 - &z2.scale(h13 / h23)]));
    (v, vp)
}

/// Whether the branch's validity condition holds for `n`.
pub fn thm2_feasible<T: Real>(ch: &Channel<T>, n: &NoiseParam<T>, branch: Thm2Branch) -> bool {
    if !n.valid() {
        return false;
    }
    let mut s = UserSystem::new(ch);
    let z = s.z[1].clone();
    let n2 = n.build(&mut s.basis, &z).expect("validated noise");
    let (v, vp) = thm2_vs(&s, &n2);
    match branch {
        Thm2Branch::First => v.is_some_and(|v| ch.h(0, 2).norm_sqr() <= v + tol() && v <= T::one() + tol()),
        Thm2Branch::Second => vp.is_some_and(|v| ch.h(1, 2).norm_sqr() <= v + tol() && v <= T::one() + tol()),
    }
}

/// `I(X1;Y1) + I(X2;Y2,S2|X1) + I(X3;Y3|X1,X2)` with `S2 = h12X2 + h13X3 + N2`,
/// evaluated directly from the joint covariance (no validity check).
pub fn thm2_mi_value<T: Real>(ch: &Channel<T>, n: &NoiseParam<T>) -> T {
    let mut s = UserSystem::new(ch);
    let z = s.z[1].clone();
    let n2 = n.build(&mut s.basis, &z).expect("validated noise");
    let s2 = &s.mix(0, &[0]) + &n2;
    let x = s.x.clone();
    mi(&x[0..1], &s.y[0..1], &[]) + mi(&x[1..2], &[s.y[1].clone(), s2], &x[0..1]) + mi(&x[2..3], &s.y[2..3], &x[0..2])
}

/// The branch's closed form, or `None` when an intermediate variance is
/// below the singularity threshold (then only the joint-covariance route
/// is exact).
pub fn thm2_closed_form<T: Real>(ch: &Channel<T>, n: &NoiseParam<T>, branch: Thm2Branch) -> Option<T> {
    let eps = T::singular_eps();
    let one = T::one();
    let (p1, p2, p3) = (ch.p(0), ch.p(1), ch.p(2));
    let (h12, h13, h23) = (ch.h(0, 1), ch.h(0, 2), ch.h(1, 2));
    let sig = n.sigma;
    let rs = n.rho * sig;
    let a = h12.norm_sqr() * p2 + h13.norm_sqr() * p3;
    let s_var = a + sig * sig;
    let cross = h12.conj() * p2 + h23 * h13.conj() * p3 + rs;
    let y_given = p2 + h23.norm_sqr() * p3 + one - cross.norm_sqr() / s_var;
    let (d_noise, d_v) = match branch {
        Thm2Branch::First => {
            if is_zero(h13) {
                return None;
            }
            let c = h23 / h13;
            let dz = one + c.norm_sqr() * sig * sig - (c.conj() * rs).re * T::lit(2.0);
            if dz < eps {
                return None;
            }
            let v = sig * sig - (rs - c * sig * sig).norm_sqr() / dz;
            (dz, h13.norm_sqr() * p3 + v)
        }
        Thm2Branch::Second => {
            if is_zero(h23) {
                return None;
            }
            let c = h13 / h23;
            let dn = sig * sig + c.norm_sqr() - (c * rs).re * T::lit(2.0);
            if dn < eps {
                return None;
            }
            let v = one - (rs - c.conj()).norm_sqr() / dn;
            (dn, h23.norm_sqr() * p3 + v)
        }
    };
    if s_var < eps || d_v < eps || y_given < eps {
        return None;
    }
    Some(log2(one + p1 / (a + one)) + log2(s_var / d_noise) + log2(y_given / d_v) + log2(one + p3))
}

/// Single-genie bound value for one branch, `+∞` when its validity
/// condition fails.
pub fn thm2_value<T: Real>(ch: &Channel<T>, n: &NoiseParam<T>, branch: Thm2Branch) -> T {
    if !thm2_feasible(ch, n, branch) {
        return T::infinity();
    }
    thm2_closed_form(ch, n, branch).unwrap_or_else(|| thm2_mi_value(ch, n))
}

/// Single-genie bound on the given (unpermuted) channel.
pub fn thm2_bound<T: Real>(
    ch: &Channel<T>,
    n2: &NoiseParam<T>,
    branch: Thm2Branch,
) -> Result<BoundResult<T>, BoundError> {
    if ch.k() != 3 {
        return Err(BoundError::WrongK {
            expected: 3,
            got: ch.k(),
        });
    }
    let mut params = Vec::new();
    n2.push_params("n2", &mut params);
    Ok(BoundResult::new(thm2_name(branch), 3, thm2_value(ch, n2, branch)).with_params(params))
}

fn thm2_name(branch: Thm2Branch) -> &'static str {
    match branch {
        Thm2Branch::First => "thm2a",
        Thm2Branch::Second => "thm2b",
    }
}

// ---------------------------------------------------------------------------
// Hybrid bound

struct HybridParts<T: Real> {
    main: T,
    pen0: T,
    pen1: T,
}

/// Nine main terms and both penalty sets; penalties are `+∞` when their
/// constraint set fails.
fn thm3_parts<T: Real>(ch: &Channel<T>, cfg: &GenieConfig3<T>, want: Option<Thm3Branch>) -> HybridParts<T> {
    let inf = HybridParts {
        main: T::infinity(),
        pen0: T::infinity(),
        pen1: T::infinity(),
    };
    if !cfg.valid() {
        return inf;
    }
    let mut s = UserSystem::new(ch);
    let mut ws = Vec::with_capacity(3);
    let mut ns = Vec::with_capacity(3);
    for k in 0..3 {
        let z = s.z[k].clone();
        ws.push(cfg.w[k].build(&mut s.basis, &z).expect("validated noise"));
        ns.push(cfg.n[k].build(&mut s.basis, &z).expect("validated noise"));
    }
    let dzw: Vec<T> = (0..3).map(|k| (&s.z[k] - &ws[k]).variance()).collect();
    let vw: Vec<T> = (0..3).map(|k| cond_var(&ws[k], &[&s.z[k] - &ws[k]])).collect();

    // Constraint sets and Ṽ variances (Ṽ_{N_k} pairs with user k+1).
    let mut var0: Option<Vec<T>> = Some(Vec::new());
    let mut var1: Option<Vec<T>> = Some(Vec::new());
    for k in 0..3 {
        let (p, n) = (pv(k), nx(k));
        let d_prev = ch.h(p, n);
        let d_self = ch.h(k, n);
        if let Some(v) = var0.as_mut() {
            let ok_w = vw[p] >= cfg.n[k].sigma * cfg.n[k].sigma - tol();
            if is_zero(d_prev) || !ok_w {
                var0 = None;
            } else {
                let vn = cond_var(&ns[k], &[&s.z[k] - &ns[k].scale(ch.h(k, n) / d_prev)]);
                let a = d_prev.norm_sqr();
                if vn < a * dzw[n] - tol() {
                    var0 = None;
                } else {
                    v.push(vn / a - dzw[n]);
                }
            }
        }
        if let Some(v) = var1.as_mut() {
            let ok_w = vw[k] >= cfg.w[k].sigma * cfg.w[k].sigma - tol();
            if is_zero(d_self) || !ok_w {
                var1 = None;
            } else {
                let vn = cond_var(&s.z[k], &[&ns[k] - &s.z[k].scale(d_prev / d_self)]);
                let a = d_self.norm_sqr();
                if vn < a * dzw[n] - tol() {
                    var1 = None;
                } else {
                    v.push(vn / a - dzw[n]);
                }
            }
        }
    }
    if want == Some(Thm3Branch::I0) {
        var1 = None;
    }
    if want == Some(Thm3Branch::I1) {
        var0 = None;
    }
    if var0.is_none() && var1.is_none() {
        return inf;
    }

    let u: Vec<GaussVar<T>> = (0..3).map(|k| &s.mix(k, &[k]) + &ws[k]).collect();
    let sg: Vec<GaussVar<T>> = (0..3).map(|k| &s.mix(pv(k), &[pv(k)]) + &ns[k]).collect();
    let mut main = T::zero();
    for k in 0..3 {
        let (n, p) = (nx(k), pv(k));
        main += mi(&s.x[k..k + 1], &s.y[k..k + 1], &[]);
        main += mi(&s.x[n..n + 1], &[s.y[n].clone(), sg[n].clone()], &s.x[k..k + 1]);
        main += mi(&s.x[p..p + 1], &s.y[p..p + 1], one_slice(&u[p]));
    }
    let third = T::one() / T::lit(3.0);
    let penalty = |vars: Option<Vec<T>>, s: &mut UserSystem<T>| -> T {
        let Some(vars) = vars else { return T::infinity() };
        let mut total = T::zero();
        for k in 0..3 {
            let n = nx(k);
            let vt = s.fresh_var(vars[k]);
            let target = &(&(&s.x[n] + &s.z[n]) - &ws[n]) + &vt;
            total += mi(one_slice(&u[n]), one_slice(&target), &[]);
        }
        total * third
    };
    let pen0 = penalty(var0, &mut s);
    let pen1 = penalty(var1, &mut s);
    HybridParts {
        main: main * third,
        pen0,
        pen1,
    }
}

/// Hybrid bound value for one branch, `+∞` when infeasible.
pub fn thm3_value<T: Real>(ch: &Channel<T>, cfg: &GenieConfig3<T>, branch: Thm3Branch) -> T {
    let parts = thm3_parts(ch, cfg, Some(branch));
    parts.main
        + match branch {
            Thm3Branch::I0 => parts.pen0,
            Thm3Branch::I1 => parts.pen1,
        }
}

/// `main + min(I0, I1)` over whichever branches are feasible.
pub fn thm3_value_min<T: Real>(ch: &Channel<T>, cfg: &GenieConfig3<T>) -> T {
    let parts = thm3_parts(ch, cfg, None);
    parts.main + parts.pen0.min(parts.pen1)
}

pub fn thm3_bound<T: Real>(
    ch: &Channel<T>,
    cfg: &GenieConfig3<T>,
    branch: Thm3Branch,
    perm: &[usize],
) -> Result<BoundResult<T>, BoundError> {
    let c = check_three(ch, perm)?;
    Ok(BoundResult::new(thm3_name(branch), 3, thm3_value(&c, cfg, branch))
        .with_params(genie_params(cfg))
        .with_permutation(perm.to_vec()))
}

fn thm3_name(branch: Thm3Branch) -> &'static str {
    match branch {
        Thm3Branch::I0 => "thm3_i0",
        Thm3Branch::I1 => "thm3_i1",
    }
}

fn genie_params<T: Real>(cfg: &GenieConfig3<T>) -> Vec<(String, T)> {
    let mut params = Vec::new();
    for k in 0..3 {
        cfg.w[k].push_params(&format!("w{}", k + 1), &mut params);
    }
    for k in 0..3 {
        cfg.n[k].push_params(&format!("n{}", k + 1), &mut params);
    }
    params
}

// ---------------------------------------------------------------------------
// Symmetric simplification

/// `R` for the symmetric channel with `Z−N` and `Z−W` variances taken from
/// the given noises.
pub fn thm4_r<T: Real>(p: T, g: C<T>, n: &NoiseParam<T>, w: &NoiseParam<T>) -> T {
    let g2 = g.norm_sqr();
    let one = T::one();
    let two = T::lit(2.0);
    let dzn = n.var_z_minus();
    let dzw = w.var_z_minus();
    let den = g2 * dzn * dzw;
    let cross = (g.conj() * (g + one) * p + n.rho.conj() * n.sigma).norm_sqr();
    let b = p + g2 * p + one - cross / (two * g2 * p + n.sigma * n.sigma);
    let a = (p + two * g2 * p + one) / den;
    if !(den > T::zero() && a.is_finite() && b > T::zero()) {
        return T::infinity();
    }
    log2(a) + log2(b)
}

/// Parameters of the `R0` family at `σ_N`: `σ_W = 1`, `ρ_W = 2σ_N² − 1`,
/// `ρ_N` from the equality constraints. `None` where the square root is
/// undefined or `|ρ_N| > 1`. Returns `(N, W)`.
pub fn thm4_r0_params<T: Real>(g: C<T>, sigma_n: T) -> Option<(NoiseParam<T>, NoiseParam<T>)> {
    let one = T::one();
    let two = T::lit(2.0);
    let ag = g.norm();
    if !(sigma_n > T::zero() && sigma_n <= one) || ag <= T::zero() {
        return None;
    }
    let q = (two * ag).powi(-2);
    let arg = (one - q) / (sigma_n * sigma_n) + (one + q) * sigma_n * sigma_n - two + q * q;
    if arg < T::zero() {
        return None;
    }
    let rho_n = T::lit(4.0) * ag * ag * ((one / sigma_n - sigma_n) - arg.sqrt());
    if rho_n.abs() > one + tol::<T>() {
        return None;
    }
    let rho_n = rho_n.max(-one).min(one);
    let rho_w = two * sigma_n * sigma_n - one;
    Some((NoiseParam::real(sigma_n, rho_n), NoiseParam::real(one, rho_w)))
}

/// Parameters of the `R1` family at `ρ_N`: `σ_N = 1`, `σ_W = ρ_W` with
/// `ρ_W² = 1 − (1 − |ρ_N|²)/(2|g|²(1 − Re ρ_N))` (equal to
/// `1 − (1+ρ_N)/(2|g|²)` for real `ρ_N`). Returns `(N, W)`.
pub fn thm4_r1_params<T: Real>(g: C<T>, rho_n: C<T>) -> Option<(NoiseParam<T>, NoiseParam<T>)> {
    let one = T::one();
    let g2 = g.norm_sqr();
    let r2 = rho_n.norm_sqr();
    if !(r2 < one) || g2 <= T::zero() {
        return None;
    }
    let w2 = one - (one - r2) / (T::lit(2.0) * g2 * (one - rho_n.re));
    if w2 < -tol::<T>() {
        return None;
    }
    let rw = w2.max(T::zero()).sqrt();
    Some((NoiseParam::new(one, rho_n), NoiseParam::real(rw, rw)))
}

/// Output of [`thm4_symmetric`].
#[derive(Clone, Debug, PartialEq)]
pub struct Thm4Result<T: Real> {
    pub r0: BoundResult<T>,
    pub r1: BoundResult<T>,
    pub best: BoundResult<T>,
}

fn r_params<T: Real>(n: &NoiseParam<T>, w: &NoiseParam<T>) -> Vec<(String, T)> {
    let mut v = Vec::new();
    n.push_params("n", &mut v);
    w.push_params("w", &mut v);
    v
}

/// `min(R0, R1)` for the symmetric three-user channel `(P, g)`.
pub fn thm4_symmetric<T: Real>(p: T, g: C<T>, cfg: &SearchConfig) -> Thm4Result<T> {
    let n_pts = cfg.line_points;
    let r0_at = |s: T| thm4_r0_params(g, s).map_or(T::infinity(), |(n, w)| thm4_r(p, g, &n, &w));
    let (s0, v0) = line_min(r0_at, T::lit(1e-6), T::one(), n_pts);
    let mut r0 = BoundResult::new("thm4_r0", 3, v0);
    if let Some((n, w)) = thm4_r0_params(g, s0) {
        r0 = r0.with_params(r_params(&n, &w));
    }

    let r1_at = |rn: C<T>| thm4_r1_params(g, rn).map_or(T::infinity(), |(n, w)| thm4_r(p, g, &n, &w));
    let (rho1, v1) = if g.im == T::zero() {
        let hi = (T::lit(2.0) * g.norm_sqr() - T::one()).min(T::one());
        if hi <= -T::one() {
            (Complex::default(), T::infinity())
        } else {
            let (r, v) = line_min(|r| r1_at(Complex::new(r, T::zero())), -T::one(), hi, n_pts);
            (Complex::new(r, T::zero()), v)
        }
    } else {
        let mut best = (Complex::default(), T::infinity());
        for &m in &crate::search::linspace(T::zero(), T::one(), cfg.rho_mag_points) {
            for &ph in &crate::search::phase_grid::<T>(cfg.phase_points) {
                let r = Complex::from_polar(m, ph);
                let v = r1_at(r);
                if v < best.1 {
                    best = (r, v);
                }
            }
        }
        let f = |x: &[T]| r1_at(Complex::from_polar(x[0], x[1]));
        let coords = [
            crate::search::Coord::new(T::zero(), T::one(), cfg.rho_mag_points),
            crate::search::Coord::phase(cfg.phase_points),
        ];
        let (m, ph) = best.0.to_polar();
        let (x, v) = crate::search::coordinate_descent(f, &coords, vec![m, ph], 2, cfg.refine_factor);
        (Complex::from_polar(x[0], x[1]), v)
    };
    let mut r1 = BoundResult::new("thm4_r1", 3, v1);
    if let Some((n, w)) = thm4_r1_params(g, rho1) {
        r1 = r1.with_params(r_params(&n, &w));
    }
    let best = BoundResult::min_of(r0.clone(), r1.clone());
    Thm4Result { r0, r1, best }
}

// ---------------------------------------------------------------------------
// Optimized bounds and combined minimum

/// Orderings whose permuted channels are pairwise distinct (first
/// occurrence kept, lexicographic order).
pub fn distinct_orderings<T: Real>(ch: &Channel<T>) -> Vec<(Vec<usize>, Channel<T>)> {
    let mut out: Vec<(Vec<usize>, Channel<T>)> = Vec::new();
    for perm in permutations(ch.k()) {
        let c = ch.permuted(&perm);
        if !out.iter().any(|(_, o)| *o == c) {
            out.push((perm, c));
        }
    }
    out
}

/// Change-of-interference bound optimized over `W` and orderings.
pub fn thm1_optimize<T: Real>(ch: &Channel<T>, cfg: &SearchConfig) -> BoundResult<T> {
    let mode = ParamMode::for_channel(ch);
    min_result(
        "thm1",
        3,
        distinct_orderings(ch).into_iter().map(|(perm, c)| {
            let f = |ps: &[NoiseParam<T>]| thm1_value(&c, &[ps[0], ps[1], ps[2]]);
            let (ps, v) = optimize_noises(f, 3, 1, mode, cfg, vec![]);
            let mut params = Vec::new();
            for (k, p) in ps.iter().enumerate() {
                p.push_params(&format!("w{}", k + 1), &mut params);
            }
            BoundResult::new("thm1", 3, v)
                .with_params(params)
                .with_permutation(perm)
        }),
    )
}

/// Single-genie bound optimized over `N2` and orderings.
pub fn thm2_optimize<T: Real>(ch: &Channel<T>, branch: Thm2Branch, cfg: &SearchConfig) -> BoundResult<T> {
    let mode = ParamMode::for_channel(ch);
    let name = thm2_name(branch);
    min_result(
        name,
        3,
        distinct_orderings(ch).into_iter().map(|(perm, c)| {
            let f = |ps: &[NoiseParam<T>]| thm2_value(&c, &ps[0], branch);
            let seeds = vec![vec![NoiseParam::real(T::one(), T::one())]];
            let (ps, v) = optimize_noises(f, 1, 1, mode, cfg, seeds);
            let mut params = Vec::new();
            ps[0].push_params("n2", &mut params);
            BoundResult::new(name, 3, v).with_params(params).with_permutation(perm)
        }),
    )
}

/// Seeds from the symmetric `R0`/`R1` families, as `[W, N]` pairs.
fn thm3_family_seeds<T: Real>(ch: &Channel<T>, branch: Thm3Branch, cfg: &SearchConfig) -> Vec<Vec<NoiseParam<T>>> {
    let Some(mag) = ch.equal_cross_magnitude() else {
        return vec![];
    };
    let g = Complex::new(mag, T::zero());
    let mut out = Vec::new();
    let grid = crate::search::linspace(T::lit(0.02), T::one(), 50);
    for &t in &grid {
        let fam = match branch {
            Thm3Branch::I0 => thm4_r0_params(g, t),
            Thm3Branch::I1 => thm4_r1_params(g, Complex::new(T::lit(2.0) * t - T::one(), T::zero())),
        };
        if let Some((n, w)) = fam {
            out.push(vec![w, n]);
        }
    }
    // The tied K-user search walks along the ρ = σ ridge, which plain
    // coordinate descent in (σ, ρ) cannot follow.
    if let (Thm3Branch::I0, Some(g), Some(p)) = (branch, ch.symmetric_gain(), ch.common_power()) {
        let (c, v) = crate::kuser::thm6_tied_search(3, g, p, cfg);
        if v.is_finite() {
            out.push(vec![c.w1, c.n[0]]);
        }
    }
    out
}

/// Hybrid bound optimized over all six noises and orderings.
pub fn thm3_optimize<T: Real>(ch: &Channel<T>, branch: Thm3Branch, cfg: &SearchConfig) -> BoundResult<T> {
    let mode = ParamMode::for_channel(ch);
    let name = thm3_name(branch);
    min_result(
        name,
        3,
        distinct_orderings(ch).into_iter().map(|(perm, c)| {
            let f = |ps: &[NoiseParam<T>]| {
                let g = GenieConfig3 {
                    w: [ps[0], ps[2], ps[4]],
                    n: [ps[1], ps[3], ps[5]],
                };
                thm3_value(&c, &g, branch)
            };
            let seeds = thm3_family_seeds(&c, branch, cfg);
            let (ps, v) = optimize_noises(f, 3, 2, mode, cfg, seeds);
            let g = GenieConfig3 {
                w: [ps[0], ps[2], ps[4]],
                n: [ps[1], ps[3], ps[5]],
            };
            BoundResult::new(name, 3, v)
                .with_params(genie_params(&g))
                .with_permutation(perm)
        }),
    )
}

/// Per-bound results of the three-user minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeUserBounds<T: Real> {
    pub thm1: BoundResult<T>,
    pub thm2a: BoundResult<T>,
    pub thm2b: BoundResult<T>,
    pub thm3_i0: BoundResult<T>,
    pub thm3_i1: BoundResult<T>,
}

impl<T: Real> ThreeUserBounds<T> {
    pub fn all(&self) -> Vec<BoundResult<T>> {
        vec![
            self.thm1.clone(),
            self.thm2a.clone(),
            self.thm2b.clone(),
            self.thm3_i0.clone(),
            self.thm3_i1.clone(),
        ]
    }

    /// Minimum of the new bounds, named `new_upper` with the winning
    /// bound recorded in `params` as `winner_index`.
    pub fn min(&self) -> BoundResult<T> {
        min_result("new_upper", 3, self.all())
    }
}

pub fn three_user_bounds<T: Real>(ch: &Channel<T>, cfg: &SearchConfig) -> Result<ThreeUserBounds<T>, BoundError> {
    if ch.k() != 3 {
        return Err(BoundError::WrongK {
            expected: 3,
            got: ch.k(),
        });
    }
    Ok(ThreeUserBounds {
        thm1: thm1_optimize(ch, cfg),
        thm2a: thm2_optimize(ch, Thm2Branch::First, cfg),
        thm2b: thm2_optimize(ch, Thm2Branch::Second, cfg),
        thm3_i0: thm3_optimize(ch, Thm3Branch::I0, cfg),
        thm3_i1: thm3_optimize(ch, Thm3Branch::I1, cfg),
    })
}

/// Minimum of the three new genie bounds.
pub fn new_upper_three<T: Real>(ch: &Channel<T>, cfg: &SearchConfig) -> Result<BoundResult<T>, BoundError> {
    Ok(three_user_bounds(ch, cfg)?.min())
}

/// Prior-work upper bounds applicable to this three-user channel:
/// Kramer and ETW when every cross gain has the same magnitude and powers
/// are equal, generalized Kramer when exactly symmetric, and the Z-channel
/// extension always.
pub fn baseline_uppers_three<T: Real>(ch: &Channel<T>, cfg: &SearchConfig) -> Result<Vec<BoundResult<T>>, BoundError> {
    if ch.k() != 3 {
        return Err(BoundError::WrongK {
            expected: 3,
            got: ch.k(),
        });
    }
    let mut out = Vec::new();
    if let (Some(mag), Some(p)) = (ch.equal_cross_magnitude(), ch.common_power()) {
        let g = Complex::new(mag, T::zero());
        out.push(kramer_two_user(p, g).for_users(3));
        out.push(etw_two_user(p, g).for_users(3));
    }
    if ch.symmetric_gain().is_some() {
        out.push(gen_kramer_three(ch, cfg)?);
    }
    out.push(z_extension_three(ch)?);
    Ok(out)
}

/// Minimum over the new bounds and every applicable prior-work bound.
pub fn best_upper_three<T: Real>(ch: &Channel<T>, cfg: &SearchConfig) -> Result<BoundResult<T>, BoundError> {
    let mut all = three_user_bounds(ch, cfg)?.all();
    all.extend(baseline_uppers_three(ch, cfg)?);
    Ok(min_result("best_upper", 3, all))
}
