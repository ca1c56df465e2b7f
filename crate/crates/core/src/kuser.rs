//! K-user bounds: symmetric genie bounds in expanded single-letter form,
//! their closed-form specializations, the large-K affine characterization,
//! and two asymmetric bounds evaluated from the joint covariance.
//!
//! The asymmetric expressions condition user `k`'s term on the other
//! users' inputs as if they were independent of the shared side signal
//! `S_2`, which they are not. At weak interference both evaluate below
//! achievable sum rates, so they are computed as written but never enter a
//! combined upper-bound minimum.
//!
//! Symmetric evaluators are `O(K)` closed sums; the asymmetric ones build
//! the full Gaussian system and are meant for small `K`.

use num_complex::Complex;

use crate::baselines::{kramer_two_user, BoundError};
use crate::bound::{min_result, BoundResult, NoiseParam};
use crate::channel::{reduction_holds, Channel};
use crate::gaussian::{cond_var, GaussVar};
use crate::optimize::{optimize_noises, ParamMode};
use crate::perm::{is_permutation, permutations};
use crate::scalar::{log2, Real, C};
use crate::search::{coordinate_descent, line_min, linspace, Coord, SearchConfig};
use crate::system::{mi, UserSystem};

/// One `(σ, ρ)` for every genie noise, or one per index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieMode {
    #[default]
    Tied,
    PerIndex,
}

/// Genie noises of the symmetric K-user bounds. `n[i]` is the noise of
/// user `i + 2` (one-based), so `n.len() == K − 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct KGenieConfig<T: Real> {
    pub n: Vec<NoiseParam<T>>,
    pub w1: NoiseParam<T>,
    pub wk: NoiseParam<T>,
    pub tie: TieMode,
}

impl<T: Real> KGenieConfig<T> {
    pub fn tied(k: usize, n: NoiseParam<T>, w: NoiseParam<T>) -> Self {
        KGenieConfig {
            n: vec![n; k.saturating_sub(2)],
            w1: w,
            wk: w,
            tie: TieMode::Tied,
        }
    }

    fn params(&self) -> Vec<(String, T)> {
        let mut v = Vec::new();
        self.w1.push_params("w1", &mut v);
        self.wk.push_params("wK", &mut v);
        match self.tie {
            TieMode::Tied => {
                if let Some(n) = self.n.first() {
                    n.push_params("n", &mut v);
                }
            }
            TieMode::PerIndex => {
                for (i, n) in self.n.iter().enumerate() {
                    n.push_params(&format!("n{}", i + 2), &mut v);
                }
            }
        }
        v
    }
}

fn kf<T: Real>(k: usize) -> T {
    T::from_usize(k).unwrap()
}

fn finite_or_inf<T: Real>(v: T) -> T {
    if v.is_finite() {
        v
    } else {
        T::infinity()
    }
}

/// `Var(N | Z − N)` for a noise correlated with its own receiver noise.
fn v_given_diff<T: Real>(n: &NoiseParam<T>) -> T {
    let dz = n.var_z_minus();
    if dz <= T::singular_eps() {
        return T::zero();
    }
    let s2 = n.sigma * n.sigma;
    s2 - (n.rho * n.sigma - s2).norm_sqr() / dz
}

/// `Σ_{k=2}^{K-1} log(Var(Y_k | X^{k-1}, S_k) / Var(Z_k − N_k))`, shared by
/// both symmetric bounds.
fn residual_sum<T: Real>(k: usize, g: C<T>, p: T, n: &[NoiseParam<T>]) -> T {
    let a = g.norm_sqr() * p;
    let lead = one_minus(g) * g.conj() * p;
    let d2 = one_minus(g).norm_sqr() * p;
    let mut total = T::zero();
    for idx in 2..k {
        let nk = &n[idx - 2];
        let dz = nk.var_z_minus();
        let s2 = nk.sigma * nk.sigma;
        let m = kf::<T>(k - idx + 1);
        let num = d2 + dz - (lead + nk.rho * nk.sigma - s2).norm_sqr() / (m * a + s2);
        total += log2(num / dz);
    }
    total
}

/// Telescoped middle sum `Σ_{k=2}^{K-2} log(((K−k)a + σ²_{N_{k+1}}) / ((K−k)a + σ²_{V_{N_k}}))`.
fn middle_sum<T: Real>(k: usize, a: T, n: &[NoiseParam<T>], vn: &[T]) -> T {
    let mut total = T::zero();
    for idx in 2..k.saturating_sub(1) {
        let m = kf::<T>(k - idx) * a;
        let next = n[idx - 1].sigma * n[idx - 1].sigma;
        total += log2((m + next) / (m + vn[idx - 2]));
    }
    total
}

fn chain_ok<T: Real>(k: usize, n: &[NoiseParam<T>], vn: &[T]) -> bool {
    (2..k.saturating_sub(1)).all(|idx| vn[idx - 2] >= n[idx - 1].sigma * n[idx - 1].sigma - T::feas_tol())
}

/// Weak-interference symmetric bound (sum rate) at the given `N_2..N_{K-1}`,
/// `+∞` when `|g|² > 1` or a constraint fails.
pub fn thm5_value<T: Real>(k: usize, g: C<T>, p: T, n: &[NoiseParam<T>]) -> T {
    if k < 3 || n.len() != k - 2 || !n.iter().all(|q| q.valid()) {
        return T::infinity();
    }
    let g2 = g.norm_sqr();
    if g2 > T::one() + T::feas_tol() {
        return T::infinity();
    }
    let vn: Vec<T> = n.iter().map(v_given_diff).collect();
    if !chain_ok(k, n, &vn) || vn[k - 3] < g2 - T::feas_tol() {
        return T::infinity();
    }
    if n.iter().any(|q| q.var_z_minus() <= T::singular_eps()) {
        return T::infinity();
    }
    let one = T::one();
    let a = g2 * p;
    let b = kf::<T>(k - 1) * a;
    let s2 = n[0].sigma * n[0].sigma;
    let v = log2(one + p / (b + one)) + log2(b + s2) + middle_sum(k, a, n, &vn) + log2(p + one) - log2(a + vn[k - 3])
        + residual_sum(k, g, p, n);
    finite_or_inf(v)
}

/// Symmetric bound with a change-of-interference genie at user K (sum
/// rate), `+∞` when a constraint fails.
pub fn thm6_value<T: Real>(k: usize, g: C<T>, p: T, cfg: &KGenieConfig<T>) -> T {
    let n = &cfg.n;
    if k < 3 || n.len() != k - 2 || !n.iter().all(|q| q.valid()) || !cfg.w1.valid() || !cfg.wk.valid() {
        return T::infinity();
    }
    let g2 = g.norm_sqr();
    let vn: Vec<T> = n.iter().map(v_given_diff).collect();
    let vw1 = v_given_diff(&cfg.w1);
    let dzw1 = cfg.w1.var_z_minus();
    let dzwk = cfg.wk.var_z_minus();
    let tol = T::feas_tol();
    let sn2 = n[0].sigma * n[0].sigma;
    if vw1 < sn2 - tol || !chain_ok(k, n, &vn) || vn[k - 3] < g2 * dzwk - tol {
        return T::infinity();
    }
    if dzw1 <= T::singular_eps() || n.iter().any(|q| q.var_z_minus() <= T::singular_eps()) {
        return T::infinity();
    }
    let one = T::one();
    let a = g2 * p;
    let b = kf::<T>(k - 1) * a;
    let sw1 = cfg.w1.sigma * cfg.w1.sigma;
    let swk = cfg.wk.sigma * cfg.wk.sigma;
    let c = (cfg.wk.rho * cfg.wk.sigma - swk).norm_sqr() / (b + swk);
    let v = log2(one + p / (b + one))
        + log2((b + sn2) / dzw1)
        + log2((b + sw1) / (b + vw1))
        + middle_sum(k, a, n, &vn)
        + log2(p + dzwk - c)
        - log2(a + vn[k - 3] - g2 * c)
        + residual_sum(k, g, p, n);
    finite_or_inf(v)
}

/// Genie noises at which the weak-interference bound equals the `prop1`
/// closed form: `ρ = σ = |g|`.
pub fn prop1_params<T: Real>(k: usize, g: C<T>) -> Vec<NoiseParam<T>> {
    vec![NoiseParam::aligned(g.norm()); k.saturating_sub(2)]
}

/// `ρ = σ = √(|g|²/(1+|g|²))` for every noise.
pub fn prop2_params<T: Real>(k: usize, g: C<T>) -> KGenieConfig<T> {
    let g2 = g.norm_sqr();
    let s = (g2 / (T::one() + g2)).sqrt();
    KGenieConfig::tied(k, NoiseParam::aligned(s), NoiseParam::aligned(s))
}

/// `σ_W² = 1 − |g|^{−2γ}`, `σ_N² = |g|^{−2(γ−1)}`, each with `ρ = σ`.
pub fn prop3_params<T: Real>(k: usize, g: C<T>, gamma: T) -> KGenieConfig<T> {
    let g2 = g.norm_sqr();
    let sw = (T::one() - g2.powf(-gamma)).max(T::zero()).sqrt();
    let sn = g2.powf(-(gamma - T::one())).min(T::one()).sqrt();
    KGenieConfig::tied(k, NoiseParam::aligned(sn), NoiseParam::aligned(sw))
}

fn sym_check(k: usize) -> Result<(), BoundError> {
    if k < 3 {
        return Err(BoundError::WrongK { expected: 3, got: k });
    }
    Ok(())
}

/// Noise coordinates `(σ, ρ − σ)`: the `ρ = σ` family is an axis, so
/// descent can slide along it without leaving the feasible set.
#[derive(Clone, Copy)]
struct Shifted(ParamMode);

impl Shifted {
    fn width(self) -> usize {
        self.0.width()
    }

    fn coords<T: Real>(self, cfg: &SearchConfig) -> Vec<Coord<T>> {
        match self.0 {
            ParamMode::Real => vec![
                Coord::new(T::zero(), T::one(), cfg.sigma_points),
                Coord::new(-T::one(), T::one(), cfg.sigma_points),
            ],
            ParamMode::Complex => vec![
                Coord::new(T::zero(), T::one(), cfg.sigma_points),
                Coord::new(T::zero(), T::one(), cfg.rho_mag_points),
                Coord::phase(cfg.phase_points),
            ],
        }
    }

    fn decode<T: Real>(self, x: &[T]) -> NoiseParam<T> {
        let base = Complex::new(x[0], T::zero());
        match self.0 {
            ParamMode::Real => NoiseParam::new(x[0], base + Complex::new(x[1], T::zero())),
            ParamMode::Complex => NoiseParam::new(x[0], base + Complex::from_polar(x[1], x[2])),
        }
    }

    fn encode<T: Real>(self, n: &NoiseParam<T>) -> Vec<T> {
        let d = n.rho - Complex::new(n.sigma, T::zero());
        match self.0 {
            ParamMode::Real => vec![n.sigma, d.re],
            ParamMode::Complex => {
                let (m, ph) = d.to_polar();
                let ph = if ph < T::zero() { ph + T::PI() + T::PI() } else { ph };
                vec![n.sigma, m, ph]
            }
        }
    }

    fn decode_all<T: Real>(self, x: &[T]) -> Vec<NoiseParam<T>> {
        x.chunks(self.width()).map(|c| self.decode(c)).collect()
    }

    fn encode_all<T: Real>(self, ns: &[NoiseParam<T>]) -> Vec<T> {
        ns.iter().flat_map(|n| self.encode(n)).collect()
    }
}

fn gain_mode<T: Real>(g: C<T>) -> ParamMode {
    if g.im == T::zero() {
        ParamMode::Real
    } else {
        ParamMode::Complex
    }
}

/// Best seed followed by coordinate descent.
fn descend<T: Real>(
    f: impl Fn(&[T]) -> T,
    coords: &[Coord<T>],
    seeds: impl IntoIterator<Item = Vec<T>>,
    cfg: &SearchConfig,
) -> (Vec<T>, T) {
    let mut best: Option<(Vec<T>, T)> = None;
    for s in seeds {
        let v = f(&s);
        if best.as_ref().is_none_or(|b| v < b.1) {
            best = Some((s, v));
        }
    }
    let (x0, _) = best.expect("at least one seed");
    coordinate_descent(f, coords, x0, cfg.sweeps, cfg.refine_factor)
}

fn noise_params<T: Real>(ns: &[NoiseParam<T>], tie: TieMode) -> Vec<(String, T)> {
    let mut params = Vec::new();
    match tie {
        TieMode::Tied => ns[0].push_params("n", &mut params),
        TieMode::PerIndex => {
            for (i, n) in ns.iter().enumerate() {
                n.push_params(&format!("n{}", i + 2), &mut params);
            }
        }
    }
    params
}

/// Weak-interference bound optimized over the genie noises.
///
/// With tied noises and `K ≥ 4` the chain `Var(N | Z − N) ≥ σ²` forces
/// `ρ = σ`, so the tied search is a line search on `σ ∈ [|g|, 1]`. At
/// `K = 3` the single noise is searched over `(σ, ρ)`.
pub fn thm5_bound<T: Real>(
    k: usize,
    g: C<T>,
    p: T,
    cfg: &SearchConfig,
    tie: TieMode,
) -> Result<BoundResult<T>, BoundError> {
    sym_check(k)?;
    if g.norm_sqr() > T::one() + T::feas_tol() {
        return Ok(BoundResult::infeasible("thm5", k));
    }
    let sh = Shifted(gain_mode(g));
    let (mut ns, mut v) = if k == 3 {
        let f = |x: &[T]| thm5_value(k, g, p, &[sh.decode(x)]);
        let seeds = crate::optimize::slot_seeds::<T>()
            .into_iter()
            .chain([NoiseParam::aligned(g.norm())])
            .map(|n| sh.encode(&n));
        let (x, v) = descend(f, &sh.coords::<T>(cfg), seeds, cfg);
        (vec![sh.decode(&x)], v)
    } else {
        let f = |s: T| thm5_value(k, g, p, &vec![NoiseParam::aligned(s); k - 2]);
        let (s, v) = line_min(f, g.norm().min(T::one()), T::one(), cfg.line_points);
        (vec![NoiseParam::aligned(s); k - 2], v)
    };
    if tie == TieMode::PerIndex && k > 3 && v.is_finite() {
        let slot = sh.coords::<T>(cfg);
        let coords: Vec<Coord<T>> = (0..k - 2).flat_map(|_| slot.iter().copied()).collect();
        let f = |x: &[T]| thm5_value(k, g, p, &sh.decode_all(x));
        let (x, vf) = coordinate_descent(f, &coords, sh.encode_all(&ns), cfg.sweeps, cfg.refine_factor);
        if vf < v {
            ns = sh.decode_all(&x);
            v = vf;
        }
    }
    Ok(BoundResult::new("thm5", k, v).with_params(noise_params(&ns, tie)))
}

/// Tied seeds `[W, N]` for the change-of-interference bound.
fn thm6_seeds<T: Real>(k: usize, g: C<T>, cfg: &SearchConfig) -> Vec<[NoiseParam<T>; 2]> {
    let mut seeds = Vec::new();
    let p2 = prop2_params(k, g);
    seeds.push([p2.w1, p2.n[0]]);
    if g.norm_sqr() > T::one() {
        for gamma in gamma_grid::<T>() {
            let c = prop3_params(k, g, gamma);
            seeds.push([c.w1, c.n[0]]);
        }
    }
    if k == 3 {
        for s in linspace(T::lit(0.02), T::one(), cfg.sigma_points) {
            if let Some((n, w)) = crate::genie3::thm4_r0_params(g, s) {
                seeds.push([w, n]);
            }
        }
    }
    let grid = linspace(T::zero(), T::one(), cfg.sigma_points.min(21));
    for &sw in &grid {
        for &sn in &grid {
            seeds.push([NoiseParam::aligned(sw), NoiseParam::aligned(sn)]);
        }
    }
    seeds
}

/// Tied `(W, N)` search behind [`thm6_bound`]; `k` must be at least 3.
pub fn thm6_tied_search<T: Real>(k: usize, g: C<T>, p: T, cfg: &SearchConfig) -> (KGenieConfig<T>, T) {
    let sh = Shifted(gain_mode(g));
    let w = sh.width();
    let seeds = thm6_seeds(k, g, cfg);
    if k == 3 {
        let f = |x: &[T]| thm6_value(k, g, p, &KGenieConfig::tied(k, sh.decode(&x[w..]), sh.decode(&x[..w])));
        let mut coords = sh.coords::<T>(cfg);
        coords.extend(sh.coords::<T>(cfg));
        let (x, v) = descend(f, &coords, seeds.iter().map(|s| sh.encode_all(s)), cfg);
        (KGenieConfig::tied(k, sh.decode(&x[w..]), sh.decode(&x[..w])), v)
    } else {
        let f = |x: &[T]| {
            thm6_value(
                k,
                g,
                p,
                &KGenieConfig::tied(k, NoiseParam::aligned(x[w]), sh.decode(&x[..w])),
            )
        };
        let mut coords = sh.coords::<T>(cfg);
        coords.push(Coord::new(T::zero(), T::one(), cfg.sigma_points));
        let enc = |s: &[NoiseParam<T>; 2]| {
            let mut x = sh.encode(&s[0]);
            x.push(s[1].sigma);
            x
        };
        let (x, v) = descend(
            f,
            &coords,
            seeds.iter().filter(|s| s[1].rho.re == s[1].sigma).map(enc),
            cfg,
        );
        (KGenieConfig::tied(k, NoiseParam::aligned(x[w]), sh.decode(&x[..w])), v)
    }
}

/// Bound with the change-of-interference genie, optimized over `W` and `N`.
///
/// Tied mode uses one `W` and one `N`. For `K ≥ 4` the chain forces the tied
/// `N` onto `ρ = σ`, leaving one coordinate for `N`; at `K = 3` `N` is free.
/// Per-index mode then releases `W_1`, `W_K` and every `N_k`.
pub fn thm6_bound<T: Real>(
    k: usize,
    g: C<T>,
    p: T,
    cfg: &SearchConfig,
    tie: TieMode,
) -> Result<BoundResult<T>, BoundError> {
    sym_check(k)?;
    let sh = Shifted(gain_mode(g));
    let (mut conf, v) = thm6_tied_search(k, g, p, cfg);
    let mut best = v;
    if tie == TieMode::PerIndex && v.is_finite() {
        let slot = sh.coords::<T>(cfg);
        let coords: Vec<Coord<T>> = (0..k).flat_map(|_| slot.iter().copied()).collect();
        let decode = |x: &[T]| {
            let ps = sh.decode_all(x);
            KGenieConfig {
                w1: ps[0],
                wk: ps[1],
                n: ps[2..].to_vec(),
                tie: TieMode::PerIndex,
            }
        };
        let mut all = vec![conf.w1, conf.wk];
        all.extend_from_slice(&conf.n);
        let (x, vf) = coordinate_descent(
            |x: &[T]| thm6_value(k, g, p, &decode(x)),
            &coords,
            sh.encode_all(&all),
            cfg.sweeps,
            cfg.refine_factor,
        );
        if vf < best {
            conf = decode(&x);
            best = vf;
        }
    }
    conf.tie = tie;
    Ok(BoundResult::new("thm6", k, best).with_params(conf.params()))
}

// ---------------------------------------------------------------------------
// Closed forms

fn closed_sum<T: Real>(k: usize, p: T, coef: T, a: T) -> T {
    let one = T::one();
    let mut total = T::zero();
    for idx in 2..k {
        let i = kf::<T>(idx);
        total += (coef * ((i - one) * p + a) / (i * p + a)).ln_1p();
    }
    total / T::LN_2()
}

fn lead_term<T: Real>(k: usize, g2: T, p: T) -> T {
    log2(T::one() + p / (kf::<T>(k - 1) * g2 * p + T::one()))
}

/// Weak-interference closed form (sum rate), `|g| < 1`.
pub fn prop1_closed<T: Real>(k: usize, g: C<T>, p: T) -> BoundResult<T> {
    let g2 = g.norm_sqr();
    if k < 3 || g2 >= T::one() {
        return BoundResult::infeasible("prop1", k.max(1));
    }
    let one = T::one();
    let coef = one_minus(g).norm_sqr() * p / (one - g2);
    let v = lead_term(k, g2, p) + log2(one + kf::<T>(k - 1) * p) + closed_sum(k, p, coef, one);
    BoundResult::new("prop1", k, v)
}

/// Closed form of the change-of-interference bound at
/// `ρ² = σ² = |g|²/(1+|g|²)` (sum rate).
pub fn prop2_closed<T: Real>(k: usize, g: C<T>, p: T) -> BoundResult<T> {
    if k < 3 {
        return BoundResult::infeasible("prop2", k.max(1));
    }
    let g2 = g.norm_sqr();
    let one = T::one();
    let coef = one_minus(g).norm_sqr() * (one + g2) * p;
    let v =
        lead_term(k, g2, p) + log2(one + kf::<T>(k - 1) * (one + g2) * p) + closed_sum(k, p, coef, one / (one + g2));
    BoundResult::new("prop2", k, v)
}

/// Whether `|g|^{2γ} − |g|² − 1 ≥ 0` with `γ > 1`.
pub fn prop3_gamma_feasible<T: Real>(g: C<T>, gamma: T) -> bool {
    let g2 = g.norm_sqr();
    gamma > T::one() && g2 > T::one() && g2.powf(gamma) - g2 - T::one() >= T::zero()
}

/// Strong-interference closed form (sum rate) for one `γ`.
pub fn prop3_closed<T: Real>(k: usize, g: C<T>, p: T, gamma: T) -> BoundResult<T> {
    if k < 3 || !prop3_gamma_feasible(g, gamma) {
        return BoundResult::infeasible("prop3", k.max(1));
    }
    let g2 = g.norm_sqr();
    let one = T::one();
    let coef = one_minus(g).norm_sqr() * p / (one - g2.powf(-(gamma - one)));
    let lead = log2(one + kf::<T>(k - 1) * g2.powf(gamma) * p);
    let v = lead_term(k, g2, p) + lead + closed_sum(k, p, coef, g2.powf(-gamma));
    BoundResult::new("prop3", k, v).with_params(vec![("gamma".into(), gamma)])
}

/// 64 log-spaced exponents in `(1, 200]`.
pub fn gamma_grid<T: Real>() -> Vec<T> {
    let top = T::lit(200.0).ln();
    (1..=64).map(|i| (top * kf::<T>(i) / T::lit(64.0)).exp()).collect()
}

/// `prop3_closed` minimized over the feasible part of [`gamma_grid`].
pub fn prop3_best<T: Real>(k: usize, g: C<T>, p: T) -> BoundResult<T> {
    min_result(
        "prop3",
        k,
        gamma_grid::<T>().into_iter().map(|gm| prop3_closed(k, g, p, gm)),
    )
}

/// Minimum of the closed forms and the two-user Kramer bound scaled to
/// `K` users.
pub fn closed_form_best<T: Real>(k: usize, g: C<T>, p: T) -> BoundResult<T> {
    let mut all = vec![prop2_closed(k, g, p), kramer_two_user(p, g).for_users(k)];
    if g.norm_sqr() < T::one() {
        all.push(prop1_closed(k, g, p));
    } else {
        all.push(prop3_best(k, g, p));
    }
    min_result("closed_form_best", k, all)
}

// ---------------------------------------------------------------------------
// Large K

/// Per-user DoF, power offset `ℓ*` in bits (`+∞` at `g = 1`) and, when a
/// power is given, the regime of `η`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LargeKResult<T: Real> {
    pub d_k: T,
    pub ell_star: T,
    pub eta: Option<T>,
}

/// `ℓ* = −log(|1−g|²(1+|g|²))` for `|g|² ≤ 1`, `−log|1−g|²` beyond.
pub fn power_offset<T: Real>(g: C<T>) -> LargeKResult<T> {
    let one = T::one();
    let d = one_minus(g).norm_sqr();
    let ell = if d == T::zero() {
        T::infinity()
    } else if g.norm_sqr() <= one {
        -log2(d * (one + g.norm_sqr()))
    } else {
        -log2(d)
    };
    LargeKResult {
        d_k: one,
        ell_star: ell,
        eta: None,
    }
}

/// `ℓ*` in decibels: `10·log10(2^ℓ*)`.
pub fn offset_db<T: Real>(ell_bits: T) -> T {
    T::lit(10.0) * T::lit(2.0).log10() * ell_bits
}

/// `η = 0` for SNR ≤ ℓ*, `1` up to 2ℓ*, `1/2` beyond; both sides in dB.
pub fn eta_regime<T: Real>(p: T, g: C<T>) -> LargeKResult<T> {
    let mut r = power_offset(g);
    let snr_db = T::lit(10.0) * p.log10();
    let thr = offset_db(r.ell_star);
    r.eta = Some(if snr_db <= thr {
        T::zero()
    } else if snr_db <= thr + thr {
        T::one()
    } else {
        T::lit(0.5)
    });
    r
}

/// High-SNR affine approximation of the per-user closed-form bound,
/// `log P − ℓ*` bits per complex use. `−∞` at `g = 1`.
pub fn affine_approx<T: Real>(_k: usize, p: T, g: C<T>) -> T {
    log2(p) - power_offset(g).ell_star
}

// ---------------------------------------------------------------------------
// Asymmetric bounds

/// Orderings to evaluate: the supplied list, or all `K!` when `K` is within
/// the enumeration cap.
fn orderings(k: usize, perms: Option<&[Vec<usize>]>, cap: usize) -> Result<Vec<Vec<usize>>, BoundError> {
    match perms {
        Some(list) => {
            for p in list {
                if !is_permutation(p, k) {
                    return Err(BoundError::BadPermutation(p.clone()));
                }
            }
            Ok(list.to_vec())
        }
        None if k <= cap => Ok(permutations(k)),
        None => Ok(vec![(0..k).collect()]),
    }
}

/// Penalty form of the mixed-interference asymmetric bound for one
/// (already permuted) ordering, with `N_2` independent of `Z_2`. Not a
/// valid upper bound in general; see the module docs.
pub fn kub2b_value<T: Real>(ch: &Channel<T>, sigma_n2: T) -> T {
    let k = ch.k();
    let h1k = ch.h(0, k - 1).norm_sqr();
    let tol = T::feas_tol();
    if k < 3 || h1k > T::one() + tol || sigma_n2 * sigma_n2 < h1k - tol || !(sigma_n2 >= T::zero()) {
        return T::infinity();
    }
    let mut s = UserSystem::new(ch);
    let n2 = s.fresh_var(sigma_n2 * sigma_n2);
    let s2 = &s.mix(0, &[0]) + &n2;
    let x = s.x.clone();
    let mut total = mi(&x[0..1], &s.y[0..1], &[]) + mi(&x[k - 1..k], &s.y[k - 1..k], &x[..k - 1]);
    for idx in 1..k - 1 {
        total += mi(&x[idx..idx + 1], std::slice::from_ref(&s2), &x[..idx]);
        let mut cond: Vec<GaussVar<T>> = x[..idx].to_vec();
        cond.extend_from_slice(&x[idx + 1..]);
        cond.push(s2.clone());
        total += mi(&x[idx..idx + 1], &s.y[idx..idx + 1], &cond);
    }
    finite_or_inf(total)
}

/// Penalty-free form available under the proportionality condition: user
/// `k` of the middle users gets its own `S_k` with an independent `N_k` of
/// standard deviation `sigmas[k − 2]` (one-based `k`), as in the symmetric
/// bound. `sigmas.len() == K − 2`.
pub fn kub2b_reduced_value<T: Real>(ch: &Channel<T>, sigmas: &[T]) -> T {
    let k = ch.k();
    let tol = T::feas_tol();
    if k < 3 || sigmas.len() != k - 2 || !sigmas.iter().all(|&s| s >= T::zero()) {
        return T::infinity();
    }
    let mut s = UserSystem::new(ch);
    let mut ns = vec![GaussVar::zero(); k];
    for idx in 1..k - 1 {
        ns[idx] = s.fresh_var(sigmas[idx - 1] * sigmas[idx - 1]);
    }
    // V_{N_k} = N_k | Z_k − (h_{k,k+1}/h_{k−1,k+1}) N_k.
    for idx in 1..k - 1 {
        let Some(ratio) = chain_ratio(ch, idx) else {
            return T::infinity();
        };
        let v = cond_var(&ns[idx], &[&s.z[idx] - &ns[idx].scale(ratio)]);
        let need = if idx + 1 < k - 1 {
            sigmas[idx] * sigmas[idx]
        } else {
            ch.h(k - 2, k - 1).norm_sqr()
        };
        if v < need - tol {
            return T::infinity();
        }
    }
    let x = s.x.clone();
    let mut total = mi(&x[0..1], &s.y[0..1], &[]) + mi(&x[k - 1..k], &s.y[k - 1..k], &x[..k - 1]);
    for idx in 1..k - 1 {
        let sk = &s.mix(idx - 1, &[idx - 1]) + &ns[idx];
        total += mi(&x[idx..idx + 1], &[s.y[idx].clone(), sk], &x[..idx]);
    }
    finite_or_inf(total)
}

fn chain_ratio<T: Real>(ch: &Channel<T>, idx: usize) -> Option<C<T>> {
    let den = ch.h(idx - 1, idx + 1);
    if den.norm_sqr() <= T::singular_eps() {
        return None;
    }
    Some(ch.h(idx, idx + 1) / den)
}

/// Standard deviations for [`kub2b_reduced_value`] starting from `σ_{N_2}`,
/// each later one set to `√Var(N_k | Z_k − r_k N_k) = σ_k/√(1 + |r_k|²σ_k²)`
/// so every chain constraint holds with equality.
pub fn kub2b_reduced_chain<T: Real>(ch: &Channel<T>, sigma_n2: T) -> Vec<T> {
    let k = ch.k();
    let mut out = vec![sigma_n2];
    for idx in 1..k.saturating_sub(2) {
        let s = out[idx - 1];
        let r2 = chain_ratio(ch, idx).map_or(T::zero(), |r| r.norm_sqr());
        out.push(s / (T::one() + r2 * s * s).sqrt());
    }
    out
}

/// Mixed-interference asymmetric bound minimized over orderings. Uses the
/// penalty-free form wherever the ordering satisfies the proportionality
/// condition.
pub fn asym_thm_kub2b<T: Real>(
    ch: &Channel<T>,
    sigma_n2: T,
    perms: Option<&[Vec<usize>]>,
    cfg: &SearchConfig,
) -> Result<BoundResult<T>, BoundError> {
    let k = ch.k();
    sym_check(k)?;
    let list = orderings(k, perms, cfg.max_perm_k)?;
    Ok(min_result(
        "kub2b",
        k,
        list.into_iter().map(|perm| {
            let c = ch.permuted(&perm);
            let mut v = kub2b_value(&c, sigma_n2);
            if reduction_holds(ch, &perm) {
                v = v.min(kub2b_reduced_value(&c, &kub2b_reduced_chain(&c, sigma_n2)));
            }
            BoundResult::new("kub2b", k, v)
                .with_params(vec![("sigma_n2".into(), sigma_n2)])
                .with_permutation(perm)
        }),
    ))
}

/// [`asym_thm_kub2b`] with `σ_{N_2}` line-searched on `[|h_{1K}|, 1]` per
/// ordering.
pub fn asym_kub2b_optimize<T: Real>(
    ch: &Channel<T>,
    perms: Option<&[Vec<usize>]>,
    cfg: &SearchConfig,
) -> Result<BoundResult<T>, BoundError> {
    let k = ch.k();
    sym_check(k)?;
    let list = orderings(k, perms, cfg.max_perm_k)?;
    let n = cfg.sigma_points.max(3);
    Ok(min_result(
        "kub2b",
        k,
        list.into_iter().map(|perm| {
            let c = ch.permuted(&perm);
            let lo = c.h(0, k - 1).norm();
            if lo > T::one() + T::feas_tol() {
                return BoundResult::infeasible("kub2b", k).with_permutation(perm);
            }
            let red = reduction_holds(ch, &perm);
            let f = |s: T| {
                let v = kub2b_value(&c, s);
                if red {
                    v.min(kub2b_reduced_value(&c, &kub2b_reduced_chain(&c, s)))
                } else {
                    v
                }
            };
            let (s, v) = line_min(f, lo.min(T::one()), T::one(), n);
            BoundResult::new("kub2b", k, v)
                .with_params(vec![("sigma_n2".into(), s)])
                .with_permutation(perm)
        }),
    ))
}

/// Noises of the cyclic asymmetric bound: `w[k]`, `n[k]` belong to user `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymGenie<T: Real> {
    pub w: Vec<NoiseParam<T>>,
    pub n: Vec<NoiseParam<T>>,
}

impl<T: Real> AsymGenie<T> {
    pub fn tied(k: usize, w: NoiseParam<T>, n: NoiseParam<T>) -> Self {
        AsymGenie {
            w: vec![w; k],
            n: vec![n; k],
        }
    }
}

/// Cyclic-shift average of the asymmetric change-of-interference bound for
/// one (already permuted) ordering. Not a valid upper bound in general; see
/// the module docs.
pub fn kub3b_value<T: Real>(ch: &Channel<T>, genie: &AsymGenie<T>) -> T {
    let k = ch.k();
    if k < 3 || genie.w.len() != k || genie.n.len() != k {
        return T::infinity();
    }
    if !genie.w.iter().chain(genie.n.iter()).all(|p| p.valid()) {
        return T::infinity();
    }
    let tol = T::feas_tol();
    let mut s = UserSystem::new(ch);
    let mut ws = Vec::with_capacity(k);
    let mut ns = Vec::with_capacity(k);
    for u in 0..k {
        let z = s.z[u].clone();
        ws.push(genie.w[u].build(&mut s.basis, &z).expect("validated noise"));
        ns.push(genie.n[u].build(&mut s.basis, &z).expect("validated noise"));
    }
    let dzw: Vec<T> = (0..k).map(|u| (&s.z[u] - &ws[u]).variance()).collect();
    let vw: Vec<T> = (0..k).map(|u| cond_var(&ws[u], &[&s.z[u] - &ws[u]])).collect();
    let us: Vec<GaussVar<T>> = (0..k).map(|u| &s.mix(u, &[u]) + &ws[u]).collect();

    let mut total = T::zero();
    for shift in 0..k {
        let o: Vec<usize> = (0..k).map(|l| (shift + l) % k).collect();
        let (first, second, last) = (o[0], o[1], o[k - 1]);
        let h = ch.h(first, last).norm_sqr();
        let sn2 = genie.n[second].sigma * genie.n[second].sigma;
        if vw[first] < sn2 - tol || sn2 < h * dzw[last] - tol || h <= T::singular_eps() {
            return T::infinity();
        }
        let tilde = s.fresh_var(sn2 / h - dzw[last]);
        let s2 = &s.mix(first, &[first]) + &ns[second];
        let xo: Vec<GaussVar<T>> = o.iter().map(|&u| s.x[u].clone()).collect();
        total += mi(&xo[0..1], &s.y[first..first + 1], &[]);
        total += mi(&xo[k - 1..k], &s.y[last..last + 1], std::slice::from_ref(&us[last]));
        let target = &(&(&s.x[last] + &s.z[last]) - &ws[last]) + &tilde;
        total += mi(std::slice::from_ref(&us[last]), std::slice::from_ref(&target), &[]);
        for l in 1..k - 1 {
            let u = o[l];
            total += mi(&xo[l..l + 1], std::slice::from_ref(&s2), &xo[..l]);
            let mut cond: Vec<GaussVar<T>> = xo[..l].to_vec();
            cond.extend_from_slice(&xo[l + 1..]);
            cond.push(s2.clone());
            total += mi(&xo[l..l + 1], &s.y[u..u + 1], &cond);
        }
    }
    finite_or_inf(total / kf::<T>(k))
}

/// Cyclic asymmetric bound at fixed noises, minimized over orderings.
pub fn asym_thm_kub3b<T: Real>(
    ch: &Channel<T>,
    genie: &AsymGenie<T>,
    perms: Option<&[Vec<usize>]>,
    cfg: &SearchConfig,
) -> Result<BoundResult<T>, BoundError> {
    let k = ch.k();
    sym_check(k)?;
    let list = orderings(k, perms, cfg.max_perm_k)?;
    Ok(min_result(
        "kub3b",
        k,
        list.into_iter().map(|perm| {
            let c = ch.permuted(&perm);
            BoundResult::new("kub3b", k, kub3b_value(&c, genie)).with_permutation(perm)
        }),
    ))
}

/// [`asym_thm_kub3b`] with one `W` and one `N` searched per ordering.
pub fn asym_kub3b_optimize<T: Real>(
    ch: &Channel<T>,
    perms: Option<&[Vec<usize>]>,
    cfg: &SearchConfig,
) -> Result<BoundResult<T>, BoundError> {
    let k = ch.k();
    sym_check(k)?;
    let list = orderings(k, perms, cfg.max_perm_k)?;
    let mode = ParamMode::for_channel(ch);
    let mut c = cfg.clone();
    c.untie = false;
    Ok(min_result(
        "kub3b",
        k,
        list.into_iter().map(|perm| {
            let chp = ch.permuted(&perm);
            let f = |ps: &[NoiseParam<T>]| kub3b_value(&chp, &AsymGenie::tied(k, ps[0], ps[1]));
            let (ps, v) = optimize_noises(f, 1, 2, mode, &c, vec![]);
            let mut params = Vec::new();
            ps[0].push_params("w", &mut params);
            ps[1].push_params("n", &mut params);
            BoundResult::new("kub3b", k, v)
                .with_params(params)
                .with_permutation(perm)
        }),
    ))
}

/// Real gain as a complex number.
pub fn real_gain<T: Real>(g: T) -> C<T> {
    Complex::new(g, T::zero())
}

fn one_minus<T: Real>(g: C<T>) -> C<T> {
    Complex::new(T::one() - g.re, -g.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_semi_symmetric, make_symmetric};

    fn re(x: f64) -> C<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn closed_form_examples() {
        let g = re(0.5f64.sqrt());
        assert!((prop1_closed(3, g, 10.0).sum_rate - 6.250227).abs() < 1e-5);
        assert!((prop2_closed(3, g, 10.0).sum_rate - 6.621870).abs() < 1e-5);
        assert!((prop3_closed(3, re(2f64.sqrt()), 10.0, 2.0).sum_rate - 8.107272).abs() < 1e-5);
        let big = prop2_closed(100_000, re(0.9f64.sqrt()), 5.0);
        assert!(big.normalized > 0.016 && big.normalized < 0.020);
        assert!(!prop1_closed(3, re(1.0), 10.0).feasible);
    }

    #[test]
    fn prop3_gamma_rules() {
        let g = re(2f64.sqrt());
        assert!(!prop3_closed(3, g, 10.0, 1.2).feasible);
        assert!(prop3_closed(3, g, 10.0, 1.6).feasible);
        assert!(!prop3_closed(3, re(0.9), 10.0, 5.0).feasible);
        let grid = gamma_grid::<f64>();
        assert_eq!(grid.len(), 64);
        assert!(grid[0] > 1.0 && (grid[63] - 200.0).abs() < 1e-9);
    }

    #[test]
    fn prop3_is_best_proposition_for_strong_gain() {
        let g = re(2f64.sqrt());
        let (k, p) = (100, 100.0);
        let p3 = prop3_best(k, g, p).sum_rate;
        assert!(p3 < prop2_closed(k, g, p).sum_rate);
        // Kramer's ½log(1+P+|g|²P) per user is lower still here.
        let best = closed_form_best(k, g, p);
        assert_eq!(best.name, "kramer");
        assert!(best.sum_rate < p3);
        for g2 in [1.2, 1.5, 2.0, 4.0] {
            let g = re(f64::sqrt(g2));
            let k = 100_000;
            assert!(prop3_best(k, g, 100.0).sum_rate <= prop2_closed(k, g, 100.0).sum_rate);
        }
    }

    #[test]
    fn closed_form_best_zero_gain() {
        let best = closed_form_best(5, re(0.0), 10.0);
        assert!((best.per_user() - 11f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn offsets_and_regimes() {
        assert!(power_offset(re(1.0)).ell_star.is_infinite());
        assert!((power_offset(re(0.5f64.sqrt())).ell_star - 2.958144).abs() < 1e-5);
        assert!((power_offset(re(2f64.sqrt())).ell_star - 2.543107).abs() < 1e-5);
        let g = re(0.5f64.sqrt());
        let ell = power_offset(g).ell_star;
        assert_eq!(eta_regime(1.0, g).eta, Some(0.0));
        let mid = 2f64.powf(1.5 * ell);
        assert_eq!(eta_regime(mid, g).eta, Some(1.0));
        assert_eq!(eta_regime(1e9, g).eta, Some(0.5));
        assert!(affine_approx(10, 2f64.powf(ell), g).abs() < 1e-12);
    }

    #[test]
    fn affine_tracks_closed_form() {
        let g = re(0.5f64.sqrt());
        let k = 1000;
        let mut gaps = Vec::new();
        for p in [1e3, 1e4, 1e5] {
            let per = prop2_closed(k, g, p).per_user();
            gaps.push(per - affine_approx(k, p, g));
        }
        let spread = gaps.iter().cloned().fold(f64::MIN, f64::max) - gaps.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 0.05, "{gaps:?}");
        let p = 1e5;
        let per = prop2_closed(k, g, p).per_user();
        assert!((per - affine_approx(k, p, g)).abs() / per < 0.1);
    }

    #[test]
    fn optimized_symmetric_bounds_improve_on_closed_forms() {
        let cfg = SearchConfig::fast();
        let g = re(0.5f64.sqrt());
        for k in [3, 5] {
            let t5 = thm5_bound(k, g, 10.0, &cfg, TieMode::Tied).unwrap();
            assert!(t5.sum_rate <= prop1_closed(k, g, 10.0).sum_rate + 1e-12);
            let t6 = thm6_bound(k, g, 10.0, &cfg, TieMode::Tied).unwrap();
            assert!(t6.sum_rate <= prop2_closed(k, g, 10.0).sum_rate + 1e-12);
        }
        assert!(!thm5_bound(4, re(1.1), 10.0, &cfg, TieMode::Tied).unwrap().feasible);
        let strong = re(2f64.sqrt());
        let t6 = thm6_bound(4, strong, 10.0, &cfg, TieMode::PerIndex).unwrap();
        assert!(t6.sum_rate <= prop3_best(4, strong, 10.0).sum_rate + 1e-12);
    }

    #[test]
    fn weak_bound_constraint() {
        let g = re(0.8);
        // Var(N | Z − N) = σ² for ρ = σ; below |g|² fails.
        assert!(thm5_value(3, g, 10.0, &[NoiseParam::aligned(0.7)]).is_infinite());
        assert!(thm5_value(3, g, 10.0, &[NoiseParam::aligned(0.8)]).is_finite());
    }

    #[test]
    fn kub2b_examples() {
        let cfg = SearchConfig::fast();
        let g = re(0.6);
        let ch = make_symmetric(4, g, 10.0);
        let a = asym_kub2b_optimize(&ch, None, &cfg).unwrap();
        assert!(a.feasible && a.sum_rate.is_finite());
        assert!(kub2b_value(&ch, 0.9).is_finite());
        // σ_{N_2} below |h_{1K}| and |h_{1K}| > 1 are both infeasible.
        assert!(kub2b_value(&ch, 0.5).is_infinite());
        let strong = make_symmetric(4, re(1.2f64.sqrt()), 10.0);
        assert!(!asym_thm_kub2b(&strong, 1.0, None, &cfg).unwrap().feasible);
    }

    #[test]
    fn reduced_form_matches_symmetric_evaluator() {
        for k in [3, 4, 5] {
            for g2 in [0.1f64, 0.2] {
                let g = re(g2.sqrt());
                let ch = make_symmetric(k, g, 10.0);
                let sig = kub2b_reduced_chain(&ch, 1.0);
                let red = kub2b_reduced_value(&ch, &sig);
                let ns: Vec<_> = sig.iter().map(|&s| NoiseParam::real(s, 0.0)).collect();
                let sym = thm5_value(k, g, 10.0, &ns);
                assert!(red.is_finite(), "k={k} g2={g2}");
                assert!((red - sym).abs() < 1e-9, "k={k} g2={g2}: {red} vs {sym}");
            }
        }
    }

    #[test]
    fn asymmetric_forms_undercut_achievable_rates() {
        // At weak interference both displayed forms fall below the best
        // simple achievable sum rate, so neither is an upper bound there.
        let cfg = SearchConfig::fast();
        let id = [vec![0, 1, 2]];
        let g = re(0.1);
        let p = 100.0;
        let ch = make_symmetric(3, g, p);
        let lower = crate::baselines::lower_bounds(3, g, p).best * 3.0;
        let a = asym_kub2b_optimize(&ch, Some(&id), &cfg).unwrap().sum_rate;
        let b = asym_kub3b_optimize(&ch, Some(&id), &cfg).unwrap().sum_rate;
        assert!(a < lower && b < lower, "{a} {b} vs {lower}");
        // The symmetric bounds stay above it.
        let t5 = thm5_bound(3, g, p, &cfg, TieMode::Tied).unwrap().sum_rate;
        let t6 = thm6_bound(3, g, p, &cfg, TieMode::Tied).unwrap().sum_rate;
        assert!(t5 >= lower && t6 >= lower, "{t5} {t6} vs {lower}");
    }

    #[test]
    fn kub3b_examples() {
        let cfg = SearchConfig::fast();
        let ch = make_symmetric(3, re(0.6), 10.0);
        assert!(asym_kub3b_optimize(&ch, Some(&[vec![0, 1, 2]]), &cfg).unwrap().feasible);
        let semi = make_semi_symmetric(3, &[Complex::new(0.3, 0.4), Complex::new(-0.5, 0.2)], 10.0).unwrap();
        assert!(asym_kub3b_optimize(&semi, None, &cfg).unwrap().feasible);
        // σ²_N below |h|²·Var(Z − W) violates the constraint chain.
        let genie = AsymGenie::tied(3, NoiseParam::real(0.5, 0.0), NoiseParam::real(0.1, 0.0));
        assert!(kub3b_value(&ch, &genie).is_infinite());
    }

    #[test]
    fn bad_permutation_rejected() {
        let ch = make_symmetric(3, re(0.5), 10.0);
        let err = asym_thm_kub2b(&ch, 0.9, Some(&[vec![0, 0, 1]]), &SearchConfig::fast());
        assert!(matches!(err, Err(BoundError::BadPermutation(_))));
    }
}
