//! Search over genie-noise parameters `(σ, ρ)`.
//!
//! Parameters are laid out user-major: `users × per_user` noises. The
//! search first ties every user to one set of `per_user` noises (a full
//! grid when that set has at most two scalar coordinates, otherwise seeded
//! coordinate descent), then optionally releases the tie.

use num_complex::Complex;

use crate::bound::NoiseParam;
use crate::channel::Channel;
use crate::scalar::{Real, C};
use crate::search::{coordinate_descent, linspace, Coord, SearchConfig};

/// Real scenarios search real `ρ ∈ [-1,1]`; complex ones magnitude and
/// phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamMode {
    Real,
    Complex,
}

impl ParamMode {
    pub fn for_channel<T: Real>(ch: &Channel<T>) -> Self {
        let k = ch.k();
        let real = (0..k).all(|i| (0..k).all(|j| ch.h(i, j).im == T::zero()));
        if real {
            ParamMode::Real
        } else {
            ParamMode::Complex
        }
    }

    pub(crate) fn width(self) -> usize {
        match self {
            ParamMode::Real => 2,
            ParamMode::Complex => 3,
        }
    }

    pub(crate) fn coords<T: Real>(self, cfg: &SearchConfig) -> Vec<Coord<T>> {
        match self {
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

    pub(crate) fn decode<T: Real>(self, x: &[T]) -> NoiseParam<T> {
        match self {
            ParamMode::Real => NoiseParam::new(x[0], Complex::new(x[1], T::zero())),
            ParamMode::Complex => NoiseParam::new(x[0], Complex::from_polar(x[1], x[2])),
        }
    }

    pub(crate) fn encode<T: Real>(self, n: &NoiseParam<T>) -> Vec<T> {
        match self {
            ParamMode::Real => vec![n.sigma, n.rho.re],
            ParamMode::Complex => {
                let (m, ph) = n.rho.to_polar();
                let two_pi = T::PI() + T::PI();
                let ph = if ph < T::zero() { ph + two_pi } else { ph };
                vec![n.sigma, m, ph]
            }
        }
    }
}

/// Default seeds for one noise slot: the `ρ = σ` family, the perfectly
/// correlated noise, and the independent unit noise.
pub fn slot_seeds<T: Real>() -> Vec<NoiseParam<T>> {
    let mut v: Vec<NoiseParam<T>> = linspace(T::lit(0.1), T::one(), 10)
        .into_iter()
        .map(NoiseParam::aligned)
        .collect();
    v.push(NoiseParam::real(T::one(), T::zero()));
    v
}

/// Cartesian product of per-slot seeds.
pub fn product_seeds<T: Real>(per_user: usize) -> Vec<Vec<NoiseParam<T>>> {
    let base = slot_seeds::<T>();
    let mut out: Vec<Vec<NoiseParam<T>>> = vec![vec![]];
    for _ in 0..per_user {
        out = out
            .into_iter()
            .flat_map(|pre| {
                base.iter().map(move |s| {
                    let mut v = pre.clone();
                    v.push(*s);
                    v
                })
            })
            .collect();
    }
    out
}

fn replicate<T: Real>(tied: &[NoiseParam<T>], users: usize) -> Vec<NoiseParam<T>> {
    (0..users).flat_map(|_| tied.iter().copied()).collect()
}

/// Minimize `f` over `users × per_user` noises.
pub fn optimize_noises<T: Real>(
    f: impl Fn(&[NoiseParam<T>]) -> T,
    users: usize,
    per_user: usize,
    mode: ParamMode,
    cfg: &SearchConfig,
    extra_seeds: Vec<Vec<NoiseParam<T>>>,
) -> (Vec<NoiseParam<T>>, T) {
    let w = mode.width();
    let slot_coords = mode.coords::<T>(cfg);
    let tied_coords: Vec<Coord<T>> = (0..per_user).flat_map(|_| slot_coords.iter().copied()).collect();
    let decode_tied = |x: &[T]| -> Vec<NoiseParam<T>> {
        let tied: Vec<_> = x.chunks(w).map(|c| mode.decode(c)).collect();
        replicate(&tied, users)
    };
    let tied_obj = |x: &[T]| f(&decode_tied(x));

    let mut best: (Vec<T>, T) = (Vec::new(), T::infinity());
    let consider = |x: Vec<T>, v: T, best: &mut (Vec<T>, T)| {
        if v < best.1 || best.0.is_empty() {
            *best = (x, v);
        }
    };

    if tied_coords.len() <= 2 {
        let grids: Vec<Vec<T>> = tied_coords
            .iter()
            .map(|c| {
                if c.periodic {
                    crate::search::phase_grid(c.points)
                } else {
                    linspace(c.lo, c.hi, c.points)
                }
            })
            .collect();
        let mut idx = vec![0usize; grids.len()];
        loop {
            let x: Vec<T> = idx.iter().zip(&grids).map(|(&i, g)| g[i]).collect();
            let v = tied_obj(&x);
            consider(x, v, &mut best);
            let mut d = 0;
            while d < idx.len() {
                idx[d] += 1;
                if idx[d] < grids[d].len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == idx.len() {
                break;
            }
        }
    }
    for seed in product_seeds::<T>(per_user).into_iter().chain(extra_seeds) {
        let x: Vec<T> = seed.iter().flat_map(|n| mode.encode(n)).collect();
        let v = tied_obj(&x);
        consider(x, v, &mut best);
    }
    let sweeps = if tied_coords.len() <= 2 { 1 } else { cfg.sweeps };
    let (x, v) = coordinate_descent(tied_obj, &tied_coords, best.0, sweeps, cfg.refine_factor);
    let mut result = (decode_tied(&x), v);

    if cfg.untie && users > 1 && v.is_finite() {
        let full_coords: Vec<Coord<T>> = (0..users).flat_map(|_| tied_coords.iter().copied()).collect();
        let x0: Vec<T> = result.0.iter().flat_map(|n| mode.encode(n)).collect();
        let full_obj = |x: &[T]| {
            let ps: Vec<_> = x.chunks(w).map(|c| mode.decode(c)).collect();
            f(&ps)
        };
        let (xf, vf) = coordinate_descent(full_obj, &full_coords, x0, cfg.sweeps, cfg.refine_factor);
        if vf < result.1 {
            result = (xf.chunks(w).map(|c| mode.decode(c)).collect(), vf);
        }
    }
    result
}

/// Real correlation as a complex number.
pub fn real_rho<T: Real>(r: T) -> C<T> {
    Complex::new(r, T::zero())
}
