//! Deterministic box-constrained minimizers: grid scans, golden-section
//! refinement and coordinate descent. Objectives return `+∞` at infeasible
//! points.

use crate::scalar::Real;

/// Grid sizes and iteration counts for every parameter search.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Points on `σ ∈ [0,1]` and on real `ρ ∈ [-1,1]`.
    pub sigma_points: usize,
    /// Points on `|ρ| ∈ [0,1]` for complex scenarios.
    pub rho_mag_points: usize,
    /// Points on the correlation phase, `[0, 2π)`.
    pub phase_points: usize,
    /// Local zoom factor of the final refinement pass.
    pub refine_factor: usize,
    /// Coordinate-descent sweeps.
    pub sweeps: usize,
    /// Magnitude points for the generalized Kramer correlation grid.
    pub gen_kramer_mag_points: usize,
    /// Scan points before golden-section refinement in 1-D problems.
    pub line_points: usize,
    /// After the user-tied search, release per-user parameters.
    pub untie: bool,
    /// Largest K for exhaustive permutation enumeration.
    pub max_perm_k: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            sigma_points: 101,
            rho_mag_points: 101,
            phase_points: 64,
            refine_factor: 10,
            sweeps: 3,
            gen_kramer_mag_points: 201,
            line_points: 1001,
            untie: true,
            max_perm_k: 5,
        }
    }
}

impl SearchConfig {
    /// Coarser grids for sweeps and surfaces.
    pub fn fast() -> Self {
        SearchConfig {
            sigma_points: 41,
            rho_mag_points: 21,
            phase_points: 16,
            refine_factor: 10,
            sweeps: 2,
            gen_kramer_mag_points: 101,
            line_points: 201,
            untie: false,
            max_perm_k: 5,
        }
    }
}

/// `n` evenly spaced points on `[lo, hi]` (both ends included).
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::from_usize(n - 1).unwrap();
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + step * T::from_usize(i).unwrap()
                    }
                })
                .collect()
        }
    }
}

/// `n` phases on `[0, 2π)`, endpoint excluded.
pub fn phase_grid<T: Real>(n: usize) -> Vec<T> {
    let two_pi = T::PI() + T::PI();
    (0..n)
        .map(|i| two_pi * T::from_usize(i).unwrap() / T::from_usize(n).unwrap())
        .collect()
}

/// Golden-section minimization on `[a, b]`.
pub fn golden_min<T: Real>(mut f: impl FnMut(T) -> T, mut a: T, mut b: T, iters: usize) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Scan `n` points on `[lo, hi]`, then golden-section search the bracket
/// around the best sample. Returns the better of the two.
pub fn line_min<T: Real>(mut f: impl FnMut(T) -> T, lo: T, hi: T, n: usize) -> (T, T) {
    let xs = linspace(lo, hi, n.max(2));
    let mut best = (xs[0], f(xs[0]));
    let mut best_i = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    if !best.1.is_finite() {
        return best;
    }
    let a = xs[best_i.saturating_sub(1)];
    let b = xs[(best_i + 1).min(xs.len() - 1)];
    let g = golden_min(&mut f, a, b, 60);
    if g.1 < best.1 {
        g
    } else {
        best
    }
}

/// One coordinate of a box-constrained search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coord<T: Real> {
    pub lo: T,
    pub hi: T,
    pub points: usize,
    /// Grid excludes `hi` (angles).
    pub periodic: bool,
}

impl<T: Real> Coord<T> {
    pub fn new(lo: T, hi: T, points: usize) -> Self {
        Coord {
            lo,
            hi,
            points,
            periodic: false,
        }
    }

    pub fn phase(points: usize) -> Self {
        Coord {
            lo: T::zero(),
            hi: T::PI() + T::PI(),
            points,
            periodic: true,
        }
    }

    fn grid(&self) -> Vec<T> {
        if self.periodic {
            phase_grid::<T>(self.points.max(1))
                .into_iter()
                .map(|p| self.lo + p * (self.hi - self.lo) / (T::PI() + T::PI()))
                .collect()
        } else {
            linspace(self.lo, self.hi, self.points.max(2))
        }
    }

    fn step(&self) -> T {
        let n = if self.periodic {
            self.points.max(1)
        } else {
            self.points.max(2) - 1
        };
        (self.hi - self.lo) / T::from_usize(n).unwrap()
    }

    fn clamp(&self, x: T) -> T {
        if self.periodic {
            x
        } else {
            x.max(self.lo).min(self.hi)
        }
    }
}

/// Cyclic coordinate descent from `x0`: each sweep scans every coordinate's
/// grid with the others held fixed, then a final pass rescans each
/// coordinate at `refine_factor`× resolution within one coarse step of the
/// incumbent. Moves only on strict improvement, so the result is
/// deterministic.
pub fn coordinate_descent<T: Real>(
    mut f: impl FnMut(&[T]) -> T,
    coords: &[Coord<T>],
    x0: Vec<T>,
    sweeps: usize,
    refine_factor: usize,
) -> (Vec<T>, T) {
    let mut x = x0;
    let mut fx = f(&x);
    let mut scan = |x: &mut Vec<T>, fx: &mut T, i: usize, pts: &[T]| {
        let keep = x[i];
        let mut best = keep;
        for &v in pts {
            x[i] = v;
            let val = f(x);
            if val < *fx {
                *fx = val;
                best = v;
            }
        }
        x[i] = best;
    };
    for _ in 0..sweeps {
        let before = fx;
        for (i, c) in coords.iter().enumerate() {
            scan(&mut x, &mut fx, i, &c.grid());
        }
        if fx >= before && fx.is_finite() {
            break;
        }
    }
    if refine_factor > 1 && fx.is_finite() {
        for (i, c) in coords.iter().enumerate() {
            let step = c.step();
            let fine = step / T::from_usize(refine_factor).unwrap();
            let center = x[i];
            let pts: Vec<T> = (1..=refine_factor)
                .flat_map(|j| {
                    let d = fine * T::from_usize(j).unwrap();
                    [center - d, center + d]
                })
                .map(|v| c.clamp(v))
                .collect();
            scan(&mut x, &mut fx, i, &pts);
        }
    }
    (x, fx)
}
