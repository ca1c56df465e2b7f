//! Jointly Gaussian scalar variables as linear combinations of independent
//! unit-variance latents, with exact entropy and mutual information.
//!
//! A [`GaussVar`] is a coefficient vector over latents allocated from a
//! [`LatentBasis`]. Vectors shorter than the basis are implicitly padded
//! with zeros, so variables built at different times combine freely.
//!
//! ```
//! use gic_core::gaussian::{mutual_info, Field, LatentBasis};
//! let mut basis = LatentBasis::<f64>::new(Field::Complex);
//! let x = basis.fresh_scaled(10f64.sqrt());
//! let z = basis.fresh();
//! let y = &x + &z;
//! let i = mutual_info(&[x], &[y], &[], Field::Complex).unwrap();
//! assert!((i - 11f64.log2()).abs() < 1e-12);
//! ```

use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{cre, Real, C};

/// Real or circularly-symmetric complex Gaussian field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Bits per unit of `log2 det`: 1 for complex, 1/2 for real.
    pub fn scale<T: Real>(self) -> T {
        match self {
            Field::Real => T::lit(0.5),
            Field::Complex => T::one(),
        }
    }

    /// `log2` of the per-dimension entropy constant (`πe` or `2πe`).
    fn log_const<T: Real>(self) -> T {
        let pe = T::PI() * T::E();
        match self {
            Field::Real => (T::lit(2.0) * pe).log2(),
            Field::Complex => pe.log2(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("entropy of an empty variable list")]
    EmptyList,
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("complex coefficient in a real-field system")]
    FieldMismatch,
}

/// Zero-mean Gaussian variable: coefficients over independent unit latents.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussVar<T: Real> {
    coeffs: Vec<C<T>>,
}

impl<T: Real> GaussVar<T> {
    /// The constant zero.
    pub fn zero() -> Self {
        GaussVar { coeffs: Vec::new() }
    }

    pub fn from_coeffs(coeffs: Vec<C<T>>) -> Self {
        GaussVar { coeffs }
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    fn coeff(&self, j: usize) -> C<T> {
        self.coeffs.get(j).copied().unwrap_or_else(Complex::default)
    }

    /// `Σ|c_j|²`.
    pub fn variance(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `E[self · other*]`.
    pub fn cov(&self, other: &Self) -> C<T> {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a * b.conj())
            .fold(Complex::default(), |acc, v| acc + v)
    }

    pub fn scale(&self, c: C<T>) -> Self {
        GaussVar {
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(cre(s))
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        GaussVar {
            coeffs: (0..n).map(|j| f(self.coeff(j), other.coeff(j))).collect(),
        }
    }

    /// `Σ w_i v_i`.
    pub fn combine(terms: &[(C<T>, &GaussVar<T>)]) -> Self {
        terms.iter().fold(GaussVar::zero(), |acc, (w, v)| &acc + &v.scale(*w))
    }
}

impl<T: Real> Add for &GaussVar<T> {
    type Output = GaussVar<T>;
    fn add(self, rhs: Self) -> GaussVar<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &GaussVar<T> {
    type Output = GaussVar<T>;
    fn sub(self, rhs: Self) -> GaussVar<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Real> Add for GaussVar<T> {
    type Output = GaussVar<T>;
    fn add(self, rhs: Self) -> GaussVar<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for GaussVar<T> {
    type Output = GaussVar<T>;
    fn sub(self, rhs: Self) -> GaussVar<T> {
        &self - &rhs
    }
}

impl<T: Real> Neg for &GaussVar<T> {
    type Output = GaussVar<T>;
    fn neg(self) -> GaussVar<T> {
        self.scale_re(-T::one())
    }
}

impl<T: Real> Mul<C<T>> for &GaussVar<T> {
    type Output = GaussVar<T>;
    fn mul(self, rhs: C<T>) -> GaussVar<T> {
        self.scale(rhs)
    }
}

/// Allocator of independent unit-variance latents sharing one field.
#[derive(Clone, Debug)]
pub struct LatentBasis<T: Real> {
    field: Field,
    count: usize,
    _t: PhantomData<T>,
}

impl<T: Real> LatentBasis<T> {
    pub fn new(field: Field) -> Self {
        LatentBasis {
            field,
            count: 0,
            _t: PhantomData,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// A new latent with unit variance.
    pub fn fresh(&mut self) -> GaussVar<T> {
        let mut coeffs = vec![Complex::default(); self.count + 1];
        coeffs[self.count] = cre(T::one());
        self.count += 1;
        GaussVar { coeffs }
    }

    /// A new latent with standard deviation `std`.
    pub fn fresh_scaled(&mut self, std: T) -> GaussVar<T> {
        self.fresh().scale_re(std)
    }

    /// `W = σ(ρ̄ z + √(1-|ρ|²) v)` with `v` fresh, so that `Var(W) = σ²` and
    /// `E[z W*] = ρσ`.
    pub fn correlated_pair(&mut self, sigma: T, rho: C<T>, z: &GaussVar<T>) -> Result<GaussVar<T>, GaussError> {
        let tol = T::lit(1e-12);
        if !(sigma >= T::zero() && sigma <= T::one() + tol) {
            return Err(GaussError::Domain(format!("sigma = {sigma} not in [0,1]")));
        }
        let r2 = rho.norm_sqr();
        if !(r2 <= T::one() + tol) {
            return Err(GaussError::Domain(format!("|rho| = {} > 1", r2.sqrt())));
        }
        if self.field == Field::Real && (rho.im != T::zero() || !z.is_real()) {
            return Err(GaussError::FieldMismatch);
        }
        let indep = (T::one() - r2).max(T::zero()).sqrt();
        let fresh = self.fresh();
        Ok(&z.scale(rho.conj() * sigma) + &fresh.scale_re(sigma * indep))
    }
}

// ---------------------------------------------------------------------------
// Linear algebra on coefficient vectors

fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x * y.conj())
        .fold(Complex::default(), |acc, v| acc + v)
}

fn norm_sqr<T: Real>(a: &[C<T>]) -> T {
    a.iter().map(|c| c.norm_sqr()).sum()
}

fn padded<T: Real>(v: &GaussVar<T>, n: usize) -> Vec<C<T>> {
    (0..n).map(|j| v.coeff(j)).collect()
}

/// Remove the components along an orthonormal set (two passes).
fn project_out<T: Real>(v: &mut [C<T>], basis: &[Vec<C<T>>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            for (x, qj) in v.iter_mut().zip(q.iter()) {
                *x -= c * qj;
            }
        }
    }
}

/// Orthonormal directions added by `vars` beyond the span of `prefix`.
/// A vector whose residual variance falls below `eps` relative to its own
/// variance is dropped as linearly dependent.
fn extend_basis<T: Real>(vars: &[Vec<C<T>>], prefix: &[Vec<C<T>>]) -> Vec<Vec<C<T>>> {
    let eps = T::singular_eps();
    let mut all: Vec<Vec<C<T>>> = prefix.to_vec();
    let mut added = Vec::new();
    for v in vars {
        let n0 = norm_sqr(v);
        if n0 <= T::zero() {
            continue;
        }
        let mut r = v.clone();
        project_out(&mut r, &all);
        let r2 = norm_sqr(&r);
        if r2 > eps * n0 && r2 > T::min_positive_value().sqrt() {
            let inv = r2.sqrt().recip();
            r.iter_mut().for_each(|x| *x = *x * inv);
            all.push(r.clone());
            added.push(r);
        }
    }
    added
}

/// Determinant of a small Hermitian matrix (real part), by LU with partial
/// pivoting.
fn det_hermitian<T: Real>(mut m: Vec<Vec<C<T>>>) -> T {
    let n = m.len();
    let mut det = cre(T::one());
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| {
                m[a][col]
                    .norm_sqr()
                    .partial_cmp(&m[b][col].norm_sqr())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if m[piv][col].norm_sqr() == T::zero() {
            return T::zero();
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..n {
            let f = m[row][col] / p;
            for k in col..n {
                let sub = f * m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    det.re
}

fn max_len<T: Real>(lists: &[&[GaussVar<T>]]) -> usize {
    lists
        .iter()
        .flat_map(|l| l.iter())
        .map(|v| v.coeffs.len())
        .max()
        .unwrap_or(0)
}

fn check_field<T: Real>(field: Field, lists: &[&[GaussVar<T>]]) -> Result<(), GaussError> {
    if field == Field::Real && lists.iter().flat_map(|l| l.iter()).any(|v| !v.is_real()) {
        return Err(GaussError::FieldMismatch);
    }
    Ok(())
}

/// Covariance matrix `Σ_ij = E[v_i v_j*]`.
pub fn covariance_matrix<T: Real>(vars: &[GaussVar<T>]) -> Vec<Vec<C<T>>> {
    vars.iter().map(|a| vars.iter().map(|b| a.cov(b)).collect()).collect()
}

/// Differential entropy in bits. Returns `-∞` when `det Σ` is below the
/// singularity threshold.
pub fn entropy<T: Real>(vars: &[GaussVar<T>], field: Field) -> Result<T, GaussError> {
    if vars.is_empty() {
        return Err(GaussError::EmptyList);
    }
    check_field(field, &[vars])?;
    let det = det_hermitian(covariance_matrix(vars));
    if det < T::singular_eps() {
        return Ok(T::neg_infinity());
    }
    let m = T::from_usize(vars.len()).unwrap();
    Ok(field.scale::<T>() * (m * field.log_const::<T>() + det.log2()))
}

/// Variance of `x` conditioned on `given` (residual variance after the
/// linear MMSE estimate).
pub fn cond_var<T: Real>(x: &GaussVar<T>, given: &[GaussVar<T>]) -> T {
    let n = max_len(&[std::slice::from_ref(x), given]);
    let g: Vec<_> = given.iter().map(|v| padded(v, n)).collect();
    let q = extend_basis(&g, &[]);
    let mut r = padded(x, n);
    project_out(&mut r, &q);
    norm_sqr(&r)
}

/// `I(a; b | cond)` in bits.
///
/// Every list is reduced to an orthonormal basis of its span in coefficient
/// space, so degenerate or repeated variables cost nothing and conditioning
/// on a deterministic function of other variables is exact. The value is
/// `-scale · log2 det(Gram of a-directions after removing b and cond)`;
/// `+∞` when that determinant is below the singularity threshold.
pub fn mutual_info<T: Real>(
    a: &[GaussVar<T>],
    b: &[GaussVar<T>],
    cond: &[GaussVar<T>],
    field: Field,
) -> Result<T, GaussError> {
    check_field(field, &[a, b, cond])?;
    let n = max_len(&[a, b, cond]);
    let pad = |l: &[GaussVar<T>]| l.iter().map(|v| padded(v, n)).collect::<Vec<_>>();
    let qc = extend_basis(&pad(cond), &[]);
    let qa = extend_basis(&pad(a), &qc);
    let qb = extend_basis(&pad(b), &qc);
    if qa.is_empty() || qb.is_empty() {
        return Ok(T::zero());
    }
    let resid: Vec<Vec<C<T>>> = qa
        .iter()
        .map(|q| {
            let mut r = q.clone();
            project_out(&mut r, &qb);
            r
        })
        .collect();
    let gram: Vec<Vec<C<T>>> = resid
        .iter()
        .map(|x| resid.iter().map(|y| dot(x, y)).collect())
        .collect();
    let det = det_hermitian(gram);
    if det < T::singular_eps() {
        return Ok(T::infinity());
    }
    Ok(-field.scale::<T>() * det.min(T::one()).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_moments() {
        let mut b = LatentBasis::<f64>::new(Field::Complex);
        let z = b.fresh();
        let rho = Complex::new(0.3, -0.4);
        let w = b.correlated_pair(0.8, rho, &z).unwrap();
        assert!((w.variance() - 0.64).abs() < 1e-12);
        let c = z.cov(&w);
        assert!((c - rho * 0.8).norm() < 1e-12);
        let d = &z - &w;
        let expect = 1.0 + 0.64 - 2.0 * (rho * 0.8).re;
        assert!((d.variance() - expect).abs() < 1e-12);
    }

    #[test]
    fn pair_domain() {
        let mut b = LatentBasis::<f64>::new(Field::Complex);
        let z = b.fresh();
        assert!(b.correlated_pair(1.1, cre(0.0), &z).is_err());
        assert!(b.correlated_pair(0.5, Complex::new(0.8, 0.8), &z).is_err());
        let mut r = LatentBasis::<f64>::new(Field::Real);
        let z = r.fresh();
        assert_eq!(
            r.correlated_pair(0.5, Complex::new(0.0, 0.5), &z),
            Err(GaussError::FieldMismatch)
        );
    }

    #[test]
    fn entropy_constants() {
        let mut b = LatentBasis::<f64>::new(Field::Complex);
        let z = b.fresh();
        let h = entropy(&[z.clone()], Field::Complex).unwrap();
        assert!((h - 3.0942).abs() < 1e-4);
        let hr = entropy(&[z.clone()], Field::Real).unwrap();
        assert!((hr - 2.0471).abs() < 1e-4);
        assert_eq!(entropy(&[z.clone(), z], Field::Complex).unwrap(), f64::NEG_INFINITY);
        assert_eq!(entropy::<f64>(&[], Field::Complex), Err(GaussError::EmptyList));
    }

    #[test]
    fn identical_lists_are_infinite() {
        let mut b = LatentBasis::<f64>::new(Field::Complex);
        let x = b.fresh();
        let i = mutual_info(&[x.clone()], &[x], &[], Field::Complex).unwrap();
        assert!(i.is_infinite());
    }

    #[test]
    fn f32_kernel() {
        let mut b = LatentBasis::<f32>::new(Field::Complex);
        let x = b.fresh_scaled(10f32.sqrt());
        let z = b.fresh();
        let y = &x + &z;
        let i = mutual_info(&[x], &[y], &[], Field::Complex).unwrap();
        assert!((i - 11f32.log2()).abs() < 1e-4);
    }
}
