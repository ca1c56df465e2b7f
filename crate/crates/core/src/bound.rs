//! Result carrier and genie-noise parameters shared by all bounds.

use std::fmt;

use num_complex::Complex;

use crate::gaussian::{GaussError, GaussVar, LatentBasis};
use crate::scalar::{cre, Real, C};

/// Outcome of one bound evaluation or optimization.
///
/// `sum_rate` is in bits per complex channel use; `normalized` is
/// `sum_rate / (2K)`. Infeasible results carry `+∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundResult<T: Real> {
    pub name: String,
    pub k: usize,
    pub sum_rate: T,
    pub normalized: T,
    pub feasible: bool,
    pub params: Vec<(String, T)>,
    pub permutation: Vec<usize>,
}

impl<T: Real> BoundResult<T> {
    pub fn new(name: &str, k: usize, sum_rate: T) -> Self {
        let feasible = sum_rate.is_finite();
        let sum_rate = if feasible { sum_rate } else { T::infinity() };
        BoundResult {
            name: name.to_string(),
            k,
            sum_rate,
            normalized: sum_rate / T::from_usize(2 * k).unwrap(),
            feasible,
            params: Vec::new(),
            permutation: (0..k).collect(),
        }
    }

    pub fn infeasible(name: &str, k: usize) -> Self {
        Self::new(name, k, T::infinity())
    }

    /// Symmetric per-user rate.
    pub fn per_user(&self) -> T {
        self.sum_rate / T::from_usize(self.k).unwrap()
    }

    /// Same per-user rate reported for `k` users.
    pub fn for_users(mut self, k: usize) -> Self {
        let per = self.per_user();
        self.k = k;
        self.sum_rate = per * T::from_usize(k).unwrap();
        self.permutation = (0..k).collect();
        self
    }

    pub fn with_params(mut self, params: Vec<(String, T)>) -> Self {
        self.params = params;
        self
    }

    pub fn with_permutation(mut self, perm: Vec<usize>) -> Self {
        self.permutation = perm;
        self
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn param(&self, key: &str) -> Option<T> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Pick the smaller feasible value; ties keep the lexicographically
    /// smaller name.
    pub fn min_of(a: Self, b: Self) -> Self {
        match (a.feasible, b.feasible) {
            (false, true) => b,
            (true, false) | (false, false) => a,
            (true, true) => {
                if b.sum_rate < a.sum_rate || (b.sum_rate == a.sum_rate && b.name < a.name) {
                    b
                } else {
                    a
                }
            }
        }
    }
}

impl<T: Real> fmt::Display for BoundResult<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.feasible {
            write!(
                f,
                "{}: sum {:.6} bits, normalized {:.6}",
                self.name, self.sum_rate, self.normalized
            )
        } else {
            write!(f, "{}: infeasible", self.name)
        }
    }
}

/// Minimum over an iterator of results (infeasible if empty or all
/// infeasible).
pub fn min_result<T: Real>(name: &str, k: usize, it: impl IntoIterator<Item = BoundResult<T>>) -> BoundResult<T> {
    it.into_iter()
        .reduce(BoundResult::min_of)
        .unwrap_or_else(|| BoundResult::infeasible(name, k))
}

/// Genie noise: standard deviation and correlation with the same-index
/// receiver noise, `E[Z N*] = ρσ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParam<T: Real> {
    pub sigma: T,
    pub rho: C<T>,
}

impl<T: Real> NoiseParam<T> {
    pub fn new(sigma: T, rho: C<T>) -> Self {
        NoiseParam { sigma, rho }
    }

    pub fn real(sigma: T, rho: T) -> Self {
        NoiseParam { sigma, rho: cre(rho) }
    }

    /// `ρ = σ`: the noise is `σ²Z` plus independent noise, uncorrelated
    /// with `Z − N`.
    pub fn aligned(sigma: T) -> Self {
        Self::real(sigma, sigma)
    }

    pub fn valid(&self) -> bool {
        let tol = T::lit(1e-12);
        self.sigma >= T::zero()
            && self.sigma <= T::one() + tol
            && self.rho.norm_sqr() <= T::one() + tol
            && self.sigma.is_finite()
            && self.rho.re.is_finite()
            && self.rho.im.is_finite()
    }

    /// `Var(Z − N)`.
    pub fn var_z_minus(&self) -> T {
        T::one() + self.sigma * self.sigma - T::lit(2.0) * (self.rho * self.sigma).re
    }

    /// Build the noise correlated with `z`.
    pub fn build(&self, basis: &mut LatentBasis<T>, z: &GaussVar<T>) -> Result<GaussVar<T>, GaussError> {
        basis.correlated_pair(self.sigma, self.rho, z)
    }

    pub(crate) fn push_params(&self, prefix: &str, out: &mut Vec<(String, T)>) {
        out.push((format!("{prefix}_sigma"), self.sigma));
        out.push((format!("{prefix}_rho_re"), self.rho.re));
        if self.rho.im != T::zero() {
            out.push((format!("{prefix}_rho_im"), self.rho.im));
        }
    }
}

impl<T: Real> Default for NoiseParam<T> {
    fn default() -> Self {
        NoiseParam {
            sigma: T::one(),
            rho: Complex::default(),
        }
    }
}
