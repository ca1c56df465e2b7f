//! K-user channel matrices and scenario constructors.

use num_complex::Complex;
use thiserror::Error;

use crate::gaussian::Field;
use crate::scalar::{cre, Real, C};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("need at least two users, got {0}")]
    TooFewUsers(usize),
    #[error("matrix must be {0}x{0}")]
    Shape(usize),
    #[error("diagonal entry h[{0}][{0}] must be exactly 1")]
    Diagonal(usize),
    #[error("non-finite channel coefficient or power")]
    NonFinite,
    #[error("negative power for user {0}")]
    NegativePower(usize),
    #[error("expected {expected} cross gains, got {got}")]
    GainCount { expected: usize, got: usize },
    #[error("complex coefficient in a real-field channel")]
    FieldMismatch,
    #[error("power must exceed 1, got {0}")]
    PowerDomain(String),
}

/// `Y_k = Σ_i h_ki X_i + Z_k` with unit diagonal and per-user powers.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel<T: Real> {
    k: usize,
    h: Vec<C<T>>,
    p: Vec<T>,
    field: Field,
}

impl<T: Real> Channel<T> {
    pub fn new(h: Vec<Vec<C<T>>>, p: Vec<T>, field: Field) -> Result<Self, ChannelError> {
        let k = h.len();
        if k < 2 {
            return Err(ChannelError::TooFewUsers(k));
        }
        if p.len() != k || h.iter().any(|row| row.len() != k) {
            return Err(ChannelError::Shape(k));
        }
        for (i, row) in h.iter().enumerate() {
            if row[i] != cre(T::one()) {
                return Err(ChannelError::Diagonal(i));
            }
            if row.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(ChannelError::NonFinite);
            }
            if field == Field::Real && row.iter().any(|c| c.im != T::zero()) {
                return Err(ChannelError::FieldMismatch);
            }
        }
        for (i, &pi) in p.iter().enumerate() {
            if !pi.is_finite() {
                return Err(ChannelError::NonFinite);
            }
            if pi < T::zero() {
                return Err(ChannelError::NegativePower(i));
            }
        }
        Ok(Channel {
            k,
            h: h.into_iter().flatten().collect(),
            p,
            field,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// `h_ij`, zero-based.
    #[inline]
    pub fn h(&self, i: usize, j: usize) -> C<T> {
        self.h[i * self.k + j]
    }

    #[inline]
    pub fn p(&self, i: usize) -> T {
        self.p[i]
    }

    pub fn powers(&self) -> &[T] {
        &self.p
    }

    pub fn rows(&self) -> Vec<Vec<C<T>>> {
        self.h.chunks(self.k).map(|r| r.to_vec()).collect()
    }

    /// Same channel tagged with another field.
    pub fn with_field(&self, field: Field) -> Result<Self, ChannelError> {
        Channel::new(self.rows(), self.p.clone(), field)
    }

    /// Relabel users: new user `a` is old user `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.k, "permutation length");
        let k = self.k;
        let mut h = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                h.push(self.h(perm[a], perm[b]));
            }
        }
        Channel {
            k,
            h,
            p: perm.iter().map(|&i| self.p[i]).collect(),
            field: self.field,
        }
    }

    /// Common power if all users share one.
    pub fn common_power(&self) -> Option<T> {
        let p0 = self.p[0];
        self.p.iter().all(|&p| p == p0).then_some(p0)
    }

    /// Common cross gain `g` if every off-diagonal entry equals it and all
    /// powers are equal.
    pub fn symmetric_gain(&self) -> Option<C<T>> {
        self.common_power()?;
        let g = self.h(0, 1);
        let all = (0..self.k)
            .flat_map(|i| (0..self.k).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .all(|(i, j)| self.h(i, j) == g);
        all.then_some(g)
    }

    /// All cross gains share one magnitude and all powers are equal.
    pub fn equal_cross_magnitude(&self) -> Option<T> {
        self.common_power()?;
        let m = self.h(0, 1).norm();
        let tol = T::lit(1e-12) * (T::one() + m);
        let all = (0..self.k)
            .flat_map(|i| (0..self.k).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .all(|(i, j)| (self.h(i, j).norm() - m).abs() <= tol);
        all.then_some(m)
    }
}

/// All cross gains `g`, all powers `P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymScenario<T: Real> {
    pub k: usize,
    pub g: C<T>,
    pub p: T,
}

impl<T: Real> SymScenario<T> {
    pub fn channel(&self) -> Channel<T> {
        make_symmetric(self.k, self.g, self.p)
    }
}

/// Circulant channel `Y_k = X_k + Σ_i g_i X_{k+i} + Z_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiSymScenario<T: Real> {
    pub k: usize,
    pub g_list: Vec<C<T>>,
    pub p: T,
}

impl<T: Real> SemiSymScenario<T> {
    pub fn channel(&self) -> Result<Channel<T>, ChannelError> {
        make_semi_symmetric(self.k, &self.g_list, self.p)
    }
}

/// Symmetric channel; tagged real when `g` is real.
///
/// # Panics
/// If `k < 2`.
pub fn make_symmetric<T: Real>(k: usize, g: C<T>, p: T) -> Channel<T> {
    make_semi_symmetric(k, &vec![g; k.saturating_sub(1)], p).expect("k >= 2")
}

/// Circulant channel with row `k` equal to `(…, 1, g_1, g_2, …)` cyclically:
/// `h[k][(k+i) mod K] = g_i`.
pub fn make_semi_symmetric<T: Real>(k: usize, g_list: &[C<T>], p: T) -> Result<Channel<T>, ChannelError> {
    if k < 2 {
        return Err(ChannelError::TooFewUsers(k));
    }
    if g_list.len() != k - 1 {
        return Err(ChannelError::GainCount {
            expected: k - 1,
            got: g_list.len(),
        });
    }
    let mut h = vec![vec![Complex::default(); k]; k];
    for (row, hr) in h.iter_mut().enumerate() {
        hr[row] = cre(T::one());
        for (i, g) in g_list.iter().enumerate() {
            hr[(row + i + 1) % k] = *g;
        }
    }
    let field = if g_list.iter().all(|g| g.im == T::zero()) {
        Field::Real
    } else {
        Field::Complex
    };
    Channel::new(h, vec![p; k], field)
}

/// `|g|² = P^(α-1)` from `α = log INR / log SNR`.
pub fn alpha_to_gain<T: Real>(alpha: T, p: T) -> Result<T, ChannelError> {
    if !(p > T::one()) {
        return Err(ChannelError::PowerDomain(format!("{p}")));
    }
    Ok(p.powf(alpha - T::one()))
}

/// Inverse of [`alpha_to_gain`]: `α = log(|g|²P) / log P`.
pub fn gain_to_alpha<T: Real>(g2: T, p: T) -> Result<T, ChannelError> {
    if !(p > T::one()) {
        return Err(ChannelError::PowerDomain(format!("{p}")));
    }
    Ok((g2 * p).ln() / p.ln())
}

/// Largest `K` for which [`cyclic_reduction_check`] searches all orderings.
pub const REDUCTION_SEARCH_MAX_K: usize = 8;

fn close<T: Real>(a: C<T>, b: C<T>) -> bool {
    let scale = a.norm().max(b.norm());
    (a - b).norm() <= T::lit(1e-9) * scale.max(T::lit(1e-300))
}

/// Whether an ordering satisfies `h_{i-1,j} h_{i,i+1} = h_{i-1,i+1} h_{i,j}`
/// for `i = 2..K-2`, `j = i+2..K` (one-based).
pub fn reduction_holds<T: Real>(ch: &Channel<T>, perm: &[usize]) -> bool {
    let k = ch.k();
    let h = |a: usize, b: usize| ch.h(perm[a - 1], perm[b - 1]);
    for i in 2..=k.saturating_sub(2) {
        for j in i + 2..=k {
            if !close(h(i - 1, j) * h(i, i + 1), h(i - 1, i + 1) * h(i, j)) {
                return false;
            }
        }
    }
    true
}

/// Search user orderings for one satisfying the proportionality condition
/// under which the asymmetric bounds lose their penalty terms. Vacuous for
/// `K ≤ 3`. For `K` above [`REDUCTION_SEARCH_MAX_K`] only the identity and
/// its cyclic shifts are tried.
pub fn cyclic_reduction_check<T: Real>(ch: &Channel<T>) -> (bool, Option<Vec<usize>>) {
    let k = ch.k();
    if k <= 3 {
        return (true, Some((0..k).collect()));
    }
    let candidates: Vec<Vec<usize>> = if k <= REDUCTION_SEARCH_MAX_K {
        crate::perm::permutations(k)
    } else {
        (0..k).map(|s| (0..k).map(|i| (i + s) % k).collect()).collect()
    };
    for perm in candidates {
        if reduction_holds(ch, &perm) {
            return (true, Some(perm));
        }
    }
    (false, None)
}
