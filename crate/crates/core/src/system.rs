//! Gaussian-input realization of a channel: `X_k`, `Z_k`, `Y_k` as latent
//! combinations, plus helpers every genie evaluator shares.

use crate::channel::Channel;
use crate::gaussian::{mutual_info, Field, GaussVar, LatentBasis};
use crate::scalar::{Real, C};

/// Gaussian inputs at full power and unit receiver noises. Bounds are
/// evaluated in the complex field regardless of the channel tag.
pub struct UserSystem<'a, T: Real> {
    pub ch: &'a Channel<T>,
    pub basis: LatentBasis<T>,
    pub x: Vec<GaussVar<T>>,
    pub z: Vec<GaussVar<T>>,
    pub y: Vec<GaussVar<T>>,
}

impl<'a, T: Real> UserSystem<'a, T> {
    pub fn new(ch: &'a Channel<T>) -> Self {
        let k = ch.k();
        let mut basis = LatentBasis::new(Field::Complex);
        let x: Vec<_> = (0..k).map(|i| basis.fresh_scaled(ch.p(i).sqrt())).collect();
        let z: Vec<_> = (0..k).map(|_| basis.fresh()).collect();
        let y = (0..k)
            .map(|r| {
                let terms: Vec<(C<T>, &GaussVar<T>)> = (0..k).map(|i| (ch.h(r, i), &x[i])).collect();
                &GaussVar::combine(&terms) + &z[r]
            })
            .collect();
        UserSystem { ch, basis, x, z, y }
    }

    /// `Σ_{i ∉ skip} h_{row,i} X_i`.
    pub fn mix(&self, row: usize, skip: &[usize]) -> GaussVar<T> {
        let terms: Vec<(C<T>, &GaussVar<T>)> = (0..self.ch.k())
            .filter(|i| !skip.contains(i))
            .map(|i| (self.ch.h(row, i), &self.x[i]))
            .collect();
        GaussVar::combine(&terms)
    }

    /// Fresh latent with variance `var` (clamped at zero).
    pub fn fresh_var(&mut self, var: T) -> GaussVar<T> {
        self.basis.fresh_scaled(var.max(T::zero()).sqrt())
    }

    pub fn xs(&self, idx: &[usize]) -> Vec<GaussVar<T>> {
        idx.iter().map(|&i| self.x[i].clone()).collect()
    }
}

/// Complex-field `I(a; b | c)`.
pub fn mi<T: Real>(a: &[GaussVar<T>], b: &[GaussVar<T>], c: &[GaussVar<T>]) -> T {
    mutual_info(a, b, c, Field::Complex).expect("complex field accepts any coefficients")
}
