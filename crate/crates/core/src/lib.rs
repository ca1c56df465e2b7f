//! Sum-capacity bounds for K-user Gaussian interference channels.
//!
//! The crate evaluates genie-aided upper bounds (and the usual lower bounds)
//! from exact Gaussian entropies. Everything is generic over the scalar
//! type; `f64` is the intended precision and the `*64` aliases below cover
//! the common case.
//!
//! ```
//! use gic_core::{make_symmetric, lower_bounds, Complex};
//! let ch = make_symmetric(3, Complex::new(0.5f64, 0.0), 10.0);
//! assert_eq!(ch.k(), 3);
//! let lb = lower_bounds(3, Complex::new(0.5f64, 0.0), 10.0);
//! assert!(lb.best > 0.0);
//! ```

// NaN must fail the feasibility checks, hence the negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bound;
pub mod channel;
pub mod gaussian;
pub mod genie3;
pub mod kuser;
pub mod optimize;
pub mod perm;
pub mod scalar;
pub mod search;
pub mod system;

pub use num_complex::Complex;

pub use baselines::{
    etw_two_user, gen_kramer_three, kramer_two_user, lower_bounds, z_extension_three, BoundError, LowerBounds,
};
pub use bound::{min_result, BoundResult, NoiseParam};
pub use channel::{
    alpha_to_gain, cyclic_reduction_check, gain_to_alpha, make_semi_symmetric, make_symmetric, Channel, ChannelError,
    SemiSymScenario, SymScenario,
};
pub use gaussian::{cond_var, entropy, mutual_info, Field, GaussError, GaussVar, LatentBasis};
pub use genie3::{best_upper_three, new_upper_three, thm4_symmetric, GenieConfig3, Thm2Branch, Thm3Branch};
pub use kuser::{closed_form_best, power_offset, prop1_closed, prop2_closed, prop3_closed, LargeKResult, TieMode};
pub use scalar::{Real, C};
pub use search::SearchConfig;

pub type Channel64 = Channel<f64>;
pub type Channel32 = Channel<f32>;
pub type GaussVar64 = GaussVar<f64>;
pub type GaussVar32 = GaussVar<f32>;
pub type BoundResult64 = BoundResult<f64>;
pub type BoundResult32 = BoundResult<f32>;
pub type NoiseParam64 = NoiseParam<f64>;
pub type NoiseParam32 = NoiseParam<f32>;
pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
