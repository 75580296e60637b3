//! Non-asymptotic bounds on the optimal Type II error of binary hypothesis
//! testing with `n` i.i.d. samples.
//!
//! The crate is generic over the scalar type (`f32` or `f64`, see [`Real`]);
//! the aliases at the root fix it to `f64`.
//!
//! ```
//! use hypotest_core::{renyi_converse, np_exact_gaussian, Pair};
//!
//! let pair = Pair::gaussian_unit(2.0, 0.05).unwrap();
//! let log_eps = 0.01_f64.ln();
//! let bound = renyi_converse(&pair, 500, log_eps);
//! let exact = np_exact_gaussian(&pair, 500, log_eps).unwrap();
//! assert!(bound.value <= exact.beta);
//! ```

// `!(x > 0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod distributions;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod scalar;

pub use bounds::{
    berry_esseen_bound, fano_bound, hellinger_bound, phase_transition_achievability, phase_transition_converse,
    renyi_achievability_at_threshold, renyi_converse, sample_complexity_pensia, sample_complexity_renyi,
    smoothing_out_bound, threshold_for_rate, BoundKind, BoundResult, ErrorRegime,
};
pub use distributions::{Direction, DistributionPair, Family, LlrMoments};
pub use error::{Error, Result};
pub use numerics::{
    log1m_exp, log_add_exp, log_diff_exp, log_q_function, log_sum_exp, maximize_scalar, q_function, q_inverse,
    q_inverse_log, Bracket, Maximum,
};
pub use oracle::{bruteforce_fits, np_exact_bernoulli, np_exact_discrete_bruteforce, np_exact_gaussian, NPResult};
pub use scalar::Real;

pub type Pair = DistributionPair<f64>;
pub type Pair32 = DistributionPair<f32>;
pub type Bound = BoundResult<f64>;
pub type Bound32 = BoundResult<f32>;
pub type Regime = ErrorRegime<f64>;
pub type Regime32 = ErrorRegime<f32>;
pub type NeymanPearson = NPResult<f64>;
pub type NeymanPearson32 = NPResult<f32>;
