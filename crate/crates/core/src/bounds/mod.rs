//! Converse, achievability, phase-transition, sample-complexity and baseline
//! bounds on the optimal Type II error `beta_n(eps)`.
//!
//! Every bound takes the Type I budget as `log_eps` so that regimes such as
//! `eps = exp(-n c)` stay representable long after `eps` itself underflows.
//! Free parameters (the Renyi order, Berry-Esseen slack, smoothing time) are
//! optimized with [`crate::numerics::maximize_scalar`] unless supplied, and the
//! optimizing value is reported in [`BoundResult::optimizer`].

mod achievability;
mod baselines;
mod converse;
mod sample_size;

pub use achievability::{
    phase_transition_achievability, phase_transition_achievability_log_at, renyi_achievability_at_threshold,
    renyi_achievability_log_at, threshold_for_rate,
};
pub use baselines::{
    berry_esseen_bound, berry_esseen_log_at, fano_bound, hellinger_bound, smoothing_out_bound, smoothing_out_terms,
    SmoothingOutTerms,
};
pub use converse::{phase_transition_converse, renyi_converse, renyi_converse_log_at};
pub use sample_size::{sample_complexity_pensia, sample_complexity_renyi, sample_complexity_renyi_at};

use std::fmt;

use crate::error::{domain, Result};
use crate::scalar::Real;

/// What a [`BoundResult`] bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    LowerBoundOnBeta,
    UpperBoundOnBeta,
    LowerBoundOnN,
}

/// A bound value with its log-domain companion and optimizing parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult<T> {
    /// Probability for error bounds, sample count for [`BoundKind::LowerBoundOnN`].
    pub value: T,
    /// `log(value)`; stays finite when `value` underflows to zero.
    pub log_value: T,
    /// The Renyi order, Berry-Esseen slack or smoothing time achieving the bound.
    pub optimizer: Option<T>,
    pub kind: BoundKind,
    /// `false` when the bound degenerates to the trivial value or is undefined.
    pub valid: bool,
}

impl<T: Real> BoundResult<T> {
    /// Lower bound on `beta` from its logarithm, clamped to `[0, 1]`.
    pub(crate) fn lower_on_beta(log_value: T, optimizer: Option<T>) -> Self {
        if !(log_value > T::neg_infinity()) {
            return Self::vacuous(BoundKind::LowerBoundOnBeta, optimizer);
        }
        let log_value = log_value.min(T::zero());
        Self { value: log_value.exp(), log_value, optimizer, kind: BoundKind::LowerBoundOnBeta, valid: true }
    }

    /// Upper bound on `beta` from its logarithm, clamped to at most 1.
    pub(crate) fn upper_on_beta(log_value: T, optimizer: Option<T>, valid: bool) -> Self {
        let log_value = log_value.min(T::zero());
        Self { value: log_value.exp(), log_value, optimizer, kind: BoundKind::UpperBoundOnBeta, valid }
    }

    pub(crate) fn vacuous(kind: BoundKind, optimizer: Option<T>) -> Self {
        Self { value: T::zero(), log_value: T::neg_infinity(), optimizer, kind, valid: false }
    }
}

/// Schedule of Type I error budgets `eps(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorRegime<T> {
    /// `eps(n) = eps`.
    Constant(T),
    /// `eps(n) = 1/n`, defined for `n >= 2`.
    Linear,
    /// `eps(n) = exp(-n c)`.
    Exponential(T),
}

impl<T: Real> ErrorRegime<T> {
    pub fn constant(eps: T) -> Result<Self> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(domain(format!("constant regime needs 0 < eps < 1, got {eps}")));
        }
        Ok(Self::Constant(eps))
    }

    pub fn exponential(c: T) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return Err(domain(format!("exponential regime needs a positive rate, got {c}")));
        }
        Ok(Self::Exponential(c))
    }

    /// `(eps(n), log eps(n))`. The log is exact even when `eps` underflows.
    pub fn eps_at(&self, n: u64) -> Result<(T, T)> {
        let log_eps = match *self {
            Self::Constant(eps) => eps.ln(),
            Self::Linear => {
                if n < 2 {
                    return Err(domain("the 1/n regime is defined for n >= 2"));
                }
                -T::count(n).ln()
            }
            Self::Exponential(c) => -T::count(n) * c,
        };
        let eps = match *self {
            Self::Constant(eps) => eps,
            Self::Linear => T::count(n).recip(),
            Self::Exponential(_) => log_eps.exp(),
        };
        Ok((eps, log_eps))
    }
}

impl<T: Real> fmt::Display for ErrorRegime<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(eps) => write!(f, "constant:{eps}"),
            Self::Linear => write!(f, "linear"),
            Self::Exponential(c) => write!(f, "exponential:{c}"),
        }
    }
}

/// `n` as a scalar.
#[inline]
pub(crate) fn samples<T: Real>(n: u64) -> T {
    T::count(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_schedules() {
        let (e, l) = ErrorRegime::constant(0.01_f64).unwrap().eps_at(500).unwrap();
        assert_eq!(e, 0.01);
        assert_eq!(l, 0.01_f64.ln());
        let (e, l) = ErrorRegime::<f64>::Linear.eps_at(100).unwrap();
        assert_eq!(e, 0.01);
        assert!((l + 100.0_f64.ln()).abs() < 1e-15);
        let (e, l) = ErrorRegime::exponential(0.025_f64).unwrap().eps_at(100_000).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(l, -2500.0);
        assert!(ErrorRegime::<f64>::Linear.eps_at(1).is_err());
        assert!(ErrorRegime::constant(1.0_f64).is_err());
        assert!(ErrorRegime::exponential(0.0_f64).is_err());
    }

    #[test]
    fn result_clamping() {
        let r = BoundResult::<f64>::lower_on_beta(0.3, None);
        assert_eq!((r.value, r.log_value, r.valid), (1.0, 0.0, true));
        let r = BoundResult::<f64>::lower_on_beta(f64::NEG_INFINITY, Some(2.0));
        assert_eq!((r.value, r.valid, r.optimizer), (0.0, false, Some(2.0)));
        let r = BoundResult::<f64>::lower_on_beta(-5000.0, None);
        assert!(r.valid && r.value == 0.0 && r.log_value == -5000.0);
        let r = BoundResult::<f64>::lower_on_beta((0.25_f64).ln(), None);
        assert!((r.value - r.log_value.exp()).abs() <= 1e-12);
    }
}
