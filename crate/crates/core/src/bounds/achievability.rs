use std::cell::Cell;

use super::{samples, BoundKind, BoundResult};
use crate::distributions::{Direction, DistributionPair};
use crate::error::{domain, Result};
use crate::numerics::{log_diff_exp, maximize_scalar, Bracket};
use crate::scalar::Real;

/// Log of the likelihood-ratio-test bound at a fixed order `lambda in (0,1)`:
/// `log(e^{(lambda-1) n D_lambda(P1||P0)} - alpha e^{lambda tau}) - (lambda-1) tau`.
///
/// Returns `-inf` when the numerator is not positive.
pub fn renyi_achievability_log_at<T: Real>(pair: &DistributionPair<T>, n: u64, tau: T, log_alpha: T, lambda: T) -> T {
    if !(lambda > T::zero() && lambda < T::one()) {
        return T::neg_infinity();
    }
    let total = samples::<T>(n) * pair.renyi_log_moment(lambda, Direction::Reverse);
    let spent = log_alpha + lambda * tau;
    if !(total > spent) {
        return T::neg_infinity();
    }
    log_diff_exp(total, spent) - (lambda - T::one()) * tau
}

/// Upper bound on the Type II error of the likelihood-ratio test with
/// threshold `tau` (accept `H1` when `log p1/p0 >= tau`).
///
/// `log_alpha` must not exceed the log Type I error of that test;
/// `-inf` (alpha = 0) always qualifies. If the numerator changes sign inside
/// `(0, 1)` the supplied alpha is inconsistent with the test: the smallest
/// positive evaluation is reported with `valid = false`.
pub fn renyi_achievability_at_threshold<T: Real>(
    pair: &DistributionPair<T>,
    n: u64,
    tau: T,
    log_alpha: T,
) -> BoundResult<T> {
    if !tau.is_finite() || log_alpha.is_nan() || log_alpha > T::zero() {
        return BoundResult::vacuous(BoundKind::UpperBoundOnBeta, None);
    }
    let infeasible = Cell::new(false);
    let objective = |l: T| {
        let v = renyi_achievability_log_at(pair, n, tau, log_alpha, l);
        if v == T::neg_infinity() {
            infeasible.set(true);
            T::neg_infinity()
        } else {
            -v
        }
    };
    let bracket = Bracket::open(T::zero(), T::one()).expect("static bracket");
    let consistent = !infeasible_alpha(pair, n, tau, log_alpha, &bracket);
    match maximize_scalar(objective, &bracket) {
        Ok(m) if m.value > T::neg_infinity() => {
            BoundResult::upper_on_beta(-m.value, Some(m.arg), consistent && !infeasible.get())
        }
        _ => BoundResult::vacuous(BoundKind::UpperBoundOnBeta, None),
    }
}

/// Whether `alpha e^{lambda tau}` reaches `E_0[(p1/p0)^lambda]` somewhere in
/// `(0, 1)`. For the true Type I error of the test this never happens, since
/// the region below the threshold contributes a strictly positive amount.
fn infeasible_alpha<T: Real>(pair: &DistributionPair<T>, n: u64, tau: T, log_alpha: T, bracket: &Bracket<T>) -> bool {
    if log_alpha == T::neg_infinity() {
        return false;
    }
    // Concave in lambda: log_alpha + lambda tau minus a convex log-moment.
    let slack = |l: T| log_alpha + l * tau - samples::<T>(n) * pair.renyi_log_moment(l, Direction::Reverse);
    match maximize_scalar(slack, bracket) {
        Ok(m) => {
            let scale = T::one() + log_alpha.abs() + tau.abs();
            m.value >= -T::lit(1e-12) * scale
        }
        Err(_) => true,
    }
}

/// Threshold `tau = n D_lambda(P1||P0) - n (D_lambda(P1||P0) - c) / lambda`.
///
/// The likelihood-ratio test with this threshold has Type I error at most
/// `exp(-n c)` by Markov's inequality applied to `(p1/p0)^lambda`.
pub fn threshold_for_rate<T: Real>(pair: &DistributionPair<T>, n: u64, c: T, lambda: T) -> Result<T> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(domain(format!("order must lie in (0, 1), got {lambda}")));
    }
    if !(c > T::zero()) || !c.is_finite() {
        return Err(domain(format!("rate must be positive, got {c}")));
    }
    let divergence = pair.renyi_divergence(lambda, Direction::Reverse)?;
    let gap = divergence - c;
    if !(gap > T::zero()) {
        return Err(domain(format!("rate {c} is not below D_lambda(P1||P0) = {divergence} at lambda = {lambda}")));
    }
    let n = samples::<T>(n);
    Ok(n * divergence - n * gap / lambda)
}

fn rate_exponent<T: Real>(pair: &DistributionPair<T>, c: T, lambda: T) -> T {
    let divergence = pair.renyi_divergence(lambda, Direction::Reverse).unwrap_or_else(|_| T::nan());
    (T::one() - lambda) / lambda * (divergence - c)
}

/// `-n ((1-lambda)/lambda)(D_lambda(P1||P0) - c)`, the log of the
/// exponential upper bound at a fixed order.
pub fn phase_transition_achievability_log_at<T: Real>(pair: &DistributionPair<T>, n: u64, c: T, lambda: T) -> T {
    -samples::<T>(n) * rate_exponent(pair, c, lambda)
}

/// Achievability for `eps = exp(-n c)` with `c < D(P1||P0)`:
/// `beta_n < inf_{lambda in (0,1)} exp(-((1-lambda)/lambda) n (D_lambda(P1||P0) - c))`.
pub fn phase_transition_achievability<T: Real>(pair: &DistributionPair<T>, n: u64, c: T) -> Result<BoundResult<T>> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(domain(format!("rate must be positive, got {c}")));
    }
    let kl = pair.kl_divergence(Direction::Reverse);
    if c >= kl {
        return Err(domain(format!("rate {c} is not below D(P1||P0) = {kl}; use phase_transition_converse")));
    }
    let bracket = Bracket::open(T::zero(), T::one())?;
    let m = maximize_scalar(|l| rate_exponent(pair, c, l), &bracket)?;
    Ok(BoundResult::upper_on_beta(-samples::<T>(n) * m.value, Some(m.arg), true))
}
