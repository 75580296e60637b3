use super::{BoundKind, BoundResult};
use crate::distributions::{Direction, DistributionPair};
use crate::error::{domain, Result};
use crate::numerics::{maximize_scalar, Bracket};
use crate::scalar::Real;

fn check_unit<T: Real>(name: &str, x: T, upper: T) -> Result<()> {
    if x > T::zero() && x < upper {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0, {upper}), got {x}")))
    }
}

/// Unclamped necessary sample size at a fixed order `lambda > 1`:
/// the larger of
/// `(log(1/delta) - lambda/(lambda-1) log(1/(1-eps))) / D_lambda(P0||P1)` and
/// `(log(1/eps) - lambda/(lambda-1) log(1/(1-delta))) / D_lambda(P1||P0)`.
pub fn sample_complexity_renyi_at<T: Real>(pair: &DistributionPair<T>, eps: T, delta: T, lambda: T) -> T {
    if !(lambda > T::one()) {
        return T::nan();
    }
    let weight = lambda / (lambda - T::one());
    let forward = pair.renyi_divergence(lambda, Direction::Forward).unwrap_or_else(|_| T::nan());
    let reverse = pair.renyi_divergence(lambda, Direction::Reverse).unwrap_or_else(|_| T::nan());
    let first = (-delta.ln() + weight * (-eps).ln_1p()) / forward;
    let second = (-eps.ln() + weight * (-delta).ln_1p()) / reverse;
    first.max(second)
}

/// Necessary number of samples for `beta_n(eps) <= delta`, from inverting the
/// two-branch Renyi converse. Optimized over `lambda > 1` when omitted.
/// Values below one are clamped to `n >= 1` and flagged invalid.
pub fn sample_complexity_renyi<T: Real>(
    pair: &DistributionPair<T>,
    eps: T,
    delta: T,
    lambda: Option<T>,
) -> Result<BoundResult<T>> {
    check_unit("eps", eps, T::one())?;
    check_unit("delta", delta, T::one())?;
    if pair.kl_divergence(Direction::Forward) == T::zero() && pair.kl_divergence(Direction::Reverse) == T::zero() {
        // Identical hypotheses: no finite sample size helps.
        return Ok(BoundResult {
            value: T::infinity(),
            log_value: T::infinity(),
            optimizer: lambda,
            kind: BoundKind::LowerBoundOnN,
            valid: true,
        });
    }
    let (raw, arg) = match lambda {
        Some(l) => {
            if !(l > T::one()) || !l.is_finite() {
                return Err(domain(format!("order must exceed 1, got {l}")));
            }
            (sample_complexity_renyi_at(pair, eps, delta, l), l)
        }
        None => {
            let bracket = Bracket::unbounded_above(T::one())?;
            let m = maximize_scalar(|l| sample_complexity_renyi_at(pair, eps, delta, l), &bracket)?;
            (m.value, m.arg)
        }
    };
    let value = raw.max(T::one());
    Ok(BoundResult {
        value,
        log_value: value.ln(),
        optimizer: Some(arg),
        kind: BoundKind::LowerBoundOnN,
        valid: raw >= T::one(),
    })
}

/// Sample-size lower bound transferred from the Bayesian setting:
/// `n >= (1/2) (l/(1-l)) log(1/(2 eps)) / D_l(P0||P1)` with
/// `l = log(1/(2 delta)) / (log(1/(2 delta)) + log(1/(2 eps)))`.
pub fn sample_complexity_pensia<T: Real>(pair: &DistributionPair<T>, eps: T, delta: T) -> Result<BoundResult<T>> {
    let half = T::lit(0.5);
    check_unit("eps", eps, half)?;
    check_unit("delta", delta, half)?;
    let two = T::lit(2.0);
    let a = -(two * delta).ln();
    let b = -(two * eps).ln();
    let lambda = a / (a + b);
    let divergence = pair.renyi_divergence(lambda, Direction::Forward)?;
    let value = half * lambda / (T::one() - lambda) * b / divergence;
    Ok(BoundResult {
        value,
        log_value: value.ln(),
        optimizer: Some(lambda),
        kind: BoundKind::LowerBoundOnN,
        valid: value.is_finite(),
    })
}
