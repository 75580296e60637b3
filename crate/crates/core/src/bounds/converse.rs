use super::{samples, BoundKind, BoundResult};
use crate::distributions::{Direction, DistributionPair};
use crate::error::{domain, Result};
use crate::numerics::{log1m_exp, maximize_scalar, Bracket};
use crate::scalar::Real;

/// `((lambda-1)/lambda) (log eps + n D_lambda(P1||P0))`, the log of the
/// subtracted term in the reverse-divergence branch.
fn reverse_exponent<T: Real>(pair: &DistributionPair<T>, n: u64, log_eps: T, lambda: T) -> T {
    let moment = pair.renyi_log_moment(lambda, Direction::Reverse);
    ((lambda - T::one()) * log_eps + samples::<T>(n) * moment) / lambda
}

/// `(lambda/(lambda-1)) log(1-eps) - n D_lambda(P0||P1)`.
fn forward_branch<T: Real>(pair: &DistributionPair<T>, n: u64, log_one_minus_eps: T, lambda: T) -> T {
    let divergence = pair.renyi_divergence(lambda, Direction::Forward).unwrap_or_else(|_| T::nan());
    lambda / (lambda - T::one()) * log_one_minus_eps - samples::<T>(n) * divergence
}

/// Log of the two-branch Renyi converse at a fixed order `lambda > 1`.
///
/// Maximizing this over `lambda` gives [`renyi_converse`]; it is exposed so
/// the optimizer can be checked against a direct scan.
pub fn renyi_converse_log_at<T: Real>(pair: &DistributionPair<T>, n: u64, log_eps: T, lambda: T) -> T {
    if !(log_eps < T::zero()) || !(lambda > T::one()) {
        return T::neg_infinity();
    }
    let g = reverse_exponent(pair, n, log_eps, lambda);
    let reverse = if g < T::zero() { log1m_exp(g) } else { T::neg_infinity() };
    reverse.max(forward_branch(pair, n, log1m_exp(log_eps), lambda))
}

/// Two-branch Renyi lower bound on `beta_n(eps)`.
///
/// The reverse branch `1 - inf_{lambda>1} (eps e^{n D_lambda(P1||P0)})^{(lambda-1)/lambda}`
/// drives the strong converse when `eps` decays with `n`; the forward branch
/// `sup_{lambda>1} (1-eps)^{lambda/(lambda-1)} e^{-n D_lambda(P0||P1)}` keeps
/// the bound informative for fixed `eps`. Each branch is optimized separately
/// and the larger is returned.
pub fn renyi_converse<T: Real>(pair: &DistributionPair<T>, n: u64, log_eps: T) -> BoundResult<T> {
    if !(log_eps < T::zero()) {
        return BoundResult::vacuous(BoundKind::LowerBoundOnBeta, None);
    }
    let bracket = Bracket::unbounded_above(T::one()).expect("static bracket");

    let reverse = maximize_scalar(|l| -reverse_exponent(pair, n, log_eps, l), &bracket).ok().map(|m| {
        let g = -m.value;
        let log = if g < T::zero() { log1m_exp(g) } else { T::neg_infinity() };
        (log, m.arg)
    });

    let log_one_minus_eps = log1m_exp(log_eps);
    let forward =
        maximize_scalar(|l| forward_branch(pair, n, log_one_minus_eps, l), &bracket).ok().map(|m| (m.value, m.arg));

    let best = match (reverse, forward) {
        (Some(a), Some(b)) => Some(if b.0 > a.0 { b } else { a }),
        (a, b) => a.or(b),
    };
    match best {
        Some((log, arg)) if log > T::neg_infinity() => BoundResult::lower_on_beta(log, Some(arg)),
        _ => BoundResult::vacuous(BoundKind::LowerBoundOnBeta, None),
    }
}

/// Strong-converse bound for `eps = exp(-n c)` with `c > D(P1||P0)`:
/// `beta_n >= 1 - inf_{lambda>1} exp(-n ((lambda-1)/lambda)(c - D_lambda(P1||P0)))`.
pub fn phase_transition_converse<T: Real>(pair: &DistributionPair<T>, n: u64, c: T) -> Result<BoundResult<T>> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(domain(format!("rate must be positive, got {c}")));
    }
    let kl = pair.kl_divergence(Direction::Reverse);
    if c <= kl {
        return Err(domain(format!("rate {c} does not exceed D(P1||P0) = {kl}; use phase_transition_achievability")));
    }
    let log_eps = -samples::<T>(n) * c;
    let bracket = Bracket::unbounded_above(T::one())?;
    let m = maximize_scalar(|l| -reverse_exponent(pair, n, log_eps, l), &bracket)?;
    let g = -m.value;
    if g < T::zero() {
        Ok(BoundResult::lower_on_beta(log1m_exp(g), Some(m.arg)))
    } else {
        Ok(BoundResult::vacuous(BoundKind::LowerBoundOnBeta, Some(m.arg)))
    }
}
