use super::{samples, BoundKind, BoundResult};
use crate::distributions::{Direction, DistributionPair, Family};
use crate::error::{domain, Error, Result};
use crate::numerics::{log1m_exp, log_add_exp, maximize_scalar, q_inverse_log, Bracket};
use crate::scalar::Real;

/// Fano converse `beta_n >= exp(-(n D(P0||P1) + log 2) / (1 - alpha))`.
///
/// Follows from data processing, `d(1 - alpha || beta) <= n D(P0||P1)`, with
/// the binary entropy bounded by `log 2`. The variant that divides only
/// `exp(-n D - log 2)` by `1 - alpha` can exceed one and is not used.
pub fn fano_bound<T: Real>(pair: &DistributionPair<T>, n: u64, log_eps: T) -> BoundResult<T> {
    if !(log_eps < T::zero()) {
        return BoundResult::vacuous(BoundKind::LowerBoundOnBeta, None);
    }
    let kl = pair.kl_divergence(Direction::Forward);
    let log = -(samples::<T>(n) * kl + T::LN_2()) / (-log_eps.exp_m1());
    BoundResult::lower_on_beta(log, None)
}

/// `beta_n >= 1 - sqrt(1 - (1 - H^2)^{2n}) - alpha`.
pub fn hellinger_bound<T: Real>(pair: &DistributionPair<T>, n: u64, log_eps: T) -> BoundResult<T> {
    if !(log_eps < T::zero()) {
        return BoundResult::vacuous(BoundKind::LowerBoundOnBeta, None);
    }
    let affinity = (T::lit(2.0) * samples::<T>(n) * pair.log_bhattacharyya()).exp();
    // 1 - sqrt(1 - x) without cancellation.
    let gap = affinity / (T::one() + (T::one() - affinity).sqrt());
    let value = gap - log_eps.exp();
    if value > T::zero() {
        BoundResult::lower_on_beta(value.ln(), None)
    } else {
        BoundResult::vacuous(BoundKind::LowerBoundOnBeta, None)
    }
}

/// Log of the Berry-Esseen bound at slack `Delta`:
/// `-n D + sqrt(n V) Q^{-1}(alpha + (B + Delta)/sqrt n) + log Delta - (1/2) log n`,
/// or `-inf` when `Delta` is outside `(0, sqrt(n)(1 - alpha) - B)`.
pub fn berry_esseen_log_at<T: Real>(pair: &DistributionPair<T>, n: u64, log_eps: T, slack: T) -> T {
    if !(log_eps < T::zero()) || !(slack > T::zero()) {
        return T::neg_infinity();
    }
    let m = pair.llr_moments();
    let nn = samples::<T>(n);
    let root = nn.sqrt();
    let tail = (m.berry_constant + slack) / root;
    let quantile = log_add_exp(log_eps, tail.ln());
    if !(quantile < T::zero()) {
        return T::neg_infinity();
    }
    let Ok(z) = q_inverse_log(quantile) else {
        return T::neg_infinity();
    };
    -nn * m.mean + (nn * m.variance).sqrt() * z + slack.ln() - T::lit(0.5) * nn.ln()
}

/// Normal-approximation lower bound with an explicit Berry-Esseen remainder,
/// optimized over the slack `Delta` unless one is supplied.
pub fn berry_esseen_bound<T: Real>(pair: &DistributionPair<T>, n: u64, log_eps: T, slack: Option<T>) -> BoundResult<T> {
    if let Some(d) = slack {
        return BoundResult::lower_on_beta(berry_esseen_log_at(pair, n, log_eps, d), Some(d));
    }
    if !(log_eps < T::zero()) {
        return BoundResult::vacuous(BoundKind::LowerBoundOnBeta, None);
    }
    let m = pair.llr_moments();
    let upper = samples::<T>(n).sqrt() * (-log_eps.exp_m1()) - m.berry_constant;
    if !(upper > T::zero()) || !upper.is_finite() {
        return BoundResult::vacuous(BoundKind::LowerBoundOnBeta, None);
    }
    let tol = (upper * T::lit(1e-6)).min(T::lit(1e-9));
    let Ok(bracket) = Bracket::new(T::zero(), upper, tol) else {
        return BoundResult::vacuous(BoundKind::LowerBoundOnBeta, None);
    };
    match maximize_scalar(|d| berry_esseen_log_at(pair, n, log_eps, d), &bracket) {
        Ok(best) => BoundResult::lower_on_beta(best.value, Some(best.arg)),
        Err(_) => BoundResult::vacuous(BoundKind::LowerBoundOnBeta, None),
    }
}

/// The additive pieces of the log smoothing-out bound at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingOutTerms<T> {
    /// `-n D(P0||P1)`.
    pub divergence: T,
    /// `log(1 - alpha) / (1 - e^{-2t})`.
    pub type_one: T,
    /// `-n t`.
    pub linear: T,
    /// `-(d^2/2)(e^t - 1)^2` with `d = delta/sigma`.
    pub quadratic: T,
    /// `-n (cosh 2t - 1)`.
    pub curvature: T,
}

impl<T: Real> SmoothingOutTerms<T> {
    pub fn total(&self) -> T {
        self.divergence + self.type_one + self.linear + self.quadratic + self.curvature
    }
}

fn standardized_shift<T: Real>(pair: &DistributionPair<T>) -> Result<T> {
    match pair.family() {
        Family::Gaussian { delta, sigma, .. } => Ok(*delta / *sigma),
        _ => Err(Error::UnsupportedFamily("the smoothing-out bound is defined for Gaussian pairs only".into())),
    }
}

/// Evaluates each term of the smoothing-out bound at `t > 0`.
pub fn smoothing_out_terms<T: Real>(
    pair: &DistributionPair<T>,
    n: u64,
    log_eps: T,
    t: T,
) -> Result<SmoothingOutTerms<T>> {
    let d = standardized_shift(pair)?;
    if !(t > T::zero()) || !t.is_finite() {
        return Err(domain(format!("smoothing time must be positive, got {t}")));
    }
    let nn = samples::<T>(n);
    let two = T::lit(2.0);
    let sinh = t.sinh();
    Ok(SmoothingOutTerms {
        divergence: -nn * pair.kl_divergence(Direction::Forward),
        type_one: log1m_exp(log_eps) / -(-two * t).exp_m1(),
        linear: -nn * t,
        quadratic: -(d * d / two) * t.exp_m1().powi(2),
        curvature: -nn * two * sinh * sinh,
    })
}

/// Smoothing-out lower bound for Gaussian mean testing, optimized over
/// `t in (0, 10)` unless `t` is supplied.
pub fn smoothing_out_bound<T: Real>(
    pair: &DistributionPair<T>,
    n: u64,
    log_eps: T,
    t: Option<T>,
) -> Result<BoundResult<T>> {
    standardized_shift(pair)?;
    if !(log_eps < T::zero()) {
        return Ok(BoundResult::vacuous(BoundKind::LowerBoundOnBeta, None));
    }
    if let Some(t) = t {
        let terms = smoothing_out_terms(pair, n, log_eps, t)?;
        return Ok(BoundResult::lower_on_beta(terms.total(), Some(t)));
    }
    // The optimum sits near sqrt(alpha / 2n); resolve well below that scale.
    let scale = (log_eps.exp() / (T::lit(2.0) * samples::<T>(n).max(T::one()))).sqrt() * T::lit(1e-3);
    let tol = scale.max(T::min_positive_value().sqrt()).min(T::lit(1e-9));
    let bracket = Bracket::new(T::zero(), T::lit(10.0), tol)?;
    let objective =
        |t: T| smoothing_out_terms(pair, n, log_eps, t).map(|terms| terms.total()).unwrap_or_else(|_| T::nan());
    let best = maximize_scalar(objective, &bracket)?;
    Ok(BoundResult::lower_on_beta(best.value, Some(best.arg)))
}
