//! Hypothesis pairs `(P0, P1)` and their divergences.
//!
//! Every divergence here is single-letter. Quantities for `n` i.i.d. samples
//! follow from additivity over product measures: multiply by `n`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::numerics::log_sum_exp;
use crate::scalar::Real;

/// Largest outcome space [`DistributionPair::n_fold_product`] will build.
pub const MAX_PRODUCT_SIZE: usize = 10_000_000;

/// Supported hypothesis families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<T> {
    /// `P0 = Bern(p0)`, `P1 = Bern(p1)`.
    Bernoulli { p0: T, p1: T },
    /// `P0 = N(mu, sigma^2)`, `P1 = N(mu + delta, sigma^2)`.
    Gaussian { mu: T, delta: T, sigma: T },
    /// Probability vectors on a common finite alphabet with matched supports.
    FiniteDiscrete { p0: Vec<T>, p1: Vec<T> },
}

/// A validated `(P0, P1)` pair. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionPair<T> {
    family: Family<T>,
}

/// Which way a divergence is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `D(P0 || P1)`.
    Forward,
    /// `D(P1 || P0)`.
    Reverse,
}

/// Per-sample moments of `log(p0(X) / p1(X))` under `P0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlrMoments<T> {
    /// `D(P0 || P1)` in nats.
    pub mean: T,
    pub variance: T,
    /// `E|L - mean|^3`.
    pub third_abs_central: T,
    /// `6 T / V^{3/2}`; `+inf` when the variance vanishes.
    pub berry_constant: T,
}

impl<T: Real> DistributionPair<T> {
    pub fn bernoulli(p0: T, p1: T) -> Result<Self> {
        let in_unit = |p: T| p > T::zero() && p < T::one();
        if !in_unit(p0) || !in_unit(p1) {
            return Err(Error::InvalidPair(format!("bernoulli parameters must lie in (0, 1), got ({p0}, {p1})")));
        }
        if p0 == p1 {
            return Err(Error::InvalidPair("bernoulli parameters must differ".into()));
        }
        Ok(Self { family: Family::Bernoulli { p0, p1 } })
    }

    pub fn gaussian(mu: T, delta: T, sigma: T) -> Result<Self> {
        if !mu.is_finite() || !delta.is_finite() || !sigma.is_finite() {
            return Err(Error::InvalidPair("gaussian parameters must be finite".into()));
        }
        if !(sigma > T::zero()) {
            return Err(Error::InvalidPair(format!("gaussian sigma must be positive, got {sigma}")));
        }
        if delta == T::zero() {
            return Err(Error::InvalidPair("gaussian mean shift must be non-zero".into()));
        }
        Ok(Self { family: Family::Gaussian { mu, delta, sigma } })
    }

    /// Unit-variance Gaussian pair.
    pub fn gaussian_unit(mu: T, delta: T) -> Result<Self> {
        Self::gaussian(mu, delta, T::one())
    }

    pub fn discrete(p0: Vec<T>, p1: Vec<T>) -> Result<Self> {
        if p0.len() != p1.len() {
            return Err(Error::InvalidPair(format!(
                "probability vectors differ in length ({} vs {})",
                p0.len(),
                p1.len()
            )));
        }
        if p0.len() < 2 {
            return Err(Error::InvalidPair("alphabet needs at least two symbols".into()));
        }
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
        for (name, v) in [("p0", &p0), ("p1", &p1)] {
            if v.iter().any(|&x| !(x >= T::zero()) || !x.is_finite()) {
                return Err(Error::InvalidPair(format!("{name} has a negative or non-finite entry")));
            }
            let total = v.iter().fold(T::zero(), |a, &x| a + x);
            if (total - T::one()).abs() > tol {
                return Err(Error::InvalidPair(format!("{name} sums to {total}, not 1")));
            }
        }
        if let Some(i) = p0.iter().zip(&p1).position(|(&a, &b)| (a > T::zero()) != (b > T::zero())) {
            return Err(Error::InvalidPair(format!(
                "supports differ at symbol {i}; the pair must be mutually absolutely continuous"
            )));
        }
        Ok(Self { family: Family::FiniteDiscrete { p0, p1 } })
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.family, Family::Gaussian { .. })
    }

    /// Alphabet size for discrete families, `None` for Gaussian pairs.
    pub fn support_size(&self) -> Option<usize> {
        match &self.family {
            Family::Bernoulli { .. } => Some(2),
            Family::Gaussian { .. } => None,
            Family::FiniteDiscrete { p0, .. } => Some(p0.len()),
        }
    }

    /// `(p0(x), p1(x))` over the common support, skipping null symbols.
    pub(crate) fn cells(&self) -> Option<Vec<(T, T)>> {
        match &self.family {
            Family::Bernoulli { p0, p1 } => Some(vec![(T::one() - *p0, T::one() - *p1), (*p0, *p1)]),
            Family::Gaussian { .. } => None,
            Family::FiniteDiscrete { p0, p1 } => {
                Some(p0.iter().zip(p1).filter(|(&a, _)| a > T::zero()).map(|(&a, &b)| (a, b)).collect())
            }
        }
    }

    /// `delta^2 / sigma^2` for Gaussian pairs.
    fn standardized_shift_sq(&self) -> Option<T> {
        match self.family {
            Family::Gaussian { delta, sigma, .. } => Some((delta / sigma).powi(2)),
            _ => None,
        }
    }

    /// Kullback-Leibler divergence in nats.
    pub fn kl_divergence(&self, direction: Direction) -> T {
        if let Some(s2) = self.standardized_shift_sq() {
            return s2 / T::lit(2.0);
        }
        let cells = self.cells().expect("discrete family");
        cells.iter().map(|&(a, b)| oriented(a, b, direction)).fold(T::zero(), |acc, (p, q)| acc + p * (p / q).ln())
    }

    /// `log E_Q[(p/q)^lambda] = (lambda - 1) D_lambda(P || Q)`.
    ///
    /// Defined for every `lambda > 0`, including `lambda = 1` where it
    /// vanishes. Near `lambda = 1` the sum is taken as
    /// `log1p(sum p (exp((lambda-1) r) - 1))` so that small values keep their
    /// relative precision; elsewhere it is a log-sum-exp of
    /// `lambda log p + (1 - lambda) log q`.
    pub fn renyi_log_moment(&self, lambda: T, direction: Direction) -> T {
        if let Some(s2) = self.standardized_shift_sq() {
            return lambda * (lambda - T::one()) * s2 / T::lit(2.0);
        }
        let cells = self.cells().expect("discrete family");
        let shift = lambda - T::one();
        let pairs: Vec<(T, T, T)> = cells
            .iter()
            .map(|&(a, b)| {
                let (p, q) = oriented(a, b, direction);
                (p, q, p.ln() - q.ln())
            })
            .collect();
        let max_ratio = pairs.iter().fold(T::zero(), |m, &(_, _, r)| m.max(r.abs()));
        if (shift * max_ratio).abs() <= T::lit(0.5) {
            let s = pairs.iter().fold(T::zero(), |acc, &(p, _, r)| acc + p * (shift * r).exp_m1());
            return s.ln_1p();
        }
        let terms: Vec<T> = pairs.iter().map(|&(p, q, _)| lambda * p.ln() + (T::one() - lambda) * q.ln()).collect();
        log_sum_exp(&terms).expect("non-empty support")
    }

    /// Renyi divergence of order `lambda` in nats, `lambda in (0, 1) U (1, inf)`.
    pub fn renyi_divergence(&self, lambda: T, direction: Direction) -> Result<T> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(domain(format!("renyi order must be positive and finite, got {lambda}")));
        }
        if lambda == T::one() {
            return Err(domain("renyi order 1 is the KL divergence; use kl_divergence"));
        }
        if let Some(s2) = self.standardized_shift_sq() {
            return Ok(lambda * s2 / T::lit(2.0));
        }
        Ok(self.renyi_log_moment(lambda, direction) / (lambda - T::one()))
    }

    /// Squared Hellinger distance `1 - sum sqrt(p0 p1)`.
    pub fn hellinger_squared(&self) -> T {
        if let Some(s2) = self.standardized_shift_sq() {
            return -(-s2 / T::lit(8.0)).exp_m1();
        }
        let cells = self.cells().expect("discrete family");
        cells.iter().fold(T::zero(), |acc, &(a, b)| acc + (a.sqrt() - b.sqrt()).powi(2)) / T::lit(2.0)
    }

    /// `log(1 - H^2)`, the log Bhattacharyya coefficient.
    pub fn log_bhattacharyya(&self) -> T {
        if let Some(s2) = self.standardized_shift_sq() {
            return -s2 / T::lit(8.0);
        }
        (-self.hellinger_squared()).ln_1p()
    }

    pub fn llr_moments(&self) -> LlrMoments<T> {
        if let Some(s2) = self.standardized_shift_sq() {
            let v = s2;
            let t = v.powf(T::lit(1.5)) * (T::lit(8.0) / T::PI()).sqrt();
            return LlrMoments {
                mean: v / T::lit(2.0),
                variance: v,
                third_abs_central: t,
                berry_constant: T::lit(6.0) * (T::lit(8.0) / T::PI()).sqrt(),
            };
        }
        let cells = self.cells().expect("discrete family");
        let llr: Vec<(T, T)> = cells.iter().map(|&(a, b)| (a, a.ln() - b.ln())).collect();
        let mean = llr.iter().fold(T::zero(), |acc, &(p, l)| acc + p * l);
        let variance = llr.iter().fold(T::zero(), |acc, &(p, l)| acc + p * (l - mean).powi(2));
        let third = llr.iter().fold(T::zero(), |acc, &(p, l)| acc + p * (l - mean).abs().powi(3));
        let berry_constant =
            if variance > T::zero() { T::lit(6.0) * third / variance.powf(T::lit(1.5)) } else { T::infinity() };
        LlrMoments { mean, variance, third_abs_central: third, berry_constant }
    }

    /// `log(p1(x) / p0(x))` for a single observation.
    ///
    /// Discrete observations are symbol indices (`0`/`1` for Bernoulli).
    pub fn log_density_ratio(&self, x: T) -> Result<T> {
        match &self.family {
            Family::Gaussian { mu, delta, sigma } => {
                if !x.is_finite() {
                    return Err(domain("gaussian observation must be finite"));
                }
                let s2 = *sigma * *sigma;
                Ok(*delta * (x - *mu) / s2 - *delta * *delta / (T::lit(2.0) * s2))
            }
            Family::Bernoulli { p0, p1 } => {
                if x == T::one() {
                    Ok(p1.ln() - p0.ln())
                } else if x == T::zero() {
                    Ok((-*p1).ln_1p() - (-*p0).ln_1p())
                } else {
                    Err(domain(format!("bernoulli observation must be 0 or 1, got {x}")))
                }
            }
            Family::FiniteDiscrete { p0, p1 } => {
                let idx = symbol_index(x, p0.len())?;
                if !(p0[idx] > T::zero()) {
                    return Err(domain(format!("symbol {idx} lies outside the common support")));
                }
                Ok(p1[idx].ln() - p0[idx].ln())
            }
        }
    }

    /// The pair `(P0^n, P1^n)` on the product alphabet, in lexicographic order.
    pub fn n_fold_product(&self, n: u32) -> Result<Self> {
        let cells =
            self.cells().ok_or_else(|| Error::UnsupportedFamily("n-fold product needs a discrete pair".into()))?;
        let k = match &self.family {
            Family::FiniteDiscrete { p0, .. } => p0.len(),
            _ => cells.len(),
        };
        let size = (k as u128).checked_pow(n).unwrap_or(u128::MAX);
        if n == 0 || size > MAX_PRODUCT_SIZE as u128 {
            return Err(Error::TooLarge(format!("{k}^{n} outcomes")));
        }
        let (base0, base1): (Vec<T>, Vec<T>) = match &self.family {
            Family::FiniteDiscrete { p0, p1 } => (p0.clone(), p1.clone()),
            _ => cells.iter().copied().unzip(),
        };
        let mut out0 = base0.clone();
        let mut out1 = base1.clone();
        for _ in 1..n {
            out0 = out0.iter().flat_map(|&a| base0.iter().map(move |&b| a * b)).collect();
            out1 = out1.iter().flat_map(|&a| base1.iter().map(move |&b| a * b)).collect();
        }
        // Products of normalized vectors are normalized up to rounding.
        Ok(Self { family: Family::FiniteDiscrete { p0: out0, p1: out1 } })
    }
}

fn oriented<T>(a: T, b: T, direction: Direction) -> (T, T) {
    match direction {
        Direction::Forward => (a, b),
        Direction::Reverse => (b, a),
    }
}

fn symbol_index<T: Real>(x: T, len: usize) -> Result<usize> {
    if x < T::zero() || x.fract() != T::zero() {
        return Err(domain(format!("discrete observation must be a symbol index, got {x}")));
    }
    match x.to_usize() {
        Some(i) if i < len => Ok(i),
        _ => Err(domain(format!("symbol {x} outside alphabet of size {len}"))),
    }
}

impl<T: Real> fmt::Display for DistributionPair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[T]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match &self.family {
            Family::Bernoulli { p0, p1 } => write!(f, "bernoulli:{p0},{p1}"),
            Family::Gaussian { mu, delta, sigma } => write!(f, "gaussian:{mu},{delta},{sigma}"),
            Family::FiniteDiscrete { p0, p1 } => write!(f, "discrete:{}|{}", join(p0), join(p1)),
        }
    }
}

/// Parses `bernoulli:p0,p1`, `gaussian:mu,delta[,sigma]` or
/// `discrete:p,p,...|q,q,...`.
impl<T: Real> FromStr for DistributionPair<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let colon = s
            .find(':')
            .ok_or_else(|| Error::Parse { offset: s.len(), message: "expected '<family>:<parameters>'".into() })?;
        let family = s[..colon].trim();
        let body_offset = colon + 1;
        let body = &s[body_offset..];
        match family {
            "bernoulli" => {
                let v = parse_list::<T>(body, body_offset)?;
                expect_len(&v, 2..=2, body_offset, "bernoulli takes p0,p1")?;
                Self::bernoulli(v[0], v[1])
            }
            "gaussian" => {
                let v = parse_list::<T>(body, body_offset)?;
                expect_len(&v, 2..=3, body_offset, "gaussian takes mu,delta[,sigma]")?;
                Self::gaussian(v[0], v[1], v.get(2).copied().unwrap_or_else(T::one))
            }
            "discrete" => {
                let bar = body.find('|').ok_or_else(|| Error::Parse {
                    offset: body_offset + body.len(),
                    message: "discrete takes p0list|p1list".into(),
                })?;
                let p0 = parse_list::<T>(&body[..bar], body_offset)?;
                let p1 = parse_list::<T>(&body[bar + 1..], body_offset + bar + 1)?;
                Self::discrete(p0, p1)
            }
            other => Err(Error::Parse {
                offset: 0,
                message: format!("unknown family '{other}' (expected bernoulli, gaussian or discrete)"),
            }),
        }
    }
}

fn parse_list<T: Real>(body: &str, base: usize) -> Result<Vec<T>> {
    let mut out = Vec::new();
    let mut offset = base;
    for token in body.split(',') {
        let trimmed = token.trim();
        let lead = token.len() - token.trim_start().len();
        let value: f64 = trimmed.parse().map_err(|_| Error::Parse {
            offset: offset + lead,
            message: format!("expected a number, found '{trimmed}'"),
        })?;
        out.push(T::lit(value));
        offset += token.len() + 1;
    }
    Ok(out)
}

fn expect_len<T>(v: &[T], range: std::ops::RangeInclusive<usize>, offset: usize, msg: &str) -> Result<()> {
    if range.contains(&v.len()) {
        Ok(())
    } else {
        Err(Error::Parse { offset, message: format!("{msg}, got {} values", v.len()) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> DistributionPair<f64> {
        DistributionPair::gaussian_unit(2.0, 0.05).unwrap()
    }

    fn bern() -> DistributionPair<f64> {
        DistributionPair::bernoulli(0.5, 0.51).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn construction_invariants() {
        assert!(DistributionPair::bernoulli(0.0, 0.5).is_err());
        assert!(DistributionPair::bernoulli(0.5, 1.0).is_err());
        assert!(DistributionPair::bernoulli(0.3, 0.3).is_err());
        assert!(DistributionPair::gaussian(0.0, 0.0, 1.0).is_err());
        assert!(DistributionPair::gaussian(0.0, 1.0, 0.0).is_err());
        assert!(DistributionPair::discrete(vec![1.0], vec![1.0]).is_err());
        assert!(DistributionPair::discrete(vec![0.5, 0.5], vec![0.2, 0.3, 0.5]).is_err());
        assert!(DistributionPair::discrete(vec![0.5, 0.6], vec![0.5, 0.5]).is_err());
        assert!(DistributionPair::discrete(vec![0.5, 0.5, 0.0], vec![0.5, 0.4, 0.1]).is_err());
        assert!(DistributionPair::discrete(vec![0.5, 0.5, 0.0], vec![0.4, 0.6, 0.0]).is_ok());
    }

    #[test]
    fn kl_examples() {
        assert!(close(gauss().kl_divergence(Direction::Reverse), 0.00125, 1e-18));
        let near = DistributionPair::bernoulli(0.5_f64, 0.5 + 1e-9).unwrap();
        assert!(near.kl_divergence(Direction::Forward).abs() <= 1e-15);
        assert!(near.kl_divergence(Direction::Reverse).abs() <= 1e-15);
        // 40-digit reference: 2.000133354671239e-4
        assert!(close(bern().kl_divergence(Direction::Reverse), 2.000_133_354_671_239e-4, 1e-15));
        assert!(close(bern().kl_divergence(Direction::Reverse), 2.00013e-4, 1e-9));
    }

    #[test]
    fn renyi_examples() {
        let d = gauss().renyi_divergence(4.472136, Direction::Reverse).unwrap();
        assert!(close(d, 4.472136 * 0.00125, 1e-15));
        assert!(close(d, 0.0055902, 5e-8));
        let same = DistributionPair::discrete(vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5]).unwrap();
        for l in [0.1, 0.5, 2.0, 7.0] {
            assert_eq!(same.renyi_divergence(l, Direction::Forward).unwrap(), 0.0);
        }
        // log(0.51^2/0.5 + 0.49^2/0.5) = 3.999200213269354e-4
        let d2 = bern().renyi_divergence(2.0, Direction::Reverse).unwrap();
        assert!(close(d2, 3.999_200_213_269_354e-4, 1e-15));
        assert!(bern().renyi_divergence(1.0, Direction::Forward).is_err());
        assert!(bern().renyi_divergence(0.0, Direction::Forward).is_err());
    }

    #[test]
    fn hellinger_examples() {
        assert!(close(gauss().hellinger_squared(), 3.12451e-4, 1e-9));
        let same = DistributionPair::discrete(vec![0.2, 0.8], vec![0.2, 0.8]).unwrap();
        assert_eq!(same.hellinger_squared(), 0.0);
        // 1 - (sqrt(0.255) + sqrt(0.245)) = 5.000625131283525e-5
        assert!(close(bern().hellinger_squared(), 5.000_625_131_283_525e-5, 1e-15));
    }

    #[test]
    fn llr_moment_examples() {
        let m = gauss().llr_moments();
        assert!(close(m.variance, 0.0025, 1e-15));
        assert!(close(m.third_abs_central, 1.99471e-4, 5e-10));
        assert!(close(m.berry_constant, 6.0 * (8.0 / std::f64::consts::PI).sqrt(), 1e-13));
        let same = DistributionPair::discrete(vec![0.4, 0.6], vec![0.4, 0.6]).unwrap();
        let z = same.llr_moments();
        assert_eq!((z.mean, z.variance), (0.0, 0.0));
        // Exact two-point moments under P0 (mpmath, 40 digits).
        let b = bern().llr_moments();
        assert!(close(b.mean, 2.000_400_106_698_677e-4, 1e-15));
        assert!(close(b.variance, 4.001_066_993_885_091e-4, 1e-15));
        assert!(close(b.third_abs_central, 8.003_201_195_110_023e-6, 1e-16));
    }

    #[test]
    fn log_density_ratio_examples() {
        assert!(gauss().log_density_ratio(2.025).unwrap().abs() <= 1e-15);
        assert!(close(bern().log_density_ratio(1.0).unwrap(), 1.02_f64.ln(), 1e-15));
        assert!(close(bern().log_density_ratio(1.0).unwrap(), 0.0198026, 1e-7));
        assert!(close(gauss().log_density_ratio(2.0).unwrap(), -0.00125, 1e-15));
        assert!(bern().log_density_ratio(2.0).is_err());
        let d = DistributionPair::discrete(vec![0.5, 0.5, 0.0], vec![0.4, 0.6, 0.0]).unwrap();
        assert!(d.log_density_ratio(2.0).is_err());
        assert!(d.log_density_ratio(3.0).is_err());
        assert!(d.log_density_ratio(0.5).is_err());
    }

    #[test]
    fn parse_round_trip_and_offsets() {
        let g: DistributionPair<f64> = "gaussian:2,0.05".parse().unwrap();
        assert_eq!(g, gauss());
        let g3: DistributionPair<f64> = "gaussian:2,0.05,2".parse().unwrap();
        assert_eq!(g3, DistributionPair::gaussian(2.0, 0.05, 2.0).unwrap());
        let b: DistributionPair<f64> = "bernoulli:0.5,0.51".parse().unwrap();
        assert_eq!(b, bern());
        let d: DistributionPair<f64> = "discrete:0.2,0.8|0.5,0.5".parse().unwrap();
        assert_eq!(d.support_size(), Some(2));
        assert_eq!(d.to_string().parse::<DistributionPair<f64>>().unwrap(), d);

        match "bernoulli:0.5,x".parse::<DistributionPair<f64>>() {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 14),
            other => panic!("{other:?}"),
        }
        match "discrete:0.5,0.5|0.5,zz".parse::<DistributionPair<f64>>() {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 21),
            other => panic!("{other:?}"),
        }
        assert!(matches!("poisson:1".parse::<DistributionPair<f64>>(), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!("gaussian".parse::<DistributionPair<f64>>(), Err(Error::Parse { .. })));
        assert!(matches!("bernoulli:0.5,0.5".parse::<DistributionPair<f64>>(), Err(Error::InvalidPair(_))));
    }

    #[test]
    fn product_is_normalized() {
        let p = bern().n_fold_product(3).unwrap();
        assert_eq!(p.support_size(), Some(8));
        if let Family::FiniteDiscrete { p0, p1 } = p.family() {
            assert!(close(p0.iter().sum::<f64>(), 1.0, 1e-15));
            assert!(close(p1.iter().sum::<f64>(), 1.0, 1e-15));
        }
        assert!(gauss().n_fold_product(2).is_err());
    }

    #[test]
    fn sigma_scales_out() {
        let a = DistributionPair::gaussian(0.0, 0.2, 2.0).unwrap();
        let b = DistributionPair::gaussian(0.0, 0.1, 1.0).unwrap();
        assert!(close(a.kl_divergence(Direction::Forward), b.kl_divergence(Direction::Forward), 1e-18));
        assert!(close(a.hellinger_squared(), b.hellinger_squared(), 1e-18));
    }
}
