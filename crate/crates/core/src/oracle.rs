//! Exact optimal Type II error `beta_n(eps)` of the Neyman-Pearson test.
//!
//! These are ground truth for the bounds: every lower bound must sit below
//! and every achievability bound above.

use crate::distributions::{DistributionPair, Family, MAX_PRODUCT_SIZE};
use crate::error::{domain, Error, Result};
use crate::numerics::{log_add_exp, log_diff_exp, log_q_function, q_inverse_log};
use crate::scalar::Real;

/// Largest `n` accepted by [`np_exact_discrete_bruteforce`].
pub const MAX_BRUTEFORCE_N: u32 = 14;

/// Whether [`np_exact_discrete_bruteforce`] accepts `n` samples over an
/// alphabet of `support` symbols.
pub fn bruteforce_fits(support: usize, n: u64) -> bool {
    n <= u64::from(MAX_BRUTEFORCE_N) && (support as f64).powi(n as i32) <= MAX_PRODUCT_SIZE as f64
}

/// Outcome of an exact Neyman-Pearson computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NPResult<T> {
    pub beta: T,
    pub log_beta: T,
    /// `log(1 - beta)`.
    pub log_power: T,
    /// Boundary of the rejection region in the test's natural statistic:
    /// the sample mean for Gaussian pairs, the success count for Bernoulli
    /// pairs and the `n`-sample log-likelihood ratio for brute force.
    pub threshold: T,
    /// Probability of rejecting on the boundary; zero for continuous pairs.
    pub randomization: T,
    /// Type I error actually spent.
    pub achieved_alpha: T,
}

fn check_log_eps<T: Real>(log_eps: T) -> Result<()> {
    if log_eps.is_nan() || log_eps > T::zero() {
        return Err(domain(format!("log eps must not be positive, got {log_eps}")));
    }
    Ok(())
}

/// Gaussian mean shift: reject when the sample mean crosses
/// `mu + sign(delta) sigma Q^{-1}(eps) / sqrt(n)`, giving
/// `beta = Q(sqrt(n)|delta|/sigma - Q^{-1}(eps))`.
pub fn np_exact_gaussian<T: Real>(pair: &DistributionPair<T>, n: u64, log_eps: T) -> Result<NPResult<T>> {
    let Family::Gaussian { mu, delta, sigma } = *pair.family() else {
        return Err(Error::UnsupportedFamily("np_exact_gaussian needs a Gaussian pair".into()));
    };
    check_log_eps(log_eps)?;
    let root = T::count(n).sqrt();
    if log_eps == T::zero() {
        return Ok(NPResult {
            beta: T::zero(),
            log_beta: T::neg_infinity(),
            log_power: T::zero(),
            threshold: if delta > T::zero() { T::neg_infinity() } else { T::infinity() },
            randomization: T::zero(),
            achieved_alpha: T::one(),
        });
    }
    if log_eps == T::neg_infinity() || n == 0 {
        let alpha = if n == 0 { log_eps.exp() } else { T::zero() };
        return Ok(NPResult {
            beta: T::one() - alpha,
            log_beta: (-alpha).ln_1p(),
            log_power: alpha.ln(),
            threshold: if delta > T::zero() { T::infinity() } else { T::neg_infinity() },
            randomization: if n == 0 { alpha } else { T::zero() },
            achieved_alpha: alpha,
        });
    }
    let z = q_inverse_log(log_eps)?;
    let s = root * delta.abs() / sigma;
    let log_beta = log_q_function(s - z);
    Ok(NPResult {
        beta: log_beta.exp(),
        log_beta,
        log_power: log_q_function(z - s),
        threshold: mu + delta.signum() * sigma * z / root,
        randomization: T::zero(),
        achieved_alpha: log_eps.exp(),
    })
}

/// `log Gamma(n + 1) - (n + 1/2) log n + n - log sqrt(2 pi)` for `n = 1..=15`.
const STIRLING_ERROR: [f64; 15] = [
    0.081_061_466_795_327_26,
    0.041_340_695_955_409_3,
    0.027_677_925_684_998_34,
    0.020_790_672_103_765_093,
    0.016_644_691_189_821_192,
    0.013_876_128_823_070_748,
    0.011_896_709_945_891_77,
    0.010_411_265_261_972_096,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_87,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_53,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_848,
    0.005_554_733_551_962_801,
];

/// Error of Stirling's approximation to `log n!`.
fn stirling_error<T: Real>(n: u64) -> T {
    if n <= 15 {
        return T::lit(STIRLING_ERROR[n as usize - 1]);
    }
    let (s0, s1, s2, s3, s4) =
        (T::lit(1.0 / 12.0), T::lit(1.0 / 360.0), T::lit(1.0 / 1260.0), T::lit(1.0 / 1680.0), T::lit(1.0 / 1188.0));
    let x = T::count(n);
    let xx = x * x;
    let series = if n > 500 {
        s0 - s1 / xx
    } else if n > 80 {
        s0 - (s1 - s2 / xx) / xx
    } else if n > 35 {
        s0 - (s1 - (s2 - s3 / xx) / xx) / xx
    } else {
        s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx
    };
    series / x
}

/// Deviance term `x log(x / m) + m - x`, free of cancellation near `x = m`.
fn deviance<T: Real>(x: T, m: T) -> T {
    if (x - m).abs() < T::lit(0.1) * (x + m) {
        let v = (x - m) / (x + m);
        let mut sum = (x - m) * v;
        let mut term = T::lit(2.0) * x * v;
        let vv = v * v;
        for j in 1..1000 {
            term = term * vv;
            let next = sum + term / T::count(2 * j + 1);
            if next == sum {
                break;
            }
            sum = next;
        }
        sum
    } else {
        x * (x / m).ln() + m - x
    }
}

/// Binomial log pmf via the saddle-point expansion; relative accuracy does
/// not degrade with `n` the way differences of log-gamma values do.
fn log_binomial_pmf<T: Real>(n: u64, k: u64, p: T, q: T) -> T {
    let nn = T::count(n);
    if k == 0 {
        return nn * q.ln();
    }
    if k == n {
        return nn * p.ln();
    }
    let kk = T::count(k);
    let rest = T::count(n - k);
    let exponent = stirling_error::<T>(n)
        - stirling_error::<T>(k)
        - stirling_error::<T>(n - k)
        - deviance(kk, nn * p)
        - deviance(rest, nn * q);
    let spread = T::lit(2.0) * T::PI() * kk * rest / nn;
    exponent - T::lit(0.5) * spread.ln()
}

/// Bernoulli pair: the likelihood ratio is monotone in the success count, so
/// the optimal test thresholds the count and randomizes on one boundary
/// value. Set `randomized = false` for the best deterministic test.
pub fn np_exact_bernoulli<T: Real>(
    pair: &DistributionPair<T>,
    n: u64,
    log_eps: T,
    randomized: bool,
) -> Result<NPResult<T>> {
    let Family::Bernoulli { p0, p1 } = *pair.family() else {
        return Err(Error::UnsupportedFamily("np_exact_bernoulli needs a Bernoulli pair".into()));
    };
    check_log_eps(log_eps)?;
    // Count the outcome that favours H1, so rejection is always for large counts.
    let flip = p1 < p0;
    let (a, b) = if flip { (T::one() - p0, T::one() - p1) } else { (p0, p1) };
    let pmf0 = |k: u64| log_binomial_pmf(n, k, a, T::one() - a);
    let pmf1 = |k: u64| log_binomial_pmf(n, k, b, T::one() - b);
    let natural = |k: u64| if flip { T::count(n - k) } else { T::count(k) };

    // Walk the rejection region down from k = n while P0(K >= k) fits.
    let mut tail = T::neg_infinity();
    let mut k = n + 1;
    // With eps = 1 everything is rejected; the summed pmf may round above one.
    if log_eps == T::zero() {
        k = 0;
        tail = T::zero();
    }
    while k > 0 {
        let next = log_add_exp(tail, pmf0(k - 1));
        if next > log_eps {
            break;
        }
        tail = next;
        k -= 1;
    }
    // Rejection region {K >= k}; boundary value k - 1 if any remains. Both
    // error probabilities are summed directly so neither loses precision
    // when the other is close to one.
    let log_sum1 = |range: std::ops::Range<u64>| range.fold(T::neg_infinity(), |acc, j| log_add_exp(acc, pmf1(j)));
    if k == 0 {
        // Everything rejected within budget.
        return Ok(NPResult {
            beta: T::zero(),
            log_beta: T::neg_infinity(),
            log_power: T::zero(),
            threshold: natural(0),
            randomization: T::zero(),
            achieved_alpha: tail.exp(),
        });
    }
    let boundary = k - 1;
    let below = log_sum1(0..boundary);
    let above = log_sum1(k..n + 1);
    let edge = pmf1(boundary);
    let (log_beta, log_power, gamma, spent) = if randomized && log_eps > T::neg_infinity() {
        let mass0 = pmf0(boundary);
        let log_gamma = log_diff_exp(log_eps, tail) - mass0;
        let log_keep = log_diff_exp(log_add_exp(tail, mass0), log_eps) - mass0;
        (log_add_exp(below, log_keep + edge), log_add_exp(above, log_gamma + edge), log_gamma.exp(), log_eps.exp())
    } else {
        (log_add_exp(below, edge), above, T::zero(), tail.exp())
    };
    let log_beta = log_beta.min(T::zero());
    Ok(NPResult {
        beta: log_beta.exp(),
        log_beta,
        log_power: log_power.min(T::zero()),
        threshold: natural(boundary),
        randomization: gamma,
        achieved_alpha: spent,
    })
}

/// Compensated summation.
fn neumaier<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry = carry + ((sum - t) + v);
        } else {
            carry = carry + ((v - t) + sum);
        }
        sum = t;
    }
    sum + carry
}

/// Randomized Neyman-Pearson test on the full `n`-fold product of a finite
/// pair, by sorting sequences on their likelihood ratio.
///
/// Sequences whose log-likelihood ratios agree up to rounding form one
/// class and are rejected or randomized together.
pub fn np_exact_discrete_bruteforce<T: Real>(pair: &DistributionPair<T>, n: u32, log_eps: T) -> Result<NPResult<T>> {
    if pair.is_gaussian() {
        return Err(Error::UnsupportedFamily("brute force needs a finite alphabet".into()));
    }
    check_log_eps(log_eps)?;
    if n > MAX_BRUTEFORCE_N {
        return Err(Error::TooLarge(format!("brute force supports n <= {MAX_BRUTEFORCE_N}, got {n}")));
    }
    let single = pair.cells().expect("finite alphabet");
    let max_llr = single.iter().map(|&(a, b)| (b.ln() - a.ln()).abs()).fold(T::zero(), T::max);
    let product = pair.n_fold_product(n)?;
    let mut cells: Vec<(T, T, T)> =
        product.cells().expect("finite alphabet").into_iter().map(|(a, b)| (b.ln() - a.ln(), a, b)).collect();
    cells.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite log ratios"));

    let tie = T::lit(64.0) * T::count(u64::from(n.max(1))) * max_llr.max(T::one()) * T::epsilon();
    let mut classes: Vec<(T, T, T)> = Vec::new();
    let mut start = 0;
    while start < cells.len() {
        let head = cells[start].0;
        let mut end = start + 1;
        while end < cells.len() && head - cells[end].0 <= tie {
            end += 1;
        }
        let group = &cells[start..end];
        classes.push((head, neumaier(group.iter().map(|c| c.1)), neumaier(group.iter().map(|c| c.2))));
        start = end;
    }

    let eps = log_eps.exp();
    let mut spent = Vec::new();
    let mut boundary = classes.len();
    for (i, class) in classes.iter().enumerate() {
        let candidate = neumaier(spent.iter().copied().chain(std::iter::once(class.1)));
        if candidate > eps {
            boundary = i;
            break;
        }
        spent.push(class.1);
    }
    let alpha_in = neumaier(spent.iter().copied());
    if boundary == classes.len() {
        return Ok(NPResult {
            beta: T::zero(),
            log_beta: T::neg_infinity(),
            log_power: T::zero(),
            threshold: classes.last().map_or(T::neg_infinity(), |c| c.0),
            randomization: T::zero(),
            achieved_alpha: alpha_in,
        });
    }
    let (llr, mass0, mass1) = classes[boundary];
    let gamma = ((eps - alpha_in) / mass0).max(T::zero()).min(T::one());
    let beta = neumaier(classes[boundary + 1..].iter().map(|c| c.2).chain(std::iter::once((T::one() - gamma) * mass1)));
    let beta = beta.max(T::zero()).min(T::one());
    Ok(NPResult {
        beta,
        log_beta: beta.ln(),
        log_power: (-beta).ln_1p(),
        threshold: llr,
        randomization: gamma,
        achieved_alpha: neumaier([alpha_in, gamma * mass0]),
    })
}
