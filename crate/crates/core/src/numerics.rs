//! Special functions, log-domain arithmetic and a bracketed scalar maximizer.
//!
//! Probabilities that may underflow are carried as natural logarithms. The
//! Gaussian tail helpers therefore come in two flavours: [`q_function`] for
//! ordinary arguments and [`log_q_function`] / [`q_inverse_log`], which stay
//! accurate when the tail probability is far below the smallest positive
//! float.

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Points in the coarse scan of [`maximize_scalar`].
pub const GRID_POINTS: usize = 2048;

/// Cap on the upper end of an unbounded search, as an offset from `lo`.
pub const UNBOUNDED_CAP: f64 = 1e6;

/// Default open-end offset for optimization brackets.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Depth of the backward continued-fraction recursion for the Mills ratio.
const MILLS_DEPTH: usize = 120;

/// Above this argument `log_q_function` switches from `erfc` to the Mills ratio.
const MILLS_SWITCH: f64 = 5.0;

/// Standard Gaussian upper-tail probability `Q(x) = P(Z > x)`.
pub fn q_function<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(domain(format!("q_function argument must be finite, got {x}")));
    }
    Ok(upper_tail(x))
}

#[inline]
pub(crate) fn upper_tail<T: Real>(x: T) -> T {
    T::lit(0.5) * (x * T::FRAC_1_SQRT_2()).erfc()
}

/// Natural log of the standard Gaussian density.
#[inline]
pub fn log_gaussian_density<T: Real>(x: T) -> T {
    -x * x / T::lit(2.0) - T::lit(0.5) * T::TAU().ln()
}

/// `log Q(x)`, finite for every finite `x`.
///
/// For large arguments the tail is written as `phi(x) * R(x)` where `R` is the
/// Mills ratio, evaluated by its continued fraction, so the result stays
/// accurate far beyond the underflow point of `Q` itself.
pub fn log_q_function<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x == T::neg_infinity() {
        return T::zero();
    }
    if x == T::infinity() {
        return T::neg_infinity();
    }
    if x < T::zero() {
        return (-upper_tail(-x)).ln_1p();
    }
    if x < T::lit(MILLS_SWITCH) {
        return upper_tail(x).ln();
    }
    log_gaussian_density(x) + mills_ratio(x).ln()
}

/// `Q(x) / phi(x)` for `x >= MILLS_SWITCH`, via
/// `1 / (x + 1 / (x + 2 / (x + 3 / (x + ...))))`.
fn mills_ratio<T: Real>(x: T) -> T {
    let mut tail = x;
    for k in (1..=MILLS_DEPTH).rev() {
        tail = x + T::count(k as u64) / tail;
    }
    tail.recip()
}

/// Inverse of [`q_function`]: the `x` with `Q(x) = p`.
pub fn q_inverse<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(domain(format!("q_inverse requires 0 < p < 1, got {p}")));
    }
    if p <= T::lit(0.5) {
        q_inverse_log(p.ln())
    } else {
        q_inverse_log((T::one() - p).ln()).map(|x| -x)
    }
}

/// The `x` with `log Q(x) = log_p`, for any `log_p < 0`.
///
/// Remains usable when `p = exp(log_p)` underflows (down to `log_p = -1e6`
/// and beyond). Solved by Newton's method on `log Q` with a bisection
/// safeguard.
pub fn q_inverse_log<T: Real>(log_p: T) -> Result<T> {
    if !(log_p < T::zero()) || !log_p.is_finite() {
        return Err(domain(format!("q_inverse_log requires a finite log-probability below 0, got {log_p}")));
    }
    let half = T::lit(0.5);
    if log_p > half.ln() {
        // Q(x) = p > 1/2  <=>  Q(-x) = 1 - p.
        let log_complement = (-log_p.exp_m1()).ln();
        return q_inverse_log(log_complement).map(|x| -x);
    }

    // Q(x) <= exp(-x^2/2) / 2 for x >= 0 brackets the root in [0, sqrt(-2 log p)].
    let mut lo = T::zero();
    let mut hi = (T::lit(-2.0) * log_p).sqrt().max(T::lit(1.0));
    let u = T::lit(-2.0) * log_p;
    let guess = u - (T::TAU() * u).ln();
    let mut x = if guess > T::zero() { guess.sqrt() } else { half * hi };
    if !(x > lo && x < hi) {
        x = half * (lo + hi);
    }

    let eps = T::epsilon();
    for _ in 0..200 {
        let g = log_q_function(x) - log_p;
        if g == T::zero() {
            return Ok(x);
        }
        // log Q is decreasing: g > 0 means the root lies to the right.
        if g > T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let slope = -(log_gaussian_density(x) - log_q_function(x)).exp();
        let mut next = x - g / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = half * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= T::lit(4.0) * eps * x.abs().max(T::one()) || hi - lo <= eps * hi {
            break;
        }
    }
    Ok(x)
}

/// `log sum_i exp(t_i)` without overflow or underflow.
pub fn log_sum_exp<T: Real>(terms: &[T]) -> Result<T> {
    if terms.is_empty() {
        return Err(domain("log_sum_exp of an empty list"));
    }
    let max = terms.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() || max == T::infinity() || max.is_nan() {
        return Ok(max);
    }
    let sum = terms.iter().fold(T::zero(), |acc, &t| acc + (t - max).exp());
    Ok(max + sum.ln())
}

/// `log(exp(a) + exp(b))`.
#[inline]
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == T::neg_infinity() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `log(exp(a) - exp(b))` for `a >= b`; `-inf` when `a == b` and NaN when `a < b`.
#[inline]
pub fn log_diff_exp<T: Real>(a: T, b: T) -> T {
    if b == T::neg_infinity() {
        return a;
    }
    if a < b {
        return T::nan();
    }
    if a == b {
        return T::neg_infinity();
    }
    a + log1m_exp(b - a)
}

/// `log(1 - exp(x))` for `x <= 0`.
#[inline]
pub fn log1m_exp<T: Real>(x: T) -> T {
    if x > T::zero() {
        return T::nan();
    }
    if x > -T::LN_2() {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// Search interval for [`maximize_scalar`].
///
/// The ends are treated as open: the search starts `tolerance` inside each
/// finite end. `hi` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    lo: T,
    hi: T,
    tolerance: T,
}

impl<T: Real> Bracket<T> {
    pub fn new(lo: T, hi: T, tolerance: T) -> Result<Self> {
        if !lo.is_finite() || hi.is_nan() || !(lo < hi) {
            return Err(domain(format!("bracket requires finite lo < hi, got ({lo}, {hi})")));
        }
        if !(tolerance > T::zero()) || !tolerance.is_finite() {
            return Err(domain(format!("bracket tolerance must be positive, got {tolerance}")));
        }
        Ok(Self { lo, hi, tolerance })
    }

    /// `(lo, hi)` with the default tolerance.
    pub fn open(lo: T, hi: T) -> Result<Self> {
        Self::new(lo, hi, T::lit(DEFAULT_TOLERANCE))
    }

    /// `(lo, +inf)` with the default tolerance.
    pub fn unbounded_above(lo: T) -> Result<Self> {
        Self::new(lo, T::infinity(), T::lit(DEFAULT_TOLERANCE))
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn is_unbounded(&self) -> bool {
        self.hi.is_infinite()
    }
}

/// Result of [`maximize_scalar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum<T> {
    pub arg: T,
    pub value: T,
}

/// Maximizes `f` over `bracket`.
///
/// A log-spaced scan of [`GRID_POINTS`] points locates the best cell, which is
/// then refined by golden-section search. Unbounded brackets are first closed
/// by probing `lo + 10^k` up to `lo + 1e6` and cutting one decade past the
/// best probe.
///
/// `-inf` is an acceptable value (an infeasible argument). NaN or `+inf` at
/// more than half of the scan is reported as [`Error::Optimization`].
pub fn maximize_scalar<T, F>(f: F, bracket: &Bracket<T>) -> Result<Maximum<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let tol = bracket.tolerance;
    let start = bracket.lo + tol;
    let grid = if bracket.is_unbounded() {
        let upper = expand_upper(&f, bracket.lo, start);
        log_grid_from(bracket.lo, tol, upper - bracket.lo)
    } else {
        let end = bracket.hi - tol;
        if !(end > start) {
            let mid = T::lit(0.5) * (bracket.lo + bracket.hi);
            return finish_single(&f, mid);
        }
        two_sided_grid(bracket.lo, bracket.hi, tol)
    };

    let mut values = Vec::with_capacity(grid.len());
    let mut bad = 0usize;
    let mut last_finite = None;
    for &x in &grid {
        let v = f(x);
        if v.is_nan() || v == T::infinity() {
            bad += 1;
        } else if v.is_finite() {
            last_finite = Some((x.as_f64(), v.as_f64()));
        }
        values.push(v);
    }
    if 2 * bad > grid.len() {
        return Err(Error::Optimization {
            reason: format!("objective non-finite at {bad} of {} grid points", grid.len()),
            last_finite,
        });
    }

    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if !v.is_nan()
            && v != T::infinity()
            && (values[best].is_nan() || values[best] == T::infinity() || v > values[best])
        {
            best = i;
        }
    }
    let mut result = Maximum { arg: grid[best], value: values[best] };
    if result.value == T::neg_infinity() {
        return Ok(result);
    }

    // Cells at the ends of the scan extend to the bracket itself, so optima
    // closer to an open end than `tol` are still reached.
    let left = if best == 0 { bracket.lo } else { grid[best - 1] };
    let right = match grid.get(best + 1) {
        Some(&x) => x,
        None if bracket.is_unbounded() => grid[best],
        None => bracket.hi,
    };
    if right > left {
        let refined = golden_section(&f, left, right);
        if refined.value > result.value {
            result = refined;
        }
    }
    Ok(result)
}

fn finish_single<T: Real, F: Fn(T) -> T>(f: &F, x: T) -> Result<Maximum<T>> {
    let v = f(x);
    if v.is_nan() || v == T::infinity() {
        return Err(Error::Optimization {
            reason: "objective non-finite on a degenerate bracket".into(),
            last_finite: None,
        });
    }
    Ok(Maximum { arg: x, value: v })
}

fn expand_upper<T: Real, F: Fn(T) -> T>(f: &F, lo: T, start: T) -> T {
    // Probe every decade up to the cap and close the bracket one decade past
    // the best probe, so an early dip cannot hide a later peak. The start
    // point is left out: objectives often diverge at `lo`.
    let ten = T::lit(10.0);
    let cap = lo + T::lit(UNBOUNDED_CAP);
    let mut probes = Vec::new();
    let mut offset = T::one();
    while lo + offset < cap {
        probes.push(lo + offset);
        offset = offset * ten;
    }
    probes.push(cap);
    let mut best = T::nan();
    let mut upper = probes[0].max(start + start.abs().max(T::one()) * T::epsilon());
    for (i, &x) in probes.iter().enumerate() {
        let v = f(x);
        if v > best || (best.is_nan() && !v.is_nan()) {
            best = v;
            upper = probes.get(i + 1).copied().unwrap_or(cap);
        }
    }
    upper
}

/// `lo + offsets`, offsets geometric from `tol` to `span`.
fn log_grid_from<T: Real>(lo: T, tol: T, span: T) -> Vec<T> {
    let span = span.max(tol * T::lit(2.0));
    let ratio = (span / tol).ln();
    let last = T::count((GRID_POINTS - 1) as u64);
    (0..GRID_POINTS).map(|i| lo + tol * (ratio * T::count(i as u64) / last).exp()).collect()
}

/// Points log-spaced towards both ends of `(lo, hi)`.
fn two_sided_grid<T: Real>(lo: T, hi: T, tol: T) -> Vec<T> {
    let half_points = GRID_POINTS / 2;
    let half_width = T::lit(0.5) * (hi - lo);
    if !(half_width > tol) {
        let step = (hi - lo - T::lit(2.0) * tol) / T::count((GRID_POINTS - 1) as u64);
        return (0..GRID_POINTS).map(|i| lo + tol + step * T::count(i as u64)).collect();
    }
    let ratio = (half_width / tol).ln();
    let last = T::count((half_points - 1) as u64);
    let offsets: Vec<T> = (0..half_points).map(|i| tol * (ratio * T::count(i as u64) / last).exp()).collect();
    // The midpoint belongs to both halves; emit it once so neighbouring
    // cells always bracket it.
    let mut grid: Vec<T> = offsets.iter().map(|&o| lo + o).collect();
    grid.extend(offsets.iter().rev().skip(1).map(|&o| hi - o));
    grid.dedup();
    grid
}

fn golden_section<T: Real, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T) -> Maximum<T> {
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fd > fc { Maximum { arg: d, value: fd } } else { Maximum { arg: c, value: fc } };
    let eps = T::epsilon();
    for _ in 0..400 {
        if (b - a).abs() <= T::lit(2.0) * eps * (a.abs() + b.abs()) {
            break;
        }
        if fc >= fd || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            if fc > best.value {
                best = Maximum { arg: c, value: fc };
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            if fd > best.value {
                best = Maximum { arg: d, value: fd };
            }
        }
    }
    best
}
