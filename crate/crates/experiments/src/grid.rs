//! Sample-size sweeps: which bounds to evaluate, at which `n`, and the
//! resulting table.

use std::fmt;
use std::str::FromStr;

use hypotest_core::{
    berry_esseen_bound, bruteforce_fits, fano_bound, hellinger_bound, np_exact_bernoulli, np_exact_discrete_bruteforce,
    np_exact_gaussian, phase_transition_achievability, phase_transition_converse, renyi_achievability_at_threshold,
    renyi_converse, smoothing_out_bound, threshold_for_rate, Bound, Direction, Error as CoreError, Family, Pair,
    Regime,
};
use rayon::prelude::*;

use crate::error::{ExperimentError, Result};

/// Environment variable capping sweep parallelism.
pub const THREADS_VAR: &str = "HYPOTEST_THREADS";

/// Columns a sweep can produce, in output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundName {
    RenyiConverse,
    Achievability,
    PhaseConverse,
    PhaseAchievability,
    Fano,
    Hellinger,
    BerryEsseen,
    SmoothingOut,
    NpExact,
}

impl BoundName {
    pub const ALL: [BoundName; 9] = [
        Self::RenyiConverse,
        Self::Achievability,
        Self::PhaseConverse,
        Self::PhaseAchievability,
        Self::Fano,
        Self::Hellinger,
        Self::BerryEsseen,
        Self::SmoothingOut,
        Self::NpExact,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::RenyiConverse => "renyi_converse",
            Self::Achievability => "achievability",
            Self::PhaseConverse => "phase_converse",
            Self::PhaseAchievability => "phase_achievability",
            Self::Fano => "fano",
            Self::Hellinger => "hellinger",
            Self::BerryEsseen => "berry_esseen",
            Self::SmoothingOut => "smoothing_out",
            Self::NpExact => "np_exact",
        }
    }

    /// Baselines the Renyi converse is compared against.
    pub fn is_baseline(self) -> bool {
        matches!(self, Self::Fano | Self::Hellinger | Self::BerryEsseen | Self::SmoothingOut)
    }

    /// Every bound that can be evaluated on `pair`.
    pub fn supported_by(pair: &Pair) -> Vec<BoundName> {
        Self::ALL.into_iter().filter(|b| *b != Self::SmoothingOut || pair.is_gaussian()).collect()
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|b| b.as_str() == s.trim()).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|b| b.as_str()).collect();
            ExperimentError::config(format!("unknown bound '{s}', expected one of {}", names.join(", ")))
        })
    }
}

/// Parses a pair specification, mapping parse failures to their offset.
pub fn parse_pair(spec: &str) -> Result<Pair> {
    spec.parse::<Pair>().map_err(|e| match e {
        CoreError::Parse { offset, message } => ExperimentError::PairSpec { offset, message },
        other => ExperimentError::Bound(other),
    })
}

/// Parses `constant:EPS`, `linear`, `exponential:C` or `exponential:KD`,
/// the last meaning `C = K * D(P1||P0)` for `pair`.
pub fn parse_regime(spec: &str, pair: &Pair) -> Result<Regime> {
    let spec = spec.trim();
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a.trim())),
        None => (spec, None),
    };
    let number = |text: &str| -> Result<f64> {
        text.parse::<f64>().map_err(|_| ExperimentError::config(format!("regime '{spec}': '{text}' is not a number")))
    };
    let regime = match (kind, arg) {
        ("constant", Some(a)) => Regime::constant(number(a)?)?,
        ("linear", None) => Regime::Linear,
        ("exponential", Some(a)) => match a.strip_suffix(['D', 'd']) {
            Some(multiple) => Regime::exponential(number(multiple)? * pair.kl_divergence(Direction::Reverse))?,
            None => Regime::exponential(number(a)?)?,
        },
        _ => {
            return Err(ExperimentError::config(format!(
                "unknown regime '{spec}', expected constant:EPS, linear, exponential:C or exponential:KD"
            )))
        }
    };
    Ok(regime)
}

/// `10, 20, ..., 500`, then 10 geometric steps up to 2000.
pub fn default_n_grid() -> Vec<u64> {
    let mut grid: Vec<u64> = (1..=50).map(|i| 10 * i).collect();
    for k in 1..=10 {
        grid.push((500.0 * 4f64.powf(k as f64 / 10.0)).round() as u64);
    }
    grid
}

/// A validated sweep configuration.
#[derive(Debug, Clone)]
pub struct ExperimentGrid {
    pub pair_spec: String,
    pub pair: Pair,
    pub regime: Regime,
    pub n_values: Vec<u64>,
    /// Distinct, in canonical column order.
    pub bounds: Vec<BoundName>,
}

impl ExperimentGrid {
    /// Checks every combination up front so no work starts on a grid that
    /// cannot complete.
    pub fn new(pair_spec: &str, regime: Regime, n_values: Vec<u64>, bounds: &[BoundName]) -> Result<Self> {
        let pair = parse_pair(pair_spec)?;
        if n_values.is_empty() {
            return Err(ExperimentError::config("the n grid is empty"));
        }
        if n_values[0] == 0 {
            return Err(ExperimentError::config("sample sizes must be positive"));
        }
        if n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::config("the n grid must be strictly increasing"));
        }
        if matches!(regime, Regime::Linear) && n_values[0] < 2 {
            return Err(ExperimentError::config("the linear regime needs n >= 2"));
        }
        let mut bounds = bounds.to_vec();
        bounds.sort();
        bounds.dedup();
        if bounds.is_empty() {
            return Err(ExperimentError::config("no bounds selected"));
        }
        if bounds.contains(&BoundName::SmoothingOut) && !pair.is_gaussian() {
            return Err(ExperimentError::config("smoothing_out is only available for Gaussian pairs"));
        }
        if bounds.contains(&BoundName::NpExact) {
            if let Family::FiniteDiscrete { p0, .. } = pair.family() {
                let largest = *n_values.last().expect("non-empty");
                if !bruteforce_fits(p0.len(), largest) {
                    return Err(ExperimentError::config(format!(
                        "np_exact on a {}-symbol alphabet cannot enumerate n = {largest}",
                        p0.len()
                    )));
                }
            }
        }
        Ok(Self { pair_spec: pair_spec.to_string(), pair, regime, n_values, bounds })
    }
}

/// One evaluated bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    /// `None` when the bound does not apply at this `n`.
    pub value: Option<f64>,
    pub log_value: Option<f64>,
    /// Optimizing parameter, or the test threshold for `np_exact`.
    pub optimizer: Option<f64>,
    pub valid: bool,
}

impl Cell {
    pub const EMPTY: Cell = Cell { value: None, log_value: None, optimizer: None, valid: false };

    /// Value usable for plotting and comparisons.
    pub fn valid_value(&self) -> Option<f64> {
        self.value.filter(|_| self.valid)
    }
}

impl From<Bound> for Cell {
    /// Invalid bounds keep their optimizer but drop the placeholder value.
    fn from(b: Bound) -> Self {
        if b.valid {
            Cell { value: Some(b.value), log_value: Some(b.log_value), optimizer: b.optimizer, valid: true }
        } else {
            Cell { optimizer: b.optimizer, ..Cell::EMPTY }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: u64,
    pub eps: f64,
    pub log_eps: f64,
    /// Aligned with [`Table::bounds`].
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub bounds: Vec<BoundName>,
    pub rows: Vec<Row>,
}

impl Table {
    /// `(n, cell)` pairs of one column.
    pub fn column(&self, bound: BoundName) -> Option<Vec<(u64, Cell)>> {
        let idx = self.bounds.iter().position(|b| *b == bound)?;
        Some(self.rows.iter().map(|r| (r.n, r.cells[idx])).collect())
    }
}

fn achievability(pair: &Pair, n: u64, rate: f64) -> Option<Bound> {
    // The Markov-threshold test at the rate-optimal order; its Type I error
    // is only known to be at most exp(-n c), so alpha = 0 is passed.
    let order = phase_transition_achievability(pair, n, rate).ok()?.optimizer?;
    let tau = threshold_for_rate(pair, n, rate, order).ok()?;
    Some(renyi_achievability_at_threshold(pair, n, tau, f64::NEG_INFINITY))
}

/// Evaluates one bound at one sample size. Phase-transition columns use the
/// effective rate `c = -log(eps) / n`.
pub fn evaluate(pair: &Pair, n: u64, log_eps: f64, bound: BoundName) -> Cell {
    let rate = -log_eps / n as f64;
    let cell = match bound {
        BoundName::RenyiConverse => Some(renyi_converse(pair, n, log_eps)),
        BoundName::Achievability => achievability(pair, n, rate),
        BoundName::PhaseConverse => phase_transition_converse(pair, n, rate).ok(),
        BoundName::PhaseAchievability => phase_transition_achievability(pair, n, rate).ok(),
        BoundName::Fano => Some(fano_bound(pair, n, log_eps)),
        BoundName::Hellinger => Some(hellinger_bound(pair, n, log_eps)),
        BoundName::BerryEsseen => Some(berry_esseen_bound(pair, n, log_eps, None)),
        BoundName::SmoothingOut => smoothing_out_bound(pair, n, log_eps, None).ok(),
        BoundName::NpExact => return exact(pair, n, log_eps),
    };
    cell.map_or(Cell::EMPTY, Cell::from)
}

fn exact(pair: &Pair, n: u64, log_eps: f64) -> Cell {
    let result = match pair.family() {
        Family::Gaussian { .. } => np_exact_gaussian(pair, n, log_eps),
        Family::Bernoulli { .. } => np_exact_bernoulli(pair, n, log_eps, true),
        Family::FiniteDiscrete { .. } => match u32::try_from(n) {
            Ok(n) => np_exact_discrete_bruteforce(pair, n, log_eps),
            Err(_) => return Cell::EMPTY,
        },
    };
    match result {
        Ok(r) => Cell { value: Some(r.beta), log_value: Some(r.log_beta), optimizer: Some(r.threshold), valid: true },
        Err(_) => Cell::EMPTY,
    }
}

/// Reads [`THREADS_VAR`]; `None` means all available cores.
pub fn thread_limit() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(ExperimentError::config(format!("{THREADS_VAR} must be a positive integer, got '{text}'"))),
        },
    }
}

/// Evaluates every selected bound at every `n`. Rows are computed in
/// parallel and returned in grid order; the output does not depend on the
/// thread count.
pub fn run_grid(grid: &ExperimentGrid) -> Result<Table> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_limit()? {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| ExperimentError::config(format!("cannot start worker threads: {e}")))?;
    let rows = pool.install(|| {
        grid.n_values
            .par_iter()
            .map(|&n| -> Result<Row> {
                let (eps, log_eps) = grid.regime.eps_at(n)?;
                let cells = grid.bounds.iter().map(|&b| evaluate(&grid.pair, n, log_eps, b)).collect();
                Ok(Row { n, eps, log_eps, cells })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(Table { bounds: grid.bounds.clone(), rows })
}
