use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypotest::{
    default_n_grid, emit_csv, emit_svg, evaluate, parse_pair, parse_regime, reproduce, run_grid, BoundName, Cell,
    ExperimentError, ExperimentGrid, Result, SvgOptions,
};
use hypotest_core::{berry_esseen_bound, sample_complexity_pensia, sample_complexity_renyi, smoothing_out_bound};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hypotest", version, about = "Finite-sample bounds on the Type II error of binary hypothesis tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate bounds over a grid of sample sizes and write CSV (and SVG).
    Sweep(SweepArgs),
    /// Evaluate a single bound at one sample size.
    Bound(BoundArgs),
    /// Lower bounds on the sample size needed for beta <= delta at alpha <= eps.
    Samplesize(SampleSizeArgs),
    /// Run a canned sweep: fig1, fig2 or appF.
    Reproduce {
        name: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// bernoulli:p0,p1 | gaussian:mu,delta[,sigma] | discrete:p,...|q,...
    #[arg(long)]
    pair: String,
    /// constant:EPS | linear | exponential:C | exponential:KD
    #[arg(long)]
    regime: String,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', conflicts_with = "n_range")]
    n: Option<Vec<u64>>,
    /// A:B:STEP for an arithmetic range, A:B:gK for K log-spaced points.
    #[arg(long)]
    n_range: Option<String>,
    /// Comma-separated bound names; defaults to every bound the pair supports.
    #[arg(long, value_delimiter = ',')]
    bounds: Option<Vec<String>>,
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    log_y: bool,
    #[arg(long)]
    title: Option<String>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    pair: String,
    #[arg(long)]
    bound: String,
    #[arg(long)]
    n: u64,
    #[arg(long, group = "budget")]
    eps: Option<f64>,
    #[arg(long, group = "budget", allow_hyphen_values = true)]
    log_eps: Option<f64>,
    /// Exponential rate: eps = exp(-n c).
    #[arg(long, group = "budget")]
    c: Option<f64>,
    /// Fixed Berry-Esseen slack or smoothing time instead of optimizing it.
    #[arg(long)]
    param: Option<f64>,
}

#[derive(Args)]
struct SampleSizeArgs {
    #[arg(long)]
    pair: String,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    delta: f64,
    /// Fixed Renyi order (> 1); optimized when omitted.
    #[arg(long)]
    lambda: Option<f64>,
}

fn parse_n_range(text: &str) -> Result<Vec<u64>> {
    let bad = || ExperimentError::config(format!("--n-range '{text}': expected A:B:STEP or A:B:gK"));
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [a, b, step] = parts[..] else { return Err(bad()) };
    let a: u64 = a.parse().map_err(|_| bad())?;
    let b: u64 = b.parse().map_err(|_| bad())?;
    if a == 0 || b < a {
        return Err(bad());
    }
    if let Some(k) = step.strip_prefix('g') {
        let k: u32 = k.parse().map_err(|_| bad())?;
        if k < 2 {
            return Err(bad());
        }
        let ratio = (b as f64 / a as f64).ln() / (k - 1) as f64;
        let mut grid: Vec<u64> = (0..k).map(|i| (a as f64 * (ratio * i as f64).exp()).round() as u64).collect();
        grid.dedup();
        Ok(grid)
    } else {
        let step: u64 = step.parse().map_err(|_| bad())?;
        if step == 0 {
            return Err(bad());
        }
        Ok((a..=b).step_by(step as usize).collect())
    }
}

fn sweep(args: SweepArgs) -> Result<()> {
    let pair = parse_pair(&args.pair)?;
    let regime = parse_regime(&args.regime, &pair)?;
    let n_values = match (args.n, args.n_range) {
        (Some(list), None) => list,
        (None, Some(range)) => parse_n_range(&range)?,
        (None, None) => default_n_grid(),
        (Some(_), Some(_)) => unreachable!("rejected by the argument parser"),
    };
    let bounds = match args.bounds {
        Some(names) => names.iter().map(|s| s.parse()).collect::<Result<Vec<BoundName>>>()?,
        None => BoundName::supported_by(&pair),
    };
    let grid = ExperimentGrid::new(&args.pair, regime, n_values, &bounds)?;
    let table = run_grid(&grid)?;
    emit_csv(&table, &args.csv)?;
    if let Some(svg) = args.svg {
        let title = args.title.unwrap_or_else(|| format!("{}, {}", args.pair, grid.regime));
        emit_svg(&table, &svg, &SvgOptions { log_y: args.log_y, title })?;
    }
    eprintln!("wrote {} rows to {}", table.rows.len(), args.csv.display());
    Ok(())
}

fn bound(args: BoundArgs) -> Result<()> {
    let pair = parse_pair(&args.pair)?;
    let name: BoundName = args.bound.parse()?;
    if args.n == 0 {
        return Err(ExperimentError::config("--n must be positive"));
    }
    let log_eps = match (args.eps, args.log_eps, args.c) {
        (Some(e), None, None) if e > 0.0 && e <= 1.0 => e.ln(),
        (None, Some(l), None) if l <= 0.0 => l,
        (None, None, Some(c)) if c > 0.0 => -(args.n as f64) * c,
        (None, None, None) => return Err(ExperimentError::config("one of --eps, --log-eps or --c is required")),
        _ => return Err(ExperimentError::config("eps must lie in (0, 1], log-eps <= 0 and c > 0")),
    };
    let cell = match (name, args.param) {
        (_, None) => {
            if name == BoundName::SmoothingOut && !pair.is_gaussian() {
                return Err(ExperimentError::config("smoothing_out is only available for Gaussian pairs"));
            }
            evaluate(&pair, args.n, log_eps, name)
        }
        (BoundName::BerryEsseen, Some(d)) => Cell::from(berry_esseen_bound(&pair, args.n, log_eps, Some(d))),
        (BoundName::SmoothingOut, Some(t)) => Cell::from(smoothing_out_bound(&pair, args.n, log_eps, Some(t))?),
        (_, Some(_)) => {
            return Err(ExperimentError::config("--param applies only to berry_esseen and smoothing_out"));
        }
    };
    let show = |x: Option<f64>| x.map_or_else(|| "none".to_string(), |v| v.to_string());
    println!(
        "{name} n={} log_eps={log_eps} value={} log_value={} optimizer={} valid={}",
        args.n,
        show(cell.value),
        show(cell.log_value),
        show(cell.optimizer),
        cell.valid
    );
    println!(
        "{}",
        json!({
            "bound": name.as_str(),
            "pair": args.pair,
            "n": args.n,
            "log_eps": log_eps,
            "value": cell.value,
            "log_value": cell.log_value.filter(|l| l.is_finite()),
            "optimizer": cell.optimizer,
            "valid": cell.valid,
        })
    );
    Ok(())
}

fn samplesize(args: SampleSizeArgs) -> Result<()> {
    let pair = parse_pair(&args.pair)?;
    let renyi = sample_complexity_renyi(&pair, args.eps, args.delta, args.lambda)?;
    let renyi_n = renyi.value.ceil();
    println!(
        "renyi n>={renyi_n} raw={} lambda={} valid={}",
        renyi.value,
        renyi.optimizer.map_or(f64::NAN, |l| l),
        renyi.valid
    );
    // The Bayesian transfer needs eps, delta < 1/2; report its absence otherwise.
    let pensia = sample_complexity_pensia(&pair, args.eps, args.delta).ok();
    match pensia {
        Some(p) => println!("pensia n>={} raw={} lambda={}", p.value.ceil(), p.value, p.optimizer.unwrap_or(f64::NAN)),
        None => println!("pensia unavailable (needs eps, delta < 0.5)"),
    }
    println!(
        "{}",
        json!({
            "pair": args.pair,
            "eps": args.eps,
            "delta": args.delta,
            "renyi": {"n": renyi_n, "raw": renyi.value, "lambda": renyi.optimizer, "valid": renyi.valid},
            "pensia": pensia.map(|p| json!({"n": p.value.ceil(), "raw": p.value, "lambda": p.optimizer})),
        })
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Bound(args) => bound(args),
        Command::Samplesize(args) => samplesize(args),
        Command::Reproduce { name, out } => {
            for path in reproduce(&name, &out)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Help and version exit 0, usage errors 2.
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_ranges() {
        assert_eq!(parse_n_range("10:50:20").unwrap(), vec![10, 30, 50]);
        assert_eq!(parse_n_range("100:10000:g3").unwrap(), vec![100, 1000, 10000]);
        for bad in ["0:10:1", "10:5:1", "1:2", "1:10:0", "1:10:g1", "a:b:c"] {
            assert!(parse_n_range(bad).is_err(), "{bad}");
        }
    }
}
