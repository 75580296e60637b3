//! Canned sweeps behind `hypotest reproduce`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{ExperimentError, Result};
use crate::grid::{default_n_grid, parse_pair, parse_regime, run_grid, BoundName, ExperimentGrid};
use crate::output::{emit_csv, emit_svg, SvgOptions};

pub const PRESETS: [&str; 3] = ["fig1", "fig2", "appF"];

const REGIMES: [(&str, &str); 3] =
    [("constant", "constant:0.01"), ("linear", "linear"), ("exponential", "exponential:20D")];

/// Pair specifications swept by a preset.
pub fn preset_pairs(name: &str) -> Result<&'static [&'static str]> {
    match name {
        "fig1" => Ok(&["bernoulli:0.5,0.51"]),
        "fig2" => Ok(&["gaussian:2,0.05"]),
        "appF" => Ok(&["bernoulli:0.5,0.6", "bernoulli:0.5,0.7", "gaussian:2,0.1", "gaussian:2,0.3"]),
        _ => Err(ExperimentError::config(format!("unknown preset '{name}', expected one of {}", PRESETS.join(", ")))),
    }
}

/// `gaussian:2,0.1` becomes `gaussian_2_0.1`.
fn file_stem(pair_spec: &str) -> String {
    pair_spec.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' }).collect()
}

/// Runs a preset and writes one CSV and one SVG per (pair, regime) into
/// `out_dir`. Returns the written paths.
pub fn reproduce(name: &str, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let pairs = preset_pairs(name)?;
    fs::create_dir_all(out_dir).map_err(|e| ExperimentError::io(out_dir, e))?;
    let mut written = Vec::new();
    for spec in pairs {
        let pair = parse_pair(spec)?;
        for (label, regime_spec) in REGIMES {
            let regime = parse_regime(regime_spec, &pair)?;
            let grid = ExperimentGrid::new(spec, regime, default_n_grid(), &BoundName::supported_by(&pair))?;
            let table = run_grid(&grid)?;
            let stem = if pairs.len() == 1 {
                format!("{name}_{label}")
            } else {
                format!("{name}_{}_{label}", file_stem(spec))
            };
            let csv = out_dir.join(format!("{stem}.csv"));
            let svg = out_dir.join(format!("{stem}.svg"));
            emit_csv(&table, &csv)?;
            // Exponentially small errors only read well on a log axis.
            let options = SvgOptions { log_y: label == "exponential", title: format!("{spec}, {regime}") };
            emit_svg(&table, &svg, &options)?;
            written.push(csv);
            written.push(svg);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems() {
        assert_eq!(file_stem("gaussian:2,0.1"), "gaussian_2_0.1");
        assert!(preset_pairs("fig3").is_err());
        assert_eq!(preset_pairs("appF").unwrap().len(), 4);
    }
}
