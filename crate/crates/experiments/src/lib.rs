//! Sweeps of hypothesis-testing bounds over sample sizes, with CSV and SVG
//! output. The `hypotest` binary is a thin CLI over this library.

pub mod error;
pub mod grid;
pub mod output;
pub mod presets;

pub use error::{ExperimentError, Result};
pub use grid::{
    default_n_grid, evaluate, parse_pair, parse_regime, run_grid, thread_limit, BoundName, Cell, ExperimentGrid, Row,
    Table, THREADS_VAR,
};
pub use output::{emit_csv, emit_svg, format_number, render_csv, render_svg, SvgOptions};
pub use presets::{preset_pairs, reproduce, PRESETS};
