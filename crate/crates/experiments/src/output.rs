//! CSV tables and self-contained SVG line plots of sweep results.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{ExperimentError, Result};
use crate::grid::{BoundName, Table};

/// Scientific notation with 17 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn header(table: &Table) -> Vec<String> {
    let mut cols = vec!["n".to_string(), "eps".into(), "log_eps".into()];
    for b in &table.bounds {
        cols.push(b.as_str().to_string());
        cols.push(format!("{b}_optimizer"));
        cols.push(format!("{b}_valid"));
    }
    cols
}

/// Renders the table as CSV. Cells that do not apply have empty value and
/// optimizer fields.
pub fn render_csv(table: &Table) -> Result<Vec<u8>> {
    if table.rows.is_empty() {
        return Err(ExperimentError::config("cannot write an empty table"));
    }
    let mut out = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| ExperimentError::config(format!("csv encoding failed: {e}"));
    out.write_record(header(table)).map_err(fail)?;
    for row in &table.rows {
        let mut record = vec![row.n.to_string(), format_number(row.eps), format_number(row.log_eps)];
        for cell in &row.cells {
            record.push(cell.value.map(format_number).unwrap_or_default());
            record.push(cell.optimizer.map(format_number).unwrap_or_default());
            record.push(cell.valid.to_string());
        }
        out.write_record(&record).map_err(fail)?;
    }
    out.into_inner().map_err(|e| ExperimentError::config(format!("csv encoding failed: {e}")))
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    let bytes = render_csv(table)?;
    fs::write(path, bytes).map_err(|e| ExperimentError::io(path, e))
}

#[derive(Debug, Clone, Default)]
pub struct SvgOptions {
    pub log_y: bool,
    pub title: String,
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 210.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn color(bound: BoundName) -> &'static str {
    match bound {
        BoundName::RenyiConverse => "#d62728",
        BoundName::Achievability => "#9467bd",
        BoundName::PhaseConverse => "#ff7f0e",
        BoundName::PhaseAchievability => "#8c564b",
        BoundName::Fano => "#1f77b4",
        BoundName::Hellinger => "#2ca02c",
        BoundName::BerryEsseen => "#17becf",
        BoundName::SmoothingOut => "#bcbd22",
        BoundName::NpExact => "#000000",
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One curve: its segments in data coordinates (`x = n`, `y` = value or
/// log10 value), broken wherever a cell is unusable.
struct Curve {
    bound: BoundName,
    segments: Vec<Vec<(f64, f64)>>,
    dropped_zero: bool,
}

fn curves(table: &Table, log_y: bool) -> Vec<Curve> {
    table
        .bounds
        .iter()
        .enumerate()
        .map(|(idx, &bound)| {
            let mut segments = vec![Vec::new()];
            let mut dropped_zero = false;
            for row in &table.rows {
                let cell = row.cells[idx];
                let y = match (cell.valid_value(), log_y) {
                    (Some(v), false) => Some(v),
                    (Some(_), true) => match cell.log_value.filter(|l| l.is_finite()) {
                        Some(l) => Some(l / std::f64::consts::LN_10),
                        None => {
                            dropped_zero = true;
                            None
                        }
                    },
                    (None, _) => None,
                };
                match y.filter(|y| y.is_finite()) {
                    Some(y) => segments.last_mut().expect("non-empty").push((row.n as f64, y)),
                    None => {
                        if !segments.last().expect("non-empty").is_empty() {
                            segments.push(Vec::new());
                        }
                    }
                }
            }
            segments.retain(|s| !s.is_empty());
            Curve { bound, segments, dropped_zero }
        })
        .collect()
}

/// Renders a line plot with one path per bound and a legend.
pub fn render_svg(table: &Table, options: &SvgOptions) -> Result<String> {
    if table.rows.len() < 2 {
        return Err(ExperimentError::config("a plot needs at least two rows"));
    }
    let curves = curves(table, options.log_y);
    let x_lo = table.rows[0].n as f64;
    let x_hi = table.rows[table.rows.len() - 1].n as f64;
    let (y_lo, y_hi) = if options.log_y {
        let lowest = curves.iter().flat_map(|c| c.segments.iter().flatten().map(|p| p.1)).fold(0.0_f64, f64::min);
        (lowest.floor().min(-1.0), 0.0)
    } else {
        (0.0, 1.0)
    };
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| TOP + (y_hi - y.clamp(y_lo, y_hi)) / (y_hi - y_lo) * (HEIGHT - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(&options.title)
    );

    // Axes and ticks.
    let (x0, x1, y0, y1) = (px(x_lo), px(x_hi), py(y_lo), py(y_hi));
    let _ = writeln!(
        s,
        r##"<path d="M {x0:.2} {y1:.2} L {x0:.2} {y0:.2} L {x1:.2} {y0:.2}" fill="none" stroke="#333" stroke-width="1"/>"##
    );
    for i in 0..=5 {
        let x = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            px(x),
            y0 + 16.0,
            x.round()
        );
    }
    let y_ticks: Vec<f64> = if options.log_y {
        let span = (y_hi - y_lo).max(1.0);
        let step = (span / 8.0).ceil();
        (0..).map(|k| y_hi - step * k as f64).take_while(|y| *y >= y_lo).collect()
    } else {
        (0..=5).map(|k| k as f64 / 5.0).collect()
    };
    for y in y_ticks {
        let label = if options.log_y { format!("1e{}", y as i64) } else { format!("{y:.1}") };
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{x0:.2}" y2="{:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"##,
            x0 - 4.0,
            py(y),
            py(y),
            x0 - 6.0,
            py(y) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">n</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );

    // Curves and legend.
    for (legend_row, curve) in curves.iter().enumerate() {
        let ly = TOP + 10.0 + 18.0 * legend_row as f64;
        let lx = WIDTH - RIGHT + 16.0;
        let name = curve.bound.as_str();
        if curve.segments.is_empty() {
            let _ = writeln!(
                s,
                r##"<text x="{lx:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="#777" data-legend="{name}">{name} (no valid points)</text>"##,
                ly + 4.0
            );
            continue;
        }
        let mut d = String::new();
        for segment in &curve.segments {
            for (i, (x, y)) in segment.iter().enumerate() {
                let _ = write!(d, "{}{:.2} {:.2} ", if i == 0 { "M " } else { "L " }, px(*x), py(*y));
            }
        }
        let _ = writeln!(
            s,
            r#"<path data-bound="{name}" d="{}" fill="none" stroke="{}" stroke-width="1.6"/>"#,
            d.trim_end(),
            color(curve.bound)
        );
        let note = if curve.dropped_zero { " (zeros dropped)" } else { "" };
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" data-legend="{name}">{name}{note}</text>"#,
            lx + 22.0,
            color(curve.bound),
            lx + 28.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(table: &Table, path: &Path, options: &SvgOptions) -> Result<()> {
    let text = render_svg(table, options)?;
    fs::write(path, text).map_err(|e| ExperimentError::io(path, e))
}
