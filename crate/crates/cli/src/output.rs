//! CSV and SVG emission.
//!
//! CSV files have a fixed column order, one header row, and every float
//! printed with 12 significant digits in scientific notation, so reruns with
//! identical configs are byte-identical. The optional SVG plots are simple
//! polyline renderings of selected CSV columns against the first column.

use std::fmt::Write;
use std::path::Path;

use crate::CliError;

/// 12 significant digits, locale-independent; NaN and infinities spelled out.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.11e}")
    }
}

pub struct CsvTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        std::fs::write(path, out)
            .map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))
    }

    fn numeric_column(&self, idx: usize) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r[idx].parse::<f64>().unwrap_or(f64::NAN))
            .collect()
    }

    /// Line plot of the named columns against the first column.
    pub fn write_svg(&self, path: &Path, columns: &[&str]) -> Result<(), CliError> {
        const W: f64 = 860.0;
        const H: f64 = 480.0;
        const MARGIN: f64 = 60.0;
        const PALETTE: [&str; 6] = ["#b2182b", "#2166ac", "#4dac26", "#d95f02", "#7570b3", "#666666"];

        let x = self.numeric_column(0);
        if x.is_empty() {
            return Err(CliError::Other("nothing to plot".into()));
        }
        let series: Vec<(usize, Vec<f64>)> = columns
            .iter()
            .filter_map(|name| {
                self.columns
                    .iter()
                    .position(|c| c == name)
                    .map(|idx| (idx, self.numeric_column(idx)))
            })
            .collect();
        let (xmin, xmax) = bounds(&x);
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for (_, ys) in &series {
            for &v in ys {
                if v.is_finite() {
                    ymin = ymin.min(v);
                    ymax = ymax.max(v);
                }
            }
        }
        if !ymin.is_finite() || ymin == ymax {
            ymin -= 1.0;
            ymax += 1.0;
        }
        let sx = |v: f64| MARGIN + (v - xmin) / (xmax - xmin).max(1e-300) * (W - 2.0 * MARGIN);
        let sy = |v: f64| H - MARGIN - (v - ymin) / (ymax - ymin).max(1e-300) * (H - 2.0 * MARGIN);

        let mut svg = String::new();
        let _ = write!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = write!(
            svg,
            r#"<rect width="{W}" height="{H}" fill="white"/><line x1="{m}" y1="{yb}" x2="{xe}" y2="{yb}" stroke="black"/><line x1="{m}" y1="{m}" x2="{m}" y2="{yb}" stroke="black"/>"#,
            m = MARGIN,
            yb = H - MARGIN,
            xe = W - MARGIN
        );
        for (k, (idx, ys)) in series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let pts: Vec<String> = x
                .iter()
                .zip(ys)
                .filter(|(_, y)| y.is_finite())
                .map(|(&xv, &yv)| format!("{:.2},{:.2}", sx(xv), sy(yv)))
                .collect();
            let _ = write!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
            let _ = write!(
                svg,
                r#"<text x="{}" y="{}" fill="{color}" font-size="13">{}</text>"#,
                W - MARGIN + 4.0,
                MARGIN + 16.0 * k as f64,
                self.columns[*idx]
            );
        }
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" font-size="13">{}</text></svg>"#,
            W / 2.0,
            H - MARGIN / 3.0,
            self.columns[0]
        );
        std::fs::write(path, svg)
            .map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))
    }
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}
