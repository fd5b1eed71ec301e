//! Quick-look SVG line plots of series columns against `t`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{BenchError, Result};
use crate::output::{write_atomic, Series};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        let pad = 0.5 * lo.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// SVG text for `columns` of `series` against its `t` column.
pub fn render(series: &Series, columns: &[&str]) -> Result<String> {
    let t = series.column("t")?;
    let ys = columns.iter().map(|c| series.column(c)).collect::<Result<Vec<_>>>()?;
    if t.is_empty() {
        return Err(BenchError::EmptySeries);
    }
    let (x0, x1) = span(t.iter().copied());
    let (y0, y1) = span(ys.iter().flatten().copied());
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{b2:.2}" stroke="black"/><text x="{px:.2}" y="{ty:.2}" text-anchor="middle">{xv:.4}</text>"#,
            b = TOP + ph,
            b2 = TOP + ph + 5.0,
            ty = TOP + ph + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{l2:.2}" y1="{py:.2}" x2="{LEFT:.2}" y2="{py:.2}" stroke="black"/><text x="{tx:.2}" y="{ty:.2}" text-anchor="end">{yv:.4e}</text>"#,
            l2 = LEFT - 5.0,
            tx = LEFT - 8.0,
            ty = py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    for (k, (name, y)) in columns.iter().zip(&ys).enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut pts = String::new();
        for (x, v) in t.iter().zip(y) {
            if x.is_finite() && v.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", sx(*x), sy(*v));
            }
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            pts.trim_end()
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{name}</text>"#,
            LEFT + 10.0 + 90.0 * k as f64,
            TOP - 10.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(series: &Path, columns: &[&str], out: &Path) -> Result<()> {
    let svg = render(&Series::read(series)?, columns)?;
    write_atomic(out, |w| w.write_all(svg.as_bytes()))
}
