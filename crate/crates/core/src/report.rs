//! CSV and SVG emission for sweep results.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::Method;
use crate::error::{Error, Result};
use crate::sweep::{CurvePoint, CurveTable};

pub const CSV_HEADER: &str = "sweep_var,value,method,mean_secrecy_bps_hz,stderr,trials,infeasible_count";

/// Decimal rendering with 9 significant digits; switches to exponent form
/// for very large or small magnitudes.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

/// `x` as it reads back after [`format_sig9`].
pub fn round_sig9(x: f64) -> f64 {
    format_sig9(x).parse().unwrap_or(x)
}

pub fn to_csv(table: &CurveTable) -> String {
    let mut out = String::with_capacity(64 * (table.points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &table.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            table.sweep_var,
            format_sig9(p.value),
            p.method,
            format_sig9(p.mean),
            format_sig9(p.stderr),
            p.trials,
            p.infeasible_count
        );
    }
    out
}

pub fn write_csv(table: &CurveTable, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(table)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_csv(text: &str) -> Result<CurveTable> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::Csv { line: 1, reason: "missing or wrong header".into() }),
    }
    let mut sweep_var = String::new();
    let mut points = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |reason: &str| Error::Csv { line: i + 1, reason: reason.to_string() };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(err("expected 7 fields"));
        }
        if sweep_var.is_empty() {
            sweep_var = f[0].to_string();
        } else if sweep_var != f[0] {
            return Err(err("mixed sweep variables"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
        let count = |s: &str| s.parse::<usize>().map_err(|_| err("bad count"));
        points.push(CurvePoint {
            value: num(f[1])?,
            method: f[2].parse::<Method>().map_err(|_| err("unknown method"))?,
            mean: num(f[3])?,
            stderr: num(f[4])?,
            trials: count(f[5])?,
            infeasible_count: count(f[6])?,
        });
    }
    Ok(CurveTable { sweep_var, points })
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 55.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

/// Static SVG line chart: one polyline per method with markers, error bars
/// of one standard error, axes and a legend.
pub fn render_svg(table: &CurveTable) -> Result<String> {
    let finite: Vec<&CurvePoint> = table.points.iter().filter(|p| p.mean.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::EmptyTable);
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y1: f64 = 0.0;
    for p in &finite {
        x0 = x0.min(p.value);
        x1 = x1.max(p.value);
        y1 = y1.max(p.mean + p.stderr);
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let y_step = nice_step(if y1 > 0.0 { y1 } else { 1.0 });
    let y1 = (y1 / y_step).ceil().max(1.0) * y_step;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - y / y1 * ph;

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

    let mut y = 0.0;
    while y <= y1 + 1e-9 * y_step {
        let py = sy(y);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT,
            LEFT + pw,
            LEFT - 6.0,
            py + 4.0,
            format!("{:.3}", y).trim_end_matches('0').trim_end_matches('.')
        );
        y += y_step;
    }
    let mut xs: Vec<f64> = finite.iter().map(|p| p.value).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for x in xs {
        let px = sx(x);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            format_sig9(x).trim_end_matches('0').trim_end_matches('.')
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        table.sweep_var
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">secrecy rate (bits/s/Hz)</text>"#,
        TOP + ph / 2.0
    );

    for (i, method) in table.methods().into_iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<&CurvePoint> = table.curve(method).into_iter().filter(|p| p.mean.is_finite()).collect();
        let coords: Vec<String> =
            pts.iter().map(|p| format!("{:.2},{:.2}", sx(p.value), sy(p.mean))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="curve" data-method="{method}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        for p in &pts {
            let (px, py) = (sx(p.value), sy(p.mean));
            if p.stderr > 0.0 {
                let (lo, hi) = (sy((p.mean - p.stderr).max(0.0)), sy(p.mean + p.stderr));
                let _ = writeln!(
                    s,
                    r#"<path d="M{px:.2} {lo:.2}V{hi:.2}M{:.2} {lo:.2}h8M{:.2} {hi:.2}h8" stroke="{color}"/>"#,
                    px - 4.0,
                    px - 4.0
                );
            }
            let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="{color}"/>"#);
        }
        let ly = TOP + 14.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text class="legend" x="{:.2}" y="{:.2}">{method}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_plot(table: &CurveTable, path: &Path) -> Result<()> {
    let svg = render_svg(table)?;
    std::fs::write(path, svg).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(1.0), "1.00000000");
        assert_eq!(format_sig9(1.23456789012), "1.23456789");
        assert_eq!(format_sig9(9.999999999), "10.0000000");
        assert_eq!(format_sig9(0.00123456789), "0.00123456789");
        assert_eq!(format_sig9(1.5e-9), "1.50000000e-9");
        assert_eq!(format_sig9(f64::NAN), "NaN");
        assert!(format_sig9(f64::NAN).parse::<f64>().unwrap().is_nan());
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = CurveTable { sweep_var: "d_d".into(), points: vec![] };
        assert_eq!(to_csv(&t), format!("{CSV_HEADER}\n"));
        assert!(matches!(render_svg(&t), Err(Error::EmptyTable)));
    }
}
