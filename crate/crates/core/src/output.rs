//! CSV result rows and SVG line plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub const CSV_HEADER: [&str; 9] =
    ["snr_db", "scheme", "scenario", "metric", "user_role", "value", "stderr", "n_events", "unreliable"];

/// One point of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub snr_db: f64,
    pub scheme: String,
    pub scenario: String,
    pub metric: String,
    pub user_role: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub n_events: Option<u64>,
    pub unreliable: bool,
}

impl CurveRow {
    pub fn analytic(snr_db: f64, scheme: &str, scenario: &str, metric: &str, role: &str, value: f64) -> Self {
        CurveRow {
            snr_db,
            scheme: scheme.into(),
            scenario: scenario.into(),
            metric: metric.into(),
            user_role: role.into(),
            value,
            stderr: None,
            n_events: None,
            unreliable: false,
        }
    }
}

/// Formats `x` with 12 significant digits, fixed-point where that stays short.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let s = format!("{:.*}", (11 - exp).max(0) as usize, x);
        // rounding can carry into a new digit; re-check via scientific form
        let sci: f64 = format!("{x:.11e}").parse().unwrap_or(x);
        let fixed: f64 = s.parse().unwrap_or(x);
        if fixed != sci {
            return format!("{x:.11e}");
        }
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

pub fn write_csv(out: impl Write, rows: &[CurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            format_sig(r.snr_db),
            r.scheme.clone(),
            r.scenario.clone(),
            r.metric.clone(),
            r.user_role.clone(),
            format_sig(r.value),
            r.stderr.map(format_sig).unwrap_or_default(),
            r.n_events.map(|n| n.to_string()).unwrap_or_default(),
            r.unreliable.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, rows: &[CurveRow]) -> Result<()> {
    write_csv(std::fs::File::create(path)?, rows)
}

/// Parses rows written by [`write_csv`].
pub fn read_csv(input: impl std::io::Read) -> Result<Vec<CurveRow>> {
    let mut r = csv::Reader::from_reader(input);
    let bad = |what: &str| crate::Error::Domain(format!("malformed {what} in result CSV"));
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(CSV_HEADER[i]));
        rows.push(CurveRow {
            snr_db: num(0)?,
            scheme: rec[1].to_string(),
            scenario: rec[2].to_string(),
            metric: rec[3].to_string(),
            user_role: rec[4].to_string(),
            value: num(5)?,
            stderr: if rec[6].is_empty() { None } else { Some(num(6)?) },
            n_events: if rec[7].is_empty() { None } else { Some(rec[7].parse().map_err(|_| bad("n_events"))?) },
            unreliable: rec[8].parse().map_err(|_| bad("unreliable"))?,
        });
    }
    Ok(rows)
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Renders every series of `rows` (grouped by scheme and role) as a line
/// plot. Non-positive values are skipped on a logarithmic axis.
pub fn render_svg(title: &str, rows: &[CurveRow], log_y: bool) -> String {
    let (w, h, ml, mr, mt, mb) = (720.0, 460.0, 70.0, 190.0, 40.0, 50.0);
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        if log_y && r.value <= 0.0 {
            continue;
        }
        let y = if log_y { r.value.log10() } else { r.value };
        series.entry(format!("{} {}", r.scheme, r.user_role)).or_default().push((r.snr_db, y));
    }
    let pts = series.values().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if log_y {
        y0 = y0.floor();
        y1 = y1.ceil();
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, (ml + w - mr) / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{ml},{mt} V{} H{}" fill="none" stroke="black"/>"#,
        h - mb,
        w - mr
    );
    for k in 0..=5 {
        let x = x0 + (x1 - x0) * k as f64 / 5.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, px(x), h - mb + 18.0, format_tick(x));
        let y = y0 + (y1 - y0) * k as f64 / 5.0;
        let label = if log_y { format!("1e{}", format_tick(y)) } else { format_tick(y) };
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{label}</text>"#, ml - 6.0, py(y) + 4.0);
        let _ = writeln!(s, r##"<path d="M{ml},{:.1} H{}" stroke="#ddd"/>"##, py(y), w - mr);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">SNR per bit (dB)</text>"#, (ml + w - mr) / 2.0, h - 12.0);
    for (n, (name, pts)) in series.iter().enumerate() {
        let colour = PALETTE[n % PALETTE.len()];
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(k, &(x, y))| format!("{}{:.1},{:.1}", if k == 0 { 'M' } else { 'L' }, px(x), py(y)))
            .collect();
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.8"/>"#, d.join(" "));
        let ly = mt + 18.0 * n as f64;
        let _ = writeln!(s, r#"<path d="M{},{ly} h22" stroke="{colour}" stroke-width="2"/>"#, w - mr + 12.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, w - mr + 40.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(x: f64) -> String {
    let r = (x * 100.0).round() / 100.0;
    if r == r.trunc() { format!("{}", r as i64) } else { format!("{r}") }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
