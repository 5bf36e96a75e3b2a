//! Self-contained SVG line charts of sweep results.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::report::csv::{emit_csv, fmt_sig6};
use crate::report::sweep::SweepRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Facet {
    /// One chart per `(K, alpha)`, x-axis T.
    ByT,
    /// One chart per `(T, alpha)`, x-axis K.
    ByK,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Panel<'a> {
    title: String,
    x_label: &'static str,
    stem: String,
    rows: Vec<&'a SweepRow>,
}

fn panels(rows: &[SweepRow], facet: Facet) -> Vec<Panel<'_>> {
    let mut groups: BTreeMap<(u64, u64), Vec<&SweepRow>> = BTreeMap::new();
    for row in rows {
        let fixed = match facet {
            Facet::ByT => row.arms as u64,
            Facet::ByK => row.horizon,
        };
        groups.entry((fixed, row.alpha.to_bits())).or_default().push(row);
    }
    groups
        .into_iter()
        .map(|((fixed, alpha_bits), rows)| {
            let alpha = fmt_sig6(f64::from_bits(alpha_bits));
            let (title, x_label, stem) = match facet {
                Facet::ByT => (
                    format!("K={fixed}, alpha={alpha}"),
                    "T",
                    format!("regret_byT_K{fixed}_alpha{alpha}"),
                ),
                Facet::ByK => (
                    format!("T={fixed}, alpha={alpha}"),
                    "K",
                    format!("regret_byK_T{fixed}_alpha{alpha}"),
                ),
            };
            Panel {
                title,
                x_label,
                stem,
                rows,
            }
        })
        .collect()
}

fn x_of(row: &SweepRow, facet: Facet) -> f64 {
    match facet {
        Facet::ByT => row.horizon as f64,
        Facet::ByK => row.arms as f64,
    }
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut ticks = Vec::new();
    let mut v = (lo / step).ceil() * step;
    while v <= hi + 1e-9 * span {
        ticks.push(v);
        v += step;
    }
    ticks
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn render(panel: &Panel<'_>, facet: Facet) -> String {
    let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for row in &panel.rows {
        series
            .entry(row.policy.as_str())
            .or_default()
            .push((x_of(row, facet), row.mean_regret));
    }
    for points in series.values_mut() {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let (x_lo, x_hi) = padded_range(panel.rows.iter().map(|r| x_of(r, facet)));
    let (y_lo, y_hi) = padded_range(
        panel
            .rows
            .iter()
            .map(|r| r.mean_regret)
            .chain(std::iter::once(0.0)),
    );
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let mut data = String::from("policy,x,mean_regret;");
    for (policy, points) in &series {
        for (x, y) in points {
            let _ = write!(data, " {policy},{},{};", fmt_sig6(*x), fmt_sig6(*y));
        }
    }
    let _ = writeln!(svg, "<title>{}: {}</title>", escape(&panel.title), escape(&data));
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&panel.title)
    );
    // axes
    let _ = writeln!(
        svg,
        r#"<path d="M{LEFT},{TOP} V{:.1} H{:.1}" fill="none" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w
    );
    for x in nice_ticks(x_lo, x_hi) {
        let px = sx(x);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0,
            fmt_sig6(x)
        );
    }
    for y in nice_ticks(y_lo, y_hi) {
        let py = sy(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{py:.1}" x2="{LEFT}" y2="{py:.1}" stroke="black"/><line x1="{LEFT}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT + plot_w,
            LEFT - 8.0,
            py + 4.0,
            fmt_sig6(y)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        panel.x_label
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">mean regret</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    for (i, (policy, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        for &(x, y) in points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(policy)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes one SVG chart plus a sidecar CSV per facet panel into `dir`;
/// returns the SVG paths.
pub fn emit_plot(rows: &[SweepRow], facet: Facet, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let mut written = Vec::new();
    for panel in panels(rows, facet) {
        let svg_path = dir.join(format!("{}.svg", panel.stem));
        std::fs::write(&svg_path, render(&panel, facet))
            .map_err(|e| Error::io(format!("writing {}", svg_path.display()), e))?;
        let data: Vec<SweepRow> = panel.rows.iter().map(|r| (*r).clone()).collect();
        emit_csv(&data, &dir.join(format!("{}.csv", panel.stem)))?;
        written.push(svg_path);
    }
    Ok(written)
}
