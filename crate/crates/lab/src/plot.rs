//! Static SVG figures: λ-sweep panels per (α, β) pair and the phase diagram.
//!
//! The output is hand-written SVG 1.1; every element a reader might want to
//! locate carries a class (`panel-a`, `curve`, `bound`, `bic-marker`,
//! `warning`, `phase-cell`).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};
use crate::output::{ensure_dir, write_file};
use crate::runner::{PairBounds, RecordMethod, ReplicationRecord, SummaryRow};

/// Offset inside the logarithm of the λ axis, so that λ = 0 is plottable.
pub const LAMBDA_OFFSET: f64 = 1e-5;

const PANEL_W: f64 = 380.0;
const PANEL_H: f64 = 330.0;
const HEADER_H: f64 = 36.0;
const LEFT: f64 = 58.0;
const RIGHT: f64 = 18.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 48.0;

pub fn lambda_axis(lambda: f64) -> f64 {
    (lambda + LAMBDA_OFFSET).log10()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x0: f64,
    x_min: f64,
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.x0 + LEFT + (x - self.x_min) / (self.x_max - self.x_min) * (PANEL_W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEADER_H + TOP + (1.0 - y / self.y_max) * (PANEL_H - TOP - BOTTOM)
    }
}

struct Panel {
    class: &'static str,
    title: &'static str,
    y_label: &'static str,
    y_max: f64,
    y_ticks: [f64; 4],
    value: fn(&ReplicationRecord) -> f64,
}

const PANELS: [Panel; 3] = [
    Panel {
        class: "panel-a",
        title: "(A) angle to u1",
        y_label: "angle (degrees)",
        y_max: 90.0,
        y_ticks: [0.0, 30.0, 60.0, 90.0],
        value: |r| r.angle_deg,
    },
    Panel {
        class: "panel-b",
        title: "(B) Type I error",
        y_label: "Type I",
        y_max: 1.0,
        y_ticks: [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
        value: |r| r.type1,
    },
    Panel {
        class: "panel-c",
        title: "(C) Type II error",
        y_label: "Type II",
        y_max: 1.0,
        y_ticks: [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
        value: |r| r.type2,
    },
];

/// Three-panel λ-sweep figure for one pair and one penalized method.
///
/// `records` may hold anything; only the swept rows of `method` for the pair
/// in `bounds`, and their BIC-selected rows, are drawn.
pub fn render_sweep_svg(
    records: &[ReplicationRecord],
    method: RecordMethod,
    bounds: &PairBounds,
    d: usize,
) -> Result<String> {
    let (alpha, beta) = (bounds.alpha, bounds.beta);
    let of_pair = |r: &&ReplicationRecord| r.alpha == alpha && r.beta == beta;
    let swept: Vec<&ReplicationRecord> = records.iter().filter(of_pair).filter(|r| r.method == method).collect();
    if swept.is_empty() {
        return Err(LabError::Domain(format!(
            "no λ sweep for method {} at (α, β) = ({alpha}, {beta})",
            method.as_str()
        )));
    }
    let markers: Vec<&ReplicationRecord> = match method.bic_variant() {
        Some(m) => records.iter().filter(of_pair).filter(|r| r.method == m).collect(),
        None => Vec::new(),
    };
    let mut curves: BTreeMap<usize, Vec<&ReplicationRecord>> = BTreeMap::new();
    for r in &swept {
        curves.entry(r.rep).or_default().push(r);
    }

    let drawn_bounds = bounds.bounds.filter(|b| !b.is_empty());
    let mut xs: Vec<f64> = swept.iter().chain(&markers).map(|r| lambda_axis(r.lambda)).collect();
    if let Some(b) = drawn_bounds {
        xs.extend([lambda_axis(b.lower), lambda_axis(b.upper)]);
    }
    let mut x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if x_max - x_min < 1e-9 {
        x_min -= 0.5;
        x_max += 0.5;
    }

    let width = 3.0 * PANEL_W;
    let height = HEADER_H + PANEL_H;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="10" y="16" font-size="13">{} sweep, α = {alpha}, β = {beta}, d = {d}, {} replications</text>"#,
        method.as_str(),
        curves.len()
    );
    match (bounds.bounds, drawn_bounds) {
        (_, Some(_)) => {}
        (Some(b), None) => {
            let _ = writeln!(
                s,
                r##"<text class="warning" x="10" y="30" fill="#b2182b">warning: theorem λ range is empty at d = {d} (lower {:.3} &gt; upper {:.3}); bound lines omitted</text>"##,
                b.lower, b.upper
            );
        }
        (None, None) => {
            let _ = writeln!(
                s,
                r##"<text class="warning" x="10" y="30" fill="#b2182b">warning: no admissible γ for this pair (α − η ≤ θ); bound lines omitted</text>"##
            );
        }
    }

    for (i, panel) in PANELS.iter().enumerate() {
        let f = Frame {
            x0: i as f64 * PANEL_W,
            x_min,
            x_max,
            y_max: panel.y_max,
        };
        let _ = writeln!(s, r#"<g class="panel {}">"#, panel.class);
        let (left, right) = (f.px(x_min), f.px(x_max));
        let (top, bottom) = (f.py(panel.y_max), f.py(0.0));
        let _ = writeln!(
            s,
            r##"<rect class="frame" x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
            right - left,
            bottom - top
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#, left, top - 8.0, panel.title);
        for &t in &panel.y_ticks {
            let label = if panel.y_max > 1.0 { format!("{t:.0}") } else { format!("{t:.2}") };
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
                left - 4.0,
                f.py(t) + 4.0
            );
        }
        let first_tick = x_min.ceil() as i64;
        let last_tick = x_max.floor() as i64;
        for t in first_tick..=last_tick {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
                f.px(t as f64),
                bottom + 14.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">log10(λ + 1e-5)</text>"#,
            0.5 * (left + right),
            bottom + 32.0
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate({:.2},{:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            f.x0 + 14.0,
            0.5 * (top + bottom),
            panel.y_label
        );
        for rows in curves.values() {
            let points: Vec<String> = rows
                .iter()
                .map(|r| format!("{:.2},{:.2}", f.px(lambda_axis(r.lambda)), f.py((panel.value)(r))))
                .collect();
            let _ = writeln!(
                s,
                r##"<polyline class="curve" points="{}" fill="none" stroke="#4c72b0" stroke-opacity="0.4"/>"##,
                points.join(" ")
            );
        }
        if let Some(b) = drawn_bounds {
            for (class, lambda, dash) in [("bound lower", b.lower, r#" stroke-dasharray="6 4""#), ("bound upper", b.upper, "")] {
                let x = f.px(lambda_axis(lambda));
                let _ = writeln!(
                    s,
                    r#"<line class="{class}" x1="{x:.2}" y1="{top:.2}" x2="{x:.2}" y2="{bottom:.2}" stroke="black"{dash}/>"#
                );
            }
        }
        for r in &markers {
            let _ = writeln!(
                s,
                r##"<circle class="bic-marker" cx="{:.2}" cy="{:.2}" r="3" fill="none" stroke="#1f3fbf"/>"##,
                f.px(lambda_axis(r.lambda)),
                f.py((panel.value)(r))
            );
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes one sweep figure per pair and swept penalized method.
///
/// Fails with a domain error when `records` contain no λ sweep.
pub fn emit_plots(records: &[ReplicationRecord], bounds: &[PairBounds], d: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut jobs = Vec::new();
    for b in bounds {
        for method in [RecordMethod::St, RecordMethod::Rspca] {
            if records
                .iter()
                .any(|r| r.method == method && r.alpha == b.alpha && r.beta == b.beta)
            {
                jobs.push((b, method));
            }
        }
    }
    if jobs.is_empty() {
        return Err(LabError::Domain(
            "records contain no λ sweep (need swept st or rspca rows)".into(),
        ));
    }
    ensure_dir(dir)?;
    let mut paths = Vec::with_capacity(jobs.len());
    for (b, method) in jobs {
        let svg = render_sweep_svg(records, method, b, d)?;
        let name = format!("sweep_a{}_b{}_{}.svg", b.alpha, b.beta, method.as_str());
        paths.push(write_file(dir.join(name), &svg)?);
    }
    Ok(paths)
}

fn angle_colour(angle: f64) -> String {
    let t = (angle / 90.0).clamp(0.0, 1.0);
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(33.0, 178.0), mix(102.0, 24.0), mix(172.0, 43.0))
}

/// Grid of (α, β) cells coloured by median BIC-selected angle.
///
/// Uses `rspca_bic` summaries when present, otherwise `st_bic`.
pub fn render_phase_svg(summary: &[SummaryRow], d: usize) -> Result<String> {
    let method = [RecordMethod::RspcaBic, RecordMethod::StBic]
        .into_iter()
        .find(|m| summary.iter().any(|s| s.method == *m))
        .ok_or_else(|| LabError::Domain("phase diagram needs BIC-selected summaries".into()))?;
    let rows: Vec<&SummaryRow> = summary.iter().filter(|s| s.method == method).collect();
    let mut alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    let mut betas: Vec<f64> = rows.iter().map(|r| r.beta).collect();
    for v in [&mut alphas, &mut betas] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }

    let (left, top, cell) = (70.0, 50.0, 64.0);
    let plot_w = cell * alphas.len() as f64;
    let plot_h = cell * betas.len() as f64;
    let (width, height) = (left + plot_w + 150.0, top + plot_h + 60.0);
    let col = |a: f64| alphas.iter().position(|&x| x == a).unwrap_or(0) as f64;
    let row = |b: f64| (betas.len() - 1 - betas.iter().position(|&x| x == b).unwrap_or(0)) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="10" y="20" font-size="13">median {} angle (degrees), d = {d}</text>"#,
        escape(method.as_str())
    );
    for r in &rows {
        let (x, y) = (left + col(r.alpha) * cell, top + row(r.beta) * cell);
        let _ = writeln!(
            s,
            r#"<rect class="phase-cell" x="{x:.2}" y="{y:.2}" width="{cell}" height="{cell}" fill="{}" stroke="white"><title>α={} β={} median angle {}</title></rect>"#,
            angle_colour(r.angle.median),
            r.alpha,
            r.beta,
            r.angle.median
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="white">{:.1}</text>"#,
            x + cell / 2.0,
            y + cell / 2.0 + 4.0,
            r.angle.median
        );
    }
    for (i, a) in alphas.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{a}</text>"#,
            left + (i as f64 + 0.5) * cell,
            top + plot_h + 16.0
        );
    }
    for b in &betas {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{b}</text>"#,
            left - 6.0,
            top + (row(*b) + 0.5) * cell + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">α (spike index)</text>"#,
        left + plot_w / 2.0,
        top + plot_h + 36.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18,{:.2}) rotate(-90)" text-anchor="middle">β (sparsity index)</text>"#,
        top + plot_h / 2.0
    );
    for (i, label) in [(0, "0"), (1, "45"), (2, "90")] {
        let y = top + i as f64 * 24.0;
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{y:.2}" width="18" height="18" fill="{}"/><text x="{:.2}" y="{:.2}">{label}°</text>"#,
            left + plot_w + 20.0,
            angle_colour(45.0 * i as f64),
            left + plot_w + 44.0,
            y + 13.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_phase_diagram(summary: &[SummaryRow], d: usize, dir: &Path) -> Result<PathBuf> {
    let svg = render_phase_svg(summary, d)?;
    ensure_dir(dir)?;
    write_file(dir.join("phase.svg"), &svg)
}
