use std::fmt::Write as _;

use srcnoise_core::keyrate::SweepRow;
use srcnoise_core::{ModelKind, Reconciliation};

use crate::format::fmt_g;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;

fn style(kind: ModelKind) -> (&'static str, &'static str) {
    match kind {
        ModelKind::NeutralParty => ("#1f4e9c", ""),
        ModelKind::BeamSplitter => ("#c0392b", " stroke-dasharray=\"10 6\""),
        ModelKind::UntrustedSource => ("#2e7d32", " stroke-dasharray=\"2 4\""),
    }
}

fn coord(x: f64) -> String {
    format!("{x:.2}")
}

/// Key rate against transmittance, one polyline per model. Infeasible points
/// break the line.
pub fn render(rows: &[SweepRow], recon: Reconciliation, t_range: (f64, f64), clamp_zero: bool) -> String {
    let value = |row: &SweepRow| {
        row.outcome.as_ref().ok().map(|p| if clamp_zero { p.key_rate.max(0.0) } else { p.key_rate })
    };
    let (mut y_lo, mut y_hi) = (0.0_f64, 0.0_f64);
    for y in rows.iter().filter_map(value) {
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if y_hi - y_lo < 1e-12 {
        y_hi = y_lo + 1.0;
    }
    let (x_lo, x_hi) = if t_range.1 > t_range.0 { t_range } else { (t_range.0 - 0.5, t_range.0 + 0.5) };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |t: f64| LEFT + (t - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |k: f64| TOP + (y_hi - k) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="600" viewBox="0 0 800 600">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        coord(LEFT),
        coord(TOP),
        coord(plot_w),
        coord(plot_h)
    );

    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let t = x_lo + f * (x_hi - x_lo);
        let k = y_lo + f * (y_hi - y_lo);
        let (x, y) = (px(t), py(k));
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/><text x="{0}" y="{3}" font-size="12" text-anchor="middle">{4}</text>"#,
            coord(x),
            coord(TOP + plot_h),
            coord(TOP + plot_h + 5.0),
            coord(TOP + plot_h + 20.0),
            fmt_g(t, 3)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/><text x="{3}" y="{4}" font-size="12" text-anchor="end">{5}</text>"#,
            coord(LEFT - 5.0),
            coord(y),
            coord(LEFT),
            coord(LEFT - 8.0),
            coord(y + 4.0),
            fmt_g(k, 3)
        );
    }
    if y_lo < 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#888" stroke-width="0.5"/>"##,
            coord(LEFT),
            coord(py(0.0)),
            coord(LEFT + plot_w)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">Transmittance T</text>"#,
        coord(LEFT + plot_w / 2.0),
        coord(HEIGHT - 20.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {0})">Key rate (bits per pulse, {1} reconciliation)</text>"#,
        coord(TOP + plot_h / 2.0),
        recon.name()
    );

    let mut models: Vec<ModelKind> = rows.iter().map(|r| r.model).collect();
    models.dedup();
    for (n, kind) in models.iter().enumerate() {
        let (colour, dash) = style(*kind);
        let mut segment: Vec<String> = Vec::new();
        let flush = |segment: &mut Vec<String>, s: &mut String| {
            if segment.len() > 1 {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{colour}" stroke-width="2"{dash} points="{}"/>"#,
                    segment.join(" ")
                );
            }
            segment.clear();
        };
        for row in rows.iter().filter(|r| r.model == *kind) {
            match value(row) {
                Some(k) => segment.push(format!("{},{}", coord(px(row.t)), coord(py(k)))),
                None => flush(&mut segment, &mut s),
            }
        }
        flush(&mut segment, &mut s);

        let ly = TOP + 20.0 + 20.0 * n as f64;
        let lx = LEFT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{colour}" stroke-width="2"{dash}/><text x="{3}" y="{4}" font-size="12">{5}</text>"#,
            coord(lx),
            coord(ly),
            coord(lx + 40.0),
            coord(lx + 48.0),
            coord(ly + 4.0),
            kind.name()
        );
    }
    s.push_str("</svg>\n");
    s
}
