//! Calibration curve output: CSV rows and a small SVG line chart.

use std::fmt::Write as _;

use crate::calibrate::SearchResult;

pub const CURVE_COLUMNS: [&str; 3] = ["w", "mean_sim", "impacted"];

/// One row per evaluated weight, ascending.
pub fn curve_csv(result: &SearchResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CURVE_COLUMNS).expect("in-memory write");
    for p in &result.curve {
        w.write_record([p.w.to_string(), p.mean_sim.value().to_string(), p.impacted.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

/// Mean similarity against weight, with a red vertical line at the best weight.
pub fn curve_svg(result: &SearchResult) -> String {
    let max_w = result.curve.iter().map(|p| p.w).fold(1.0_f64, f64::max);
    let (mut lo, mut hi) = result
        .curve
        .iter()
        .map(|p| p.mean_sim.value())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), s| (l.min(s), h.max(s)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.1).max(0.005);
    lo = (lo - pad).max(0.0);
    hi = (hi + pad).min(1.0);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |w: f64| LEFT + w / max_w * plot_w;
    let y = |s: f64| TOP + (hi - s) / (hi - lo) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        result.kind.label()
    );
    // axes
    let _ = writeln!(
        out,
        r#"<path d="M{LEFT:.1},{TOP:.1} V{:.1} H{:.1}" fill="none" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (wx, sy) = (f * max_w, lo + f * (hi - lo));
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            x(wx),
            TOP + plot_h + 18.0,
            fmt_tick(wx)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.1}%</text>"#,
            LEFT - 6.0,
            y(sy) + 4.0,
            sy * 100.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">weight</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">mean similarity</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let points: Vec<String> = result
        .curve
        .iter()
        .map(|p| format!("{:.2},{:.2}", x(p.w), y(p.mean_sim.value())))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        points.join(" ")
    );
    let bx = x(result.best_w);
    let _ = writeln!(
        out,
        r#"<line x1="{bx:.2}" y1="{TOP:.1}" x2="{bx:.2}" y2="{:.1}" stroke="red" stroke-width="1.5"/>"#,
        TOP + plot_h
    );
    out.push_str("</svg>\n");
    out
}

fn fmt_tick(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.1}")
    }
}
