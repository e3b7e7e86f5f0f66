//! Phase-diagram heatmap as plain SVG rectangles.

use std::fmt::Write as _;

use crate::scan::PhaseDiagram;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 20.0;
const PLOT_W: f64 = 460.0;
const PLOT_H: f64 = 400.0;

/// Position of `ipr` on a log scale from `1/L` (0) to 1 (1).
fn log_position(ipr: f64, size: usize) -> f64 {
    let lo = (1.0 / size as f64).ln();
    ((ipr.ln() - lo) / -lo).clamp(0.0, 1.0)
}

/// Dark blue (extended) through teal to yellow (localized).
fn color(t: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 3] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.5, [33.0, 145.0, 140.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let (a, b) = if t <= 0.5 { (STOPS[0], STOPS[1]) } else { (STOPS[1], STOPS[2]) };
    let u = (t - a.0) / (b.0 - a.0);
    let c: Vec<u8> = (0..3).map(|i| (a.1[i] + u * (b.1[i] - a.1[i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

pub fn render(pd: &PhaseDiagram, timestamp: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, "<metadata>generated {timestamp}</metadata>");
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let n_cols = pd.v0_grid.len().max(1);
    let (e_min, e_max) = pd.records.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.energy), hi.max(r.energy))
    });
    let span = if e_max > e_min { e_max - e_min } else { 1.0 };
    let col_w = PLOT_W / n_cols as f64;
    let y_of = |e: f64| TOP + PLOT_H * (1.0 - (e - e_min) / span);

    for col in 0..n_cols {
        let cells: Vec<_> = pd.column(col).collect();
        for (k, r) in cells.iter().enumerate() {
            // Each state covers the energy span up to the next state.
            let next = cells.get(k + 1).map_or(r.energy + span / 200.0, |n| n.energy);
            let y_top = y_of(next);
            let h = (y_of(r.energy) - y_top).max(0.5);
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                LEFT + col as f64 * col_w,
                y_top,
                col_w,
                h,
                color(log_position(r.ipr, pd.size))
            );
        }
    }

    // Axes.
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#
    );
    let v0_first = pd.v0_grid.first().copied().unwrap_or(0.0);
    let v0_last = pd.v0_grid.last().copied().unwrap_or(0.0);
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="{}" font-size="12">{v0_first}</text>"#,
        TOP + PLOT_H + 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{v0_last}</text>"#,
        LEFT + PLOT_W,
        TOP + PLOT_H + 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">V0</text>"#,
        LEFT + PLOT_W / 2.0,
        TOP + PLOT_H + 34.0
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{:.3}</text>"#, LEFT - 4.0, TOP + PLOT_H, e_min);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{:.3}</text>"#, LEFT - 4.0, TOP + 10.0, e_max);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-size="13" transform="rotate(-90 16 {})">E</text>"#,
        TOP + PLOT_H / 2.0,
        TOP + PLOT_H / 2.0
    );

    // Legend: log IPR from 1/L to 1.
    let lx = LEFT + PLOT_W + 30.0;
    let steps = 50;
    for i in 0..steps {
        let t = i as f64 / (steps - 1) as f64;
        let y = TOP + PLOT_H * (1.0 - (i + 1) as f64 / steps as f64);
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{y:.2}" width="20" height="{:.2}" fill="{}"/>"#,
            PLOT_H / steps as f64 + 0.5,
            color(t)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">1</text>"#, lx + 24.0, TOP + 10.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">1/{}</text>"#, lx + 24.0, TOP + PLOT_H, pd.size);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12">IPR (log)</text>"#,
        lx - 6.0,
        TOP + PLOT_H + 16.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::{EnergyWindow, ModelTag, PhaseRecord};

    #[test]
    fn color_map_is_monotone_in_brightness() {
        let lum = |t: f64| {
            let c = color(t);
            let v: Vec<f64> = (0..3)
                .map(|i| u8::from_str_radix(&c[1 + 2 * i..3 + 2 * i], 16).unwrap() as f64)
                .collect();
            0.2126 * v[0] + 0.7152 * v[1] + 0.0722 * v[2]
        };
        let mut prev = -1.0;
        for i in 0..=20 {
            let l = lum(i as f64 / 20.0);
            assert!(l > prev);
            prev = l;
        }
        assert_eq!(log_position(1.0, 100), 1.0);
        assert_eq!(log_position(0.01, 100), 0.0);
    }

    #[test]
    fn one_rect_per_record() {
        let pd = PhaseDiagram {
            model_tag: ModelTag::Effective,
            theta: 0.0,
            size: 10,
            window: EnergyWindow::default(),
            v0_grid: vec![0.0, 1.0],
            records: vec![
                PhaseRecord { v0_index: 0, energy: -1.0, ipr: 0.1 },
                PhaseRecord { v0_index: 0, energy: -0.5, ipr: 0.2 },
                PhaseRecord { v0_index: 1, energy: -1.2, ipr: 0.9 },
            ],
        };
        let svg = render(&pd, "t");
        // Background, 3 cells, frame, 50 legend swatches.
        assert_eq!(svg.matches("<rect").count(), 1 + 3 + 1 + 50);
        assert!(svg.contains("<metadata>generated t</metadata>"));
    }
}
