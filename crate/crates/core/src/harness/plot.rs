//! Static SVG of the need and feedback traces: five stacked panels sharing
//! one tick axis.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::metrics::MetricsRow;

pub const WIDTH: f64 = 640.0;
pub const LEFT: f64 = 100.0;
pub const RIGHT: f64 = 20.0;
pub const TOP: f64 = 20.0;
pub const BOTTOM: f64 = 30.0;
pub const PANEL_HEIGHT: f64 = 80.0;
pub const PANEL_GAP: f64 = 20.0;

type Series = (&'static str, f64, f64, fn(&MetricsRow) -> f64);

/// (label, lower bound, upper bound, accessor) per panel, top to bottom.
pub const SERIES: [Series; 5] = [
    ("Happy", 0.0, 1.0, |r| r.happy),
    ("Sad", 0.0, 1.0, |r| r.sad),
    ("Novelty", 0.0, 1.0, |r| r.novelty),
    ("Expectedness", 0.0, 1.0, |r| r.expectedness),
    ("Feedback", -1.0, 1.0, |r| r.feedback),
];

pub fn height() -> f64 {
    let n = SERIES.len() as f64;
    TOP + n * PANEL_HEIGHT + (n - 1.0) * PANEL_GAP + BOTTOM
}

pub fn panel_top(i: usize) -> f64 {
    TOP + i as f64 * (PANEL_HEIGHT + PANEL_GAP)
}

/// Horizontal position of `tick` when the axis spans `[first, last]`.
pub fn x_of(tick: u64, first: u64, last: u64) -> f64 {
    let span = WIDTH - LEFT - RIGHT;
    if last == first {
        return LEFT;
    }
    LEFT + span * (tick - first) as f64 / (last - first) as f64
}

/// Vertical position of `v` in panel `i`, clamped to the panel range.
pub fn y_of(i: usize, v: f64) -> f64 {
    let (_, lo, hi, _) = SERIES[i];
    let v = v.clamp(lo, hi);
    panel_top(i) + PANEL_HEIGHT * (hi - v) / (hi - lo)
}

pub fn render_svg(rows: &[MetricsRow]) -> String {
    let h = height();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{h}" viewBox="0 0 {WIDTH} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{h}" fill="white"/>"#);
    let (first, last) = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => (a.tick, b.tick),
        _ => (0, 0),
    };
    for (i, (label, lo, hi, value)) in SERIES.iter().enumerate() {
        let top = panel_top(i);
        let _ = writeln!(
            svg,
            r#"<rect x="{LEFT}" y="{top}" width="{}" height="{PANEL_HEIGHT}" fill="none" stroke="black"/>"#,
            WIDTH - LEFT - RIGHT
        );
        let _ = writeln!(
            svg,
            r#"<text x="8" y="{:.2}" font-family="sans-serif" font-size="12">{label}</text>"#,
            top + PANEL_HEIGHT / 2.0 + 4.0
        );
        for (v, dy) in [(hi, 10.0), (lo, 0.0)] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="9" text-anchor="end">{v}</text>"#,
                LEFT - 4.0,
                y_of(i, *v) + dy
            );
        }
        if rows.is_empty() {
            continue;
        }
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", x_of(r.tick, first, last), y_of(i, value(r))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="{}" fill="none" stroke="steelblue" stroke-width="1" points="{}"/>"#,
            label.to_lowercase(),
            points.join(" ")
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{LEFT}" y="{:.2}" font-family="sans-serif" font-size="10">tick {first}</text>"#,
        h - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">tick {last}</text>"#,
        WIDTH - RIGHT,
        h - 10.0
    );
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_plot(rows: &[MetricsRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_svg(rows)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(tick: u64, v: f64) -> MetricsRow {
        MetricsRow {
            tick,
            happy: v,
            sad: v,
            novelty: v,
            expectedness: v,
            feedback: 0.0,
            hits: 0,
            misses: 0,
            hit_rate: 0.0,
            explored: false,
            energy: 0.0,
        }
    }

    fn polyline<'a>(svg: &'a str, class: &str) -> Option<&'a str> {
        let tag = format!(r#"class="{class}""#);
        let line = svg.lines().find(|l| l.contains(&tag))?;
        let start = line.find("points=\"")? + 8;
        Some(&line[start..line[start..].find('"')? + start])
    }

    #[test]
    fn empty_table_has_axes_only() {
        let svg = render_svg(&[]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 0);
        assert_eq!(svg.matches("fill=\"none\" stroke=\"black\"").count(), 5);
    }

    #[test]
    fn constant_series_is_horizontal() {
        let rows: Vec<_> = (0..7).map(|t| row(t, 0.3)).collect();
        let svg = render_svg(&rows);
        let pts = polyline(&svg, "sad").unwrap();
        let ys: Vec<&str> = pts.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert!(ys.iter().all(|y| *y == ys[0]));
    }

    #[test]
    fn three_point_coordinates() {
        // plot width 520 over ticks 0..2; Happy panel spans y 20..100
        let rows = vec![row(0, 0.0), row(1, 0.5), row(2, 1.0)];
        let svg = render_svg(&rows);
        assert_eq!(
            polyline(&svg, "happy").unwrap(),
            "100.00,100.00 360.00,60.00 620.00,20.00"
        );
        // Feedback panel is the fifth: top 420, zero maps to the middle
        assert_eq!(
            polyline(&svg, "feedback").unwrap(),
            "100.00,460.00 360.00,460.00 620.00,460.00"
        );
    }
}
