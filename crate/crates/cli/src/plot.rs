//! Learning-curve SVG rendering, written by hand so the artifact has no
//! graphics dependencies.

use std::fmt::Write as _;
use std::path::Path;

use epis_core::Strategy;

use crate::error::{CliError, Result};
use crate::runner::AggregateCurve;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 600.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 432.0;

fn color(strategy: Strategy) -> &'static str {
    match strategy {
        Strategy::Random => "#7f7f7f",
        Strategy::Standard => "#1f77b4",
        Strategy::Epistemic => "#2ca02c",
        Strategy::Aleatoric => "#d62728",
    }
}

fn short_label(strategy: Strategy) -> &'static str {
    match strategy {
        Strategy::Random => "Rand",
        Strategy::Standard => "Stan",
        Strategy::Epistemic => "Epis",
        Strategy::Aleatoric => "Alea",
    }
}

/// One mean-accuracy polyline per strategy, with axes and a legend. Refuses
/// empty input before touching the filesystem.
pub fn emit_plot(aggregates: &[(Strategy, AggregateCurve)], path: &Path) -> Result<()> {
    if aggregates.is_empty() || aggregates.iter().all(|(_, a)| a.mean.is_empty()) {
        return Err(CliError::EmptyPlot);
    }

    let max_q = aggregates.iter().map(|(_, a)| a.mean.len()).max().unwrap() - 1;
    let x_hi = max_q.max(1) as f64;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for (_, a) in aggregates {
        for &m in &a.mean {
            y_lo = y_lo.min(m);
            y_hi = y_hi.max(m);
        }
    }
    // Pad the envelope a little and keep it inside the accuracy range.
    let pad = ((y_hi - y_lo) * 0.08).max(0.02);
    y_lo = (y_lo - pad).max(0.0);
    y_hi = (y_hi + pad).min(1.0);
    if y_hi - y_lo < 1e-9 {
        y_lo = (y_lo - 0.05).max(0.0);
        y_hi = (y_hi + 0.05).min(1.0);
    }

    let sx = |q: f64| LEFT + (RIGHT - LEFT) * q / x_hi;
    let sy = |v: f64| BOTTOM - (BOTTOM - TOP) * (v - y_lo) / (y_hi - y_lo);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">"
    );
    let _ = writeln!(svg, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");

    // Gridlines and tick labels.
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let x = sx(t * x_hi);
        let y = sy(y_lo + t * (y_hi - y_lo));
        let _ = writeln!(
            svg,
            "  <line x1=\"{x:.1}\" y1=\"{TOP}\" x2=\"{x:.1}\" y2=\"{BOTTOM}\" \
             stroke=\"#e5e5e5\"/>"
        );
        let _ = writeln!(
            svg,
            "  <line x1=\"{LEFT}\" y1=\"{y:.1}\" x2=\"{RIGHT}\" y2=\"{y:.1}\" \
             stroke=\"#e5e5e5\"/>"
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            BOTTOM + 18.0,
            (t * x_hi).round() as usize
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{:.2}</text>",
            LEFT - 8.0,
            y + 4.0,
            y_lo + t * (y_hi - y_lo)
        );
    }

    // Axes on top of the grid.
    let _ = writeln!(
        svg,
        "  <line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" \
         stroke=\"#333333\" stroke-width=\"1.5\"/>"
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" \
         stroke=\"#333333\" stroke-width=\"1.5\"/>"
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">queries</text>",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.1})\">accuracy</text>",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    for (strategy, agg) in aggregates {
        let mut points = String::new();
        for (q, &m) in agg.mean.iter().enumerate() {
            let _ = write!(points, "{:.1},{:.1} ", sx(q as f64), sy(m));
        }
        let _ = writeln!(
            svg,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
            points.trim_end(),
            color(*strategy)
        );
    }

    for (i, (strategy, _)) in aggregates.iter().enumerate() {
        let y = TOP + 16.0 + i as f64 * 22.0;
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" \
             stroke=\"{}\" stroke-width=\"2\"/>",
            RIGHT + 12.0,
            RIGHT + 40.0,
            color(*strategy)
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            RIGHT + 46.0,
            y + 4.0,
            short_label(*strategy)
        );
    }

    svg.push_str("</svg>\n");
    std::fs::write(path, svg)
        .map_err(|source| CliError::WriteFile { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agg(values: &[f64]) -> AggregateCurve {
        AggregateCurve { mean: values.to_vec(), sd: vec![0.0; values.len()], count: 1 }
    }

    #[test]
    fn renders_a_polyline_and_legend_entry_per_strategy() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curves.svg");
        let aggregates = vec![
            (Strategy::Random, agg(&[0.5, 0.6, 0.7])),
            (Strategy::Standard, agg(&[0.5, 0.65, 0.75])),
            (Strategy::Epistemic, agg(&[0.5, 0.7, 0.8])),
            (Strategy::Aleatoric, agg(&[0.5, 0.55, 0.6])),
        ];
        emit_plot(&aggregates, &path).unwrap();
        let svg = std::fs::read_to_string(&path).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 4);
        for label in ["Rand", "Stan", "Epis", "Alea"] {
            assert!(svg.contains(label), "legend misses {label}");
        }
        assert!(svg.contains(">queries<"));
        assert!(svg.contains(">accuracy<"));
    }

    #[test]
    fn empty_input_errors_before_creating_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curves.svg");
        assert!(matches!(emit_plot(&[], &path), Err(CliError::EmptyPlot)));
        assert!(
            matches!(
                emit_plot(&[(Strategy::Random, agg(&[]))], &path),
                Err(CliError::EmptyPlot)
            ),
            "curves without points cannot be plotted"
        );
        assert!(!path.exists());
    }

    #[test]
    fn axis_bounds_envelope_the_data() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curves.svg");
        let aggregates = vec![(Strategy::Epistemic, agg(&[0.31, 0.94, 0.62]))];
        emit_plot(&aggregates, &path).unwrap();
        let svg = std::fs::read_to_string(&path).unwrap();
        // Every plotted y coordinate must stay inside the drawing area.
        let polyline = svg
            .lines()
            .find(|l| l.contains("<polyline"))
            .expect("polyline present");
        let points = polyline.split('"').nth(1).unwrap();
        for pair in points.split_whitespace() {
            let (x, y) = pair.split_once(',').unwrap();
            let x: f64 = x.parse().unwrap();
            let y: f64 = y.parse().unwrap();
            assert!((LEFT..=RIGHT).contains(&x), "x {x} outside the axes");
            assert!((TOP..=BOTTOM).contains(&y), "y {y} outside the axes");
        }
    }

    #[test]
    fn flat_curves_still_get_a_positive_y_span() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curves.svg");
        emit_plot(&[(Strategy::Random, agg(&[0.5, 0.5]))], &path).unwrap();
        assert!(path.exists());
    }
}
