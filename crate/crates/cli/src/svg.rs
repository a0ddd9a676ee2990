//! Static SVG scatter plot for Pareto exports. No plotting dependency; the
//! CSV alongside it is the authoritative output.

use std::fmt::Write as _;

use crate::pareto::ParetoRow;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 60.0;

fn x_pixel(v: f64) -> f64 {
    MARGIN_LEFT + v * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
}

fn y_pixel(v: f64) -> f64 {
    HEIGHT - MARGIN_BOTTOM - v * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
}

/// Renders interpretability (horizontal) against F-Score (vertical), both on
/// the fixed [0, 1] scale.
pub fn scatter_svg(rows: &[ParetoRow]) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );

    let x0 = x_pixel(0.0);
    let x1 = x_pixel(1.0);
    let y0 = y_pixel(0.0);
    let y1 = y_pixel(1.0);
    let _ = writeln!(
        svg,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>"
    );

    for tick in 0..=4 {
        let v = tick as f64 / 4.0;
        let tx = x_pixel(v);
        let ty = y_pixel(v);
        let _ = writeln!(
            svg,
            "<line x1=\"{tx}\" y1=\"{y0}\" x2=\"{tx}\" y2=\"{}\" stroke=\"black\"/>",
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{tx}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{v}</text>",
            y0 + 18.0
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{ty}\" x2=\"{x0}\" y2=\"{ty}\" stroke=\"black\"/>",
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{v}</text>",
            x0 - 8.0,
            ty + 4.0
        );
    }

    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">Interpretability (1 / rules)</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">F-Score</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for row in rows {
        let cx = x_pixel(row.interpretability.clamp(0.0, 1.0));
        let cy = y_pixel(row.fscore.clamp(0.0, 1.0));
        let _ = writeln!(
            svg,
            "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"4\" fill=\"#336699\" fill-opacity=\"0.85\"/>"
        );
    }

    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_one_circle_per_row() {
        let rows = vec![
            ParetoRow {
                interpretability: 0.1,
                fscore: 0.9,
            },
            ParetoRow {
                interpretability: 0.5,
                fscore: 0.6,
            },
            ParetoRow {
                interpretability: 1.0,
                fscore: 0.2,
            },
        ];
        let svg = scatter_svg(&rows);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        // deterministic output
        assert_eq!(svg, scatter_svg(&rows));
    }
}
