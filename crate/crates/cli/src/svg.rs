//! Minimal hand-rolled SVG for the mass curve: mass against ω on a log-x
//! axis, stable points as filled circles, unstable as crosses, inconclusive
//! as open squares.

use pointnls::{MassCurve, StabilityClass};
use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 480.0;
const ML: f64 = 70.0; // margins
const MR: f64 = 20.0;
const MT: f64 = 20.0;
const MB: f64 = 50.0;

pub fn mass_curve_svg(curve: &MassCurve) -> String {
    let xs: Vec<f64> = curve.omegas.iter().map(|w| w.log10()).collect();
    let ys = &curve.mass;
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let ymin = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let ymax = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.05 * (ymax - ymin).max(1e-300);
    let (y0, y1) = (ymin - pad, ymax + pad);

    let px = |x: f64| ML + (x - x0) / (x1 - x0).max(1e-300) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y0) / (y1 - y0).max(1e-300) * (H - MT - MB);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    // axes
    let _ = writeln!(
        s,
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        H - MB,
        W - MR,
        H - MB
    );
    let _ = writeln!(
        s,
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>",
        H - MB
    );
    // decade ticks on x
    let mut d = x0.ceil() as i64;
    while (d as f64) <= x1 {
        let x = px(d as f64);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"black\"/>",
            H - MB,
            H - MB + 6.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">1e{d}</text>",
            H - MB + 22.0
        );
        d += 1;
    }
    // five y ticks
    for k in 0..5 {
        let y = y0 + (y1 - y0) * k as f64 / 4.0;
        let yp = py(y);
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{yp:.2}\" x2=\"{ML}\" y2=\"{yp:.2}\" stroke=\"black\"/>",
            ML - 6.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{y:.4e}</text>",
            ML - 10.0,
            yp + 4.0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">omega</text>",
        (ML + W - MR) / 2.0,
        H - 8.0
    );
    // polyline
    let mut pts = String::new();
    for (x, y) in xs.iter().zip(ys) {
        let _ = write!(pts, "{:.2},{:.2} ", px(*x), py(*y));
    }
    let _ = writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>",
        pts.trim_end()
    );
    // markers by classification
    for i in 0..xs.len() {
        let (x, y) = (px(xs[i]), py(ys[i]));
        match curve.classification[i] {
            StabilityClass::Stable => {
                let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.5\" fill=\"forestgreen\"/>");
            }
            StabilityClass::Unstable => {
                let _ = writeln!(
                    s,
                    "<path d=\"M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}\" stroke=\"crimson\" stroke-width=\"1.8\"/>",
                    x - 3.5, y - 3.5, x + 3.5, y + 3.5, x - 3.5, y + 3.5, x + 3.5, y - 3.5
                );
            }
            StabilityClass::Inconclusive => {
                let _ = writeln!(
                    s,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"7\" height=\"7\" fill=\"none\" stroke=\"gray\"/>",
                    x - 3.5,
                    y - 3.5
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
