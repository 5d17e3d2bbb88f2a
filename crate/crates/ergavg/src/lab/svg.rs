//! Minimal SVG scatter plot for experiment reports: primary series on
//! log–log axes (falling back to linear when a coordinate is nonpositive)
//! with the fitted line overlaid.

use super::fit::FitSummary;

const W: f64 = 640.0;
const H: f64 = 440.0;
const MARGIN: f64 = 56.0;

pub fn plot_loglog(title: &str, points: &[(f64, f64)], fit: Option<&FitSummary>) -> String {
    let loglog = !points.is_empty() && points.iter().all(|(x, y)| *x > 0.0 && *y > 0.0);
    let map = |v: f64| if loglog { v.log10() } else { v };
    let xs: Vec<f64> = points.iter().map(|(x, _)| map(*x)).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| map(*y)).collect();
    let (x0, x1) = padded_range(&xs);
    let (y0, y1) = padded_range(&ys);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"14\">{}</text>\n",
        W / 2.0,
        xml_escape(title)
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN,
        t = MARGIN
    ));
    let axis = if loglog { "log10" } else { "linear" };
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">x ({axis}) {:.3} .. {:.3}</text>\n",
        W / 2.0,
        H - 16.0,
        x0,
        x1
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\" \
         font-family=\"monospace\" font-size=\"11\">y ({axis}) {:.3} .. {:.3}</text>\n",
        H / 2.0,
        H / 2.0,
        y0,
        y1
    ));
    // Fitted line in the fit's (log or linear) coordinates.
    if let (Some(fit), true) = (fit, points.len() >= 2) {
        let ln10 = std::f64::consts::LN_10;
        let line_y = |x: f64| {
            if loglog {
                // fit is in natural logs: log10 y = slope·log10 x + b/ln 10.
                fit.slope * x + fit.intercept / ln10
            } else {
                fit.slope * x + fit.intercept
            }
        };
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#c33\" \
             stroke-width=\"1.5\"/>\n",
            px(x0),
            py(line_y(x0).clamp(y0 - 1.0, y1 + 1.0)),
            px(x1),
            py(line_y(x1).clamp(y0 - 1.0, y1 + 1.0)),
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"40\" text-anchor=\"middle\" font-family=\"monospace\" \
             font-size=\"11\" fill=\"#c33\">slope {:.4}</text>\n",
            W / 2.0,
            fit.slope
        ));
    }
    for (x, y) in xs.iter().zip(&ys) {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1665c1\"/>\n",
            px(*x),
            py(*y)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn padded_range(vals: &[f64]) -> (f64, f64) {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.08).max(1e-9);
    (lo - pad, hi + pad)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
