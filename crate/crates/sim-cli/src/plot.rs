//! Self-contained SVG line plot: log10(BER) against Eb/N0.

use crate::commands::Curve;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 48.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

pub fn ber_svg(curves: &[Curve]) -> String {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for curve in curves {
        for &(snr, ref stats) in &curve.rows {
            if stats.bit_errors > 0 {
                xs.push(snr);
                ys.push(stats.ber().log10());
            }
        }
    }
    if xs.is_empty() {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>".to_string();
    }
    let (x_min, x_max) = bounds(&xs, 0.25);
    let (y_min, y_max) = bounds(&ys, 0.25);
    let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R);
    let sy = |y: f64| HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // axes
    svg.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        r = WIDTH - MARGIN_R,
        t = MARGIN_T,
        b = HEIGHT - MARGIN_B,
    ));

    // y ticks at integer log10 levels
    let mut level = y_min.ceil() as i64;
    while (level as f64) <= y_max {
        let y = sy(level as f64);
        svg.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{y:.1}\" x2=\"{r}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\n\
             <text x=\"{lx:.1}\" y=\"{ty:.1}\" text-anchor=\"end\">1e{level}</text>\n",
            l = MARGIN_L,
            r = WIDTH - MARGIN_R,
            lx = MARGIN_L - 6.0,
            ty = y + 4.0,
        ));
        level += 1;
    }
    // x ticks on dB units
    let step = ((x_max - x_min) / 8.0).max(0.5).round().max(1.0);
    let mut x = (x_min / step).ceil() * step;
    while x <= x_max {
        let px = sx(x);
        svg.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{b}\" x2=\"{px:.1}\" y2=\"{b2}\" stroke=\"black\"/>\n\
             <text x=\"{px:.1}\" y=\"{ty}\" text-anchor=\"middle\">{x}</text>\n",
            b = HEIGHT - MARGIN_B,
            b2 = HEIGHT - MARGIN_B + 5.0,
            ty = HEIGHT - MARGIN_B + 20.0,
        ));
        x += step;
    }
    svg.push_str(&format!(
        "<text x=\"{cx}\" y=\"{cy}\" text-anchor=\"middle\">Eb/N0 (dB)</text>\n\
         <text x=\"16\" y=\"{my}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {my})\">BER</text>\n",
        cx = (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        cy = HEIGHT - 10.0,
        my = (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
    ));

    for (idx, curve) in curves.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let points: Vec<String> = curve
            .rows
            .iter()
            .filter(|(_, stats)| stats.bit_errors > 0)
            .map(|&(snr, ref stats)| format!("{:.1},{:.1}", sx(snr), sy(stats.ber().log10())))
            .collect();
        if points.is_empty() {
            continue;
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" fill=\"{color}\">{}</text>\n",
            escape(&curve.label),
            x = MARGIN_L + 10.0,
            y = MARGIN_T + 16.0 * (idx as f64 + 1.0),
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64], pad: f64) -> (f64, f64) {
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    if (max - min).abs() < 1e-12 {
        (min - 1.0, max + 1.0)
    } else {
        (min - pad, max + pad)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
