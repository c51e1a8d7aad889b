//! Minimal SVG renderings of the report data series. The CSV files are the
//! contract; these are best-effort visual aids.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"14\">{title}</text>\n",
        WIDTH / 2.0
    )
}

fn axes() -> String {
    format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    )
}

/// Score-vs-MOS scatter.
pub fn scatter(points: &[(f64, f64)], title: &str) -> String {
    let finite: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &finite {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if finite.is_empty() || x_lo == x_hi {
        x_lo = 0.0;
        x_hi = 1.0;
    }
    if finite.is_empty() || y_lo == y_hi {
        y_lo = 0.0;
        y_hi = 1.0;
    }
    let mut out = header(title);
    out.push_str(&axes());
    let span_x = WIDTH - 2.0 * MARGIN;
    let span_y = HEIGHT - 2.0 * MARGIN;
    for (x, y) in finite {
        let px = MARGIN + (x - x_lo) / (x_hi - x_lo) * span_x;
        let py = HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * span_y;
        out.push_str(&format!(
            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"2.5\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Histogram from precomputed bins `(low, high, count)`.
pub fn histogram(bins: &[(f64, f64, usize)], title: &str) -> String {
    let mut out = header(title);
    out.push_str(&axes());
    let max_count = bins.iter().map(|b| b.2).max().unwrap_or(1).max(1) as f64;
    let span_x = WIDTH - 2.0 * MARGIN;
    let span_y = HEIGHT - 2.0 * MARGIN;
    let lo = bins.first().map_or(0.0, |b| b.0);
    let hi = bins.last().map_or(1.0, |b| b.1).max(lo + 1.0);
    for &(b_lo, b_hi, count) in bins {
        let x0 = MARGIN + (b_lo - lo) / (hi - lo) * span_x;
        let x1 = MARGIN + (b_hi - lo) / (hi - lo) * span_x;
        let h = count as f64 / max_count * span_y;
        out.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{h:.2}\" \
             fill=\"seagreen\" stroke=\"white\"/>\n",
            x0,
            HEIGHT - MARGIN - h,
            (x1 - x0).max(1.0)
        ));
    }
    out.push_str("</svg>\n");
    out
}
