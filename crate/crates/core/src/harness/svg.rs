//! Minimal SVG renderings of the report tables. Numbers are printed with fixed
//! precision so output is byte-stable.

use super::study::MethodReport;

const W: f64 = 360.0;
const H: f64 = 300.0;
const PAD: f64 = 40.0;

fn frame(title: &str, body: &str) -> String {
    let (x0, y0, x1, y1) = (PAD, PAD, W - PAD / 2.0, H - PAD);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"11\">\n\
         <text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\">{title}</text>\n\
         <line x1=\"{x0}\" y1=\"{y1}\" x2=\"{x1}\" y2=\"{y1}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n\
         {body}</svg>\n",
        W / 2.0
    )
}

fn sx(x: f64) -> f64 {
    PAD + x * (W - 1.5 * PAD)
}

fn sy(y: f64) -> f64 {
    H - PAD - y * (H - 2.0 * PAD)
}

/// Per-bin accuracy bars against the identity line.
pub fn reliability(m: &MethodReport) -> String {
    let bins = &m.evaluation.calibration.calibration.bins;
    let width = sx(1.0 / bins.len() as f64) - sx(0.0);
    let mut body = String::new();
    for b in bins {
        if let Some(acc) = b.accuracy {
            body += &format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"steelblue\" stroke=\"white\"/>\n",
                sx(b.lower),
                sy(acc),
                width,
                sy(0.0) - sy(acc)
            );
        }
    }
    body += &format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"red\" stroke-dasharray=\"4\"/>\n",
        sx(0.0),
        sy(0.0),
        sx(1.0),
        sy(1.0)
    );
    let title = format!(
        "{} reliability (ECE {:.2}%)",
        m.method, m.evaluation.calibration.ece_percent
    );
    frame(&title, &body)
}

/// USen, USpe, UPre and UAcc against the threshold.
pub fn sweep(m: &MethodReport) -> String {
    let (lo, hi) = match (m.sweep.first(), m.sweep.last()) {
        (Some(a), Some(b)) if b.threshold > a.threshold => (a.threshold, b.threshold),
        (Some(a), _) => (a.threshold - 0.5, a.threshold + 0.5),
        _ => (0.0, 1.0),
    };
    let scale = |t: f64| (t - lo) / (hi - lo);
    let series: [(&str, &str, fn(&crate::metrics::SweepRow) -> Option<f64>); 4] = [
        ("USen", "crimson", |r| r.metrics.usen),
        ("USpe", "seagreen", |r| r.metrics.uspe),
        ("UPre", "darkorange", |r| r.metrics.upre),
        ("UAcc", "navy", |r| Some(r.metrics.uacc)),
    ];
    let mut body = String::new();
    for (k, (name, colour, get)) in series.iter().enumerate() {
        let pts: Vec<String> = m
            .sweep
            .iter()
            .filter_map(|r| get(r).map(|v| format!("{:.2},{:.2}", sx(scale(r.threshold)), sy(v))))
            .collect();
        body += &format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\"/>\n<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{colour}\">{name}</text>\n",
            pts.join(" "),
            W - PAD * 1.5,
            PAD + 12.0 * k as f64
        );
    }
    frame(&format!("{} threshold sweep", m.method), &body)
}

/// Entropy histograms of correct and misclassified predictions, each
/// normalized to its own peak.
pub fn entropy(m: &MethodReport) -> String {
    let h = &m.entropy_histogram;
    let n = h.correct.len();
    let width = (sx(1.0) - sx(0.0)) / n as f64;
    let peak = |v: &[usize]| v.iter().copied().max().unwrap_or(0).max(1) as f64;
    let (pc, pi) = (peak(&h.correct), peak(&h.incorrect));
    let mut body = String::new();
    for i in 0..n {
        let x = sx(i as f64 / n as f64);
        for (count, p, colour) in [(h.correct[i], pc, "blue"), (h.incorrect[i], pi, "red")] {
            if count > 0 {
                let y = count as f64 / p;
                body += &format!(
                    "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"{width:.2}\" height=\"{:.2}\" fill=\"{colour}\" fill-opacity=\"0.4\"/>\n",
                    sy(y),
                    sy(0.0) - sy(y)
                );
            }
        }
    }
    frame(&format!("{} predictive entropy", m.method), &body)
}
