use std::fmt::Write;

use rocband::model::BandAxis;
use rocband::Curve;

const MARGIN: f64 = 60.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    width: f64,
    height: f64,
}

impl Frame {
    fn x(&self, fpr: f64) -> f64 {
        MARGIN + fpr.clamp(0.0, 1.0) * (self.width - 1.5 * MARGIN)
    }

    fn y(&self, tpr: f64) -> f64 {
        self.height - MARGIN - tpr.clamp(0.0, 1.0) * (self.height - 1.5 * MARGIN)
    }

    fn pt(&self, fpr: f64, tpr: f64) -> String {
        format!("{:.2},{:.2}", self.x(fpr), self.y(tpr))
    }
}

/// ROC plot: shaded band, estimated curve (and staircase if given), diagonal
/// reference and labelled axes.
pub fn render(
    curve: &Curve,
    staircase: Option<&Curve>,
    title: &str,
    width: u32,
    height: u32,
) -> String {
    let f = Frame {
        width: f64::from(width),
        height: f64::from(height),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    if let Some(band) = curve.band() {
        let points = curve.points();
        let mut poly: Vec<String> = Vec::with_capacity(2 * points.len());
        match band.axis {
            BandAxis::Tpr => {
                for (p, iv) in points.iter().zip(&band.intervals) {
                    poly.push(f.pt(p.fpr, iv.upper));
                }
                for (p, iv) in points.iter().zip(&band.intervals).rev() {
                    poly.push(f.pt(p.fpr, iv.lower));
                }
            }
            BandAxis::Fpr => {
                for (p, iv) in points.iter().zip(&band.intervals) {
                    poly.push(f.pt(iv.lower, p.tpr));
                }
                for (p, iv) in points.iter().zip(&band.intervals).rev() {
                    poly.push(f.pt(iv.upper, p.tpr));
                }
            }
        }
        let _ = writeln!(
            s,
            r##"<polygon class="band" points="{}" fill="#9ecae1" fill-opacity="0.5" stroke="none"/>"##,
            poly.join(" ")
        );
    }

    // Frame, ticks and labels.
    let (x0, x1, y0, y1) = (f.x(0.0), f.x(1.0), f.y(0.0), f.y(1.0));
    let _ = writeln!(
        s,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for k in 0..=5 {
        let v = k as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y0:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{v:.1}</text>"#,
            f.x(v),
            f.x(v),
            y0 + 5.0,
            f.x(v),
            y0 + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{x0:.2}" y2="{:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{v:.1}</text>"#,
            x0 - 5.0,
            f.y(v),
            f.y(v),
            x0 - 8.0,
            f.y(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">1 − Specificity</text>"#,
        (x0 + x1) / 2.0,
        f.height - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 15 {:.2})">Sensitivity</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        y1 - 12.0,
        escape(title)
    );

    let _ = writeln!(
        s,
        r#"<line class="diagonal" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="gray" stroke-dasharray="4 4"/>"#
    );
    let line: Vec<String> = curve.points().iter().map(|p| f.pt(p.fpr, p.tpr)).collect();
    let _ = writeln!(
        s,
        r#"<polyline class="curve" points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        line.join(" ")
    );
    if let Some(st) = staircase {
        let steps: Vec<String> = st.points().iter().map(|p| f.pt(p.fpr, p.tpr)).collect();
        let _ = writeln!(
            s,
            r##"<polyline class="staircase" points="{}" fill="none" stroke="#d62728" stroke-width="1"/>"##,
            steps.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}
