//! A small SVG writer for plots in the `(beta, alpha)` half plane.

use std::fmt::Write as _;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 50.0;

/// Plot area mapped from a `(beta, alpha)` rectangle.
pub struct Canvas {
    beta_min: f64,
    beta_max: f64,
    alpha_max: f64,
    body: String,
}

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Canvas {
    pub fn new(beta_min: f64, beta_max: f64, alpha_max: f64) -> Self {
        Canvas {
            beta_min,
            beta_max,
            alpha_max,
            body: String::new(),
        }
    }

    pub fn to_screen(&self, beta: f64, alpha: f64) -> (f64, f64) {
        let x = MARGIN + (beta - self.beta_min) / (self.beta_max - self.beta_min) * (WIDTH - 2.0 * MARGIN);
        let y = HEIGHT - MARGIN - alpha / self.alpha_max * (HEIGHT - 2.0 * MARGIN);
        (x, y)
    }

    fn inside(&self, beta: f64, alpha: f64) -> bool {
        beta >= self.beta_min && beta <= self.beta_max && (0.0..=self.alpha_max).contains(&alpha)
    }

    /// Axis frame with integer ticks in both directions.
    pub fn axes(&mut self) {
        let (x0, y0) = self.to_screen(self.beta_min, 0.0);
        let (x1, y1) = self.to_screen(self.beta_max, self.alpha_max);
        let _ = writeln!(
            self.body,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#888888" stroke-width="1"/>"##,
            num(x0),
            num(y1),
            num(x1 - x0),
            num(y0 - y1)
        );
        let mut b = self.beta_min.ceil() as i64;
        while (b as f64) <= self.beta_max {
            let (x, y) = self.to_screen(b as f64, 0.0);
            let _ = writeln!(
                self.body,
                r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#888888" stroke-width="1"/><text x="{0}" y="{3}" font-size="12" text-anchor="middle" fill="#444444">{4}</text>"##,
                num(x),
                num(y),
                num(y + 5.0),
                num(y + 20.0),
                b
            );
            b += 1;
        }
        let mut a = 1i64;
        while (a as f64) <= self.alpha_max {
            let (x, y) = self.to_screen(self.beta_min, a as f64);
            let _ = writeln!(
                self.body,
                r##"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#888888" stroke-width="1"/><text x="{3}" y="{4}" font-size="12" text-anchor="end" fill="#444444">{5}</text>"##,
                num(x - 5.0),
                num(y),
                num(x),
                num(x - 8.0),
                num(y + 4.0),
                a
            );
            a += 1;
        }
        let (xm, ym) = self.to_screen((self.beta_min + self.beta_max) / 2.0, 0.0);
        let _ = writeln!(
            self.body,
            r##"<text x="{}" y="{}" font-size="14" text-anchor="middle">β</text><text x="{}" y="{}" font-size="14">α</text>"##,
            num(xm),
            num(ym + 38.0),
            num(x0 - 30.0),
            num(y1 - 10.0)
        );
    }

    /// Draws a path through the points, split wherever the path leaves the
    /// window or two consecutive points are farther apart than `max_gap`
    /// screen units.
    pub fn polyline(&mut self, points: &[(f64, f64)], color: &str, dashed: bool, max_gap: f64) {
        let mut runs: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut cur: Vec<(f64, f64)> = Vec::new();
        for &(b, a) in points {
            if !self.inside(b, a) || !a.is_finite() || !b.is_finite() {
                runs.push(std::mem::take(&mut cur));
                continue;
            }
            let p = self.to_screen(b, a);
            if let Some(&q) = cur.last() {
                let q: (f64, f64) = q;
                if ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt() > max_gap {
                    runs.push(std::mem::take(&mut cur));
                }
            }
            cur.push(p);
        }
        runs.push(cur);
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        for run in runs.into_iter().filter(|r| r.len() >= 2) {
            let pts: Vec<String> = run.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
            let _ = writeln!(
                self.body,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"{}/>"#,
                pts.join(" "),
                color,
                dash
            );
        }
    }

    pub fn marker(&mut self, beta: f64, alpha: f64, color: &str) {
        if !self.inside(beta, alpha) {
            return;
        }
        let (x, y) = self.to_screen(beta, alpha);
        let _ = writeln!(self.body, r#"<circle cx="{}" cy="{}" r="4" fill="{}"/>"#, num(x), num(y), color);
    }

    pub fn label(&mut self, beta: f64, alpha: f64, text: &str, color: &str) {
        let (x, y) = self.to_screen(beta, alpha);
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="13" fill="{}">{}</text>"#,
            num(x + 6.0),
            num(y - 6.0),
            color,
            escape(text)
        );
    }

    /// Legend entries stacked in the upper right corner.
    pub fn legend(&mut self, entries: &[(String, &str)]) {
        for (i, (text, color)) in entries.iter().enumerate() {
            let y = MARGIN + 16.0 + 18.0 * i as f64;
            let x = WIDTH - MARGIN - 170.0;
            let _ = writeln!(
                self.body,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="3"/><text x="{}" y="{}" font-size="12">{}</text>"#,
                num(x),
                num(y - 4.0),
                num(x + 20.0),
                num(y - 4.0),
                color,
                num(x + 26.0),
                num(y),
                escape(text)
            );
        }
    }

    pub fn finish(self, title: Option<&str>) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">"#,
            WIDTH, HEIGHT
        );
        let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        if let Some(t) = title {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="24" font-size="15" text-anchor="middle">{}</text>"#,
                WIDTH / 2.0,
                escape(t)
            );
        }
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}
