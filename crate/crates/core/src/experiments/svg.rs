//! Minimal static line and scatter plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD_L: f64 = 70.0;
const PAD_R: f64 = 150.0;
const PAD_T: f64 = 40.0;
const PAD_B: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#111111"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Markers only, no connecting line.
    pub markers: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn fmt_tick(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.round() as i64)
    } else if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 1000.0).round() / 1000.0)
    }
}

impl Plot {
    pub fn render(&self) -> String {
        let tx = |v: f64| if self.log_x { v.log10() } else { v };
        let ty = |v: f64| if self.log_y { v.log10() } else { v };
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|&(x, y)| (tx(x), ty(y))))
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .collect();
        let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), p| (a.min(p.0), b.max(p.0), c.min(p.1), d.max(p.1)),
        );
        if !(x1 > x0) {
            (x0, x1) = (x0 - 1.0, x0 + 1.0);
        }
        if !(y1 > y0) {
            (y0, y1) = (y0 - 1.0, y0 + 1.0);
        }
        if self.log_x {
            (x0, x1) = (x0.floor(), x1.ceil());
        }
        if self.log_y {
            (y0, y1) = (y0.floor(), y1.ceil());
        } else {
            let pad = 0.05 * (y1 - y0);
            (y0, y1) = (y0 - pad, y1 + pad);
        }
        let pw = W - PAD_L - PAD_R;
        let ph = H - PAD_T - PAD_B;
        let sx = |v: f64| PAD_L + (v - x0) / (x1 - x0) * pw;
        let sy = |v: f64| PAD_T + (y1 - v) / (y1 - y0) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, PAD_L + pw / 2.0, esc(&self.title));
        let _ = writeln!(out, r#"<rect x="{PAD_L}" y="{PAD_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        for i in 0..=5 {
            let (vx, vy) = (x0 + (x1 - x0) * i as f64 / 5.0, y0 + (y1 - y0) * i as f64 / 5.0);
            let (px, py) = (sx(vx), sy(vy));
            let _ = writeln!(out, r##"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="#ddd"/>"##, PAD_T, PAD_T + ph);
            let _ = writeln!(out, r##"<line x1="{PAD_L}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#ddd"/>"##, PAD_L + pw);
            let _ = writeln!(out, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, PAD_T + ph + 16.0, fmt_tick(vx, self.log_x));
            let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, PAD_L - 6.0, py + 4.0, fmt_tick(vy, self.log_y));
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, PAD_L + pw / 2.0, H - 10.0, esc(&self.x_label));
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            PAD_T + ph / 2.0,
            PAD_T + ph / 2.0,
            esc(&self.y_label)
        );
        for (k, s) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let mapped: Vec<(f64, f64)> = s
                .points
                .iter()
                .map(|&(x, y)| (tx(x), ty(y)))
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|(x, y)| (sx(x), sy(y.clamp(y0, y1))))
                .collect();
            if s.markers {
                for (px, py) in &mapped {
                    let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="{color}"/>"#);
                }
            } else if !mapped.is_empty() {
                let path: Vec<String> = mapped.iter().map(|(px, py)| format!("{px:.2},{py:.2}")).collect();
                let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
            }
            let ly = PAD_T + 14.0 + 18.0 * k as f64;
            let lx = PAD_L + pw + 10.0;
            let _ = writeln!(out, r#"<rect x="{lx}" y="{}" width="12" height="4" fill="{color}"/>"#, ly - 4.0);
            let _ = writeln!(out, r#"<text x="{}" y="{ly}">{}</text>"#, lx + 18.0, esc(&s.label));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
