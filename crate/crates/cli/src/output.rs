use std::fmt::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::Format;
use crate::settings::RunConfig;
use crate::Failure;

/// Every JSON file the tool writes. The header fields are enough to rerun
/// the computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub prng: String,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub config: Value,
    pub report: Value,
}

impl Envelope {
    pub fn new(kind: &str, seed: Option<u64>, config: &RunConfig, report: Value) -> Self {
        Self {
            tool: "convlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            kind: kind.into(),
            prng: convlab::rng::PRNG_ID.into(),
            seed,
            config_hash: config.hash(),
            config: config.value(),
            report,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{} is not a convlab report: {e}", path.display())))
    }
}

/// Writes the requested formats into the output directory, in a fixed order.
pub struct Outputs {
    dir: PathBuf,
    formats: Vec<Format>,
}

impl Outputs {
    pub fn new(dir: PathBuf, formats: Vec<Format>) -> Self {
        Self { dir, formats }
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Writes `stem.ext` for each requested format whose content is given.
    pub fn write(
        &self,
        stem: &str,
        json: Option<&Envelope>,
        csv: Option<&str>,
        svg: Option<&str>,
    ) -> Result<Vec<PathBuf>, Failure> {
        std::fs::create_dir_all(&self.dir)?;
        let mut written = Vec::new();
        let json = json.map(Envelope::to_json);
        for (format, ext, body) in [
            (Format::Json, "json", json.as_deref()),
            (Format::Csv, "csv", csv),
            (Format::Svg, "svg", svg),
        ] {
            if let (true, Some(body)) = (self.wants(format), body) {
                let path = self.dir.join(format!("{stem}.{ext}"));
                std::fs::write(&path, body)?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// A plain SVG line chart with one polyline per series. The y axis spans
/// `[0, 1]` unless the data leave it.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h) = (720.0, 420.0);
    let (left, right, top, bottom) = (64.0, 180.0, 36.0, 48.0);
    let points = series.iter().flat_map(|(_, pts)| pts.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, 1.0f64);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        (x0, x1) = (x0 - 1.0, x1 + 1.0);
    }
    let (pw, ph) = (w - left - right, h - top - bottom);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, left + pw / 2.0, escape(title)).unwrap();
    writeln!(
        s,
        r#"<path d="M{left:.1},{top:.1} V{:.1} H{:.1}" fill="none" stroke="black"/>"#,
        top + ph,
        left + pw
    )
    .unwrap();
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(xv), top + ph + 16.0, tick(xv)).unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, left - 6.0, sy(yv) + 4.0, tick(yv)).unwrap();
        writeln!(s, r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#dddddd"/>"##, left, sy(yv), left + pw, sy(yv)).unwrap();
    }
    writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, left + pw / 2.0, h - 10.0, escape(x_label)).unwrap();
    writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label)
    )
    .unwrap();
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" ")).unwrap();
        if pts.len() == 1 {
            let (x, y) = pts[0];
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y)).unwrap();
        }
        let ly = top + 14.0 * i as f64 + 6.0;
        writeln!(s, r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, w - right + 12.0, w - right + 30.0).unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, w - right + 36.0, ly + 4.0, escape(name)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_has_one_polyline_per_series() {
        let svg = line_chart(
            "t",
            "x",
            "y",
            &[
                ("a".into(), vec![(0.0, 0.5), (1.0, 0.75)]),
                ("b<c".into(), vec![(2.0, 1.0)]),
            ],
        );
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("b&lt;c"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
