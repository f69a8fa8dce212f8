//! Minimal SVG line plots for experiment output; no plotting dependency.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Debug)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw as a step function (empirical CDFs, sweep estimates).
    pub step: bool,
}

impl Curve {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Curve { label: label.into(), points, step: false }
    }

    pub fn steps(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Curve { label: label.into(), points, step: true }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Plot {
    pub title: String,
    pub curves: Vec<Curve>,
    /// Dashed horizontal guide lines (e.g. the asymptote at 1).
    pub hlines: Vec<f64>,
}

impl Plot {
    pub fn new(title: impl Into<String>) -> Self {
        Plot { title: title.into(), curves: Vec::new(), hlines: Vec::new() }
    }

    pub fn curve(mut self, c: Curve) -> Self {
        self.curves.push(c);
        self
    }

    pub fn hline(mut self, y: f64) -> Self {
        self.hlines.push(y);
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
        let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
        for c in &self.curves {
            for &(x, y) in &c.points {
                xs = (xs.0.min(x), xs.1.max(x));
                ys = (ys.0.min(y), ys.1.max(y));
            }
        }
        for &y in &self.hlines {
            ys = (ys.0.min(y), ys.1.max(y));
        }
        if !xs.0.is_finite() {
            xs = (0.0, 1.0);
        }
        if !ys.0.is_finite() {
            ys = (0.0, 1.0);
        }
        if xs.1 - xs.0 < 1e-300 {
            xs.1 = xs.0 + 1.0;
        }
        if ys.1 - ys.0 < 1e-300 {
            ys.1 = ys.0 + 1.0;
        }
        (xs.0, xs.1, ys.0, ys.1)
    }

    pub fn write_svg(&self, w: &mut impl Write) -> Result<()> {
        let (x0, x1, y0, y1) = self.bounds();
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
        writeln!(
            w,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        )?;
        writeln!(w, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>")?;
        writeln!(
            w,
            "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
            WIDTH / 2.0,
            xml_escape(&self.title)
        )?;
        // axes
        writeln!(
            w,
            "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>",
            m = MARGIN,
            b = HEIGHT - MARGIN,
            r = WIDTH - MARGIN
        )?;
        writeln!(
            w,
            "<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
            m = MARGIN,
            t = MARGIN,
            b = HEIGHT - MARGIN
        )?;
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            writeln!(
                w,
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{fx:.3}</text>",
                sx(fx),
                HEIGHT - MARGIN + 18.0
            )?;
            writeln!(
                w,
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{fy:.3}</text>",
                MARGIN - 6.0,
                sy(fy) + 4.0
            )?;
        }
        for &y in &self.hlines {
            writeln!(
                w,
                "<line x1=\"{}\" y1=\"{:.2}\" x2=\"{}\" y2=\"{:.2}\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>",
                MARGIN,
                sy(y),
                WIDTH - MARGIN,
                sy(y)
            )?;
        }
        for (idx, c) in self.curves.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            let mut path = String::new();
            let mut prev: Option<(f64, f64)> = None;
            for &(x, y) in &c.points {
                let (px, py) = (sx(x), sy(y));
                if path.is_empty() {
                    path.push_str(&format!("M{px:.2},{py:.2}"));
                } else if c.step {
                    let (_, ppy) = prev.unwrap();
                    path.push_str(&format!(" L{px:.2},{ppy:.2} L{px:.2},{py:.2}"));
                } else {
                    path.push_str(&format!(" L{px:.2},{py:.2}"));
                }
                prev = Some((px, py));
            }
            writeln!(
                w,
                "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>"
            )?;
            writeln!(
                w,
                "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>",
                WIDTH - MARGIN - 160.0,
                MARGIN + 16.0 * (idx as f64 + 1.0),
                xml_escape(&c.label)
            )?;
        }
        writeln!(w, "</svg>")?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        self.write_svg(&mut f)
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emits_well_formed_svg() {
        let plot = Plot::new("test <plot>")
            .curve(Curve::line("line", vec![(0.0, 0.0), (1.0, 1.0)]))
            .curve(Curve::steps("steps", vec![(0.0, 0.0), (0.5, 0.4), (1.0, 1.0)]))
            .hline(1.0);
        let mut buf = Vec::new();
        plot.write_svg(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(text.contains("test &lt;plot&gt;"));
        assert_eq!(text.matches("<path").count(), 2);
        assert!(text.contains("stroke-dasharray"));
    }

    #[test]
    fn degenerate_ranges_do_not_divide_by_zero() {
        let plot = Plot::new("flat").curve(Curve::line("c", vec![(0.5, 2.0), (0.5, 2.0)]));
        let mut buf = Vec::new();
        plot.write_svg(&mut buf).unwrap();
        assert!(!String::from_utf8(buf).unwrap().contains("NaN"));
    }
}
