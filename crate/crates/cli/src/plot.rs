//! Plot-ready data files and minimal static SVG line charts.

use std::fmt::Write as _;

use crate::error::CliResult;
use crate::format::sci;

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    /// Stem of the `.dat` file holding this curve.
    pub file_stem: String,
    pub columns: [&'static str; 2],
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub stem: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Horizontal dashed line `(label, y)`.
    pub reference: Option<(String, f64)>,
}

/// A file to be written, relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct OutFile {
    pub name: String,
    pub contents: String,
}

/// `.dat` files (one per series) plus `<stem>.svg`. An empty plot yields no files.
pub fn emit(plot: &Plot) -> CliResult<Vec<OutFile>> {
    if plot.series.iter().all(|s| s.points.is_empty()) {
        return Ok(Vec::new());
    }
    let mut files = Vec::new();
    for s in plot.series.iter().filter(|s| !s.points.is_empty()) {
        let mut text = format!("# {} {}\n", s.columns[0], s.columns[1]);
        if let Some((label, y)) = &plot.reference {
            writeln!(text, "# reference {label} = {}", sci(*y)?).expect("string write");
        }
        for &(x, y) in &s.points {
            writeln!(text, "{} {}", sci(x)?, sci(y)?).expect("string write");
        }
        files.push(OutFile {
            name: format!("{}.dat", s.file_stem),
            contents: text,
        });
    }
    files.push(OutFile {
        name: format!("{}.svg", plot.stem),
        contents: svg(plot),
    });
    Ok(files)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 64.0;
const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let tr = |v: f64| if log { v.log10() } else { v };
        let (mut lo, mut hi) = values
            .filter(|v| v.is_finite() && (!log || *v > 0.0))
            .map(tr)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            log,
        }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn tick_value(&self, frac: f64) -> f64 {
        let v = self.lo + frac * (self.hi - self.lo);
        if self.log {
            10f64.powf(v)
        } else {
            v
        }
    }
}

fn svg(plot: &Plot) -> String {
    let xs = plot.series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .chain(plot.reference.iter().map(|r| r.1));
    let ax = Axis::fit(xs, plot.log_x);
    let ay = Axis::fit(ys, plot.log_y);
    let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let px = |x: f64| MARGIN + w * ax.unit(x);
    let py = |y: f64| HEIGHT - MARGIN - h * ay.unit(y);

    let mut s = String::new();
    let mut line = |l: String| {
        s.push_str(&l);
        s.push('\n');
    };
    line(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    ));
    line(format!("<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"black\"/>"));
    line(format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        WIDTH / 2.0,
        MARGIN / 2.0,
        escape(&plot.title)
    ));
    line(format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(&plot.x_label)
    ));
    line(format!(
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&plot.y_label)
    ));
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (x, y) = (MARGIN + w * f, HEIGHT - MARGIN - h * f);
        line(format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            HEIGHT - MARGIN + 16.0,
            tick(ax.tick_value(f))
        ));
        line(format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
            MARGIN - 6.0,
            y + 4.0,
            tick(ay.tick_value(f))
        ));
    }
    if let Some((label, yr)) = &plot.reference {
        let y = py(*yr);
        line(format!(
            "<line x1=\"{MARGIN}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>",
            MARGIN + w
        ));
        line(format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" fill=\"gray\">{}</text>",
            MARGIN + w - 4.0,
            y - 4.0,
            escape(label)
        ));
    }
    for (i, series) in plot.series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .filter(|p| (!plot.log_x || p.0 > 0.0) && (!plot.log_y || p.1 > 0.0))
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        line(format!(
            "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.join(" ")
        ));
        line(format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{colour}\">{}</text>",
            MARGIN + 8.0,
            MARGIN + 16.0 * (i as f64 + 1.0),
            escape(&series.label)
        ));
    }
    line("</svg>".to_string());
    s
}

fn tick(v: f64) -> String {
    format!("{v:.3e}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot(points: Vec<(f64, f64)>) -> Plot {
        Plot {
            stem: "demo".into(),
            title: "t < 1".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: true,
            log_y: false,
            series: vec![Series {
                label: "curve".into(),
                file_stem: "demo".into(),
                columns: ["x", "y"],
                points,
            }],
            reference: Some(("level".into(), 2.0)),
        }
    }

    #[test]
    fn empty_table_gives_no_files() {
        assert!(emit(&plot(Vec::new())).unwrap().is_empty());
    }

    #[test]
    fn data_and_svg() {
        let files = emit(&plot(vec![(1.0, 1.0), (10.0, 3.0)])).unwrap();
        assert_eq!(files.len(), 2);
        assert_eq!(files[0].name, "demo.dat");
        assert_eq!(
            files[0].contents,
            "# x y\n# reference level = 2.00000000000e+0\n1.00000000000e+0 1.00000000000e+0\n1.00000000000e+1 3.00000000000e+0\n"
        );
        let svg = &files[1].contents;
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("stroke-dasharray") && svg.contains("t &lt; 1"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }

    #[test]
    fn non_finite_data_aborts() {
        assert!(emit(&plot(vec![(1.0, f64::NAN)])).is_err());
    }
}
