//! Self-contained SVG plotting: linear or log-10 y axes, line and marker
//! series, filled exclusion bands, and a simple legend. Output depends on
//! nothing but the input data, so regenerating a plot from its CSV yields
//! identical bytes.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 46.0;
const MARGIN_B: f64 = 58.0;

pub const PALETTE: [&str; 6] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub markers: bool,
    pub line: bool,
    pub points: Vec<(f64, f64)>,
}

/// Region filled from a curve down to the bottom of the plot.
#[derive(Debug, Clone)]
pub struct Band {
    pub label: String,
    pub color: &'static str,
    pub upper: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub y_scale: Scale,
    pub series: Vec<Series>,
    pub bands: Vec<Band>,
    pub notes: Vec<String>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str, y_scale: Scale) -> Self {
        Plot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            y_scale,
            series: Vec::new(),
            bands: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn finite_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.series
            .iter()
            .flat_map(|s| s.points.iter())
            .chain(self.bands.iter().flat_map(|b| b.upper.iter()))
            .copied()
            .filter(move |(x, y)| {
                x.is_finite() && y.is_finite() && (self.y_scale == Scale::Linear || *y > 0.0)
            })
    }

    pub fn render(&self) -> String {
        let xs: Vec<f64> = self.finite_points().map(|(x, _)| x).collect();
        let ys: Vec<f64> = self.finite_points().map(|(_, y)| y).collect();
        let (x_min, x_max) = padded_range(&xs, false);
        let (y_min, y_max) = match self.y_scale {
            Scale::Linear => padded_range(&ys, false),
            Scale::Log => padded_range(&ys, true),
        };
        let map_y = |v: f64| -> f64 {
            let t = match self.y_scale {
                Scale::Linear => (v - y_min) / (y_max - y_min),
                Scale::Log => (v.log10() - y_min.log10()) / (y_max.log10() - y_min.log10()),
            };
            HEIGHT - MARGIN_B - t * (HEIGHT - MARGIN_T - MARGIN_B)
        };
        let map_x =
            |v: f64| MARGIN_L + (v - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R);

        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");

        // gridlines and ticks
        let x_ticks = linear_ticks(x_min, x_max);
        let y_ticks = match self.y_scale {
            Scale::Linear => linear_ticks(y_min, y_max),
            Scale::Log => log_ticks(y_min, y_max),
        };
        for &t in &x_ticks {
            let x = map_x(t);
            let _ = writeln!(
                out,
                "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>",
                MARGIN_T,
                HEIGHT - MARGIN_B
            );
            let _ = writeln!(
                out,
                "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" fill=\"#333333\">{}</text>",
                HEIGHT - MARGIN_B + 18.0,
                fmt_tick(t)
            );
        }
        for &t in &y_ticks {
            let y = map_y(t);
            let _ = writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>",
                MARGIN_L,
                WIDTH - MARGIN_R
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"end\" fill=\"#333333\">{}</text>",
                MARGIN_L - 7.0,
                y + 4.0,
                fmt_tick(t)
            );
        }

        // exclusion bands under their curves
        for band in &self.bands {
            let pts: Vec<(f64, f64)> = band
                .upper
                .iter()
                .copied()
                .filter(|(x, y)| {
                    x.is_finite() && (self.y_scale == Scale::Linear || *y > 0.0)
                })
                .map(|(x, y)| (x, y.min(y_max).max(y_min)))
                .collect();
            if pts.len() < 2 {
                continue;
            }
            let mut d = String::new();
            for (x, y) in &pts {
                let _ = write!(d, "{:.2},{:.2} ", map_x(*x), map_y(*y));
            }
            let _ = write!(d, "{:.2},{:.2} ", map_x(pts.last().unwrap().0), HEIGHT - MARGIN_B);
            let _ = write!(d, "{:.2},{:.2}", map_x(pts[0].0), HEIGHT - MARGIN_B);
            let _ = writeln!(
                out,
                "<polygon points=\"{d}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>",
                band.color
            );
        }

        // series: polyline segments broken at non-plottable points
        for s in &self.series {
            let dash = if s.dashed { " stroke-dasharray=\"7,5\"" } else { "" };
            if s.line {
                let mut segment: Vec<(f64, f64)> = Vec::new();
                let mut segments: Vec<Vec<(f64, f64)>> = Vec::new();
                for &(x, y) in &s.points {
                    let plottable = x.is_finite()
                        && y.is_finite()
                        && (self.y_scale == Scale::Linear || y > 0.0);
                    if plottable {
                        segment.push((x, y));
                    } else if !segment.is_empty() {
                        segments.push(std::mem::take(&mut segment));
                    }
                }
                if !segment.is_empty() {
                    segments.push(segment);
                }
                for seg in segments {
                    if seg.len() < 2 {
                        continue;
                    }
                    let mut d = String::new();
                    for (x, y) in seg {
                        let _ = write!(d, "{:.2},{:.2} ", map_x(x), map_y(y));
                    }
                    let _ = writeln!(
                        out,
                        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{dash}/>",
                        d.trim_end(),
                        s.color
                    );
                }
            }
            if s.markers {
                for &(x, y) in &s.points {
                    if !x.is_finite()
                        || !y.is_finite()
                        || (self.y_scale == Scale::Log && y <= 0.0)
                    {
                        continue;
                    }
                    let _ = writeln!(
                        out,
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{}\"/>",
                        map_x(x),
                        map_y(y),
                        s.color
                    );
                }
            }
        }

        // frame
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"/>",
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        );

        // labels
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"26\" font-size=\"17\" text-anchor=\"middle\" fill=\"#111111\">{}</text>",
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"15\" text-anchor=\"middle\" fill=\"#111111\">{}</text>",
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"20\" y=\"{:.2}\" font-size=\"15\" text-anchor=\"middle\" fill=\"#111111\" transform=\"rotate(-90 20 {:.2})\">{}</text>",
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            escape(&self.y_label)
        );

        // legend
        let mut ly = MARGIN_T + 16.0;
        let lx = MARGIN_L + 14.0;
        for entry in self
            .bands
            .iter()
            .map(|b| (b.label.clone(), b.color, false, true))
            .chain(self.series.iter().map(|s| (s.label.clone(), s.color, s.dashed, false)))
        {
            let (label, color, dashed, filled) = entry;
            if label.is_empty() {
                continue;
            }
            if filled {
                let _ = writeln!(
                    out,
                    "<rect x=\"{lx}\" y=\"{:.2}\" width=\"26\" height=\"10\" fill=\"{color}\" fill-opacity=\"0.3\"/>",
                    ly - 8.0
                );
            } else {
                let dash = if dashed { " stroke-dasharray=\"7,5\"" } else { "" };
                let _ = writeln!(
                    out,
                    "<line x1=\"{lx}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"2\"{dash}/>",
                    ly - 3.0,
                    lx + 26.0,
                    ly - 3.0
                );
            }
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{ly:.2}\" font-size=\"13\" fill=\"#111111\">{}</text>",
                lx + 33.0,
                escape(&label)
            );
            ly += 17.0;
        }

        // free-form notes under the legend
        for note in &self.notes {
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{ly:.2}\" font-size=\"12\" fill=\"#555555\">{}</text>",
                lx,
                escape(note)
            );
            ly += 15.0;
        }

        out.push_str("</svg>\n");
        out
    }
}

fn padded_range(values: &[f64], log: bool) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return if log { (0.1, 10.0) } else { (0.0, 1.0) };
    }
    if log {
        (lo / 1.5, hi * 1.5)
    } else {
        let span = (hi - lo).max(1e-12);
        let pad = 0.05 * span;
        ((lo - pad).min(0.0).max(lo - pad), hi + pad)
    }
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        mag
    } else if norm < 3.5 {
        2.0 * mag
    } else if norm < 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let mut ticks = Vec::new();
    let mut t = (lo / step).ceil() * step;
    while t <= hi + 1e-9 * step {
        // normalize the -0.0 tick
        ticks.push(if t == 0.0 { 0.0 } else { t });
        t += step;
    }
    ticks
}

fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let first = lo.log10().ceil() as i32;
    let last = hi.log10().floor() as i32;
    (first..=last).map(|e| 10f64.powi(e)).collect()
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-3) {
        format!("{v:e}")
    } else {
        let rounded = (v * 1e6).round() / 1e6;
        format!("{rounded}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
