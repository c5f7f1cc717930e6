//! Static SVG rendering for the figure extracts.
//!
//! The renderer consumes the CSV produced by `harness::figure_data` and
//! emits a self-contained SVG 1.1 document with no external resources.
//! Output is a pure function of the input bytes: same CSV in, same SVG
//! out. Three visual forms cover every panel: line-with-band trajectories,
//! scatters, and complex-plane spectra (which always carry the unit circle
//! for reference). Spectral-radius plots get a natural-log y axis.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 160.0; // room for the legend
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 52.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Visual form of a plot, normally inferred from the extract's header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotStyle {
    /// One polyline per series with an optional 2-SE band.
    Line,
    /// One circle per row.
    Scatter,
    /// Complex-plane scatter with the unit circle drawn for reference.
    Spectrum,
}

/// Pick the visual form from the extract header: `re,im` columns mean a
/// spectrum, per-epoch means and per-gamma medians are lines, everything
/// else is a scatter.
pub fn infer_style(header: &[String]) -> PlotStyle {
    let names: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    if names.ends_with(&["re", "im"]) {
        PlotStyle::Spectrum
    } else if names.get(1) == Some(&"epoch") && names.get(3) == Some(&"two_se")
        || names
            .get(2)
            .is_some_and(|n| n.starts_with("median_"))
    {
        PlotStyle::Line
    } else {
        PlotStyle::Scatter
    }
}

struct Extract {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn parse_extract(csv: &str) -> Result<Extract> {
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
    let Some(head) = lines.next() else {
        return Ok(Extract { header: Vec::new(), rows: Vec::new() });
    };
    let header: Vec<String> = head.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let cells: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if cells.len() != header.len() {
            return Err(Error::InvalidArg(format!(
                "extract row {} has {} cells, header has {}",
                i + 2,
                cells.len(),
                header.len()
            )));
        }
        rows.push(cells);
    }
    Ok(Extract { header, rows })
}

fn parse_cell(extract: &Extract, row: usize, col: usize) -> Result<f64> {
    let cell = &extract.rows[row][col];
    cell.parse::<f64>().map_err(|_| {
        Error::InvalidArg(format!(
            "extract row {} column {:?}: {cell:?} is not a number",
            row + 2,
            extract.header[col]
        ))
    })
}

/// Coordinate mapping from data space to the pixel viewport.
struct Scale {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    log_y: bool,
}

impl Scale {
    fn from_ranges(xs: &[f64], ys: &[f64], log_y: bool) -> Scale {
        let (mut x_min, mut x_max) = min_max(xs);
        let (mut y_min, mut y_max) = min_max(ys);
        if x_min == x_max {
            x_min -= 0.5;
            x_max += 0.5;
        }
        if y_min == y_max {
            if log_y {
                y_min /= 2.0;
                y_max *= 2.0;
            } else {
                y_min -= 0.5;
                y_max += 0.5;
            }
        }
        // 5% padding so marks never sit on the frame.
        if log_y {
            let pad = (y_max / y_min).powf(0.05);
            y_min /= pad;
            y_max *= pad;
        } else {
            let pad = (y_max - y_min) * 0.05;
            y_min -= pad;
            y_max += pad;
        }
        let pad = (x_max - x_min) * 0.05;
        Scale {
            x_min: x_min - pad,
            x_max: x_max + pad,
            y_min,
            y_max,
            log_y,
        }
    }

    fn px(&self, x: f64) -> f64 {
        let t = (x - self.x_min) / (self.x_max - self.x_min);
        MARGIN_LEFT + t * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let t = if self.log_y {
            (y.ln() - self.y_min.ln()) / (self.y_max.ln() - self.y_min.ln())
        } else {
            (y - self.y_min) / (self.y_max - self.y_min)
        };
        HEIGHT - MARGIN_BOTTOM - t * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in xs {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (lo, hi)
}

/// Fixed-width coordinate formatting keeps the output byte-stable.
fn c(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn document_open(out: &mut String, title: &str) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    let _ = write!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    );
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{}</text>\n",
        c(WIDTH / 2.0),
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn empty_plot(title: &str) -> String {
    let mut out = String::new();
    document_open(&mut out, title);
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\" \
         fill=\"#666666\" text-anchor=\"middle\">no data</text>\n",
        c(WIDTH / 2.0),
        c(HEIGHT / 2.0)
    );
    out.push_str("</svg>\n");
    out
}

fn axes(out: &mut String, scale: &Scale, x_label: &str, y_label: &str) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = write!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>\n",
        c(x0), c(y0), c(x1), c(y0)
    );
    let _ = write!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>\n",
        c(x0), c(y0), c(x0), c(y1)
    );
    const TICKS: usize = 5;
    for i in 0..=TICKS {
        let t = i as f64 / TICKS as f64;
        let xv = scale.x_min + t * (scale.x_max - scale.x_min);
        let xp = scale.px(xv);
        let _ = write!(
            out,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n",
            c(xp), c(y0), c(y0 + 5.0)
        );
        let _ = write!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            c(xp), c(y0 + 18.0), tick_label(xv)
        );
        let yv = if scale.log_y {
            (scale.y_min.ln() + t * (scale.y_max.ln() - scale.y_min.ln())).exp()
        } else {
            scale.y_min + t * (scale.y_max - scale.y_min)
        };
        let yp = scale.py(yv);
        let _ = write!(
            out,
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#000000\"/>\n",
            c(yp), c(x0 - 5.0), c(x0)
        );
        let _ = write!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            c(x0 - 8.0), c(yp + 4.0), tick_label(yv)
        );
    }
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>\n",
        c((x0 + x1) / 2.0),
        c(HEIGHT - 14.0),
        escape(x_label)
    );
    let y_axis_label = if scale.log_y {
        format!("ln-scale {y_label}")
    } else {
        y_label.to_string()
    };
    let _ = write!(
        out,
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        c((y0 + y1) / 2.0),
        c((y0 + y1) / 2.0),
        escape(&y_axis_label)
    );
}

fn legend(out: &mut String, series: &[(String, &str)]) {
    let x = WIDTH - MARGIN_RIGHT + 16.0;
    for (i, (name, color)) in series.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + i as f64 * 18.0;
        let _ = write!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            c(x), c(y - 9.0), color
        );
        let _ = write!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            c(x + 14.0), c(y), escape(name)
        );
    }
}

/// Series key: first column, plus the percent column for spectra.
fn series_key(extract: &Extract, row: usize, style: PlotStyle) -> String {
    match style {
        PlotStyle::Spectrum if extract.header.get(1).map(String::as_str) == Some("percent") => {
            format!("{} {}%", extract.rows[row][0], extract.rows[row][1])
        }
        _ => extract.rows[row][0].clone(),
    }
}

fn series_order(extract: &Extract, style: PlotStyle) -> Vec<String> {
    let mut order = Vec::new();
    for i in 0..extract.rows.len() {
        let key = series_key(extract, i, style);
        if !order.contains(&key) {
            order.push(key);
        }
    }
    order
}

fn render_line(extract: &Extract, title: &str) -> Result<String> {
    // Trajectory form: kind,epoch,mean_*,two_se,n
    // Grid-median form: kind,gamma,median_*,n
    let trajectory = extract.header.get(3).map(String::as_str) == Some("two_se");
    let (x_col, y_col, band_col) = if trajectory { (1, 2, Some(3)) } else { (1, 2, None) };
    let y_name = extract.header[y_col].clone();
    // Spectral-radius panels are read on a natural-log axis.
    let log_y = y_name.contains("lambda_max");

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut usable = vec![false; extract.rows.len()];
    for i in 0..extract.rows.len() {
        let x = parse_cell(extract, i, x_col)?;
        let y = parse_cell(extract, i, y_col)?;
        if log_y && !(y > 0.0) {
            // A log axis cannot place non-positive values.
            continue;
        }
        usable[i] = true;
        xs.push(x);
        ys.push(y);
        if let Some(b) = band_col {
            if !extract.rows[i][b].is_empty() {
                let se2 = parse_cell(extract, i, b)?;
                ys.push(y + se2);
                if !log_y || (y - se2) > 0.0 {
                    ys.push(y - se2);
                }
            }
        }
    }
    if xs.is_empty() {
        return Ok(empty_plot(title));
    }
    let scale = Scale::from_ranges(&xs, &ys, log_y);
    let mut out = String::new();
    document_open(&mut out, title);
    axes(&mut out, &scale, &extract.header[x_col], &y_name);

    let order = series_order(extract, PlotStyle::Line);
    let mut legend_entries = Vec::new();
    for (si, key) in order.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        legend_entries.push((key.clone(), color));
        let mut pts: Vec<(f64, f64, Option<f64>)> = Vec::new();
        for i in 0..extract.rows.len() {
            if !usable[i] || &extract.rows[i][0] != key {
                continue;
            }
            let x = parse_cell(extract, i, x_col)?;
            let y = parse_cell(extract, i, y_col)?;
            let band = match band_col {
                Some(b) if !extract.rows[i][b].is_empty() => Some(parse_cell(extract, i, b)?),
                _ => None,
            };
            pts.push((x, y, band));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pts.is_empty() {
            continue;
        }
        // 2-SE band first so the line draws on top.
        let banded: Vec<&(f64, f64, Option<f64>)> =
            pts.iter().filter(|p| p.2.is_some()).collect();
        if banded.len() >= 2 {
            let mut d = String::from("M");
            for p in &banded {
                let hi = p.1 + p.2.expect("filtered to Some");
                let _ = write!(d, " {} {}", c(scale.px(p.0)), c(scale.py(hi)));
            }
            for p in banded.iter().rev() {
                let lo = p.1 - p.2.expect("filtered to Some");
                let lo = if log_y { lo.max(scale.y_min) } else { lo };
                let _ = write!(d, " L {} {}", c(scale.px(p.0)), c(scale.py(lo)));
            }
            d.push_str(" Z");
            let _ = write!(
                out,
                "<path d=\"{d}\" fill=\"{color}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n"
            );
        }
        let mut points = String::new();
        for p in &pts {
            let _ = write!(points, "{},{} ", c(scale.px(p.0)), c(scale.py(p.1)));
        }
        let _ = write!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            points.trim_end()
        );
    }
    legend(&mut out, &legend_entries);
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_scatter(extract: &Extract, title: &str) -> Result<String> {
    // The last two columns are (x, y); everything before them keys the series.
    let ncol = extract.header.len();
    if ncol < 2 {
        return Err(Error::InvalidArg("scatter extract needs at least two columns".into()));
    }
    let (x_col, y_col) = (ncol - 2, ncol - 1);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..extract.rows.len() {
        xs.push(parse_cell(extract, i, x_col)?);
        ys.push(parse_cell(extract, i, y_col)?);
    }
    if xs.is_empty() {
        return Ok(empty_plot(title));
    }
    let scale = Scale::from_ranges(&xs, &ys, false);
    let mut out = String::new();
    document_open(&mut out, title);
    axes(&mut out, &scale, &extract.header[x_col], &extract.header[y_col]);
    let order = series_order(extract, PlotStyle::Scatter);
    let mut legend_entries = Vec::new();
    for (si, key) in order.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        legend_entries.push((key.clone(), color));
        for i in 0..extract.rows.len() {
            if &extract.rows[i][0] != key {
                continue;
            }
            let _ = write!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.7\"/>\n",
                c(scale.px(xs[i])),
                c(scale.py(ys[i]))
            );
        }
    }
    legend(&mut out, &legend_entries);
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_spectrum(extract: &Extract, title: &str) -> Result<String> {
    let ncol = extract.header.len();
    let (re_col, im_col) = (ncol - 2, ncol - 1);
    let mut res = Vec::new();
    let mut ims = Vec::new();
    for i in 0..extract.rows.len() {
        res.push(parse_cell(extract, i, re_col)?);
        ims.push(parse_cell(extract, i, im_col)?);
    }
    if res.is_empty() {
        return Ok(empty_plot(title));
    }
    // Symmetric square viewport that always contains the unit circle.
    let mut r = 1.05_f64;
    for i in 0..res.len() {
        r = r.max(res[i].abs() * 1.05).max(ims[i].abs() * 1.05);
    }
    let side = (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM).min(WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let cx = MARGIN_LEFT + side / 2.0;
    let cy = MARGIN_TOP + side / 2.0;
    let px = |v: f64| cx + v / r * side / 2.0;
    let py = |v: f64| cy - v / r * side / 2.0;

    let mut out = String::new();
    document_open(&mut out, title);
    // Real and imaginary axes through the origin, then the unit circle.
    let _ = write!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#cccccc\"/>\n",
        c(px(-r)), c(py(0.0)), c(px(r)), c(py(0.0))
    );
    let _ = write!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#cccccc\"/>\n",
        c(px(0.0)), c(py(-r)), c(px(0.0)), c(py(r))
    );
    let _ = write!(
        out,
        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#888888\" \
         stroke-dasharray=\"4 3\"/>\n",
        c(cx), c(cy), c(side / 2.0 / r)
    );
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
         fill=\"#888888\">|lambda| = 1</text>\n",
        c(px(0.0) + 4.0),
        c(py(1.0) - 4.0)
    );
    let order = series_order(extract, PlotStyle::Spectrum);
    let mut legend_entries = Vec::new();
    for (si, key) in order.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        legend_entries.push((key.clone(), color));
        for i in 0..extract.rows.len() {
            if series_key(extract, i, PlotStyle::Spectrum) != *key {
                continue;
            }
            let _ = write!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{color}\" fill-opacity=\"0.6\"/>\n",
                c(px(res[i])),
                c(py(ims[i]))
            );
        }
    }
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">Re</text>\n",
        c(px(r) - 12.0),
        c(py(0.0) + 16.0)
    );
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">Im</text>\n",
        c(px(0.0) - 14.0),
        c(py(r) + 12.0)
    );
    legend(&mut out, &legend_entries);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Render a figure extract to a standalone SVG document.
///
/// `style` of `None` infers the form from the header. Empty extracts
/// (header only, or no content at all) yield a labeled empty plot rather
/// than an error.
pub fn render_svg(extract_csv: &str, style: Option<PlotStyle>, title: &str) -> Result<String> {
    let extract = parse_extract(extract_csv)?;
    if extract.rows.is_empty() {
        return Ok(empty_plot(title));
    }
    let style = style.unwrap_or_else(|| infer_style(&extract.header));
    match style {
        PlotStyle::Line => render_line(&extract, title),
        PlotStyle::Scatter => render_scatter(&extract, title),
        PlotStyle::Spectrum => render_spectrum(&extract, title),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_line_has_exactly_one_polyline_with_two_vertices() {
        let csv = "kind,epoch,mean_q,two_se,n\nl1,0,1.00000000e-1,,1\nl1,1,3.00000000e-1,,1\n";
        let svg = render_svg(csv, None, "q").unwrap();
        let polylines: Vec<&str> = svg.matches("<polyline").collect();
        assert_eq!(polylines.len(), 1);
        let start = svg.find("points=\"").unwrap() + "points=\"".len();
        let end = svg[start..].find('"').unwrap() + start;
        let vertices = svg[start..end].split_whitespace().count();
        assert_eq!(vertices, 2);
        // Blank SE cells mean no band path.
        assert!(!svg.contains("<path"));
    }

    #[test]
    fn band_appears_when_se_is_present() {
        let csv = "kind,epoch,mean_q,two_se,n\n\
                   l1,0,1.00000000e-1,2.00000000e-2,4\n\
                   l1,1,3.00000000e-1,2.00000000e-2,4\n";
        let svg = render_svg(csv, None, "q").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("fill-opacity=\"0.2\""));
    }

    #[test]
    fn empty_extract_renders_a_labeled_empty_plot() {
        for csv in ["", "kind,epoch,mean_q,two_se,n\n"] {
            let svg = render_svg(csv, None, "q").unwrap();
            assert!(svg.starts_with("<?xml"));
            assert!(svg.contains("no data"));
            assert!(!svg.contains("<polyline"));
        }
    }

    #[test]
    fn output_is_byte_deterministic() {
        let csv = "kind,gamma,seed,q,h_w\nsernn,1.00000000e-4,0,5.00000000e-1,9.00000000e-2\n\
                   l1,0.00000000e0,1,2.00000000e-1,1.10000000e-1\n";
        let a = render_svg(csv, None, "scatter").unwrap();
        let b = render_svg(csv, None, "scatter").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scatter_has_one_mark_per_row() {
        let mut csv = String::from("kind,gamma,seed,q,h_w\n");
        for i in 0..7 {
            csv.push_str(&format!("l1,0.0,{i},{}.0,{}.5\n", i, i));
        }
        let svg = render_svg(&csv, None, "scatter").unwrap();
        assert_eq!(svg.matches("r=\"3\"").count(), 7);
    }

    #[test]
    fn spectrum_draws_unit_circle_and_mirrors_conjugate_pairs() {
        let csv = "kind,percent,gamma,seed,re,im\n\
                   sernn,10,1.0e-5,0,5.00000000e-1,2.50000000e-1\n\
                   sernn,10,1.0e-5,0,5.00000000e-1,-2.50000000e-1\n\
                   sernn,10,1.0e-5,0,9.00000000e-1,0.00000000e0\n";
        let svg = render_svg(csv, None, "spectra").unwrap();
        assert!(svg.contains("stroke-dasharray"), "unit circle missing");
        assert!(svg.contains("|lambda| = 1"));
        // Marks of a conjugate pair sit symmetrically about the real axis.
        let cys: Vec<f64> = svg
            .lines()
            .filter(|l| l.contains("r=\"2.5\""))
            .map(|l| {
                let s = l.find("cy=\"").unwrap() + 4;
                let e = l[s..].find('"').unwrap() + s;
                l[s..e].parse::<f64>().unwrap()
            })
            .collect();
        assert_eq!(cys.len(), 3);
        let mid = (cys[0] + cys[1]) / 2.0;
        assert!((mid - cys[2]).abs() < 0.02, "conjugate marks not mirrored");
    }

    #[test]
    fn spectral_radius_axis_is_logarithmic() {
        let csv = "kind,gamma,median_lambda_max,n\n\
                   l1,0.0,1.00000000e-2,4\n\
                   l1,0.5,1.00000000e0,4\n\
                   l1,1.0,1.00000000e2,4\n";
        let svg = render_svg(csv, None, "radius").unwrap();
        assert!(svg.contains("ln-scale"));
        let start = svg.find("points=\"").unwrap() + 8;
        let end = svg[start..].find('"').unwrap() + start;
        let ys: Vec<f64> = svg[start..end]
            .split_whitespace()
            .map(|p| p.split(',').nth(1).unwrap().parse::<f64>().unwrap())
            .collect();
        assert_eq!(ys.len(), 3);
        // Equal value ratios map to equal pixel steps on a log axis.
        let d1 = ys[0] - ys[1];
        let d2 = ys[1] - ys[2];
        assert!((d1 - d2).abs() < 0.05, "log spacing broken: {d1} vs {d2}");
    }

    #[test]
    fn style_inference_matches_the_extract_headers() {
        let h = |s: &str| s.split(',').map(str::to_string).collect::<Vec<_>>();
        assert_eq!(infer_style(&h("kind,epoch,mean_q,two_se,n")), PlotStyle::Line);
        assert_eq!(infer_style(&h("kind,gamma,median_h_lambda,n")), PlotStyle::Line);
        assert_eq!(infer_style(&h("kind,gamma,seed,q,h_w")), PlotStyle::Scatter);
        assert_eq!(
            infer_style(&h("kind,gamma,seed,distance,probability")),
            PlotStyle::Scatter
        );
        assert_eq!(infer_style(&h("kind,percent,gamma,seed,re,im")), PlotStyle::Spectrum);
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let short = "kind,gamma,seed,q,h_w\nl1,0.0,1\n";
        assert!(render_svg(short, None, "t").is_err());
        let not_a_number = "kind,gamma,seed,q,h_w\nl1,0.0,0,abc,1.0\n";
        assert!(render_svg(not_a_number, None, "t").is_err());
    }
}
