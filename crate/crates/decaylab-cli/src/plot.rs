//! Hand-rolled SVG log-log plots: per-(run, m) norm decay with the fitted
//! line and the predicted-slope guide, plus one campaign summary grid.
//!
//! File naming is stable: `<out>/<run>/plot_m<m>.svg` per order and
//! `<out>/campaign_summary.svg` for the grid. Aborted runs get a placeholder
//! panel carrying the warning text.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use decaylab::analysis::DecayFit;
use decaylab::models::RunRecord;

use crate::campaign::{analysis_view, CampaignReport};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

struct LogFrame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl LogFrame {
    fn from_points(pts: &[(f64, f64)]) -> Option<Self> {
        let xs: Vec<f64> = pts.iter().map(|p| p.0.log10()).collect();
        let ys: Vec<f64> = pts
            .iter()
            .filter(|p| p.1 > 0.0)
            .map(|p| p.1.log10())
            .collect();
        if xs.is_empty() || ys.is_empty() {
            return None;
        }
        let (x0, x1) = bounds(&xs);
        let (y0, y1) = bounds(&ys);
        Some(Self {
            x0,
            x1: if x1 > x0 { x1 } else { x0 + 1.0 },
            y0,
            y1: if y1 > y0 { y1 } else { y0 + 1.0 },
        })
    }

    fn sx(&self, t: f64) -> f64 {
        MARGIN_L + (t.log10() - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn sy(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_B
            - (v.log10() - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min.floor(), max.ceil())
}

/// One log-log panel: data points, fitted power law, and a guide line with
/// the predicted slope anchored at the fit midpoint.
pub fn log_log_plot(
    title: &str,
    points: &[(f64, f64)],
    fit: Option<&DecayFit>,
    predicted_slope: Option<f64>,
) -> String {
    let positive: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .collect();
    let Some(frame) = LogFrame::from_points(&positive) else {
        return placeholder_plot(title, "no positive samples to plot");
    };

    let mut svg = svg_open(title);

    // decade grid
    for dx in (frame.x0 as i64)..=(frame.x1 as i64) {
        let x = frame.sx(10f64.powi(dx as i32));
        svg.push_str(&format!(
            "<line x1='{x:.1}' y1='{MARGIN_T}' x2='{x:.1}' y2='{:.1}' stroke='#ddd'/>\
             <text x='{x:.1}' y='{:.1}' font-size='11' text-anchor='middle'>1e{dx}</text>\n",
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 16.0
        ));
    }
    for dy in (frame.y0 as i64)..=(frame.y1 as i64) {
        let y = frame.sy(10f64.powi(dy as i32));
        svg.push_str(&format!(
            "<line x1='{MARGIN_L}' y1='{y:.1}' x2='{:.1}' y2='{y:.1}' stroke='#ddd'/>\
             <text x='{:.1}' y='{:.1}' font-size='11' text-anchor='end'>1e{dy}</text>\n",
            WIDTH - MARGIN_R,
            MARGIN_L - 6.0,
            y + 4.0
        ));
    }

    // data
    let path: Vec<String> = positive
        .iter()
        .map(|&(t, v)| format!("{:.2},{:.2}", frame.sx(t), frame.sy(v)))
        .collect();
    svg.push_str(&format!(
        "<polyline points='{}' fill='none' stroke='#1f77b4' stroke-width='1.5'/>\n",
        path.join(" ")
    ));

    let mut legend_y = MARGIN_T + 14.0;
    if let Some(f) = fit {
        let (t0, t1) = (f.window[0], f.window[1]);
        let (v0, v1) = (f.prefactor * t0.powf(f.exponent), f.prefactor * t1.powf(f.exponent));
        svg.push_str(&format!(
            "<line x1='{:.2}' y1='{:.2}' x2='{:.2}' y2='{:.2}' stroke='#d62728' stroke-width='1.5'/>\n",
            frame.sx(t0),
            frame.sy(v0),
            frame.sx(t1),
            frame.sy(v1)
        ));
        svg.push_str(&format!(
            "<text x='{:.1}' y='{legend_y:.1}' font-size='12' fill='#d62728'>fit slope = {:.3}</text>\n",
            MARGIN_L + 8.0,
            f.exponent
        ));
        legend_y += 16.0;

        if let Some(p) = predicted_slope {
            let t_mid = (t0 * t1).sqrt();
            let c_guide = f.prefactor * t_mid.powf(f.exponent - p);
            let (g0, g1) = (c_guide * t0.powf(p), c_guide * t1.powf(p));
            svg.push_str(&format!(
                "<line x1='{:.2}' y1='{:.2}' x2='{:.2}' y2='{:.2}' stroke='#2ca02c' \
                 stroke-width='1.5' stroke-dasharray='6,4'/>\n",
                frame.sx(t0),
                frame.sy(g0),
                frame.sx(t1),
                frame.sy(g1)
            ));
            svg.push_str(&format!(
                "<text x='{:.1}' y='{legend_y:.1}' font-size='12' fill='#2ca02c'>predicted slope = {p:.3}</text>\n",
                MARGIN_L + 8.0
            ));
        }
    }

    svg.push_str("</svg>\n");
    svg
}

/// Gray panel with a warning annotation, emitted for aborted or empty runs.
pub fn placeholder_plot(title: &str, warning: &str) -> String {
    let mut svg = svg_open(title);
    svg.push_str(&format!(
        "<rect x='{MARGIN_L}' y='{MARGIN_T}' width='{:.1}' height='{:.1}' fill='#f3f3f3' stroke='#bbb'/>\n\
         <text x='{:.1}' y='{:.1}' font-size='13' fill='#a33' text-anchor='middle'>{}</text>\n</svg>\n",
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B,
        WIDTH / 2.0,
        HEIGHT / 2.0,
        escape(warning)
    ));
    svg
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{WIDTH}' height='{HEIGHT}' \
         viewBox='0 0 {WIDTH} {HEIGHT}' font-family='sans-serif'>\n\
         <rect width='{WIDTH}' height='{HEIGHT}' fill='white'/>\n\
         <text x='{:.1}' y='24' font-size='15' text-anchor='middle'>{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Emit per-(run, m) plots plus the campaign summary grid into `out_dir`.
/// Runs whose record or series are missing get placeholder panels.
pub fn emit_plots(report: &CampaignReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut summary_panels: Vec<String> = Vec::new();

    for entry in &report.runs {
        let run_dir = out_dir.join(&entry.name);
        fs::create_dir_all(&run_dir)?;
        let record = read_record(&run_dir.join("record.json"));

        match (&record, entry.status.as_str()) {
            (Some(record), "ok") => {
                let view = analysis_view(record);
                for m in 0..=view.m_hat {
                    let points = view.u_norm_series(m);
                    let fit = entry
                        .fits
                        .get(m as usize)
                        .and_then(|f| f.as_ref());
                    let predicted = entry
                        .upper_checks
                        .iter()
                        .find(|c| c.m == m)
                        .map(|c| c.predicted_exponent);
                    let title = format!("{} — |D^{m} u(t)|", entry.name);
                    let svg = log_log_plot(&title, &points, fit, predicted);
                    let path = run_dir.join(format!("plot_m{m}.svg"));
                    fs::write(&path, &svg)
                        .with_context(|| format!("writing {}", path.display()))?;
                    if m == 0 {
                        summary_panels.push(svg);
                    }
                    written.push(path);
                }
            }
            _ => {
                let warning = entry
                    .abort_reason
                    .clone()
                    .unwrap_or_else(|| "record missing".into());
                let svg = placeholder_plot(&entry.name, &warning);
                let path = run_dir.join("plot_m0.svg");
                fs::write(&path, &svg)?;
                summary_panels.push(svg);
                written.push(path);
            }
        }
    }

    let summary = summary_grid(&summary_panels);
    let path = out_dir.join("campaign_summary.svg");
    fs::write(&path, summary)?;
    written.push(path);
    Ok(written)
}

fn read_record(path: &Path) -> Option<RunRecord> {
    let text = fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

/// Pack the per-run m = 0 panels into one grid SVG, three panels per row.
fn summary_grid(panels: &[String]) -> String {
    const SCALE: f64 = 0.5;
    const COLS: usize = 3;
    let rows = panels.len().div_ceil(COLS);
    let cell_w = WIDTH * SCALE;
    let cell_h = HEIGHT * SCALE;
    let total_w = cell_w * COLS.min(panels.len().max(1)) as f64;
    let total_h = cell_h * rows.max(1) as f64;

    let mut svg = format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{total_w}' height='{total_h}' \
         viewBox='0 0 {total_w} {total_h}'>\n"
    );
    for (i, panel) in panels.iter().enumerate() {
        let x = (i % COLS) as f64 * cell_w;
        let y = (i / COLS) as f64 * cell_h;
        // strip the outer <svg> wrapper, keep the inner drawing
        let inner = panel
            .split_once('\n')
            .map_or("", |(_, rest)| rest)
            .trim_end_matches("</svg>\n");
        svg.push_str(&format!(
            "<g transform='translate({x},{y}) scale({SCALE})'>\n{inner}</g>\n"
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_annotations_match_the_fit_to_three_decimals() {
        let points: Vec<(f64, f64)> = (0..24)
            .map(|i| {
                let t = 1.0 * 1.5f64.powi(i);
                (t, 7.0 * t.powf(-1.5))
            })
            .collect();
        let fit = DecayFit {
            exponent: -1.5,
            prefactor: 7.0,
            window: [points[0].0, points.last().unwrap().0],
            residual: 0.0,
            n_points: points.len(),
        };
        let svg = log_log_plot("test", &points, Some(&fit), Some(-1.5));
        assert!(svg.contains("fit slope = -1.500"), "annotation missing: {svg}");
        assert!(svg.contains("predicted slope = -1.500"));
        assert!(svg.contains("polyline"));
    }

    #[test]
    fn placeholder_carries_the_warning() {
        let svg = placeholder_plot("broken run", "simulation aborted: NaN at t = 1");
        assert!(svg.contains("simulation aborted"));
        assert!(svg.contains("&lt;") || !svg.contains('<') || svg.contains("rect"));
    }

    #[test]
    fn fit_and_guide_lines_overlap_for_exact_power_laws() {
        // guide anchored at the fit midpoint with the same slope must
        // reproduce the same segment endpoints
        let points: Vec<(f64, f64)> = (0..16)
            .map(|i| {
                let t = 2.0f64.powi(i);
                (t, 3.0 * t.powf(-0.5))
            })
            .collect();
        let fit = DecayFit {
            exponent: -0.5,
            prefactor: 3.0,
            window: [1.0, 32768.0],
            residual: 0.0,
            n_points: 16,
        };
        let svg = log_log_plot("overlap", &points, Some(&fit), Some(-0.5));
        // two line elements with identical endpoints (one solid, one dashed)
        let lines: Vec<&str> = svg
            .lines()
            .filter(|l| l.contains("stroke='#d62728'") || l.contains("stroke='#2ca02c'"))
            .collect();
        assert_eq!(lines.len(), 2);
        let coords = |s: &str| -> Vec<String> {
            s.split(['\'', ' '])
                .filter(|w| w.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-'))
                .take(4)
                .map(str::to_string)
                .collect()
        };
        assert_eq!(coords(lines[0]), coords(lines[1]), "lines do not overlap");
    }
}
