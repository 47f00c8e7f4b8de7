//! SVG figure export: the model-by-scenario RMSE heatmap and actual-vs-
//! predicted trajectory overlays. Everything stays inside a minimal SVG
//! subset (rect, path, text) so outputs are diffable and dependency-free.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use crate::error::{ChaosError, Result};
use crate::eval::metrics::MetricsRecord;
use crate::integrator::fmt_f64;
use crate::models::{ModelKind, ALL_KINDS};

/// The aggregated model-by-scenario matrix behind the heatmap artifacts.
/// Cells hold the median RMSE over seeds; missing cells stay `None`.
#[derive(Debug, Clone)]
pub struct HeatmapTable {
    pub models: Vec<ModelKind>,
    pub scenarios: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
}

/// Aggregates records into the matrix. Models appear in zoo order, scenarios
/// in first-seen order. Duplicate (model, scenario, seed) rows fail.
pub fn rmse_heatmap(records: &[MetricsRecord]) -> Result<HeatmapTable> {
    if records.is_empty() {
        return Err(ChaosError::InvalidParams("no metrics records".into()));
    }
    let mut seen = BTreeSet::new();
    let mut scenarios: Vec<String> = Vec::new();
    for r in records {
        r.validate()?;
        let scen = format!("{}/{}", r.scenario.label(), r.scenario.test_condition);
        let key = (r.model.name(), scen.clone(), r.seed);
        if !seen.insert(key) {
            return Err(ChaosError::InvalidParams(format!(
                "duplicate record for {} on {scen} seed {}",
                r.model, r.seed
            )));
        }
        if !scenarios.contains(&scen) {
            scenarios.push(scen);
        }
    }
    let models: Vec<ModelKind> = ALL_KINDS
        .into_iter()
        .filter(|m| records.iter().any(|r| r.model == *m))
        .collect();
    let mut cells = vec![vec![None; scenarios.len()]; models.len()];
    for (i, model) in models.iter().enumerate() {
        for (j, scen) in scenarios.iter().enumerate() {
            let mut values: Vec<f64> = records
                .iter()
                .filter(|r| {
                    r.model == *model && format!("{}/{}", r.scenario.label(), r.scenario.test_condition) == *scen
                })
                .map(|r| r.rmse)
                .collect();
            if !values.is_empty() {
                values.sort_by(f64::total_cmp);
                cells[i][j] = Some(values[values.len() / 2]);
            }
        }
    }
    Ok(HeatmapTable {
        models,
        scenarios,
        cells,
    })
}

impl HeatmapTable {
    pub fn cell_count(&self) -> usize {
        self.models.len() * self.scenarios.len()
    }

    /// CSV matrix: header `model,<scenario...>`, one row per model.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        write!(out, "model")?;
        for s in &self.scenarios {
            write!(out, ",{s}")?;
        }
        writeln!(out)?;
        for (i, model) in self.models.iter().enumerate() {
            write!(out, "{model}")?;
            for j in 0..self.scenarios.len() {
                match self.cells[i][j] {
                    Some(v) => write!(out, ",{}", fmt_f64(v))?,
                    None => write!(out, ",")?,
                }
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Grayscale SVG, darker = lower RMSE (the paper's figure convention).
    pub fn write_svg(&self, path: &Path) -> Result<()> {
        let values: Vec<f64> = self.cells.iter().flatten().filter_map(|v| *v).collect();
        if values.is_empty() {
            return Err(ChaosError::InvalidParams("heatmap has no filled cells".into()));
        }
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        let (cell_w, cell_h) = (150.0, 34.0);
        let (left, top) = (80.0, 50.0);
        let width = left + cell_w * self.scenarios.len() as f64 + 20.0;
        let height = top + cell_h * self.models.len() as f64 + 20.0;
        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg version=\"1.1\" width=\"{width:.0}\" height=\"{height:.0}\" xmlns=\"http://www.w3.org/2000/svg\">\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{left}\" y=\"20\" font-family=\"monospace\" font-size=\"13\">RMSE by model and scenario (darker = lower)</text>\n"
        ));
        for (j, scen) in self.scenarios.iter().enumerate() {
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"10\">{}</text>\n",
                left + j as f64 * cell_w + 4.0,
                top - 6.0,
                xml_escape(scen)
            ));
        }
        for (i, model) in self.models.iter().enumerate() {
            svg.push_str(&format!(
                "<text x=\"8\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">{model}</text>\n",
                top + i as f64 * cell_h + cell_h * 0.65
            ));
            for j in 0..self.scenarios.len() {
                let x = left + j as f64 * cell_w;
                let y = top + i as f64 * cell_h;
                match self.cells[i][j] {
                    Some(v) => {
                        let unit = ((v - lo) / span).clamp(0.0, 1.0);
                        let level = (unit * 235.0).round() as u8 + 10;
                        svg.push_str(&format!(
                            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell_w:.1}\" height=\"{cell_h:.1}\" fill=\"rgb({level},{level},{level})\" stroke=\"rgb(60,60,60)\"/>\n"
                        ));
                        let text_level = if level > 128 { 0 } else { 255 };
                        svg.push_str(&format!(
                            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" fill=\"rgb({text_level},{text_level},{text_level})\">{v:.4e}</text>\n",
                            x + 6.0,
                            y + cell_h * 0.65
                        ));
                    }
                    None => {
                        svg.push_str(&format!(
                            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell_w:.1}\" height=\"{cell_h:.1}\" fill=\"none\" stroke=\"rgb(60,60,60)\"/>\n"
                        ));
                    }
                }
            }
        }
        svg.push_str("</svg>\n");
        std::fs::write(path, svg)?;
        Ok(())
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes the actual-vs-predicted overlay: per angle dimension one red
/// (actual) and one blue (predicted) polyline, with axes, legend, and title.
pub fn trajectory_plot(
    times: &[f64],
    actual: &[Vec<f64>],
    predicted: &[Vec<f64>],
    title: &str,
    path: &Path,
) -> Result<()> {
    if actual.len() != predicted.len() || actual.len() != times.len() {
        return Err(ChaosError::ShapeMismatch(format!(
            "series lengths differ: {} times, {} actual, {} predicted",
            times.len(),
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(ChaosError::InvalidParams("empty series".into()));
    }
    let d = actual[0].len();
    let (width, height) = (900.0, 220.0 * d as f64 + 60.0);
    let (left, right, top, panel_h, gap) = (70.0, 20.0, 40.0, 220.0, 30.0);
    let plot_w = width - left - right;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg version=\"1.1\" width=\"{width:.0}\" height=\"{height:.0}\" xmlns=\"http://www.w3.org/2000/svg\">\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{left}\" y=\"20\" font-family=\"monospace\" font-size=\"13\">{}</text>\n",
        xml_escape(title)
    ));
    // legend
    svg.push_str(&format!(
        "<rect x=\"{:.0}\" y=\"10\" width=\"14\" height=\"4\" fill=\"red\"/><text x=\"{:.0}\" y=\"17\" font-family=\"monospace\" font-size=\"11\">actual</text>\n",
        width - 220.0,
        width - 200.0
    ));
    svg.push_str(&format!(
        "<rect x=\"{:.0}\" y=\"24\" width=\"14\" height=\"4\" fill=\"blue\"/><text x=\"{:.0}\" y=\"31\" font-family=\"monospace\" font-size=\"11\">predicted</text>\n",
        width - 220.0,
        width - 200.0
    ));

    let t_min = times.first().copied().unwrap_or(0.0);
    let t_max = times.last().copied().unwrap_or(1.0);
    let t_span = if t_max > t_min { t_max - t_min } else { 1.0 };

    for j in 0..d {
        let y0 = top + j as f64 * (panel_h + gap);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for rows in [actual, predicted] {
            for r in rows {
                lo = lo.min(r[j]);
                hi = hi.max(r[j]);
            }
        }
        let span = if hi > lo { hi - lo } else { 1.0 };
        let sx = |t: f64| left + (t - t_min) / t_span * plot_w;
        let sy = |v: f64| y0 + panel_h - 30.0 - (v - lo) / span * (panel_h - 50.0);

        // axes
        svg.push_str(&format!(
            "<path d=\"M {left:.1} {:.1} L {left:.1} {:.1} L {:.1} {:.1}\" stroke=\"black\" fill=\"none\"/>\n",
            y0 + 10.0,
            y0 + panel_h - 30.0,
            left + plot_w,
            y0 + panel_h - 30.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">t (s)</text>\n",
            left + plot_w - 30.0,
            y0 + panel_h - 12.0
        ));
        svg.push_str(&format!(
            "<text x=\"8\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">theta{} (rad)</text>\n",
            y0 + 10.0,
            j + 1
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"9\">{lo:.2}</text>\n",
            left - 45.0,
            y0 + panel_h - 30.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"9\">{hi:.2}</text>\n",
            left - 45.0,
            y0 + 15.0
        ));

        for (rows, color) in [(actual, "red"), (predicted, "blue")] {
            let mut dpath = String::new();
            for (k, t) in times.iter().enumerate() {
                dpath.push_str(if k == 0 { "M " } else { "L " });
                dpath.push_str(&format!("{:.2} {:.2} ", sx(*t), sy(rows[k][j])));
            }
            svg.push_str(&format!(
                "<path d=\"{}\" stroke=\"{color}\" fill=\"none\" stroke-width=\"1\"/>\n",
                dpath.trim_end()
            ));
        }
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}
