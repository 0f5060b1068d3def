//! Deterministic file outputs: versioned CSV time series, JSON summaries and
//! static SVG plots.
//!
//! Every float is printed as `%.12e`, reductions upstream run in fixed order,
//! and maps are avoided in serialized structs — identical config and build
//! therefore produce byte-identical files.

use acns_core::diagnostics::{DiagnosticsRecord, MonitorReport};
use acns_core::solver::FailureInfo;
use anyhow::{Context, Result};
use serde::Serialize;
use std::path::Path;

/// Versioned CSV column order; changing it is a breaking format change.
pub const CSV_COLUMNS: [&str; 20] = [
    "t",
    "sigma",
    "E",
    "A1",
    "A2",
    "B",
    "normF3",
    "normF4",
    "intP3",
    "intP4",
    "intGradU3",
    "intGradU4_sigma",
    "resA1",
    "resA2",
    "resFlux",
    "resRenorm",
    "meanU_slack",
    "bootstrap_ratio",
    "rho_min",
    "rho_max",
];

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

fn record_fields(r: &DiagnosticsRecord) -> [f64; 20] {
    [
        r.t,
        r.sigma,
        r.e,
        r.a1,
        r.a2,
        r.b,
        r.norm_f3,
        r.norm_f4,
        r.int_p3,
        r.int_p4,
        r.int_grad_u3,
        r.int_grad_u4_sigma,
        r.res_a1,
        r.res_a2,
        r.res_flux,
        r.res_renorm,
        r.mean_u_slack,
        r.bootstrap_ratio,
        r.rho_min,
        r.rho_max,
    ]
}

/// Writes the diagnostics time series in the versioned column order.
pub fn write_records_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    writer.write_record(CSV_COLUMNS)?;
    for record in records {
        let row: Vec<String> = record_fields(record).iter().map(|&v| fmt(v)).collect();
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a time series back (used by `report`).
pub fn read_records_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        anyhow::bail!(
            "{} does not have the versioned column header (found {:?})",
            path.display(),
            header
        );
    }
    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row?;
        let values: Vec<f64> = row
            .iter()
            .map(|field| field.parse::<f64>().context("non-numeric CSV field"))
            .collect::<Result<_>>()?;
        anyhow::ensure!(values.len() == CSV_COLUMNS.len(), "short CSV row");
        rows.push(values);
    }
    anyhow::ensure!(!rows.is_empty(), "{} has no data rows", path.display());
    Ok(rows)
}

/// JSON run summary: final values, extremes, monitor and failure metadata.
#[derive(Debug, Serialize)]
pub struct RunSummary<'a> {
    pub scenario: &'a str,
    pub delta: f64,
    pub samples: usize,
    pub completed: bool,
    pub failure: Option<&'a FailureInfo>,
    pub final_record: &'a DiagnosticsRecord,
    pub max_res_a1: f64,
    pub max_res_a2: f64,
    pub max_res_flux: f64,
    pub max_res_renorm: f64,
    pub monitor: &'a MonitorReport,
}

/// Serializes any summary as stable pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

struct Plot {
    svg: String,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

const W: f64 = 860.0;
const H: f64 = 520.0;
const ML: f64 = 70.0;
const MR: f64 = 160.0;
const MT: f64 = 40.0;
const MB: f64 = 50.0;

impl Plot {
    fn new(title: &str, x0: f64, x1: f64, y0: f64, y1: f64, y_label: &str) -> Self {
        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
             viewBox=\"0 0 {W} {H}\" font-family=\"monospace\" font-size=\"12\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n",
            ML + (W - ML - MR) / 2.0
        ));
        // Axes.
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            H - MB,
            W - MR,
            H - MB
        ));
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
            H - MB
        ));
        // Tick labels at the corners of the data range.
        svg.push_str(&format!(
            "<text x=\"{ML}\" y=\"{}\" text-anchor=\"middle\">{x0:.3}</text>\n",
            H - MB + 18.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x1:.3}</text>\n",
            W - MR,
            H - MB + 18.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y0:.3}</text>\n",
            ML - 6.0,
            H - MB + 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y1:.3}</text>\n",
            ML - 6.0,
            MT + 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" \
             text-anchor=\"middle\">{y_label}</text>\n",
            MT + (H - MT - MB) / 2.0,
            MT + (H - MT - MB) / 2.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">t</text>\n",
            ML + (W - ML - MR) / 2.0,
            H - 12.0
        ));
        Self { svg, x0, x1, y0, y1 }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let sx = if self.x1 > self.x0 { (x - self.x0) / (self.x1 - self.x0) } else { 0.5 };
        let sy = if self.y1 > self.y0 { (y - self.y0) / (self.y1 - self.y0) } else { 0.5 };
        (ML + sx * (W - ML - MR), H - MB - sy * (H - MT - MB))
    }

    fn polyline(&mut self, xs: &[f64], ys: &[f64], color: &str, label: &str, slot: usize) {
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let (px, py) = self.map(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        self.svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        let ly = MT + 16.0 * slot as f64 + 10.0;
        self.svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n",
            W - MR + 10.0,
            W - MR + 34.0
        ));
        self.svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{label}</text>\n",
            W - MR + 40.0,
            ly + 4.0
        ));
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn series(rows: &[Vec<f64>], column: usize) -> Vec<f64> {
    rows.iter().map(|r| r[column]).collect()
}

fn bounds(series_list: &[&[f64]]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series_list {
        for &v in *s {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !(hi > lo) {
        hi = lo + 1.0;
    }
    (lo, hi)
}

/// Renders the functional time series (E, A1, A2, B) as one SVG and the
/// identity residuals (log₁₀) as another; returns the two documents.
pub fn render_plots(rows: &[Vec<f64>], scenario: &str) -> (String, String) {
    let t = series(rows, 0);
    let (t0, t1) = (t[0], *t.last().unwrap());

    let funcs = [(2usize, "E"), (3, "A1"), (4, "A2"), (5, "B")];
    let data: Vec<Vec<f64>> = funcs.iter().map(|&(c, _)| series(rows, c)).collect();
    let refs: Vec<&[f64]> = data.iter().map(|v| v.as_slice()).collect();
    let (lo, hi) = bounds(&refs);
    let mut plot = Plot::new(
        &format!("{scenario}: energy and Hoff functionals"),
        t0,
        t1,
        lo.min(0.0),
        hi,
        "value",
    );
    for (slot, ((_, label), ys)) in funcs.iter().zip(&data).enumerate() {
        plot.polyline(&t, ys, COLORS[slot], label, slot);
    }
    let functionals = plot.finish();

    let residuals = [(12usize, "resA1"), (13, "resA2"), (14, "resFlux"), (15, "resRenorm")];
    let data: Vec<Vec<f64>> = residuals
        .iter()
        .map(|&(c, _)| series(rows, c).iter().map(|&v| v.max(1e-18).log10()).collect())
        .collect();
    let refs: Vec<&[f64]> = data.iter().map(|v| v.as_slice()).collect();
    let (lo, hi) = bounds(&refs);
    let mut plot = Plot::new(
        &format!("{scenario}: identity residuals"),
        t0,
        t1,
        lo,
        hi,
        "log10 residual",
    );
    for (slot, ((_, label), ys)) in residuals.iter().zip(&data).enumerate() {
        plot.polyline(&t, ys, COLORS[slot], label, slot);
    }
    (functionals, plot.finish())
}
