//! CSV and SVG output, plus the small CSV formats used by `simulate` and
//! `estimate`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use ncdoa::signal_model::{MagnitudeSequence, Snapshot};
use serde::Serialize;

use crate::config::Method;
use crate::error::{HarnessError, Result};
use crate::experiment::ExperimentResult;

pub const CSV_HEADER: &str = "method,sweep_param,sweep_value,mse_deg2,mean_runtime_s,num_failures,num_runs,seed";

#[derive(Serialize)]
struct Row<'a> {
    method: &'a str,
    sweep_param: &'a str,
    sweep_value: f64,
    mse_deg2: f64,
    mean_runtime_s: f64,
    num_failures: usize,
    num_runs: usize,
    seed: u64,
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes results to any sink. The header is always written.
pub fn write_results<W: Write>(results: &[ExperimentResult], sink: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    w.write_record(CSV_HEADER.split(','))?;
    for r in results {
        w.serialize(Row {
            method: r.method.name(),
            sweep_param: r.sweep_param.name(),
            sweep_value: r.sweep_value,
            mse_deg2: r.mse_deg2,
            mean_runtime_s: r.mean_runtime_s,
            num_failures: r.num_failures,
            num_runs: r.num_runs,
            seed: r.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(results: &[ExperimentResult], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_results(results, file).map_err(csv_err(path))
}

/// Dumps one snapshot as `element,re,im,magnitude_sq`.
pub fn write_snapshot_csv(snapshot: &Snapshot, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(file);
    let wrap = csv_err(path);
    let run = |w: &mut csv::Writer<File>| -> csv::Result<()> {
        w.write_record(["element", "re", "im", "magnitude_sq"])?;
        for (n, y) in snapshot.samples.iter().enumerate() {
            w.serialize((n, y.re, y.im, y.norm_sqr()))?;
        }
        w.flush()?;
        Ok(())
    };
    run(&mut w).map_err(wrap)
}

/// Reads a magnitude-squared sequence. Uses the `magnitude_sq` column when
/// present, otherwise the first column; a non-numeric first row is taken
/// as a header.
pub fn read_magnitudes(path: &Path) -> Result<MagnitudeSequence> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err(path))?;
    let mut column = 0;
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        if line == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            column = record.iter().position(|h| h == "magnitude_sq").unwrap_or(0);
            continue;
        }
        let field = record.get(column).ok_or_else(|| HarnessError::Parse {
            path: path.to_path_buf(),
            message: format!("line {}: missing column {column}", line + 1),
        })?;
        let v = field.parse::<f64>().map_err(|e| HarnessError::Parse {
            path: path.to_path_buf(),
            message: format!("line {}: `{field}`: {e}", line + 1),
        })?;
        values.push(v);
    }
    MagnitudeSequence::new(values).map_err(|e| HarnessError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Which quantity the plot's y axis shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    Mse,
    Runtime,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 30.0, 50.0); // left, right, top, bottom
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Renders an SVG line plot with a log-scale y axis, one series per method.
pub fn render_svg(results: &[ExperimentResult], metric: PlotMetric) -> String {
    let value = |r: &ExperimentResult| match metric {
        PlotMetric::Mse => r.mse_deg2,
        PlotMetric::Runtime => r.mean_runtime_s,
    };
    let ylabel = match metric {
        PlotMetric::Mse => "MSE (deg²)",
        PlotMetric::Runtime => "mean runtime (s)",
    };
    let xlabel = results.first().map_or("", |r| r.sweep_param.name());

    let positive: Vec<f64> = results.iter().map(value).filter(|v| *v > 0.0).collect();
    let (mut lo, mut hi) = positive
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v.log10()), b.max(v.log10())));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil().max(lo.floor() + 1.0));
    let (mut xmin, mut xmax) = results
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.sweep_value), b.max(r.sweep_value)));
    if !xmin.is_finite() {
        (xmin, xmax) = (0.0, 1.0);
    }
    if xmax == xmin {
        xmax = xmin + 1.0;
    }

    let (ml, mr, mt, mb) = MARGIN;
    let px = |x: f64| ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
    // zeros are drawn on the bottom edge
    let py = |v: f64| {
        let l = if v > 0.0 { v.log10().max(lo) } else { lo };
        H - mb - (l - lo) / (hi - lo) * (H - mt - mb)
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - ml - mr,
        H - mt - mb
    );
    for d in (lo as i32)..=(hi as i32) {
        let y = py(10f64.powi(d));
        let _ = writeln!(
            s,
            r##"<line x1="{ml}" x2="{}" y1="{y:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">1e{d}</text>"##,
            W - mr,
            ml - 6.0,
            y + 4.0
        );
    }
    let mut xs: Vec<f64> = results.iter().map(|r| r.sweep_value).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for x in &xs {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{x}</text>"#,
            px(*x),
            H - mb + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{}" text-anchor="middle">{xlabel}</text>"#,
        ml + (W - ml - mr) / 2.0,
        H - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16,{:.1}) rotate(-90)" text-anchor="middle">{ylabel}</text>"#,
        mt + (H - mt - mb) / 2.0
    );

    let mut methods: Vec<Method> = results.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    for (i, m) in methods.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts: Vec<(f64, f64)> = results
            .iter()
            .filter(|r| r.method == *m)
            .map(|r| (px(r.sweep_value), py(value(r))))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for (x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"/>"#);
        }
        let ly = mt + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" x2="{}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{m}</text>"#,
            W - mr - 220.0,
            W - mr - 196.0,
            W - mr - 190.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_plot(results: &[ExperimentResult], path: &Path, metric: PlotMetric) -> Result<()> {
    std::fs::write(path, render_svg(results, metric)).map_err(io_err(path))
}
