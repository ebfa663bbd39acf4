use crate::error::Result;
use rgg_core::rgg::UpdateReport;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// Columns holding wall-clock times. They vary run to run.
pub const TIMING_COLUMNS: [&str; 5] = ["revalidate_us", "over_us", "under_us", "resolve_us", "total_us"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Pretty,
}

/// One CSV row. The preprocessing row leaves the per-update columns empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub iteration: Option<usize>,
    pub engine: String,
    pub obstacle: Option<u32>,
    pub newly_valid: Option<usize>,
    pub newly_invalid: Option<usize>,
    pub newly_unknown: Option<usize>,
    pub valid: Option<usize>,
    pub invalid: Option<usize>,
    pub unknown: Option<usize>,
    pub unknown_edges: Option<usize>,
    pub over_candidates: Option<usize>,
    pub over_hits: Option<usize>,
    pub under_candidates: Option<usize>,
    pub under_hits: Option<usize>,
    pub resolved: Option<usize>,
    pub resolved_invalid: Option<usize>,
    pub revalidate_us: Option<f64>,
    pub over_us: Option<f64>,
    pub under_us: Option<f64>,
    pub resolve_us: Option<f64>,
    pub total_us: f64,
}

impl Row {
    pub fn update(iteration: usize, engine: &str, r: &UpdateReport) -> Self {
        Self {
            iteration: Some(iteration),
            engine: engine.to_string(),
            obstacle: Some(r.obstacle),
            newly_valid: Some(r.newly_valid),
            newly_invalid: Some(r.newly_invalid),
            newly_unknown: Some(r.newly_unknown),
            valid: Some(r.valid),
            invalid: Some(r.invalid),
            unknown: Some(r.unknown),
            unknown_edges: Some(r.unknown_edges),
            over_candidates: Some(r.over_candidates),
            over_hits: Some(r.over_hits),
            under_candidates: Some(r.under_candidates),
            under_hits: Some(r.under_hits),
            resolved: Some(r.resolved),
            resolved_invalid: Some(r.resolved_invalid),
            revalidate_us: Some(r.revalidate_us),
            over_us: Some(r.over_us),
            under_us: Some(r.under_us),
            resolve_us: Some(r.resolve_us),
            total_us: r.total_us(),
        }
    }

    /// Update time without the exact resolution step.
    pub fn update_us(&self) -> f64 {
        self.total_us - self.resolve_us.unwrap_or(0.0)
    }
}

/// Preprocessing cost, informational only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Preprocess {
    pub nodes: usize,
    pub edges: usize,
    pub roadmap_us: f64,
    pub geometry_us: f64,
    pub setup_us: f64,
}

impl Preprocess {
    pub fn total_us(&self) -> f64 {
        self.roadmap_us + self.geometry_us + self.setup_us
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub preprocess: Option<Preprocess>,
    /// Iteration rows, engines interleaved per iteration.
    pub rows: Vec<Row>,
}

/// Per-engine averages over the iteration rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Means {
    pub iterations: usize,
    pub update_us: f64,
    pub resolve_us: f64,
    pub unknown_edges: f64,
    pub unknown: f64,
    pub invalid: f64,
}

impl Report {
    pub fn engines(&self) -> Vec<String> {
        let mut e: Vec<String> = Vec::new();
        for r in &self.rows {
            if !e.contains(&r.engine) {
                e.push(r.engine.clone());
            }
        }
        e
    }

    pub fn means(&self, engine: &str) -> Means {
        let rows: Vec<&Row> = self.rows.iter().filter(|r| r.engine == engine).collect();
        let n = rows.len().max(1) as f64;
        let avg = |f: &dyn Fn(&Row) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
        Means {
            iterations: rows.len(),
            update_us: avg(&|r| r.update_us()),
            resolve_us: avg(&|r| r.resolve_us.unwrap_or(0.0)),
            unknown_edges: avg(&|r| r.unknown_edges.unwrap_or(0) as f64),
            unknown: avg(&|r| r.unknown.unwrap_or(0) as f64),
            invalid: avg(&|r| r.invalid.unwrap_or(0) as f64),
        }
    }

    fn preprocess_row(&self) -> Option<Row> {
        self.preprocess.as_ref().map(|p| Row {
            iteration: None,
            engine: "preprocess".into(),
            obstacle: None,
            newly_valid: None,
            newly_invalid: None,
            newly_unknown: None,
            valid: None,
            invalid: None,
            unknown: None,
            unknown_edges: None,
            over_candidates: None,
            over_hits: None,
            under_candidates: None,
            under_hits: None,
            resolved: None,
            resolved_invalid: None,
            revalidate_us: None,
            over_us: None,
            under_us: None,
            resolve_us: None,
            total_us: p.total_us(),
        })
    }

    /// Writes the CSV form. With `timings` false the timing columns are
    /// dropped, leaving output that is identical across runs.
    pub fn write_csv<W: Write>(&self, mut out: W, timings: bool) -> Result<()> {
        if timings {
            writeln!(out, "# nondeterministic columns: {}", TIMING_COLUMNS.join(","))?;
        }
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        let header = csv::StringRecord::from(csv_header());
        let rows = self.preprocess_row().into_iter().chain(self.rows.iter().cloned());
        let keep: Vec<usize> = (0..header.len())
            .filter(|&i| timings || !TIMING_COLUMNS.contains(&&header[i]))
            .collect();
        w.write_record(keep.iter().map(|&i| &header[i]))?;
        for row in rows {
            let mut full = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            full.serialize(&row)?;
            let bytes = full.into_inner().map_err(|e| e.into_error())?;
            let rec = csv::ReaderBuilder::new()
                .has_headers(false)
                .from_reader(bytes.as_slice())
                .records()
                .next()
                .expect("one record")?;
            w.write_record(keep.iter().map(|&i| &rec[i]))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads rows back from CSV written with timings.
    pub fn read_csv_rows<R: std::io::Read>(input: R) -> Result<Vec<Row>> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        Ok(r.deserialize().collect::<Result<Vec<Row>, _>>()?)
    }

    pub fn pretty(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.scenario);
        if let Some(p) = &self.preprocess {
            let _ = writeln!(
                s,
                "nodes {}  edges {}  preprocessing {:.3} s (roadmap {:.3} s, approximations {:.3} s, engines {:.3} s)",
                p.nodes,
                p.edges,
                p.total_us() / 1e6,
                p.roadmap_us / 1e6,
                p.geometry_us / 1e6,
                p.setup_us / 1e6
            );
        }
        let _ = writeln!(
            s,
            "\n{:<12} {:>6} {:>16} {:>16} {:>14} {:>12}",
            "engine", "moves", "update time µs", "validate µs", "unknown edges", "invalid"
        );
        for e in self.engines() {
            let m = self.means(&e);
            let _ = writeln!(
                s,
                "{:<12} {:>6} {:>16.1} {:>16.1} {:>14.2} {:>12.2}",
                e, m.iterations, m.update_us, m.resolve_us, m.unknown_edges, m.invalid
            );
        }
        if !self.rows.is_empty() {
            let _ = writeln!(
                s,
                "\n{:>5} {:<10} {:>3} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>12} {:>12}",
                "iter", "engine", "obs", "+green", "+red", "+gray", "gray", "gray e", "red", "update µs", "validate µs"
            );
            for r in &self.rows {
                let _ = writeln!(
                    s,
                    "{:>5} {:<10} {:>3} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>12.1} {:>12.1}",
                    r.iteration.unwrap_or(0),
                    r.engine,
                    r.obstacle.unwrap_or(0),
                    r.newly_valid.unwrap_or(0),
                    r.newly_invalid.unwrap_or(0),
                    r.newly_unknown.unwrap_or(0),
                    r.unknown.unwrap_or(0),
                    r.unknown_edges.unwrap_or(0),
                    r.invalid.unwrap_or(0),
                    r.update_us(),
                    r.resolve_us.unwrap_or(0.0)
                );
            }
        }
        s
    }
}

fn csv_header() -> Vec<&'static str> {
    vec![
        "iteration",
        "engine",
        "obstacle",
        "newly_valid",
        "newly_invalid",
        "newly_unknown",
        "valid",
        "invalid",
        "unknown",
        "unknown_edges",
        "over_candidates",
        "over_hits",
        "under_candidates",
        "under_hits",
        "resolved",
        "resolved_invalid",
        "revalidate_us",
        "over_us",
        "under_us",
        "resolve_us",
        "total_us",
    ]
}

/// Writes `r` to `path`, or to stdout when `path` is `None`.
pub fn emit_report(r: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => r.write_csv(&mut buf, true)?,
        Format::Pretty => buf.extend_from_slice(r.pretty().as_bytes()),
    }
    match path {
        Some(p) => std::fs::write(p, buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}
