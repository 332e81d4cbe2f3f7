//! Result files: CSV tables, the plot spec and the run manifest.
//!
//! Rows follow label order: degrees numerically, then attributes with
//! numeric names by value, then the rest lexicographically. Floats are
//! printed in their shortest round-trip form so equal results give equal
//! bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use dufs_core::estimate::Estimate;
use dufs_core::{DirectedGraph, Label, LabelKind};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::io::sha256_hex;

/// Renders labels into CSV columns.
pub struct LabelFormat<'a> {
    joint: bool,
    names: &'a [String],
}

impl<'a> LabelFormat<'a> {
    pub fn new(kind: LabelKind, names: &'a [String]) -> Self {
        LabelFormat { joint: kind == LabelKind::Joint, names }
    }

    pub fn for_graph(kind: LabelKind, g: &'a DirectedGraph) -> Self {
        Self::new(kind, g.attribute_names())
    }

    pub fn headers(&self) -> &'static [&'static str] {
        if self.joint {
            &["in_degree", "out_degree"]
        } else {
            &["label"]
        }
    }

    pub fn fields(&self, label: &Label) -> Vec<String> {
        match *label {
            Label::Degree(d) => vec![d.to_string()],
            Label::Joint { in_degree, out_degree } => vec![in_degree.to_string(), out_degree.to_string()],
            Label::Attribute(a) => {
                vec![self.names.get(a as usize).cloned().unwrap_or_else(|| format!("#{a}"))]
            }
            Label::Selected => vec!["selected".into()],
        }
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// A CSV table held in memory until written.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(headers: &[S]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(headers.iter().map(|h| h.as_ref())).expect("in-memory write");
        Table { writer }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        self.writer.write_record(fields.iter().map(|f| f.as_ref())).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

/// One estimate row per (run, label).
pub fn estimates_table(runs: &[(usize, u64, &Estimate)], fmt: &LabelFormat<'_>) -> Table {
    let mut headers = vec!["run", "seed"];
    headers.extend_from_slice(fmt.headers());
    headers.extend_from_slice(&[
        "mass",
        "estimator",
        "iterations",
        "gradient_norm",
        "residual",
        "zeroed_labels",
        "converged",
        "warnings",
    ]);
    let mut t = Table::new(&headers);
    for &(run, seed, est) in runs {
        let d = &est.diagnostics;
        let warnings: Vec<&str> = d.warnings.iter().map(|w| w.as_str()).collect();
        for (label, mass) in &est.mass {
            let mut row = vec![run.to_string(), seed.to_string()];
            row.extend(fmt.fields(label));
            row.extend([
                mass.to_string(),
                est.estimator.to_string(),
                d.iterations.to_string(),
                opt(d.gradient_norm),
                opt(d.residual),
                d.zeroed_labels.to_string(),
                d.converged.to_string(),
                warnings.join(";"),
            ]);
            t.row(&row);
        }
    }
    t
}

/// Per-label error row, with closed-form baselines when available.
pub struct NrmseRow {
    pub label: Label,
    pub truth: f64,
    pub nrmse: Option<f64>,
    pub node_sampling: Option<f64>,
    pub edge_sampling: Option<f64>,
}

pub fn nrmse_table(rows: &[NrmseRow], estimator: &str, runs: usize, fmt: &LabelFormat<'_>) -> Table {
    let mut headers: Vec<&str> = fmt.headers().to_vec();
    headers.extend_from_slice(&[
        "truth",
        "nrmse",
        "node_sampling_nrmse",
        "edge_sampling_nrmse",
        "estimator",
        "runs",
    ]);
    let mut t = Table::new(&headers);
    for r in rows {
        let mut row = fmt.fields(&r.label);
        row.extend([
            r.truth.to_string(),
            opt(r.nrmse),
            opt(r.node_sampling),
            opt(r.edge_sampling),
            estimator.to_owned(),
            runs.to_string(),
        ]);
        t.row(&row);
    }
    t
}

pub fn key_value_table(entries: &[(&str, String)]) -> Table {
    let mut t = Table::new(&["metric", "value"]);
    for (k, v) in entries {
        t.row(&[*k, v.as_str()]);
    }
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct Axis {
    pub column: String,
    pub label: String,
    pub scale: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlotSpec {
    pub file: String,
    pub x: Axis,
    pub y: Axis,
    pub series: Vec<String>,
    pub group_by: Option<String>,
}

/// Describes how to plot an NRMSE table: log-log for degree labels,
/// categorical x otherwise.
pub fn nrmse_plotspec(file: &str, kind: LabelKind, series: &[&str], group_by: Option<&str>) -> PlotSpec {
    let (column, label, scale) = match kind {
        LabelKind::OutDegree => ("label", "out-degree", "log"),
        LabelKind::InDegree => ("label", "in-degree", "log"),
        LabelKind::Degree => ("label", "degree", "log"),
        LabelKind::Joint => ("out_degree", "out-degree (one series per in-degree)", "log"),
        LabelKind::Attribute | LabelKind::TopAttribute { .. } => ("label", "attribute", "categorical"),
    };
    PlotSpec {
        file: file.into(),
        x: Axis { column: column.into(), label: label.into(), scale },
        y: Axis { column: "nrmse".into(), label: "NRMSE".into(), scale: "log" },
        series: series.iter().map(|s| s.to_string()).collect(),
        group_by: group_by.map(str::to_owned).or_else(|| (kind == LabelKind::Joint).then(|| "in_degree".into())),
    }
}

/// Collects output files, writes them and records their digests.
pub struct OutputDir {
    root: PathBuf,
    pub files: BTreeMap<String, String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutputDir { root: root.to_owned(), files: BTreeMap::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.files.insert(name.to_owned(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    /// Writes a JSON file that is not itself listed among the digests.
    pub fn write_unlisted_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let path = self.root.join(name);
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
        bytes.push(b'\n');
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dufs_core::estimate::{Diagnostics, EstimatorId};

    #[test]
    fn label_rendering() {
        let names = vec!["7".to_owned(), "blue".to_owned()];
        let f = LabelFormat::new(LabelKind::Attribute, &names);
        assert_eq!(f.fields(&Label::Attribute(1)), vec!["blue"]);
        assert_eq!(f.fields(&Label::Selected), vec!["selected"]);
        let j = LabelFormat::new(LabelKind::Joint, &[]);
        assert_eq!(j.headers(), &["in_degree", "out_degree"]);
        assert_eq!(j.fields(&Label::Joint { in_degree: 3, out_degree: 4 }), vec!["3", "4"]);
    }

    #[test]
    fn estimates_csv_shape() {
        let e = Estimate {
            mass: [(Label::Degree(1), 0.25), (Label::Degree(10), 0.75)].into_iter().collect(),
            estimator: EstimatorId::Hybrid,
            diagnostics: Diagnostics { converged: true, ..Default::default() },
        };
        let fmt = LabelFormat::new(LabelKind::OutDegree, &[]);
        let text = String::from_utf8(estimates_table(&[(0, 5, &e)], &fmt).into_bytes()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "run,seed,label,mass,estimator,iterations,gradient_norm,residual,zeroed_labels,converged,warnings");
        assert_eq!(lines[1], "0,5,1,0.25,hybrid,0,,,0,true,");
        assert_eq!(lines[2], "0,5,10,0.75,hybrid,0,,,0,true,");
    }
}
