//! Experiment reports and their on-disk form: one JSON summary plus one CSV
//! per data series.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Experiment, ExperimentConfig};
use crate::error::{Error, Result};

/// Non-finite numbers are written as the strings `inf`, `-inf`, `NaN`.
mod real {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(s) => s.parse().map_err(D::Error::custom),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Real(#[serde(with = "real")] f64);

mod real_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Real;

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        let wrapped: BTreeMap<&String, Real> = m.iter().map(|(k, v)| (k, Real(*v))).collect();
        wrapped.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let wrapped = BTreeMap::<String, Real>::deserialize(d)?;
        Ok(wrapped.into_iter().map(|(k, v)| (k, v.0)).collect())
    }
}

/// Direction of an asserted inequality `measured ⋈ threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    Below,
    AtLeast,
    Above,
}

/// One asserted inequality with its measured slack (positive when it holds
/// with room to spare).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub relation: Relation,
    #[serde(with = "real")]
    pub measured: f64,
    #[serde(with = "real")]
    pub threshold: f64,
    #[serde(with = "real")]
    pub slack: f64,
    pub passed: bool,
}

impl Verdict {
    pub fn new(name: impl Into<String>, relation: Relation, measured: f64, threshold: f64) -> Self {
        let (slack, passed) = match relation {
            Relation::AtMost => (threshold - measured, measured <= threshold),
            Relation::Below => (threshold - measured, measured < threshold),
            Relation::AtLeast => (measured - threshold, measured >= threshold),
            Relation::Above => (measured - threshold, measured > threshold),
        };
        Self {
            name: name.into(),
            relation,
            measured,
            threshold,
            slack,
            passed,
        }
    }

    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::new(name, Relation::AtMost, measured, threshold)
    }

    pub fn below(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::new(name, Relation::Below, measured, threshold)
    }

    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::new(name, Relation::AtLeast, measured, threshold)
    }

    pub fn above(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::new(name, Relation::Above, measured, threshold)
    }

    /// A yes/no check recorded as `measured = 1` for yes, required to be 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

/// A table of numbers with named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub series: Vec<Series>,
    pub constants: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            config: config.clone(),
            config_hash: config.hash(),
            series: Vec::new(),
            constants: BTreeMap::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn experiment(&self) -> Experiment {
        self.config.experiment
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    pub fn set_constant(&mut self, name: impl Into<String>, value: f64) {
        self.constants.insert(name.into(), value);
    }

    /// The JSON summary exactly as written by [`emit_report`].
    pub fn summary_json(&self) -> Result<String> {
        let summary = Summary {
            experiment: self.experiment(),
            config_hash: self.config_hash.clone(),
            config: self.config.clone(),
            passed: self.passed(),
            constants: self.constants.clone(),
            verdicts: self.verdicts.clone(),
            notes: self.notes.clone(),
            series: self
                .series
                .iter()
                .map(|s| SeriesEntry {
                    name: s.name.clone(),
                    file: series_file(self.experiment(), &s.name),
                    columns: s.columns.clone(),
                    rows: s.rows.len(),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        Ok(text)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesEntry {
    name: String,
    file: String,
    columns: Vec<String>,
    rows: usize,
}

#[derive(Serialize, Deserialize)]
struct Summary {
    experiment: Experiment,
    config_hash: String,
    config: ExperimentConfig,
    passed: bool,
    #[serde(with = "real_map")]
    constants: BTreeMap<String, f64>,
    verdicts: Vec<Verdict>,
    notes: Vec<String>,
    series: Vec<SeriesEntry>,
}

fn series_file(experiment: Experiment, name: &str) -> String {
    format!("{experiment}.{name}.csv")
}

/// Path of the JSON summary for `experiment` inside `dir`.
pub fn summary_path(dir: &Path, experiment: Experiment) -> PathBuf {
    dir.join(format!("{experiment}.summary.json"))
}

fn write_series(series: &Series, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&series.columns)?;
    for row in &series.rows {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

fn read_series(name: &str, columns: &[String], path: &Path) -> Result<Series> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header != columns {
        return Err(Error::Parse(format!(
            "{}: unexpected header",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("{}: bad number {f:?}", path.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Series {
        name: name.to_string(),
        columns: columns.to_vec(),
        rows,
    })
}

/// Writes `<experiment>.summary.json` and one `<experiment>.<series>.csv` per
/// series into `dir`; returns the paths written.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for s in &report.series {
        let path = dir.join(series_file(report.experiment(), &s.name));
        write_series(s, &path)?;
        written.push(path);
    }
    let path = summary_path(dir, report.experiment());
    std::fs::write(&path, report.summary_json()?)?;
    written.push(path);
    Ok(written)
}

/// Reads back a report written by [`emit_report`].
pub fn parse_report(dir: &Path, experiment: Experiment) -> Result<ExperimentReport> {
    let text = std::fs::read_to_string(summary_path(dir, experiment))?;
    let summary: Summary = serde_json::from_str(&text)?;
    let series = summary
        .series
        .iter()
        .map(|e| read_series(&e.name, &e.columns, &dir.join(&e.file)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        config: summary.config,
        config_hash: summary.config_hash,
        series,
        constants: summary.constants,
        verdicts: summary.verdicts,
        notes: summary.notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_slack_signs() {
        let v = Verdict::at_most("a", 1.0, 3.0);
        assert!(v.passed && v.slack == 2.0);
        let v = Verdict::above("b", 1.0, 3.0);
        assert!(!v.passed && v.slack == -2.0);
        assert!(!Verdict::below("c", 3.0, 3.0).passed);
        assert!(Verdict::holds("d", true).passed);
        assert!(!Verdict::holds("e", false).passed);
    }
}
