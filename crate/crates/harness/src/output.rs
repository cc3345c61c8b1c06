//! Result rows, the CSV writer and the JSON summary.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;

/// Version of the summary layout.
pub const SCHEMA_VERSION: u32 = 1;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Num(x) => Some(x),
            Value::Int(i) => Some(i as f64),
            Value::Bool(b) => Some(f64::from(u8::from(b))),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Value::Num(x) => x.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => u8::from(*b).to_string(),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u32> for Value {
    fn from(x: u32) -> Self {
        Value::Int(i64::from(x))
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Missing, Value::Num)
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

/// Column layout of one experiment.
#[derive(Debug, Clone)]
pub struct Layout {
    pub params: &'static [&'static str],
    pub metrics: &'static [&'static str],
}

impl Layout {
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["experiment".to_string(), "replicate".to_string()];
        h.extend(self.params.iter().map(|s| s.to_string()));
        h.extend(self.metrics.iter().map(|s| s.to_string()));
        h.extend(["seed", "status", "wall_ms"].map(String::from));
        h
    }

    pub fn metric(&self, name: &str) -> usize {
        self.metrics.iter().position(|m| *m == name).unwrap_or_else(|| panic!("no metric {name}"))
    }
}

/// One `(replicate, parameter point)` result.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub replicate: usize,
    pub params: Vec<Value>,
    /// Empty when the point failed.
    pub metrics: Vec<Value>,
    pub seed: u64,
    /// `ok` or the error message.
    pub status: String,
    pub wall_ms: f64,
}

impl Row {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn metric(&self, layout: &Layout, name: &str) -> Option<f64> {
        if !self.ok() {
            return None;
        }
        self.metrics[layout.metric(name)].as_f64()
    }

    pub fn param_key(&self) -> String {
        self.params.iter().map(Value::render).collect::<Vec<_>>().join("|")
    }
}

pub fn write_csv(
    path: &Path,
    experiment: &str,
    layout: &Layout,
    rows: &[Row],
    wall_time: bool,
) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(layout.header())?;
    for r in rows {
        let mut rec = vec![experiment.to_string(), r.replicate.to_string()];
        rec.extend(r.params.iter().map(Value::render));
        if r.ok() {
            rec.extend(r.metrics.iter().map(Value::render));
        } else {
            rec.extend(layout.metrics.iter().map(|_| String::new()));
        }
        rec.push(r.seed.to_string());
        rec.push(r.status.clone());
        rec.push(if wall_time { format!("{:.3}", r.wall_ms) } else { String::new() });
        w.write_record(rec)?;
    }
    w.flush()
}

/// Sample mean with its standard error and normal 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSummary {
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
    pub ci95: f64,
}

impl MetricSummary {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let std_error = (var / n as f64).sqrt();
        Some(MetricSummary { n, mean, std_error, ci95: 1.96 * std_error })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Assertion { name: name.into(), passed, detail }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Group {
    pub params: BTreeMap<String, String>,
    pub rows: usize,
    pub failed: usize,
    pub metrics: BTreeMap<String, MetricSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment: String,
    pub config: BTreeMap<String, String>,
    pub rows: usize,
    pub failed_rows: usize,
    pub groups: Vec<Group>,
    pub assertions: Vec<Assertion>,
    pub failing: Vec<String>,
    pub passed: bool,
}

/// Rows grouped by parameter point, in first-appearance order.
pub fn groups(rows: &[Row]) -> Vec<(String, Vec<&Row>)> {
    let mut out: Vec<(String, Vec<&Row>)> = Vec::new();
    for r in rows {
        let key = r.param_key();
        match out.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => out.push((key, vec![r])),
        }
    }
    out
}

/// Summary of `name` over the successful rows of a group.
pub fn summarize(layout: &Layout, rows: &[&Row], name: &str) -> Option<MetricSummary> {
    let v: Vec<f64> = rows.iter().filter_map(|r| r.metric(layout, name)).filter(|x| x.is_finite()).collect();
    MetricSummary::of(&v)
}

pub fn build_summary(
    config: &ExperimentConfig,
    layout: &Layout,
    rows: &[Row],
    mut assertions: Vec<Assertion>,
) -> Summary {
    let failed_rows = rows.iter().filter(|r| !r.ok()).count();
    assertions.push(Assertion::new(
        "all_rows_ok",
        failed_rows == 0,
        format!("{failed_rows} of {} rows failed", rows.len()),
    ));
    let groups = groups(rows)
        .into_iter()
        .map(|(_, g)| Group {
            params: layout
                .params
                .iter()
                .zip(&g[0].params)
                .map(|(k, v)| (k.to_string(), v.render()))
                .collect(),
            rows: g.len(),
            failed: g.iter().filter(|r| !r.ok()).count(),
            metrics: layout
                .metrics
                .iter()
                .filter_map(|m| summarize(layout, &g, m).map(|s| (m.to_string(), s)))
                .collect(),
        })
        .collect();
    let failing: Vec<String> = assertions.iter().filter(|a| !a.passed).map(|a| a.name.clone()).collect();
    Summary {
        schema_version: SCHEMA_VERSION,
        experiment: config.experiment.to_string(),
        config: crate::config::KEYS
            .iter()
            .filter_map(|k| config.get(k).map(|v| (k.to_string(), v)))
            .collect(),
        rows: rows.len(),
        failed_rows,
        groups,
        passed: failing.is_empty(),
        failing,
        assertions,
    }
}

pub fn write_summary(path: &Path, summary: &Summary) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, summary)?;
    f.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_summary_of_constant_values() {
        let s = MetricSummary::of(&[2.0, 2.0, 2.0]).unwrap();
        assert_eq!((s.n, s.mean, s.std_error), (3, 2.0, 0.0));
        assert!(MetricSummary::of(&[]).is_none());
    }

    #[test]
    fn values_render_plainly() {
        assert_eq!(Value::from(0.1).render(), "0.1");
        assert_eq!(Value::from(true).render(), "1");
        assert_eq!(Value::from(None::<f64>).render(), "");
    }
}
