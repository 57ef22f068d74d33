//! Tabular output of homogeneous record lists as CSV or JSON.

use std::fmt::Write;

use divisor_delta::{FitResult, SurveyRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(u128),
    Float(f64),
    Str(String),
    Bool(bool),
}

/// A row type with a fixed, ordered set of named columns.
pub trait Row {
    const KIND: &'static str;
    const COLUMNS: &'static [&'static str];
    fn values(&self) -> Vec<Value>;
}

/// One emitted record; every variant maps to a [`Row`] type.
#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Survey(SurveyRecord),
    Fit(FitResult),
    Delta(DeltaRow),
    Moment(MomentRow),
    Level(LevelRow),
    Sum(SumRow),
    Recurse(RecurseRow),
    Check(CheckRow),
    Histogram(HistogramRow),
}

impl Record {
    fn kind(&self) -> &'static str {
        match self {
            Record::Survey(_) => SurveyRecord::KIND,
            Record::Fit(_) => FitResult::KIND,
            Record::Delta(_) => DeltaRow::KIND,
            Record::Moment(_) => MomentRow::KIND,
            Record::Level(_) => LevelRow::KIND,
            Record::Sum(_) => SumRow::KIND,
            Record::Recurse(_) => RecurseRow::KIND,
            Record::Check(_) => CheckRow::KIND,
            Record::Histogram(_) => HistogramRow::KIND,
        }
    }

    fn columns(&self) -> &'static [&'static str] {
        match self {
            Record::Survey(_) => SurveyRecord::COLUMNS,
            Record::Fit(_) => FitResult::COLUMNS,
            Record::Delta(_) => DeltaRow::COLUMNS,
            Record::Moment(_) => MomentRow::COLUMNS,
            Record::Level(_) => LevelRow::COLUMNS,
            Record::Sum(_) => SumRow::COLUMNS,
            Record::Recurse(_) => RecurseRow::COLUMNS,
            Record::Check(_) => CheckRow::COLUMNS,
            Record::Histogram(_) => HistogramRow::COLUMNS,
        }
    }

    fn values(&self) -> Vec<Value> {
        match self {
            Record::Survey(r) => r.values(),
            Record::Fit(r) => r.values(),
            Record::Delta(r) => r.values(),
            Record::Moment(r) => r.values(),
            Record::Level(r) => r.values(),
            Record::Sum(r) => r.values(),
            Record::Recurse(r) => r.values(),
            Record::Check(r) => r.values(),
            Record::Histogram(r) => r.values(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedRecords {
    pub first: &'static str,
    pub other: &'static str,
}

impl std::fmt::Display for MixedRecords {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid argument: cannot mix {} and {} records in one table", self.first, self.other)
    }
}

/// Round-trip safe: 17 significant digits.
fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Float(f) => float(*f),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::Str(s) => s.clone(),
    }
}

fn json_cell(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Float(f) if f.is_finite() => float(*f),
        Value::Float(_) => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => serde_json::to_string(s).expect("strings serialize"),
    }
}

/// Renders `records` in `format`. An empty CSV is the header of `header_for`
/// (or nothing when that is `None`); an empty JSON list is `[]`.
pub fn emit(records: &[Record], format: Format, header_for: Option<&'static [&'static str]>) -> Result<String, MixedRecords> {
    if let Some(first) = records.first() {
        if let Some(other) = records.iter().find(|r| r.kind() != first.kind()) {
            return Err(MixedRecords { first: first.kind(), other: other.kind() });
        }
    }
    let columns = records.first().map(|r| r.columns()).or(header_for).unwrap_or(&[]);
    let mut out = String::new();
    match format {
        Format::Csv => {
            if !columns.is_empty() {
                out.push_str(&columns.join(","));
                out.push('\n');
            }
            for r in records {
                let cells: Vec<String> = r.values().iter().map(csv_cell).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        Format::Json => {
            out.push('[');
            for (i, r) in records.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('{');
                for (j, (name, v)) in columns.iter().zip(r.values()).enumerate() {
                    if j > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "\"{name}\":{}", json_cell(&v));
                }
                out.push('}');
            }
            out.push_str("]\n");
        }
    }
    Ok(out)
}

impl Row for SurveyRecord {
    const KIND: &'static str = "survey";
    const COLUMNS: &'static [&'static str] = &["x", "sum_delta", "mean_delta", "mean_over_log2", "elapsed_s", "threads"];
    fn values(&self) -> Vec<Value> {
        vec![
            Value::Int(self.x as u128),
            Value::Int(self.sum_delta),
            Value::Float(self.mean_delta),
            Value::Float(self.mean_over_log2),
            Value::Float(self.elapsed_s),
            Value::Int(self.threads as u128),
        ]
    }
}

impl Row for FitResult {
    const KIND: &'static str = "fit";
    const COLUMNS: &'static [&'static str] = &["model", "exponent", "constant", "residual"];
    fn values(&self) -> Vec<Value> {
        vec![
            Value::Str(self.model.name().into()),
            Value::Float(self.exponent),
            Value::Float(self.constant),
            Value::Float(self.residual),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow {
    pub n: u64,
    pub tau: u64,
    pub delta: u64,
    pub anchor_divisor: u64,
}

impl Row for DeltaRow {
    const KIND: &'static str = "delta";
    const COLUMNS: &'static [&'static str] = &["n", "tau", "delta", "anchor_divisor"];
    fn values(&self) -> Vec<Value> {
        vec![
            Value::Int(self.n as u128),
            Value::Int(self.tau as u128),
            Value::Int(self.delta as u128),
            Value::Int(self.anchor_divisor as u128),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub n: u64,
    pub q: u32,
    pub moment: f64,
    pub power_mean: f64,
    pub normalized: f64,
    pub support_power_mean: f64,
}

impl Row for MomentRow {
    const KIND: &'static str = "moment";
    const COLUMNS: &'static [&'static str] = &["n", "q", "moment", "power_mean", "moment_over_tau", "support_power_mean"];
    fn values(&self) -> Vec<Value> {
        vec![
            Value::Int(self.n as u128),
            Value::Int(self.q as u128),
            Value::Float(self.moment),
            Value::Float(self.power_mean),
            Value::Float(self.normalized),
            Value::Float(self.support_power_mean),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow {
    pub n: u64,
    pub in_sa: bool,
    pub max_q_in_sqa: u32,
    pub witness_y: Option<f64>,
    pub witness_q: Option<u32>,
}

impl Row for LevelRow {
    const KIND: &'static str = "level";
    const COLUMNS: &'static [&'static str] = &["n", "in_sa", "max_q_in_sqa", "witness_y", "witness_q"];
    fn values(&self) -> Vec<Value> {
        vec![
            Value::Int(self.n as u128),
            Value::Bool(self.in_sa),
            Value::Int(self.max_q_in_sqa as u128),
            self.witness_y.map_or(Value::Str(String::new()), Value::Float),
            self.witness_q.map_or(Value::Str(String::new()), |q| Value::Int(q as u128)),
        ]
    }
}

/// A truncated sum with its reference bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SumRow {
    pub quantity: String,
    pub a: f64,
    pub x: f64,
    pub q: u32,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
    pub terms: u64,
    pub enum_cap: u64,
}

impl Row for SumRow {
    const KIND: &'static str = "sum";
    const COLUMNS: &'static [&'static str] = &["quantity", "A", "x", "q", "value", "bound", "ratio", "terms", "enum_cap"];
    fn values(&self) -> Vec<Value> {
        vec![
            Value::Str(self.quantity.clone()),
            Value::Float(self.a),
            Value::Float(self.x),
            Value::Int(self.q as u128),
            Value::Float(self.value),
            Value::Float(self.bound),
            Value::Float(self.ratio),
            Value::Int(self.terms as u128),
            Value::Int(self.enum_cap as u128),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurseRow {
    pub a: f64,
    pub c0: f64,
    pub q_max: u32,
    pub r2_max: f64,
    pub r3_max: f64,
    pub lower_max: f64,
}

impl Row for RecurseRow {
    const KIND: &'static str = "recurse";
    const COLUMNS: &'static [&'static str] = &["A", "C0", "q_max", "r2_max", "r3_max", "lower_max"];
    fn values(&self) -> Vec<Value> {
        vec![
            Value::Float(self.a),
            Value::Float(self.c0),
            Value::Int(self.q_max as u128),
            Value::Float(self.r2_max),
            Value::Float(self.r3_max),
            Value::Float(self.lower_max),
        ]
    }
}

/// Outcome of one verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub suite: String,
    pub samples: u64,
    pub failures: u64,
    pub worst: f64,
    pub passed: bool,
}

impl Row for CheckRow {
    const KIND: &'static str = "check";
    const COLUMNS: &'static [&'static str] = &["suite", "samples", "failures", "worst", "passed"];
    fn values(&self) -> Vec<Value> {
        vec![
            Value::Str(self.suite.clone()),
            Value::Int(self.samples as u128),
            Value::Int(self.failures as u128),
            Value::Float(self.worst),
            Value::Bool(self.passed),
        ]
    }
}

/// Count of `n ≤ x` with `lo ≤ Δ(n) < hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRow {
    pub x: u64,
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
}

impl Row for HistogramRow {
    const KIND: &'static str = "histogram";
    const COLUMNS: &'static [&'static str] = &["x", "delta_lo", "delta_hi", "count"];
    fn values(&self) -> Vec<Value> {
        [self.x, self.lo, self.hi, self.count].iter().map(|&v| Value::Int(v as u128)).collect()
    }
}
