//! State file parsing/writing and report rendering.
//!
//! States travel as JSON documents with complex numbers spelled as
//! `[re, im]` pairs (never strings):
//!
//! ```json
//! {
//!   "schema": 1,
//!   "kind": "pure",
//!   "dims": [2, 2],
//!   "data": [[0.7071067811865476, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7071067811865476, 0.0]],
//!   "metadata": { "name": "bell" }
//! }
//! ```
//!
//! For `"kind": "mixed"` the `data` field is a `D x D` nested list of
//! `[re, im]` pairs (row-major). Parsing failures carry the position of the
//! offending entry. Floats are written with round-trip-exact precision.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mixed::MixedCriterionReport;
use crate::pure::PureCriterionReport;
use crate::states::{DensityMatrix, PureState, SubsystemDims};
use crate::zoo::State;

/// Version tag written to and required from state files.
pub const SCHEMA_VERSION: u64 = 1;

/// Normalization corrections above this are reported as warnings.
pub const CORRECTION_WARN_TOL: f64 = 1e-6;

fn malformed(msg: impl Into<String>) -> Error {
    Error::StateFile(msg.into())
}

fn parse_complex(v: &Value, at: &str) -> Result<Complex64> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| malformed(format!("{at}: expected [re, im] pair")))?;
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| malformed(format!("{at}[0]: expected a number")))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| malformed(format!("{at}[1]: expected a number")))?;
    Ok(Complex64::new(re, im))
}

/// Parses a state document from a JSON string. Returns the state plus any
/// warnings (currently: normalization corrections beyond
/// [`CORRECTION_WARN_TOL`]).
pub fn read_state_str(text: &str) -> Result<(State, Vec<String>)> {
    let root: Value = serde_json::from_str(text)?;
    let obj = root
        .as_object()
        .ok_or_else(|| malformed("top level: expected an object"))?;

    let schema = obj
        .get("schema")
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed("schema: expected an integer"))?;
    if schema != SCHEMA_VERSION {
        return Err(malformed(format!(
            "schema: unsupported version {schema}, expected {SCHEMA_VERSION}"
        )));
    }

    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("kind: expected \"pure\" or \"mixed\""))?;

    let dims_value = obj
        .get("dims")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("dims: expected an array of integers"))?;
    let mut dims = Vec::with_capacity(dims_value.len());
    for (i, d) in dims_value.iter().enumerate() {
        let n = d
            .as_u64()
            .ok_or_else(|| malformed(format!("dims[{i}]: expected a positive integer")))?;
        dims.push(n as usize);
    }
    let dims = SubsystemDims::new(dims)?;
    let d = dims.total_dim();

    let data = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("data: expected an array"))?;

    let mut warnings = Vec::new();
    let state = match kind {
        "pure" => {
            if data.len() != d {
                return Err(Error::LengthMismatch {
                    expected: d,
                    got: data.len(),
                });
            }
            let mut amps = Vec::with_capacity(d);
            for (k, v) in data.iter().enumerate() {
                amps.push(parse_complex(v, &format!("data[{k}]"))?);
            }
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let state = PureState::new(dims, amps)?;
            if (norm - 1.0).abs() > CORRECTION_WARN_TOL {
                warnings.push(format!(
                    "input norm {norm:.9} deviates from 1 by {:.3e}; state was renormalized",
                    (norm - 1.0).abs()
                ));
            }
            State::Pure(state)
        }
        "mixed" => {
            if data.len() != d {
                return Err(malformed(format!(
                    "data: expected {d} rows, got {}",
                    data.len()
                )));
            }
            let mut m = DMatrix::<Complex64>::zeros(d, d);
            for (i, row) in data.iter().enumerate() {
                let row = row
                    .as_array()
                    .ok_or_else(|| malformed(format!("data[{i}]: expected an array")))?;
                if row.len() != d {
                    return Err(malformed(format!(
                        "data[{i}]: expected {d} entries, got {}",
                        row.len()
                    )));
                }
                for (j, v) in row.iter().enumerate() {
                    m[(i, j)] = parse_complex(v, &format!("data[{i}][{j}]"))?;
                }
            }
            State::Mixed(DensityMatrix::new(dims, m)?)
        }
        other => {
            return Err(malformed(format!(
                "kind: expected \"pure\" or \"mixed\", got \"{other}\""
            )))
        }
    };
    Ok((state, warnings))
}

/// Reads a state document from a file.
pub fn read_state(path: &Path) -> Result<(State, Vec<String>)> {
    let text = std::fs::read_to_string(path)?;
    read_state_str(&text)
}

/// Renders a state as a schema-1 JSON document.
pub fn write_state_string(state: &State, name: Option<&str>, seed: Option<u64>) -> String {
    let dims: Vec<usize> = state.dims().as_slice().to_vec();
    let data = match state {
        State::Pure(s) => Value::Array(
            s.amplitudes()
                .iter()
                .map(|z| json!([z.re, z.im]))
                .collect(),
        ),
        State::Mixed(r) => {
            let m = r.matrix();
            Value::Array(
                (0..m.nrows())
                    .map(|i| {
                        Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect())
                    })
                    .collect(),
            )
        }
    };
    let mut doc = json!({
        "schema": SCHEMA_VERSION,
        "kind": match state { State::Pure(_) => "pure", State::Mixed(_) => "mixed" },
        "dims": dims,
        "data": data,
    });
    let mut metadata = serde_json::Map::new();
    if let Some(n) = name {
        metadata.insert("name".into(), Value::String(n.into()));
    }
    if let Some(s) = seed {
        metadata.insert("seed".into(), json!(s));
    }
    if !metadata.is_empty() {
        doc.as_object_mut()
            .unwrap()
            .insert("metadata".into(), Value::Object(metadata));
    }
    serde_json::to_string_pretty(&doc).expect("state documents always serialize")
}

/// Writes a state document to a file.
pub fn write_state(path: &Path, state: &State, name: Option<&str>, seed: Option<u64>) -> Result<()> {
    std::fs::write(path, write_state_string(state, name, seed))?;
    Ok(())
}

/// Either criterion report.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Report {
    Pure(PureCriterionReport),
    Mixed(MixedCriterionReport),
}

impl Report {
    pub fn value(&self) -> f64 {
        match self {
            Report::Pure(r) => r.value,
            Report::Mixed(r) => r.value,
        }
    }

    pub fn separable(&self) -> bool {
        match self {
            Report::Pure(r) => r.separable,
            Report::Mixed(r) => r.separable,
        }
    }
}

/// Context describing one evaluation run, used by the renderers.
#[derive(Debug, Clone)]
pub struct RunMeta {
    pub state_id: String,
    pub dims: Vec<usize>,
    pub seed: Option<u64>,
    /// Wall time of the evaluation; appears only in the CSV row so that text
    /// and JSON reports stay byte-identical across runs.
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
    CsvRow,
}

/// Header matching [`ReportFormat::CsvRow`].
pub fn csv_header() -> &'static str {
    "state_id,dims,value,verdict,restarts,seed,wall_time_ms"
}

fn dims_label(dims: &[usize]) -> String {
    dims.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

fn verdict_label(separable: bool) -> &'static str {
    if separable {
        "separable"
    } else {
        "entangled"
    }
}

/// Renders a report in the requested format.
pub fn write_report(report: &Report, meta: &RunMeta, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut doc = serde_json::to_value(report).expect("reports always serialize");
            let obj = doc.as_object_mut().unwrap();
            obj.insert("state".into(), Value::String(meta.state_id.clone()));
            obj.insert("dims".into(), json!(meta.dims));
            if let Some(seed) = meta.seed {
                obj.insert("seed".into(), json!(seed));
            }
            serde_json::to_string_pretty(&doc).expect("reports always serialize")
        }
        ReportFormat::CsvRow => {
            let restarts = match report {
                Report::Pure(_) => String::new(),
                Report::Mixed(r) => r.diagnostics.restarts.to_string(),
            };
            let seed = meta.seed.map(|s| s.to_string()).unwrap_or_default();
            format!(
                "{},{},{},{},{},{},{:.3}",
                meta.state_id,
                dims_label(&meta.dims),
                report.value(),
                verdict_label(report.separable()),
                restarts,
                seed,
                meta.wall_time_ms
            )
        }
        ReportFormat::Text => render_text(report, meta),
    }
}

fn render_text(report: &Report, meta: &RunMeta) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "state: {}  dims: [{}]", meta.state_id, dims_label(&meta.dims));
    match report {
        Report::Pure(r) => {
            let _ = writeln!(out, "|C| = {:.15}  (epsilon = {:.1e})", r.value, r.epsilon);
            let _ = writeln!(out, "verdict: {}", verdict_label(r.separable));
            let _ = writeln!(out, "per-operator contributions:");
            let width = r
                .per_operator
                .iter()
                .map(|c| c.tag.len())
                .max()
                .unwrap_or(8)
                .max(8);
            let _ = writeln!(out, "  {:>3}  {:<width$}  |form|", "#", "operator");
            for c in &r.per_operator {
                let _ = writeln!(out, "  {:>3}  {:<width$}  {:.12}", c.index, c.tag, c.magnitude);
            }
        }
        Report::Mixed(r) => {
            let _ = writeln!(out, "C = {:.15}  (epsilon = {:.1e})", r.value, r.epsilon);
            let _ = writeln!(out, "verdict: {}", verdict_label(r.separable));
            let _ = writeln!(
                out,
                "rank: {}  operators: {}  best objective: {:.12}",
                r.rank, r.family_size, r.raw_objective
            );
            let _ = writeln!(
                out,
                "optimizer: {} restarts ({} converged), {} evaluations, seed {}, domain {}",
                r.diagnostics.restarts,
                r.diagnostics.converged_restarts,
                r.diagnostics.total_evals,
                r.diagnostics.seed,
                r.diagnostics.domain
            );
            let sv = r
                .best_point
                .singular_values
                .iter()
                .map(|v| format!("{v:.9}"))
                .collect::<Vec<_>>()
                .join(", ");
            let _ = writeln!(out, "singular values at best point: [{sv}]");
        }
    }
    out
}
