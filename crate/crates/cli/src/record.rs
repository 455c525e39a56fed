//! Output records and their JSON-lines / CSV renderings.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

pub type Fields = BTreeMap<String, Value>;

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub command: &'static str,
    /// `row`, `trial`, `aggregate`, `summary` or `criterion`.
    pub kind: &'static str,
    pub trial: Option<u64>,
    pub parameters: Fields,
    pub seed: u64,
    pub outputs: Fields,
    /// Only filled in under `--timing`; otherwise `null` so that repeated
    /// invocations are byte-identical.
    pub wall_time_ms: Option<f64>,
}

impl RunRecord {
    pub fn new(command: &'static str, kind: &'static str, parameters: &Fields, seed: u64) -> Self {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            command,
            kind,
            trial: None,
            parameters: parameters.clone(),
            seed,
            outputs: Fields::new(),
            wall_time_ms: None,
        }
    }

    pub fn trial(mut self, i: u64) -> Self {
        self.trial = Some(i);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.outputs.insert(key.to_string(), value.into());
        self
    }

    pub fn set_num(&mut self, key: &str, x: f64) -> &mut Self {
        self.outputs.insert(key.to_string(), num(x));
        self
    }

    pub fn outputs_from<T: Serialize>(&mut self, value: &T) -> Result<&mut Self, CliError> {
        match serde_json::to_value(value)? {
            Value::Object(map) => {
                for (k, v) in map {
                    self.outputs.insert(k, v);
                }
                Ok(self)
            }
            other => Err(CliError::Invariant(format!("expected an object, got {other}"))),
        }
    }
}

/// JSON has no infinities; those are written as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn render(records: &[RunRecord], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut out = String::new();
            for r in records {
                out.push_str(&serde_json::to_string(r)?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => render_csv(records),
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

/// One row per record; parameter columns are prefixed `param.`, output
/// columns are the union of all output keys.
fn render_csv(records: &[RunRecord]) -> Result<String, CliError> {
    let params: BTreeSet<&String> = records.iter().flat_map(|r| r.parameters.keys()).collect();
    let outputs: BTreeSet<&String> = records.iter().flat_map(|r| r.outputs.keys()).collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["schema_version", "command", "kind", "trial", "seed", "wall_time_ms"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(params.iter().map(|k| format!("param.{k}")));
    header.extend(outputs.iter().map(|k| k.to_string()));
    w.write_record(&header)?;

    for r in records {
        let mut row = vec![
            r.schema_version.to_string(),
            r.command.to_string(),
            r.kind.to_string(),
            r.trial.map(|t| t.to_string()).unwrap_or_default(),
            r.seed.to_string(),
            r.wall_time_ms.map(|t| t.to_string()).unwrap_or_default(),
        ];
        row.extend(params.iter().map(|k| cell(r.parameters.get(*k))));
        row.extend(outputs.iter().map(|k| cell(r.outputs.get(*k))));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Invariant(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Invariant(e.to_string()))
}
