//! The single JSON document every successful command prints.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Serialize)]
pub struct OutputDocument {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub parameters: Value,
    pub payload: Value,
    pub timings: Option<Timings>,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub elapsed_ms: f64,
}

impl OutputDocument {
    pub fn new(command: &'static str, parameters: Value, payload: Value) -> Self {
        OutputDocument { schema_version: SCHEMA_VERSION, command, parameters, payload, timings: None }
    }

    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("documents serialize");
        out.push('\n');
        out
    }
}
