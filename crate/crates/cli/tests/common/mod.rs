#![allow(dead_code)]

pub mod schema;

use std::process::Command;

use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.stdout).expect("stdout is one JSON document")
    }
}

pub fn chairs(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_chairs"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn schema() -> schema::Schema {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/output-v1.schema.json");
    let text = std::fs::read_to_string(path).expect("schema file shipped in the repository");
    let value: Value = serde_json::from_str(&text).expect("schema is JSON");
    schema::Schema::new(value).expect("schema uses supported keywords")
}

/// Schema violations of `doc`.
pub fn violations(schema: &schema::Schema, doc: &Value) -> Vec<String> {
    schema.validate(doc)
}
