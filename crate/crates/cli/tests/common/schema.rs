//! Validator for the JSON Schema (draft 7) keywords used by
//! `schema/output-v1.schema.json`: type, const, enum, required,
//! properties, additionalProperties, items, minItems, maxItems, minimum,
//! minLength, pattern, oneOf, allOf, if/then and local `$ref`s. Unknown
//! keywords are rejected so the schema cannot silently outgrow this code.

use regex::Regex;
use serde_json::Value;

const KNOWN: &[&str] = &[
    "$schema", "$id", "title", "description", "definitions", "$ref", "type", "const", "enum",
    "required", "properties", "additionalProperties", "items", "minItems", "maxItems", "minimum",
    "minLength", "pattern", "oneOf", "allOf", "if", "then",
];

pub struct Schema {
    root: Value,
}

impl Schema {
    pub fn new(root: Value) -> Result<Schema, String> {
        check_keywords(&root)?;
        Ok(Schema { root })
    }

    pub fn validate(&self, doc: &Value) -> Vec<String> {
        let mut errors = Vec::new();
        self.check(&self.root, doc, "", &mut errors);
        errors
    }

    fn resolve<'a>(&'a self, reference: &str) -> &'a Value {
        let path = reference.strip_prefix("#/").expect("only local references");
        path.split('/').fold(&self.root, |node, key| &node[key])
    }

    fn is_valid(&self, schema: &Value, doc: &Value) -> bool {
        let mut errors = Vec::new();
        self.check(schema, doc, "", &mut errors);
        errors.is_empty()
    }

    fn check(&self, schema: &Value, doc: &Value, at: &str, errors: &mut Vec<String>) {
        let Some(obj) = schema.as_object() else {
            return;
        };
        let mut fail = |msg: String| errors.push(format!("{at}: {msg}"));
        if let Some(r) = obj.get("$ref").and_then(Value::as_str) {
            let target = self.resolve(r);
            self.check(target, doc, at, errors);
            return;
        }
        if let Some(t) = obj.get("type") {
            let types: Vec<&str> = match t {
                Value::String(s) => vec![s.as_str()],
                Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
                _ => vec![],
            };
            if !types.iter().any(|t| type_matches(t, doc)) {
                fail(format!("expected type {types:?}, got {doc}"));
            }
        }
        if let Some(c) = obj.get("const") {
            if c != doc {
                fail(format!("expected {c}, got {doc}"));
            }
        }
        if let Some(Value::Array(options)) = obj.get("enum") {
            if !options.contains(doc) {
                fail(format!("{doc} not in {options:?}"));
            }
        }
        if let Some(min) = obj.get("minimum").and_then(Value::as_f64) {
            if doc.as_f64().is_some_and(|v| v < min) {
                fail(format!("{doc} below {min}"));
            }
        }
        if let Value::String(s) = doc {
            if let Some(min) = obj.get("minLength").and_then(Value::as_u64) {
                if (s.chars().count() as u64) < min {
                    fail(format!("string shorter than {min}"));
                }
            }
            if let Some(p) = obj.get("pattern").and_then(Value::as_str) {
                if !Regex::new(p).expect("valid pattern").is_match(s) {
                    fail(format!("'{s}' does not match {p}"));
                }
            }
        }
        if let Value::Array(items) = doc {
            if let Some(min) = obj.get("minItems").and_then(Value::as_u64) {
                if (items.len() as u64) < min {
                    fail(format!("fewer than {min} items"));
                }
            }
            if let Some(max) = obj.get("maxItems").and_then(Value::as_u64) {
                if (items.len() as u64) > max {
                    fail(format!("more than {max} items"));
                }
            }
            if let Some(item_schema) = obj.get("items") {
                for (i, item) in items.iter().enumerate() {
                    self.check(item_schema, item, &format!("{at}/{i}"), errors);
                }
            }
        }
        if let Value::Object(fields) = doc {
            if let Some(Value::Array(required)) = obj.get("required") {
                for key in required.iter().filter_map(Value::as_str) {
                    if !fields.contains_key(key) {
                        errors.push(format!("{at}: missing '{key}'"));
                    }
                }
            }
            let props = obj.get("properties").and_then(Value::as_object);
            for (key, value) in fields {
                match props.and_then(|p| p.get(key)) {
                    Some(sub) => self.check(sub, value, &format!("{at}/{key}"), errors),
                    None if obj.get("additionalProperties") == Some(&Value::Bool(false)) => {
                        errors.push(format!("{at}: unexpected '{key}'"));
                    }
                    None => {}
                }
            }
        }
        if let Some(Value::Array(all)) = obj.get("allOf") {
            for sub in all {
                self.check(sub, doc, at, errors);
            }
        }
        if let Some(Value::Array(one)) = obj.get("oneOf") {
            let hits = one.iter().filter(|sub| self.is_valid(sub, doc)).count();
            if hits != 1 {
                errors.push(format!("{at}: {hits} oneOf branches match {doc}"));
            }
        }
        if let Some(cond) = obj.get("if") {
            if self.is_valid(cond, doc) {
                if let Some(then) = obj.get("then") {
                    self.check(then, doc, at, errors);
                }
            }
        }
    }
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "null" => v.is_null(),
        "boolean" => v.is_boolean(),
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64() || v.as_f64().is_some_and(|f| f.fract() == 0.0),
        _ => false,
    }
}

fn check_keywords(node: &Value) -> Result<(), String> {
    let Some(obj) = node.as_object() else {
        return Ok(());
    };
    for (key, value) in obj {
        if !KNOWN.contains(&key.as_str()) {
            return Err(format!("unsupported schema keyword '{key}'"));
        }
        match key.as_str() {
            "properties" | "definitions" => {
                for sub in value.as_object().into_iter().flat_map(|m| m.values()) {
                    check_keywords(sub)?;
                }
            }
            "items" | "if" | "then" => check_keywords(value)?,
            "oneOf" | "allOf" => {
                for sub in value.as_array().into_iter().flatten() {
                    check_keywords(sub)?;
                }
            }
            _ => {}
        }
    }
    Ok(())
}

