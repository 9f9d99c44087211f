//! Helpers shared by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", self.stdout))
    }
}

pub fn dpgamma(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_dpgamma")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn schema() -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/report-schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Validate `doc` against the JSON Schema keywords the report schema uses.
/// Returns the paths of the violations.
pub fn validate(schema: &Value, doc: &Value) -> Vec<String> {
    let mut errs = Vec::new();
    check(schema, schema, doc, "$", &mut errs);
    errs
}

fn resolve<'a>(root: &'a Value, s: &'a Value) -> &'a Value {
    match s.get("$ref").and_then(Value::as_str) {
        Some(r) => {
            let ptr = r.strip_prefix('#').expect("local reference");
            resolve(root, root.pointer(ptr).unwrap_or_else(|| panic!("dangling {r}")))
        }
        None => s,
    }
}

fn type_ok(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64() || v.as_f64().is_some_and(|x| x.fract() == 0.0),
        other => panic!("unknown type {other}"),
    }
}

fn check(root: &Value, s: &Value, v: &Value, path: &str, errs: &mut Vec<String>) {
    let s = resolve(root, s);
    let mut fail = |m: String| errs.push(format!("{path}: {m}"));
    if let Some(t) = s.get("type") {
        let ok = match t {
            Value::String(t) => type_ok(t, v),
            Value::Array(ts) => ts.iter().any(|t| type_ok(t.as_str().unwrap(), v)),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            fail(format!("expected {t}, got {v}"));
            return;
        }
    }
    if let Some(c) = s.get("const") {
        if c != v {
            fail(format!("expected {c}"));
        }
    }
    if let Some(Value::Array(e)) = s.get("enum") {
        if !e.contains(v) {
            fail(format!("{v} not in {e:?}"));
        }
    }
    if let (Some(p), Some(x)) = (s.get("pattern").and_then(Value::as_str), v.as_str()) {
        if !regex::Regex::new(p).unwrap().is_match(x) {
            fail(format!("{x:?} does not match {p}"));
        }
    }
    if let (Some(m), Some(x)) = (s.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < m {
            fail(format!("{x} < {m}"));
        }
    }
    if let (Some(m), Some(x)) = (s.get("exclusiveMinimum").and_then(Value::as_f64), v.as_f64()) {
        if x <= m {
            fail(format!("{x} <= {m}"));
        }
    }
    if let Some(obj) = v.as_object() {
        if let Some(Value::Array(req)) = s.get("required") {
            for k in req.iter().filter_map(Value::as_str) {
                if !obj.contains_key(k) {
                    errs.push(format!("{path}: missing {k}"));
                }
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, x) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(ps) => check(root, ps, x, &format!("{path}.{k}"), errs),
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errs.push(format!("{path}: unexpected {k}"))
                }
                None => {}
            }
        }
    }
    if let Some(arr) = v.as_array() {
        if let Some(m) = s.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < m {
                errs.push(format!("{path}: fewer than {m} items"));
            }
        }
        if let Some(item) = s.get("items") {
            for (i, x) in arr.iter().enumerate() {
                check(root, item, x, &format!("{path}[{i}]"), errs);
            }
        }
    }
    if let Some(Value::Array(any)) = s.get("anyOf") {
        if !any.iter().any(|a| validate_sub(root, a, v)) {
            errs.push(format!("{path}: no anyOf branch matches"));
        }
    }
    if let Some(Value::Array(all)) = s.get("allOf") {
        for a in all {
            check(root, a, v, path, errs);
        }
    }
    if let Some(cond) = s.get("if") {
        if validate_sub(root, cond, v) {
            if let Some(then) = s.get("then") {
                check(root, then, v, path, errs);
            }
        }
    }
}

fn validate_sub(root: &Value, s: &Value, v: &Value) -> bool {
    let mut e = Vec::new();
    check(root, s, v, "", &mut e);
    e.is_empty()
}
