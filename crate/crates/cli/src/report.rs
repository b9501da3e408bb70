//! Canonical report JSON.
//!
//! Objects are written with keys in lexicographic order, floats with 17
//! significant digits in exponent form, integers verbatim, non-finite
//! floats as `null`. Parsing a canonical document and writing it again
//! reproduces it byte for byte.

use serde_json::{Map, Number, Value};

/// Float with 17 significant digits, or `null` when not finite.
pub fn num(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// A named result with an error estimate.
pub fn estimate(name: &str, value: Value, error: f64) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), name.into());
    m.insert("value".into(), value);
    m.insert("error".into(), num(error));
    Value::Object(m)
}

/// A named result that is exact up to floating point rounding.
pub fn exact(name: &str, value: Value) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), name.into());
    m.insert("value".into(), value);
    m.insert("error".into(), "exact".into());
    Value::Object(m)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn write_float(x: f64, out: &mut String) {
    if x.is_finite() {
        out.push_str(&format!("{x:.16e}"));
    } else {
        out.push_str("null");
    }
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                write_float(n.as_f64().unwrap_or(f64::NAN), out);
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

/// Canonical single-line rendering, newline terminated.
pub fn canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out.push('\n');
    out
}

/// Parses a report and renders it canonically.
pub fn recanonicalize(text: &str) -> serde_json::Result<String> {
    let v: Value = serde_json::from_str(text)?;
    Ok(canonical(&v))
}
