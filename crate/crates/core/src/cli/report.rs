//! Reports: a sorted key/value tree rendered either as `key: value` lines or
//! as JSON.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde_json::{Map, Value};

use crate::exterior::Rational;

/// Largest integer magnitude written as a JSON number; beyond it integers
/// become strings so consumers using doubles stay exact.
pub const MAX_SAFE_INTEGER: i64 = (1 << 53) - 1;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.set("command", command);
        r
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.fields)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.fields).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            flatten(k, v, &mut out);
        }
        out
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.to_json()
        } else {
            self.to_text()
        }
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".to_string(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                flatten(&format!("{prefix}.{k}"), v, out);
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let parts: Vec<String> = items.iter().map(scalar_text).collect();
            out.push_str(&format!("{prefix}: [{}]\n", parts.join(", ")));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, out);
            }
        }
        scalar => out.push_str(&format!("{prefix}: {}\n", scalar_text(scalar))),
    }
}

/// An exact integer: a JSON number when it is 53-bit safe, a string otherwise.
pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) if v.abs() <= MAX_SAFE_INTEGER => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn int64(x: i64) -> Value {
    int(&BigInt::from(x))
}

pub fn int128(x: i128) -> Value {
    int(&BigInt::from(x))
}

pub fn ints(xs: &[i64]) -> Value {
    Value::Array(xs.iter().map(|&x| int64(x)).collect())
}

/// An exact rational as `"p"` or `"p/q"`.
pub fn rat(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn rat_abs(r: &Rational) -> Value {
    rat(&r.abs())
}

pub fn object<K: Into<String>>(pairs: impl IntoIterator<Item = (K, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_integers_become_strings() {
        assert_eq!(int64(MAX_SAFE_INTEGER), Value::from(MAX_SAFE_INTEGER));
        assert_eq!(
            int64(-MAX_SAFE_INTEGER - 1),
            Value::String("-9007199254740992".into())
        );
        let big = BigInt::from(1u8) << 80;
        assert_eq!(int(&big), Value::String(big.to_string()));
    }

    #[test]
    fn rationals_render_exactly() {
        assert_eq!(
            rat(&Rational::new(6.into(), (-4).into())),
            Value::String("-3/2".into())
        );
        assert_eq!(
            rat(&Rational::from_integer(7.into())),
            Value::String("7".into())
        );
    }

    #[test]
    fn text_flattens_sorted() {
        let mut r = Report::new("dim");
        r.set("b", object([("y", int64(2)), ("x", Value::from(true))]));
        r.set("a", ints(&[1, -2]));
        r.set(
            "list",
            Value::Array(vec![object([("k", Value::from("v"))])]),
        );
        assert_eq!(
            r.to_text(),
            "a: [1, -2]\nb.x: true\nb.y: 2\ncommand: dim\nlist[0].k: v\n"
        );
        let back: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r.clone().into_value());
    }
}
