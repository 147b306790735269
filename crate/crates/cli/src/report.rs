use serde::Serialize;
use serde_json::{Map, Value};

use rainbowlab::randmatch::sig6;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub command: String,
    pub parameters: Value,
    pub seed: u64,
    pub elapsed_ms: u64,
    pub result: Value,
}

/// Rounds every non-integer number to 6 significant digits.
pub fn round_reals(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(x) = num.as_f64().and_then(|x| serde_json::Number::from_f64(sig6(x))) {
                *num = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_reals),
        Value::Object(map) => map.values_mut().for_each(round_reals),
        _ => {}
    }
}

/// Drops unset flags: nulls, empty lists and `false`.
pub fn prune_unset(v: Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.into_iter()
                .filter(|(_, x)| {
                    !matches!(x, Value::Null | Value::Bool(false)) && x.as_array().is_none_or(|a| !a.is_empty())
                })
                .collect::<Map<_, _>>(),
        ),
        other => other,
    }
}

pub fn render(report: &RunReport) -> String {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    round_reals(&mut v);
    serde_json::to_string_pretty(&v).expect("values serialize")
}
