use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Number, Value};

/// Significant digits kept for every floating-point number in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of each input file, keyed by role.
    pub inputs: BTreeMap<String, String>,
    pub results: Value,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

fn round_float(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Round every non-integer number in place.
pub fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_float(n.as_f64().unwrap_or(f64::NAN));
            *v = Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}
