//! JSON rendering: exact rationals as strings, complex values with their
//! precision, margins alongside every engine total.

use serde_json::{json, Value};

use brion_core::matrix::QVector;
use brion_core::numeric::Complex;
use brion_core::rat::{rat_to_string, Rat};

pub fn complex_json(c: &Complex) -> Value {
    json!({
        "re": c.re.to_string_radix(10, Some(40)),
        "im": c.im.to_string_radix(10, Some(40)),
        "bits": c.prec(),
    })
}

pub fn rat_json(r: &Rat) -> Value {
    Value::String(rat_to_string(r))
}

pub fn vec_json(v: &QVector) -> Value {
    Value::Array(v.iter().map(rat_json).collect())
}

pub fn margin_json(margin: f64) -> Value {
    if margin.is_finite() {
        json!(margin)
    } else {
        json!(1e308)
    }
}

pub fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}
