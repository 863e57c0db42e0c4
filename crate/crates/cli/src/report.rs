//! JSON serialization of exact values. Keys are emitted in sorted order, so
//! a report depends only on its inputs.

use serde_json::{json, Map, Value};
use stickel_core::groups::fmt_elem;
use stickel_core::linalg::Rational;
use stickel_core::quadfield::{Ideal, Place};
use stickel_core::stickring::GroupRingElem;

pub const SCHEMA: u32 = 1;

/// `p/q` with `q ≥ 1`, also for integers.
pub fn q(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn elem(x: &GroupRingElem) -> Value {
    let mut coeffs = Map::new();
    for (g, c) in x.ring().elements().iter().zip(x.coeffs()) {
        if !num_traits::Zero::is_zero(c) {
            coeffs.insert(fmt_elem(g), Value::String(q(c)));
        }
    }
    json!({ "coeffs": coeffs })
}

pub fn ideal(i: &Ideal) -> Value {
    let (a, b, c) = i.hnf_entries();
    let den = i.denominator();
    json!({
        "generators": i.basis().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "hnf": [[a.to_string(), b.to_string()], ["0".to_string(), c.to_string()]],
        "denominator": den.to_string(),
        "norm": q(&i.norm()),
    })
}

pub fn place(v: &Place) -> Value {
    match v {
        Place::Prime(i) => json!({ "place": v.to_string(), "ideal": ideal(i) }),
        _ => json!({ "place": v.to_string() }),
    }
}

pub fn places(vs: &[Place]) -> Value {
    Value::Array(vs.iter().map(place).collect())
}
