use serde_json::{json, Value};

use super::matrix::Mat4;
use super::scalar::{format_rational, parse_rational, Rational, Regime, Scalar};
use super::LinAlgError;

/// A matrix read from JSON, tagged with its regime.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Exact(Mat4<Rational>),
    Float(Mat4<f64>),
}

impl AnyMatrix {
    pub fn regime(&self) -> Regime {
        match self {
            AnyMatrix::Exact(_) => Regime::Exact,
            AnyMatrix::Float(_) => Regime::Float,
        }
    }

    pub fn to_f64(&self) -> Mat4<f64> {
        match self {
            AnyMatrix::Exact(m) => m.to_f64(),
            AnyMatrix::Float(m) => m.clone(),
        }
    }
}

/// Serializes as `{"regime": ..., "rows": [[...]]}`; exact entries become "p/q" strings.
pub fn matrix_to_json<T: Scalar>(m: &Mat4<T>) -> Value {
    let rows: Vec<Vec<Value>> =
        m.0.iter()
            .map(|row| {
                row.iter()
                    .map(|x| match T::REGIME {
                        Regime::Exact => Value::String(format_rational(&x.to_rational().expect("exact"))),
                        Regime::Float => json!(x.to_float()),
                    })
                    .collect()
            })
            .collect();
    json!({ "regime": T::REGIME, "rows": rows })
}

pub fn matrix_from_json(v: &Value) -> Result<AnyMatrix, LinAlgError> {
    let bad = |msg: &str| LinAlgError::Parse(msg.to_string());
    let regime = v.get("regime").and_then(Value::as_str).ok_or_else(|| bad("missing \"regime\""))?;
    let rows = v.get("rows").and_then(Value::as_array).ok_or_else(|| bad("missing \"rows\""))?;
    if rows.len() != 4 {
        return Err(bad("\"rows\" must hold 4 rows"));
    }
    let mut cells: Vec<&Value> = Vec::with_capacity(16);
    for row in rows {
        let r = row.as_array().filter(|r| r.len() == 4).ok_or_else(|| bad("each row must hold 4 entries"))?;
        cells.extend(r.iter());
    }
    match regime {
        "exact" => {
            let mut m = Mat4::<Rational>::zero();
            for (k, c) in cells.iter().enumerate() {
                m.0[k / 4][k % 4] = match c {
                    Value::String(s) => parse_rational(s)?,
                    Value::Number(n) => parse_rational(&n.to_string())?,
                    _ => return Err(bad("exact entries must be \"p/q\" strings")),
                };
            }
            Ok(AnyMatrix::Exact(m))
        }
        "float" => {
            let mut m = Mat4::<f64>::zero();
            for (k, c) in cells.iter().enumerate() {
                m.0[k / 4][k % 4] = c.as_f64().ok_or_else(|| bad("float entries must be numbers"))?;
            }
            Ok(AnyMatrix::Float(m))
        }
        other => Err(bad(&format!("unknown regime {other:?}"))),
    }
}
