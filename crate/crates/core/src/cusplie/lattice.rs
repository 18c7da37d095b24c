use serde_json::{json, Value};

use super::normalize::{normalize_algebra, normalize_pair, AlgebraNormalization};
use super::CuspError;
use crate::projlin::{matrix_from_json, matrix_to_json, AnyMatrix, Rational, Scalar};

/// Relative tolerance for float algebra inputs.
const ALGEBRA_TOL: f64 = 1e-9;

/// Whether `A`, `B` are group elements (logs are taken) or algebra elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    Group,
    Algebra,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeInput {
    pub a: AnyMatrix,
    pub b: AnyMatrix,
    pub kind: LatticeKind,
}

/// Parses `{"A": matrix, "B": matrix, "kind"?: "group" | "algebra"}`; `kind` defaults to `"group"`.
pub fn lattice_from_json(v: &Value) -> Result<LatticeInput, CuspError> {
    let get = |k: &str| v.get(k).ok_or_else(|| CuspError::Json(format!("missing \"{k}\"")));
    let a = matrix_from_json(get("A")?)?;
    let b = matrix_from_json(get("B")?)?;
    let kind = match v.get("kind").map(|k| k.as_str()) {
        None | Some(Some("group")) => LatticeKind::Group,
        Some(Some("algebra")) => LatticeKind::Algebra,
        Some(other) => return Err(CuspError::Json(format!("unknown kind {other:?}"))),
    };
    Ok(LatticeInput { a, b, kind })
}

/// Outcome of [`normalize_lattice`], serialized by [`NormalizationReport::to_json`].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationReport {
    pub sign: i8,
    pub conjugator: Value,
    pub residual: f64,
    pub family: String,
    pub images: [Value; 2],
    pub params: [(String, String); 2],
    pub generic: (i64, i64),
    pub kind: LatticeKind,
    /// `"exact"` only for rational algebra inputs; group logarithms are computed in floats.
    pub regime: &'static str,
}

impl NormalizationReport {
    pub fn to_json(&self) -> Value {
        json!({
            "sign": self.sign,
            "conjugator": self.conjugator,
            "residual": self.residual,
            "family": self.family,
            "images": self.images,
            "params": self.params.iter().map(|(a, b)| json!({"a": a, "b": b})).collect::<Vec<_>>(),
            "generic_combination": [self.generic.0, self.generic.1],
            "kind": match self.kind { LatticeKind::Group => "group", LatticeKind::Algebra => "algebra" },
            "regime": self.regime,
        })
    }
}

fn from_algebra<T: Scalar>(n: &AlgebraNormalization<T>, kind: LatticeKind, regime: &'static str) -> NormalizationReport {
    NormalizationReport {
        sign: n.sign,
        conjugator: matrix_to_json(&n.conjugator),
        residual: n.residual,
        family: n.family().name(),
        images: [matrix_to_json(&n.images[0]), matrix_to_json(&n.images[1])],
        params: [(n.params[0].0.to_string(), n.params[0].1.to_string()), (n.params[1].0.to_string(), n.params[1].1.to_string())],
        generic: n.generic,
        kind,
        regime,
    }
}

/// Normalizes a lattice input to 𝔏′ / 𝔏′₋ form.
pub fn normalize_lattice(input: &LatticeInput) -> Result<NormalizationReport, CuspError> {
    match (input.kind, &input.a, &input.b) {
        (LatticeKind::Algebra, AnyMatrix::Exact(a), AnyMatrix::Exact(b)) => {
            let n = normalize_algebra::<Rational>(a, b, 0.0)?;
            Ok(from_algebra(&n, LatticeKind::Algebra, "exact"))
        }
        (LatticeKind::Algebra, a, b) => {
            let n = normalize_algebra(&a.to_f64(), &b.to_f64(), ALGEBRA_TOL)?;
            Ok(from_algebra(&n, LatticeKind::Algebra, "float"))
        }
        (LatticeKind::Group, a, b) => {
            let p = normalize_pair(&a.to_f64(), &b.to_f64())?;
            let mut r = from_algebra(&p.algebra, LatticeKind::Group, "float");
            r.residual = p.residual;
            r.images = [matrix_to_json(&p.generators[0]), matrix_to_json(&p.generators[1])];
            Ok(r)
        }
    }
}
