//! The cusp Lie algebras 𝔏₀, 𝔏_t, 𝔏′, 𝔏′₋ and their groups, the minimal-polynomial
//! profile, normalization of rank-2 abelian groups, lattice convergence and cusp shape.

mod convergence;
mod lattice;
mod normalize;
mod profile;
mod shape;

pub use convergence::{convergence_conjugate, richardson_derivative, ConvergenceReport, PathFn};
pub use lattice::{lattice_from_json, normalize_lattice, LatticeInput, LatticeKind, NormalizationReport};
pub use normalize::{kernel, log_projective, normalize_algebra, normalize_pair, AlgebraNormalization, PairNormalization};
pub use profile::{classify, classify_group, minpoly_profile, Classification, MinPolyProfile};
pub use shape::{cusp_shape, cusp_shape_params, l0_params, l0_to_parabolic, parabolic_mul, CuspShape, Parabolic};

use crate::projlin::{LinAlgError, Mat4, ProjMap, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CuspError {
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("zero element: minimal-polynomial profile undefined")]
    ZeroElement,
    #[error("minimal polynomial has the wrong shape: {0}")]
    WrongShape(String),
    #[error("hypotheses violated: {0}")]
    HypothesesViolated(String),
    #[error("no element with n = 3 among integer combinations up to {0}")]
    NoGenericElement(i64),
    #[error("conjugator needs sqrt({0}), which is not rational")]
    NotRationallyNormalizable(String),
    #[error("degenerate limit: {0}")]
    DegenerateLimit(String),
    #[error("matrix is not in the {family} family (residual {residual:.3e})")]
    NotInFamily { family: String, residual: f64 },
    #[error("malformed lattice JSON: {0}")]
    Json(String),
}

/// One of the four abelian algebra families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<T> {
    L0,
    Lt(T),
    LPrime,
    LPrimeMinus,
}

impl<T: Scalar> Family<T> {
    pub fn name(&self) -> String {
        match self {
            Family::L0 => "L0".into(),
            Family::Lt(t) => format!("Lt(t={t})"),
            Family::LPrime => "LPrime".into(),
            Family::LPrimeMinus => "LPrimeMinus".into(),
        }
    }

    /// The family with its parameter converted to `f64`.
    pub fn to_f64(&self) -> Family<f64> {
        match self {
            Family::L0 => Family::L0,
            Family::Lt(t) => Family::Lt(t.to_float()),
            Family::LPrime => Family::LPrime,
            Family::LPrimeMinus => Family::LPrimeMinus,
        }
    }
}

/// An algebra element: `(u, v)` means `(r, s)` for `L0`/`Lt` and `(a, b)` for `LPrime`/`LPrimeMinus`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgElem<T> {
    pub family: Family<T>,
    pub u: T,
    pub v: T,
}

impl<T: Scalar> LieAlgElem<T> {
    pub fn new(family: Family<T>, u: T, v: T) -> Result<Self, CuspError> {
        if let Family::Lt(t) = &family {
            if t.is_zero() {
                return Err(CuspError::InvalidParameter("Lt needs t ≠ 0".into()));
            }
        }
        Ok(LieAlgElem { family, u, v })
    }

    pub fn l0(r: T, s: T) -> Self {
        LieAlgElem { family: Family::L0, u: r, v: s }
    }

    pub fn lprime(a: T, b: T) -> Self {
        LieAlgElem { family: Family::LPrime, u: a, v: b }
    }

    pub fn lprime_minus(a: T, b: T) -> Self {
        LieAlgElem { family: Family::LPrimeMinus, u: a, v: b }
    }

    pub fn lt(t: T, r: T, s: T) -> Result<Self, CuspError> {
        LieAlgElem::new(Family::Lt(t), r, s)
    }

    pub fn add(&self, other: &Self) -> Result<Self, CuspError> {
        if self.family != other.family {
            return Err(CuspError::InvalidParameter("elements of different families".into()));
        }
        Ok(LieAlgElem { family: self.family.clone(), u: self.u.clone() + other.u.clone(), v: self.v.clone() + other.v.clone() })
    }

    pub fn scale(&self, k: &T) -> Self {
        LieAlgElem { family: self.family.clone(), u: self.u.clone() * k.clone(), v: self.v.clone() * k.clone() }
    }

    pub fn to_f64(&self) -> LieAlgElem<f64> {
        LieAlgElem { family: self.family.to_f64(), u: self.u.to_float(), v: self.v.to_float() }
    }
}

/// The displayed 4×4 algebra matrix.
pub fn alg_matrix<T: Scalar>(e: &LieAlgElem<T>) -> Result<Mat4<T>, CuspError> {
    let (u, v) = (e.u.clone(), e.v.clone());
    let mut m = Mat4::zero();
    match &e.family {
        Family::L0 | Family::Lt(_) => {
            m[(0, 1)] = u.clone();
            m[(0, 2)] = v.clone();
            m[(1, 3)] = u.clone();
            m[(2, 3)] = v;
            if let Family::Lt(t) = &e.family {
                if t.is_zero() {
                    return Err(CuspError::InvalidParameter("Lt needs t ≠ 0".into()));
                }
                m[(1, 1)] = t.clone() * u;
            }
        }
        Family::LPrime | Family::LPrimeMinus => {
            m[(0, 2)] = v.clone();
            m[(2, 3)] = v;
            m[(1, 1)] = u.clone();
            m[(0, 3)] = if e.family == Family::LPrime { -u } else { u };
        }
    }
    Ok(m)
}

/// `(eᶻ − 1)/z`, accurate near 0.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

/// `(eᶻ − z − 1)/z²`, accurate near 0.
fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// The displayed closed-form group element.
pub fn group_exp(e: &LieAlgElem<f64>) -> Result<ProjMap<f64>, CuspError> {
    let (u, v) = (e.u, e.v);
    let m = match &e.family {
        Family::L0 => [[1.0, u, v, 0.5 * (u * u + v * v)], [0.0, 1.0, 0.0, u], [0.0, 0.0, 1.0, v], [0.0, 0.0, 0.0, 1.0]],
        Family::Lt(t) => {
            if *t == 0.0 {
                return Err(CuspError::InvalidParameter("Lt needs t ≠ 0".into()));
            }
            let z = t * u;
            let p1 = u * phi1(z);
            [[1.0, p1, v, u * u * phi2(z) + 0.5 * v * v], [0.0, z.exp(), 0.0, p1], [0.0, 0.0, 1.0, v], [0.0, 0.0, 0.0, 1.0]]
        }
        Family::LPrime => [[1.0, 0.0, v, 0.5 * v * v - u], [0.0, u.exp(), 0.0, 0.0], [0.0, 0.0, 1.0, v], [0.0, 0.0, 0.0, 1.0]],
        Family::LPrimeMinus => {
            [[1.0, 0.0, v, 0.5 * v * v + u], [0.0, u.exp(), 0.0, 0.0], [0.0, 0.0, 1.0, v], [0.0, 0.0, 0.0, 1.0]]
        }
    };
    Ok(ProjMap::new(Mat4(m))?)
}

/// Reads `(u, v)` off an algebra matrix of the given family; the residual is the largest
/// entry of `m − alg_matrix(family, u, v)`.
pub fn fit_params<T: Scalar>(family: &Family<T>, m: &Mat4<T>) -> Result<(T, T, f64), CuspError> {
    let (u, v) = match family {
        Family::L0 | Family::Lt(_) => (m[(0, 1)].clone(), m[(0, 2)].clone()),
        Family::LPrime | Family::LPrimeMinus => (m[(1, 1)].clone(), m[(0, 2)].clone()),
    };
    let e = LieAlgElem::new(family.clone(), u.clone(), v.clone())?;
    let r = (m - &alg_matrix(&e)?).max_abs();
    Ok((u, v, r))
}

#[cfg(test)]
mod tests;
