use serde::Serialize;

use super::normalize::log_projective;
use super::CuspError;
use crate::projlin::{minimal_polynomial, Mat4, Scalar};

/// Minimal polynomial `tⁿ(t − f)` of an algebra element.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinPolyProfile {
    pub n: u8,
    pub f_value: f64,
    /// `f = 0`: the element lies in the kernel of the functional.
    pub kernel_flag: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    PureTranslation,
    PureDilation,
    Generic,
}

/// Extracts `(n, f)` from the minimal polynomial. `tol` is relative to the largest entry
/// and is ignored in the exact regime.
pub fn minpoly_profile<T: Scalar>(m: &Mat4<T>, tol: f64) -> Result<MinPolyProfile, CuspError> {
    let scale = m.max_abs();
    if scale == 0.0 {
        return Err(CuspError::ZeroElement);
    }
    let p = minimal_polynomial(m)?;
    let c = p.coeffs();
    let d = c.len() - 1;
    if !(3..=4).contains(&d) {
        return Err(CuspError::WrongShape(format!("minimal polynomial {p} has degree {d}")));
    }
    for (k, ck) in c.iter().enumerate().take(d - 1) {
        if !ck.is_zero_within(tol * scale.powi((d - k) as i32)) {
            return Err(CuspError::WrongShape(format!("minimal polynomial {p} is not of the form tⁿ(t − f)")));
        }
    }
    let f = -c[d - 1].clone();
    let kernel_flag = f.is_zero_within(tol * scale);
    Ok(MinPolyProfile { n: (d - 1) as u8, f_value: if kernel_flag { 0.0 } else { f.to_float() }, kernel_flag })
}

/// Pure translation iff `f = 0`; pure dilation iff `n = 2`, `f ≠ 0`; generic iff `n = 3`.
pub fn classify(p: &MinPolyProfile) -> Classification {
    if p.kernel_flag {
        Classification::PureTranslation
    } else if p.n == 2 {
        Classification::PureDilation
    } else {
        Classification::Generic
    }
}

/// Classifies a group element through its logarithm (scaled so the repeated eigenvalue is 1).
pub fn classify_group(g: &Mat4<f64>, tol: f64) -> Result<Classification, CuspError> {
    Ok(classify(&minpoly_profile(&log_projective(g)?, tol)?))
}
