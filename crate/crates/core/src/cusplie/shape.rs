use num_complex::Complex64;

use super::{group_exp, CuspError, Family, LieAlgElem};
use crate::projlin::Mat4;

/// Relative tolerance for recognizing an L₀ group element.
const L0_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspShape {
    /// Orientation-normalized shape, `Im ω > 0`.
    pub omega: Complex64,
    /// `(x₂ + iy₂)/(x₁ + iy₁)` before normalization.
    pub raw: Complex64,
    /// `l` was replaced by `l⁻¹` to make `Im ω > 0`.
    pub orientation_flipped: bool,
}

/// Cusp shape from the translation parameters `(x₁, y₁)` of `m` and `(x₂, y₂)` of `l`.
pub fn cusp_shape_params(m: (f64, f64), l: (f64, f64)) -> Result<CuspShape, CuspError> {
    let zm = Complex64::new(m.0, m.1);
    if zm.norm() == 0.0 || !zm.is_finite() {
        return Err(CuspError::ZeroElement);
    }
    let raw = Complex64::new(l.0, l.1) / zm;
    if raw.im == 0.0 {
        return Err(CuspError::DegenerateLimit(format!("shape {raw} is real: m and l are parallel")));
    }
    let flipped = raw.im < 0.0;
    Ok(CuspShape { omega: if flipped { -raw } else { raw }, raw, orientation_flipped: flipped })
}

/// Cusp shape of two 𝔏₀ elements.
pub fn cusp_shape(m: &LieAlgElem<f64>, l: &LieAlgElem<f64>) -> Result<CuspShape, CuspError> {
    for e in [m, l] {
        if e.family != Family::L0 {
            return Err(CuspError::NotInFamily { family: "L0".into(), residual: f64::NAN });
        }
    }
    cusp_shape_params((m.u, m.v), (l.u, l.v))
}

/// Translation parameters `(x, y)` of a projective L₀ element.
pub fn l0_params(g: &Mat4<f64>) -> Result<(f64, f64), CuspError> {
    let s = g[(3, 3)];
    if s == 0.0 {
        return Err(CuspError::NotInFamily { family: "L0".into(), residual: f64::INFINITY });
    }
    let h = g.scale(&(1.0 / s));
    let (x, y) = (h[(0, 1)], h[(0, 2)]);
    let fitted = group_exp(&LieAlgElem::l0(x, y))?;
    let residual = h.max_diff(fitted.matrix());
    if residual > L0_TOL * h.max_abs() {
        return Err(CuspError::NotInFamily { family: "L0".into(), residual });
    }
    Ok((x, y))
}

/// Upper-triangular unipotent 2×2 complex matrix.
pub type Parabolic = [[Complex64; 2]; 2];

/// The isomorphism from L₀ to the parabolic subgroup fixing ∞: `(x, y) ↦ [[1, x + iy], [0, 1]]`.
pub fn l0_to_parabolic(x: f64, y: f64) -> Parabolic {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[one, Complex64::new(x, y)], [zero, one]]
}

pub fn parabolic_mul(a: &Parabolic, b: &Parabolic) -> Parabolic {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}
