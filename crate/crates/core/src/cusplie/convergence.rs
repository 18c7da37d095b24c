use super::{alg_matrix, group_exp, CuspError, LieAlgElem};
use crate::domains::vt_map;
use crate::projlin::Mat4;

/// A path `t ↦ (a, b)` of 𝔏′ parameters.
pub type PathFn<'a> = &'a dyn Fn(f64) -> [f64; 2];

/// Step used for the one-sided derivative at 0.
const STEP: f64 = 1.0 / 1024.0;
/// Relative determinant below which two derivative vectors count as dependent.
const DEPENDENT: f64 = 1e-8;

/// Derivative at 0 of a path vanishing at 0: Richardson extrapolation `2q(h/2) − q(h)` of
/// the difference quotient `q(h) = p(h)/h`.
pub fn richardson_derivative(path: PathFn, h: f64) -> [f64; 2] {
    let q = |s: f64| {
        let p = path(s);
        [p[0] / s, p[1] / s]
    };
    let (a, b) = (q(h), q(h / 2.0));
    [2.0 * b[0] - a[0], 2.0 * b[1] - a[1]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub t: f64,
    /// `V_t g(a_t) V_t⁻¹` and `V_t g(b_t) V_t⁻¹` as 𝔏_t elements with parameters `a_t/t`, `b_t/t`.
    pub conjugated: [LieAlgElem<f64>; 2],
    pub generators: [Mat4<f64>; 2],
    /// Largest entry of `V_t x V_t⁻¹ − alg_matrix(𝔏_t(x/t))` over both algebra elements.
    pub conjugation_residual: f64,
    /// 𝔏₀ elements given by the derivatives at 0.
    pub limit: [LieAlgElem<f64>; 2],
    pub limit_generators: [Mat4<f64>; 2],
    /// `det(a′(0), b′(0))`.
    pub limit_det: f64,
}

/// Conjugates the lattice with 𝔏′ parameters `a(t)`, `b(t)` by `V_t` and computes the
/// 𝔏₀ limit from the derivatives at `t = 0`.
pub fn convergence_conjugate(a: PathFn, b: PathFn, t: f64) -> Result<ConvergenceReport, CuspError> {
    if !(t != 0.0 && t.is_finite()) {
        return Err(CuspError::InvalidParameter(format!("t = {t} must be finite and nonzero")));
    }
    let da = richardson_derivative(a, STEP);
    let db = richardson_derivative(b, STEP);
    for (name, p, d) in [("a", a, da), ("b", b, db)] {
        let tiny = 2f64.powi(-30);
        let v = p(tiny);
        let bound = 1e-6 * d[0].hypot(d[1]).max(1.0);
        if v[0].hypot(v[1]) > bound || !d[0].is_finite() || !d[1].is_finite() {
            return Err(CuspError::HypothesesViolated(format!("path {name} does not tend to 0 differentiably")));
        }
    }
    let det = da[0] * db[1] - da[1] * db[0];
    if det.abs() < DEPENDENT * da[0].hypot(da[1]) * db[0].hypot(db[1]) || det == 0.0 {
        return Err(CuspError::DegenerateLimit(format!("derivatives {da:?} and {db:?} are linearly dependent")));
    }
    let vt = vt_map(&t).map_err(|e| CuspError::InvalidParameter(e.to_string()))?;
    let vt_inv = vt.inverse();
    let mut conjugated = Vec::new();
    let mut generators = Vec::new();
    let mut residual: f64 = 0.0;
    for p in [a(t), b(t)] {
        let x = alg_matrix(&LieAlgElem::lprime(p[0], p[1]))?;
        let direct = &(vt.matrix() * &x) * vt_inv.matrix();
        let e = LieAlgElem::lt(t, p[0] / t, p[1] / t)?;
        residual = residual.max(direct.max_diff(&alg_matrix(&e)?));
        generators.push(group_exp(&e)?.into_matrix());
        conjugated.push(e);
    }
    let limit = [LieAlgElem::l0(da[0], da[1]), LieAlgElem::l0(db[0], db[1])];
    let limit_generators = [group_exp(&limit[0])?.into_matrix(), group_exp(&limit[1])?.into_matrix()];
    Ok(ConvergenceReport {
        t,
        conjugated: [conjugated[0].clone(), conjugated[1].clone()],
        generators: [generators[0].clone(), generators[1].clone()],
        conjugation_residual: residual,
        limit,
        limit_generators,
        limit_det: det,
    })
}
