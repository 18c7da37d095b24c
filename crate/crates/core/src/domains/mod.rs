//! Model properly convex domains in parabolic coordinates `(x₁, x₂, x₃)`, with `x₁`
//! vertical: the paraboloid `D0`, the domain `DPrime` bounded by
//! `x₁ = x₃²/2 − log x₂`, its images `Dt = V_t · DPrime`, and a Euclidean unit ball
//! used as a closed-form metric oracle.

mod chord;
mod export;

pub use chord::{chord_by_bisection, Chord};
pub use export::{boundary_obj, horosphere_obj, horosphere_slice_svg, polyline_svg};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::projlin::{Mat4, ProjMap, Scalar};

/// Affine point `(x₁, x₂, x₃)` of the chart `[x₁:x₂:x₃:1]`.
pub type Point3 = Vector3<f64>;

/// Largest step tried when growing a bracket before declaring an endpoint ideal.
pub const BRACKET_LIMIT: f64 = 1e9;
/// Absolute tolerance of membership bisection.
pub const BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("base violation: ({x2}, {x3}) is outside the base of {family}")]
    BaseViolation { family: String, x2: f64, x3: f64 },
    #[error("point {0:?} is not interior")]
    NotInterior([f64; 3]),
    #[error("unbounded search along direction {0:?}")]
    UnboundedSearch([f64; 3]),
    #[error("zero direction vector")]
    ZeroDirection,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// `V_t`, mapping `DPrime` onto `Dt` and conjugating `𝔏′` into `𝔏_t`.
pub fn vt_map<T: Scalar>(t: &T) -> Result<ProjMap<T>, DomainError> {
    if t.is_zero() {
        return Err(DomainError::InvalidParameter("V_t needs t != 0".into()));
    }
    let o = T::one();
    let z = T::zero();
    let t1 = o.clone() / t.clone();
    let t2 = t1.clone() * t1.clone();
    let m = Mat4([
        [t2.clone(), t2.clone(), z.clone(), -t2],
        [z.clone(), t1.clone(), z.clone(), -t1.clone()],
        [z.clone(), z.clone(), t1, z.clone()],
        [z.clone(), z.clone(), z, o],
    ]);
    ProjMap::new(m).map_err(|e| DomainError::InvalidParameter(e.to_string()))
}

/// Precomputed affine data of `V_t` and its inverse.
#[derive(Debug, Clone)]
pub struct DtChart {
    t: f64,
    v: Mat4<f64>,
    v_inv: Mat4<f64>,
}

impl PartialEq for DtChart {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t
    }
}

impl DtChart {
    pub fn new(t: f64) -> Result<Self, DomainError> {
        if !t.is_finite() {
            return Err(DomainError::InvalidParameter(format!("t = {t} is not finite")));
        }
        let v = vt_map(&t)?.into_matrix();
        let v_inv = v.inverse().map_err(|e| DomainError::InvalidParameter(e.to_string()))?;
        Ok(DtChart { t, v, v_inv })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `V_t` applied to an affine point.
    pub fn forward(&self, y: &Point3) -> Point3 {
        affine_apply(&self.v, y)
    }

    /// `V_t⁻¹` applied to an affine point.
    pub fn pullback(&self, x: &Point3) -> Point3 {
        affine_apply(&self.v_inv, x)
    }

    /// Linear part of `V_t⁻¹` applied to a direction.
    pub fn pullback_dir(&self, v: &Point3) -> Point3 {
        linear_apply(&self.v_inv, v)
    }

    pub fn forward_dir(&self, v: &Point3) -> Point3 {
        linear_apply(&self.v, v)
    }
}

pub(crate) fn affine_apply(m: &Mat4<f64>, x: &Point3) -> Point3 {
    let h = m.mul_vec(&[x[0], x[1], x[2], 1.0]);
    Point3::new(h[0] / h[3], h[1] / h[3], h[2] / h[3])
}

fn linear_apply(m: &Mat4<f64>, v: &Point3) -> Point3 {
    let h = m.mul_vec(&[v[0], v[1], v[2], 0.0]);
    Point3::new(h[0], h[1], h[2])
}

/// The boundary function `F(x₂, x₃) = x₃²/2 − log x₂` of `DPrime`.
pub fn f_prime(x2: f64, x3: f64) -> f64 {
    0.5 * x3 * x3 - x2.ln()
}

/// The boundary function `f₀(x₂, x₃) = (x₂² + x₃²)/2` of `D0`.
pub fn f_zero(x2: f64, x3: f64) -> f64 {
    0.5 * (x2 * x2 + x3 * x3)
}

/// A model domain. `Shifted` is the vertical translate `{x : x − κe₁ ∈ base}`, i.e. the
/// algebraic horoball of level κ (a negative κ gives a strictly larger domain).
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexDomain {
    D0,
    DPrime,
    Dt(DtChart),
    UnitBall,
    Shifted { base: Box<ConvexDomain>, level: f64 },
}

impl ConvexDomain {
    pub fn dt(t: f64) -> Result<Self, DomainError> {
        Ok(ConvexDomain::Dt(DtChart::new(t)?))
    }

    pub fn shifted(base: ConvexDomain, level: f64) -> Result<Self, DomainError> {
        if !level.is_finite() {
            return Err(DomainError::InvalidParameter(format!("level {level} is not finite")));
        }
        Ok(ConvexDomain::Shifted { base: Box::new(base), level })
    }

    pub fn name(&self) -> String {
        match self {
            ConvexDomain::D0 => "D0".into(),
            ConvexDomain::DPrime => "DPrime".into(),
            ConvexDomain::Dt(c) => format!("Dt(t={})", c.t),
            ConvexDomain::UnitBall => "UnitBall".into(),
            ConvexDomain::Shifted { base, level } => format!("{}+{}", base.name(), level),
        }
    }

    /// Open-set membership.
    pub fn contains(&self, x: &Point3) -> bool {
        if !(x[0].is_finite() && x[1].is_finite() && x[2].is_finite()) {
            return false;
        }
        match self {
            ConvexDomain::D0 => x[0] > f_zero(x[1], x[2]),
            ConvexDomain::DPrime => x[1] > 0.0 && x[0] > f_prime(x[1], x[2]),
            ConvexDomain::Dt(c) => ConvexDomain::DPrime.contains(&c.pullback(x)),
            ConvexDomain::UnitBall => x.norm_squared() < 1.0,
            ConvexDomain::Shifted { base, level } => base.contains(&(x - Point3::new(*level, 0.0, 0.0))),
        }
    }

    /// Whether `(x₂, x₃)` lies in the (open) base.
    pub fn in_base(&self, x2: f64, x3: f64) -> bool {
        match self {
            ConvexDomain::D0 => x2.is_finite() && x3.is_finite(),
            ConvexDomain::DPrime => x2 > 0.0 && x3.is_finite(),
            ConvexDomain::Dt(c) => c.pullback(&Point3::new(0.0, x2, x3))[1] > 0.0 && x3.is_finite(),
            ConvexDomain::UnitBall => x2 * x2 + x3 * x3 < 1.0,
            ConvexDomain::Shifted { base, .. } => base.in_base(x2, x3),
        }
    }

    fn base_error(&self, x2: f64, x3: f64) -> DomainError {
        DomainError::BaseViolation { family: self.name(), x2, x3 }
    }

    /// The boundary function `h(x₂, x₃)`; `Dt` is solved by bisection through `V_t⁻¹`.
    pub fn boundary_value(&self, x2: f64, x3: f64) -> Result<f64, DomainError> {
        if !self.in_base(x2, x3) {
            return Err(self.base_error(x2, x3));
        }
        match self {
            ConvexDomain::D0 => Ok(f_zero(x2, x3)),
            ConvexDomain::DPrime => Ok(f_prime(x2, x3)),
            ConvexDomain::UnitBall => Ok(-(1.0 - x2 * x2 - x3 * x3).sqrt()),
            ConvexDomain::Shifted { base, level } => Ok(base.boundary_value(x2, x3)? + level),
            ConvexDomain::Dt(_) => self.boundary_by_bisection(x2, x3),
        }
    }

    /// Vertical bisection on the membership predicate (independent of closed forms).
    pub fn boundary_by_bisection(&self, x2: f64, x3: f64) -> Result<f64, DomainError> {
        if !self.in_base(x2, x3) {
            return Err(self.base_error(x2, x3));
        }
        let inside = |x1: f64| self.contains(&Point3::new(x1, x2, x3));
        let mut step = 1.0;
        let (mut lo, mut hi);
        if inside(0.0) {
            hi = 0.0;
            loop {
                if !inside(-step) {
                    lo = -step;
                    break;
                }
                hi = -step;
                step *= 2.0;
                if step > BRACKET_LIMIT {
                    return Err(DomainError::UnboundedSearch([-1.0, 0.0, 0.0]));
                }
            }
        } else {
            lo = 0.0;
            loop {
                if inside(step) {
                    hi = step;
                    break;
                }
                lo = step;
                step *= 2.0;
                if step > BRACKET_LIMIT {
                    return Err(DomainError::UnboundedSearch([1.0, 0.0, 0.0]));
                }
            }
        }
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if inside(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Upper boundary over the base, if the domain has one (the unit ball only).
    pub fn ceiling(&self, x2: f64, x3: f64) -> Option<f64> {
        match self {
            ConvexDomain::UnitBall => Some((1.0 - x2 * x2 - x3 * x3).max(0.0).sqrt()),
            ConvexDomain::Shifted { base, level } => base.ceiling(x2, x3).map(|c| c + level),
            _ => None,
        }
    }

    /// Both chord parameters of the line `x + τv` (closed forms or a safeguarded
    /// Newton solve, depending on the family).
    pub fn chord(&self, x: &Point3, v: &Point3) -> Result<Chord, DomainError> {
        chord::analytic_chord(self, x, v)
    }

    /// Chord endpoints as affine points (`None` = ideal), by membership bisection.
    pub fn chord_endpoints(&self, x: &Point3, v: &Point3) -> Result<(Option<Point3>, Option<Point3>), DomainError> {
        let c = chord_by_bisection(self, x, v)?;
        Ok((c.minus.map(|t| x + v * t), c.plus.map(|t| x + v * t)))
    }

    pub fn descriptor(&self) -> DomainDescriptor {
        match self {
            ConvexDomain::D0 => DomainDescriptor { family: "D0".into(), t: None, level: None },
            ConvexDomain::DPrime => DomainDescriptor { family: "DPrime".into(), t: None, level: None },
            ConvexDomain::Dt(c) => DomainDescriptor { family: "Dt".into(), t: Some(c.t), level: None },
            ConvexDomain::UnitBall => DomainDescriptor { family: "UnitBall".into(), t: None, level: None },
            ConvexDomain::Shifted { base, level } => {
                let mut d = base.descriptor();
                d.level = Some(d.level.unwrap_or(0.0) + level);
                d
            }
        }
    }
}

/// JSON descriptor `{"family": "D0"|"DPrime"|"Dt"|"UnitBall", "t"?: number, "level"?: number}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainDescriptor {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
}

impl DomainDescriptor {
    pub fn build(&self) -> Result<ConvexDomain, DomainError> {
        let base = match self.family.as_str() {
            "D0" => ConvexDomain::D0,
            "DPrime" => ConvexDomain::DPrime,
            "UnitBall" => ConvexDomain::UnitBall,
            "Dt" => {
                let t = self.t.ok_or_else(|| DomainError::InvalidParameter("Dt needs \"t\"".into()))?;
                ConvexDomain::dt(t)?
            }
            other => return Err(DomainError::InvalidParameter(format!("unknown family {other:?}"))),
        };
        match self.level {
            Some(k) if k != 0.0 => ConvexDomain::shifted(base, k),
            _ => Ok(base),
        }
    }
}

/// The graph of `h + κ` over the base of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Horosphere {
    pub domain: ConvexDomain,
    pub level: f64,
}

impl Horosphere {
    pub fn new(domain: ConvexDomain, level: f64) -> Result<Self, DomainError> {
        if !(level > 0.0 && level.is_finite()) {
            return Err(DomainError::InvalidParameter(format!("horosphere level {level} must be > 0")));
        }
        Ok(Horosphere { domain, level })
    }

    /// Height of the horosphere over `(x₂, x₃)`.
    pub fn height(&self, x2: f64, x3: f64) -> Result<f64, DomainError> {
        Ok(self.domain.boundary_value(x2, x3)? + self.level)
    }

    /// The horoball it bounds, as a domain.
    pub fn horoball(&self) -> ConvexDomain {
        ConvexDomain::Shifted { base: Box::new(self.domain.clone()), level: self.level }
    }
}

/// True iff `x₁ > h(x₂, x₃) + κ` over the base.
pub fn horoball_contains(hs: &Horosphere, x: &Point3) -> bool {
    hs.domain.in_base(x[1], x[2]) && hs.horoball().contains(x)
}
