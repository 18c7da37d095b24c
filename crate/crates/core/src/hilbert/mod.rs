//! Hilbert distance, Finsler norm, Busemann density and volume on the model domains.

mod hausdorff;
mod quadrature;
mod volume;

pub use hausdorff::{hausdorff_oracle, HausdorffEstimate};
pub use quadrature::{busemann_density, gauss_legendre, unit_ball_lebesgue, SphereRule, ALPHA3};
pub use volume::{
    busemann_volume, busemann_volume_table, busemann_volume_with, density_grid_csv, volume_table_csv, DensityModel,
    DirectDensity, HorosphereDensity, Region, VerticalSampling, VolumeEstimate, VolumeRow,
};

use crate::domains::{Chord, ConvexDomain, DomainError, Point3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HilbertError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("points are not collinear (residual {0:.3e})")]
    NotCollinear(f64),
    #[error("quadrature did not converge: fine {fine}, coarse {coarse}")]
    NonConvergence { fine: f64, coarse: f64 },
    #[error("region leaves the domain at {0:?}")]
    RegionOutsideDomain([f64; 3]),
    #[error("region too large for the Hausdorff oracle (Hilbert diameter {0:.3})")]
    RegionTooLarge(f64),
    #[error("invalid quadrature settings: {0}")]
    InvalidSpec(String),
    #[error("degenerate norm: direction {0:?} has zero length")]
    DegenerateNorm([f64; 3]),
}

/// Numerical settings shared by the volume routines.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes in cos θ.
    pub sphere_theta: usize,
    /// Uniform nodes in φ (even, so the rule is antipodally symmetric).
    pub sphere_phi: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub bisection_tol: f64,
    /// Vertical cutoff X for truncated integration.
    pub cutoff: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            sphere_theta: 34,
            sphere_phi: 68,
            mc_samples: 200_000,
            seed: 0x5eed_2024,
            bisection_tol: 1e-12,
            cutoff: None,
        }
    }
}

impl QuadratureSpec {
    pub fn sphere_nodes(&self) -> usize {
        self.sphere_theta * self.sphere_phi
    }

    pub fn validate(&self) -> Result<(), HilbertError> {
        if self.sphere_theta < 2 || self.sphere_phi < 4 || self.sphere_phi % 2 != 0 {
            return Err(HilbertError::InvalidSpec("sphere rule needs theta >= 2 and even phi >= 4".into()));
        }
        if self.mc_samples == 0 {
            return Err(HilbertError::InvalidSpec("sample count must be positive".into()));
        }
        if !(self.bisection_tol > 0.0) {
            return Err(HilbertError::InvalidSpec("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Cross ratio `(|y−a||x−b|)/(|y−b||x−a|)` of collinear points ordered a, x, y, b;
/// an ideal endpoint (`None`) contributes a factor 1.
pub fn cross_ratio(a: Option<Point3>, x: Point3, y: Point3, b: Option<Point3>) -> Result<f64, HilbertError> {
    let pts: Vec<Point3> = [a, Some(x), Some(y), b].into_iter().flatten().collect();
    let (p0, dir) = match pts.iter().skip(1).find(|q| (*q - pts[0]).norm() > 0.0) {
        Some(q) => (pts[0], (q - pts[0]).normalize()),
        None => return Ok(1.0),
    };
    let scale = pts.iter().map(|q| (q - p0).norm()).fold(1.0, f64::max);
    for q in &pts {
        let r = q - p0;
        let res = (r - dir * r.dot(&dir)).norm();
        if res > 1e-9 * scale {
            return Err(HilbertError::NotCollinear(res));
        }
    }
    let mut cr = 1.0;
    if let Some(a) = a {
        cr *= (y - a).norm() / (x - a).norm();
    }
    if let Some(b) = b {
        cr *= (x - b).norm() / (y - b).norm();
    }
    Ok(cr)
}

/// Hilbert distance from chord parameters of the line `x + τ(y − x)`.
fn distance_from_chord(c: &Chord) -> f64 {
    let a = c.minus.map_or(0.0, |t| (1.0 / -t).ln_1p());
    let b = c.plus.map_or(0.0, |t| (1.0 / (t - 1.0)).ln_1p());
    a + b
}

/// `log` of the cross ratio of the chord through `x`, `y`; zero when `x = y`.
pub fn hilbert_distance(dom: &ConvexDomain, x: &Point3, y: &Point3) -> Result<f64, HilbertError> {
    let v = y - x;
    if !dom.contains(y) {
        return Err(DomainError::NotInterior([y[0], y[1], y[2]]).into());
    }
    if v.norm_squared() == 0.0 {
        if !dom.contains(x) {
            return Err(DomainError::NotInterior([x[0], x[1], x[2]]).into());
        }
        return Ok(0.0);
    }
    Ok(distance_from_chord(&dom.chord(x, &v)?))
}

/// Same distance through the membership-bisection chord solver.
pub fn hilbert_distance_bisection(dom: &ConvexDomain, x: &Point3, y: &Point3) -> Result<f64, HilbertError> {
    let v = y - x;
    if v.norm_squared() == 0.0 {
        return Ok(0.0);
    }
    Ok(distance_from_chord(&crate::domains::chord_by_bisection(dom, x, &v)?))
}

/// Finsler norm `|v|(1/|x−p₋| + 1/|x−p₊|)`; ideal endpoints contribute 0.
pub fn finsler_norm(dom: &ConvexDomain, x: &Point3, v: &Point3) -> Result<f64, HilbertError> {
    if v.norm_squared() == 0.0 {
        if !dom.contains(x) {
            return Err(DomainError::NotInterior([x[0], x[1], x[2]]).into());
        }
        return Ok(0.0);
    }
    Ok(norm_from_chord(&dom.chord(x, v)?))
}

pub(crate) fn norm_from_chord(c: &Chord) -> f64 {
    c.minus.map_or(0.0, |t| 1.0 / -t) + c.plus.map_or(0.0, |t| 1.0 / t)
}
