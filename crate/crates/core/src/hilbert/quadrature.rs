use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen};

use super::{norm_from_chord, HilbertError, QuadratureSpec};
use crate::domains::{ConvexDomain, DomainError, Point3};

/// Lebesgue volume of the Euclidean ball of diameter 1 in ℝ³.
pub const ALPHA3: f64 = PI / 6.0;

/// Relative accuracy aimed for by [`unit_ball_lebesgue`] at the default node count.
const TARGET: f64 = 1e-3;
/// Refinement disagreement above which the volume is rejected.
const REJECT: f64 = 10.0 * TARGET;
const PRECONDITION_ROUNDS: usize = 4;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(n, z).1;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Product rule on S²: Gauss–Legendre in cos θ times the uniform rule in φ.
///
/// Only one node of each antipodal pair is stored (with doubled weight); every
/// integrand used here is even.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub nodes: Vec<Point3>,
    pub weights: Vec<f64>,
    pub full_size: usize,
}

impl SphereRule {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self, HilbertError> {
        if n_theta < 2 || n_phi < 4 || n_phi % 2 != 0 {
            return Err(HilbertError::InvalidSpec(format!("bad sphere rule {n_theta}×{n_phi}")));
        }
        let (zs, ws) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (&z, &wz) in zs.iter().zip(&ws) {
            let s = (1.0 - z * z).max(0.0).sqrt();
            for j in 0..n_phi {
                let keep = if z.abs() > 1e-15 { z > 0.0 } else { j < n_phi / 2 };
                if keep {
                    let phi = (j as f64 + 0.5) * dphi;
                    nodes.push(Point3::new(s * phi.cos(), s * phi.sin(), z));
                    weights.push(2.0 * wz * dphi);
                }
            }
        }
        Ok(SphereRule { nodes, weights, full_size: n_theta * n_phi })
    }

    pub fn from_spec(q: &QuadratureSpec) -> Result<Self, HilbertError> {
        SphereRule::new(q.sphere_theta, q.sphere_phi)
    }

    /// Coarser companion rule used for the refinement check.
    fn coarse(q: &QuadratureSpec) -> Result<Self, HilbertError> {
        let nt = (q.sphere_theta / 2).max(2);
        let np = ((q.sphere_phi / 2).max(4) + 1) & !1;
        SphereRule::new(nt, np)
    }
}

/// Radial function and moments of the norm ball `{w : ‖P w‖ ≤ 1}` on a rule.
struct Moments {
    volume: f64,
    second: Matrix3<f64>,
}

fn moments(dom: &ConvexDomain, x: &Point3, p: &Matrix3<f64>, rule: &SphereRule) -> Result<Moments, HilbertError> {
    let mut vol = 0.0;
    let mut second = Matrix3::zeros();
    for (u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = p * u;
        let n = norm_from_chord(&dom.chord(x, &v)?);
        if !(n > 0.0) || !n.is_finite() {
            return Err(HilbertError::DegenerateNorm([v[0], v[1], v[2]]));
        }
        let r = 1.0 / n;
        let r3 = r * r * r;
        vol += w * r3 / 3.0;
        second += u * u.transpose() * (w * r3 * r * r / 5.0);
    }
    Ok(Moments { volume: vol * p.determinant().abs(), second })
}

/// Preconditioner: axis rescaling followed by a few rounds of second-moment whitening.
fn precondition(dom: &ConvexDomain, x: &Point3, rule: &SphereRule) -> Result<Matrix3<f64>, HilbertError> {
    let mut p = Matrix3::zeros();
    for i in 0..3 {
        let mut e = Point3::zeros();
        e[i] = 1.0;
        let n = norm_from_chord(&dom.chord(x, &e)?);
        if !(n > 0.0) || !n.is_finite() {
            return Err(HilbertError::DegenerateNorm([e[0], e[1], e[2]]));
        }
        p[(i, i)] = 1.0 / n;
    }
    for _ in 0..PRECONDITION_ROUNDS {
        let m = moments(dom, x, &p, rule)?;
        let eig = SymmetricEigen::new(m.second);
        let (lo, hi) = eig.eigenvalues.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &l| (a.min(l), b.max(l)));
        if !(lo > 0.0) {
            return Err(HilbertError::NonConvergence { fine: m.volume, coarse: f64::NAN });
        }
        let mut d = Matrix3::zeros();
        for i in 0..3 {
            d[(i, i)] = (eig.eigenvalues[i] / hi).sqrt();
        }
        let root = eig.eigenvectors * d * eig.eigenvectors.transpose();
        p *= root;
        if hi / lo < 1.1 {
            break;
        }
    }
    Ok(p)
}

/// Lebesgue volume of the Finsler unit ball at `x`.
pub fn unit_ball_lebesgue(dom: &ConvexDomain, x: &Point3, q: &QuadratureSpec) -> Result<f64, HilbertError> {
    q.validate()?;
    if !dom.contains(x) {
        return Err(DomainError::NotInterior([x[0], x[1], x[2]]).into());
    }
    let coarse_rule = SphereRule::coarse(q)?;
    let p = precondition(dom, x, &coarse_rule)?;
    let fine = moments(dom, x, &p, &SphereRule::from_spec(q)?)?.volume;
    let coarse = moments(dom, x, &p, &coarse_rule)?.volume;
    if !((fine - coarse).abs() <= REJECT * fine.abs()) {
        return Err(HilbertError::NonConvergence { fine, coarse });
    }
    Ok(fine)
}

/// Busemann density `α₃ / μ_L(B_x(1))`.
pub fn busemann_density(dom: &ConvexDomain, x: &Point3, q: &QuadratureSpec) -> Result<f64, HilbertError> {
    Ok(ALPHA3 / unit_ball_lebesgue(dom, x, q)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in 0..14 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            assert!((got - exact).abs() < 1e-13, "degree {k}");
        }
        let (x, _) = gauss_legendre(34);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn sphere_rule_area_and_moments() {
        let r = SphereRule::new(34, 68).unwrap();
        assert_eq!(r.full_size, 2312);
        assert_eq!(r.nodes.len(), 1156);
        let area: f64 = r.weights.iter().sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let zz: f64 = r.nodes.iter().zip(&r.weights).map(|(u, w)| w * u[2] * u[2]).sum();
        assert!((zz - 4.0 * PI / 3.0).abs() < 1e-12);
        let odd = SphereRule::new(5, 8).unwrap();
        assert!((odd.weights.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn ball_center_volume() {
        let q = QuadratureSpec::default();
        let v = unit_ball_lebesgue(&ConvexDomain::UnitBall, &Point3::zeros(), &q).unwrap();
        assert!((v - PI / 6.0).abs() < 1e-10);
        let d = busemann_density(&ConvexDomain::UnitBall, &Point3::zeros(), &q).unwrap();
        assert!((d - 1.0).abs() < 1e-3);
    }

    #[test]
    fn ball_offcenter_is_ellipsoid() {
        // At distance r from the center the unit ball is an ellipsoid with semi-axes
        // (1−r²)/2 radially and √(1−r²)/2 tangentially.
        let q = QuadratureSpec::default();
        for r in [0.3, 0.7, 0.95] {
            let v = unit_ball_lebesgue(&ConvexDomain::UnitBall, &Point3::new(r, 0.0, 0.0), &q).unwrap();
            let s = 1.0 - r * r;
            let exact = 4.0 / 3.0 * PI * (s / 2.0) * (s.sqrt() / 2.0).powi(2);
            assert!((v / exact - 1.0).abs() < 1e-9, "r={r}: {v} vs {exact}");
        }
    }

    #[test]
    fn dprime_default_rule_matches_high_order() {
        let mut hi = QuadratureSpec::default();
        hi.sphere_theta = 96;
        hi.sphere_phi = 192;
        let q = QuadratureSpec::default();
        for x in [Point3::new(2.0, 1.0, 0.0), Point3::new(50.0, 3.0, -2.0), Point3::new(1e4, 1.0, 0.0)] {
            let a = unit_ball_lebesgue(&ConvexDomain::DPrime, &x, &q).unwrap();
            let b = unit_ball_lebesgue(&ConvexDomain::DPrime, &x, &hi).unwrap();
            assert!((a / b - 1.0).abs() < 1e-3, "{x:?}: {a} vs {b}");
        }
    }
}
