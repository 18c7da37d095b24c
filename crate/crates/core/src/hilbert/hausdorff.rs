use rayon::prelude::*;
use serde::Serialize;

use super::{hilbert_distance, HilbertError, Region, ALPHA3};
use crate::domains::{ConvexDomain, Point3};

/// Lattice points per axis used to measure a small Hilbert ball.
const LATTICE: usize = 40;
const MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HausdorffEstimate {
    pub estimate: f64,
    pub epsilon: f64,
    pub cells: usize,
}

/// Covering estimate of the 3-dimensional Hausdorff measure of a box.
///
/// The box is bisected until every cell has Hilbert diameter below `ε`. Each cell is then
/// covered by Hilbert balls of radius `ε/2`; their number is the cell's Lebesgue volume
/// over the ball's Lebesgue volume (found by lattice counting with the distance function
/// alone), and each ball is charged `α₃(ε/2)³`, the normalization that matches the
/// Busemann density.
pub fn hausdorff_oracle(region: &Region, eps: f64) -> Result<HausdorffEstimate, HilbertError> {
    let (Some(lo1), Some(hi1), None) = (region.x1_min, region.x1_max, region.floor) else {
        return Err(HilbertError::InvalidSpec("the Hausdorff oracle takes axis-parallel boxes only".into()));
    };
    if !(eps > 0.0 && eps < 1.0) {
        return Err(HilbertError::InvalidSpec(format!("ε = {eps} must lie in (0, 1)")));
    }
    let lo = Point3::new(lo1, region.x2.0, region.x3.0);
    let hi = Point3::new(hi1, region.x2.1, region.x3.1);
    let ext = hi - lo;
    if ext.iter().any(|e| !(e.is_finite()) || *e < 0.0) {
        return Err(HilbertError::InvalidSpec("box corners out of order".into()));
    }
    if ext.iter().any(|e| *e == 0.0) {
        return Ok(HausdorffEstimate { estimate: 0.0, epsilon: eps, cells: 0 });
    }
    let dom = &region.domain;
    for c in corners(&lo, &hi) {
        if !dom.contains(&c) {
            return Err(HilbertError::RegionOutsideDomain([c[0], c[1], c[2]]));
        }
    }
    let diam = cell_diameter(dom, &lo, &hi)?;
    if diam >= 1.0 {
        return Err(HilbertError::RegionTooLarge(diam));
    }
    let mut cells = vec![(lo, hi)];
    for depth in 0.. {
        let diams = cells.par_iter().map(|(a, b)| cell_diameter(dom, a, b)).collect::<Result<Vec<_>, _>>()?;
        if diams.iter().all(|d| *d < eps) {
            break;
        }
        if depth == MAX_DEPTH {
            return Err(HilbertError::NonConvergence { fine: eps, coarse: diams.iter().cloned().fold(0.0, f64::max) });
        }
        cells = cells.iter().zip(&diams).flat_map(|(c, &d)| if d < eps { vec![*c] } else { split(c) }).collect();
    }
    let charges = cells
        .par_iter()
        .map(|(a, b)| {
            let centre = (a + b) * 0.5;
            let vol = (b - a).product();
            let ball = ball_volume(dom, &centre, 0.5 * eps)?;
            Ok(ALPHA3 * (0.5 * eps).powi(3) * vol / ball)
        })
        .collect::<Result<Vec<f64>, HilbertError>>()?;
    Ok(HausdorffEstimate { estimate: charges.iter().sum(), epsilon: eps, cells: cells.len() })
}

fn corners(a: &Point3, b: &Point3) -> Vec<Point3> {
    (0..8)
        .map(|m| {
            Point3::new(
                if m & 1 == 0 { a[0] } else { b[0] },
                if m & 2 == 0 { a[1] } else { b[1] },
                if m & 4 == 0 { a[2] } else { b[2] },
            )
        })
        .collect()
}

/// Hilbert diameter of a box: balls are convex, so the maximum is attained at corners.
fn cell_diameter(dom: &ConvexDomain, a: &Point3, b: &Point3) -> Result<f64, HilbertError> {
    let cs = corners(a, b);
    let mut d: f64 = 0.0;
    for i in 0..8 {
        for j in i + 1..8 {
            d = d.max(hilbert_distance(dom, &cs[i], &cs[j])?);
        }
    }
    Ok(d)
}

fn split((a, b): &(Point3, Point3)) -> Vec<(Point3, Point3)> {
    let m = (a + b) * 0.5;
    corners(&Point3::zeros(), &Point3::new(1.0, 1.0, 1.0))
        .into_iter()
        .map(|s| {
            let pick = |k: usize| {
                if s[k] == 0.0 {
                    (a[k], m[k])
                } else {
                    (m[k], b[k])
                }
            };
            let (x, y, z) = (pick(0), pick(1), pick(2));
            (Point3::new(x.0, y.0, z.0), Point3::new(x.1, y.1, z.1))
        })
        .collect()
}

/// Parameter `τ > 0` with `d(x, x + τu) = r`, by bisection on the distance itself.
fn radial_extent(dom: &ConvexDomain, x: &Point3, u: &Point3, r: f64) -> Result<f64, HilbertError> {
    let mut hi = 1e-3;
    while {
        let y = x + u * hi;
        dom.contains(&y) && hilbert_distance(dom, x, &y)? < r
    } {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(HilbertError::NonConvergence { fine: hi, coarse: r });
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let y = x + u * mid;
        if dom.contains(&y) && hilbert_distance(dom, x, &y)? < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lebesgue volume of the Hilbert ball `B_x(r)` by midpoint lattice counting in a
/// bounding box built from the radial extents along the 26 grid directions.
fn ball_volume(dom: &ConvexDomain, x: &Point3, r: f64) -> Result<f64, HilbertError> {
    let mut half = Point3::zeros();
    for i in 0..27 {
        let u = Point3::new((i % 3) as f64 - 1.0, ((i / 3) % 3) as f64 - 1.0, (i / 9) as f64 - 1.0);
        if u == Point3::zeros() {
            continue;
        }
        let p = u * radial_extent(dom, x, &u, r)?;
        for k in 0..3 {
            half[k] = half[k].max(p[k].abs());
        }
    }
    // A convex body through these points may bulge between them; pad the box.
    let half = half * 1.5;
    let step = half * (2.0 / LATTICE as f64);
    let mut count = 0usize;
    for i in 0..LATTICE {
        for j in 0..LATTICE {
            for k in 0..LATTICE {
                let y =
                    x - half + Point3::new((i as f64 + 0.5) * step[0], (j as f64 + 0.5) * step[1], (k as f64 + 0.5) * step[2]);
                if dom.contains(&y) && hilbert_distance(dom, x, &y)? < r {
                    count += 1;
                }
            }
        }
    }
    Ok(count as f64 * step.product())
}
