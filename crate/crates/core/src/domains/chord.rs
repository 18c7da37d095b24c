use super::{ConvexDomain, DomainError, Point3, BISECTION_TOL, BRACKET_LIMIT};

/// Parameters τ₋ < 0 < τ₊ where the line `x + τv` meets the boundary; `None` = ideal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chord {
    pub minus: Option<f64>,
    pub plus: Option<f64>,
}

fn check(dom: &ConvexDomain, x: &Point3, v: &Point3) -> Result<(), DomainError> {
    if v.norm_squared() == 0.0 {
        return Err(DomainError::ZeroDirection);
    }
    if !dom.contains(x) {
        return Err(DomainError::NotInterior([x[0], x[1], x[2]]));
    }
    Ok(())
}

/// Roots of `a τ² + b τ + c` with `c > 0` (interior), returned as (negative, positive).
fn quadratic_chord(a: f64, b: f64, c: f64) -> Chord {
    if a == 0.0 {
        if b == 0.0 {
            return Chord { minus: None, plus: None };
        }
        let r = -c / b;
        return if r > 0.0 { Chord { minus: None, plus: Some(r) } } else { Chord { minus: Some(r), plus: None } };
    }
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * disc);
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    Chord { minus: Some(lo), plus: Some(hi) }
}

/// Exit parameter τ > 0 of the ray `x + τv` from `DPrime`, or `None` if the ray stays inside.
///
/// `g(τ) = x₁ + τv₁ − (x₃+τv₃)²/2 + log(x₂+τv₂)` is concave, positive at 0, so it has at
/// most one positive root; Newton steps taken from the right of the root are monotone.
fn dprime_exit(x: &Point3, v: &Point3) -> Option<f64> {
    let g = |t: f64| {
        let w = x[1] + t * v[1];
        if w <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let z = x[2] + t * v[2];
        x[0] + t * v[0] - 0.5 * z * z + w.ln()
    };
    let dg = |t: f64| v[0] - (x[2] + t * v[2]) * v[2] + v[1] / (x[1] + t * v[1]);
    let exits = v[1] < 0.0 || v[2] != 0.0 || v[0] < 0.0;
    if !exits {
        return None;
    }
    let mut lo = 0.0;
    let mut hi = if v[1] < 0.0 { -x[1] / v[1] } else { f64::INFINITY };
    if hi.is_infinite() {
        let mut s = 1.0;
        loop {
            if g(s) < 0.0 {
                hi = s;
                break;
            }
            lo = s;
            s *= 2.0;
            if s > 1e300 {
                return None;
            }
        }
    }
    let mut p = hi;
    let mut gp = g(p);
    for _ in 0..400 {
        let mut c = 0.5 * (lo + hi);
        if gp.is_finite() {
            let d = dg(p);
            if d < 0.0 {
                let step = gp / d;
                if step.abs() <= 2.0 * f64::EPSILON * p {
                    return Some(p);
                }
                let q = p - step;
                if q > lo && q < hi {
                    c = q;
                }
            }
        }
        if c <= lo || c >= hi {
            break;
        }
        let gc = g(c);
        if gc > 0.0 {
            lo = c;
        } else if gc < 0.0 {
            hi = c;
            p = c;
            gp = gc;
        } else {
            return Some(c);
        }
    }
    Some(if gp.is_finite() { p } else { 0.5 * (lo + hi) })
}

fn dprime_chord(x: &Point3, v: &Point3) -> Chord {
    Chord { minus: dprime_exit(x, &-v).map(|t| -t), plus: dprime_exit(x, v) }
}

pub(super) fn analytic_chord(dom: &ConvexDomain, x: &Point3, v: &Point3) -> Result<Chord, DomainError> {
    check(dom, x, v)?;
    Ok(chord_unchecked(dom, x, v))
}

fn chord_unchecked(dom: &ConvexDomain, x: &Point3, v: &Point3) -> Chord {
    match dom {
        ConvexDomain::D0 => {
            let a = -0.5 * (v[1] * v[1] + v[2] * v[2]);
            let b = v[0] - (x[1] * v[1] + x[2] * v[2]);
            let c = x[0] - 0.5 * (x[1] * x[1] + x[2] * x[2]);
            quadratic_chord(a, b, c)
        }
        ConvexDomain::UnitBall => {
            let a = -v.norm_squared();
            let b = -2.0 * x.dot(v);
            let c = 1.0 - x.norm_squared();
            quadratic_chord(a, b, c)
        }
        ConvexDomain::DPrime => dprime_chord(x, v),
        ConvexDomain::Dt(chart) => dprime_chord(&chart.pullback(x), &chart.pullback_dir(v)),
        ConvexDomain::Shifted { base, level } => chord_unchecked(base, &(x - Point3::new(*level, 0.0, 0.0)), v),
    }
}

/// Chord parameters by geometric bracket growth (step 1 doubling up to 1e9) and
/// bisection to 1e−12 on the membership predicate only.
pub fn chord_by_bisection(dom: &ConvexDomain, x: &Point3, v: &Point3) -> Result<Chord, DomainError> {
    check(dom, x, v)?;
    let n = v.norm();
    let u = v / n;
    let side = |sign: f64| -> Result<Option<f64>, DomainError> {
        let at = |t: f64| dom.contains(&(x + u * (sign * t)));
        let mut inside = 0.0;
        let mut step = 1.0;
        while at(step) {
            inside = step;
            step *= 2.0;
            if step > BRACKET_LIMIT {
                return Ok(None);
            }
        }
        let (mut lo, mut hi) = (inside, step);
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if at(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        if !t.is_finite() {
            return Err(DomainError::UnboundedSearch([u[0], u[1], u[2]]));
        }
        Ok(Some(sign * t / n))
    };
    Ok(Chord { minus: side(-1.0)?, plus: side(1.0)? })
}
