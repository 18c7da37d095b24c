//! Invariant suite run by `cuspgeom selftest`: quick versions of the structural checks of
//! every module, each reported as a named pass/fail line.

use std::fmt::Display;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cusplie::{alg_matrix, convergence_conjugate, normalize_algebra, LieAlgElem};
use crate::cuspvol::{direction_norms, displacement_profile, tiling_check, CuspFundamentalDomain};
use crate::domains::{ConvexDomain, Point3};
use crate::fig8::{
    limit_cusp_shape, longitude_spectrum, normalized_lattice, relation_residual, strict_convexity_obstruction_exact,
};
use crate::hilbert::{busemann_density, finsler_norm, hilbert_distance, QuadratureSpec};
use crate::projlin::{Mat4, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&mut ChaCha8Rng) -> Result<String, String>;

const CHECKS: [(&str, Check); 12] = [
    ("fig8 relation exact", relation_exact),
    ("fig8 longitude spectrum", longitude_dichotomy),
    ("fig8 limit cusp shape", limit_shape),
    ("hilbert unit-ball distance", ball_distance),
    ("hilbert density at ball center", ball_density),
    ("hilbert distance symmetric and L' invariant", distance_invariance),
    ("cuspvol closed-form norms", closed_form_norms),
    ("domains no complete line", no_complete_line),
    ("cusplie exact normalization round trip", normalization_round_trip),
    ("cusplie convergence to L0", convergence_limit),
    ("cuspvol tiling", tiling),
    ("cuspvol displacement profile", displacement),
];

/// Runs every check with RNG streams derived from `seed`.
pub fn run_selftest(seed: u64) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (passed, detail) = match check(&mut rng) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome { name, passed, detail }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: Display>(e: E) -> String {
    e.to_string()
}

fn random_t(rng: &mut ChaCha8Rng) -> Rational {
    let d = rng.random_range(2..=60);
    Rational::from_ratio(rng.random_range(1..d), d)
}

fn random_dprime_point(rng: &mut ChaCha8Rng) -> Point3 {
    let (x2, x3) = (rng.random_range(0.05..5.0), rng.random_range(-3.0..3.0));
    Point3::new(0.5 * x3 * x3 - f64::ln(x2) + rng.random_range(0.01..20.0), x2, x3)
}

fn relation_exact(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..10 {
        let t = random_t(rng);
        let r = relation_residual(&t).map_err(err)?;
        ensure(r.is_exact_zero(), || format!("nonzero residual at t = {t}"))?;
    }
    Ok("10 rational t".into())
}

fn longitude_dichotomy(rng: &mut ChaCha8Rng) -> Result<String, String> {
    ensure(!strict_convexity_obstruction_exact(&Rational::from_ratio(1, 2)).map_err(err)?, || "t = 1/2 not unipotent".into())?;
    for _ in 0..5 {
        let t = random_t(rng);
        let two_t = Rational::from_int(2) * t.clone();
        let last = Rational::from_int(1) / (Rational::from_int(8) * t.clone() * t.clone() * t.clone());
        let mut want = vec![two_t.clone(), two_t.clone(), two_t, last];
        want.sort();
        ensure(longitude_spectrum(&t).map_err(err)? == want, || format!("spectrum mismatch at t = {t}"))?;
        ensure(strict_convexity_obstruction_exact(&t).map_err(err)? == (t != Rational::from_ratio(1, 2)), || format!("t = {t}"))?;
    }
    Ok("unipotent only at t = 1/2".into())
}

fn limit_shape(_: &mut ChaCha8Rng) -> Result<String, String> {
    let s = limit_cusp_shape().map_err(err)?;
    let want = -2.0 * 3f64.sqrt();
    ensure(s.raw.re.abs() < 1e-12 && (s.raw.im - want).abs() < 1e-12, || format!("shape {}", s.raw))?;
    Ok(format!("{}", s.raw))
}

fn ball_distance(_: &mut ChaCha8Rng) -> Result<String, String> {
    for i in 1..10 {
        let r = i as f64 / 10.0;
        let d = hilbert_distance(&ConvexDomain::UnitBall, &Point3::zeros(), &Point3::new(0.0, r, 0.0)).map_err(err)?;
        ensure((d - 2.0 * r.atanh()).abs() < 1e-9, || format!("r = {r}: {d}"))?;
    }
    Ok("9 radii".into())
}

fn ball_density(_: &mut ChaCha8Rng) -> Result<String, String> {
    let d = busemann_density(&ConvexDomain::UnitBall, &Point3::zeros(), &QuadratureSpec::default()).map_err(err)?;
    ensure((d - 1.0).abs() < 1e-3, || format!("density {d}"))?;
    Ok(format!("{d:.6}"))
}

/// `L′(a, b)` as an affine map of `DPrime`.
fn lprime_act(a: f64, b: f64, x: &Point3) -> Point3 {
    Point3::new(x[0] + b * x[2] + 0.5 * b * b - a, a.exp() * x[1], x[2] + b)
}

fn distance_invariance(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let dom = ConvexDomain::DPrime;
    for _ in 0..50 {
        let (x, y) = (random_dprime_point(rng), random_dprime_point(rng));
        let d = hilbert_distance(&dom, &x, &y).map_err(err)?;
        let back = hilbert_distance(&dom, &y, &x).map_err(err)?;
        let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let moved = hilbert_distance(&dom, &lprime_act(a, b, &x), &lprime_act(a, b, &y)).map_err(err)?;
        ensure((d - back).abs() <= 1e-9 * d.max(1.0), || format!("asymmetric: {d} vs {back}"))?;
        ensure((d - moved).abs() <= 1e-8 * d.max(1.0), || format!("not invariant: {d} vs {moved}"))?;
    }
    Ok("50 pairs".into())
}

fn closed_form_norms(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let dom = ConvexDomain::DPrime;
    for _ in 0..50 {
        let x = random_dprime_point(rng);
        let n = direction_norms(&x).map_err(err)?;
        let axes = [(Point3::new(0.0, 1.0, 0.0), n.e2), (Point3::new(1.0, 0.0, 0.0), n.e1), (Point3::new(0.0, 0.0, 1.0), n.e3)];
        for (v, want) in axes {
            let got = finsler_norm(&dom, &x, &v).map_err(err)?;
            ensure((got - want).abs() <= 1e-9 * want.max(1.0), || format!("{x:?} {v:?}: {got} vs {want}"))?;
        }
    }
    Ok("50 points".into())
}

fn no_complete_line(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..200 {
        let x = random_dprime_point(rng);
        let v = Point3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm() < 1e-6 {
            continue;
        }
        let c = ConvexDomain::DPrime.chord(&x, &v).map_err(err)?;
        ensure(c.minus.is_some() || c.plus.is_some(), || format!("complete line through {x:?} along {v:?}"))?;
    }
    Ok("200 chords".into())
}

fn random_conjugator(rng: &mut ChaCha8Rng) -> Mat4<Rational> {
    loop {
        let g = Mat4::<Rational>::from_fn(|_, _| Rational::from_int(rng.random_range(-3..=3)));
        if g.det() != Rational::from_int(0) {
            return g;
        }
    }
}

fn normalization_round_trip(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let q = |k: i64| Rational::from_int(k);
    for i in 0..10 {
        let minus = i % 2 == 1;
        let make = |a, b| {
            let e = if minus { LieAlgElem::lprime_minus(q(a), q(b)) } else { LieAlgElem::lprime(q(a), q(b)) };
            alg_matrix(&e)
        };
        let g = random_conjugator(rng);
        let gi = g.inverse().map_err(err)?;
        let alpha = &(&g * &make(1, 0).map_err(err)?) * &gi;
        let beta = &(&g * &make(0, 1).map_err(err)?) * &gi;
        let n = normalize_algebra(&alpha, &beta, 0.0).map_err(err)?;
        ensure(n.sign == if minus { -1 } else { 1 } && n.residual == 0.0, || format!("sign {} residual {}", n.sign, n.residual))?;
    }
    Ok("10 conjugates".into())
}

fn convergence_limit(_: &mut ChaCha8Rng) -> Result<String, String> {
    let (a, b) = (|t: f64| [t, 0.0], |t: f64| [0.0, t]);
    let r = convergence_conjugate(&a, &b, 0.25).map_err(err)?;
    ensure((r.limit[0].u, r.limit[0].v, r.limit[1].u, r.limit[1].v) == (1.0, 0.0, 0.0, 1.0), || format!("{:?}", r.limit))?;
    let dep = |t: f64| [2.0 * t, 0.0];
    ensure(convergence_conjugate(&a, &dep, 0.1).is_err(), || "dependent path accepted".into())?;
    Ok("linear paths".into())
}

fn tiling(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let n = normalized_lattice(&Rational::from_ratio(1, 4)).map_err(err)?;
    let [m, l] = &n.generators;
    let fd = CuspFundamentalDomain::from_generators(1.0, m, l, None).map_err(err)?;
    let r = tiling_check(&fd, m, l, 2000, rng.random()).map_err(err)?;
    ensure(r.bad_fraction() < 1e-3, || format!("{r:?}"))?;
    Ok(format!("{} overlaps, {} gaps in {}", r.overlaps, r.gaps, r.samples))
}

fn displacement(_: &mut ChaCha8Rng) -> Result<String, String> {
    let n = normalized_lattice(&Rational::from_ratio(1, 4)).map_err(err)?;
    let p = displacement_profile(16f64.ln(), &n.generators[0], &[1.0, 2.0, 4.0, 8.0, 16.0]).map_err(err)?;
    ensure(p.is_strictly_decreasing(), || format!("{:?}", p.displacement))?;
    let spread = p.spread.iter().cloned().fold(0.0, f64::max);
    ensure(spread < 1e-9, || format!("spread {spread:e}"))?;
    Ok(format!("spread {spread:.1e}"))
}
