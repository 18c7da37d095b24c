//! Acceptance suite: one PASS/FAIL line per criterion, with the runtime budget of each.
//! Exits with status 1 if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cuspgeom::cusplie::{
    alg_matrix, convergence_conjugate, cusp_shape_params, fit_params, group_exp, l0_params, normalize_algebra, LieAlgElem,
};
use cuspgeom::cuspvol::{cusp_volume_table, displacement_profile, log_log_slope, lower_bound_check, CuspFundamentalDomain};
use cuspgeom::domains::{f_prime, ConvexDomain, Point3};
use cuspgeom::fig8::{
    generators, limit_pair, longitude, normalization_consistency, normalized_lattice, normalized_peripheral, relation_word,
    s_of_t,
};
use cuspgeom::hilbert::{busemann_density, finsler_norm, hilbert_distance, QuadratureSpec};
use cuspgeom::projlin::{
    characteristic_polynomial, is_projectively_unipotent, real_spectrum, Mat4, Polynomial, ProjPoint, Rational, Scalar,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn q(p: i64, d: i64) -> Rational {
    <Rational as Scalar>::from_ratio(p, d)
}

fn int(k: i64) -> Rational {
    <Rational as Scalar>::from_int(k)
}

fn random_t(rng: &mut ChaCha8Rng) -> Rational {
    let d = rng.random_range(2..=1000);
    q(rng.random_range(1..d), d)
}

/// 1. `M W = λ W N` with exactly zero residual for 20 random rational `t ∈ (0, 1)`.
fn exact_relation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..20 {
        let t = random_t(&mut rng);
        let (m, n) = generators(&t).map_err(err)?;
        let w = relation_word(&m, &n).map_err(err)?;
        let (lhs, rhs) = (&m * &w, &w * &n);
        // λ from the first nonzero entry, then an exact entrywise comparison.
        let (i, j) = rhs.argmax_abs();
        let lambda = lhs[(i, j)].clone() / rhs[(i, j)].clone();
        let residual = &lhs - &rhs.scale(&lambda);
        ensure(residual == Mat4::zero(), || format!("nonzero residual at t = {t}"))?;
        ensure(lambda == int(1), || format!("λ = {lambda} at t = {t}"))?;
    }
    Ok("20 random t, residual exactly 0, λ = 1".into())
}

/// 2. Longitude projectively unipotent exactly at `t = 1/2`; spectrum `{2t, 2t, 2t, 1/(8t³)}`.
fn unipotency_dichotomy() -> Outcome {
    let half = longitude(&q(1, 2)).map_err(err)?;
    ensure(is_projectively_unipotent(&half).map_err(err)?, || "not unipotent at t = 1/2".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut ts: Vec<Rational> = Vec::new();
    while ts.len() < 10 {
        let t = random_t(&mut rng);
        if t != q(1, 2) {
            ts.push(t);
        }
    }
    for t in &ts {
        let l = longitude(t).map_err(err)?;
        ensure(!is_projectively_unipotent(&l).map_err(err)?, || format!("unipotent at t = {t}"))?;
        let two_t = int(2) * t.clone();
        let other = int(1) / (int(8) * t.clone() * t.clone() * t.clone());
        let want = Polynomial::linear_root(two_t.clone()).pow(3).mul(&Polynomial::linear_root(other.clone()));
        ensure(characteristic_polynomial(&l) == want, || format!("characteristic polynomial at t = {t}"))?;
        let spec = real_spectrum(&l).map_err(err)?;
        let mut vals: Vec<(Rational, usize)> =
            spec.iter().map(|e| (e.exact.clone().unwrap_or(int(-1)), e.multiplicity)).collect();
        vals.sort();
        let mut want = vec![(two_t.clone(), 3), (other.clone(), 1)];
        want.sort();
        ensure(vals == want, || format!("spectrum at t = {t}: {vals:?}"))?;
        // Scaled by 1/(2t): {1, 1, 1, 1/(16t⁴)} with log(1/(16t⁴)) = s.
        let ratio = other / two_t;
        ensure(ratio == int(1) / (int(16) * t.clone().pow(4)), || format!("eigenvalue ratio at t = {t}"))?;
        let s = s_of_t(t.to_float()).map_err(err)?;
        ensure((ratio.to_float().ln() - s).abs() <= 1e-12 * s.abs().max(1.0), || format!("s mismatch at t = {t}"))?;
    }
    Ok("unipotent at 1/2 only; 10 exact spectra".into())
}

/// 3. Cusp shape of the limit matrices is `−2√3 i`, also in the form `−i ν₀/μ₀`.
fn cusp_shape() -> Outcome {
    let lim = limit_pair();
    let m = l0_params(&lim.meridian).map_err(err)?;
    let l = l0_params(&lim.longitude).map_err(err)?;
    let shape = cusp_shape_params(m, l).map_err(err)?;
    let want = Complex64::new(0.0, -2.0 * 3f64.sqrt());
    ensure((shape.raw - want).norm() < 1e-12, || format!("shape {}", shape.raw))?;
    let (mu0, nu0) = (m.1.abs(), l.0);
    let alt = Complex64::new(0.0, -nu0 / mu0);
    ensure((alt - want).norm() < 1e-12, || format!("−iν₀/μ₀ = {alt}"))?;
    Ok(format!("{} (μ₀ = {mu0:.12}, ν₀ = {nu0})", shape.raw))
}

/// 4. Unit-ball distance is `2 artanh r`; Busemann density at the center is 1.
fn metric_oracle() -> Outcome {
    let dir = Point3::new(0.48, -0.6, 0.64);
    for i in 1..10 {
        let r = i as f64 / 10.0;
        let d = hilbert_distance(&ConvexDomain::UnitBall, &Point3::zeros(), &(dir * r)).map_err(err)?;
        ensure((d - 2.0 * r.atanh()).abs() < 1e-9, || format!("r = {r}: {d}"))?;
    }
    let rho = busemann_density(&ConvexDomain::UnitBall, &Point3::zeros(), &QuadratureSpec::default()).map_err(err)?;
    ensure((rho - 1.0).abs() <= 1e-3, || format!("density {rho}"))?;
    Ok(format!("9 radii; density {rho:.8}"))
}

/// 5. Closed-form norms on a 10×10×10 grid of 𝓓_k; the Finsler norm is the derivative of
/// the distance on 100 random `(x, v)`.
fn closed_form_norms() -> Outcome {
    let fd = CuspFundamentalDomain::fig8(16f64.ln(), 1.0, None).map_err(err)?;
    let ((a2, b2), (a3, b3)) = fd.rectangle();
    let dom = ConvexDomain::DPrime;
    let lerp = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / 9.0;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            for h in 0..10 {
                let (x2, x3) = (lerp(a2, b2, i), lerp(a3, b3, j));
                let x1 = f_prime(x2, x3) + fd.k + 10f64.powf(-2.0 + 6.0 * h as f64 / 9.0);
                let x = Point3::new(x1, x2, x3);
                let k1 = (0.5 * x3 * x3 - x1).exp();
                let k2 = 0.5 * x3 * x3 - x2.ln();
                let k3 = (2.0 * (x1 + x2.ln())).sqrt();
                let axes = [
                    (Point3::new(0.0, 1.0, 0.0), 1.0 / (x2 - k1)),
                    (Point3::new(1.0, 0.0, 0.0), 1.0 / (x1 - k2)),
                    (Point3::new(0.0, 0.0, 1.0), 2.0 * k3 / (k3 * k3 - x3 * x3)),
                ];
                for (v, want) in axes {
                    let got = finsler_norm(&dom, &x, &v).map_err(err)?;
                    let rel = (got - want).abs() / want;
                    worst = worst.max(rel);
                    ensure(rel < 1e-9, || format!("{x:?} along {v:?}: {got} vs {want}"))?;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst_fd: f64 = 0.0;
    for _ in 0..100 {
        let (x2, x3) = (rng.random_range(0.05..5.0), rng.random_range(-3.0..3.0));
        let x = Point3::new(f_prime(x2, x3) + rng.random_range(0.05..20.0), x2, x3);
        let v = Point3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm() < 1e-3 {
            continue;
        }
        let c = dom.chord(&x, &v).map_err(err)?;
        // Distance is additive along the chord, so t ↦ d(x − δv, x + tv) is smooth at 0.
        let delta = c.minus.map_or(1.0, |m| 0.5 * -m);
        let back = x - v * delta;
        let h = 1e-5 * c.plus.map_or(1.0, |t| t.min(1.0)).min(delta);
        let g = |t: f64| hilbert_distance(&dom, &back, &(x + v * t));
        let fdiff = (g(h).map_err(err)? - g(-h).map_err(err)?) / (2.0 * h);
        let n = finsler_norm(&dom, &x, &v).map_err(err)?;
        let rel = (fdiff - n).abs() / n;
        worst_fd = worst_fd.max(rel);
        ensure(rel <= 1e-6, || format!("{x:?} {v:?}: difference quotient {fdiff} vs norm {n}"))?;
    }
    Ok(format!("grid max rel error {worst:.1e}; difference quotient max rel error {worst_fd:.1e}"))
}

/// 6. Truncated volumes at {10, 20, 40, 80} increase with increment ratios in [0.5, 0.9];
/// the simplex bound holds at x₁ ∈ {10², 10³, 10⁴} with growth exponent ≥ 1.4.
fn volume_finiteness() -> Outcome {
    let fd = CuspFundamentalDomain::fig8(16f64.ln(), 1.0, None).map_err(err)?;
    let qs = QuadratureSpec::default();
    let table = cusp_volume_table(&fd, &[10.0, 20.0, 40.0, 80.0], &qs).map_err(err)?;
    ensure(table.rows.windows(2).all(|w| w[1].estimate > w[0].estimate), || format!("not increasing: {:?}", table.rows))?;
    let ratios: Vec<f64> = table.rows.iter().filter_map(|r| r.increment_ratio).collect();
    ensure(ratios.len() == 2 && ratios.iter().all(|r| (0.5..=0.9).contains(r)), || format!("increment ratios {ratios:?}"))?;
    let mut pts = Vec::new();
    for x1 in [1e2, 1e3, 1e4] {
        let lb = lower_bound_check(&fd, &Point3::new(x1, 1.0, 0.0), &qs).map_err(err)?;
        ensure(lb.margin > 0.0, || format!("{lb:?}"))?;
        pts.push((x1, lb.volume));
    }
    let slope = log_log_slope(&pts);
    ensure(slope >= 1.4, || format!("growth exponent {slope}"))?;
    let vols: Vec<String> = table.rows.iter().map(|r| format!("{:.5}", r.estimate)).collect();
    Ok(format!("volumes [{}], increment ratios {ratios:.3?}, exponent {slope:.4}", vols.join(", ")))
}

fn random_conjugator(rng: &mut ChaCha8Rng) -> Mat4<Rational> {
    loop {
        let g = Mat4::<Rational>::from_fn(|_, _| int(rng.random_range(-3..=3)));
        if g.det() != int(0) {
            return g;
        }
    }
}

/// 7. Exact normalization round trips for 𝔏′ and 𝔏′₋; the figure-eight pipeline lands in 𝔏′
/// with dilation parameter `log(1/(16t⁴))`.
fn normalization_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for minus in [false, true] {
        for _ in 0..50 {
            let (a, b) = (int(rng.random_range(1..=4)), int(rng.random_range(1..=4)));
            let make = |u: Rational, v: Rational| {
                alg_matrix(&if minus { LieAlgElem::lprime_minus(u, v) } else { LieAlgElem::lprime(u, v) })
            };
            let g = random_conjugator(&mut rng);
            let gi = g.inverse().map_err(err)?;
            let alpha = &(&g * &make(a.clone(), int(0)).map_err(err)?) * &gi;
            let beta = &(&g * &make(int(0), b.clone()).map_err(err)?) * &gi;
            let n = normalize_algebra(&alpha, &beta, 0.0).map_err(err)?;
            ensure(n.sign == if minus { -1 } else { 1 }, || format!("sign {} for minus = {minus}", n.sign))?;
            ensure(n.residual == 0.0, || format!("residual {}", n.residual))?;
            let c = &n.conjugator;
            let ci = c.inverse().map_err(err)?;
            for (x, img) in [(&alpha, &n.images[0]), (&beta, &n.images[1])] {
                ensure(&(&(c * x) * &ci) == img, || "conjugator does not reproduce the images".into())?;
                let (_, _, r) = fit_params(&n.family(), img).map_err(err)?;
                ensure(r == 0.0, || format!("image off the family by {r}"))?;
            }
        }
    }
    let mut detail = String::from("100 exact round trips");
    for t in [q(1, 4), q(2, 5)] {
        let r = normalization_consistency(&t).map_err(err)?;
        ensure(r.sign == Some(1), || format!("sign {:?} at t = {t}", r.sign))?;
        let tf = t.to_float();
        let want = (1.0 / (16.0 * tf.powi(4))).ln();
        let a = r.longitude_params.ok_or("no longitude parameters")?.0;
        ensure((a - want).abs() < 1e-10, || format!("dilation {a} vs {want} at t = {t}"))?;
        detail.push_str(&format!("; t = {t}: a = {a:.12}"));
    }
    Ok(detail)
}

/// 8. `‖M′_s − M₀‖∞ ≤ C|s|` for s ∈ {1e−1, …, 1e−4}; exact 𝔏₀ limits on linear paths.
fn convergence() -> Outcome {
    let lim = limit_pair();
    let dist = |s: f64| -> Result<f64, String> {
        let p = normalized_peripheral(s).map_err(err)?;
        Ok(p.meridian.max_diff(&lim.meridian).max(p.longitude.max_diff(&lim.longitude)))
    };
    let c = 1.05 * dist(0.1)? / 0.1;
    for s in [1e-1, 1e-2, 1e-3, 1e-4] {
        let d = dist(s)?;
        ensure(d <= c * s, || format!("s = {s}: {d} > {c}·s"))?;
    }
    let paths: [(fn(f64) -> [f64; 2], fn(f64) -> [f64; 2], [f64; 4]); 2] =
        [(|t| [t, 0.0], |t| [0.0, t], [1.0, 0.0, 0.0, 1.0]), (|t| [2.0 * t, -t], |t| [t, 3.0 * t], [2.0, -1.0, 1.0, 3.0])];
    for (a, b, want) in paths {
        let r = convergence_conjugate(&a, &b, 0.25).map_err(err)?;
        let got = [r.limit[0].u, r.limit[0].v, r.limit[1].u, r.limit[1].v];
        ensure(got == want, || format!("limit parameters {got:?} vs {want:?}"))?;
        for (k, (u, v)) in [(want[0], want[1]), (want[2], want[3])].into_iter().enumerate() {
            let g = group_exp(&LieAlgElem::l0(u, v)).map_err(err)?;
            ensure(r.limit_generators[k].max_diff(g.matrix()) == 0.0, || format!("limit generator {k}"))?;
        }
    }
    let (a, dep): (fn(f64) -> [f64; 2], fn(f64) -> [f64; 2]) = (|t| [t, 0.0], |t| [2.0 * t, 0.0]);
    ensure(convergence_conjugate(&a, &dep, 0.1).is_err(), || "dependent-derivative path accepted".into())?;
    Ok(format!("C = {c:.4}; two linear paths exact; dependent path rejected"))
}

/// 9. Displacement profile over levels {1, 2, 4, 8, 16}: strictly decreasing, constant along
/// each horosphere to 1e−9, top level below 1% of bottom level.
fn horoball_displacement() -> Outcome {
    let n = normalized_lattice(&q(1, 4)).map_err(err)?;
    let p = displacement_profile(16f64.ln(), &n.generators[0], &[1.0, 2.0, 4.0, 8.0, 16.0]).map_err(err)?;
    ensure(p.is_strictly_decreasing(), || format!("not decreasing: {:?}", p.displacement))?;
    let spread = p.spread.iter().cloned().fold(0.0, f64::max);
    ensure(spread <= 1e-9, || format!("horosphere spread {spread:e}"))?;
    let (top, bottom) = (p.displacement[4], p.displacement[0]);
    ensure(top < 0.01 * bottom, || {
        format!("top/bottom = {top:.6}/{bottom:.6} = {:.4} is not below 0.01 (decreasing, spread {spread:.1e})", top / bottom)
    })?;
    Ok(format!("ratio {:.4}", top / bottom))
}

/// 10. Convexity of F, no complete affine line, and the boundary segment of points `[c:1:0:0]`.
fn domain_facts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    for _ in 0..10_000 {
        let (u, w) = (
            (rng.random_range(0.01..10.0), rng.random_range(-5.0..5.0)),
            (rng.random_range(0.01..10.0), rng.random_range(-5.0..5.0)),
        );
        let lam: f64 = rng.random();
        let mid = f_prime(lam * u.0 + (1.0 - lam) * w.0, lam * u.1 + (1.0 - lam) * w.1);
        let chord = lam * f_prime(u.0, u.1) + (1.0 - lam) * f_prime(w.0, w.1);
        ensure(mid <= chord + 1e-12 * (1.0 + chord.abs()), || format!("convexity fails between {u:?} and {w:?}"))?;
    }
    let dom = ConvexDomain::DPrime;
    for _ in 0..1000 {
        let (x2, x3) = (rng.random_range(0.05..5.0), rng.random_range(-3.0..3.0));
        let x = Point3::new(f_prime(x2, x3) + rng.random_range(0.01..20.0), x2, x3);
        let v = Point3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let c = dom.chord(&x, &v).map_err(err)?;
        ensure(c.minus.is_some() || c.plus.is_some(), || format!("complete line through {x:?} along {v:?}"))?;
    }
    for c in [0.5, 1.0, 2.0] {
        for u in [1.0, 1e3, 1e6, 1e9] {
            ensure(dom.contains(&Point3::new(c * u, u, 0.0)), || format!("({}, {u}, 0) not in the domain", c * u))?;
        }
        let far = ProjPoint::new([c * 1e12, 1e12, 0.0, 1.0]).map_err(err)?;
        let lim = ProjPoint::new([c, 1.0, 0.0, 0.0]).map_err(err)?;
        ensure(far.same_point(&lim, 1e-11), || format!("[c:1:0:0] is not the limit for c = {c}"))?;
        ensure(lim.to_affine().is_none(), || "limit point lies in the affine chart".into())?;
    }
    // The three limit points are collinear: every 3×3 minor of their coordinates vanishes.
    let rows = [[1, 2, 0, 0], [1, 1, 0, 0], [2, 1, 0, 0]].map(|r| r.map(int));
    for skip in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
        let m = |i: usize, j: usize| rows[i][cols[j]].clone();
        let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        ensure(det == int(0), || "limit points not collinear".into())?;
    }
    Ok("10^4 convexity samples, 10^3 chords, witness segment for c ∈ {0.5, 1, 2}".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 10] = [
        (1, "exact relation", exact_relation, Duration::from_secs(5)),
        (2, "unipotency dichotomy", unipotency_dichotomy, Duration::from_secs(5)),
        (3, "cusp shape", cusp_shape, Duration::from_secs(1)),
        (4, "metric oracle", metric_oracle, Duration::from_secs(30)),
        (5, "closed-form norms", closed_form_norms, Duration::from_secs(60)),
        (6, "volume finiteness", volume_finiteness, Duration::from_secs(300)),
        (7, "normalization round trip", normalization_round_trip, Duration::from_secs(60)),
        (8, "convergence", convergence, Duration::from_secs(10)),
        (9, "horoball displacement", horoball_displacement, Duration::from_secs(60)),
        (10, "domain facts", domain_facts, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > budget => Err(format!("over the {budget:?} budget; {d}")),
            o => o,
        };
        match outcome {
            Ok(d) => println!("criterion {id} ({name}): PASS [{:.2} s] {d}", elapsed.as_secs_f64()),
            Err(d) => {
                failed += 1;
                println!("criterion {id} ({name}): FAIL [{:.2} s] {d}", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
