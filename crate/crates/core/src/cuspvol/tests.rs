use super::*;
use crate::fig8::normalized_lattice;
use crate::hilbert::finsler_norm;
use crate::projlin::{Rational, Scalar};

fn p(a: f64, b: f64, c: f64) -> Point3 {
    Point3::new(a, b, c)
}

fn log16() -> f64 {
    16f64.ln()
}

fn fd16() -> CuspFundamentalDomain {
    CuspFundamentalDomain::fig8(log16(), 1.0, None).unwrap()
}

/// `[meridian, longitude]` of the normalized figure-eight lattice at `t = 1/4` (`s = log 16`).
fn lattice16() -> [Mat4<f64>; 2] {
    normalized_lattice(&<Rational as Scalar>::from_ratio(1, 4)).unwrap().generators
}

/// Displacement of the translation by `b` at height `h` above the ambient horoball, from the
/// quadratic for the chord in the slice `x₂ = const`: `4 artanh(1/√(1 + 8h/b²))`.
fn displacement_oracle(b: f64, h: f64) -> f64 {
    4.0 * (1.0 / (1.0 + 8.0 * h / (b * b)).sqrt()).atanh()
}

#[test]
fn direction_norm_example() {
    let n = direction_norms(&p(2.0, 1.0, 0.0)).unwrap();
    assert!((n.e2 - 1.0 / (1.0 - (-2.0f64).exp())).abs() < 1e-15);
    assert!((n.e1 - 0.5).abs() < 1e-15);
    assert!((n.e3 - 1.0).abs() < 1e-15);
    assert!(direction_norms(&p(-1.0, 1.0, 0.0)).is_err());
    assert!(direction_norms(&p(1.0, -1.0, 0.0)).is_err());
}

#[test]
fn direction_norms_match_finsler_engine() {
    for x in [p(2.0, 1.0, 0.0), p(5.0, 3.0, 1.5), p(0.3, 2.0, 0.5), p(40.0, 0.1, -4.0)] {
        let n = direction_norms(&x).unwrap();
        for (v, want) in [(p(0.0, 1.0, 0.0), n.e2), (p(1.0, 0.0, 0.0), n.e1), (p(0.0, 0.0, 1.0), n.e3)] {
            let got = finsler_norm(&ConvexDomain::DPrime, &x, &v).unwrap();
            assert!((got - want).abs() < 1e-9 * want.max(1.0), "{x:?} {v:?}: {got} vs {want}");
        }
    }
}

#[test]
fn vertical_norm_decays_like_inverse_height() {
    for x1 in [1e2, 1e4, 1e6] {
        let n = direction_norms(&p(x1, 1.0, 0.0)).unwrap();
        assert!((n.e1 * x1 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn fig8_domain_matches_pipeline_generators() {
    let [m, l] = lattice16();
    let fd = CuspFundamentalDomain::from_generators(1.0, &m, &l, None).unwrap();
    let want = fd16();
    assert!((fd.a_l - want.a_l).abs() < 1e-9, "{fd:?} vs {want:?}");
    assert!((fd.b_t - want.b_t).abs() < 1e-9, "{fd:?} vs {want:?}");
    assert!(CuspFundamentalDomain::from_generators(1.0, &l, &m, None).is_err());
    assert!(CuspFundamentalDomain::fig8(0.0, 1.0, None).is_err());
    assert!(CuspFundamentalDomain::new(0.0, 1.0, 1.0, None).is_err());
}

#[test]
fn threshold_and_lower_bound() {
    let fd = fd16();
    let n = bound_threshold(&fd).unwrap();
    assert_eq!(n, 10.0);
    let q = QuadratureSpec::default();
    let lb = lower_bound_check(&fd, &p(100.0, 1.0, 0.0), &q).unwrap();
    assert!(lb.margin > 0.0 && lb.bound < lb.volume, "{lb:?}");
    // T = 1 − e^{−100} at (100, 1, 0).
    assert!((lb.t_const - 1.0).abs() < 1e-15);
    assert!((lb.c - 1.0 / (36.0 * 2f64.sqrt())).abs() < 1e-15);
    assert!(matches!(lower_bound_check(&fd, &p(5.0, 1.0, 0.0), &q), Err(CuspVolError::BelowThreshold { .. })));
    assert!(matches!(lower_bound_check(&fd, &p(10.0, 1.0, 0.0), &q), Err(CuspVolError::BelowThreshold { .. })));
    assert!(matches!(lower_bound_check(&fd, &p(100.0, 50.0, 0.0), &q), Err(CuspVolError::InvalidParameter(_))));
}

#[test]
fn simplex_volume_is_inside_unit_ball() {
    // Each simplex vertex has norm ≤ 1, checked against the generic engine.
    let x = p(1e3, 2.0, 0.5);
    let n = direction_norms(&x).unwrap();
    let t = x[1] - n.k1;
    let dom = ConvexDomain::DPrime;
    for v in [p(0.0, t * (1.0 - 1e-9), 0.0), p(x[0] / 2.0, 0.0, 0.0), p(0.0, 0.0, x[0].sqrt() / (3.0 * 2f64.sqrt()))] {
        assert!(finsler_norm(&dom, &x, &v).unwrap() < 1.0, "{v:?}");
    }
}

#[test]
fn unit_ball_growth_exponent() {
    let fd = fd16();
    let q = QuadratureSpec::default();
    let pts: Vec<(f64, f64)> =
        [1e2, 1e3, 1e4].iter().map(|&x1| (x1, lower_bound_check(&fd, &p(x1, 1.0, 0.0), &q).unwrap().volume)).collect();
    let slope = log_log_slope(&pts);
    assert!(slope >= 1.4, "slope {slope}");
    assert!((log_log_slope(&[(1.0, 3.0), (2.0, 3.0 * 2f64.powf(1.5)), (5.0, 3.0 * 5f64.powf(1.5))]) - 1.5).abs() < 1e-12);
}

#[test]
fn volume_table_fig8() {
    let q = QuadratureSpec { mc_samples: 100_000, ..QuadratureSpec::default() };
    let t = cusp_volume_table(&fd16(), &[10.0, 20.0, 40.0, 80.0], &q).unwrap();
    assert!(t.is_monotone());
    assert!(t.rows.windows(2).all(|w| w[1].estimate > w[0].estimate), "{t:?}");
    assert_eq!(t.rows[0].increment_ratio, None);
    assert_eq!(t.rows[1].increment_ratio, None);
    for r in &t.rows[2..] {
        let ratio = r.increment_ratio.unwrap();
        assert!((0.5..=0.9).contains(&ratio), "{r:?}");
    }
    assert!(t.total.0 > t.rows[3].estimate && t.total.0.is_finite());
    assert!(t.tail_checks.iter().all(|c| c.holds), "{:?}", t.tail_checks);
    let csv = volume_csv(&t);
    assert_eq!(csv.lines().next(), Some("X,estimate,stderr,increment_ratio"));
    assert_eq!(csv.lines().count(), 5);
    assert!(volume_svg(&t).starts_with("<svg"));
}

#[test]
fn empty_rectangle_gives_zero_volume() {
    let q = QuadratureSpec { mc_samples: 1000, ..QuadratureSpec::default() };
    let fd = CuspFundamentalDomain::new(1.0, 0.0, 0.5, None).unwrap();
    let t = cusp_volume_table(&fd, &[10.0, 20.0], &q).unwrap();
    assert!(t.rows.iter().all(|r| r.estimate == 0.0 && r.stderr == 0.0));
    assert!(cusp_volume_table(&fd, &[20.0, 10.0], &q).is_err());
    assert!(cusp_volume_table(&fd, &[], &q).is_err());
}

#[test]
fn doubling_samples_shrinks_stderr() {
    let fd = fd16();
    let run = |n: usize| {
        let q = QuadratureSpec { mc_samples: n, ..QuadratureSpec::default() };
        cusp_volume_table(&fd, &[40.0], &q).unwrap().rows[0].stderr
    };
    let ratio = run(20_000) / run(40_000);
    // Halving within a factor of 2; the expected value is √2.
    assert!((1.0..=4.0).contains(&ratio), "ratio {ratio}");
    assert!((ratio - 2f64.sqrt()).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn volume_smaller_in_larger_domain() {
    let q = QuadratureSpec { mc_samples: 20_000, ..QuadratureSpec::default() };
    for c in [0.25, 1.0] {
        let v = volume_comparison(&fd16(), 40.0, c, &q).unwrap();
        assert!(v.holds(), "{v:?}");
    }
    assert!(volume_comparison(&fd16(), 40.0, 0.0, &q).is_err());
}

#[test]
fn rectangle_tiles_the_base() {
    let [m, l] = lattice16();
    let fd = fd16();
    let r = tiling_check(&fd, &m, &l, 10_000, 11).unwrap();
    assert!(r.bad_fraction() < 1e-3, "{r:?}");
    // A rectangle twice as tall double-covers about half the base.
    let tall = CuspFundamentalDomain { b_t: 2.0 * fd.b_t, ..fd.clone() };
    let r = tiling_check(&tall, &m, &l, 10_000, 11).unwrap();
    assert!(r.overlaps > 4000, "{r:?}");
}

#[test]
fn displacement_profile_fig8() {
    let [m, _] = lattice16();
    let levels = [1.0, 2.0, 4.0, 8.0, 16.0];
    let prof = displacement_profile(log16(), &m, &levels).unwrap();
    assert!(prof.is_strictly_decreasing(), "{prof:?}");
    let b = fd16().b_t;
    assert!((prof.translation.abs() - b).abs() < 1e-9);
    for (&l, &d) in levels.iter().zip(&prof.displacement) {
        let want = displacement_oracle(b, l - AMBIENT_LEVEL);
        assert!((d - want).abs() < 1e-10 * want, "level {l}: {d} vs {want}");
    }
    assert!(prof.spread.iter().all(|&s| s < 1e-9), "{:?}", prof.spread);
    let csv = displacement_csv(&prof);
    assert_eq!(csv.lines().next(), Some("level,displacement"));
    assert_eq!(csv.lines().count(), 6);
    assert!(displacement_svg(&prof).contains("<polyline"));
}

#[test]
fn displacement_equal_at_lattice_equivalent_points() {
    let [m, l] = lattice16();
    let gamma = &l.pow(2) * &m.inverse().unwrap().pow(3);
    for level in [1.0, 3.0, 20.0] {
        let z = p(level, 1.0, 0.0);
        let w = affine_apply(&gamma, &z);
        assert!((w[0] - f_prime(w[1], w[2]) - level).abs() < 1e-9 * w[0].abs().max(1.0));
        let a = displacement_at(&m, 1.0, 0.0, level).unwrap();
        let b = displacement_at(&m, w[1], w[2], level).unwrap();
        assert!((a - b).abs() < 1e-9, "level {level}: {a} vs {b}");
    }
}

#[test]
fn displacement_tends_to_zero() {
    let [m, _] = lattice16();
    let levels: Vec<f64> = (0..=10).map(|e| 2f64.powi(e)).collect();
    let prof = displacement_profile(log16(), &m, &levels).unwrap();
    assert!(prof.is_strictly_decreasing());
    // Decay rate h^{-1/2}: d(h)·√h → √2·b.
    let b = prof.translation.abs();
    let h = levels[10] - AMBIENT_LEVEL;
    assert!((prof.displacement[10] * h.sqrt() / (2f64.sqrt() * b) - 1.0).abs() < 1e-3);
}

#[test]
#[ignore = "unattainable: the h^(-1/2) decay gives d(1024)/d(1) = 0.0227 for this translation, and at least 0.022 for any translation length"]
fn displacement_at_level_1024_below_one_percent() {
    let [m, _] = lattice16();
    let prof = displacement_profile(log16(), &m, &[1.0, 1024.0]).unwrap();
    assert!(prof.displacement[1] < 0.01 * prof.displacement[0], "{prof:?}");
}

#[test]
fn displacement_errors() {
    let [m, l] = lattice16();
    assert!(matches!(displacement_profile(log16(), &m, &[2.0, 1.0]), Err(CuspVolError::LevelOrder { .. })));
    assert!(matches!(displacement_profile(log16(), &m, &[0.5, 1.0]), Err(CuspVolError::LevelOrder { .. })));
    assert!(matches!(displacement_profile(log16(), &m, &[]), Err(CuspVolError::LevelOrder { .. })));
    assert!(matches!(displacement_profile(log16(), &l, &[1.0]), Err(CuspVolError::NotInLPrime { .. })));
    let synthetic = group_exp(&LieAlgElem::lprime(0.0, 0.4)).unwrap().into_matrix();
    let prof = displacement_profile(0.0, &synthetic, &[1.0, 2.0]).unwrap();
    assert!((prof.displacement[0] - displacement_oracle(0.4, 0.5)).abs() < 1e-10);
}
