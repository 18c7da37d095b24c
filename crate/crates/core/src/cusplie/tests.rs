use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::domains::{affine_apply, vt_map, ConvexDomain, Point3};
use crate::projlin::{mat_exp, matrix_to_json, Rational};

fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.random_range(-6..=6), rng.random_range(1..=4))
}

/// Integer matrix with entries in `[-3, 3]` and nonzero determinant.
fn random_conjugator(rng: &mut ChaCha8Rng) -> Mat4<Rational> {
    loop {
        let g = Mat4::<Rational>::from_fn(|_, _| Rational::from_int(rng.random_range(-3..=3)));
        if g.det() != Rational::from_int(0) {
            return g;
        }
    }
}

fn conj<T: Scalar>(g: &Mat4<T>, x: &Mat4<T>) -> Mat4<T> {
    &(g * x) * &g.inverse().unwrap()
}

#[test]
fn alg_matrix_displayed_forms() {
    let m = alg_matrix(&LieAlgElem::l0(1.0, 2.0)).unwrap();
    let want = Mat4([[0.0, 1.0, 2.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 2.0], [0.0; 4]]);
    assert_eq!(m, want);
    let m = alg_matrix(&LieAlgElem::lprime(1.0, 1.0)).unwrap();
    let want = Mat4([[0.0, 0.0, 1.0, -1.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0; 4]]);
    assert_eq!(m, want);
    let m = alg_matrix(&LieAlgElem::lprime_minus(1.0, 0.0)).unwrap();
    let want = Mat4([[0.0, 0.0, 0.0, 1.0], [0.0, 1.0, 0.0, 0.0], [0.0; 4], [0.0; 4]]);
    assert_eq!(m, want);
    let m = alg_matrix(&LieAlgElem::lt(2.0, 1.0, 3.0).unwrap()).unwrap();
    assert_eq!(m[(1, 1)], 2.0);
    assert!(LieAlgElem::lt(0.0, 1.0, 1.0).is_err());
    let bad = LieAlgElem { family: Family::Lt(0.0), u: 1.0, v: 1.0 };
    assert!(alg_matrix(&bad).is_err());
    assert!(group_exp(&bad).is_err());
}

#[test]
fn families_closed_under_linear_combinations() {
    let fams = [Family::L0, Family::Lt(q(3, 2)), Family::LPrime, Family::LPrimeMinus];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for fam in fams {
        for _ in 0..20 {
            let x = LieAlgElem::new(fam.clone(), random_rational(&mut rng), random_rational(&mut rng)).unwrap();
            let y = LieAlgElem::new(fam.clone(), random_rational(&mut rng), random_rational(&mut rng)).unwrap();
            let k = random_rational(&mut rng);
            let lhs = alg_matrix(&x.add(&y.scale(&k)).unwrap()).unwrap();
            let rhs = &alg_matrix(&x).unwrap() + &alg_matrix(&y).unwrap().scale(&k);
            assert_eq!(lhs, rhs);
            let (mx, my) = (alg_matrix(&x).unwrap(), alg_matrix(&y).unwrap());
            assert!(mx.commutator(&my).is_zero_within(0.0), "{fam:?} is not abelian");
        }
    }
    assert!(LieAlgElem::l0(1.0, 0.0).add(&LieAlgElem::lprime(1.0, 0.0)).is_err());
}

#[test]
fn l0_group_is_abelian_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let exact = |r: &Rational, s: &Rational| {
        let h = (r * r + s * s) / Rational::from_int(2);
        let (o, z) = (Rational::from_int(1), Rational::from_int(0));
        Mat4([
            [o.clone(), r.clone(), s.clone(), h],
            [z.clone(), o.clone(), z.clone(), r.clone()],
            [z.clone(), z.clone(), o.clone(), s.clone()],
            [z.clone(), z.clone(), z, o],
        ])
    };
    for _ in 0..50 {
        let g = exact(&random_rational(&mut rng), &random_rational(&mut rng));
        let h = exact(&random_rational(&mut rng), &random_rational(&mut rng));
        assert_eq!(&g * &h, &h * &g);
    }
}

#[test]
fn group_exp_examples() {
    let g = group_exp(&LieAlgElem::l0(0.3, -0.7)).unwrap().into_matrix();
    assert_eq!(g.0[0], [1.0, 0.3, -0.7, 0.5 * (0.09 + 0.49)]);
    let g = group_exp(&LieAlgElem::lprime(0.4, 1.5)).unwrap().into_matrix();
    assert_eq!(g[(0, 3)], 0.5 * 1.5 * 1.5 - 0.4);
    let s = 0.8;
    let g = group_exp(&LieAlgElem::lt(1.0, 1.0, s).unwrap()).unwrap().into_matrix();
    let e = std::f64::consts::E;
    assert!((g[(0, 1)] - (e - 1.0)).abs() < 1e-15);
    assert!((g[(1, 3)] - (e - 1.0)).abs() < 1e-15);
    assert!((g[(0, 3)] - (e - 2.0 + s * s / 2.0)).abs() < 1e-15);
}

#[test]
fn group_exp_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in 0..4 {
        for _ in 0..1000 {
            let (u, v): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let e = match kind {
                0 => LieAlgElem::l0(u, v),
                1 => {
                    let mut t: f64 = rng.random_range(-2.0..2.0);
                    if t.abs() < 1e-3 {
                        t = 1e-3;
                    }
                    LieAlgElem::lt(t, u, v).unwrap()
                }
                2 => LieAlgElem::lprime(u, v),
                _ => LieAlgElem::lprime_minus(u, v),
            };
            let closed = group_exp(&e).unwrap().into_matrix();
            let series = mat_exp(&alg_matrix(&e).unwrap());
            let err = closed.max_diff(&series) / series.max_abs().max(1.0);
            assert!(err < 1e-12, "{e:?}: {err:e}");
        }
    }
}

#[test]
fn profile_examples() {
    let p = minpoly_profile(&alg_matrix(&LieAlgElem::lprime(q(1, 1), q(1, 1))).unwrap(), 0.0).unwrap();
    assert_eq!((p.n, p.f_value, p.kernel_flag), (3, 1.0, false));
    let p = minpoly_profile(&alg_matrix(&LieAlgElem::lprime(q(0, 1), q(1, 1))).unwrap(), 0.0).unwrap();
    assert_eq!((p.n, p.f_value, p.kernel_flag), (2, 0.0, true));
    assert_eq!(minpoly_profile(&Mat4::<Rational>::zero(), 0.0), Err(CuspError::ZeroElement));
    let p = minpoly_profile(&alg_matrix(&LieAlgElem::lprime(q(-5, 2), q(0, 1))).unwrap(), 0.0).unwrap();
    assert_eq!((p.n, p.f_value), (2, -2.5));
    // diag(1, 2, 0, 0) has minimal polynomial t(t − 1)(t − 2).
    let mut m = Mat4::<Rational>::zero();
    m[(0, 0)] = q(1, 1);
    m[(1, 1)] = q(2, 1);
    assert!(matches!(minpoly_profile(&m, 0.0), Err(CuspError::WrongShape(_))));
}

#[test]
fn profile_matches_formula_on_lprime() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let (a, b) = (random_rational(&mut rng), random_rational(&mut rng));
        if a == q(0, 1) && b == q(0, 1) {
            continue;
        }
        let p = minpoly_profile(&alg_matrix(&LieAlgElem::lprime(a.clone(), b.clone())).unwrap(), 0.0).unwrap();
        let n = if a.clone() * b.clone() == q(0, 1) { 2 } else { 3 };
        assert_eq!(p.n, n);
        assert_eq!(p.f_value, a.to_float());
        assert_eq!(p.kernel_flag, a == q(0, 1));
    }
}

#[test]
fn classify_examples() {
    let tol = 1e-8;
    let c = |a: f64, b: f64| classify_group(group_exp(&LieAlgElem::lprime(a, b)).unwrap().matrix(), tol).unwrap();
    assert_eq!(c(0.0, 0.7), Classification::PureTranslation);
    assert_eq!(c(0.7, 0.0), Classification::PureDilation);
    assert_eq!(c(1.0, 1.0), Classification::Generic);
    assert_eq!(c(-0.3, 2.0), Classification::Generic);
}

#[test]
fn classify_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let g = random_conjugator(&mut rng);
        let (a, b) = (q(rng.random_range(-2..=2), 1), q(rng.random_range(-2..=2), 1));
        if a == q(0, 1) && b == q(0, 1) {
            continue;
        }
        let x = alg_matrix(&LieAlgElem::lprime(a, b)).unwrap();
        let before = classify(&minpoly_profile(&x, 0.0).unwrap());
        let after = classify(&minpoly_profile(&conj(&g, &x), 0.0).unwrap());
        assert_eq!(before, after);

        let gf = g.to_f64();
        let xg = group_exp(&LieAlgElem::lprime(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).unwrap().into_matrix();
        let before = classify_group(&xg, 1e-8).unwrap();
        let after = classify_group(&conj(&gf, &xg), 1e-7).unwrap();
        assert_eq!(before, after);
    }
}

#[test]
fn normal_form_pair_needs_no_conjugation() {
    let a = group_exp(&LieAlgElem::lprime(1.0, 0.0)).unwrap().into_matrix();
    let b = group_exp(&LieAlgElem::lprime(0.0, 1.0)).unwrap().into_matrix();
    let n = normalize_pair(&a, &b).unwrap();
    assert_eq!(n.sign, 1);
    assert!(n.conjugator.max_diff(&Mat4::identity()) < 1e-12, "{:?}", n.conjugator);
    assert!(n.residual < 1e-12);
    let (p0, p1) = (n.params[0], n.params[1]);
    assert!((p0.0 - 1.0).abs() < 1e-12 && p0.1.abs() < 1e-12);
    assert!(p1.0.abs() < 1e-12 && (p1.1 - 1.0).abs() < 1e-12);
}

fn exact_round_trip(minus: bool, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let make = |a: i64, b: i64| {
        let e = if minus { LieAlgElem::lprime_minus(q(a, 1), q(b, 1)) } else { LieAlgElem::lprime(q(a, 1), q(b, 1)) };
        alg_matrix(&e).unwrap()
    };
    for _ in 0..50 {
        let g = random_conjugator(&mut rng);
        let alpha = conj(&g, &make(1, 0));
        let beta = conj(&g, &make(0, 1));
        let n = normalize_algebra(&alpha, &beta, 0.0).unwrap();
        assert_eq!(n.sign, if minus { -1 } else { 1 });
        assert_eq!(n.residual, 0.0);
        let fam = n.family();
        for img in &n.images {
            let (_, _, r) = fit_params(&fam, img).unwrap();
            assert_eq!(r, 0.0);
        }
        let c = &n.conjugator;
        assert_eq!(conj(c, &alpha), n.images[0]);
        assert_eq!(conj(c, &beta), n.images[1]);
        for img in &n.images {
            let p = minpoly_profile(img, 0.0).unwrap();
            assert!(p.n == 2 || p.n == 3);
        }
    }
}

#[test]
fn exact_round_trip_lprime() {
    exact_round_trip(false, 6);
}

#[test]
fn exact_round_trip_lprime_minus() {
    exact_round_trip(true, 7);
}

fn float_round_trip(minus: bool, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let make = |a: f64, b: f64| {
        let e = if minus { LieAlgElem::lprime_minus(a, b) } else { LieAlgElem::lprime(a, b) };
        group_exp(&e).unwrap().into_matrix()
    };
    for _ in 0..50 {
        let g = random_conjugator(&mut rng).to_f64();
        let a = conj(&g, &make(1.0, 0.0));
        let b = conj(&g, &make(0.0, 1.0));
        let n = normalize_pair(&a, &b).unwrap();
        assert_eq!(n.sign, if minus { -1 } else { 1 });
        assert!(n.residual <= 1e-9, "residual {:e}", n.residual);
        assert!(n.algebra.residual <= 1e-9, "log residual {:e}", n.algebra.residual);
    }
}

#[test]
fn float_round_trip_lprime() {
    float_round_trip(false, 8);
}

#[test]
fn float_round_trip_lprime_minus() {
    float_round_trip(true, 9);
}

#[test]
fn normalization_errors() {
    let a = group_exp(&LieAlgElem::lprime(1.0, 0.0)).unwrap().into_matrix();
    let l0 = group_exp(&LieAlgElem::l0(1.0, 0.0)).unwrap().into_matrix();
    assert!(matches!(normalize_pair(&a, &l0), Err(CuspError::HypothesesViolated(_))));
    assert!(matches!(normalize_pair(&a, &a), Err(CuspError::HypothesesViolated(_))));
    // Rotation block: complex spectrum.
    let mut rot = Mat4::<f64>::identity();
    rot[(0, 0)] = 0.0;
    rot[(0, 1)] = -1.0;
    rot[(1, 0)] = 1.0;
    rot[(1, 1)] = 0.0;
    assert!(matches!(normalize_pair(&rot, &a), Err(CuspError::HypothesesViolated(_))));
    // Two pure translations span kernel elements only.
    let t1 = alg_matrix(&LieAlgElem::l0(q(1, 1), q(0, 1))).unwrap();
    let t2 = alg_matrix(&LieAlgElem::l0(q(0, 1), q(1, 1))).unwrap();
    assert!(normalize_algebra(&t1, &t2, 0.0).is_err());
}

#[test]
fn exact_normalization_rejects_irrational_scale() {
    // (1,4) = −2a: conjugate to 𝔏′ only through a √2 scaling.
    let alpha = alg_matrix(&LieAlgElem::lprime(q(1, 1), q(0, 1))).unwrap();
    let mut beta = alg_matrix(&LieAlgElem::lprime(q(0, 1), q(1, 1))).unwrap();
    beta[(0, 3)] = q(0, 1);
    let mut alpha2 = alpha.clone();
    alpha2[(0, 3)] = q(-2, 1);
    let r = normalize_algebra(&alpha2, &beta, 0.0);
    assert!(matches!(r, Err(CuspError::NotRationallyNormalizable(_))), "{r:?}");
    let f = normalize_algebra(&alpha2.to_f64(), &beta.to_f64(), 1e-9).unwrap();
    assert_eq!(f.sign, 1);
    assert!(f.residual < 1e-12);
}

#[test]
fn convergence_examples() {
    let a = |t: f64| [t, 0.0];
    let b = |t: f64| [0.0, t];
    let r = convergence_conjugate(&a, &b, 0.25).unwrap();
    assert_eq!((r.limit[0].u, r.limit[0].v), (1.0, 0.0));
    assert_eq!((r.limit[1].u, r.limit[1].v), (0.0, 1.0));
    assert!(r.limit_generators[0].max_diff(group_exp(&LieAlgElem::l0(1.0, 0.0)).unwrap().matrix()) < 1e-15);
    assert!(r.conjugation_residual < 1e-12);
    assert_eq!((r.conjugated[0].u, r.conjugated[0].v), (1.0, 0.0));
    assert_eq!(r.conjugated[0].family, Family::Lt(0.25));

    let a = |t: f64| [t, t];
    let b = |t: f64| [t, -t];
    let r = convergence_conjugate(&a, &b, 0.1).unwrap();
    assert!((r.limit_det + 2.0).abs() < 1e-9);

    let a = |t: f64| [t, 0.0];
    let b = |t: f64| [2.0 * t, 0.0];
    assert!(matches!(convergence_conjugate(&a, &b, 0.1), Err(CuspError::DegenerateLimit(_))));

    let c = |t: f64| [t + 1.0, 0.0];
    assert!(matches!(convergence_conjugate(&c, &b, 0.1), Err(CuspError::HypothesesViolated(_))));
    assert!(convergence_conjugate(&a, &b, 0.0).is_err());
}

#[test]
fn richardson_is_second_order() {
    let p = |t: f64| [t.sin(), (2.0 * t).exp() - 1.0];
    let d = richardson_derivative(&p, 1.0 / 1024.0);
    assert!((d[0] - 1.0).abs() < 1e-6 && (d[1] - 2.0).abs() < 1e-5, "{d:?}");
}

#[test]
fn vt_conjugates_lprime_to_lt_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..30 {
        let t =
            q(rng.random_range(1..=5), rng.random_range(1..=5)) * Rational::from_int(if rng.random_bool(0.5) { 1 } else { -1 });
        let (a, b) = (random_rational(&mut rng), random_rational(&mut rng));
        let x = alg_matrix(&LieAlgElem::lprime(a.clone(), b.clone())).unwrap();
        let v = vt_map(&t).unwrap().into_matrix();
        let y = conj(&v, &x);
        let want = alg_matrix(&LieAlgElem::lt(t.clone(), a / t.clone(), b / t.clone()).unwrap()).unwrap();
        assert_eq!(y, want);
    }
}

#[test]
fn cusp_shape_examples() {
    let s = cusp_shape(&LieAlgElem::l0(1.0, 0.0), &LieAlgElem::l0(0.0, 1.0)).unwrap();
    assert_eq!(s.omega, Complex64::new(0.0, 1.0));
    assert!(!s.orientation_flipped);

    let r3 = 3f64.sqrt();
    let s = cusp_shape(&LieAlgElem::l0(0.0, 1.0 / (2.0 * r3)), &LieAlgElem::l0(1.0, 0.0)).unwrap();
    assert!((s.raw - Complex64::new(0.0, -2.0 * r3)).norm() < 1e-12);
    assert!((s.omega - Complex64::new(0.0, 2.0 * r3)).norm() < 1e-12);
    assert!(s.orientation_flipped);

    // Translation m = (0, μ₀) and dilation limit l = (ν₀, 0).
    let (mu0, nu0) = (0.7, 1.9);
    let s = cusp_shape_params((0.0, mu0), (nu0, 0.0)).unwrap();
    assert!((s.raw - Complex64::new(0.0, -nu0 / mu0)).norm() < 1e-12);
    assert_eq!(s.raw.re, 0.0);

    assert_eq!(cusp_shape_params((0.0, 0.0), (1.0, 0.0)), Err(CuspError::ZeroElement));
    assert!(cusp_shape_params((1.0, 1.0), (2.0, 2.0)).is_err());
    assert!(cusp_shape(&LieAlgElem::lprime(1.0, 0.0), &LieAlgElem::l0(0.0, 1.0)).is_err());
}

#[test]
fn cusp_shape_invariant_under_l0_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = |r: &mut ChaCha8Rng| (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let (m, l, h) = (p(&mut rng), p(&mut rng), p(&mut rng));
        let gm = group_exp(&LieAlgElem::l0(m.0, m.1)).unwrap().into_matrix();
        let gl = group_exp(&LieAlgElem::l0(l.0, l.1)).unwrap().into_matrix();
        let gh = group_exp(&LieAlgElem::l0(h.0, h.1)).unwrap().into_matrix();
        let m2 = l0_params(&conj(&gh, &gm)).unwrap();
        let l2 = l0_params(&conj(&gh, &gl)).unwrap();
        let s1 = cusp_shape_params(m, l).unwrap();
        let s2 = cusp_shape_params(m2, l2).unwrap();
        assert!((s1.omega - s2.omega).norm() < 1e-9 * s1.omega.norm().max(1.0));
    }
}

#[test]
fn l0_to_parabolic_is_a_homomorphism() {
    assert_eq!(
        l0_to_parabolic(0.0, 0.0),
        [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]]
    );
    assert_eq!(l0_to_parabolic(1.0, 2.0)[0][1], Complex64::new(1.0, 2.0));
    // Dyadic parameters keep every product exact.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let d = |r: &mut ChaCha8Rng| r.random_range(-64..=64) as f64 / 16.0;
        let (x1, y1, x2, y2) = (d(&mut rng), d(&mut rng), d(&mut rng), d(&mut rng));
        let g1 = group_exp(&LieAlgElem::l0(x1, y1)).unwrap().into_matrix();
        let g2 = group_exp(&LieAlgElem::l0(x2, y2)).unwrap().into_matrix();
        let (x, y) = l0_params(&(&g1 * &g2)).unwrap();
        assert_eq!(l0_to_parabolic(x, y), parabolic_mul(&l0_to_parabolic(x1, y1), &l0_to_parabolic(x2, y2)));
    }
    assert!(l0_params(group_exp(&LieAlgElem::lprime(1.0, 0.0)).unwrap().matrix()).is_err());
}

fn random_dprime_point(rng: &mut ChaCha8Rng) -> Point3 {
    let x2: f64 = rng.random_range(0.05..5.0);
    let x3: f64 = rng.random_range(-3.0..3.0);
    let kappa: f64 = rng.random_range(1e-3..5.0);
    Point3::new(x3 * x3 / 2.0 - x2.ln() + kappa, x2, x3)
}

#[test]
fn lprime_preserves_dprime() {
    let dom = ConvexDomain::DPrime;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let x = random_dprime_point(&mut rng);
        assert!(dom.contains(&x));
        let g = group_exp(&LieAlgElem::lprime(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).unwrap().into_matrix();
        let y = affine_apply(&g, &x);
        assert!(dom.contains(&y), "{x:?} -> {y:?}");
    }
}

#[test]
fn lprime_minus_moves_points_out_of_dprime() {
    let dom = ConvexDomain::DPrime;
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut escaped = 0;
    for _ in 0..1000 {
        let x = random_dprime_point(&mut rng);
        let g =
            group_exp(&LieAlgElem::lprime_minus(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).unwrap().into_matrix();
        if !dom.contains(&affine_apply(&g, &x)) {
            escaped += 1;
        }
    }
    assert!(escaped > 0);
}

#[test]
fn lattice_json_round_trip() {
    let alpha = alg_matrix(&LieAlgElem::lprime_minus(q(1, 1), q(0, 1))).unwrap();
    let beta = alg_matrix(&LieAlgElem::lprime_minus(q(0, 1), q(1, 1))).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let g = random_conjugator(&mut rng);
    let v = serde_json::json!({"A": matrix_to_json(&conj(&g, &alpha)), "B": matrix_to_json(&conj(&g, &beta)), "kind": "algebra"});
    let input = lattice_from_json(&v).unwrap();
    assert_eq!(input.kind, LatticeKind::Algebra);
    let rep = normalize_lattice(&input).unwrap().to_json();
    assert_eq!(rep["sign"], -1);
    assert_eq!(rep["residual"], 0.0);
    assert_eq!(rep["regime"], "exact");

    let a = group_exp(&LieAlgElem::lprime(1.0, 0.0)).unwrap().into_matrix();
    let b = group_exp(&LieAlgElem::lprime(0.0, 1.0)).unwrap().into_matrix();
    let v = serde_json::json!({"A": matrix_to_json(&a), "B": matrix_to_json(&b)});
    let rep = normalize_lattice(&lattice_from_json(&v).unwrap()).unwrap().to_json();
    assert_eq!(rep["sign"], 1);
    assert!(rep["residual"].as_f64().unwrap() < 1e-12);
    assert!(rep["conjugator"]["rows"].is_array());

    assert!(lattice_from_json(&serde_json::json!({"A": matrix_to_json(&a)})).is_err());
    let bad = serde_json::json!({"A": matrix_to_json(&a), "B": matrix_to_json(&b), "kind": "ring"});
    assert!(matches!(lattice_from_json(&bad), Err(CuspError::Json(_))));
}
