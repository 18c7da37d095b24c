use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use super::matrix::Mat4;
use super::poly::{characteristic_polynomial, Polynomial};
use super::scalar::{from_f64, rational_approx, Rational, Scalar};
use super::LinAlgError;

/// Singular-value ratio below which a float Krylov column counts as dependent.
pub const KRYLOV_DEPENDENT: f64 = 1e-9;
/// Ratio above which it counts as independent; in between the input is refused.
pub const KRYLOV_INDEPENDENT: f64 = 1e-6;

/// Monic minimal polynomial via successive Krylov dependencies of I, M, M², ….
///
/// Exact regime: exact Gaussian elimination. Float regime: singular-value gap on
/// normalized powers, refusing ambiguous rank decisions.
pub fn minimal_polynomial<T: Scalar>(m: &Mat4<T>) -> Result<Polynomial<T>, LinAlgError> {
    if T::is_exact() {
        Ok(exact_minpoly(m))
    } else {
        float_minpoly(&m.to_f64()).map(|p| Polynomial::new(p.coeffs().iter().map(|&c| from_f64(c)).collect()))
    }
}

fn flatten<T: Scalar>(m: &Mat4<T>) -> Vec<T> {
    m.0.iter().flatten().cloned().collect()
}

/// Solves `Σ c_k cols[k] = target` exactly; `None` when inconsistent.
fn solve_exact<T: Scalar>(cols: &[Vec<T>], target: &[T]) -> Option<Vec<T>> {
    let n = cols.len();
    let rows = target.len();
    let mut a: Vec<Vec<T>> = (0..rows)
        .map(|r| {
            let mut row: Vec<T> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pv = a[r][c].clone();
        for k in c..=n {
            a[r][k] = a[r][k].clone() / pv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in c..=n {
                    let s = f.clone() * a[r][k].clone();
                    a[i][k] = a[i][k].clone() - s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut sol = vec![T::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = a[i][n].clone();
    }
    Some(sol)
}

fn exact_minpoly<T: Scalar>(m: &Mat4<T>) -> Polynomial<T> {
    let mut powers = vec![flatten(&Mat4::<T>::identity())];
    let mut cur = Mat4::<T>::identity();
    for d in 1..=4 {
        cur = &cur * m;
        let target = flatten(&cur);
        if let Some(c) = solve_exact(&powers, &target) {
            let mut coeffs: Vec<T> = c.into_iter().map(|x| -x).collect();
            coeffs.push(T::one());
            return Polynomial::new(coeffs);
        }
        powers.push(target);
        debug_assert!(d < 4, "Cayley–Hamilton bounds the degree by 4");
    }
    characteristic_polynomial(m)
}

fn float_minpoly(m: &Mat4<f64>) -> Result<Polynomial<f64>, LinAlgError> {
    let scale = m.max_abs();
    if scale == 0.0 {
        return Ok(Polynomial::x());
    }
    if !scale.is_finite() {
        return Err(LinAlgError::NonFinite);
    }
    let a = m.scale(&(1.0 / scale));
    let mut powers = vec![Mat4::<f64>::identity()];
    for d in 1..=4 {
        let next = &powers[d - 1] * &a;
        powers.push(next);
        let cols: Vec<Vec<f64>> = powers
            .iter()
            .map(|p| {
                let v = flatten(p);
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                v.into_iter().map(|x| x / n).collect()
            })
            .collect();
        let mat = DMatrix::from_fn(16, d + 1, |r, c| cols[c][r]);
        let sv = mat.singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
        if ratio < KRYLOV_DEPENDENT || d == 4 {
            let basis = DMatrix::from_fn(16, d, |r, c| powers[c].0[r / 4][r % 4]);
            let target = nalgebra::DVector::from_fn(16, |r, _| powers[d].0[r / 4][r % 4]);
            let sol = basis.svd(true, true).solve(&target, 1e-14).map_err(|e| LinAlgError::IllConditioned(e.to_string()))?;
            // undo the scaling: p(t) = Σ c_k s^{d-k} t^k for the scaled matrix
            let mut coeffs: Vec<f64> = (0..d).map(|k| -sol[k] * scale.powi((d - k) as i32)).collect();
            coeffs.push(1.0);
            return Ok(Polynomial::new(coeffs));
        }
        if ratio < KRYLOV_INDEPENDENT {
            return Err(LinAlgError::IllConditioned(format!(
                "Krylov rank decision at degree {d} is ambiguous (singular-value ratio {ratio:.3e})"
            )));
        }
    }
    unreachable!("degree 4 always returns")
}

/// One eigenvalue with its algebraic multiplicity.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Eigen {
    pub value: f64,
    /// Exact value when the eigenvalue was certified rational.
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<Rational>,
    pub multiplicity: usize,
}

fn ser_opt_rational<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&super::scalar::format_rational(r)),
        None => s.serialize_none(),
    }
}

/// Real eigenvalues sorted ascending with algebraic multiplicities summing to 4.
///
/// Exact regime: square-free factorization over ℚ, exact linear factors, and a
/// certified rational-root test on the rest. Float regime: clustered polynomial roots.
pub fn real_spectrum<T: Scalar>(m: &Mat4<T>) -> Result<Vec<Eigen>, LinAlgError> {
    let mut out = if T::is_exact() {
        let mq = Mat4::<Rational>::from_fn(|i, j| m[(i, j)].to_rational().expect("exact entry"));
        exact_spectrum(&mq)?
    } else {
        float_spectrum(&characteristic_polynomial(&m.to_f64()), m.max_abs())?
    };
    out.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

fn exact_spectrum(m: &Mat4<Rational>) -> Result<Vec<Eigen>, LinAlgError> {
    let cp = characteristic_polynomial(m);
    let mut out = Vec::new();
    for (mult, factor) in cp.square_free() {
        let mut rest = factor.clone();
        // peel certified rational roots
        loop {
            let deg = rest.degree().unwrap_or(0);
            if deg == 0 {
                break;
            }
            if deg == 1 {
                let root = -rest.coeffs()[0].clone() / rest.coeffs()[1].clone();
                out.push(Eigen { value: root.to_float(), exact: Some(root), multiplicity: mult });
                break;
            }
            let found = rest
                .to_f64()
                .complex_roots()
                .iter()
                .filter(|z| z.im.abs() <= 1e-6 * z.norm().max(1.0))
                .find_map(|z| certify_rational_root(&rest, z.re));
            match found {
                Some(r) => {
                    out.push(Eigen { value: r.to_float(), exact: Some(r.clone()), multiplicity: mult });
                    rest = rest.div_rem(&Polynomial::linear_root(r)).0;
                }
                None => {
                    for root in float_real_roots(&rest.to_f64())? {
                        out.push(Eigen { value: root, exact: None, multiplicity: mult });
                    }
                    break;
                }
            }
        }
    }
    Ok(out)
}

fn certify_rational_root(p: &Polynomial<Rational>, approx: f64) -> Option<Rational> {
    for max_den in [1u64 << 10, 1 << 20, 1 << 40] {
        if let Some(r) = rational_approx(approx, max_den) {
            if p.eval(&r).is_zero() {
                return Some(r);
            }
        }
    }
    None
}

/// Real roots of a square-free float polynomial; errors on complex roots.
fn float_real_roots(p: &Polynomial<f64>) -> Result<Vec<f64>, LinAlgError> {
    let mut out = Vec::new();
    for z in p.complex_roots() {
        if z.im.abs() > 1e-9 * z.norm().max(1.0) {
            return Err(LinAlgError::NonRealSpectrum(format!("{:.6}{:+.6}i", z.re, z.im)));
        }
        out.push(z.re);
    }
    Ok(out)
}

/// Relative backward error accepted when a group of roots is merged into one multiple root.
///
/// Coefficient `k` of the characteristic polynomial of `M` carries a rounding error of
/// order `ε‖M‖ᵏ`; a root of multiplicity `m` spreads by the `m`-th root of that, so a
/// distance threshold cannot separate rounding from genuine splitting. Instead, roots are
/// merged while the polynomial stays within this relative distance of one with an exact
/// `m`-fold root at the refined center.
pub const CLUSTER_BACKWARD_TOL: f64 = 1e-11;

fn float_spectrum(cp: &Polynomial<f64>, mat_scale: f64) -> Result<Vec<Eigen>, LinAlgError> {
    let roots = cp.complex_roots();
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut clusters: Vec<Vec<Complex64>> = roots.iter().map(|&z| vec![z]).collect();
    let centroid = |c: &[Complex64]| c.iter().sum::<Complex64>() / c.len() as f64;
    let center = |c: &[Complex64]| refine_cluster(cp, centroid(c), c.len());
    loop {
        let mut pairs = Vec::new();
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                pairs.push(((centroid(&clusters[i]) - centroid(&clusters[j])).norm(), i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let merge = pairs.into_iter().find(|&(_, i, j)| {
            let members: Vec<Complex64> = clusters[i].iter().chain(&clusters[j]).copied().collect();
            let c = center(&members);
            is_multiple_root(cp, c, &members, mat_scale)
        });
        let Some((_, i, j)) = merge else { break };
        let moved = clusters.remove(j);
        clusters[i].extend(moved);
    }
    let mut out = Vec::new();
    for members in clusters {
        let c = center(&members);
        if c.im.abs() > 1e-7 * scale {
            return Err(LinAlgError::NonRealSpectrum(format!("{:.6}{:+.6}i", c.re, c.im)));
        }
        out.push(Eigen { value: c.re, exact: None, multiplicity: members.len() });
    }
    Ok(out)
}

/// Whether `p` is within the rounding budget of a polynomial with an `m`-fold root at `c`:
/// the Taylor coefficients of order `< m` at `c` must be small, and every member must lie
/// within the spread such a perturbation can cause.
fn is_multiple_root(p: &Polynomial<f64>, c: Complex64, members: &[Complex64], mat_scale: f64) -> bool {
    let m = members.len();
    let coeffs = p.coeffs();
    let deg = coeffs.len() - 1;
    let base = mat_scale.max(1.0);
    let budget: f64 =
        CLUSTER_BACKWARD_TOL * (0..=deg).map(|j| base.powi((deg - j) as i32) * (1.0 + c.norm()).powi(j as i32)).sum::<f64>();
    // Repeated synthetic division by (x − c) yields the Taylor coefficients at c.
    let mut work: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    for k in 0..=m {
        let n = work.len();
        if n == 0 {
            return false;
        }
        let mut quotient = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in (0..n).rev() {
            acc = acc * c + work[i];
            if i > 0 {
                quotient[i - 1] = acc;
            }
        }
        if k < m && acc.norm() > budget {
            return false;
        }
        if k == m {
            let spread = 4.0 * (budget / acc.norm()).powf(1.0 / m as f64);
            return members.iter().all(|z| (z - c).norm() <= spread);
        }
        work = quotient;
    }
    unreachable!("returns at k = m")
}

/// A cluster of m roots approximates an m-fold root, which is a simple root of the
/// (m−1)-th derivative; polish it there by Newton's method.
fn refine_cluster(p: &Polynomial<f64>, start: Complex64, m: usize) -> Complex64 {
    if m < 2 {
        return start;
    }
    let mut q = p.clone();
    for _ in 1..m {
        q = q.derivative();
    }
    let dq = q.derivative();
    let eval =
        |poly: &Polynomial<f64>, z: Complex64| poly.coeffs().iter().rev().fold(Complex64::new(0.0, 0.0), |a, &c| a * z + c);
    let mut z = start;
    for _ in 0..50 {
        let d = eval(&dq, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = eval(&q, z) / d;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// True iff all eigenvalues coincide (projective unipotency).
pub fn is_projectively_unipotent<T: Scalar>(m: &Mat4<T>) -> Result<bool, LinAlgError> {
    Ok(real_spectrum(m)?.len() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    fn lprime(a: i64, b: i64) -> Mat4<Rational> {
        Mat4::from_ints([[0, 0, b, -a], [0, a, 0, 0], [0, 0, 0, b], [0, 0, 0, 0]])
    }

    #[test]
    fn minpoly_lprime_generic() {
        let p = minimal_polynomial(&lprime(1, 1)).unwrap();
        let expect = Polynomial::x().pow(3).mul(&Polynomial::linear_root(q(1, 1)));
        assert_eq!(p, expect);
    }

    #[test]
    fn minpoly_identity_and_nilpotent() {
        assert_eq!(minimal_polynomial(&Mat4::<Rational>::identity()).unwrap(), Polynomial::linear_root(q(1, 1)));
        assert_eq!(minimal_polynomial(&lprime(0, 2)).unwrap(), Polynomial::x().pow(3));
        assert_eq!(minimal_polynomial(&Mat4::<Rational>::zero()).unwrap(), Polynomial::x());
    }

    #[test]
    fn float_minpoly_matches_exact() {
        let p = minimal_polynomial(&lprime(2, 3).to_f64()).unwrap();
        let expect = [0.0, 0.0, 0.0, -2.0, 1.0];
        for (c, e) in p.coeffs().iter().zip(expect) {
            assert!((c - e).abs() < 1e-9, "{p}");
        }
    }

    #[test]
    fn float_minpoly_refuses_near_degenerate() {
        // eigenvalues 1 and 1 + 1e-7 are numerically inseparable at degree 2
        let mut m = Mat4::<f64>::identity();
        m[(1, 1)] = 1.0 + 1e-7;
        m[(2, 2)] = 2.0;
        m[(3, 3)] = 2.0;
        assert!(matches!(minimal_polynomial(&m), Err(LinAlgError::IllConditioned(_))));
    }

    #[test]
    fn spectrum_identity() {
        let s = real_spectrum(&Mat4::<Rational>::identity()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].multiplicity, 4);
        assert_eq!(s[0].exact, Some(q(1, 1)));
        let sf = real_spectrum(&Mat4::<f64>::identity()).unwrap();
        assert_eq!(sf.len(), 1);
        assert_eq!(sf[0].multiplicity, 4);
    }

    #[test]
    fn spectrum_irrational_and_complex() {
        // diag block with eigenvalues ±√2, then a rotation block
        let m = Mat4::<Rational>::from_ints([[0, 2, 0, 0], [1, 0, 0, 0], [0, 0, 3, 0], [0, 0, 0, 3]]);
        let s = real_spectrum(&m).unwrap();
        assert_eq!(s.len(), 3);
        assert!((s[0].value + 2f64.sqrt()).abs() < 1e-12 && s[0].exact.is_none());
        assert_eq!(s[2].exact, Some(q(3, 1)));
        let rot = Mat4::<Rational>::from_ints([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert!(matches!(real_spectrum(&rot), Err(LinAlgError::NonRealSpectrum(_))));
        assert!(matches!(real_spectrum(&rot.to_f64()), Err(LinAlgError::NonRealSpectrum(_))));
    }

    #[test]
    fn spectrum_non_integer_rational_roots() {
        // (t - 1/3)(t - 5/7)(t - 2)^2 via an upper triangular matrix
        let m = Mat4::<Rational>::from_ratios([
            [(1, 3), (1, 1), (0, 1), (4, 1)],
            [(0, 1), (5, 7), (2, 1), (0, 1)],
            [(0, 1), (0, 1), (2, 1), (1, 1)],
            [(0, 1), (0, 1), (0, 1), (2, 1)],
        ]);
        let s = real_spectrum(&m).unwrap();
        let got: Vec<(Option<Rational>, usize)> = s.iter().map(|e| (e.exact.clone(), e.multiplicity)).collect();
        assert_eq!(got, vec![(Some(q(1, 3)), 1), (Some(q(5, 7)), 1), (Some(q(2, 1)), 2)]);
    }
}
