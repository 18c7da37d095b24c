use super::profile::{minpoly_profile, MinPolyProfile};
use super::{fit_params, group_exp, CuspError, Family, LieAlgElem};
use crate::projlin::{mat_log, real_spectrum, LinAlgError, Mat4, ProjMap, Scalar, Vec4};

/// Largest coefficient used when searching integer combinations for an `n = 3` element.
const SEARCH_RADIUS: i64 = 3;
/// Relative tolerance for structural zero tests on float logarithms.
const FLOAT_TOL: f64 = 1e-8;

/// Basis of the null space of `m` by Gaussian elimination with largest-entry pivots.
/// Entries below `tol · max|m|` count as zero (float regime only).
pub fn kernel<T: Scalar>(m: &Mat4<T>, tol: f64) -> Vec<Vec4<T>> {
    let eps = if T::is_exact() { 0.0 } else { tol * m.max_abs() };
    let mut a = m.0.clone();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..4 {
        if row == 4 {
            break;
        }
        let (p, best) = (row..4).map(|i| (i, a[i][col].to_float().abs())).fold((row, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if a[p][col].is_zero_within(eps) || best <= eps {
            for r in a.iter_mut().skip(row) {
                r[col] = T::zero();
            }
            continue;
        }
        a.swap(row, p);
        let pv = a[row][col].clone();
        for k in 0..4 {
            a[row][k] = a[row][k].clone() / pv.clone();
        }
        for i in 0..4 {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for k in 0..4 {
                    a[i][k] = a[i][k].clone() - f.clone() * a[row][k].clone();
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (0..4)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v: Vec4<T> = std::array::from_fn(|_| T::zero());
            v[free] = T::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][free].clone();
            }
            v
        })
        .collect()
}

fn norm2<T: Scalar>(v: &Vec4<T>) -> f64 {
    v.iter().map(|x| x.to_float().powi(2)).sum::<f64>().sqrt()
}

fn from_columns<T: Scalar>(cols: [&Vec4<T>; 4]) -> Mat4<T> {
    Mat4::from_fn(|i, j| cols[j][i].clone())
}

/// Normal form of a two-dimensional abelian algebra spanned by `alpha`, `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraNormalization<T> {
    /// `C` with `C x C⁻¹` in the target family for every `x` in the span.
    pub conjugator: Mat4<T>,
    /// `+1`: 𝔏′; `−1`: 𝔏′₋.
    pub sign: i8,
    pub images: [Mat4<T>; 2],
    /// `(a, b)` parameters of the images of `alpha` and `beta`.
    pub params: [(T, T); 2],
    pub profiles: [Option<MinPolyProfile>; 2],
    pub residual: f64,
    /// Coefficients `(i, j)` of the `n = 3` element `iα + jβ` used for the Jordan basis.
    pub generic: (i64, i64),
}

impl<T: Scalar> AlgebraNormalization<T> {
    pub fn family(&self) -> Family<T> {
        if self.sign > 0 {
            Family::LPrime
        } else {
            Family::LPrimeMinus
        }
    }
}

fn combos() -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for r in 1..=SEARCH_RADIUS {
        for i in -r..=r {
            for j in -r..=r {
                if i.abs().max(j.abs()) == r && (i > 0 || (i == 0 && j > 0)) {
                    out.push((i, j));
                }
            }
        }
    }
    out.sort_by_key(|&(i, j)| (i.abs().max(j.abs()), i.abs() + j.abs()));
    out
}

/// Conjugates the span of commuting `alpha`, `beta` to 𝔏′ or 𝔏′₋.
///
/// Picks `γ = iα + jβ` with `n(γ) = 3`, builds the basis `(γ²v, e₂, γv, v)` with
/// `v ∈ ker γ³`, `γ²v ≠ 0` and `γe₂ = f(γ)e₂`, so that `γ` takes the form with `(1,3) =
/// (3,4) = 1`, `(2,2) = f`. The second generator then has `(1,4) = c₁a + c₂b` in the
/// coordinates `a = (2,2)`, `b = (1,3)`, and the diagonal-plus-shear conjugation
/// `diag(|c₁|, 1, √|c₁|, 1)` with `(3,4) = −c₂` brings `(1,4)` to `∓a`. Generators already
/// in normal form keep the identity conjugator.
pub fn normalize_algebra<T: Scalar>(alpha: &Mat4<T>, beta: &Mat4<T>, tol: f64) -> Result<AlgebraNormalization<T>, CuspError> {
    let scale = alpha.max_abs().max(beta.max_abs());
    let comm = alpha.commutator(beta);
    if !comm.is_zero_within(tol * scale * scale) {
        return Err(CuspError::HypothesesViolated(format!("generators do not commute (residual {:.3e})", comm.max_abs())));
    }
    if !independent(alpha, beta, tol) {
        return Err(CuspError::HypothesesViolated("generators span less than two dimensions".into()));
    }
    let mut chosen = None;
    for (i, j) in combos() {
        let g = &alpha.scale(&T::from_int(i)) + &beta.scale(&T::from_int(j));
        match minpoly_profile(&g, tol) {
            Ok(p) if p.n == 3 && !p.kernel_flag => {
                chosen = Some((i, j, g, p));
                break;
            }
            Ok(_) | Err(CuspError::ZeroElement) => {}
            Err(CuspError::WrongShape(s)) => return Err(CuspError::WrongShape(s)),
            Err(e) => return Err(e),
        }
    }
    let (i, j, gamma, _) = chosen.ok_or(CuspError::NoGenericElement(SEARCH_RADIUS))?;
    let (mut p, sign) = match already_normal(alpha, beta, tol * scale) {
        Some(sign) => (Mat4::<T>::identity(), sign),
        None => jordan_conjugator(alpha, beta, &gamma, j, tol)?,
    };
    let family = if sign > 0 { Family::LPrime } else { Family::LPrimeMinus };
    let zero = T::zero();
    let mut conj = p.inverse()?;
    let image = |c: &Mat4<T>, p: &Mat4<T>, x: &Mat4<T>| &(c * x) * p;
    let first_b = image(&conj, &p, alpha)[(0, 2)].clone();
    let second_b = image(&conj, &p, beta)[(0, 2)].clone();
    let lead = if !first_b.is_zero_within(tol * scale) { first_b } else { second_b };
    if lead < zero {
        let mut flip = Mat4::<T>::identity();
        flip[(2, 2)] = -T::one();
        p = &p * &flip;
        conj = p.inverse()?;
    }
    let images = [image(&conj, &p, alpha), image(&conj, &p, beta)];
    let (a0, b0, r0) = fit_params(&family, &images[0])?;
    let (a1, b1, r1) = fit_params(&family, &images[1])?;
    let residual = r0.max(r1);
    if T::is_exact() && residual != 0.0 {
        return Err(CuspError::NotInFamily { family: family.name(), residual });
    }
    let profiles = [minpoly_profile(&images[0], tol).ok(), minpoly_profile(&images[1], tol).ok()];
    Ok(AlgebraNormalization { conjugator: conj, sign, images, params: [(a0, b0), (a1, b1)], profiles, residual, generic: (i, j) })
}

/// `P` with `P⁻¹ x P` in 𝔏′ (`sign = +1`) or 𝔏′₋ (`sign = −1`) for `x` in the span.
fn jordan_conjugator<T: Scalar>(
    alpha: &Mat4<T>,
    beta: &Mat4<T>,
    gamma: &Mat4<T>,
    j: i64,
    tol: f64,
) -> Result<(Mat4<T>, i8), CuspError> {
    // The nonzero eigenvalue is simple and the rest vanish, so it equals the trace.
    let f = gamma.trace();
    let other = if j != 0 { alpha } else { beta };

    let g2 = gamma * gamma;
    let g3 = &g2 * gamma;
    let k3 = kernel(&g3, tol);
    if k3.len() != 3 {
        return Err(CuspError::WrongShape(format!("generalized 0-eigenspace has dimension {}", k3.len())));
    }
    let v = k3
        .iter()
        .map(|v| (g2.mul_vec(v), v))
        .max_by(|a, b| (norm2(&a.0) / norm2(a.1)).total_cmp(&(norm2(&b.0) / norm2(b.1))))
        .map(|(_, v)| v.clone())
        .expect("three kernel vectors");
    let shifted = gamma - &Mat4::identity().scale(&f);
    let k2 = kernel(&shifted, tol);
    if k2.len() != 1 {
        return Err(CuspError::WrongShape(format!("eigenspace of f has dimension {}", k2.len())));
    }
    let e1 = g2.mul_vec(&v);
    let e3 = gamma.mul_vec(&v);
    let q = from_columns([&e1, &k2[0], &e3, &v]);
    let qinv = q.inverse().map_err(|_| CuspError::WrongShape("Jordan basis is singular".into()))?;
    let b = &(&qinv * other) * &q;
    check_commutant_form(&b, tol)?;

    let zero = T::zero();
    let denom = b[(1, 1)].clone() - f.clone() * b[(0, 2)].clone();
    let bscale = b.max_abs().max(1.0);
    if denom.is_zero_within(tol * bscale) {
        return Err(CuspError::HypothesesViolated("the span contains a nonzero element with n < 2".into()));
    }
    let c1 = b[(0, 3)].clone() / denom;
    if c1.is_zero_within(tol) {
        return Err(CuspError::HypothesesViolated("c₁ = 0: some element has minimal polynomial not divisible by t²".into()));
    }
    let c2 = -(c1.clone() * f.clone());
    let abs_c1 = c1.abs();
    let root = abs_c1.sqrt_checked().ok_or_else(|| CuspError::NotRationallyNormalizable(format!("{abs_c1}")))?;
    let mut d = Mat4::<T>::identity();
    d[(0, 0)] = abs_c1;
    d[(2, 2)] = root;
    d[(2, 3)] = -c2;
    let sign: i8 = if c1 < zero { 1 } else { -1 };
    Ok((&q * &d, sign))
}

/// The sign of the family already containing both generators, if any.
fn already_normal<T: Scalar>(alpha: &Mat4<T>, beta: &Mat4<T>, eps: f64) -> Option<i8> {
    for (family, sign) in [(Family::LPrime, 1), (Family::LPrimeMinus, -1)] {
        let fits = [alpha, beta].iter().all(|x| matches!(fit_params(&family, x), Ok((_, _, r)) if r <= eps));
        if fits {
            return Some(sign);
        }
    }
    None
}

fn independent<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>, tol: f64) -> bool {
    let fa: Vec<f64> = a.0.iter().flatten().map(|x| x.to_float()).collect();
    let fb: Vec<f64> = b.0.iter().flatten().map(|x| x.to_float()).collect();
    if T::is_exact() {
        let ea: Vec<&T> = a.0.iter().flatten().collect();
        let eb: Vec<&T> = b.0.iter().flatten().collect();
        return (0..16)
            .any(|i| (i + 1..16).any(|j| (ea[i].clone() * eb[j].clone() - ea[j].clone() * eb[i].clone()) != T::zero()));
    }
    let na = fa.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = fb.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut best: f64 = 0.0;
    for i in 0..16 {
        for j in i + 1..16 {
            best = best.max((fa[i] * fb[j] - fa[j] * fb[i]).abs());
        }
    }
    best > tol * na * nb
}

/// The commutant of the Jordan form of `γ` inside an algebra with the minimal-polynomial
/// hypotheses: only `(1,3) = (3,4)`, `(1,4)` and `(2,2)` may be nonzero.
fn check_commutant_form<T: Scalar>(b: &Mat4<T>, tol: f64) -> Result<(), CuspError> {
    let eps = tol * b.max_abs().max(1.0);
    let zeros = [(0, 0), (0, 1), (1, 0), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (3, 2), (3, 3)];
    for (i, j) in zeros {
        if !b[(i, j)].is_zero_within(eps) {
            return Err(CuspError::HypothesesViolated(format!(
                "second generator has entry ({}, {}) = {} in the Jordan basis",
                i + 1,
                j + 1,
                b[(i, j)]
            )));
        }
    }
    let d = b[(0, 2)].clone() - b[(2, 3)].clone();
    if !d.is_zero_within(eps) {
        return Err(CuspError::HypothesesViolated("second generator has b₁₃ ≠ b₃₄".into()));
    }
    Ok(())
}

/// Logarithm of the representative of `[g]` whose repeated eigenvalue is 1.
pub fn log_projective(g: &Mat4<f64>) -> Result<Mat4<f64>, CuspError> {
    Ok(mat_log(&unit_representative(g)?)?)
}

/// `g / λ` where `λ` is the eigenvalue of largest multiplicity (which must be ≥ 2).
fn unit_representative(g: &Mat4<f64>) -> Result<Mat4<f64>, CuspError> {
    ProjMap::new(g.clone())?;
    let spec = real_spectrum(g).map_err(|e| match e {
        LinAlgError::NonRealSpectrum(s) => CuspError::HypothesesViolated(format!("complex spectrum: {s}")),
        other => other.into(),
    })?;
    let top = spec.iter().max_by_key(|e| e.multiplicity).expect("nonempty spectrum");
    if top.multiplicity < 2 {
        return Err(CuspError::WrongShape("no repeated eigenvalue".into()));
    }
    let lambda = top.value;
    for e in &spec {
        if e.value / lambda <= 0.0 {
            return Err(CuspError::HypothesesViolated("eigenvalues of mixed sign".into()));
        }
    }
    Ok(g.scale(&(1.0 / lambda)))
}

/// Group-level normalization of a commuting pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairNormalization {
    pub conjugator: Mat4<f64>,
    pub sign: i8,
    /// `C A C⁻¹`, `C B C⁻¹` scaled so the repeated eigenvalue is 1.
    pub generators: [Mat4<f64>; 2],
    pub params: [(f64, f64); 2],
    /// Largest entry of `C X C⁻¹ − exp(fitted element)` over both generators.
    pub residual: f64,
    pub algebra: AlgebraNormalization<f64>,
}

/// Conjugates `⟨A, B⟩` into `exp(𝔏′)` (`sign = +1`) or `exp(𝔏′₋)` (`sign = −1`).
pub fn normalize_pair(a: &Mat4<f64>, b: &Mat4<f64>) -> Result<PairNormalization, CuspError> {
    let a1 = unit_representative(a)?;
    let b1 = unit_representative(b)?;
    let comm = (&(&a1 * &b1) - &(&b1 * &a1)).max_abs();
    if comm > 1e-9 * a1.max_abs() * b1.max_abs() {
        return Err(CuspError::HypothesesViolated(format!("generators do not commute projectively (residual {comm:.3e})")));
    }
    let alpha = mat_log(&a1)?;
    let beta = mat_log(&b1)?;
    let alg = normalize_algebra(&alpha, &beta, FLOAT_TOL)?;
    let c = alg.conjugator.clone();
    let cinv = c.inverse()?;
    let generators = [&(&c * &a1) * &cinv, &(&c * &b1) * &cinv];
    let family = alg.family();
    let mut residual: f64 = 0.0;
    for (g, (u, v)) in generators.iter().zip(alg.params.iter()) {
        let fitted = group_exp(&LieAlgElem { family: family.clone(), u: *u, v: *v })?;
        residual = residual.max(g.max_diff(fitted.matrix()) / g.max_abs().max(1.0));
    }
    Ok(PairNormalization { conjugator: c, sign: alg.sign, generators, params: alg.params, residual, algebra: alg })
}
