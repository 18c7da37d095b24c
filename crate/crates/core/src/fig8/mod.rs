//! The figure-eight holonomy family `ρ_t`: the generators `M_t`, `N_t`, the relation
//! `m w = w n`, the longitude `w w^op`, the coordinate `s = log(1/(16t⁴))`, the normalized
//! peripheral pair in `L_s` and its limit in `L₀`.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cusplie::{
    classify, cusp_shape_params, group_exp, minpoly_profile, normalize_pair, Classification, CuspError, CuspShape, LieAlgElem,
    PairNormalization,
};
use crate::projlin::{format_rational, real_spectrum, Eigen, LinAlgError, Mat4, Rational, Scalar};

/// Below this `|s|` the meridian parameter uses its Taylor series.
const SERIES_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Fig8Error {
    #[error("t = 0 is outside the family")]
    ZeroT,
    #[error("t = {0} must be positive")]
    NonPositiveT(f64),
    #[error("s = 0 is the hyperbolic point; use limit_pair")]
    ZeroS,
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Cusp(#[from] CuspError),
}

/// `(M_t, N_t)`.
pub fn generators<T: Scalar>(t: &T) -> Result<(Mat4<T>, Mat4<T>), Fig8Error> {
    if t.is_zero() {
        return Err(Fig8Error::ZeroT);
    }
    let (o, z) = (T::one(), T::zero());
    let i = |k: i64| T::from_int(k);
    let half = T::from_ratio(1, 2);
    let m = Mat4([
        [o.clone(), z.clone(), o.clone(), t.clone() - o.clone()],
        [z.clone(), o.clone(), o.clone(), t.clone()],
        [z.clone(), z.clone(), o.clone(), t.clone() + half],
        [z.clone(), z.clone(), z.clone(), o.clone()],
    ]);
    let n = Mat4([
        [o.clone(), z.clone(), z.clone(), z.clone()],
        [i(2) + o.clone() / t.clone(), o.clone(), z.clone(), z.clone()],
        [i(2), o.clone(), o.clone(), z.clone()],
        [o.clone(), o.clone(), z.clone(), o],
    ]);
    Ok((m, n))
}

/// `W = N M⁻¹ N⁻¹ M`.
pub fn relation_word<T: Scalar>(m: &Mat4<T>, n: &Mat4<T>) -> Result<Mat4<T>, Fig8Error> {
    let (mi, ni) = (m.inverse()?, n.inverse()?);
    Ok(&(&(n * &mi) * &ni) * m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport<T> {
    /// Projective scaling with `M W ≈ λ W N`.
    pub lambda: T,
    pub residual: Mat4<T>,
    /// Largest residual entry relative to the largest entry of `M W`.
    pub relative: f64,
}

impl<T: Scalar> RelationReport<T> {
    /// Exactly zero residual (always false in the float regime unless every entry cancels).
    pub fn is_exact_zero(&self) -> bool {
        self.residual.0.iter().flatten().all(|x| x.is_zero())
    }
}

/// `M W − λ W N` with `λ` read off the largest entry of `W N`.
pub fn relation_residual<T: Scalar>(t: &T) -> Result<RelationReport<T>, Fig8Error> {
    let (m, n) = generators(t)?;
    let w = relation_word(&m, &n)?;
    let (lhs, rhs) = (&m * &w, &w * &n);
    let (i, j) = rhs.argmax_abs();
    let lambda = lhs[(i, j)].clone() / rhs[(i, j)].clone();
    let residual = &lhs - &rhs.scale(&lambda);
    let relative = residual.max_abs() / lhs.max_abs();
    Ok(RelationReport { lambda, residual, relative })
}

/// `L_t = w w^op = N M⁻¹ N⁻¹ M² N⁻¹ M⁻¹ N` evaluated as a word.
pub fn longitude<T: Scalar>(t: &T) -> Result<Mat4<T>, Fig8Error> {
    let (m, n) = generators(t)?;
    let (mi, ni) = (m.inverse()?, n.inverse()?);
    let word = [&n, &mi, &ni, &m, &m, &ni, &mi, &n];
    Ok(word.iter().skip(1).fold(n.clone(), |acc, x| &acc * *x))
}

/// The longitude as displayed, with the `(1,2)` numerator `8t³ + 4t² + 2x + 1` taking `x`
/// as a separate argument.
pub fn displayed_longitude<T: Scalar>(t: &T, x: &T) -> Result<Mat4<T>, Fig8Error> {
    if t.is_zero() {
        return Err(Fig8Error::ZeroT);
    }
    let i = |k: i64| T::from_int(k);
    let p = |c: &[i64]| c.iter().rev().fold(T::zero(), |acc, &k| acc * t.clone() + i(k));
    let (t2, t3) = (t.clone() * t.clone(), t.clone() * t.clone() * t.clone());
    let d8t2 = i(8) * t2.clone();
    let d8t3 = i(8) * t3.clone();
    let z = T::zero();
    let two_t = i(2) * t.clone();
    Ok(Mat4([
        [
            p(&[-1, -2, -4, 8]) / d8t2.clone(),
            (i(8) * t3 + i(4) * t2.clone() + i(2) * x.clone() + i(1)) / d8t2.clone(),
            p(&[-1, 0, -4]) / (i(4) * t2.clone()),
            p(&[3, 4, 24, 40]) / d8t2,
        ],
        [
            p(&[-1, -1, -2, -4, 8]) / d8t3.clone(),
            p(&[1, 1, 2, 4, 8]) / d8t3.clone(),
            p(&[-1, 1, -4, 4]) / (i(4) * t2 * t.clone()),
            p(&[3, 1, 20, 16, 56]) / d8t3,
        ],
        [z.clone(), z.clone(), two_t.clone(), z.clone()],
        [z.clone(), z.clone(), z, two_t],
    ]))
}

/// Entrywise comparison of the word longitude with the display (with `x` supplied).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplayComparison {
    /// 1-based positions of entries that differ.
    pub mismatches: Vec<(usize, usize)>,
    /// 1-based positions of entries whose displayed form involves `x`.
    pub depends_on_x: Vec<(usize, usize)>,
}

pub fn compare_displayed_longitude(t: &Rational, x: &Rational) -> Result<DisplayComparison, Fig8Error> {
    let word = longitude(t)?;
    let shown = displayed_longitude(t, x)?;
    let other = displayed_longitude(t, &(x + Rational::from_int(1)))?;
    let mut mismatches = Vec::new();
    let mut depends_on_x = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            if word[(i, j)] != shown[(i, j)] {
                mismatches.push((i + 1, j + 1));
            }
            if shown[(i, j)] != other[(i, j)] {
                depends_on_x.push((i + 1, j + 1));
            }
        }
    }
    Ok(DisplayComparison { mismatches, depends_on_x })
}

/// `s = log(1/(16t⁴))`.
pub fn s_of_t(t: f64) -> Result<f64, Fig8Error> {
    if !(t > 0.0) {
        return Err(Fig8Error::NonPositiveT(t));
    }
    Ok(-4.0 * (2.0 * t).ln())
}

/// `t = e^{−s/4}/2`.
pub fn t_of_s(s: f64) -> f64 {
    0.5 * (-s / 4.0).exp()
}

/// `√(sinh(s/4)/(3s))`, the meridian translation parameter in `L_s`; even in `s` with
/// limit `1/(2√3)` at 0.
pub fn meridian_param(s: f64) -> f64 {
    let x = s / 4.0;
    let sinhc = if x.abs() < SERIES_CUTOFF { 1.0 + x * x / 6.0 + x.powi(4) / 120.0 } else { x.sinh() / x };
    (sinhc / 12.0).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeripheralPair {
    pub meridian: Mat4<f64>,
    pub longitude: Mat4<f64>,
    /// Family elements whose exponentials are the two matrices.
    pub meridian_elem: LieAlgElem<f64>,
    pub longitude_elem: LieAlgElem<f64>,
}

/// `(M′_s, L′_s)`: exponentials of `𝔏_s(0, √(sinh(s/4)/(3s)))` and `𝔏_s(1, 0)`.
pub fn normalized_peripheral(s: f64) -> Result<PeripheralPair, Fig8Error> {
    if s == 0.0 {
        return Err(Fig8Error::ZeroS);
    }
    let m = LieAlgElem::lt(s, 0.0, meridian_param(s))?;
    let l = LieAlgElem::lt(s, 1.0, 0.0)?;
    Ok(PeripheralPair {
        meridian: group_exp(&m)?.into_matrix(),
        longitude: group_exp(&l)?.into_matrix(),
        meridian_elem: m,
        longitude_elem: l,
    })
}

/// `(M₀, L₀)`: exponentials of `𝔏₀(0, 1/(2√3))` and `𝔏₀(1, 0)`.
pub fn limit_pair() -> PeripheralPair {
    let m = LieAlgElem::l0(0.0, 1.0 / (2.0 * 3f64.sqrt()));
    let l = LieAlgElem::l0(1.0, 0.0);
    let exp = |e: &LieAlgElem<f64>| group_exp(e).expect("L0 has no parameter restrictions").into_matrix();
    PeripheralPair { meridian: exp(&m), longitude: exp(&l), meridian_elem: m, longitude_elem: l }
}

/// Cusp shape of the limit pair.
pub fn limit_cusp_shape() -> Result<CuspShape, Fig8Error> {
    let p = limit_pair();
    Ok(cusp_shape_params((p.meridian_elem.u, p.meridian_elem.v), (p.longitude_elem.u, p.longitude_elem.v))?)
}

/// Ratio of the two eigenvalues of the scaled longitude, `1/(16t⁴)`; 1 means unipotent.
fn longitude_eigen_ratio(spec: &[Eigen]) -> f64 {
    let top = spec.iter().max_by_key(|e| e.multiplicity).expect("nonempty spectrum");
    spec.iter().map(|e| e.value / top.value).find(|r| *r != 1.0).unwrap_or(1.0)
}

/// True when the longitude at `t_of_s(s)` has two distinct eigenvalues after projective
/// scaling, i.e. the structure cannot be strictly convex.
pub fn strict_convexity_obstruction(s: f64) -> Result<bool, Fig8Error> {
    let spec = real_spectrum(&longitude(&t_of_s(s))?)?;
    Ok(spec.len() > 1)
}

/// The same test at a rational `t` in exact arithmetic.
pub fn strict_convexity_obstruction_exact(t: &Rational) -> Result<bool, Fig8Error> {
    Ok(real_spectrum(&longitude(t)?)?.len() > 1)
}

/// Exact longitude spectrum with multiplicities expanded, ascending.
pub fn longitude_spectrum(t: &Rational) -> Result<Vec<Rational>, Fig8Error> {
    let mut out = Vec::new();
    for e in real_spectrum(&longitude(t)?)? {
        let v = e.exact.ok_or_else(|| LinAlgError::IrrationalSpectrum(format!("{}", e.value)))?;
        out.extend(std::iter::repeat_n(v, e.multiplicity));
    }
    Ok(out)
}

/// `(M_t, L_t/(2t))` conjugated into `L′`/`L′₋`; `generators[0]` is the meridian image.
/// At `t = 1/2` the pair is unipotent and the normalization reports an error.
pub fn normalized_lattice(t: &Rational) -> Result<PairNormalization, Fig8Error> {
    let (m, _) = generators(t)?;
    let l = longitude(t)?.scale(&(Rational::from_int(1) / (Rational::from_int(2) * t.clone())));
    Ok(normalize_pair(&m.to_f64(), &l.to_f64())?)
}

/// Outcome of running the normalization on `(M_t, L_t/(2t))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub t: f64,
    pub s: f64,
    /// `t = 1/2`: every element is unipotent and no 𝔏′ dilation exists.
    pub degenerate: bool,
    pub sign: Option<i8>,
    pub meridian_class: Option<Classification>,
    pub longitude_class: Option<Classification>,
    /// 𝔏′ parameters `(a, b)` of the normalized meridian and longitude.
    pub meridian_params: Option<(f64, f64)>,
    pub longitude_params: Option<(f64, f64)>,
    /// `|a_L − s|`.
    pub dilation_error: Option<f64>,
    /// `μ = |b_M/s|` and `ν = a_L/s`, the translation parameters after conjugating into `L_s`.
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    /// `−iν/μ`.
    pub shape: Option<(f64, f64)>,
    pub group_residual: Option<f64>,
    pub algebra_residual: Option<f64>,
    pub commutator_residual: f64,
}

/// Runs the constructive normalization on the fig-8 peripheral pair.
pub fn normalization_consistency(t: &Rational) -> Result<ConsistencyReport, Fig8Error> {
    let tf = t.to_float();
    let s = s_of_t(tf)?;
    let (m, _) = generators(t)?;
    let l = longitude(t)?.scale(&(Rational::from_int(1) / (Rational::from_int(2) * t.clone())));
    let commutator_residual = (&(&m * &l) - &(&l * &m)).max_abs();
    let mut report = ConsistencyReport {
        t: tf,
        s,
        degenerate: false,
        sign: None,
        meridian_class: None,
        longitude_class: None,
        meridian_params: None,
        longitude_params: None,
        dilation_error: None,
        mu: None,
        nu: None,
        shape: None,
        group_residual: None,
        algebra_residual: None,
        commutator_residual,
    };
    if *t == Rational::from_ratio(1, 2) {
        report.degenerate = true;
        return Ok(report);
    }
    let n = normalized_lattice(t)?;
    let (pm, pl) = (n.params[0], n.params[1]);
    let class = |k: usize| -> Result<Classification, Fig8Error> { Ok(classify(&minpoly_profile(&n.algebra.images[k], 1e-8)?)) };
    let (mu, nu) = ((pm.1 / s).abs(), pl.0 / s);
    let shape = Complex64::new(0.0, -nu / mu);
    report.sign = Some(n.sign);
    report.meridian_class = Some(class(0)?);
    report.longitude_class = Some(class(1)?);
    report.meridian_params = Some(pm);
    report.longitude_params = Some(pl);
    report.dilation_error = Some((pl.0 - s).abs());
    report.mu = Some(mu);
    report.nu = Some(nu);
    report.shape = Some((shape.re, shape.im));
    report.group_residual = Some(n.residual);
    report.algebra_residual = Some(n.algebra.residual);
    Ok(report)
}

/// JSON report for one rational `t`.
pub fn verify_report(t: &Rational) -> Result<Value, Fig8Error> {
    let rel = relation_residual(t)?;
    let spectrum = longitude_spectrum(t)?;
    let obstruction = strict_convexity_obstruction_exact(t)?;
    let (m, n) = generators(t)?;
    let unipotent = |x: &Mat4<Rational>| -> Result<bool, Fig8Error> {
        let s = real_spectrum(x)?;
        Ok(s.len() == 1 && s[0].exact == Some(Rational::from_int(1)))
    };
    let consistency = normalization_consistency(t)?;
    let cmp = compare_displayed_longitude(t, t)?;
    Ok(json!({
        "t": format_rational(t),
        "s": s_of_t(t.to_float())?,
        "relation_exact": rel.is_exact_zero(),
        "relation_lambda": format_rational(&rel.lambda),
        "generators_unipotent": unipotent(&m)? && unipotent(&n)?,
        "longitude_spectrum": spectrum.iter().map(format_rational).collect::<Vec<_>>(),
        "obstruction": obstruction,
        "displayed_longitude_mismatches_with_x_equal_t": cmp.mismatches,
        "normalized_params": consistency,
    }))
}

/// One row of a `t` sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub s: f64,
    /// Eigenvalue ratio `1/(16t⁴)` of the scaled longitude.
    pub eigen_ratio: f64,
    pub sign: Option<i8>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub shape_im: Option<f64>,
    /// `|shape − (−2√3 i)|`.
    pub shape_error: Option<f64>,
    /// Max-norm distance of `(M′_s, L′_s)` to the limit pair.
    pub limit_distance: Option<f64>,
}

/// Sweeps `steps` rational `t` values evenly spaced in `[t_min, t_max]` (approximated with
/// denominators up to 10⁶).
pub fn sweep(t_min: &Rational, t_max: &Rational, steps: usize) -> Result<Vec<SweepRow>, Fig8Error> {
    let target = -2.0 * 3f64.sqrt();
    let limit = limit_pair();
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let frac = if steps > 1 { Rational::from_ratio(k as i64, (steps - 1) as i64) } else { Rational::from_int(0) };
        let t = t_min.clone() + (t_max.clone() - t_min.clone()) * frac;
        if t <= Rational::from_int(0) {
            return Err(Fig8Error::NonPositiveT(t.to_float()));
        }
        let spec = real_spectrum(&longitude(&t)?)?;
        let c = normalization_consistency(&t)?;
        let limit_distance = if c.s != 0.0 {
            let p = normalized_peripheral(c.s)?;
            Some(p.meridian.max_diff(&limit.meridian).max(p.longitude.max_diff(&limit.longitude)))
        } else {
            Some(0.0)
        };
        rows.push(SweepRow {
            t: c.t,
            s: c.s,
            eigen_ratio: longitude_eigen_ratio(&spec),
            sign: c.sign,
            mu: c.mu,
            nu: c.nu,
            shape_im: c.shape.map(|z| z.1),
            shape_error: c.shape.map(|z| (z.1 - target).hypot(z.0)),
            limit_distance,
        });
    }
    Ok(rows)
}
