use super::matrix::Mat4;
use super::poly::{characteristic_polynomial, Polynomial};
use super::scalar::{Rational, Scalar};
use super::spectrum::real_spectrum;
use super::LinAlgError;

fn one_norm(m: &Mat4<f64>) -> f64 {
    (0..4).map(|j| (0..4).map(|i| m[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// True iff the fourth power is exactly zero.
pub fn is_nilpotent<T: Scalar>(m: &Mat4<T>) -> bool {
    m.pow(4).0.iter().flatten().all(|x| x.is_zero())
}

/// Exact finite exponential series `I + N + N²/2 + N³/6` for nilpotent `N`.
pub fn exp_nilpotent<T: Scalar>(n: &Mat4<T>) -> Option<Mat4<T>> {
    if !is_nilpotent(n) {
        return None;
    }
    let mut out = Mat4::identity();
    let mut term = Mat4::identity();
    for k in 1..4 {
        term = (&term * n).scale(&(T::one() / T::from_int(k)));
        out = &out + &term;
    }
    Some(out)
}

/// Exact finite logarithm series `Σ (−1)^{k+1}(g−I)^k/k` for unipotent `g`.
pub fn log_unipotent<T: Scalar>(g: &Mat4<T>) -> Option<Mat4<T>> {
    let n = g - &Mat4::identity();
    if !is_nilpotent(&n) {
        return None;
    }
    let mut out = Mat4::zero();
    let mut pow = Mat4::identity();
    for k in 1..4i64 {
        pow = &pow * &n;
        let c = T::from_ratio(if k % 2 == 1 { 1 } else { -1 }, k);
        out = &out + &pow.scale(&c);
    }
    Some(out)
}

/// Matrix exponential. Nilpotent input uses the finite series; otherwise scaling and
/// squaring with a Taylor remainder below 1e−17 relative.
pub fn mat_exp(m: &Mat4<f64>) -> Mat4<f64> {
    if let Some(e) = exp_nilpotent(m) {
        return e;
    }
    let norm = one_norm(m);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = m.scale(&(0.5f64).powi(squarings));
    let mut sum = Mat4::identity();
    let mut term = Mat4::identity();
    for k in 1..40 {
        term = (&term * &a).scale(&(1.0 / k as f64));
        sum = &sum + &term;
        if one_norm(&term) <= 1e-17 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Principal square root by the Denman–Beavers iteration.
fn sqrtm(m: &Mat4<f64>) -> Result<Mat4<f64>, LinAlgError> {
    let mut y = m.clone();
    let mut z = Mat4::identity();
    let mut prev = f64::INFINITY;
    for _ in 0..100 {
        let yi = y.inverse()?;
        let zi = z.inverse()?;
        let y_next = (&y + &zi).scale(&0.5);
        let z_next = (&z + &yi).scale(&0.5);
        let delta = one_norm(&(&y_next - &y)) / one_norm(&y_next);
        y = y_next;
        z = z_next;
        // Ill-conditioned input stalls at rounding level instead of reaching 1e−15.
        if delta < 1e-15 || (delta < 1e-11 && delta >= prev) {
            return Ok(y);
        }
        prev = delta;
    }
    Err(LinAlgError::NoConvergence("matrix square root".into()))
}

/// Real logarithm of a matrix with positive real spectrum by inverse scaling and
/// squaring: repeated square roots until ‖g − I‖ < 0.2, then the log(I+X) series.
pub fn mat_log(g: &Mat4<f64>) -> Result<Mat4<f64>, LinAlgError> {
    if let Some(l) = log_unipotent(g) {
        return Ok(l);
    }
    for e in real_spectrum(g)? {
        if e.value <= 0.0 {
            return Err(LinAlgError::NonPositiveSpectrum(e.value));
        }
    }
    let mut a = g.clone();
    let mut roots = 0;
    while one_norm(&(&a - &Mat4::identity())) > 0.2 {
        a = sqrtm(&a)?;
        roots += 1;
        if roots > 60 {
            return Err(LinAlgError::NoConvergence("inverse scaling and squaring".into()));
        }
    }
    let x = &a - &Mat4::identity();
    let mut sum = Mat4::zero();
    let mut pow = Mat4::identity();
    for k in 1..80 {
        pow = &pow * &x;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = pow.scale(&(sign / k as f64));
        sum = &sum + &term;
        if one_norm(&term) <= 1e-18 * one_norm(&sum).max(1e-300) {
            break;
        }
    }
    Ok(sum.scale(&(2f64).powi(roots)))
}

/// Logarithm of a rational matrix with rational positive spectrum, split as
/// `rational + Σ ln(λ_i) P_i` with exact spectral projectors `P_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLog {
    /// The part with rational entries (nilpotent logs of each block).
    pub rational: Mat4<Rational>,
    /// Pairs (λ_i, P_i) contributing `ln(λ_i)·P_i`.
    pub log_terms: Vec<(Rational, Mat4<Rational>)>,
}

impl SpectralLog {
    pub fn to_f64(&self) -> Mat4<f64> {
        self.log_terms.iter().fold(self.rational.to_f64(), |acc, (lambda, p)| &acc + &p.to_f64().scale(&lambda.to_float().ln()))
    }
}

/// Block-diagonal logarithm from exact spectral projectors.
pub fn spectral_log(g: &Mat4<Rational>) -> Result<SpectralLog, LinAlgError> {
    let spectrum = real_spectrum(g)?;
    let mut eig = Vec::new();
    for e in &spectrum {
        let lambda =
            e.exact.clone().ok_or_else(|| LinAlgError::IrrationalSpectrum(format!("eigenvalue {} is not rational", e.value)))?;
        if lambda <= Rational::from_int(0) {
            return Err(LinAlgError::NonPositiveSpectrum(e.value));
        }
        eig.push((lambda, e.multiplicity));
    }
    let cp = characteristic_polynomial(g);
    let mut rational = Mat4::zero();
    let mut log_terms = Vec::new();
    for (lambda, mult) in eig {
        let block = Polynomial::linear_root(lambda.clone()).pow(mult);
        let (cofactor, rem) = cp.div_rem(&block);
        debug_assert!(rem.is_zero());
        // idempotent e ≡ 1 mod block, ≡ 0 mod cofactor
        let (_, s, _) = cofactor.ext_gcd(&block);
        let e = s.mul(&cofactor).div_rem(&cp).1;
        let proj = e.eval_matrix(g);
        let nil = &(g - &Mat4::identity().scale(&lambda)) * &proj;
        let x = nil.scale(&(Rational::from_int(1) / lambda.clone()));
        let mut pow = Mat4::identity();
        for k in 1..mult.max(1) as i64 {
            pow = &pow * &x;
            let c = Rational::from_ratio(if k % 2 == 1 { 1 } else { -1 }, k);
            rational = &rational + &pow.scale(&c);
        }
        if lambda != Rational::from_int(1) {
            log_terms.push((lambda, proj));
        }
    }
    Ok(SpectralLog { rational, log_terms })
}
