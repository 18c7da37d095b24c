use std::fmt;

use num_complex::Complex64;

use super::matrix::Mat4;
use super::scalar::Scalar;

/// Univariate polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![T::one()] }
    }

    /// The monomial `t`.
    pub fn x() -> Self {
        Polynomial::new(vec![T::zero(), T::one()])
    }

    /// `t − r`.
    pub fn linear_root(r: T) -> Self {
        Polynomial::new(vec![-r, T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let l = l.clone();
                Polynomial::new(self.coeffs.iter().map(|c| c.clone() / l.clone()).collect())
            }
        }
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn eval_matrix(&self, m: &Mat4<T>) -> Mat4<T> {
        let mut acc = Mat4::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * m) + &Mat4::identity().scale(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * T::from_int(k as i64)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(T::zero);
        Polynomial::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, k: &T) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dl = d.leading().expect("division by zero polynomial").clone();
        let dd = d.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![T::zero(); rem.len() - dd];
        for k in (0..q.len()).rev() {
            let c = rem[k + dd].clone() / dl.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
            }
            q[k] = c;
        }
        rem.truncate(dd);
        (Polynomial::new(q), Polynomial::new(rem))
    }

    /// Monic gcd by the Euclidean algorithm (meaningful in the exact regime).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns (g, s, u) with s·self + u·other = g = gcd (monic).
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut u0, mut u1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let u2 = u0.sub(&q.mul(&u1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            u0 = u1;
            u1 = u2;
        }
        let l = r0.leading().cloned().unwrap_or_else(T::one);
        let inv = T::one() / l;
        (r0.scale(&inv), s0.scale(&inv), u0.scale(&inv))
    }

    /// Square-free factorization (Yun): `self = c · Π_i f_i^i` with pairwise coprime
    /// monic square-free `f_i`. Returned as `(i, f_i)` for nonconstant factors.
    /// Requires exact arithmetic.
    pub fn square_free(&self) -> Vec<(usize, Self)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        let mut b = f.div_rem(&a).0;
        let mut c = fp.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((i, a.monic()));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        Polynomial::new(self.coeffs.iter().map(|c| c.to_float()).collect())
    }
}

impl Polynomial<f64> {
    /// All complex roots by the Aberth–Ehrlich iteration.
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let p = self.monic();
        let n = match p.degree() {
            Some(d) if d > 0 => d,
            _ => return vec![],
        };
        let c: Vec<Complex64> = p.coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let dc: Vec<Complex64> = (1..=n).map(|k| c[k] * k as f64).collect();
        let eval = |cs: &[Complex64], z: Complex64| cs.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &b| a * z + b);
        let radius = 1.0 + p.coeffs[..n].iter().map(|x| x.abs()).fold(0.0, f64::max);
        let mut z: Vec<Complex64> =
            (0..n).map(|k| Complex64::from_polar(0.5 * radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let pv = eval(&c, z[i]);
                if pv.norm() == 0.0 {
                    continue;
                }
                let ratio = pv / eval(&dc, z[i]);
                let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if w.re.is_finite() && w.im.is_finite() {
                    z[i] -= w;
                    moved = moved.max(w.norm() / z[i].norm().max(1.0));
                }
            }
            if moved < 1e-16 {
                break;
            }
        }
        z
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = mag.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}*t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{mag}*t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Characteristic polynomial `det(tI − M)` by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial<T: Scalar>(m: &Mat4<T>) -> Polynomial<T> {
    // c_4 = 1; M_k = M M_{k-1} + c_{n-k+1} I; c_{n-k} = -tr(M M_k)/k
    let mut coeffs = vec![T::zero(); 5];
    coeffs[4] = T::one();
    let mut mk = Mat4::<T>::zero();
    for k in 1..=4 {
        let prev = coeffs[5 - k].clone();
        mk = &(m * &mk) + &Mat4::identity().scale(&prev);
        let tr = (m * &mk).trace();
        coeffs[4 - k] = -tr / T::from_int(k as i64);
    }
    Polynomial::new(coeffs)
}
