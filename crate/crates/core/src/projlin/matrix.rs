use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::scalar::{Rational, Scalar};
use super::LinAlgError;

/// Dense 4×4 matrix over a [`Scalar`] field, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat4<T>(pub [[T; 4]; 4]);

pub type Vec4<T> = [T; 4];

impl<T: Scalar> Mat4<T> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| T::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { T::one() } else { T::zero() })
    }

    /// Builds from integer numerator/denominator pairs; handy for literals.
    pub fn from_ratios(rows: [[(i64, i64); 4]; 4]) -> Self {
        Self::from_fn(|i, j| T::from_ratio(rows[i][j].0, rows[i][j].1))
    }

    pub fn from_ints(rows: [[i64; 4]; 4]) -> Self {
        Self::from_fn(|i, j| T::from_int(rows[i][j]))
    }

    pub fn rows(&self) -> &[[T; 4]; 4] {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::from_fn(|i, j| self.0[i][j].clone() * k.clone())
    }

    pub fn trace(&self) -> T {
        (0..4).fold(T::zero(), |acc, i| acc + self.0[i][i].clone())
    }

    pub fn mul_vec(&self, v: &Vec4<T>) -> Vec4<T> {
        std::array::from_fn(|i| (0..4).fold(T::zero(), |acc, k| acc + self.0[i][k].clone() * v[k].clone()))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::identity();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Largest entry magnitude (as a float).
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.to_float().abs()).fold(0.0, f64::max)
    }

    /// Position of the entry of largest magnitude (first in row-major order on ties).
    pub fn argmax_abs(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_val = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                let a = self.0[i][j].abs();
                if a > best_val {
                    best_val = a;
                    best = (i, j);
                }
            }
        }
        best
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.0.iter().flatten().all(|x| x.is_zero_within(tol))
    }

    /// Determinant by fraction-based Gaussian elimination.
    pub fn det(&self) -> T {
        let mut a = self.0.clone();
        let mut det = T::one();
        for col in 0..4 {
            let pivot =
                (col..4).max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap_or(std::cmp::Ordering::Equal));
            let p = match pivot {
                Some(p) if !a[p][col].is_zero() => p,
                _ => return T::zero(),
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pv = a[col][col].clone();
            det = det * pv.clone();
            for r in col + 1..4 {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone() / pv.clone();
                for c in col..4 {
                    let sub = f.clone() * a[col][c].clone();
                    a[r][c] = a[r][c].clone() - sub;
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self, LinAlgError> {
        let mut a = self.0.clone();
        let mut inv = Self::identity().0;
        for col in 0..4 {
            let p = (col..4)
                .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or(col);
            if a[p][col].is_zero() {
                return Err(LinAlgError::Singular);
            }
            a.swap(p, col);
            inv.swap(p, col);
            let pv = a[col][col].clone();
            for c in 0..4 {
                a[col][c] = a[col][c].clone() / pv.clone();
                inv[col][c] = inv[col][c].clone() / pv.clone();
            }
            for r in 0..4 {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in 0..4 {
                    let s1 = f.clone() * a[col][c].clone();
                    a[r][c] = a[r][c].clone() - s1;
                    let s2 = f.clone() * inv[col][c].clone();
                    inv[r][c] = inv[r][c].clone() - s2;
                }
            }
        }
        let out = Mat4(inv);
        if !T::is_exact() && !out.0.iter().flatten().all(|x| x.to_float().is_finite()) {
            return Err(LinAlgError::Singular);
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> Mat4<f64> {
        Mat4::from_fn(|i, j| self.0[i][j].to_float())
    }

    /// Conjugation `c · self · c⁻¹`.
    pub fn conjugate_by(&self, c: &Self) -> Result<Self, LinAlgError> {
        Ok(&(c * self) * &c.inverse()?)
    }
}

impl Mat4<f64> {
    /// Exact rational image of every entry; fails on non-finite entries.
    pub fn to_rational(&self) -> Result<Mat4<Rational>, LinAlgError> {
        let mut out = Mat4::<Rational>::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[i][j].to_rational().ok_or(LinAlgError::NonFinite)?;
            }
        }
        Ok(out)
    }

    /// Maximum absolute entry difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn to_nalgebra(&self) -> nalgebra::Matrix4<f64> {
        nalgebra::Matrix4::from_fn(|i, j| self.0[i][j])
    }

    pub fn from_nalgebra(m: &nalgebra::Matrix4<f64>) -> Self {
        Mat4::from_fn(|i, j| m[(i, j)])
    }
}

impl Mat4<Rational> {
    pub fn from_f64_exact(m: &Mat4<f64>) -> Result<Self, LinAlgError> {
        m.to_rational()
    }
}

impl<T> Index<(usize, usize)> for Mat4<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat4<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Scalar> Mul for &Mat4<T> {
    type Output = Mat4<T>;
    fn mul(self, rhs: &Mat4<T>) -> Mat4<T> {
        Mat4::from_fn(|i, j| (0..4).fold(T::zero(), |acc, k| acc + self.0[i][k].clone() * rhs.0[k][j].clone()))
    }
}

impl<T: Scalar> Add for &Mat4<T> {
    type Output = Mat4<T>;
    fn add(self, rhs: &Mat4<T>) -> Mat4<T> {
        Mat4::from_fn(|i, j| self.0[i][j].clone() + rhs.0[i][j].clone())
    }
}

impl<T: Scalar> Sub for &Mat4<T> {
    type Output = Mat4<T>;
    fn sub(self, rhs: &Mat4<T>) -> Mat4<T> {
        Mat4::from_fn(|i, j| self.0[i][j].clone() - rhs.0[i][j].clone())
    }
}

impl<T: Scalar> Neg for &Mat4<T> {
    type Output = Mat4<T>;
    fn neg(self) -> Mat4<T> {
        Mat4::from_fn(|i, j| -self.0[i][j].clone())
    }
}

impl<T: Scalar> std::fmt::Display for Mat4<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in &self.0 {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// A point of RP³ given by homogeneous coordinates (not all zero).
#[derive(Debug, Clone)]
pub struct ProjPoint<T>(Vec4<T>);

impl<T: Scalar> ProjPoint<T> {
    pub fn new(coords: Vec4<T>) -> Result<Self, LinAlgError> {
        if coords.iter().all(|c| c.is_zero()) {
            return Err(LinAlgError::ZeroVector);
        }
        Ok(ProjPoint(coords))
    }

    /// The point `[x₁:x₂:x₃:1]` of the standard affine chart.
    pub fn affine(x: [T; 3]) -> Self {
        let [a, b, c] = x;
        ProjPoint([a, b, c, T::one()])
    }

    pub fn coords(&self) -> &Vec4<T> {
        &self.0
    }

    /// Representative whose last nonzero coordinate is 1.
    pub fn canonical(&self) -> Vec4<T> {
        let k = (0..4).rev().find(|&i| !self.0[i].is_zero()).unwrap_or(3);
        let d = self.0[k].clone();
        std::array::from_fn(|i| self.0[i].clone() / d.clone())
    }

    /// Affine coordinates, `None` on the hyperplane at infinity.
    pub fn to_affine(&self) -> Option<[T; 3]> {
        let w = self.0[3].clone();
        if w.is_zero() {
            return None;
        }
        Some(std::array::from_fn(|i| self.0[i].clone() / w.clone()))
    }

    /// Projective equality: the 2×2 minors of the pair all vanish (within `tol` when float).
    pub fn same_point(&self, other: &Self, tol: f64) -> bool {
        let a = self.canonical();
        let b = other.canonical();
        let na = a.iter().map(|x| x.to_float().abs()).fold(0.0, f64::max);
        let nb = b.iter().map(|x| x.to_float().abs()).fold(0.0, f64::max);
        (0..4).all(|i| {
            (0..4).all(|j| {
                let m = a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone();
                m.is_zero_within(tol * na * nb)
            })
        })
    }
}

/// Invertible 4×4 matrix acting on RP³; scaling is immaterial.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjMap<T>(Mat4<T>);

impl<T: Scalar> ProjMap<T> {
    pub fn new(m: Mat4<T>) -> Result<Self, LinAlgError> {
        let det = m.det();
        let scale = m.max_abs();
        let singular = if T::is_exact() {
            det.is_zero()
        } else {
            !(det.to_float().abs() > 1e-13 * scale.powi(4)) || !det.to_float().is_finite()
        };
        if singular {
            return Err(LinAlgError::Singular);
        }
        Ok(ProjMap(m))
    }

    pub fn identity() -> Self {
        ProjMap(Mat4::identity())
    }

    pub fn matrix(&self) -> &Mat4<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4<T> {
        self.0
    }

    pub fn apply(&self, p: &ProjPoint<T>) -> ProjPoint<T> {
        ProjPoint(self.0.mul_vec(p.coords()))
    }

    pub fn compose(&self, other: &Self) -> Self {
        ProjMap(&self.0 * &other.0)
    }

    pub fn inverse(&self) -> Self {
        ProjMap(self.0.inverse().expect("ProjMap holds an invertible matrix"))
    }

    /// Representative divided by its entry of largest magnitude.
    pub fn normalized(&self) -> Mat4<T> {
        let (i, j) = self.0.argmax_abs();
        let d = self.0[(i, j)].clone();
        self.0.scale(&(T::one() / d))
    }
}

/// True iff `b = λ a` for some nonzero λ.
///
/// Exact regime: decided exactly. Float regime: λ is the ratio of the entries at the
/// position of `a`'s largest-magnitude entry, and every entry must satisfy
/// `|b − λa| ≤ tol · max|b|`.
pub fn proj_equal<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>, tol: f64) -> Result<bool, LinAlgError> {
    ProjMap::new(a.clone())?;
    ProjMap::new(b.clone())?;
    let (i, j) = a.argmax_abs();
    let lambda = b[(i, j)].clone() / a[(i, j)].clone();
    if lambda.is_zero() {
        return Ok(false);
    }
    let scaled = a.scale(&lambda);
    if T::is_exact() {
        return Ok(scaled == *b);
    }
    let bound = tol * b.max_abs();
    Ok((&scaled - b).max_abs() <= bound)
}

/// Entrywise residual `self − λ other` with λ fitted at the largest entry of `other`.
pub fn projective_residual<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>) -> (T, Mat4<T>) {
    let (i, j) = b.argmax_abs();
    let lambda = if b[(i, j)].is_zero() { T::one() } else { a[(i, j)].clone() / b[(i, j)].clone() };
    let r = a - &b.scale(&lambda);
    (lambda, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Mat4<Rational> {
        Mat4::from_ints([[2, 1, 0, 3], [0, 1, -1, 2], [5, 0, 1, 1], [1, 1, 2, 4]])
    }

    #[test]
    fn inverse_round_trip_exact() {
        let m = sample();
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Mat4::identity());
    }

    #[test]
    fn determinant_matches_cofactor_value() {
        // value from an independent symbolic evaluation
        assert_eq!(sample().det(), Rational::from_int(3));
    }

    #[test]
    fn singular_rejected() {
        let m = Mat4::<Rational>::from_ints([[1, 2, 3, 4], [2, 4, 6, 8], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert!(matches!(m.inverse(), Err(LinAlgError::Singular)));
        assert!(ProjMap::new(m.clone()).is_err());
        assert!(proj_equal(&m, &Mat4::identity(), 1e-12).is_err());
    }

    #[test]
    fn scalar_multiple_is_projectively_equal() {
        let a = sample();
        let b = a.scale(&Rational::from_int(3));
        assert!(proj_equal(&a, &b, 0.0).unwrap());
        let af = a.to_f64();
        let bf = af.scale(&-2.5);
        assert!(proj_equal(&af, &bf, 1e-14).unwrap());
        let mut cf = bf.clone();
        cf[(0, 0)] += 1e-6;
        assert!(!proj_equal(&af, &cf, 1e-12).unwrap());
    }

    #[test]
    fn canonical_representative() {
        let p = ProjPoint::<Rational>::new([
            Rational::from_int(2),
            Rational::from_int(4),
            Rational::from_int(0),
            Rational::from_int(0),
        ])
        .unwrap();
        assert_eq!(p.canonical()[1], Rational::from_int(1));
        assert_eq!(p.canonical()[0], Rational::from_ratio(1, 2));
        assert!(p.to_affine().is_none());
    }
}
