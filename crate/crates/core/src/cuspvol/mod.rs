//! Cusp fundamental domains `𝓓_k` in `DPrime`: closed-form directional norms, the
//! `x₁^{3/2}` unit-ball lower bound, truncated Busemann volumes and horoball displacement
//! profiles of a translation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cusplie::{group_exp, CuspError, LieAlgElem};
use crate::domains::{affine_apply, f_prime, polyline_svg, ConvexDomain, DomainError, Point3};
use crate::hilbert::{
    busemann_volume_table, hilbert_distance, unit_ball_lebesgue, DensityModel, HilbertError, HorosphereDensity, QuadratureSpec,
    Region, VerticalSampling,
};
use crate::projlin::{LinAlgError, Mat4};

/// Level `κ′` of the ambient horoball `B′` used for displacement profiles.
pub const AMBIENT_LEVEL: f64 = 0.5;
/// Largest admissible spread of the displacement along one horosphere.
pub const HOROSPHERE_SPREAD_TOL: f64 = 1e-6;
/// Relative tolerance for recognizing an `L′` group element.
const LPRIME_TOL: f64 = 1e-9;
/// Largest power of ten tried when searching for the threshold `N`.
const MAX_THRESHOLD_EXP: i32 = 12;
/// Grid size per side of `R` for the threshold search.
const THRESHOLD_GRID: usize = 9;
/// Tabulation density (points per decade of `κ`) for the horosphere density model.
const DENSITY_PER_DECADE: usize = 16;
/// Top of the tabulated `κ` range; beyond it the density is a power-law continuation.
const DENSITY_KAPPA_MAX: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CuspVolError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Cusp(#[from] CuspError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("x1 = {x1} is not above the threshold N = {threshold}")]
    BelowThreshold { x1: f64, threshold: f64 },
    #[error("no threshold up to 1e{0} satisfies the bound inequalities")]
    NoThreshold(i32),
    #[error("simplex bound {bound} is not below the unit-ball volume {volume}")]
    BoundViolated { bound: f64, volume: f64 },
    #[error("levels must increase strictly and exceed the ambient level {ambient}: {levels:?}")]
    LevelOrder { ambient: f64, levels: Vec<f64> },
    #[error("displacement varies by {spread:.3e} along the horosphere at level {level}")]
    NotConstant { level: f64, spread: f64 },
    #[error("not an L' {kind} (residual {residual:.3e})")]
    NotInLPrime { kind: &'static str, residual: f64 },
}

/// Parameters `(a, b)` of a projective `L′` group element `exp 𝔏′(a, b)`.
pub fn lprime_params(g: &Mat4<f64>) -> Result<(f64, f64), CuspVolError> {
    let w = g[(3, 3)];
    if w == 0.0 || !w.is_finite() {
        return Err(CuspVolError::NotInLPrime { kind: "element", residual: f64::INFINITY });
    }
    let h = g.scale(&(1.0 / w));
    let d = h[(1, 1)];
    if !(d > 0.0) {
        return Err(CuspVolError::NotInLPrime { kind: "element", residual: f64::INFINITY });
    }
    let (a, b) = (d.ln(), h[(2, 3)]);
    let fitted = group_exp(&LieAlgElem::lprime(a, b))?;
    let residual = h.max_diff(fitted.matrix());
    if residual > LPRIME_TOL * h.max_abs() {
        return Err(CuspVolError::NotInLPrime { kind: "element", residual });
    }
    Ok((a, b))
}

/// `𝓓_k = {(x₁, x₂, x₃) : (x₂, x₃) ∈ R, x₁ > F(x₂, x₃) + k}` with
/// `R = [1, e^{a_L}] × [0, b_T]`, optionally truncated at `x₁ ≤ cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspFundamentalDomain {
    pub k: f64,
    pub a_l: f64,
    pub b_t: f64,
    pub cutoff: Option<f64>,
}

impl CuspFundamentalDomain {
    pub fn new(k: f64, a_l: f64, b_t: f64, cutoff: Option<f64>) -> Result<Self, CuspVolError> {
        let fd = CuspFundamentalDomain { k, a_l, b_t, cutoff };
        fd.validate()?;
        Ok(fd)
    }

    /// The domain for the normalized figure-eight peripheral lattice at `s`:
    /// `a_L = |s|`, `b_T = √(s sinh(s/4)/3)`.
    pub fn fig8(s: f64, k: f64, cutoff: Option<f64>) -> Result<Self, CuspVolError> {
        if !s.is_finite() || s == 0.0 {
            return Err(CuspVolError::InvalidParameter(format!("s = {s} gives no lattice in L'")));
        }
        Self::new(k, s.abs(), (s * (s / 4.0).sinh() / 3.0).sqrt(), cutoff)
    }

    /// The domain for a lattice generated by an `L′` pure translation and pure dilation.
    pub fn from_generators(
        k: f64,
        translation: &Mat4<f64>,
        dilation: &Mat4<f64>,
        cutoff: Option<f64>,
    ) -> Result<Self, CuspVolError> {
        let (at, bt) = lprime_params(translation)?;
        let (ad, bd) = lprime_params(dilation)?;
        if at.abs() > LPRIME_TOL * bt.abs().max(1.0) {
            return Err(CuspVolError::NotInLPrime { kind: "pure translation", residual: at.abs() });
        }
        if bd.abs() > LPRIME_TOL * ad.abs().max(1.0) {
            return Err(CuspVolError::NotInLPrime { kind: "pure dilation", residual: bd.abs() });
        }
        Self::new(k, ad.abs(), bt.abs(), cutoff)
    }

    pub fn validate(&self) -> Result<(), CuspVolError> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(CuspVolError::InvalidParameter(format!("horoball floor k = {} must be > 0", self.k)));
        }
        if !(self.a_l >= 0.0 && self.a_l.is_finite() && self.b_t >= 0.0 && self.b_t.is_finite()) {
            return Err(CuspVolError::InvalidParameter(format!("bad rectangle parameters a = {}, b = {}", self.a_l, self.b_t)));
        }
        if self.cutoff.is_some_and(|x| x.is_nan()) {
            return Err(CuspVolError::InvalidParameter("cutoff is NaN".into()));
        }
        Ok(())
    }

    /// `(x₂ range, x₃ range)` of `R`.
    pub fn rectangle(&self) -> ((f64, f64), (f64, f64)) {
        ((1.0, self.a_l.exp()), (0.0, self.b_t))
    }

    /// `𝓓_k` (with its cutoff) as an integration region.
    pub fn region(&self) -> Region {
        let (x2, x3) = self.rectangle();
        let r = Region::horoball_piece(ConvexDomain::DPrime, x2, x3, self.k);
        match self.cutoff {
            Some(x) => r.with_cutoff(x),
            None => r,
        }
    }

    /// Membership in `𝓓_k`, rectangle edges included, cutoff ignored.
    pub fn contains(&self, x: &Point3) -> bool {
        let ((a2, b2), (a3, b3)) = self.rectangle();
        (a2..=b2).contains(&x[1]) && (a3..=b3).contains(&x[2]) && x[0] > f_prime(x[1], x[2]) + self.k
    }
}

/// Finsler norms of the coordinate directions at `x` with the chord endpoints
/// `k₁` (along `e₂`), `k₂` (along `e₁`) and `±k₃` (along `e₃`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionNorms {
    pub e2: f64,
    pub e1: f64,
    pub e3: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

/// Closed-form norms `1/(x₂−k₁)`, `1/(x₁−k₂)`, `2k₃/(k₃²−x₃²)` at an interior point of `DPrime`.
pub fn direction_norms(x: &Point3) -> Result<DirectionNorms, CuspVolError> {
    if !ConvexDomain::DPrime.contains(x) {
        return Err(DomainError::NotInterior([x[0], x[1], x[2]]).into());
    }
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    let k1 = (0.5 * x3 * x3 - x1).exp();
    let k2 = 0.5 * x3 * x3 - x2.ln();
    let k3 = (2.0 * (x1 + x2.ln())).sqrt();
    Ok(DirectionNorms { e2: 1.0 / (x2 - k1), e1: 1.0 / (x1 - k2), e3: 2.0 * k3 / (k3 * k3 - x3 * x3), k1, k2, k3 })
}

/// Whether the three unit-ball inequalities of the simplex construction hold at `x`:
/// `T = x₂ − k₁ > 0`, `x₁/(2(x₁−k₂)) < 1` and `(√x₁/(3√2))·2k₃/(k₃²−x₃²) < 1`.
fn simplex_inequalities(x: &Point3) -> bool {
    let Ok(n) = direction_norms(x) else {
        return false;
    };
    let x1 = x[0];
    n.k1 < x[1] && x1 > n.k2 && x1 / (2.0 * (x1 - n.k2)) < 1.0 && x1.sqrt() / (3.0 * 2f64.sqrt()) * n.e3 < 1.0
}

/// Least `N = 10^p` (`p ≥ 0`) such that every grid point of `R` lifted to
/// `x₁ ∈ {N, 10N, 100N, 1000N}` lies in `𝓓_k` and satisfies the simplex inequalities.
pub fn bound_threshold(fd: &CuspFundamentalDomain) -> Result<f64, CuspVolError> {
    fd.validate()?;
    let ((a2, b2), (a3, b3)) = fd.rectangle();
    let g = THRESHOLD_GRID;
    let lerp = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (g - 1) as f64;
    let grid: Vec<(f64, f64)> =
        (0..g).flat_map(|i| (0..g).map(move |j| (i, j))).map(|(i, j)| (lerp(a2, b2, i), lerp(a3, b3, j))).collect();
    for p in 0..=MAX_THRESHOLD_EXP {
        let n = 10f64.powi(p);
        let ok = (0..4).all(|e| {
            let x1 = n * 10f64.powi(e);
            grid.iter().all(|&(x2, x3)| {
                let x = Point3::new(x1, x2, x3);
                fd.contains(&x) && simplex_inequalities(&x)
            })
        });
        if ok {
            return Ok(n);
        }
    }
    Err(CuspVolError::NoThreshold(MAX_THRESHOLD_EXP))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub x1: f64,
    /// `μ_L(B_x(1))` by sphere quadrature.
    pub volume: f64,
    /// `T = x₂ − k₁`, the largest `T` with `‖T e₂‖ < 1` (as a supremum).
    pub t_const: f64,
    /// `C = T/(36√2)`.
    pub c: f64,
    /// `C x₁^{3/2}`, the volume of the simplex spanned by `0`, `T e₂`, `(x₁/2) e₁`, `(√x₁/(3√2)) e₃`.
    pub bound: f64,
    pub margin: f64,
    pub threshold: f64,
}

/// Compares `μ_L(B_x(1))` with the simplex bound `C x₁^{3/2}` at a point of `𝓓_k` above the threshold.
pub fn lower_bound_check(fd: &CuspFundamentalDomain, x: &Point3, q: &QuadratureSpec) -> Result<LowerBound, CuspVolError> {
    let threshold = bound_threshold(fd)?;
    if !fd.contains(x) {
        return Err(CuspVolError::InvalidParameter(format!("{x:?} is not in the fundamental domain")));
    }
    if !(x[0] > threshold) {
        return Err(CuspVolError::BelowThreshold { x1: x[0], threshold });
    }
    let n = direction_norms(x)?;
    let t_const = x[1] - n.k1;
    let c = t_const / (36.0 * 2f64.sqrt());
    let bound = c * x[0].powf(1.5);
    let volume = unit_ball_lebesgue(&ConvexDomain::DPrime, x, q)?;
    if !(bound < volume) {
        return Err(CuspVolError::BoundViolated { bound, volume });
    }
    Ok(LowerBound { x1: x[0], volume, t_const, c, bound, margin: volume - bound, threshold })
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// One row of a cusp volume table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspVolumeRow {
    #[serde(rename = "X")]
    pub cutoff: f64,
    pub estimate: f64,
    pub stderr: f64,
    /// `(V(Xᵢ) − V(Xᵢ₋₁))/(V(Xᵢ₋₁) − V(Xᵢ₋₂))`, from the third row on.
    pub increment_ratio: Option<f64>,
}

/// Tail-bound check at one cutoff: `V(∞) − V(X) < 3·I(X)/(1 − 2^{−1/2})` with `I(X) = V(2X) − V(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCheck {
    pub cutoff: f64,
    pub tail: f64,
    pub first_increment: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspVolumeTable {
    pub domain: CuspFundamentalDomain,
    pub rows: Vec<CuspVolumeRow>,
    /// The untruncated estimate and its standard error.
    pub total: (f64, f64),
    pub tail_checks: Vec<TailCheck>,
    pub samples: usize,
    pub seed: u64,
}

impl CuspVolumeTable {
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].estimate >= w[0].estimate)
    }
}

/// Horosphere density model covering `κ ≥ k`.
pub fn density_model(k: f64, q: &QuadratureSpec) -> Result<HorosphereDensity, CuspVolError> {
    Ok(HorosphereDensity::new(q, 0.5 * k, DENSITY_KAPPA_MAX.max(1e3 * k), DENSITY_PER_DECADE)?)
}

/// Busemann volume of `𝓓_k ∩ {x₁ ≤ X}` for each `X`, all from one sample set.
pub fn cusp_volume_table(
    fd: &CuspFundamentalDomain,
    cutoffs: &[f64],
    q: &QuadratureSpec,
) -> Result<CuspVolumeTable, CuspVolError> {
    fd.validate()?;
    q.validate()?;
    if cutoffs.is_empty() || cutoffs.iter().any(|c| !c.is_finite()) || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CuspVolError::InvalidParameter(format!("cutoffs must be finite and strictly increasing: {cutoffs:?}")));
    }
    let region = CuspFundamentalDomain { cutoff: None, ..fd.clone() }.region();
    let mut all: Vec<f64> = cutoffs.iter().flat_map(|&c| [c, 2.0 * c]).chain([f64::INFINITY]).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    let vols: Vec<(f64, f64)> = if region.base_area() == 0.0 {
        vec![(0.0, 0.0); all.len()]
    } else {
        let model = density_model(fd.k, q)?;
        busemann_volume_table(&region, &all, q, &model, VerticalSampling::PowerTail { scale: 1.0 })?
            .iter()
            .map(|r| (r.estimate, r.stderr))
            .collect()
    };
    let at = |x: f64| vols[all.iter().position(|&c| c == x).expect("cutoff in table")];
    let total = vols[vols.len() - 1];
    let mut rows: Vec<CuspVolumeRow> = Vec::with_capacity(cutoffs.len());
    for (i, &c) in cutoffs.iter().enumerate() {
        let (estimate, stderr) = at(c);
        let increment_ratio = (i >= 2).then(|| {
            let (v0, v1) = (rows[i - 2].estimate, rows[i - 1].estimate);
            (estimate - v1) / (v1 - v0)
        });
        rows.push(CuspVolumeRow { cutoff: c, estimate, stderr, increment_ratio });
    }
    let tail_checks = cutoffs
        .iter()
        .map(|&c| {
            let tail = total.0 - at(c).0;
            let first_increment = at(2.0 * c).0 - at(c).0;
            let bound = 3.0 * first_increment / (1.0 - 0.5f64.sqrt());
            TailCheck { cutoff: c, tail, first_increment, bound, holds: tail <= bound }
        })
        .collect();
    Ok(CuspVolumeTable { domain: fd.clone(), rows, total, tail_checks, samples: q.mc_samples, seed: q.seed })
}

/// Density of `DPrime` translated by `−shift·e₁` (the domain `DPrime − shift·e₁`).
struct TranslatedDensity<'a> {
    inner: &'a HorosphereDensity,
    shift: f64,
}

impl DensityModel for TranslatedDensity<'_> {
    fn density(&self, x: &Point3) -> Result<f64, HilbertError> {
        self.inner.density(&(x + Point3::new(self.shift, 0.0, 0.0)))
    }
}

/// Truncated volume of `𝓓_k` measured in `DPrime` and in the larger domain `DPrime − c·e₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeComparison {
    pub enlargement: f64,
    pub in_dprime: (f64, f64),
    pub in_larger: (f64, f64),
}

impl VolumeComparison {
    pub fn holds(&self) -> bool {
        self.in_larger.0 < self.in_dprime.0
    }
}

/// Measures `𝓓_k ∩ {x₁ ≤ X}` in `DPrime` and in `DPrime − c·e₁` from the same samples.
pub fn volume_comparison(
    fd: &CuspFundamentalDomain,
    cutoff: f64,
    c: f64,
    q: &QuadratureSpec,
) -> Result<VolumeComparison, CuspVolError> {
    fd.validate()?;
    if !(c > 0.0 && c.is_finite() && cutoff.is_finite()) {
        return Err(CuspVolError::InvalidParameter(format!("enlargement {c} must be > 0 and cutoff {cutoff} finite")));
    }
    let model = density_model(fd.k, q)?;
    let inner = CuspFundamentalDomain { cutoff: None, ..fd.clone() }.region();
    let larger = Region { domain: ConvexDomain::shifted(ConvexDomain::DPrime, -c)?, floor: Some(fd.k + c), ..inner.clone() };
    let sampling = VerticalSampling::PowerTail { scale: 1.0 };
    let a = busemann_volume_table(&inner, &[cutoff], q, &model, sampling)?[0];
    let shifted = TranslatedDensity { inner: &model, shift: c };
    let b = busemann_volume_table(&larger, &[cutoff], q, &shifted, sampling)?[0];
    Ok(VolumeComparison { enlargement: c, in_dprime: (a.estimate, a.stderr), in_larger: (b.estimate, b.stderr) })
}

/// Outcome of [`tiling_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TilingReport {
    pub samples: usize,
    pub overlaps: usize,
    pub gaps: usize,
}

impl TilingReport {
    pub fn bad_fraction(&self) -> f64 {
        (self.overlaps + self.gaps) as f64 / self.samples as f64
    }
}

/// Counts, at random points of the base neighborhood `[e^{−a/2}, e^{3a/2}] × [−b/2, 3b/2]`,
/// how many images `L^i M^j R` (`|i|, |j| ≤ 2`, half-open `R`) contain the point. The lattice
/// acts on the horosphere of level `k` through the given `L′` matrices.
pub fn tiling_check(
    fd: &CuspFundamentalDomain,
    translation: &Mat4<f64>,
    dilation: &Mat4<f64>,
    samples: usize,
    seed: u64,
) -> Result<TilingReport, CuspVolError> {
    fd.validate()?;
    if fd.a_l == 0.0 || fd.b_t == 0.0 || samples == 0 {
        return Err(CuspVolError::InvalidParameter("tiling needs a nondegenerate rectangle and samples".into()));
    }
    let (a, b) = (fd.a_l, fd.b_t);
    let ((a2, b2), (a3, b3)) = fd.rectangle();
    let power = |g: &Mat4<f64>, e: i32| -> Result<Mat4<f64>, CuspVolError> {
        let base = if e < 0 { g.inverse()? } else { g.clone() };
        Ok(base.pow(e.unsigned_abs()))
    };
    let mut pullbacks = Vec::new();
    for i in -2..=2 {
        for j in -2..=2 {
            let gamma = &power(dilation, i)? * &power(translation, j)?;
            pullbacks.push(gamma.inverse()?);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut overlaps, mut gaps) = (0, 0);
    for _ in 0..samples {
        let (u, v): (f64, f64) = (rng.random(), rng.random());
        let x2 = (a * (2.0 * u - 0.5)).exp();
        let x3 = b * (2.0 * v - 0.5);
        let z = Point3::new(f_prime(x2, x3) + fd.k, x2, x3);
        let hits = pullbacks
            .iter()
            .filter(|g| {
                let w = affine_apply(g, &z);
                (a2..b2).contains(&w[1]) && (a3..b3).contains(&w[2])
            })
            .count();
        match hits {
            0 => gaps += 1,
            1 => {}
            _ => overlaps += 1,
        }
    }
    Ok(TilingReport { samples, overlaps, gaps })
}

/// Hilbert displacement of a translation at successive horoball levels, measured in the
/// ambient horoball `B′ = {x₁ > F + κ′}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplacementProfile {
    pub s: f64,
    pub ambient_level: f64,
    pub translation: f64,
    /// Base point `(x₂, x₃)`; the point at level `κ` is `(F(x₂, x₃) + κ, x₂, x₃)`.
    pub base: (f64, f64),
    pub levels: Vec<f64>,
    pub displacement: Vec<f64>,
    /// Largest minus smallest displacement over the sampled points of each horosphere.
    pub spread: Vec<f64>,
}

impl DisplacementProfile {
    pub fn is_strictly_decreasing(&self) -> bool {
        self.displacement.windows(2).all(|w| w[1] < w[0])
    }
}

/// Base points sampled on each horosphere.
const HOROSPHERE_SAMPLES: [(f64, f64); 8] =
    [(0.3, -1.0), (0.3, 0.8), (1.0, -1.0), (1.0, 0.8), (2.5, -1.0), (2.5, 0.8), (7.0, -1.0), (7.0, 0.8)];

fn ambient() -> Result<ConvexDomain, CuspVolError> {
    Ok(ConvexDomain::shifted(ConvexDomain::DPrime, AMBIENT_LEVEL)?)
}

/// `d_{B′}(z, g z)` for `z` at level `κ` over `(x₂, x₃)`.
pub fn displacement_at(g: &Mat4<f64>, x2: f64, x3: f64, level: f64) -> Result<f64, CuspVolError> {
    if !(level > AMBIENT_LEVEL) {
        return Err(CuspVolError::LevelOrder { ambient: AMBIENT_LEVEL, levels: vec![level] });
    }
    let z = Point3::new(f_prime(x2, x3) + level, x2, x3);
    Ok(hilbert_distance(&ambient()?, &z, &affine_apply(g, &z))?)
}

/// Displacement of an `L′` pure translation at each level, with the horosphere spread.
pub fn displacement_profile(s: f64, meridian: &Mat4<f64>, levels: &[f64]) -> Result<DisplacementProfile, CuspVolError> {
    let (a, b) = lprime_params(meridian)?;
    if a.abs() > LPRIME_TOL * b.abs().max(1.0) || b == 0.0 {
        return Err(CuspVolError::NotInLPrime { kind: "pure translation", residual: a.abs() });
    }
    if levels.is_empty()
        || levels[0] <= AMBIENT_LEVEL
        || levels.windows(2).any(|w| w[1] <= w[0])
        || levels.iter().any(|l| !l.is_finite())
    {
        return Err(CuspVolError::LevelOrder { ambient: AMBIENT_LEVEL, levels: levels.to_vec() });
    }
    let base = (1.0, 0.0);
    let mut displacement = Vec::with_capacity(levels.len());
    let mut spread = Vec::with_capacity(levels.len());
    for &level in levels {
        let d = displacement_at(meridian, base.0, base.1, level)?;
        let (mut lo, mut hi) = (d, d);
        for &(x2, x3) in &HOROSPHERE_SAMPLES {
            let e = displacement_at(meridian, x2, x3, level)?;
            lo = lo.min(e);
            hi = hi.max(e);
        }
        if hi - lo > HOROSPHERE_SPREAD_TOL * hi.max(1.0) {
            return Err(CuspVolError::NotConstant { level, spread: hi - lo });
        }
        displacement.push(d);
        spread.push(hi - lo);
    }
    Ok(DisplacementProfile {
        s,
        ambient_level: AMBIENT_LEVEL,
        translation: b,
        base,
        levels: levels.to_vec(),
        displacement,
        spread,
    })
}

fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

/// CSV with columns `X,estimate,stderr,increment_ratio`.
pub fn volume_csv(table: &CuspVolumeTable) -> String {
    to_csv(&table.rows)
}

#[derive(Serialize)]
struct DisplacementRow {
    level: f64,
    displacement: f64,
}

/// CSV with columns `level,displacement`.
pub fn displacement_csv(p: &DisplacementProfile) -> String {
    to_csv(p.levels.iter().zip(&p.displacement).map(|(&level, &displacement)| DisplacementRow { level, displacement }))
}

pub fn volume_svg(table: &CuspVolumeTable) -> String {
    let pts = table.rows.iter().map(|r| (r.cutoff, r.estimate)).collect();
    let d = &table.domain;
    let title = format!("truncated cusp volume, k = {}, a = {:.4}, b = {:.4}", d.k, d.a_l, d.b_t);
    polyline_svg(&title, "cutoff X", "Busemann volume", &[(pts, "#1f4e9c")])
}

pub fn displacement_svg(p: &DisplacementProfile) -> String {
    let pts = p.levels.iter().zip(&p.displacement).map(|(&l, &d)| (l.log2(), d)).collect();
    let title = format!("translation displacement in the level-{} horoball, s = {:.4}", p.ambient_level, p.s);
    polyline_svg(&title, "log2 level", "Hilbert displacement", &[(pts, "#9c1f1f")])
}

#[cfg(test)]
mod tests;
