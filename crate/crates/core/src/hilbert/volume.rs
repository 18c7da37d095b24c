use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{busemann_density, HilbertError, QuadratureSpec};
use crate::domains::{f_prime, ConvexDomain, Point3};

/// Samples drawn from one RNG stream; stream index = chunk index.
const CHUNK: usize = 1024;

/// A box-like region over a base rectangle with a vertical window.
///
/// Over `(x₂, x₃)` the region is `max(x1_min, h + floor) < x₁ < min(x1_max, ceiling)`; an
/// absent lower limit means the domain boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub domain: ConvexDomain,
    pub x2: (f64, f64),
    pub x3: (f64, f64),
    pub x1_min: Option<f64>,
    pub x1_max: Option<f64>,
    pub floor: Option<f64>,
}

impl Region {
    /// The horoball piece `{x₁ > h + k}` over the rectangle (the set 𝓓_k for `DPrime`).
    pub fn horoball_piece(domain: ConvexDomain, x2: (f64, f64), x3: (f64, f64), k: f64) -> Self {
        Region { domain, x2, x3, x1_min: None, x1_max: None, floor: Some(k) }
    }

    /// An axis-parallel box.
    pub fn cuboid(domain: ConvexDomain, lo: Point3, hi: Point3) -> Self {
        Region { domain, x2: (lo[1], hi[1]), x3: (lo[2], hi[2]), x1_min: Some(lo[0]), x1_max: Some(hi[0]), floor: None }
    }

    pub fn with_cutoff(mut self, x: f64) -> Self {
        self.x1_max = Some(self.x1_max.map_or(x, |m| m.min(x)));
        self
    }

    pub fn base_area(&self) -> f64 {
        (self.x2.1 - self.x2.0).max(0.0) * (self.x3.1 - self.x3.0).max(0.0)
    }

    pub fn validate(&self) -> Result<(), HilbertError> {
        let finite = [self.x2.0, self.x2.1, self.x3.0, self.x3.1].iter().all(|v| v.is_finite());
        if !finite || self.x2.0 > self.x2.1 || self.x3.0 > self.x3.1 {
            return Err(HilbertError::InvalidSpec(format!("bad base rectangle {:?} × {:?}", self.x2, self.x3)));
        }
        if let Some(k) = self.floor {
            if !(k > 0.0 && k.is_finite()) {
                return Err(HilbertError::InvalidSpec(format!("horoball level {k} must be > 0")));
            }
        }
        if self.base_area() > 0.0 {
            for (a, b) in [(self.x2.0, self.x3.0), (self.x2.0, self.x3.1), (self.x2.1, self.x3.0), (self.x2.1, self.x3.1)] {
                if !self.domain.in_base(a, b) {
                    return Err(HilbertError::RegionOutsideDomain([f64::NAN, a, b]));
                }
            }
        }
        Ok(())
    }

    /// Vertical window over `(x₂, x₃)`, `None` when empty.
    pub fn window(&self, x2: f64, x3: f64) -> Result<Option<(f64, Option<f64>)>, HilbertError> {
        let mut lo = f64::NEG_INFINITY;
        if self.floor.is_some() || self.x1_min.is_none() {
            lo = self.domain.boundary_value(x2, x3)? + self.floor.unwrap_or(0.0);
        }
        if let Some(m) = self.x1_min {
            lo = lo.max(m);
        }
        let hi = match (self.x1_max, self.domain.ceiling(x2, x3)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Ok(match hi {
            Some(h) if h <= lo => None,
            _ => Some((lo, hi)),
        })
    }
}

/// A Busemann density on a domain.
pub trait DensityModel: Sync {
    fn density(&self, x: &Point3) -> Result<f64, HilbertError>;
}

/// Density from the sphere quadrature at every point.
#[derive(Debug, Clone)]
pub struct DirectDensity {
    pub domain: ConvexDomain,
    pub spec: QuadratureSpec,
}

impl DensityModel for DirectDensity {
    fn density(&self, x: &Point3) -> Result<f64, HilbertError> {
        busemann_density(&self.domain, x, &self.spec)
    }
}

/// Density on `DPrime` using its invariance under `L′`.
///
/// `L′` preserves `κ = x₁ − F(x₂, x₃)` and scales Lebesgue measure by the factor applied
/// to `x₂`, so the density is `ρ(κ)/x₂` with `ρ(κ)` the density at `(κ, 1, 0)`. The profile
/// `ρ` is tabulated on a logarithmic grid and interpolated by cubic Hermite splines in
/// `(log κ, log ρ)`; beyond the grid it is continued as a power law.
#[derive(Debug, Clone)]
pub struct HorosphereDensity {
    log_k: Vec<f64>,
    log_rho: Vec<f64>,
}

impl HorosphereDensity {
    pub fn new(spec: &QuadratureSpec, kappa_min: f64, kappa_max: f64, per_decade: usize) -> Result<Self, HilbertError> {
        if !(kappa_min > 0.0 && kappa_max > kappa_min && per_decade >= 2) {
            return Err(HilbertError::InvalidSpec(format!("bad density grid [{kappa_min}, {kappa_max}] / {per_decade}")));
        }
        let (a, b) = (kappa_min.ln(), kappa_max.ln());
        let n = ((b - a) / std::f64::consts::LN_10 * per_decade as f64).ceil() as usize + 1;
        let log_k: Vec<f64> = (0..n.max(4)).map(|i| a + (b - a) * i as f64 / (n.max(4) - 1) as f64).collect();
        let log_rho = log_k
            .par_iter()
            .map(|lk| busemann_density(&ConvexDomain::DPrime, &Point3::new(lk.exp(), 1.0, 0.0), spec).map(f64::ln))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HorosphereDensity { log_k, log_rho })
    }

    pub fn kappa_range(&self) -> (f64, f64) {
        (self.log_k[0].exp(), self.log_k[self.log_k.len() - 1].exp())
    }

    /// Local log-log slope at the top of the table (tail exponent estimate).
    pub fn tail_exponent(&self) -> f64 {
        let n = self.log_k.len();
        (self.log_rho[n - 1] - self.log_rho[n - 2]) / (self.log_k[n - 1] - self.log_k[n - 2])
    }

    /// `ρ(κ)`, the density at `(κ, 1, 0)`.
    pub fn profile(&self, kappa: f64) -> Result<f64, HilbertError> {
        if !(kappa > 0.0) {
            return Err(HilbertError::RegionOutsideDomain([kappa, 1.0, 0.0]));
        }
        let lk = kappa.ln();
        let n = self.log_k.len();
        if lk < self.log_k[0] - 1e-12 {
            return Err(HilbertError::InvalidSpec(format!("κ = {kappa} below the tabulated range")));
        }
        if lk >= self.log_k[n - 1] {
            return Ok((self.log_rho[n - 1] + self.tail_exponent() * (lk - self.log_k[n - 1])).exp());
        }
        let h = self.log_k[1] - self.log_k[0];
        let i = (((lk - self.log_k[0]) / h).floor() as usize).min(n - 2);
        let s = (lk - self.log_k[i]) / h;
        let y = &self.log_rho;
        let slope = |j: usize| {
            if j == 0 {
                y[1] - y[0]
            } else if j == n - 1 {
                y[n - 1] - y[n - 2]
            } else {
                0.5 * (y[j + 1] - y[j - 1])
            }
        };
        let (m0, m1) = (slope(i), slope(i + 1));
        let (s2, s3) = (s * s, s * s * s);
        let v =
            (2.0 * s3 - 3.0 * s2 + 1.0) * y[i] + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y[i + 1] + (s3 - s2) * m1;
        Ok(v.exp())
    }
}

impl DensityModel for HorosphereDensity {
    fn density(&self, x: &Point3) -> Result<f64, HilbertError> {
        if !ConvexDomain::DPrime.contains(x) {
            return Err(HilbertError::RegionOutsideDomain([x[0], x[1], x[2]]));
        }
        Ok(self.profile(x[0] - f_prime(x[1], x[2]))? / x[1])
    }
}

/// Vertical proposal for the Monte Carlo integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum VerticalSampling {
    /// Uniform between the window limits (requires a finite upper limit).
    Uniform,
    /// `κ′ = x₁ − lower` with density `(√c/2)(κ′+c)^{−3/2}`, matching an `x₁^{−3/2}` tail.
    PowerTail { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// One line of a volume table: the integral truncated at `x₁ ≤ cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeRow {
    pub cutoff: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Busemann volume with the direct density and an automatically chosen proposal.
pub fn busemann_volume(region: &Region, q: &QuadratureSpec) -> Result<VolumeEstimate, HilbertError> {
    let model = DirectDensity { domain: region.domain.clone(), spec: q.clone() };
    busemann_volume_with(region, q, &model)
}

/// Busemann volume of `region` against `model`; uniform vertical sampling when the window
/// is bounded, power-tail sampling otherwise.
pub fn busemann_volume_with(
    region: &Region,
    q: &QuadratureSpec,
    model: &dyn DensityModel,
) -> Result<VolumeEstimate, HilbertError> {
    let region = match q.cutoff {
        Some(x) => region.clone().with_cutoff(x),
        None => region.clone(),
    };
    let bounded = region.x1_max.is_some() || region.domain.ceiling(region.x2.0, region.x3.0).is_some();
    let sampling = if bounded { VerticalSampling::Uniform } else { VerticalSampling::PowerTail { scale: 1.0 } };
    let cut = region.x1_max.unwrap_or(f64::INFINITY);
    let row = busemann_volume_table(&region, &[cut], q, model, sampling)?[0];
    Ok(VolumeEstimate { estimate: row.estimate, stderr: row.stderr, samples: row.samples, seed: row.seed })
}

/// Volumes truncated at each cutoff, all from one common sample set, so the estimates are
/// nondecreasing in the cutoff.
pub fn busemann_volume_table(
    region: &Region,
    cutoffs: &[f64],
    q: &QuadratureSpec,
    model: &dyn DensityModel,
    sampling: VerticalSampling,
) -> Result<Vec<VolumeRow>, HilbertError> {
    q.validate()?;
    region.validate()?;
    if cutoffs.iter().any(|c| c.is_nan()) {
        return Err(HilbertError::InvalidSpec("cutoff is NaN".into()));
    }
    let n = q.mc_samples;
    let row = |estimate, stderr, cutoff| VolumeRow { cutoff, estimate, stderr, samples: n, seed: q.seed };
    if region.base_area() == 0.0 {
        return Ok(cutoffs.iter().map(|&c| row(0.0, 0.0, c)).collect());
    }
    let top = cutoffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sampled = region.clone();
    if top.is_finite() {
        sampled = sampled.with_cutoff(top);
    }
    if let VerticalSampling::PowerTail { scale } = sampling {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(HilbertError::InvalidSpec(format!("power-tail scale {scale} must be > 0")));
        }
    }
    let chunks = n.div_ceil(CHUNK);
    let draws: Vec<Vec<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(q.seed);
            rng.set_stream(c as u64);
            let m = CHUNK.min(n - c * CHUNK);
            (0..m).map(|_| draw(&sampled, model, sampling, &mut rng)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let draws: Vec<(f64, f64)> = draws.into_iter().flatten().collect();
    Ok(cutoffs
        .iter()
        .map(|&cut| {
            let vals = draws.iter().map(|&(x1, w)| if x1 <= cut { w } else { 0.0 });
            let mean = vals.clone().sum::<f64>() / n as f64;
            let var = if n > 1 { vals.map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
            row(mean, (var / n as f64).sqrt(), cut)
        })
        .collect())
}

/// One importance-weighted sample `(x₁, f/p)`; weight 0 outside the window.
fn draw(
    region: &Region,
    model: &dyn DensityModel,
    sampling: VerticalSampling,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64), HilbertError> {
    let (u2, u3, uv): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let x2 = region.x2.0 + u2 * (region.x2.1 - region.x2.0);
    let x3 = region.x3.0 + u3 * (region.x3.1 - region.x3.0);
    let area = region.base_area();
    let Some((lo, hi)) = region.window(x2, x3)? else {
        return Ok((f64::NEG_INFINITY, 0.0));
    };
    let (x1, inv_pdf) = match sampling {
        VerticalSampling::Uniform => {
            let hi = hi.ok_or_else(|| HilbertError::InvalidSpec("uniform sampling needs a bounded window".into()))?;
            if !lo.is_finite() {
                return Err(HilbertError::InvalidSpec("uniform sampling needs a bounded window".into()));
            }
            (lo + uv * (hi - lo), area * (hi - lo))
        }
        VerticalSampling::PowerTail { scale: c } => {
            if !lo.is_finite() {
                return Err(HilbertError::InvalidSpec("power-tail sampling needs a finite lower limit".into()));
            }
            let u = 1.0 - uv;
            let k = c / (u * u) - c;
            let pdf = 0.5 * c.sqrt() * (k + c).powf(-1.5);
            let x1 = lo + k;
            if hi.is_some_and(|h| x1 > h) || !x1.is_finite() {
                return Ok((x1, 0.0));
            }
            (x1, area / pdf)
        }
    };
    let x = Point3::new(x1, x2, x3);
    if !region.domain.contains(&x) {
        return Err(HilbertError::RegionOutsideDomain([x1, x2, x3]));
    }
    Ok((x1, model.density(&x)? * inv_pdf))
}

/// CSV with columns `cutoff,estimate,stderr,samples,seed`.
pub fn volume_table_csv(rows: &[VolumeRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

#[derive(Serialize)]
struct DensityRow {
    x1: f64,
    x2: f64,
    x3: f64,
    density: f64,
}

/// Density sampled on the grid `x1s × x2s` at fixed `x₃`, as CSV `x1,x2,x3,density`.
/// Points outside the domain are skipped.
pub fn density_grid_csv(
    dom: &ConvexDomain,
    model: &dyn DensityModel,
    x1s: &[f64],
    x2s: &[f64],
    x3: f64,
) -> Result<String, HilbertError> {
    let pts: Vec<Point3> =
        x1s.iter().flat_map(|&a| x2s.iter().map(move |&b| Point3::new(a, b, x3))).filter(|p| dom.contains(p)).collect();
    let vals = pts.par_iter().map(|p| model.density(p)).collect::<Result<Vec<_>, _>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for (p, d) in pts.iter().zip(vals) {
        w.serialize(DensityRow { x1: p[0], x2: p[1], x3: p[2], density: d }).expect("in-memory CSV write");
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8"))
}
