//! Volumes: geodesic balls and sector-like prisms over a base curve.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{distance_to_coords, DistanceOptions};
use crate::error::{Error, Result};
use crate::geodesic::geodesic_jet;
use crate::model::HyperboloidCoords;
use crate::quadrature::{integrate, try_integrate, QuadratureSpec};

/// `∂(r, φ)/∂(s, α)` of the closed-form geodesics.
#[allow(non_snake_case)]
pub fn jacobian_J(s: f64, alpha: f64) -> Result<f64> {
    Ok(geodesic_jet(s, alpha)?.jacobian())
}

fn check_radius(rho: f64) -> Result<()> {
    if !(0.0..FRAC_PI_2).contains(&rho) {
        Err(Error::RadiusOutOfRange(rho))
    } else {
        Ok(())
    }
}

/// Volume of the geodesic ball of radius `rho` about any point.
///
/// Integrates the volume density pulled back through the geodesic
/// exponential map over arc length and altitude; longitude and the sign of
/// the altitude contribute the factor 4π.
pub fn ball_volume(rho: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_radius(rho)?;
    spec.validate()?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let inner_spec = spec.scaled(0.1);
    let density = |s: f64, alpha: f64| -> Result<f64> {
        let j = geodesic_jet(s, alpha)?;
        Ok(0.5 * (2.0 * j.r).sinh() * j.jacobian().abs())
    };
    let shell = |s: f64| -> Result<f64> {
        let h2 = try_integrate(|a| density(s, a), 0.0, FRAC_PI_4, &inner_spec)?;
        let fibre = try_integrate(|a| density(s, a), FRAC_PI_4, FRAC_PI_2, &inner_spec)?;
        Ok(h2.value + fibre.value)
    };
    let outer = try_integrate(shell, 0.0, rho, spec)?;
    Ok(4.0 * PI * outer.value)
}

/// Monte-Carlo estimate of a ball volume and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

const MC_CHUNK: usize = 1 << 15;
const BOUNDARY_SAMPLES: usize = 4096;
/// Samples closer than this (in φ) to the sampled sphere are re-classified
/// by the distance solver.
const BOUNDARY_BAND: f64 = 1e-3;

/// Cross-section of the sphere of radius `rho` in the `(r, φ ≥ 0)` half-plane,
/// stored as runs along which `r` is monotone.
struct SphereSection {
    runs: Vec<Vec<(f64, f64)>>,
}

impl SphereSection {
    fn new(rho: f64) -> Result<Self> {
        let pts = (0..=BOUNDARY_SAMPLES)
            .map(|i| {
                let alpha = FRAC_PI_2 * i as f64 / BOUNDARY_SAMPLES as f64;
                geodesic_jet(rho, alpha).map(|j| (j.r, j.phi))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut runs: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut run = vec![pts[0]];
        for &p in &pts[1..] {
            let n = run.len();
            if n >= 2 && (run[n - 1].0 - run[n - 2].0) * (p.0 - run[n - 1].0) < 0.0 {
                let last = run[n - 1];
                runs.push(std::mem::replace(&mut run, vec![last]));
            }
            run.push(p);
        }
        runs.push(run);
        // Sort every run by increasing r for binary search.
        for run in &mut runs {
            if run[0].0 > run[run.len() - 1].0 {
                run.reverse();
            }
        }
        Ok(Self { runs })
    }

    /// φ-values where the sphere crosses the vertical line through `r`.
    fn crossings(&self, r: f64) -> impl Iterator<Item = f64> + '_ {
        self.runs.iter().filter_map(move |run| {
            // half-open in r so a point shared by two runs is counted once
            let i = run.partition_point(|p| p.0 <= r);
            if i == 0 || i == run.len() {
                return None;
            }
            let ((r0, p0), (r1, p1)) = (run[i - 1], run[i]);
            Some(p0 + (p1 - p0) * (r - r0) / (r1 - r0))
        })
    }

    /// Inside test by ray crossing along `+φ`, and the distance (in φ) to
    /// the nearest crossing.
    fn classify(&self, r: f64, phi: f64) -> (bool, f64) {
        let mut above = 0;
        let mut nearest = f64::INFINITY;
        for c in self.crossings(r) {
            if c > phi {
                above += 1;
            }
            nearest = nearest.min((c - phi).abs());
        }
        (above % 2 == 1, nearest)
    }
}

/// Monte-Carlo estimate of the ball volume.
///
/// Samples `(r, θ, φ)` uniformly in `[0, ρ] × [0, 2π) × [-ρ, ρ]`, which
/// contains the ball, and integrates the volume density `½ sinh 2r` over
/// the points within distance `ρ` of the origin. Membership is decided by
/// ray crossing against the sampled sphere, and by a full distance solve
/// for points close to it. Chunks of samples use independent ChaCha streams
/// so the result depends only on `seed` and `n_samples`.
pub fn ball_volume_mc_oracle(rho: f64, n_samples: usize, seed: u64) -> Result<McEstimate> {
    check_radius(rho)?;
    if rho == 0.0 || n_samples == 0 {
        return Ok(McEstimate { estimate: 0.0, std_error: 0.0, samples: n_samples });
    }
    let section = SphereSection::new(rho)?;
    let opts = DistanceOptions::default();
    let chunks = n_samples.div_ceil(MC_CHUNK);
    let sums = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<(f64, f64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let n = MC_CHUNK.min(n_samples - chunk * MC_CHUNK);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..n {
                let r = rng.random::<f64>() * rho;
                let theta = rng.random::<f64>() * 2.0 * PI;
                let phi = (2.0 * rng.random::<f64>() - 1.0) * rho;
                let (mut inside, gap) = section.classify(r, phi.abs());
                if gap < BOUNDARY_BAND {
                    let h = HyperboloidCoords::new(r, theta, phi);
                    inside = distance_to_coords(&h, &opts)?.distance <= rho;
                }
                if inside {
                    let w = 0.5 * (2.0 * r).sinh();
                    sum += w;
                    sum_sq += w * w;
                }
            }
            Ok((sum, sum_sq))
        })
        .collect::<Result<Vec<_>>>()?;
    let (sum, sum_sq) = sums.iter().fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    let n = n_samples as f64;
    let box_volume = rho * 2.0 * PI * 2.0 * rho;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(McEstimate { estimate: box_volume * mean, std_error: box_volume * (var / n).sqrt(), samples: n_samples })
}

/// Radius as a function of polar angle.
#[derive(Clone)]
pub enum RadialProfile {
    Constant(f64),
    /// Piecewise-linear through `(θ, r)` samples with increasing θ.
    Samples(Vec<(f64, f64)>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialProfile::Constant(r) => f.debug_tuple("Constant").field(r).finish(),
            RadialProfile::Samples(s) => f.debug_tuple("Samples").field(&s.len()).finish(),
            RadialProfile::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// A curve `r = r(θ)` over `[theta_start, theta_end]`.
#[derive(Debug, Clone)]
pub struct RadialCurve {
    pub theta_start: f64,
    pub theta_end: f64,
    pub profile: RadialProfile,
}

impl RadialCurve {
    pub fn constant(theta_start: f64, theta_end: f64, r: f64) -> Result<Self> {
        let c = Self { theta_start, theta_end, profile: RadialProfile::Constant(r) };
        c.validate()?;
        Ok(c)
    }

    pub fn from_samples(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidCurve("need at least two samples".into()));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::NonMonotoneAngle);
        }
        let c = Self {
            theta_start: samples[0].0,
            theta_end: samples[samples.len() - 1].0,
            profile: RadialProfile::Samples(samples),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn from_fn<F>(theta_start: f64, theta_end: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let c = Self { theta_start, theta_end, profile: RadialProfile::Function(Arc::new(f)) };
        c.validate()?;
        Ok(c)
    }

    pub fn width(&self) -> f64 {
        self.theta_end - self.theta_start
    }

    pub fn radius_at(&self, theta: f64) -> f64 {
        match &self.profile {
            RadialProfile::Constant(r) => *r,
            RadialProfile::Function(f) => f(theta),
            RadialProfile::Samples(s) => {
                let i = s.partition_point(|p| p.0 <= theta).clamp(1, s.len() - 1);
                let ((t0, r0), (t1, r1)) = (s[i - 1], s[i]);
                r0 + (r1 - r0) * (theta - t0) / (t1 - t0)
            }
        }
    }

    /// Checks the angular range and that the radius is finite and
    /// non-negative (at the samples, or on a probe grid for functions).
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_start < self.theta_end) || !self.width().is_finite() {
            return Err(Error::InvalidCurve(format!("empty angular range [{}, {}]", self.theta_start, self.theta_end)));
        }
        let bad = |r: f64| !(r >= 0.0) || !r.is_finite();
        let invalid = match &self.profile {
            RadialProfile::Constant(r) => bad(*r),
            RadialProfile::Samples(s) => s.iter().any(|p| bad(p.1)),
            RadialProfile::Function(f) => {
                (0..=64).map(|i| self.theta_start + self.width() * i as f64 / 64.0).any(|t| bad(f(t)))
            }
        };
        if invalid {
            return Err(Error::InvalidCurve("radius must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// Splits the curve at `theta` into two adjacent curves.
    pub fn split(&self, theta: f64) -> Result<(Self, Self)> {
        if !(theta > self.theta_start && theta < self.theta_end) {
            return Err(Error::InvalidCurve(format!("split angle {theta} outside the curve")));
        }
        let cut = |lo: f64, hi: f64| -> Self {
            let profile = match &self.profile {
                RadialProfile::Samples(s) => {
                    let mut pts = vec![(lo, self.radius_at(lo))];
                    pts.extend(s.iter().copied().filter(|p| p.0 > lo && p.0 < hi));
                    pts.push((hi, self.radius_at(hi)));
                    RadialProfile::Samples(pts)
                }
                other => other.clone(),
            };
            Self { theta_start: lo, theta_end: hi, profile }
        };
        Ok((cut(self.theta_start, theta), cut(theta, self.theta_end)))
    }
}

/// `¼(cosh 2r - 1)`, written to avoid cancellation for small `r`.
fn sector_density(r: f64) -> f64 {
    0.5 * r.sinh().powi(2)
}

/// Volume of the sector-like solid of height `phi_height` over the region
/// `0 ≤ r ≤ r(θ)`, `θ ∈ [theta_start, theta_end]`.
pub fn sector_volume(curve: &RadialCurve, phi_height: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(phi_height > 0.0) {
        return Err(Error::InvalidCurve(format!("prism height must be positive, got {phi_height}")));
    }
    curve.validate()?;
    let area = match &curve.profile {
        RadialProfile::Constant(r) => sector_density(*r) * curve.width(),
        RadialProfile::Function(f) => {
            integrate(|t| sector_density(f(t)), curve.theta_start, curve.theta_end, spec)?.value
        }
        RadialProfile::Samples(s) => {
            // Integrate each linear piece separately so kinks fall on panel
            // boundaries.
            let piece_spec = spec.scaled(1.0 / s.len() as f64);
            let mut total = 0.0;
            for w in s.windows(2) {
                let ((t0, r0), (t1, r1)) = (w[0], w[1]);
                let lin = |t: f64| r0 + (r1 - r0) * (t - t0) / (t1 - t0);
                total += integrate(|t| sector_density(lin(t)), t0, t1, &piece_spec)?.value;
            }
            total
        }
    };
    Ok(phi_height * area)
}
