//! Regular prism tilings under the groups `pq2₁`.
//!
//! `a` is the `2π/p` rotation about the origin's fibre, `b` a `2π/q`
//! rotation about the fibre through the vertex `A₁`, and `ab` a half-screw
//! whose square is the fibre translation `τ = S(Φ)` by the prism height.
//! The base figure is a curvilinear `p`-gon in the base plane; its sides are
//! foot-point curves of the side fibres.
//!
//! Side curves. The map `(r, θ, φ) ↦ (2r, θ)` takes fibres to points of a
//! hyperbolic plane (the base metric is `dr² + ¼ sinh²2r dθ²`), and every
//! isometry of the group descends to a rigid motion there. The side through
//! `A₁` and `A_p` is the geodesic of that plane joining the images of the two
//! vertices: it is the unique curve that the half-turn induced by `ab`
//! maps onto itself with reversed ends, and it makes the base figure a
//! regular `p`-gon with angles `2π/q` in the doubled-radius plane.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HyperboloidCoords, Isometry, ProjectivePoint};
use crate::quadrature::QuadratureSpec;
use crate::volume::{sector_volume, RadialCurve};

/// Tolerance for the `(ab)² ∝ S(Φ)` test fixing the rotation sense of `b`.
const CONVENTION_TOL: f64 = 1e-8;
/// Relative singular-value threshold for the half-screw nullspace.
const NULLSPACE_TOL: f64 = 1e-9;
/// Tolerance of the geometric side-curve checks.
const CURVE_TOL: f64 = 1e-8;
pub const DEFAULT_CURVE_SAMPLES: usize = 257;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TilingParams {
    pub p: u32,
    pub q: u32,
}

impl TilingParams {
    /// Accepts `p ≥ 3` and `q > 2p/(p-2)`.
    pub fn new(p: u32, q: u32) -> Result<Self> {
        let invalid = |reason: &str| Err(Error::InvalidParams { p, q, reason: reason.into() });
        if p < 3 {
            return invalid("p must be at least 3");
        }
        // q > 2p/(p-2) in integers
        if (q as u64) * (p as u64 - 2) <= 2 * p as u64 {
            return invalid("violates q > 2p/(p-2)");
        }
        Ok(Self { p, q })
    }

    pub fn is_valid(p: u32, q: u32) -> bool {
        Self::new(p, q).is_ok()
    }
}

/// `b = tanh(OA₁)` for real `p`, `q`; `q = ∞` is allowed and gives the
/// limit value.
pub fn vertex_radius_real(p: f64, q: f64) -> f64 {
    let tq = if q.is_infinite() { 0.0 } else { (PI / q).tan() };
    let t = (PI / p).tan() * tq;
    ((1.0 - t) / (1.0 + t)).sqrt()
}

/// `b = tanh(OA₁)`, the Klein-model distance of the vertices from the origin.
pub fn vertex_radius(params: &TilingParams) -> f64 {
    vertex_radius_real(params.p as f64, params.q as f64)
}

/// Prism height `Φ = π - 2π/p - 2π/q`.
pub fn prism_height(params: &TilingParams) -> f64 {
    PI - 2.0 * PI / params.p as f64 - 2.0 * PI / params.q as f64
}

/// Invariant fibre of the half-screw `ab`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfScrewAxis {
    /// A normalized point of the fibre.
    pub point: ProjectivePoint,
    /// Its foot point `H` in the base plane.
    pub foot: ProjectivePoint,
    /// Dimension of the solution space of `X·(ab - S(Φ/2)) = 0`.
    pub nullity: usize,
    /// `‖X·ab - X·S(Φ/2)‖∞` at the returned point.
    pub residual: f64,
}

/// Sampled side curve `c_{A₁A_p}` with its analytic radius function.
#[derive(Debug, Clone)]
pub struct SideCurve {
    /// Foot points `c(t)` for uniformly spaced `t ∈ [0, 1]`, `c(0) = A₁`.
    pub points: Vec<ProjectivePoint>,
    /// `(θ, r)` of the samples sorted by increasing θ.
    pub polar: Vec<(f64, f64)>,
    /// `r(θ)` over `[-2π/p, 0]`.
    pub curve: RadialCurve,
    pub checks: SideCurveChecks,
}

/// Residuals of the geometric checks performed on a side curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideCurveChecks {
    /// Distance of the far endpoint from the foot of `A₁·ab`.
    pub endpoint: f64,
    /// Distance of `c(1/2)` from `H`.
    pub midpoint: f64,
    /// `max_t |foot(c(t)·ab) - c(1-t)|`.
    pub half_turn: f64,
    /// Largest radial mismatch between `c·a` and the adjacent side.
    pub rotation: f64,
    /// Largest mismatch between samples and the analytic `r(θ)`.
    pub analytic: f64,
}

#[derive(Debug, Clone)]
pub struct PrismData {
    pub params: TilingParams,
    pub b: f64,
    pub phi: f64,
    /// `A₁ … A_p` in the base plane at polar angles `2πk/p`.
    pub vertices: Vec<ProjectivePoint>,
    pub gen_a: Isometry,
    pub gen_b: Isometry,
    /// `s = bab`.
    pub screw_s: Isometry,
    /// `τ = abab`.
    pub tau: Isometry,
    /// Sense of the `b` rotation, `+1` or `-1`.
    pub rotation_sign: f64,
    pub axis: HalfScrewAxis,
    pub side: SideCurve,
}

impl PrismData {
    /// `ab`, the half-screw about `f₀`.
    pub fn half_screw(&self) -> Isometry {
        self.gen_a * self.gen_b
    }

    /// Hyperboloid radius of the vertices, `artanh b`.
    pub fn vertex_distance(&self) -> f64 {
        self.b.atanh()
    }
}

fn base_point(r: f64, theta: f64) -> Result<ProjectivePoint> {
    HyperboloidCoords::new(r, theta, 0.0).to_point()
}

/// Builds generators, vertices, half-screw axis and side curve.
pub fn build_generators(params: &TilingParams) -> Result<PrismData> {
    build_with_samples(params, DEFAULT_CURVE_SAMPLES)
}

pub fn build_with_samples(params: &TilingParams, n_samples: usize) -> Result<PrismData> {
    let params = TilingParams::new(params.p, params.q)?;
    let b = vertex_radius(&params);
    let phi = prism_height(&params);
    let ra = b.atanh();
    let p = params.p as f64;
    let vertices = (0..params.p).map(|k| base_point(ra, 2.0 * PI * k as f64 / p)).collect::<Result<Vec<_>>>()?;
    let a = Isometry::rotation_about_origin_fibre(2.0 * PI / p);
    let tau_target = Isometry::fibre_translation(phi);
    let mut chosen = None;
    for sign in [1.0, -1.0] {
        let gen_b = Isometry::rotation_about_fibre(&vertices[0], sign * 2.0 * PI / params.q as f64)?;
        let m = a * gen_b;
        if (m * m).approx_eq_up_to_scale(&tau_target, CONVENTION_TOL) {
            chosen = Some((sign, gen_b));
            break;
        }
    }
    let (rotation_sign, gen_b) = chosen.ok_or(Error::ConventionFailure)?;
    let screw_s = gen_b * a * gen_b;
    let tau = a * gen_b * a * gen_b;
    let axis = half_screw_axis_of(&(a * gen_b), phi)?;
    let mut data = PrismData {
        params,
        b,
        phi,
        vertices,
        gen_a: a,
        gen_b,
        screw_s,
        tau,
        rotation_sign,
        axis,
        side: SideCurve {
            points: Vec::new(),
            polar: Vec::new(),
            curve: RadialCurve::constant(0.0, 1.0, 0.0)?,
            checks: SideCurveChecks { endpoint: 0.0, midpoint: 0.0, half_turn: 0.0, rotation: 0.0, analytic: 0.0 },
        },
    };
    data.side = base_curve(&data, n_samples)?;
    Ok(data)
}

/// The invariant fibre of `ab` and its foot point `H`.
pub fn half_screw_axis(d: &PrismData) -> Result<HalfScrewAxis> {
    half_screw_axis_of(&d.half_screw(), d.phi)
}

fn half_screw_axis_of(m: &Isometry, phi: f64) -> Result<HalfScrewAxis> {
    let s_half = Isometry::fibre_translation(phi / 2.0);
    let n: Matrix4<f64> = (m.matrix() - s_half.matrix()).transpose();
    let svd = n.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let scale = svd.singular_values.max().max(1.0);
    let null: Vec<usize> = (0..4).filter(|&i| svd.singular_values[i] <= NULLSPACE_TOL * scale).collect();
    // Fixed points of a half-screw fill a whole fibre, a 2-plane of rows.
    if null.len() != 2 {
        return Err(Error::DegenerateNullspace(null.len()));
    }
    let row = v_t.row(null[0]);
    let x = ProjectivePoint::new(row[0], row[1], row[2], row[3]);
    // Every nonzero vector of the plane is a point of the fibre; pick the
    // representative with positive x0² + x1² orientation.
    let x =
        if x.x0 < 0.0 || (x.x0 == 0.0 && x.x1 < 0.0) { ProjectivePoint::new(-x.x0, -x.x1, -x.x2, -x.x3) } else { x };
    let point = x.normalize()?;
    let residual = (point.transform(m).to_row() - point.transform(&s_half).to_row()).amax();
    let foot = point.foot_point()?;
    Ok(HalfScrewAxis { point, foot, nullity: null.len(), residual })
}

/// One-parameter screw family about `f₀`,
/// `G₀(t) = T_H⁻¹ · R(tπ) · S(tΦ/2) · T_H`, with `G₀(1) ∝ ab`.
pub fn screw_family(d: &PrismData, t: f64) -> Result<Isometry> {
    let h = &d.axis.foot;
    Ok(Isometry::translation_from(h)?
        * Isometry::rotation_about_origin_fibre(t * PI)
        * Isometry::fibre_translation(t * d.phi / 2.0)
        * Isometry::translation_to(h)?)
}

/// `(θ, r)` of the foot points of the orbit `A₁·G₀(t)`, `t ∈ [0, 1]`.
///
/// Kept for comparison: these foot points wander off the side and do not
/// bound the base figure.
pub fn screw_orbit(d: &PrismData, n_samples: usize) -> Result<Vec<(f64, f64)>> {
    let n = n_samples.max(2);
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            let h = d.vertices[0].transform(&screw_family(d, t)?).foot_point()?.to_hyperboloid()?;
            Ok((h.theta, h.r))
        })
        .collect()
}

/// Radius of the side whose perpendicular foot from the origin lies at polar
/// angle `theta_mid`.
fn side_radius(kappa_a: f64, half_angle: f64, theta: f64, theta_mid: f64) -> f64 {
    0.5 * (kappa_a * half_angle.cos() / (theta - theta_mid).cos()).atanh()
}

/// Geodesic of the doubled-radius plane from `(ρ, θ0)` to `(ρ, θ1)` at
/// parameter `t`, as `(r, θ)`.
fn quotient_geodesic(rho: f64, theta0: f64, theta1: f64, t: f64) -> (f64, f64) {
    let v = |th: f64| [rho.cosh(), rho.sinh() * th.cos(), rho.sinh() * th.sin()];
    let (p, q) = (v(theta0), v(theta1));
    let cosh_l = p[0] * q[0] - p[1] * q[1] - p[2] * q[2];
    let l = cosh_l.max(1.0).acosh();
    let (wp, wq) = if l == 0.0 { (1.0 - t, t) } else { (((1.0 - t) * l).sinh() / l.sinh(), (t * l).sinh() / l.sinh()) };
    let w = [0, 1, 2].map(|i| wp * p[i] + wq * q[i]);
    (0.5 * w[1].hypot(w[2]).asinh(), w[2].atan2(w[1]))
}

/// Side curve from `A₁` to `A_p`, sampled at `n_samples` points and
/// checked against the group: endpoints, `c(1/2) = H`, reversal under the
/// half-screw and the adjacent side under `a`.
pub fn base_curve(d: &PrismData, n_samples: usize) -> Result<SideCurve> {
    let n = n_samples.max(3);
    let p = d.params.p as f64;
    let ra = d.vertex_distance();
    let rho = 2.0 * ra;
    let half = PI / p;
    let (theta0, theta1) = (0.0, -2.0 * half);
    let points = (0..n)
        .map(|i| {
            let (r, th) = quotient_geodesic(rho, theta0, theta1, i as f64 / (n - 1) as f64);
            base_point(r, th)
        })
        .collect::<Result<Vec<_>>>()?;

    let dist = |x: &ProjectivePoint, y: &ProjectivePoint| -> Result<f64> {
        Ok((x.normalize()?.to_row() - y.normalize()?.to_row()).amax())
    };
    let m = d.half_screw();
    let far = d.vertices[0].transform(&m).foot_point()?;
    let endpoint = dist(&points[n - 1], &far)?.max(dist(&points[0], &d.vertices[0])?);
    if endpoint > CURVE_TOL {
        return Err(Error::EndpointMismatch(endpoint));
    }
    let (rm, thm) = quotient_geodesic(rho, theta0, theta1, 0.5);
    let midpoint = dist(&base_point(rm, thm)?, &d.axis.foot)?;

    let mut half_turn = 0.0f64;
    for (i, c) in points.iter().enumerate() {
        let image = c.transform(&m).foot_point()?;
        half_turn = half_turn.max(dist(&image, &points[n - 1 - i])?);
    }

    let kappa = (2.0 * ra).tanh();
    let mut rotation = 0.0f64;
    let mut analytic = 0.0f64;
    let mut polar = Vec::with_capacity(n);
    for c in &points {
        let h = c.to_hyperboloid()?;
        analytic = analytic.max((h.r - side_radius(kappa, half, h.theta, -half)).abs());
        polar.push((h.theta, h.r));
        let img = c.transform(&d.gen_a).foot_point()?.to_hyperboloid()?;
        rotation = rotation.max((img.r - side_radius(kappa, half, img.theta, half)).abs());
    }
    // θ runs from 0 down to -2π/p along t
    if polar.windows(2).any(|w| !(w[1].0 < w[0].0)) {
        return Err(Error::NonMonotoneAngle);
    }
    polar.reverse();
    let curve = RadialCurve::from_fn(theta1, theta0, move |th| side_radius(kappa, half, th, -half))?;
    Ok(SideCurve {
        points,
        polar,
        curve,
        checks: SideCurveChecks { endpoint, midpoint, half_turn, rotation, analytic },
    })
}

/// `Vol(P_p(q)) = p · Vol(D(Φ))` over one side sector.
pub fn prism_volume(d: &PrismData, spec: &QuadratureSpec) -> Result<f64> {
    Ok(d.params.p as f64 * sector_volume(&d.side.curve, d.phi, spec)?)
}

/// One relator of the presentation with its residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatorCheck {
    pub word: String,
    /// Fibre translation the word equals on the universal cover (0 for a
    /// true relator).
    pub fibre_shift: f64,
    /// Entrywise residual against `S(fibre_shift)` after scale
    /// normalization.
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresentationReport {
    pub checks: Vec<RelatorCheck>,
    pub passed: bool,
}

/// Checks `a^p = b^q = a s a⁻¹ s⁻¹ = b a b s⁻¹ = 1`,
/// `abab a⁻¹b⁻¹a⁻¹b⁻¹ = 1`, `abab = baba = S(Φ)` and that `τ` commutes
/// with both generators.
pub fn verify_presentation(d: &PrismData, tol: f64) -> PresentationReport {
    let (a, b, s, tau) = (d.gen_a, d.gen_b, d.screw_s, d.tau);
    let (ai, bi, si, ti) = (a.inverse(), b.inverse(), s.inverse(), tau.inverse());
    let words: Vec<(&str, Isometry, f64)> = vec![
        ("a^p", a.pow(d.params.p as i32), 0.0),
        ("b^q", b.pow(d.params.q as i32), 0.0),
        ("a s a^-1 s^-1", a * s * ai * si, 0.0),
        ("b a b s^-1", b * a * b * si, 0.0),
        ("abab a^-1 b^-1 a^-1 b^-1", a * b * a * b * ai * bi * ai * bi, 0.0),
        ("abab", a * b * a * b, d.phi),
        ("baba", b * a * b * a, d.phi),
        ("tau a tau^-1 a^-1", tau * a * ti * ai, 0.0),
        ("tau b tau^-1 b^-1", tau * b * ti * bi, 0.0),
    ];
    let checks: Vec<RelatorCheck> = words
        .into_iter()
        .map(|(word, m, shift)| {
            let residual = m.projective_residual(&Isometry::fibre_translation(shift));
            RelatorCheck { word: word.into(), fibre_shift: shift, residual, passed: residual <= tol }
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    PresentationReport { checks, passed }
}
