//! Geodesic distance from the origin by inverting the closed-form geodesics.
//!
//! For a target with hyperboloid coordinates `(r_P, θ_P, φ_P)` we look for
//! `(s, α)` with `r(s, α) = r_P` and `φ(s, α) = φ_P`; the longitude then
//! follows from `λ = θ_P - θ(s, α)`. The system is reduced to one equation
//! in `α`: for each altitude the radial equation is solved for `s`, and the
//! fibre residual `g(α) = φ(s(α), α) - φ_P` is scanned for sign changes.
//! Fibre-like directions reach a largest radius and come back, so their
//! radial equation has a rising and a falling solution; both are scanned.
//! Each bracketed root is refined by safeguarded Newton on `g`, and the
//! shortest solution is polished with damped Newton on the full 2×2 system.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{fibre_like_turning_length, geodesic_jet, GeodesicJet, GeodesicParams};
use crate::model::{reduce_angle, HyperboloidCoords, Isometry, ProjectivePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceOptions {
    /// Altitude samples per branch in the bracketing scan.
    pub scan_samples: usize,
    /// Target residual of the `(r, φ)` system.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self { scan_samples: 64, tol: 1e-10, max_iterations: 100 }
    }
}

/// Which solution of the radial equation a root came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Rising,
    Falling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSolution {
    pub params: GeodesicParams,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSolution {
    pub distance: f64,
    pub params: GeodesicParams,
    /// Max-norm residual of `(r, φ)` at the returned parameters.
    pub residual: f64,
    /// Every geodesic found by the scan, shortest first.
    pub branches: Vec<BranchSolution>,
}

impl DistanceSolution {
    pub fn is_multi_branch(&self) -> bool {
        self.branches.len() > 1
    }
}

/// Distance from the origin to `p`.
pub fn distance_from_origin(p: &ProjectivePoint) -> Result<DistanceSolution> {
    distance_from_origin_with(p, &DistanceOptions::default())
}

pub fn distance_from_origin_with(p: &ProjectivePoint, opts: &DistanceOptions) -> Result<DistanceSolution> {
    let h = p.to_hyperboloid()?;
    distance_to_coords(&h, opts)
}

/// Distance between two points: translate `p1` to the origin and measure.
pub fn distance(p1: &ProjectivePoint, p2: &ProjectivePoint) -> Result<f64> {
    distance_with(p1, p2, &DistanceOptions::default())
}

pub fn distance_with(p1: &ProjectivePoint, p2: &ProjectivePoint, opts: &DistanceOptions) -> Result<f64> {
    let back = Isometry::translation_from(p1)?;
    let q = p2.normalize()?.transform(&back);
    Ok(distance_from_origin_with(&q, opts)?.distance)
}

/// Distance from the origin to the point with hyperboloid coordinates `h`.
///
/// The fibre coordinate must satisfy `|φ| < π/2`.
pub fn distance_to_coords(h: &HyperboloidCoords, opts: &DistanceOptions) -> Result<DistanceSolution> {
    if h.r < 0.0 {
        return Err(Error::NegativeRadius(h.r));
    }
    if !(h.phi.abs() < FRAC_PI_2) {
        return Err(Error::OutOfChart(h.phi.abs()));
    }
    let sign = if h.phi < 0.0 { -1.0 } else { 1.0 };
    let target = Target { r: h.r, phi: h.phi.abs() };

    let mut roots = if target.r == 0.0 {
        // Points on the origin's fibre are reached by the vertical geodesic.
        vec![(target.phi, FRAC_PI_2, Branch::Rising)]
    } else if target.phi == 0.0 {
        // r ≤ s along every geodesic, so the radial one is the shortest.
        vec![(target.r, 0.0, Branch::Rising)]
    } else {
        scan_roots(&target, opts)
    };
    if roots.is_empty() {
        let best = best_scan_residual(&target, opts);
        return Err(Error::NoConvergence { residual: best });
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (s0, a0, _) = roots[0];
    let (s, alpha) = polish(&target, s0, a0, opts)?;
    let jet = geodesic_jet(s, alpha)?;
    let residual = (jet.r - target.r).abs().max((jet.phi - target.phi).abs());
    if !(residual <= opts.tol) {
        return Err(Error::NoConvergence { residual });
    }

    let make = |s: f64, alpha: f64| -> Result<GeodesicParams> {
        let th = geodesic_jet(s, alpha)?.theta * sign;
        Ok(GeodesicParams::new(s, reduce_angle(h.theta - th), alpha * sign))
    };
    let params = make(s, alpha)?;
    let mut branches = vec![BranchSolution { params, branch: roots[0].2 }];
    for &(s, a, branch) in &roots[1..] {
        branches.push(BranchSolution { params: make(s, a)?, branch });
    }
    Ok(DistanceSolution { distance: s, params, residual, branches })
}

#[derive(Debug, Clone, Copy)]
struct Target {
    r: f64,
    phi: f64,
}

/// Largest radius reached by a fibre-like geodesic, `arsinh(cos α / √-k)`.
fn peak_radius(alpha: f64) -> f64 {
    let k = (2.0 * alpha).cos();
    if k >= 0.0 {
        f64::INFINITY
    } else {
        (alpha.cos() / (-k).sqrt()).asinh()
    }
}

/// Altitude in `(π/4, π/2)` at which the peak radius equals `r`.
fn reach_limit(r: f64) -> f64 {
    let (mut lo, mut hi) = (FRAC_PI_4, FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if peak_radius(mid) >= r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    lo
}

/// Solves `r(s, α) = r_target` on the requested branch by bisection with
/// Newton acceleration.
fn solve_arc_length(alpha: f64, r_target: f64, branch: Branch, guess: Option<f64>) -> Option<f64> {
    let turn = fibre_like_turning_length(alpha);
    let (mut lo, mut hi) = match (branch, turn) {
        (Branch::Rising, Some(t)) => (0.0, t),
        (Branch::Falling, Some(t)) => (t, 2.0 * t),
        (Branch::Falling, None) => return None,
        (Branch::Rising, None) => {
            let mut hi = r_target.max(0.5);
            while geodesic_jet(hi, alpha).ok()?.r < r_target {
                hi *= 2.0;
                if hi > 1e6 {
                    return None;
                }
            }
            (0.0, hi)
        }
    };
    let f = |s: f64| geodesic_jet(s, alpha).ok().map(|j| (j.r - r_target, j.dr_ds));
    let (flo, _) = f(lo)?;
    let (fhi, _) = f(hi)?;
    // At the reach limit the peak radius equals the target only up to
    // rounding; the turning point itself is then the solution.
    if let Some(t) = turn {
        let ft = if branch == Branch::Rising { fhi } else { flo };
        if ft.abs() <= 1e-12 * (1.0 + r_target) {
            return Some(t);
        }
    }
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return None;
    }
    let increasing = fhi > flo;
    let mut s = guess.filter(|g| *g > lo && *g < hi).unwrap_or(0.5 * (lo + hi));
    for _ in 0..200 {
        let (fs, ds) = f(s)?;
        if fs == 0.0 {
            return Some(s);
        }
        if (fs > 0.0) == increasing {
            hi = s;
        } else {
            lo = s;
        }
        let newton = s - fs / ds;
        s = if ds != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (hi - lo) < 1e-15 * (1.0 + s) || fs.abs() < 1e-15 {
            return Some(s);
        }
    }
    Some(s)
}

/// `g(α) = φ(s(α), α) - φ_P` and its derivative `J / (∂r/∂s)`.
fn fibre_residual(target: &Target, alpha: f64, branch: Branch, guess: Option<f64>) -> Option<(f64, f64, f64)> {
    let s = solve_arc_length(alpha, target.r, branch, guess)?;
    let j = geodesic_jet(s, alpha).ok()?;
    let dg = if j.dr_ds != 0.0 { j.jacobian() / j.dr_ds } else { f64::NAN };
    Some((j.phi - target.phi, dg, s))
}

fn branch_grid(target: &Target, branch: Branch, n: usize) -> Vec<f64> {
    let limit = reach_limit(target.r);
    let (lo, hi) = match branch {
        Branch::Rising => (0.0, limit),
        Branch::Falling => (FRAC_PI_4, limit),
    };
    let n = n.max(2);
    (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .filter(|&a| branch == Branch::Rising || a > FRAC_PI_4)
        .collect()
}

fn scan_roots(target: &Target, opts: &DistanceOptions) -> Vec<(f64, f64, Branch)> {
    let mut roots = Vec::new();
    for branch in [Branch::Rising, Branch::Falling] {
        let grid = branch_grid(target, branch, opts.scan_samples);
        let mut prev: Option<(f64, f64, f64)> = None;
        let mut guess = None;
        for &alpha in &grid {
            let Some((g, _, s)) = fibre_residual(target, alpha, branch, guess) else {
                prev = None;
                continue;
            };
            guess = Some(s);
            if g == 0.0 {
                roots.push((s, alpha, branch));
            } else if let Some((pa, pg, ps)) = prev {
                if pg != 0.0 && pg.signum() != g.signum() {
                    if let Some(root) = refine_bracket(target, branch, pa, alpha, pg, ps, opts) {
                        roots.push(root);
                    }
                }
            }
            prev = Some((alpha, g, s));
        }
    }
    dedup_roots(roots)
}

fn dedup_roots(mut roots: Vec<(f64, f64, Branch)>) -> Vec<(f64, f64, Branch)> {
    roots.sort_by(|a, b| a.1.total_cmp(&b.1));
    roots.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
    roots
}

fn refine_bracket(
    target: &Target,
    branch: Branch,
    mut lo: f64,
    mut hi: f64,
    g_lo: f64,
    s_guess: f64,
    opts: &DistanceOptions,
) -> Option<(f64, f64, Branch)> {
    let lo_sign = g_lo.signum();
    let mut alpha = 0.5 * (lo + hi);
    let mut guess = Some(s_guess);
    for _ in 0..opts.max_iterations.max(200) {
        let (g, dg, s) = fibre_residual(target, alpha, branch, guess)?;
        guess = Some(s);
        if g.abs() <= 1e-15 || hi - lo < 1e-16 {
            return Some((s, alpha, branch));
        }
        if g.signum() == lo_sign {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let newton = alpha - g / dg;
        alpha = if dg.is_finite() && dg != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    let (_, _, s) = fibre_residual(target, alpha, branch, guess)?;
    Some((s, alpha, branch))
}

/// Damped Newton on `(r, φ)(s, α) = (r_P, φ_P)` starting from a scan root.
fn polish(target: &Target, s0: f64, a0: f64, opts: &DistanceOptions) -> Result<(f64, f64)> {
    let residual = |j: &GeodesicJet| (j.r - target.r).abs().max((j.phi - target.phi).abs());
    let (mut s, mut a) = (s0, a0);
    let mut jet = geodesic_jet(s, a)?;
    let mut res = residual(&jet);
    for _ in 0..opts.max_iterations {
        if res <= 1e-15 {
            break;
        }
        let det = jet.jacobian();
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let (fr, fp) = (jet.r - target.r, jet.phi - target.phi);
        let ds = (jet.dphi_dalpha * fr - jet.dr_dalpha * fp) / det;
        let da = (-jet.dphi_ds * fr + jet.dr_ds * fp) / det;
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-4 {
            let (ns, na) = (s - step * ds, (a - step * da).clamp(-FRAC_PI_2, FRAC_PI_2));
            if ns >= 0.0 {
                if let Ok(nj) = geodesic_jet(ns, na) {
                    let nr = residual(&nj);
                    if nr < res {
                        s = ns;
                        a = na;
                        jet = nj;
                        res = nr;
                        improved = true;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((s, a))
}

fn best_scan_residual(target: &Target, opts: &DistanceOptions) -> f64 {
    let mut best = f64::INFINITY;
    for branch in [Branch::Rising, Branch::Falling] {
        for alpha in branch_grid(target, branch, opts.scan_samples) {
            if let Some((g, _, _)) = fibre_residual(target, alpha, branch, None) {
                best = best.min(g.abs());
            }
        }
    }
    best
}

/// Wraps an angle difference into `(-π, π]`; re-exported for callers that
/// compare longitudes.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = reduce_angle(a - b);
    if d == -PI {
        PI
    } else {
        d
    }
}
