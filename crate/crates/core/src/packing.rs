//! Optimal geodesic-ball packings under `pq2₁` and parameter sweeps.
//!
//! The ball is centred at the origin `O`. Its radius is bounded by the
//! distance to the vertex fibres, by half the prism height, and by half the
//! distance from `O` to its image under the half-screw `ab`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::distance_from_origin;
use crate::error::{Error, Result};
use crate::model::ProjectivePoint;
use crate::quadrature::QuadratureSpec;
use crate::tiling::{build_generators, prism_volume, verify_presentation, PrismData, TilingParams};
use crate::volume::ball_volume;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitingConstraint {
    VertexDistance,
    HalfHeight,
    ScrewImage,
}

impl LimitingConstraint {
    pub fn as_str(&self) -> &'static str {
        match self {
            LimitingConstraint::VertexDistance => "VertexDistance",
            LimitingConstraint::HalfHeight => "HalfHeight",
            LimitingConstraint::ScrewImage => "ScrewImage",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoCandidates {
    /// `artanh b`, the distance from `O` to the vertex fibre through `A₁`.
    pub vertex_distance: f64,
    /// `Φ/2`.
    pub half_height: f64,
    /// `d(O, O·ab)/2`.
    pub screw_image: f64,
    /// `artanh(b)/2`, reported for comparison only.
    pub half_vertex_distance: f64,
}

impl RhoCandidates {
    pub fn min(&self) -> (f64, LimitingConstraint) {
        [
            (self.vertex_distance, LimitingConstraint::VertexDistance),
            (self.half_height, LimitingConstraint::HalfHeight),
            (self.screw_image, LimitingConstraint::ScrewImage),
        ]
        .into_iter()
        .fold((f64::INFINITY, LimitingConstraint::VertexDistance), |best, c| if c.0 < best.0 { c } else { best })
    }
}

/// Side information about a packing computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingDiagnostics {
    /// Residual of the distance solve for `O·ab`.
    pub distance_residual: f64,
    /// Number of geodesics from `O` to `O·ab` found by the solver.
    pub distance_branches: usize,
    /// `d(O, O·ba)` and `d(O, O·b)`, equal to `d(O, O·ab)` by invariance.
    pub distance_ba: f64,
    pub distance_b: f64,
    /// Largest relator residual of the group presentation.
    pub relator_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingResult {
    pub params: TilingParams,
    pub rho_candidates: RhoCandidates,
    pub rho_opt: f64,
    pub vol_ball: f64,
    pub vol_prism: f64,
    pub density: f64,
    pub limiting_constraint: LimitingConstraint,
    pub diagnostics: PackingDiagnostics,
}

struct ScrewDistances {
    ab: f64,
    ba: f64,
    b: f64,
    residual: f64,
    branches: usize,
}

fn screw_distances(d: &PrismData) -> Result<ScrewDistances> {
    let o = ProjectivePoint::ORIGIN;
    let sol = distance_from_origin(&o.transform(&d.half_screw()))?;
    let ba = distance_from_origin(&o.transform(&(d.gen_b * d.gen_a)))?.distance;
    let b = distance_from_origin(&o.transform(&d.gen_b))?.distance;
    Ok(ScrewDistances { ab: sol.distance, ba, b, residual: sol.residual, branches: sol.branches.len() })
}

pub fn rho_candidates(d: &PrismData) -> Result<RhoCandidates> {
    let ab = distance_from_origin(&ProjectivePoint::ORIGIN.transform(&d.half_screw()))?.distance;
    Ok(candidates_from(d, ab))
}

fn candidates_from(d: &PrismData, d_ab: f64) -> RhoCandidates {
    RhoCandidates {
        vertex_distance: d.vertex_distance(),
        half_height: d.phi / 2.0,
        screw_image: d_ab / 2.0,
        half_vertex_distance: d.vertex_distance() / 2.0,
    }
}

/// Optimal ball, its volume, the prism volume and the density for `(p, q)`.
pub fn pack(params: &TilingParams, spec: &QuadratureSpec) -> Result<PackingResult> {
    let d = build_generators(params)?;
    pack_prism(&d, spec)
}

pub fn pack_prism(d: &PrismData, spec: &QuadratureSpec) -> Result<PackingResult> {
    let dist = screw_distances(d)?;
    let rho_candidates = candidates_from(d, dist.ab);
    let (rho_opt, limiting_constraint) = rho_candidates.min();
    let vol_ball = ball_volume(rho_opt, spec)?;
    let vol_prism = prism_volume(d, spec)?;
    let relator_residual = verify_presentation(d, f64::INFINITY).checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    Ok(PackingResult {
        params: d.params,
        rho_candidates,
        rho_opt,
        vol_ball,
        vol_prism,
        density: vol_ball / vol_prism,
        limiting_constraint,
        diagnostics: PackingDiagnostics {
            distance_residual: dist.residual,
            distance_branches: dist.branches,
            distance_ba: dist.ba,
            distance_b: dist.b,
            relator_residual,
        },
    })
}

/// A `(p, q)` pair left out of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub p: u32,
    pub q: u32,
    pub reason: String,
}

/// A cell whose computation failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub p: u32,
    pub q: u32,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Results sorted by `(p, q)`.
    pub results: Vec<PackingResult>,
    pub skipped: Vec<SkippedCell>,
    pub errors: Vec<CellError>,
    /// Number of results taken from the cache.
    pub cache_hits: usize,
}

impl SweepReport {
    /// Result with the largest density; ties go to the smallest `(p, q)`.
    pub fn argmax(&self) -> Option<&PackingResult> {
        self.results.iter().fold(None, |best: Option<&PackingResult>, r| match best {
            Some(b) if b.density >= r.density => Some(b),
            _ => Some(r),
        })
    }
}

/// Results keyed by `p:q:spec` so that reruns with the same spec can skip
/// finished cells.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepCache {
    pub entries: BTreeMap<String, PackingResult>,
}

impl SweepCache {
    pub fn key(params: &TilingParams, spec: &QuadratureSpec) -> String {
        format!("{}:{}:{}", params.p, params.q, spec.cache_key())
    }

    pub fn get(&self, params: &TilingParams, spec: &QuadratureSpec) -> Option<&PackingResult> {
        self.entries.get(&Self::key(params, spec))
    }

    pub fn insert(&mut self, spec: &QuadratureSpec, result: PackingResult) {
        self.entries.insert(Self::key(&result.params, spec), result);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Worker threads; `0` uses the global pool.
    pub jobs: usize,
}

/// Packs every valid `(p, q)` in the given ranges.
///
/// Invalid pairs are skipped with a reason, failing cells are recorded and
/// the sweep continues. Cells found in `cache` are reused and new results
/// are added to it.
pub fn sweep(
    p_range: RangeInclusive<u32>,
    q_range: RangeInclusive<u32>,
    spec: &QuadratureSpec,
    opts: &SweepOptions,
    cache: &mut SweepCache,
) -> Result<SweepReport> {
    let pairs = p_range.flat_map(|p| q_range.clone().map(move |q| (p, q)));
    sweep_pairs(pairs, spec, opts, cache)
}

/// Like [`sweep`] over an explicit list of pairs; repeated pairs are
/// computed once.
pub fn sweep_pairs<I>(
    pairs: I,
    spec: &QuadratureSpec,
    opts: &SweepOptions,
    cache: &mut SweepCache,
) -> Result<SweepReport>
where
    I: IntoIterator<Item = (u32, u32)>,
{
    spec.validate()?;
    let mut pairs: Vec<(u32, u32)> = pairs.into_iter().collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut skipped = Vec::new();
    let mut cached = Vec::new();
    let mut todo = Vec::new();
    for (p, q) in pairs {
        match TilingParams::new(p, q) {
            Err(Error::InvalidParams { reason, .. }) => skipped.push(SkippedCell { p, q, reason }),
            Err(e) => skipped.push(SkippedCell { p, q, reason: e.to_string() }),
            Ok(params) => match cache.get(&params, spec) {
                Some(r) => cached.push(r.clone()),
                None => todo.push(params),
            },
        }
    }

    let run = || todo.par_iter().map(|params| (*params, pack(params, spec))).collect::<Vec<_>>();
    let computed = if opts.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::WorkerPool(e.to_string()))?
            .install(run)
    } else {
        run()
    };

    let cache_hits = cached.len();
    let mut results = cached;
    let mut errors = Vec::new();
    for (params, outcome) in computed {
        match outcome {
            Ok(r) => {
                cache.insert(spec, r.clone());
                results.push(r);
            }
            Err(e) => errors.push(CellError { p: params.p, q: params.q, error: e.to_string() }),
        }
    }
    results.sort_by_key(|r| r.params);
    errors.sort_by_key(|e| (e.p, e.q));
    Ok(SweepReport { results, skipped, errors, cache_hits })
}
