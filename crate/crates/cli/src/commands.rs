use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};
use sl2r::distance::{distance_from_origin, distance_to_coords, DistanceOptions, DistanceSolution};
use sl2r::mesh::sphere_mesh as build_sphere_mesh;
use sl2r::model::{EuclideanModelPoint, HyperboloidCoords, ProjectivePoint};
use sl2r::packing::{self, PackingResult, SweepCache, SweepOptions};
use sl2r::tiling::{self, TilingParams, DEFAULT_CURVE_SAMPLES};
use sl2r::volume::{ball_volume, ball_volume_mc_oracle};

use crate::config::{resolve, RunConfig};
use crate::output::{emit, to_json, CliError};
use crate::{Format, GlobalOpts};

#[derive(Debug, Args, Serialize)]
pub struct DistanceArgs {
    /// Euclidean model coordinates of the target.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
    /// Hyperboloid coordinates of the target.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct BallvolArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,
    /// Also run the Monte-Carlo oracle.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SphereMeshArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,
    /// Segments from pole to pole (even); the mesh has 2·res² triangles.
    #[arg(long, default_value_t = 64)]
    pub res: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PrismArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    /// Samples along the side curve.
    #[arg(long, default_value_t = DEFAULT_CURVE_SAMPLES)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PackArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 3)]
    pub p_min: u32,
    #[arg(long, default_value_t = 20)]
    pub p_max: u32,
    #[arg(long, default_value_t = 3)]
    pub q_min: u32,
    #[arg(long, default_value_t = 60)]
    pub q_max: u32,
    /// Worker threads (defaults to the available cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// JSON cache of finished cells, read before and updated after the run.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Explicit pairs such as `3:11,8:10`, replacing the ranges.
    #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
    pub pairs: Option<Vec<(u32, u32)>>,
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (p, q) = s.split_once(':').ok_or_else(|| format!("expected p:q, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(p)?, num(q)?))
}

fn point_json(p: &ProjectivePoint) -> Value {
    let h = p.to_hyperboloid().ok();
    let e = p.to_euclidean().ok();
    json!({
        "projective": p.to_array(),
        "euclidean": e.map(|e| [e.x, e.y, e.z]),
        "hyperboloid": h.map(|h| json!({ "r": h.r, "theta": h.theta, "phi": h.phi })),
    })
}

fn json_with_config(config: &RunConfig, body: Value) -> Result<String, CliError> {
    let mut obj = json!({ "config": config });
    if let (Some(map), Value::Object(rest)) = (obj.as_object_mut(), body) {
        map.extend(rest);
    }
    to_json(&obj)
}

pub fn distance(g: &GlobalOpts, a: &DistanceArgs) -> Result<(), CliError> {
    let config = resolve("distance", a, g, &[Format::Json])?;
    let opts = DistanceOptions::default();
    let (target, sol): (ProjectivePoint, DistanceSolution) = match (a.x, a.y, a.z, a.r, a.theta, a.phi) {
        (Some(x), Some(y), Some(z), None, None, None) => {
            let p = EuclideanModelPoint::new(x, y, z).to_point();
            (p, distance_from_origin(&p)?)
        }
        (None, None, None, Some(r), Some(theta), Some(phi)) => {
            let h = HyperboloidCoords::new(r, theta, phi);
            (h.to_point()?, distance_to_coords(&h, &opts)?)
        }
        _ => return Err(CliError::Usage("give either all of --x --y --z or all of --r --theta --phi".into())),
    };
    let body = json!({
        "target": point_json(&target),
        "distance": sol.distance,
        "params": sol.params,
        "residual": sol.residual,
        "branches": sol.branches,
    });
    emit(g.out.as_deref(), &json_with_config(&config, body)?, json!({ "config": config, "out": g.out }))
}

pub fn ballvol(g: &GlobalOpts, a: &BallvolArgs) -> Result<(), CliError> {
    let config = resolve("ballvol", a, g, &[Format::Json])?;
    let volume = ball_volume(a.rho, &config.quadrature)?;
    let mut body = json!({ "rho": a.rho, "volume": volume });
    if a.mc {
        if a.samples < 2 {
            return Err(CliError::Usage("--samples must be at least 2".into()));
        }
        let mc = ball_volume_mc_oracle(a.rho, a.samples, g.seed)?;
        let z = if mc.std_error > 0.0 { (mc.estimate - volume) / mc.std_error } else { 0.0 };
        body["mc"] = json!({
            "estimate": mc.estimate,
            "std_error": mc.std_error,
            "samples": mc.samples,
            "seed": g.seed,
            "z_score": z,
        });
    }
    emit(g.out.as_deref(), &json_with_config(&config, body)?, json!({ "config": config, "out": g.out }))
}

pub fn sphere_mesh(g: &GlobalOpts, a: &SphereMeshArgs) -> Result<(), CliError> {
    let config = resolve("sphere-mesh", a, g, &[Format::Obj])?;
    let mesh = build_sphere_mesh(a.rho, a.res)?;
    let header = format!("geodesic sphere\nconfig {}", serde_json::to_string(&config)?);
    let summary = json!({
        "config": config,
        "out": g.out,
        "vertices": mesh.vertices.len(),
        "triangles": mesh.triangles.len(),
        "watertight": mesh.is_watertight(),
    });
    emit(g.out.as_deref(), &mesh.to_obj(&header), summary)
}

pub fn prism(g: &GlobalOpts, a: &PrismArgs) -> Result<(), CliError> {
    let config = resolve("prism", a, g, &[Format::Json])?;
    let params = TilingParams::new(a.p, a.q)?;
    let d = tiling::build_with_samples(&params, a.samples)?;
    let volume = tiling::prism_volume(&d, &config.quadrature)?;
    let relations = tiling::verify_presentation(&d, 1e-10);
    let o = ProjectivePoint::ORIGIN;
    let body = json!({
        "p": a.p,
        "q": a.q,
        "b": d.b,
        "vertex_distance": d.vertex_distance(),
        "phi": d.phi,
        "rotation_sign": d.rotation_sign,
        "vertices": d.vertices.iter().map(point_json).collect::<Vec<_>>(),
        "half_screw_axis": {
            "H": point_json(&d.axis.foot),
            "point": point_json(&d.axis.point),
            "nullity": d.axis.nullity,
            "residual": d.axis.residual,
        },
        "origin_images": {
            "ab": point_json(&o.transform(&d.half_screw())),
            "b": point_json(&o.transform(&d.gen_b)),
        },
        "side_curve": {
            "theta_r": d.side.polar,
            "checks": d.side.checks,
        },
        "volume": volume,
        "relations": relations,
    });
    emit(g.out.as_deref(), &json_with_config(&config, body)?, json!({ "config": config, "out": g.out }))
}

pub fn pack(g: &GlobalOpts, a: &PackArgs) -> Result<(), CliError> {
    let config = resolve("pack", a, g, &[Format::Json])?;
    let params = TilingParams::new(a.p, a.q)?;
    let result = packing::pack(&params, &config.quadrature)?;
    emit(
        g.out.as_deref(),
        &json_with_config(&config, serde_json::to_value(&result)?)?,
        json!({ "config": config, "out": g.out }),
    )
}

#[derive(Debug, Serialize)]
struct CsvRow {
    p: u32,
    q: u32,
    rho_opt: f64,
    vol_ball: f64,
    vol_prism: f64,
    density: f64,
    limiting_constraint: &'static str,
    rho_vertex: f64,
    rho_half_height: f64,
    rho_screw: f64,
    rho_half_vertex: f64,
    distance_residual: f64,
    distance_branches: usize,
    relator_residual: f64,
}

impl From<&PackingResult> for CsvRow {
    fn from(r: &PackingResult) -> Self {
        Self {
            p: r.params.p,
            q: r.params.q,
            rho_opt: r.rho_opt,
            vol_ball: r.vol_ball,
            vol_prism: r.vol_prism,
            density: r.density,
            limiting_constraint: r.limiting_constraint.as_str(),
            rho_vertex: r.rho_candidates.vertex_distance,
            rho_half_height: r.rho_candidates.half_height,
            rho_screw: r.rho_candidates.screw_image,
            rho_half_vertex: r.rho_candidates.half_vertex_distance,
            distance_residual: r.diagnostics.distance_residual,
            distance_branches: r.diagnostics.distance_branches,
            relator_residual: r.diagnostics.relator_residual,
        }
    }
}

fn load_cache(path: &std::path::Path) -> Result<SweepCache, CliError> {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| CliError::Io(format!("cache {}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(SweepCache::default()),
        Err(e) => Err(CliError::Io(format!("cache {}: {e}", path.display()))),
    }
}

pub fn sweep(g: &GlobalOpts, a: &SweepArgs) -> Result<(), CliError> {
    let config = resolve("sweep", a, g, &[Format::Csv, Format::Json])?;
    if a.p_min > a.p_max || a.q_min > a.q_max {
        return Err(CliError::Usage("empty parameter range".into()));
    }
    let jobs = match a.jobs {
        Some(0) => return Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let mut cache = match &a.cache {
        Some(path) => load_cache(path)?,
        None => SweepCache::default(),
    };
    let opts = SweepOptions { jobs };
    let report = match &a.pairs {
        Some(pairs) => packing::sweep_pairs(pairs.iter().copied(), &config.quadrature, &opts, &mut cache)?,
        None => packing::sweep(a.p_min..=a.p_max, a.q_min..=a.q_max, &config.quadrature, &opts, &mut cache)?,
    };
    if let Some(path) = &a.cache {
        crate::output::write_atomic(path, to_json(&cache)?.as_bytes())?;
    }
    let best = report.argmax().map(|r| json!({ "p": r.params.p, "q": r.params.q, "density": r.density }));
    let summary = json!({
        "config": config,
        "out": g.out,
        "cells": report.results.len(),
        "skipped": report.skipped.len(),
        "errors": report.errors,
        "cache_hits": report.cache_hits,
        "argmax": best,
    });
    let body = match config.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &report.results {
                w.serialize(CsvRow::from(r))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?)
                .map_err(|e| CliError::Io(e.to_string()))?
        }
        _ => json_with_config(&config, json!({ "argmax": best, "report": report }))?,
    };
    emit(g.out.as_deref(), &body, summary)
}
