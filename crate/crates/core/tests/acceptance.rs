//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use common::{rel_err, HALF_HEIGHT_ROWS, PACKING_TABLE, VERTEX_PARAMS, VERTEX_PARAM_MISPRINTS};
use sl2r::distance::angle_difference;
use sl2r::geodesic::{geodesic_closed_form, geodesic_jet, unit_speed_residual};
use sl2r::ode::{integrate_from_origin, OdeOptions};
use sl2r::packing::{pack, sweep, LimitingConstraint, PackingResult, SweepCache, SweepOptions};
use sl2r::quadrature::QuadratureSpec;
use sl2r::tiling::{
    build_generators, prism_height, verify_presentation, vertex_radius, vertex_radius_real, TilingParams,
};
use sl2r::volume::{ball_volume, ball_volume_mc_oracle, jacobian_J};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn table_rows(spec: &QuadratureSpec) -> Vec<PackingResult> {
    PACKING_TABLE.iter().map(|&(p, q, ..)| pack(&TilingParams::new(p, q).unwrap(), spec).unwrap()).collect()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for &(q, b) in &VERTEX_PARAMS {
        let got = vertex_radius(&TilingParams::new(3, q).unwrap());
        worst = worst.max((got - b).abs());
    }
    let typos_explained = VERTEX_PARAM_MISPRINTS.iter().all(|&(q, printed)| {
        let got = format!("{:.8}", vertex_radius(&TilingParams::new(3, q).unwrap()));
        (0..printed.len()).any(|i| {
            let mut s = printed.to_string();
            s.remove(i);
            got.starts_with(&s)
        })
    });
    let limit = (vertex_radius_real(3.0, f64::INFINITY) - 1.0).abs();
    outcome(
        worst < 1e-7 && limit < 1e-9 && typos_explained,
        format!("max |b - table| = {worst:.2e}, |b(3,inf) - 1| = {limit:.1e}, printed (3,7) and (3,10) off by one inserted digit: {typos_explained}"),
    )
}

fn criterion_2(rows: &[PackingResult]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (r, row) in rows.iter().zip(PACKING_TABLE.iter()) {
        worst = worst.max((r.rho_opt - row.2).abs());
    }
    for &(p, q) in &HALF_HEIGHT_ROWS {
        let (i, row) = PACKING_TABLE.iter().enumerate().find(|(_, r)| r.0 == p && r.1 == q).unwrap();
        let half = prism_height(&TilingParams::new(p, q).unwrap()) / 2.0;
        let printed = (half * 1e6).round() / 1e6;
        ok &= rows[i].limiting_constraint == LimitingConstraint::HalfHeight;
        ok &= (printed - row.2).abs() < 1e-12;
        ok &= rows[i].rho_opt == half;
    }
    outcome(ok && worst < 1e-4, format!("max |rho - table| = {worst:.2e}, half-height rows exact: {ok}"))
}

fn criterion_3(rows: &[PackingResult]) -> Outcome {
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for row in &PACKING_TABLE {
        worst = worst.max(rel_err(ball_volume(row.2, &spec).unwrap(), row.3));
    }
    let mut zs = Vec::new();
    for idx in [0, 6, 11, 14] {
        let rho = rows[idx].rho_opt;
        let mc = ball_volume_mc_oracle(rho, 1_000_000, 42).unwrap();
        zs.push((mc.estimate - rows[idx].vol_ball) / mc.std_error);
    }
    let zmax = zs.iter().fold(0.0f64, |m, z| m.max(z.abs()));
    let zs: Vec<String> = zs.iter().map(|z| format!("{z:+.2}")).collect();
    outcome(worst < 1e-3 && zmax < 3.0, format!("max rel err = {worst:.2e}, MC z-scores [{}]", zs.join(", ")))
}

fn criterion_4(rows: &[PackingResult]) -> Outcome {
    let mut worst_vol: f64 = 0.0;
    let mut worst_delta: f64 = 0.0;
    let mut lines = Vec::new();
    for (r, row) in rows.iter().zip(PACKING_TABLE.iter()) {
        let dv = rel_err(r.vol_prism, row.4);
        let dd = (r.density - row.5).abs();
        worst_vol = worst_vol.max(dv);
        worst_delta = worst_delta.max(dd);
        if dv >= 1e-3 || dd >= 1e-3 {
            lines.push(format!("({},{}) vol {:.6} delta {:.6}", row.0, row.1, r.vol_prism, r.density));
        }
    }
    let mut detail = format!("max rel err Vol(P) = {worst_vol:.2e}, max |delta - table| = {worst_delta:.2e}");
    if !lines.is_empty() {
        detail.push_str(&format!("; off rows: {}", lines.join("; ")));
    }
    outcome(worst_vol < 1e-3 && worst_delta < 1e-3, detail)
}

fn criterion_5() -> Outcome {
    let mut cache = SweepCache::default();
    let opts = SweepOptions { jobs: 8 };
    let report = sweep(3..=20, 3..=60, &QuadratureSpec::default(), &opts, &mut cache).unwrap();
    match report.argmax() {
        Some(best) => outcome(
            best.params.p == 8
                && best.params.q == 10
                && (best.density - 0.567362).abs() < 1e-3
                && report.errors.is_empty(),
            format!(
                "{} cells, {} errors, max delta {:.7} at ({},{})",
                report.results.len(),
                report.errors.len(),
                best.density,
                best.params.p,
                best.params.q
            ),
        ),
        None => outcome(false, "sweep produced no results"),
    }
}

fn criterion_6() -> Outcome {
    let opts = OdeOptions::default();
    let mut ode_dev: f64 = 0.0;
    for k in 0..8 {
        let alpha = -FRAC_PI_2 + PI * (k as f64 + 0.5) / 8.0;
        for i in 1..=40 {
            let s = 2.0 * i as f64 / 40.0;
            let num = integrate_from_origin(alpha, s, &opts).unwrap().state;
            let exact = geodesic_closed_form(s, alpha).unwrap();
            ode_dev = ode_dev
                .max((num.r - exact.r).abs())
                .max(angle_difference(num.theta, exact.theta).abs())
                .max((num.phi - exact.phi).abs());
        }
    }
    let mut speed: f64 = 0.0;
    for i in 0..50 {
        let s = 2.0 * i as f64 / 49.0;
        for j in 0..50 {
            let alpha = -FRAC_PI_2 + PI * j as f64 / 49.0;
            speed = speed.max(unit_speed_residual(s, alpha).unwrap().abs());
        }
    }
    outcome(ode_dev < 1e-6 && speed < 1e-9, format!("ODE sup deviation {ode_dev:.2e}, unit-speed residual {speed:.2e}"))
}

fn criterion_7() -> Outcome {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 1..=30 {
        let s = 1.5 * i as f64 / 30.0;
        for j in 0..=60 {
            let alpha = FRAC_PI_2 * j as f64 / 60.0 * 0.999;
            if (alpha - FRAC_PI_4).abs() < 1e-3 {
                continue;
            }
            let f = |s: f64, a: f64| {
                let g = geodesic_jet(s, a).unwrap();
                (g.r, g.phi)
            };
            let (rsp, psp) = f(s + h, alpha);
            let (rsm, psm) = f(s - h, alpha);
            let (rap, pap) = f(s, alpha + h);
            let (ram, pam) = f(s, alpha - h);
            let (r_s, phi_s) = ((rsp - rsm) / (2.0 * h), (psp - psm) / (2.0 * h));
            let (r_a, phi_a) = ((rap - ram) / (2.0 * h), (pap - pam) / (2.0 * h));
            let fd = r_s * phi_a - r_a * phi_s;
            let j = jacobian_J(s, alpha).unwrap();
            worst = worst.max((j - fd).abs() / j.abs());
        }
    }
    outcome(worst < 1e-6, format!("max relative error {worst:.2e}"))
}

fn criterion_8() -> Outcome {
    let spec = QuadratureSpec::default();
    let rho = 0.05;
    let ratio = ball_volume(rho, &spec).unwrap() / (4.0 / 3.0 * PI * rho.powi(3));
    let vols: Vec<f64> = (0..50).map(|i| ball_volume(1.5 * i as f64 / 49.0, &spec).unwrap()).collect();
    let monotone = vols.windows(2).all(|w| w[1] > w[0]);
    outcome(
        (0.997..=1.003).contains(&ratio) && monotone,
        format!("Vol(B(0.05)) / euclidean = {ratio:.6}, monotone on 50 points: {monotone}"),
    )
}

fn criterion_9() -> Outcome {
    let pairs = [(3, 7), (3, 12), (4, 5), (4, 9), (5, 7), (6, 8), (7, 9), (8, 10), (9, 11), (12, 20)];
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (p, q) in pairs {
        let d = build_generators(&TilingParams::new(p, q).unwrap()).unwrap();
        let report = verify_presentation(&d, 1e-10);
        ok &= report.passed && report.checks.iter().any(|c| c.word == "abab" && c.passed);
        worst = report.checks.iter().fold(worst, |m, c| m.max(c.residual));
    }
    outcome(ok, format!("10 pairs, max relator residual {worst:.2e}"))
}

fn main() {
    let spec = QuadratureSpec::default();
    let start = Instant::now();
    let rows = table_rows(&spec);
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("1 vertex parameter table", Box::new(criterion_1)),
        ("2 optimal radius column", Box::new(|| criterion_2(&rows))),
        ("3 ball volume column and MC oracle", Box::new(|| criterion_3(&rows))),
        ("4 prism volume and density columns", Box::new(|| criterion_4(&rows))),
        ("5 record density sweep", Box::new(criterion_5)),
        ("6 geodesic ODE and unit speed", Box::new(criterion_6)),
        ("7 jacobian vs finite differences", Box::new(criterion_7)),
        ("8 small ball and monotonicity", Box::new(criterion_8)),
        ("9 group relations", Box::new(criterion_9)),
    ];
    let mut failures = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        let o = run();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {} ({:.1?})", o.detail, t.elapsed());
        failures += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed in {:.1?}", criteria.len() - failures, criteria.len(), start.elapsed());
    if failures > 0 {
        std::process::exit(1);
    }
}
