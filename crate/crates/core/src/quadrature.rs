//! One-dimensional adaptive quadrature.
//!
//! Two rules are available: globally adaptive Gauss–Legendre panels
//! (the panel with the largest error estimate is bisected first) and
//! classic recursive adaptive Simpson. Integrands may fail, in which case
//! the first error is propagated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureRule {
    GaussLegendre(usize),
    AdaptiveSimpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub rule: QuadratureRule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-9, rel_tol: 1e-8, max_subdivisions: 400, rule: QuadratureRule::GaussLegendre(10) }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidQuadratureSpec("tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidQuadratureSpec("max_subdivisions must be at least 1".into()));
        }
        if let QuadratureRule::GaussLegendre(n) = self.rule {
            if n < 2 {
                return Err(Error::InvalidQuadratureSpec("Gauss-Legendre order must be >= 2".into()));
            }
        }
        Ok(())
    }

    /// Same rule with both tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { abs_tol: self.abs_tol * factor, rel_tol: self.rel_tol * factor, ..*self }
    }

    /// Stable textual key, used for caching sweep results.
    pub fn cache_key(&self) -> String {
        let rule = match self.rule {
            QuadratureRule::GaussLegendre(n) => format!("gl{n}"),
            QuadratureRule::AdaptiveSimpson => "simpson".to_string(),
        };
        format!("{rule}-a{:e}-r{:e}-m{}", self.abs_tol, self.rel_tol, self.max_subdivisions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

type Rule = std::sync::Arc<(Vec<f64>, Vec<f64>)>;

fn cached_rule(n: usize) -> Rule {
    static CACHE: OnceLock<std::sync::Mutex<Vec<(usize, Rule)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some((_, rule)) = guard.iter().find(|(k, _)| *k == n) {
        return rule.clone();
    }
    let rule = std::sync::Arc::new(gauss_legendre(n));
    guard.push((n, rule.clone()));
    rule
}

fn gl_panel<F>(f: &mut F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in rule.0.iter().zip(&rule.1) {
        sum += w * f(mid + half * x)?;
    }
    Ok(sum * half)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive_gl<F>(mut f: F, a: f64, b: f64, n: usize, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let rule = cached_rule(n);
    let mut evaluations = 0;
    let refine = |f: &mut F, a: f64, b: f64, coarse: f64| -> Result<(Panel, Panel)> {
        let m = 0.5 * (a + b);
        let l = gl_panel(f, a, m, &rule)?;
        let r = gl_panel(f, m, b, &rule)?;
        let err = (l + r - coarse).abs();
        Ok((Panel { a, b: m, value: l, error: 0.5 * err }, Panel { a: m, b, value: r, error: 0.5 * err }))
    };

    let whole = gl_panel(&mut f, a, b, &rule)?;
    let (l, r) = refine(&mut f, a, b, whole)?;
    evaluations += 3 * n;
    let mut heap = BinaryHeap::new();
    heap.push(l);
    heap.push(r);
    let mut subdivisions = 1;
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let target = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadratureResult { value, error, evaluations });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::QuadratureFailure { estimate: value, error });
        }
        let worst = heap.pop().expect("heap holds at least two panels");
        let (l, r) = refine(&mut f, worst.a, worst.b, worst.value)?;
        evaluations += 2 * n;
        heap.push(l);
        heap.push(r);
        subdivisions += 1;
    }
}

fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    struct Ctx {
        subdivisions: usize,
        evaluations: usize,
        error: f64,
        max: usize,
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: FnMut(f64) -> Result<f64>>(
        f: &mut F,
        ctx: &mut Ctx,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        ctx.evaluations += 2;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || ctx.subdivisions >= ctx.max {
            ctx.error += delta.abs() / 15.0;
            return Ok(left + right + delta / 15.0);
        }
        ctx.subdivisions += 1;
        Ok(recurse(f, ctx, a, m, fa, flm, fm, left, 0.5 * tol)? + recurse(f, ctx, m, b, fm, frm, fb, right, 0.5 * tol)?)
    }

    let fa = f(a)?;
    let fb = f(b)?;
    let fm = f(0.5 * (a + b))?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut ctx = Ctx { subdivisions: 0, evaluations: 3, error: 0.0, max: spec.max_subdivisions };
    // Relative tolerance needs a magnitude estimate; the coarse rule supplies it.
    let tol = spec.abs_tol.max(spec.rel_tol * whole.abs());
    let value = recurse(&mut f, &mut ctx, a, b, fa, fm, fb, whole, tol)?;
    let target = spec.abs_tol.max(spec.rel_tol * value.abs());
    if ctx.subdivisions >= ctx.max && ctx.error > target {
        return Err(Error::QuadratureFailure { estimate: value, error: ctx.error });
    }
    Ok(QuadratureResult { value, error: ctx.error, evaluations: ctx.evaluations })
}

/// Integrates a fallible integrand over `[a, b]`.
pub fn try_integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if a == b {
        return Ok(QuadratureResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    if a > b {
        return try_integrate(f, b, a, spec).map(|r| QuadratureResult { value: -r.value, ..r });
    }
    match spec.rule {
        QuadratureRule::GaussLegendre(n) => adaptive_gl(f, a, b, n, spec),
        QuadratureRule::AdaptiveSimpson => adaptive_simpson(f, a, b, spec),
    }
}

/// Integrates an infallible integrand over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, spec)
}
