//! Geodesic equations in hyperboloid coordinates and an adaptive
//! Dormand–Prince 5(4) integrator.
//!
//! This path is kept independent of the closed forms in [`crate::geodesic`]
//! so each can check the other. The only shared step is the bootstrap off
//! the axis, where the θ equation is singular.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::geodesic_jet;

/// Position and velocity along a geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub dr: f64,
    pub dtheta: f64,
    pub dphi: f64,
}

/// Arc length of the closed-form step used to leave the axis.
pub const BOOTSTRAP_STEP: f64 = 1e-4;

impl GeodesicState {
    fn to_array(self) -> [f64; 6] {
        [self.r, self.theta, self.phi, self.dr, self.dtheta, self.dphi]
    }

    fn from_array(y: [f64; 6]) -> Self {
        Self { r: y[0], theta: y[1], phi: y[2], dr: y[3], dtheta: y[4], dphi: y[5] }
    }

    /// Squared speed `dr² + cosh²r sinh²r dθ² + (dφ + sinh²r dθ)²`.
    pub fn speed_squared(&self) -> f64 {
        let sh2 = self.r.sinh().powi(2);
        let ch2 = self.r.cosh().powi(2);
        let fibre = self.dphi + sh2 * self.dtheta;
        self.dr * self.dr + ch2 * sh2 * self.dtheta * self.dtheta + fibre * fibre
    }

    /// State at arc length `h` on the geodesic leaving the origin with
    /// altitude `alpha`, taken from the closed form.
    pub fn bootstrap(alpha: f64, h: f64) -> Result<Self> {
        let j = geodesic_jet(h, alpha)?;
        Ok(Self { r: j.r, theta: j.theta, phi: j.phi, dr: j.dr_ds, dtheta: j.dtheta_ds, dphi: j.dphi_ds })
    }
}

/// Right-hand side of the geodesic system.
///
/// Derived from the Christoffel symbols of the metric; the θ equation
/// carries a leading minus sign.
pub fn geodesic_rhs(y: &[f64; 6]) -> [f64; 6] {
    let [r, _theta, _phi, dr, dth, dph] = *y;
    let s2 = (2.0 * r).sinh();
    let ddr = s2 * dth * dph + 0.5 * ((4.0 * r).sinh() - s2) * dth * dth;
    let ddphi = 2.0 * dr * r.tanh() * (2.0 * r.sinh().powi(2) * dth + dph);
    let ddtheta = -2.0 * dr / s2 * ((3.0 * (2.0 * r).cosh() - 1.0) * dth + 2.0 * dph);
    [dr, dth, dph, ddr, ddtheta, ddphi]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Local error tolerance per step (mixed absolute/relative).
    pub tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { tol: 1e-10, initial_step: 1e-3, min_step: 1e-14, max_steps: 1_000_000 }
    }
}

/// Result of an integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub state: GeodesicState,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn dopri_step(y: &[f64; 6], h: f64) -> ([f64; 6], f64) {
    let mut k = [[0.0; 6]; 7];
    k[0] = geodesic_rhs(y);
    for stage in 1..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = A[stage][j];
            if a != 0.0 {
                for (yv, kv) in yi.iter_mut().zip(kj) {
                    *yv += h * a * kv;
                }
            }
        }
        k[stage] = geodesic_rhs(&yi);
    }
    let mut y5 = *y;
    let mut err = 0.0f64;
    for i in 0..6 {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for stage in 0..7 {
            d5 += B5[stage] * k[stage][i];
            d4 += B4[stage] * k[stage][i];
        }
        y5[i] += h * d5;
        let scale = 1.0 + y[i].abs().max(y5[i].abs());
        err = err.max((h * (d5 - d4)).abs() / scale);
    }
    (y5, err)
}

/// Integrates the geodesic system from `s_start` to `s_end`.
pub fn integrate(initial: GeodesicState, s_start: f64, s_end: f64, opts: &OdeOptions) -> Result<OdeSolution> {
    if initial.r == 0.0 {
        return Err(Error::SingularStart);
    }
    let mut y = initial.to_array();
    let mut s = s_start;
    let mut h = opts.initial_step.min(s_end - s_start);
    let mut accepted = 0;
    let mut rejected = 0;
    while s < s_end {
        if accepted + rejected >= opts.max_steps || h < opts.min_step {
            return Err(Error::StepSizeUnderflow { s, h });
        }
        let step = h.min(s_end - s);
        let (y_new, err) = dopri_step(&y, step);
        if err <= opts.tol || step <= opts.min_step {
            y = y_new;
            s += step;
            accepted += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * (opts.tol / err).powf(0.2)).clamp(0.2, 5.0) };
        h = step * factor;
    }
    Ok(OdeSolution { state: GeodesicState::from_array(y), accepted_steps: accepted, rejected_steps: rejected })
}

/// Integrates the geodesic leaving the origin with altitude `alpha` up to
/// arc length `s_end`, bootstrapping off the axis with one closed-form step.
pub fn integrate_from_origin(alpha: f64, s_end: f64, opts: &OdeOptions) -> Result<OdeSolution> {
    if s_end < 0.0 {
        return Err(Error::NegativeArcLength(s_end));
    }
    let h = BOOTSTRAP_STEP.min(s_end);
    let start = GeodesicState::bootstrap(alpha, h)?;
    if s_end == h {
        return Ok(OdeSolution { state: start, accepted_steps: 0, rejected_steps: 0 });
    }
    if start.r == 0.0 {
        // Pure fibre direction: r stays 0 and θ̇ = -1, φ̇ = 1.
        return Ok(OdeSolution {
            state: GeodesicState { r: 0.0, theta: -s_end, phi: s_end, dr: 0.0, dtheta: -1.0, dphi: 1.0 },
            accepted_steps: 0,
            rejected_steps: 0,
        });
    }
    integrate(start, h, s_end, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::geodesic_closed_form;
    use approx::assert_abs_diff_eq;

    #[test]
    fn radial_geodesic() {
        let sol = integrate_from_origin(0.0, 1.0, &OdeOptions::default()).unwrap();
        assert_abs_diff_eq!(sol.state.r, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sol.state.theta, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.state.phi, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn matches_closed_form() {
        for (alpha, s) in [(0.3, 2.0), (0.6, 1.5), (1.0, 1.8), (-0.4, 1.2)] {
            let sol = integrate_from_origin(alpha, s, &OdeOptions::default()).unwrap();
            let h = geodesic_closed_form(s, alpha).unwrap();
            assert_abs_diff_eq!(sol.state.r, h.r, epsilon = 1e-8);
            assert_abs_diff_eq!(sol.state.theta, h.theta, epsilon = 1e-8);
            assert_abs_diff_eq!(sol.state.phi, h.phi, epsilon = 1e-8);
        }
    }

    #[test]
    fn speed_is_conserved() {
        let sol = integrate_from_origin(0.9, 2.0, &OdeOptions::default()).unwrap();
        assert!((sol.state.speed_squared() - 1.0).abs() < 2e-9);
    }

    #[test]
    fn axis_start_is_singular() {
        let st = GeodesicState { r: 0.0, theta: 0.0, phi: 0.0, dr: 1.0, dtheta: 0.0, dphi: 0.0 };
        assert_eq!(integrate(st, 0.0, 1.0, &OdeOptions::default()), Err(Error::SingularStart));
    }

    #[test]
    fn tiny_step_floor_reports_underflow() {
        let start = GeodesicState::bootstrap(0.5, 1e-4).unwrap();
        let opts = OdeOptions { tol: 1e-30, min_step: 1e-3, initial_step: 1e-2, ..Default::default() };
        assert!(matches!(integrate(start, 1e-4, 1.0, &opts), Err(Error::StepSizeUnderflow { .. })));
    }
}
