//! Closed-form unit-speed geodesics from the origin.
//!
//! With `k = cos 2α` every direction is handled by one formula:
//!
//! ```text
//! S_k(s) = sinh(s√k)/√k      C_k(s) = cosh(s√k)
//! r  = arsinh(cos α · S_k(s))
//! θ  = -atan2(sin α · S_k(s), C_k(s))
//! φ  = 2 s sin α + θ
//! ```
//!
//! For `k < 0` the hyperbolic functions turn into their circular
//! counterparts, and at `k = 0` (light directions) `S_k(s) = s`, `C_k(s) = 1`.
//! Using `atan2` instead of `arctan(sin α · tanh)` keeps `θ` continuous past
//! `s√-k = π/2` on fibre-like geodesics.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EuclideanModelPoint, HyperboloidCoords};

/// Below this value of `|k s²|` the kernel switches to its power series.
const SERIES_THRESHOLD: f64 = 1e-2;

/// Arc length, longitude and altitude of a unit-speed geodesic from the
/// origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParams {
    pub s: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl GeodesicParams {
    pub const fn new(s: f64, lambda: f64, alpha: f64) -> Self {
        Self { s, lambda, alpha }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeodesicRegime {
    H2Like,
    Light,
    FibreLike,
}

impl GeodesicRegime {
    pub fn classify(alpha: f64) -> Self {
        let a = alpha.abs();
        if (a - FRAC_PI_4).abs() <= 4.0 * f64::EPSILON {
            GeodesicRegime::Light
        } else if a < FRAC_PI_4 {
            GeodesicRegime::H2Like
        } else {
            GeodesicRegime::FibreLike
        }
    }
}

/// `S_k`, `C_k` and their partial derivatives with respect to `k`.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    s_k: f64,
    c_k: f64,
    ds_dk: f64,
    dc_dk: f64,
}

impl Kernel {
    fn eval(k: f64, s: f64) -> Self {
        let x2 = k * s * s;
        let (s_k, ds_dk) = if x2.abs() < SERIES_THRESHOLD {
            let s_series = s * (1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0))));
            let s3 = s * s * s;
            let d_series =
                s3 * (1.0 / 6.0 + x2 * (1.0 / 60.0 + x2 * (1.0 / 1680.0 + x2 * (1.0 / 90720.0 + x2 / 7983360.0))));
            (s_series, d_series)
        } else {
            let (s_k, c_k) = if k > 0.0 {
                let w = k.sqrt();
                ((s * w).sinh() / w, (s * w).cosh())
            } else {
                let w = (-k).sqrt();
                ((s * w).sin() / w, (s * w).cos())
            };
            (s_k, (s * c_k - s_k) / (2.0 * k))
        };
        let c_k = if k > 0.0 {
            (s * k.sqrt()).cosh()
        } else if k < 0.0 {
            (s * (-k).sqrt()).cos()
        } else {
            1.0
        };
        Kernel { s_k, c_k, ds_dk, dc_dk: 0.5 * s * s_k }
    }
}

/// Closed-form coordinates together with their first partials in `(s, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicJet {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub dr_ds: f64,
    pub dr_dalpha: f64,
    pub dtheta_ds: f64,
    pub dtheta_dalpha: f64,
    pub dphi_ds: f64,
    pub dphi_dalpha: f64,
}

impl GeodesicJet {
    pub fn coords(&self) -> HyperboloidCoords {
        HyperboloidCoords::new(self.r, self.theta, self.phi)
    }

    /// `∂(r, φ)/∂(s, α)`.
    pub fn jacobian(&self) -> f64 {
        self.dr_ds * self.dphi_dalpha - self.dr_dalpha * self.dphi_ds
    }
}

fn check_arc_length(s: f64) -> Result<()> {
    if s < 0.0 || s.is_nan() {
        Err(Error::NegativeArcLength(s))
    } else {
        Ok(())
    }
}

/// Evaluates the closed-form geodesic and its partial derivatives.
///
/// Valid for any real `α`; the formulas are odd in `α` for `θ`, `φ` and even
/// for `r`, which is the reflection symmetry of the geodesic family.
pub fn geodesic_jet(s: f64, alpha: f64) -> Result<GeodesicJet> {
    check_arc_length(s)?;
    let (sa, ca) = alpha.sin_cos();
    let k = (2.0 * alpha).cos();
    let dk = -2.0 * (2.0 * alpha).sin();
    let ker = Kernel::eval(k, s);

    // r = arsinh(u), u = cos α · S
    let u = ca * ker.s_k;
    let r = u.asinh();
    let inv = (1.0 + u * u).sqrt().recip();
    let du_ds = ca * ker.c_k;
    let du_da = -sa * ker.s_k + ca * ker.ds_dk * dk;

    // θ = -atan2(num, den), num = sin α · S, den = C
    let num = sa * ker.s_k;
    let den = ker.c_k;
    let theta = -num.atan2(den);
    let dnum_ds = sa * ker.c_k;
    let dden_ds = k * ker.s_k;
    let dnum_da = ca * ker.s_k + sa * ker.ds_dk * dk;
    let dden_da = ker.dc_dk * dk;
    let q = num * num + den * den;
    let dtheta_ds = -(den * dnum_ds - num * dden_ds) / q;
    let dtheta_da = -(den * dnum_da - num * dden_da) / q;

    Ok(GeodesicJet {
        r,
        theta,
        phi: 2.0 * s * sa + theta,
        dr_ds: du_ds * inv,
        dr_dalpha: du_da * inv,
        dtheta_ds,
        dtheta_dalpha: dtheta_da,
        dphi_ds: 2.0 * sa + dtheta_ds,
        dphi_dalpha: 2.0 * s * ca + dtheta_da,
    })
}

/// `(r, θ, φ)` of the geodesic with altitude `alpha` at arc length `s`.
pub fn geodesic_closed_form(s: f64, alpha: f64) -> Result<HyperboloidCoords> {
    geodesic_jet(s, alpha).map(|j| j.coords())
}

/// Hyperboloid coordinates of the geodesic point including the longitude.
pub fn geodesic_hyperboloid(g: &GeodesicParams) -> Result<HyperboloidCoords> {
    let h = geodesic_closed_form(g.s, g.alpha)?;
    Ok(HyperboloidCoords::new(h.r, h.theta + g.lambda, h.phi))
}

/// Euclidean model coordinates `(X, Y, Z)` of a geodesic point.
pub fn geodesic_point(g: &GeodesicParams) -> Result<EuclideanModelPoint> {
    let h = geodesic_closed_form(g.s, g.alpha)?;
    if h.phi.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::ChartOverflow(h.phi));
    }
    let scale = h.r.tanh() / h.phi.cos();
    let arg = h.theta - h.phi + g.lambda;
    Ok(EuclideanModelPoint::new(h.phi.tan(), scale * arg.cos(), scale * arg.sin()))
}

/// `|ds|² - 1` for the closed-form tangent, using the line element
/// `dr² + cosh²r sinh²r dθ² + (dφ + sinh²r dθ)²`.
pub fn unit_speed_residual(s: f64, alpha: f64) -> Result<f64> {
    let j = geodesic_jet(s, alpha)?;
    let sh2 = j.r.sinh().powi(2);
    let ch2 = j.r.cosh().powi(2);
    let fibre = j.dphi_ds + sh2 * j.dtheta_ds;
    Ok(j.dr_ds * j.dr_ds + ch2 * sh2 * j.dtheta_ds * j.dtheta_ds + fibre * fibre - 1.0)
}

/// Arc length at which a fibre-like geodesic reaches its largest `r`
/// (`s√-k = π/2`); `None` for H²-like and light directions, whose `r`
/// grows without bound.
pub fn fibre_like_turning_length(alpha: f64) -> Option<f64> {
    let k = (2.0 * alpha).cos();
    (k < 0.0).then(|| std::f64::consts::FRAC_PI_2 / (-k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Table-1 formulas in their original per-regime form.
    fn table_one(s: f64, alpha: f64) -> (f64, f64, f64) {
        let c2 = (2.0 * alpha).cos();
        let (r, th) = if alpha == FRAC_PI_4 {
            let h = std::f64::consts::SQRT_2 / 2.0 * s;
            (h.asinh(), -h.atan())
        } else if c2 > 0.0 {
            let w = c2.sqrt();
            ((alpha.cos() / w * (s * w).sinh()).asinh(), -(alpha.sin() / w * (s * w).tanh()).atan())
        } else {
            let w = (-c2).sqrt();
            ((alpha.cos() / w * (s * w).sin()).asinh(), -(alpha.sin() / w * (s * w).tan()).atan())
        };
        (r, th, 2.0 * alpha.sin() * s + th)
    }

    #[test]
    fn regime_classification() {
        assert_eq!(GeodesicRegime::classify(0.0), GeodesicRegime::H2Like);
        assert_eq!(GeodesicRegime::classify(FRAC_PI_4), GeodesicRegime::Light);
        assert_eq!(GeodesicRegime::classify(-FRAC_PI_4), GeodesicRegime::Light);
        assert_eq!(GeodesicRegime::classify(0.7), GeodesicRegime::H2Like);
        assert_eq!(GeodesicRegime::classify(0.8), GeodesicRegime::FibreLike);
        assert_eq!(GeodesicRegime::classify(FRAC_PI_2), GeodesicRegime::FibreLike);
    }

    #[test]
    fn radial_direction() {
        let h = geodesic_closed_form(0.9, 0.0).unwrap();
        assert_abs_diff_eq!(h.r, 0.9, epsilon = 1e-15);
        assert_eq!(h.theta, 0.0);
        assert_eq!(h.phi, 0.0);
    }

    #[test]
    fn fibre_direction() {
        for s in [0.2, 1.0, 1.5] {
            let h = geodesic_closed_form(s, FRAC_PI_2).unwrap();
            assert_abs_diff_eq!(h.r, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(h.theta, -s, epsilon = 1e-14);
            assert_abs_diff_eq!(h.phi, s, epsilon = 1e-14);
        }
    }

    #[test]
    fn light_direction_matches_table() {
        let h = geodesic_closed_form(1.0, FRAC_PI_4).unwrap();
        let half_root2 = std::f64::consts::SQRT_2 / 2.0;
        assert_abs_diff_eq!(h.r, half_root2.asinh(), epsilon = 1e-15);
        assert_abs_diff_eq!(h.theta, -half_root2.atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(h.phi, std::f64::consts::SQRT_2 - half_root2.atan(), epsilon = 1e-15);
    }

    #[test]
    fn agrees_with_per_regime_formulas() {
        for &alpha in &[0.0, 0.1, 0.4, 0.7, FRAC_PI_4, 0.9, 1.2, 1.5] {
            for &s in &[0.05, 0.5, 1.0, 1.4] {
                let h = geodesic_closed_form(s, alpha).unwrap();
                let (r, th, ph) = table_one(s, alpha);
                assert_abs_diff_eq!(h.r, r, epsilon = 1e-13);
                assert_abs_diff_eq!(h.theta, th, epsilon = 1e-13);
                assert_abs_diff_eq!(h.phi, ph, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn continuity_across_light_direction() {
        let light = geodesic_closed_form(1.2, FRAC_PI_4).unwrap();
        for da in [-1e-6, 1e-6] {
            let h = geodesic_closed_form(1.2, FRAC_PI_4 + da).unwrap();
            assert!((h.r - light.r).abs() < 1e-5);
            assert!((h.theta - light.theta).abs() < 1e-5);
            assert!((h.phi - light.phi).abs() < 1e-5);
        }
    }

    #[test]
    fn negative_altitude_reflects() {
        let a = geodesic_closed_form(0.8, 0.6).unwrap();
        let b = geodesic_closed_form(0.8, -0.6).unwrap();
        assert_eq!(a.r, b.r);
        assert_eq!(a.theta, -b.theta);
        assert_eq!(a.phi, -b.phi);
    }

    #[test]
    fn negative_arc_length_is_rejected() {
        assert_eq!(geodesic_closed_form(-0.1, 0.2), Err(Error::NegativeArcLength(-0.1)));
    }

    #[test]
    fn geodesic_point_examples() {
        for (l, a) in [(0.0, 0.0), (1.0, 0.5), (-2.0, -1.2)] {
            let e = geodesic_point(&GeodesicParams::new(0.0, l, a)).unwrap();
            assert_eq!(e.norm(), 0.0);
        }
        let e = geodesic_point(&GeodesicParams::new(0.5, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(e.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.y, 0.5f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(e.z, 0.0, epsilon = 1e-15);

        let e = geodesic_point(&GeodesicParams::new(0.5, FRAC_PI_2, 0.0)).unwrap();
        assert_abs_diff_eq!(e.y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.z, 0.5f64.tanh(), epsilon = 1e-15);

        assert!(matches!(
            geodesic_point(&GeodesicParams::new(PI / 2.0 + 0.1, 0.0, FRAC_PI_2)),
            Err(Error::ChartOverflow(_))
        ));
    }

    #[test]
    fn geodesic_point_matches_model_chart() {
        let g = GeodesicParams::new(1.1, 0.7, 0.3);
        let e = geodesic_point(&g).unwrap();
        let via_chart = geodesic_hyperboloid(&g).unwrap().to_point().unwrap().to_euclidean().unwrap();
        assert_abs_diff_eq!(e.x, via_chart.x, epsilon = 1e-13);
        assert_abs_diff_eq!(e.y, via_chart.y, epsilon = 1e-13);
        assert_abs_diff_eq!(e.z, via_chart.z, epsilon = 1e-13);
    }

    #[test]
    fn partials_match_finite_differences() {
        let h = 1e-6;
        for &(s, alpha) in &[(0.5, 0.0), (0.8, 0.6), (1.3, 0.2), (0.7, 1.1), (2.0, 1.4), (1.0, 0.786)] {
            let j = geodesic_jet(s, alpha).unwrap();
            let f = |s: f64, a: f64| geodesic_closed_form(s, a).unwrap();
            let (sp, sm) = (f(s + h, alpha), f(s - h, alpha));
            let (ap, am) = (f(s, alpha + h), f(s, alpha - h));
            assert_abs_diff_eq!(j.dr_ds, (sp.r - sm.r) / (2.0 * h), epsilon = 1e-8);
            assert_abs_diff_eq!(j.dphi_ds, (sp.phi - sm.phi) / (2.0 * h), epsilon = 1e-8);
            assert_abs_diff_eq!(j.dtheta_ds, (sp.theta - sm.theta) / (2.0 * h), epsilon = 1e-8);
            assert_abs_diff_eq!(j.dr_dalpha, (ap.r - am.r) / (2.0 * h), epsilon = 1e-8);
            assert_abs_diff_eq!(j.dphi_dalpha, (ap.phi - am.phi) / (2.0 * h), epsilon = 1e-8);
            assert_abs_diff_eq!(j.dtheta_dalpha, (ap.theta - am.theta) / (2.0 * h), epsilon = 1e-8);
        }
    }

    #[test]
    fn fibre_like_turning_point() {
        assert_eq!(fibre_like_turning_length(0.3), None);
        let s = fibre_like_turning_length(1.2).unwrap();
        assert!(geodesic_jet(s, 1.2).unwrap().dr_ds.abs() < 1e-12);
    }
}
