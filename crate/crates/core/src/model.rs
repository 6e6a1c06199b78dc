//! Projective hyperboloid model: points, charts, the metric and isometries.
//!
//! Points are homogeneous row vectors `(x0; x1; x2; x3)` taken up to positive
//! scale. The interior of the one-sheeted hyperboloid solid is the set where
//! the quadratic form `-x0² - x1² + x2² + x3²` is negative. Isometries act on
//! the right: a point `X` is mapped to `X·M`, and the composition "first `g`,
//! then `h`" is the matrix product `g·h`.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{Matrix3, Matrix4, RowVector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Signature `(- - + +)` quadratic form of the model.
#[inline]
pub fn form(x0: f64, x1: f64, x2: f64, x3: f64) -> f64 {
    -x0 * x0 - x1 * x1 + x2 * x2 + x3 * x3
}

/// A homogeneous point of projective 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

/// Fibre-adapted hyperboloid coordinates `(r, θ, φ)`.
///
/// `r` and `θ` are polar coordinates of the foot point in the base plane and
/// `φ` is the fibre coordinate. `φ` is an unrestricted real on the universal
/// cover; chart conversions return principal values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperboloidCoords {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Inhomogeneous coordinates `x = x1/x0`, `y = x2/x0`, `z = x3/x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanModelPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ProjectivePoint {
    /// The origin `E0(1;0;0;0)`.
    pub const ORIGIN: ProjectivePoint = ProjectivePoint { x0: 1.0, x1: 0.0, x2: 0.0, x3: 0.0 };

    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub fn from_row(row: &RowVector4<f64>) -> Self {
        Self::new(row[0], row[1], row[2], row[3])
    }

    pub fn to_row(&self) -> RowVector4<f64> {
        RowVector4::new(self.x0, self.x1, self.x2, self.x3)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    pub fn form(&self) -> f64 {
        form(self.x0, self.x1, self.x2, self.x3)
    }

    pub fn is_interior(&self) -> bool {
        self.form() < 0.0
    }

    fn check_interior(&self) -> Result<()> {
        let f = self.form();
        if f < 0.0 && f.is_finite() {
            Ok(())
        } else {
            Err(Error::NonInteriorPoint { form: f })
        }
    }

    /// Positive rescaling to form value `-1`.
    pub fn normalize(&self) -> Result<Self> {
        self.check_interior()?;
        let k = (-self.form()).sqrt().recip();
        Ok(Self::new(self.x0 * k, self.x1 * k, self.x2 * k, self.x3 * k))
    }

    /// Inverse of the hyperboloid parametrization.
    ///
    /// `r` is recovered from `sinh r = √(x2² + x3²)` on the normalized point,
    /// which stays accurate near the axis.
    pub fn to_hyperboloid(&self) -> Result<HyperboloidCoords> {
        let p = self.normalize()?;
        let r = p.x2.hypot(p.x3).asinh();
        let phi = p.x1.atan2(p.x0);
        let theta = if r > 0.0 { phi + p.x3.atan2(p.x2) } else { 0.0 };
        Ok(HyperboloidCoords { r, theta, phi })
    }

    pub fn to_euclidean(&self) -> Result<EuclideanModelPoint> {
        if self.x0 == 0.0 {
            return Err(Error::AtInfinity);
        }
        Ok(EuclideanModelPoint { x: self.x1 / self.x0, y: self.x2 / self.x0, z: self.x3 / self.x0 })
    }

    /// Point of the model corresponding to the unimodular matrix
    /// `[[d, b], [c, a]]`.
    pub fn from_sl2(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > 1e-10 * (1.0 + (a * d).abs() + (b * c).abs()) {
            return Err(Error::NotUnitDeterminant { det });
        }
        Ok(Self::new((a + d) / 2.0, (b - c) / 2.0, (b + c) / 2.0, (a - d) / 2.0))
    }

    /// Inverse of [`ProjectivePoint::from_sl2`], returning `(a, b, c, d)`.
    pub fn to_sl2(&self) -> Result<(f64, f64, f64, f64)> {
        let p = self.normalize()?;
        Ok((p.x0 + p.x3, p.x1 + p.x2, p.x2 - p.x1, p.x0 - p.x3))
    }

    /// Intersection of the fibre through this point with the base plane
    /// `x1 = 0`.
    pub fn foot_point(&self) -> Result<Self> {
        self.check_interior()?;
        let ProjectivePoint { x0, x1, x2, x3 } = *self;
        Self::new(x0 * x0 + x1 * x1, 0.0, x0 * x2 - x1 * x3, x0 * x3 + x1 * x2).normalize()
    }

    /// Image `X·M` under the right action of an isometry.
    pub fn transform(&self, m: &Isometry) -> Self {
        Self::from_row(&(self.to_row() * m.matrix()))
    }

    /// Equality up to positive scale, compared after normalizing both points.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match (self.normalize(), other.normalize()) {
            (Ok(a), Ok(b)) => (a.to_row() - b.to_row()).amax() <= tol,
            _ => false,
        }
    }
}

impl HyperboloidCoords {
    pub const fn new(r: f64, theta: f64, phi: f64) -> Self {
        Self { r, theta, phi }
    }

    /// Hyperboloid parametrization; the result has form value exactly `-1`
    /// up to rounding.
    pub fn to_point(&self) -> Result<ProjectivePoint> {
        if self.r < 0.0 {
            return Err(Error::NegativeRadius(self.r));
        }
        let (ch, sh) = (self.r.cosh(), self.r.sinh());
        let (sp, cp) = self.phi.sin_cos();
        let (sd, cd) = (self.theta - self.phi).sin_cos();
        Ok(ProjectivePoint::new(ch * cp, ch * sp, sh * cd, sh * sd))
    }
}

impl EuclideanModelPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_point(&self) -> ProjectivePoint {
        ProjectivePoint::new(1.0, self.x, self.y, self.z)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Metric tensor in `(r, θ, φ)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g: Matrix3<f64>,
}

impl MetricTensor {
    pub fn at(r: f64) -> Result<Self> {
        if r < 0.0 {
            return Err(Error::NegativeRadius(r));
        }
        let sh2 = r.sinh().powi(2);
        let ch2 = r.cosh().powi(2);
        #[rustfmt::skip]
        let g = Matrix3::new(
            1.0, 0.0,               0.0,
            0.0, sh2 * (sh2 + ch2), sh2,
            0.0, sh2,               1.0,
        );
        Ok(Self { g })
    }

    pub fn determinant(&self) -> f64 {
        self.g.determinant()
    }

    /// Squared length of a coordinate velocity `(dr, dθ, dφ)`.
    pub fn norm_squared(&self, v: [f64; 3]) -> f64 {
        let v = nalgebra::Vector3::from(v);
        (v.transpose() * self.g * v)[0]
    }
}

pub fn metric_at(r: f64) -> Result<MetricTensor> {
    MetricTensor::at(r)
}

/// Riemannian volume density `√det g = ½ sinh 2r`.
pub fn volume_element(r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::NegativeRadius(r));
    }
    Ok(0.5 * (2.0 * r).sinh())
}

/// An isometry as a 4×4 matrix acting on row vectors, defined up to
/// positive scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry(Matrix4<f64>);

impl Isometry {
    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn from_matrix(m: Matrix4<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// Fibre translation `S(φ)`.
    pub fn fibre_translation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        #[rustfmt::skip]
        let m = Matrix4::new(
             c,   s,   0.0, 0.0,
            -s,   c,   0.0, 0.0,
             0.0, 0.0, c,  -s,
             0.0, 0.0, s,   c,
        );
        Self(m)
    }

    /// Translation `T` taking the origin to `p` (`E0·T = p`).
    pub fn translation_to(p: &ProjectivePoint) -> Result<Self> {
        let ProjectivePoint { x0, x1, x2, x3 } = p.normalize()?;
        #[rustfmt::skip]
        let m = Matrix4::new(
             x0,  x1,  x2,  x3,
            -x1,  x0,  x3, -x2,
             x2,  x3,  x0,  x1,
             x3, -x2, -x1,  x0,
        );
        Ok(Self(m))
    }

    /// Inverse of [`Isometry::translation_to`], taking `p` back to the origin.
    pub fn translation_from(p: &ProjectivePoint) -> Result<Self> {
        let ProjectivePoint { x0, x1, x2, x3 } = p.normalize()?;
        #[rustfmt::skip]
        let m = Matrix4::new(
             x0, -x1, -x2, -x3,
             x1,  x0, -x3,  x2,
            -x2, -x3,  x0, -x1,
            -x3,  x2,  x1,  x0,
        );
        Ok(Self(m))
    }

    /// Rotation by `omega` about the fibre through the origin.
    pub fn rotation_about_origin_fibre(omega: f64) -> Self {
        let (s, c) = reduce_angle(omega).sin_cos();
        #[rustfmt::skip]
        let m = Matrix4::new(
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0,  c,   s,
            0.0, 0.0, -s,   c,
        );
        Self(m)
    }

    /// Rotation by `omega` about the fibre through `x`, by conjugating the
    /// origin rotation with the translation to `x`.
    pub fn rotation_about_fibre(x: &ProjectivePoint, omega: f64) -> Result<Self> {
        let t = Self::translation_to(x)?;
        let t_inv = Self::translation_from(x)?;
        Ok(t_inv * Self::rotation_about_origin_fibre(omega) * t)
    }

    /// "First `self`, then `other`".
    pub fn then(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn inverse(&self) -> Self {
        // Every generated isometry is invertible; the fallback only triggers
        // on corrupted input.
        Self(self.0.try_inverse().unwrap_or_else(|| Matrix4::from_element(f64::NAN)))
    }

    pub fn pow(&self, n: i32) -> Self {
        let mut base = if n < 0 { self.inverse() } else { *self };
        let mut acc = Self::identity();
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// The matrix divided by its largest-magnitude entry's absolute value.
    /// Sign is preserved, so positive proportionality is the only freedom
    /// removed.
    pub fn scale_normalized(&self) -> Matrix4<f64> {
        let m = self.0.amax();
        if m == 0.0 {
            self.0
        } else {
            self.0 / m
        }
    }

    /// Largest entrywise deviation between the scale-normalized matrices.
    pub fn projective_residual(&self, other: &Self) -> f64 {
        (self.scale_normalized() - other.scale_normalized()).amax()
    }

    /// Whether `self = c·other` for some `c > 0` within `tol` after scale
    /// normalization.
    pub fn approx_eq_up_to_scale(&self, other: &Self, tol: f64) -> bool {
        self.projective_residual(other) <= tol
    }

    /// Residuals of the row structure of an isometry matrix after removing
    /// the positive scale: returns the largest violation over the two norm
    /// conditions, the two orthogonality conditions and the row-pairing
    /// pattern, minimized over the two sign choices.
    pub fn row_condition_residual(&self) -> f64 {
        let m = &self.0;
        let row = |i: usize| [m[(i, 0)], m[(i, 1)], m[(i, 2)], m[(i, 3)]];
        let n0 = -form(m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(0, 3)]);
        if !(n0 > 0.0) {
            return f64::INFINITY;
        }
        let k = n0.sqrt().recip();
        let a0 = row(0).map(|v| v * k);
        let a1 = row(1).map(|v| v * k);
        let a2 = row(2).map(|v| v * k);
        let a3 = row(3).map(|v| v * k);

        let norm0 = (form(a0[0], a0[1], a0[2], a0[3]) + 1.0).abs();
        let norm2 = (form(a2[0], a2[1], a2[2], a2[3]) - 1.0).abs();
        let orth1 = (-a0[0] * a2[0] - a0[1] * a2[1] + a0[2] * a2[2] + a0[3] * a2[3]).abs();
        let orth2 = (-a0[0] * a2[1] + a0[1] * a2[0] - a0[2] * a2[3] + a0[3] * a2[2]).abs();

        let pattern = |sign: f64| {
            let e1 = [-a0[1], a0[0], a0[3], -a0[2]].map(|v| v * sign);
            let e3 = [a2[1], -a2[0], -a2[3], a2[2]].map(|v| v * sign);
            (0..4).map(|j| (a1[j] - e1[j]).abs().max((a3[j] - e3[j]).abs())).fold(0.0, f64::max)
        };
        let pat = pattern(1.0).min(pattern(-1.0));
        [norm0, norm2, orth1, orth2, pat].into_iter().fold(0.0, f64::max)
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        Isometry(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Isometry> for &'a Isometry {
    type Output = Isometry;

    fn mul(self, rhs: &'a Isometry) -> Isometry {
        Isometry(self.0 * rhs.0)
    }
}

/// Reduces an angle into `(-π, π]`.
pub fn reduce_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}
