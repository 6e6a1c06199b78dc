//! Python bindings: points, isometries, geodesics, distances, volumes,
//! prism tilings and packings.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sl2r::distance::{self, DistanceSolution};
use sl2r::geodesic::{self, GeodesicParams};
use sl2r::mesh;
use sl2r::model::{self, EuclideanModelPoint, HyperboloidCoords, ProjectivePoint};
use sl2r::packing::{self, PackingResult, SweepCache, SweepOptions};
use sl2r::quadrature::QuadratureSpec;
use sl2r::tiling::{self, PrismData, TilingParams};
use sl2r::volume;

create_exception!(sl2r_py, GeometryError, PyValueError, "A domain or solver error from the geometry kernel.");

fn err(e: sl2r::Error) -> PyErr {
    GeometryError::new_err(e.to_string())
}

fn spec_for(tol: Option<f64>) -> PyResult<QuadratureSpec> {
    let spec = match tol {
        Some(t) => QuadratureSpec { rel_tol: t, abs_tol: t / 10.0, ..QuadratureSpec::default() },
        None => QuadratureSpec::default(),
    };
    spec.validate().map_err(err)?;
    Ok(spec)
}

/// Homogeneous point `(x0; x1; x2; x3)` of the projective model.
#[pyclass(name = "Point", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyPoint(ProjectivePoint);

#[pymethods]
#[allow(clippy::wrong_self_convention)]
impl PyPoint {
    #[new]
    fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self(ProjectivePoint::new(x0, x1, x2, x3))
    }

    #[staticmethod]
    fn origin() -> Self {
        Self(ProjectivePoint::ORIGIN)
    }

    #[staticmethod]
    fn from_hyperboloid(r: f64, theta: f64, phi: f64) -> PyResult<Self> {
        HyperboloidCoords::new(r, theta, phi).to_point().map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_euclidean(x: f64, y: f64, z: f64) -> Self {
        Self(EuclideanModelPoint::new(x, y, z).to_point())
    }

    fn coords(&self) -> [f64; 4] {
        self.0.to_array()
    }

    /// `(r, theta, phi)`.
    fn to_hyperboloid(&self) -> PyResult<(f64, f64, f64)> {
        let h = self.0.to_hyperboloid().map_err(err)?;
        Ok((h.r, h.theta, h.phi))
    }

    /// `(x, y, z)`.
    fn to_euclidean(&self) -> PyResult<(f64, f64, f64)> {
        let e = self.0.to_euclidean().map_err(err)?;
        Ok((e.x, e.y, e.z))
    }

    fn is_interior(&self) -> bool {
        self.0.is_interior()
    }

    fn foot_point(&self) -> PyResult<Self> {
        self.0.foot_point().map(Self).map_err(err)
    }

    fn transform(&self, m: &PyIsometry) -> Self {
        Self(self.0.transform(&m.0))
    }

    #[pyo3(signature = (other, tol=1e-10))]
    fn approx_eq(&self, other: &PyPoint, tol: f64) -> bool {
        self.0.approx_eq(&other.0, tol)
    }

    fn __repr__(&self) -> String {
        let p = self.0;
        format!("Point({}, {}, {}, {})", p.x0, p.x1, p.x2, p.x3)
    }
}

/// Isometry acting on row vectors from the right.
#[pyclass(name = "Isometry", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyIsometry(model::Isometry);

#[pymethods]
impl PyIsometry {
    #[staticmethod]
    fn identity() -> Self {
        Self(model::Isometry::identity())
    }

    #[staticmethod]
    fn fibre_translation(phi: f64) -> Self {
        Self(model::Isometry::fibre_translation(phi))
    }

    #[staticmethod]
    fn rotation_about_origin_fibre(omega: f64) -> Self {
        Self(model::Isometry::rotation_about_origin_fibre(omega))
    }

    #[staticmethod]
    fn rotation_about_fibre(x: &PyPoint, omega: f64) -> PyResult<Self> {
        model::Isometry::rotation_about_fibre(&x.0, omega).map(Self).map_err(err)
    }

    /// Isometry taking the origin to `p`.
    #[staticmethod]
    fn translation_to(p: &PyPoint) -> PyResult<Self> {
        model::Isometry::translation_to(&p.0).map(Self).map_err(err)
    }

    fn rows(&self) -> [[f64; 4]; 4] {
        let m = self.0.matrix();
        std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn pow(&self, n: i32) -> Self {
        Self(self.0.pow(n))
    }

    /// "First self, then other".
    fn __mul__(&self, other: &PyIsometry) -> Self {
        Self(self.0 * other.0)
    }

    fn projective_residual(&self, other: &PyIsometry) -> f64 {
        self.0.projective_residual(&other.0)
    }

    #[pyo3(signature = (other, tol=1e-10))]
    fn approx_eq(&self, other: &PyIsometry, tol: f64) -> bool {
        self.0.approx_eq_up_to_scale(&other.0, tol)
    }
}

/// Geodesic distance with the parameters of a shortest geodesic.
#[pyclass(name = "DistanceResult", frozen, get_all)]
struct PyDistanceResult {
    distance: f64,
    s: f64,
    lambda_: f64,
    alpha: f64,
    residual: f64,
    branches: usize,
}

impl From<DistanceSolution> for PyDistanceResult {
    fn from(d: DistanceSolution) -> Self {
        Self {
            distance: d.distance,
            s: d.params.s,
            lambda_: d.params.lambda,
            alpha: d.params.alpha,
            residual: d.residual,
            branches: d.branches.len(),
        }
    }
}

#[pymethods]
impl PyDistanceResult {
    fn __repr__(&self) -> String {
        format!("DistanceResult(distance={}, residual={:e})", self.distance, self.residual)
    }
}

/// Euclidean model point at arc length `s` along the geodesic from the
/// origin with longitude `lam` and altitude `alpha`.
#[pyfunction]
fn geodesic_point(s: f64, lam: f64, alpha: f64) -> PyResult<(f64, f64, f64)> {
    let e = geodesic::geodesic_point(&GeodesicParams::new(s, lam, alpha)).map_err(err)?;
    Ok((e.x, e.y, e.z))
}

/// Hyperboloid coordinates `(r, theta, phi)` of the same point.
#[pyfunction]
fn geodesic_hyperboloid(s: f64, lam: f64, alpha: f64) -> PyResult<(f64, f64, f64)> {
    let h = geodesic::geodesic_hyperboloid(&GeodesicParams::new(s, lam, alpha)).map_err(err)?;
    Ok((h.r, h.theta, h.phi))
}

#[pyfunction]
fn distance_from_origin(p: &PyPoint) -> PyResult<PyDistanceResult> {
    distance::distance_from_origin(&p.0).map(Into::into).map_err(err)
}

#[pyfunction(name = "distance")]
fn distance_between(p1: &PyPoint, p2: &PyPoint) -> PyResult<f64> {
    distance::distance(&p1.0, &p2.0).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rho, tol=None))]
fn ball_volume(rho: f64, tol: Option<f64>) -> PyResult<f64> {
    volume::ball_volume(rho, &spec_for(tol)?).map_err(err)
}

/// Monte-Carlo estimate `(estimate, std_error)`.
#[pyfunction]
#[pyo3(signature = (rho, samples=1_000_000, seed=42))]
fn ball_volume_mc(py: Python<'_>, rho: f64, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let mc = py.detach(|| volume::ball_volume_mc_oracle(rho, samples, seed)).map_err(err)?;
    Ok((mc.estimate, mc.std_error))
}

#[pyfunction]
fn jacobian(s: f64, alpha: f64) -> PyResult<f64> {
    volume::jacobian_J(s, alpha).map_err(err)
}

type MeshArrays = (Vec<[f64; 3]>, Vec<[usize; 3]>);

/// Vertices and 0-based triangles of a geodesic sphere.
#[pyfunction]
#[pyo3(signature = (rho, res=64))]
fn sphere_mesh(rho: f64, res: usize) -> PyResult<MeshArrays> {
    let m = mesh::sphere_mesh(rho, res).map_err(err)?;
    Ok((m.vertices, m.triangles))
}

/// Regular prism tile of the `(p, q)` tiling with its generators.
#[pyclass(name = "Prism", frozen)]
struct PyPrism(PrismData);

#[pymethods]
impl PyPrism {
    #[new]
    fn new(p: u32, q: u32) -> PyResult<Self> {
        let params = TilingParams::new(p, q).map_err(err)?;
        tiling::build_generators(&params).map(Self).map_err(err)
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.params.p
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.params.q
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.0.phi
    }

    #[getter]
    fn vertices(&self) -> Vec<PyPoint> {
        self.0.vertices.iter().copied().map(PyPoint).collect()
    }

    #[getter]
    fn a(&self) -> PyIsometry {
        PyIsometry(self.0.gen_a)
    }

    #[getter]
    fn gen_b(&self) -> PyIsometry {
        PyIsometry(self.0.gen_b)
    }

    #[getter]
    fn tau(&self) -> PyIsometry {
        PyIsometry(self.0.tau)
    }

    /// Foot point `H` of the half-screw axis.
    #[getter]
    fn half_screw_foot(&self) -> PyPoint {
        PyPoint(self.0.axis.foot)
    }

    /// `(theta, r)` samples of the side curve from `A_p` to `A_1`.
    #[getter]
    fn side_curve(&self) -> Vec<(f64, f64)> {
        self.0.side.polar.clone()
    }

    #[pyo3(signature = (tol=None))]
    fn volume(&self, tol: Option<f64>) -> PyResult<f64> {
        tiling::prism_volume(&self.0, &spec_for(tol)?).map_err(err)
    }

    /// `{word: residual}` for every relator, plus whether all passed.
    #[pyo3(signature = (tol=1e-10))]
    fn relations(&self, tol: f64) -> (bool, Vec<(String, f64)>) {
        let r = tiling::verify_presentation(&self.0, tol);
        (r.passed, r.checks.into_iter().map(|c| (c.word, c.residual)).collect())
    }
}

/// Optimal ball packing of a prism tiling.
#[pyclass(name = "Packing", frozen, get_all)]
struct PyPacking {
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
}

impl From<&PackingResult> for PyPacking {
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
        }
    }
}

#[pymethods]
impl PyPacking {
    fn __repr__(&self) -> String {
        format!(
            "Packing(p={}, q={}, rho_opt={:.6}, density={:.6}, limiting_constraint={})",
            self.p, self.q, self.rho_opt, self.density, self.limiting_constraint
        )
    }
}

#[pyfunction]
#[pyo3(signature = (p, q, tol=None))]
fn pack(p: u32, q: u32, tol: Option<f64>) -> PyResult<PyPacking> {
    let params = TilingParams::new(p, q).map_err(err)?;
    packing::pack(&params, &spec_for(tol)?).map(|r| PyPacking::from(&r)).map_err(err)
}

/// Packings for every valid pair in the ranges, sorted by `(p, q)`.
#[pyfunction]
#[pyo3(signature = (p_min, p_max, q_min, q_max, jobs=1, tol=None))]
fn sweep(
    py: Python<'_>,
    p_min: u32,
    p_max: u32,
    q_min: u32,
    q_max: u32,
    jobs: usize,
    tol: Option<f64>,
) -> PyResult<Vec<PyPacking>> {
    let spec = spec_for(tol)?;
    let opts = SweepOptions { jobs };
    let report = py
        .detach(|| packing::sweep(p_min..=p_max, q_min..=q_max, &spec, &opts, &mut SweepCache::default()))
        .map_err(err)?;
    Ok(report.results.iter().map(PyPacking::from).collect())
}

#[pyfunction]
fn vertex_radius(p: u32, q: u32) -> PyResult<f64> {
    TilingParams::new(p, q).map(|t| tiling::vertex_radius(&t)).map_err(err)
}

#[pyfunction]
fn prism_height(p: u32, q: u32) -> PyResult<f64> {
    TilingParams::new(p, q).map(|t| tiling::prism_height(&t)).map_err(err)
}

#[pymodule]
fn sl2r_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GeometryError", m.py().get_type::<GeometryError>())?;
    m.add_class::<PyPoint>()?;
    m.add_class::<PyIsometry>()?;
    m.add_class::<PyDistanceResult>()?;
    m.add_class::<PyPrism>()?;
    m.add_class::<PyPacking>()?;
    m.add_function(wrap_pyfunction!(geodesic_point, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic_hyperboloid, m)?)?;
    m.add_function(wrap_pyfunction!(distance_from_origin, m)?)?;
    m.add_function(wrap_pyfunction!(distance_between, m)?)?;
    m.add_function(wrap_pyfunction!(ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(ball_volume_mc, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_mesh, m)?)?;
    m.add_function(wrap_pyfunction!(pack, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_radius, m)?)?;
    m.add_function(wrap_pyfunction!(prism_height, m)?)?;
    Ok(())
}
