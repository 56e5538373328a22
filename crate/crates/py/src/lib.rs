//! Python bindings. Structured results (reports, verdicts, solve results)
//! are returned as plain dicts and lists.

use circlepat::complex::DeltaComplex;
use circlepat::covering::{self, Covering as CoreCovering};
use circlepat::geometry::{self, AngleData, Background, PackingMetric};
use circlepat::io;
use circlepat::kat::{self, KatOptions};
use circlepat::solver::{self, Method, SolveOptions};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn background(name: &str) -> PyResult<Background> {
    name.parse().map_err(err)
}

fn angles(c: &DeltaComplex, phi: Option<Vec<f64>>) -> PyResult<AngleData> {
    match phi {
        Some(p) => AngleData::new(p).map_err(err),
        None => Ok(AngleData::zeros(c.edge_count())),
    }
}

/// A triangulated closed surface, possibly with loops and parallel edges.
#[pyclass(name = "Complex", module = "circlepat", frozen)]
pub struct Complex {
    inner: DeltaComplex,
    /// Edge angles read from a file, if any.
    phi: Option<Vec<f64>>,
}

#[pymethods]
impl Complex {
    /// `edges` are `(d0, d1)` pairs, `triangles` are `(d0, d1, d2)` edge ids.
    #[new]
    fn new(vertices: usize, edges: Vec<(usize, usize)>, triangles: Vec<(usize, usize, usize)>) -> PyResult<Self> {
        let edges = edges.into_iter().map(|(a, b)| circlepat::Edge::new(a, b)).collect();
        let triangles = triangles
            .into_iter()
            .map(|(a, b, c)| circlepat::Triangle::new(a, b, c))
            .collect();
        Ok(Self {
            inner: DeltaComplex::new(vertices, edges, triangles).map_err(err)?,
            phi: None,
        })
    }

    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        let inner = circlepat::fixtures::by_name(name).ok_or_else(|| err(format!("unknown fixture `{name}`")))?;
        Ok(Self { inner, phi: None })
    }

    /// Parses the triangulation file format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let p = io::parse_triangulation(text).map_err(err)?;
        Ok(Self {
            inner: p.complex,
            phi: Some(p.phi.values().to_vec()),
        })
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        Self::parse(&std::fs::read_to_string(path).map_err(err)?)
    }

    fn to_text(&self) -> String {
        let phi = self.phi.clone().map(|p| AngleData::new(p).expect("validated angles"));
        io::write_triangulation(&self.inner, phi.as_ref())
    }

    #[getter]
    fn phi(&self) -> Vec<f64> {
        self.phi.clone().unwrap_or_else(|| vec![0.0; self.inner.edge_count()])
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn triangle_count(&self) -> usize {
        self.inner.triangle_count()
    }

    fn euler_characteristic(&self) -> i64 {
        self.inner.euler_characteristic()
    }

    fn genus(&self) -> PyResult<i64> {
        self.inner.genus().map_err(err)
    }

    fn is_orientable(&self) -> bool {
        self.inner.orientation().is_ok()
    }

    /// `{"simplicial", "loops", "parallel"}`.
    fn is_simplicial<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.is_simplicial())
    }

    fn vertex_triples(&self) -> Vec<[usize; 3]> {
        self.inner.vertex_triples().iter().map(|t| t.0).collect()
    }

    fn degree(&self, v: usize) -> usize {
        self.inner.degree(v)
    }

    fn __repr__(&self) -> String {
        format!(
            "Complex(vertices={}, edges={}, triangles={})",
            self.inner.vertex_count(),
            self.inner.edge_count(),
            self.inner.triangle_count()
        )
    }
}

/// A finite abelian cover of a complex.
#[pyclass(name = "Covering", module = "circlepat", frozen)]
pub struct Covering {
    inner: CoreCovering,
}

#[pymethods]
impl Covering {
    /// The smallest simplicial homology cover with prime at most `p_max`.
    #[staticmethod]
    #[pyo3(signature = (complex, p_max = covering::DEFAULT_P_MAX))]
    fn unwrap(complex: &Complex, p_max: u32) -> PyResult<Self> {
        Ok(Self {
            inner: covering::unwrap(&complex.inner, p_max).map_err(err)?,
        })
    }

    /// The mod-p homology cover, simplicial or not.
    #[staticmethod]
    fn homology(complex: &Complex, p: u32) -> PyResult<Self> {
        let va = covering::homology_voltages(&complex.inner, p).map_err(err)?;
        Ok(Self {
            inner: covering::derived_cover(&complex.inner, &va).map_err(err)?,
        })
    }

    /// Derived cover from explicit voltages in `(Z/modulus)^rank`.
    #[staticmethod]
    fn from_voltages(complex: &Complex, modulus: u32, rank: usize, voltages: Vec<Vec<u32>>) -> PyResult<Self> {
        let va = covering::VoltageAssignment::new(modulus, rank, voltages).map_err(err)?;
        Ok(Self {
            inner: covering::derived_cover(&complex.inner, &va).map_err(err)?,
        })
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn modulus(&self) -> u32 {
        self.inner.group().modulus
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.group().rank
    }

    fn total(&self) -> Complex {
        Complex {
            inner: self.inner.total().clone(),
            phi: None,
        }
    }

    fn base(&self) -> Complex {
        Complex {
            inner: self.inner.base().clone(),
            phi: None,
        }
    }

    fn proj_vertex(&self, v: usize) -> usize {
        self.inner.proj_vertex(v)
    }

    fn pullback_vertex(&self, values: Vec<f64>) -> Vec<f64> {
        covering::pullback_vertex_data(&self.inner, &values)
    }

    fn pullback_edge(&self, values: Vec<f64>) -> Vec<f64> {
        covering::pullback_edge_data(&self.inner, &values)
    }

    fn pushforward(&self, values: Vec<f64>) -> Vec<f64> {
        covering::pushforward_average(&self.inner, &values)
    }

    fn sidecar<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.sidecar())
    }

    fn __repr__(&self) -> String {
        let g = self.inner.group();
        format!(
            "Covering(p={}, k={}, degree={})",
            g.modulus,
            g.rank,
            self.inner.degree()
        )
    }
}

/// Per-vertex curvature for the given radii and edge angles.
#[pyfunction]
#[pyo3(signature = (complex, radii, phi = None, bg = "euclidean"))]
fn curvature(complex: &Complex, radii: Vec<f64>, phi: Option<Vec<f64>>, bg: &str) -> PyResult<Vec<f64>> {
    let phi = angles(&complex.inner, phi.or_else(|| complex.phi.clone()))?;
    let m = PackingMetric::new(radii, background(bg)?).map_err(err)?;
    Ok(geometry::curvature_map(&complex.inner, &phi, &m).map_err(err)?.0)
}

/// Center distance of two circles meeting at exterior angle `phi`.
#[pyfunction]
#[pyo3(signature = (ra, rb, phi, bg = "euclidean"))]
fn edge_length(ra: f64, rb: f64, phi: f64, bg: &str) -> PyResult<f64> {
    Ok(geometry::edge_length(ra, rb, phi, background(bg)?))
}

#[pyfunction]
#[pyo3(signature = (lengths, bg = "euclidean"))]
fn triangle_angles(lengths: [f64; 3], bg: &str) -> PyResult<[f64; 3]> {
    geometry::triangle_angles(lengths, background(bg)?)
        .map_err(|d| err(format!("degenerate triangle with lengths {:?}", d.lengths)))
}

#[pyfunction]
fn condition_s(phi: [f64; 3]) -> bool {
    geometry::condition_s(phi)
}

#[pyfunction]
fn condition_w(phi: [f64; 3]) -> bool {
    geometry::condition_w(phi)
}

#[pyfunction]
fn euclidean_e(r: [f64; 3], phi: [f64; 3]) -> f64 {
    geometry::euclidean_e(r, phi)
}

/// Radii `(t, t, 1)` (permuted) making the configuration degenerate.
#[pyfunction]
fn degenerate_witness(phi: [f64; 3]) -> PyResult<[f64; 3]> {
    Ok(geometry::degenerate_witness(phi).map_err(err)?.radii)
}

/// Subset-inequality verdict for `k` (on base vertices) over the cover.
#[pyfunction]
#[pyo3(signature = (cover, k, phi = None, bg = "euclidean", cone_positivity = false))]
fn check_cover<'py>(
    py: Python<'py>,
    cover: &Covering,
    k: Vec<f64>,
    phi: Option<Vec<f64>>,
    bg: &str,
    cone_positivity: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let phi = angles(cover.inner.base(), phi)?;
    let opts = KatOptions {
        cone_positivity,
        ..KatOptions::default()
    };
    let v = kat::check_cover(&cover.inner, &phi, &k, background(bg)?, &opts).map_err(err)?;
    to_py(py, &v)
}

/// The necessary conditions expressible on the base alone.
#[pyfunction]
#[pyo3(signature = (complex, k, phi = None, bg = "euclidean"))]
fn check_base<'py>(
    py: Python<'py>,
    complex: &Complex,
    k: Vec<f64>,
    phi: Option<Vec<f64>>,
    bg: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let phi = angles(&complex.inner, phi.or_else(|| complex.phi.clone()))?;
    let v =
        kat::check_base_necessary(&complex.inner, &phi, &k, background(bg)?, &KatOptions::default()).map_err(err)?;
    to_py(py, &v)
}

fn solve_options(method: &str, tol: f64, initial: Option<Vec<f64>>) -> PyResult<SolveOptions> {
    let method: Method = method.parse().map_err(err)?;
    Ok(SolveOptions {
        method,
        tol,
        initial,
        ..SolveOptions::default()
    })
}

/// Radii with curvature `k`. Returns the solve result as a dict; `metric`
/// is null when the target is infeasible.
#[pyfunction]
#[pyo3(signature = (complex, k, phi = None, bg = "euclidean", method = "newton", tol = 1e-10, initial = None))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    complex: &Complex,
    k: Vec<f64>,
    phi: Option<Vec<f64>>,
    bg: &str,
    method: &str,
    tol: f64,
    initial: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let phi = angles(&complex.inner, phi.or_else(|| complex.phi.clone()))?;
    let opts = solve_options(method, tol, initial)?;
    let r = solver::solve_prescribed(&complex.inner, &phi, &k, background(bg)?, &opts).map_err(err)?;
    to_py(py, &r)
}

/// Solves the pulled-back problem on the cover from a seeded perturbed start.
#[pyfunction]
#[pyo3(signature = (cover, k, phi = None, bg = "euclidean", seed = 0, method = "newton", tol = 1e-10))]
#[allow(clippy::too_many_arguments)]
fn solve_on_cover<'py>(
    py: Python<'py>,
    cover: &Covering,
    k: Vec<f64>,
    phi: Option<Vec<f64>>,
    bg: &str,
    seed: u64,
    method: &str,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let phi = angles(cover.inner.base(), phi)?;
    let opts = solve_options(method, tol, None)?;
    let r = solver::solve_on_cover(&cover.inner, &phi, &k, background(bg)?, &opts, seed).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
#[pyo3(name = "circlepat")]
fn circlepat_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Complex>()?;
    m.add_class::<Covering>()?;
    m.add_function(wrap_pyfunction!(curvature, m)?)?;
    m.add_function(wrap_pyfunction!(edge_length, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_angles, m)?)?;
    m.add_function(wrap_pyfunction!(condition_s, m)?)?;
    m.add_function(wrap_pyfunction!(condition_w, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean_e, m)?)?;
    m.add_function(wrap_pyfunction!(degenerate_witness, m)?)?;
    m.add_function(wrap_pyfunction!(check_cover, m)?)?;
    m.add_function(wrap_pyfunction!(check_base, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_on_cover, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
