//! Three-circle configurations and the curvature map.
//!
//! Radii live on vertices, exterior intersection angles on edges. Each
//! triangle becomes a Euclidean or hyperbolic triangle of circle centers;
//! curvature at a vertex is `2π` minus the angles at all `(triangle, slot)`
//! incidences of that vertex.

use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::DeltaComplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Background {
    Euclidean,
    Hyperbolic,
}

impl std::str::FromStr for Background {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "e" => Ok(Background::Euclidean),
            "hyperbolic" | "h" => Ok(Background::Hyperbolic),
            other => Err(format!("unknown background {other:?}")),
        }
    }
}

impl std::fmt::Display for Background {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Background::Euclidean => "euclidean",
            Background::Hyperbolic => "hyperbolic",
        })
    }
}

/// A triangle whose side lengths violate the triangle inequality:
/// `lengths[failing] >= sum of the other two`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Degenerate {
    pub lengths: [f64; 3],
    pub failing: usize,
    /// `lengths[failing] - (other two)`, non-negative.
    pub excess: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("edge {edge}: intersection angle {value} outside [0, π)")]
    InvalidAngle { edge: usize, value: f64 },
    #[error("vertex {vertex}: radius {value} is not positive")]
    InvalidRadius { vertex: usize, value: f64 },
    #[error("{what}: expected {expected} values, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("triangle {triangle} is degenerate with side lengths {lengths:?}")]
    Degenerate { triangle: usize, lengths: [f64; 3] },
    #[error("angles {0:?} satisfy the weak existence condition; no degenerate witness exists")]
    WitnessNotApplicable([f64; 3]),
    #[error("angles {0:?}: the small angle has cosine ±1")]
    WitnessUnbounded([f64; 3]),
}

/// Exterior intersection angle per edge, each in `[0, π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleData {
    phi: Vec<f64>,
}

impl AngleData {
    pub fn new(phi: Vec<f64>) -> Result<Self, GeometryError> {
        for (edge, &value) in phi.iter().enumerate() {
            if !(0.0..PI).contains(&value) {
                return Err(GeometryError::InvalidAngle { edge, value });
            }
        }
        Ok(Self { phi })
    }

    /// All edges tangent (`Φ = 0`).
    pub fn zeros(edges: usize) -> Self {
        Self { phi: vec![0.0; edges] }
    }

    pub fn uniform(edges: usize, value: f64) -> Result<Self, GeometryError> {
        Self::new(vec![value; edges])
    }

    pub fn values(&self) -> &[f64] {
        &self.phi
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn get(&self, e: usize) -> f64 {
        self.phi[e]
    }
}

/// Positive radius per vertex together with the background geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingMetric {
    radii: Vec<f64>,
    background: Background,
}

impl PackingMetric {
    pub fn new(radii: Vec<f64>, background: Background) -> Result<Self, GeometryError> {
        for (vertex, &value) in radii.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(GeometryError::InvalidRadius { vertex, value });
            }
        }
        Ok(Self { radii, background })
    }

    pub fn constant(vertices: usize, radius: f64, background: Background) -> Result<Self, GeometryError> {
        Self::new(vec![radius; vertices], background)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn background(&self) -> Background {
        self.background
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Per-vertex discrete curvature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureVector(pub Vec<f64>);

impl CurvatureVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Distance between the centers of two circles meeting at exterior angle `phi`.
pub fn edge_length(ra: f64, rb: f64, phi: f64, bg: Background) -> f64 {
    let half = (0.5 * phi).sin();
    match bg {
        Background::Euclidean => {
            let s = ra + rb;
            (s * s - 4.0 * ra * rb * half * half).max(0.0).sqrt()
        }
        Background::Hyperbolic => {
            // cosh l - 1 = 2 sinh²((a+b)/2) - 2 sinh a sinh b sin²(φ/2)
            let sh = (0.5 * (ra + rb)).sinh();
            let y = (2.0 * sh * sh - 2.0 * ra.sinh() * rb.sinh() * half * half).max(0.0);
            acosh_1p(y)
        }
    }
}

/// `arccosh(1 + y)` without the cancellation near `y = 0`.
fn acosh_1p(y: f64) -> f64 {
    if y > 1e150 {
        LN_2 + y.ln() + 1.0 / y
    } else {
        (y + (y * (y + 2.0)).sqrt()).ln_1p()
    }
}

/// `ln sinh x` for `x > 0`, valid far beyond the overflow of `sinh`.
fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1()).ln() - LN_2
}

/// Interior angles of the triangle with side lengths `l`, where `θ_i` is
/// opposite `l_i`. Half-angle forms are used in both backgrounds.
pub fn triangle_angles(l: [f64; 3], bg: Background) -> Result<[f64; 3], Degenerate> {
    let s = 0.5 * (l[0] + l[1] + l[2]);
    let x = [s - l[0], s - l[1], s - l[2]];
    if let Some(failing) = (0..3).find(|&i| x[i].is_nan() || x[i] <= 0.0) {
        return Err(Degenerate {
            lengths: l,
            failing,
            excess: -2.0 * x[failing],
        });
    }
    let mut theta = [0.0; 3];
    match bg {
        Background::Euclidean => {
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                theta[i] = 2.0 * (x[j] * x[k]).sqrt().atan2((s * x[i]).sqrt());
            }
        }
        Background::Hyperbolic => {
            let ls = ln_sinh(s);
            let lx = x.map(ln_sinh);
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                theta[i] = 2.0 * (0.5 * (lx[j] + lx[k] - ls - lx[i])).exp().atan();
            }
        }
    }
    Ok(theta)
}

/// `cos Φ_i + cos Φ_j cos Φ_k >= 0` together with its cyclic permutations.
pub fn condition_s(phi: [f64; 3]) -> bool {
    let c = phi.map(f64::cos);
    (0..3).all(|i| c[i] + c[(i + 1) % 3] * c[(i + 2) % 3] >= -1e-14)
}

/// The weak existence condition: angle sum at most `π`, or each pair sum
/// strictly below `π` plus the third angle.
pub fn condition_w(phi: [f64; 3]) -> bool {
    let [a, b, c] = phi;
    a + b + c <= PI || (a + b < PI + c && b + c < PI + a && c + a < PI + b)
}

/// Triangles of `c` whose edge angles fail [`condition_s`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub ok: bool,
    pub failing_triangles: Vec<usize>,
}

pub fn condition_s_all(c: &DeltaComplex, phi: &AngleData) -> ConditionReport {
    let failing_triangles: Vec<usize> = c
        .triangles()
        .iter()
        .enumerate()
        .filter(|(_, t)| !condition_s(t.faces.map(|e| phi.get(e))))
        .map(|(id, _)| id)
        .collect();
    ConditionReport {
        ok: failing_triangles.is_empty(),
        failing_triangles,
    }
}

/// Polynomial whose positivity is equivalent to the Euclidean triangle
/// inequality for the three center distances. `phi[s]` is the angle on the
/// edge opposite vertex `s`.
pub fn euclidean_e(r: [f64; 3], phi: [f64; 3]) -> f64 {
    let [ri, rj, rk] = r;
    let [ci, cj, ck] = phi.map(f64::cos);
    4.0 * ri * ri * rj * rj * (1.0 - ck * ck)
        + 4.0 * rj * rj * rk * rk * (1.0 - ci * ci)
        + 4.0 * rk * rk * ri * ri * (1.0 - cj * cj)
        + 8.0 * ri * rj * rk * (ri * (ci + cj * ck) + rj * (cj + ck * ci) + rk * (ck + ci * cj))
}

/// Radii `(t, t, 1)` (with `1` placed at the small-angle index) that make the
/// Euclidean configuration degenerate when the weak condition fails.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerateWitness {
    pub radii: [f64; 3],
    /// Index whose angle plays the role of the small angle.
    pub small: usize,
    pub t: f64,
}

pub fn degenerate_witness(phi: [f64; 3]) -> Result<DegenerateWitness, GeometryError> {
    if condition_w(phi) {
        return Err(GeometryError::WitnessNotApplicable(phi));
    }
    let small = (0..3)
        .find(|&k| phi[(k + 1) % 3] + phi[(k + 2) % 3] >= PI + phi[k])
        .expect("weak condition fails on some pair");
    let ck = phi[small].cos();
    if ck.abs() >= 1.0 {
        return Err(GeometryError::WitnessUnbounded(phi));
    }
    let (ci, cj) = (phi[(small + 1) % 3].cos(), phi[(small + 2) % 3].cos());
    let t = -(1.0 + ck) * (ci + cj) / (1.0 - ck * ck);
    let mut radii = [t; 3];
    radii[small] = 1.0;
    Ok(DegenerateWitness { radii, small, t })
}

/// Side lengths of the center triangle for radii `r` and angles `phi`, with
/// `lengths[s]` opposite vertex `s`.
pub fn triple_lengths(r: [f64; 3], phi: [f64; 3], bg: Background) -> [f64; 3] {
    [
        edge_length(r[1], r[2], phi[0], bg),
        edge_length(r[2], r[0], phi[1], bg),
        edge_length(r[0], r[1], phi[2], bg),
    ]
}

fn check_dims(c: &DeltaComplex, phi: &AngleData, m: &PackingMetric) -> Result<(), GeometryError> {
    if phi.len() != c.edge_count() {
        return Err(GeometryError::LengthMismatch {
            what: "angle data",
            expected: c.edge_count(),
            got: phi.len(),
        });
    }
    if m.len() != c.vertex_count() {
        return Err(GeometryError::LengthMismatch {
            what: "radii",
            expected: c.vertex_count(),
            got: m.len(),
        });
    }
    Ok(())
}

/// Center-to-center length of every edge.
pub fn edge_lengths(c: &DeltaComplex, phi: &AngleData, m: &PackingMetric) -> Vec<f64> {
    let r = m.radii();
    c.edges()
        .iter()
        .enumerate()
        .map(|(id, e)| edge_length(r[e.d0], r[e.d1], phi.get(id), m.background()))
        .collect()
}

/// Per-triangle side lengths and angles; `angles[t][i]` sits at `v_i(t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleGeometry {
    pub lengths: Vec<[f64; 3]>,
    pub angles: Vec<[f64; 3]>,
}

impl TriangleGeometry {
    /// `π − (θ0 + θ1 + θ2)` per triangle; zero up to roundoff in the
    /// Euclidean background, positive (the area) in the hyperbolic one.
    pub fn angle_deficits(&self) -> Vec<f64> {
        self.angles.iter().map(|a| PI - a[0] - a[1] - a[2]).collect()
    }
}

pub fn triangle_geometry(
    c: &DeltaComplex,
    phi: &AngleData,
    m: &PackingMetric,
) -> Result<TriangleGeometry, GeometryError> {
    check_dims(c, phi, m)?;
    let el = edge_lengths(c, phi, m);
    let mut lengths = Vec::with_capacity(c.triangle_count());
    let mut angles = Vec::with_capacity(c.triangle_count());
    for (id, t) in c.triangles().iter().enumerate() {
        let l = t.faces.map(|e| el[e]);
        let theta = triangle_angles(l, m.background()).map_err(|d| GeometryError::Degenerate {
            triangle: id,
            lengths: d.lengths,
        })?;
        lengths.push(l);
        angles.push(theta);
    }
    Ok(TriangleGeometry { lengths, angles })
}

/// `K_v = 2π − Σ θ_i(t)` over all `(t, i)` with `v_i(t) = v`. Triangles are
/// summed in id order.
pub fn curvature_map(c: &DeltaComplex, phi: &AngleData, m: &PackingMetric) -> Result<CurvatureVector, GeometryError> {
    let geo = triangle_geometry(c, phi, m)?;
    Ok(curvature_from_angles(c, &geo.angles))
}

pub fn curvature_from_angles(c: &DeltaComplex, angles: &[[f64; 3]]) -> CurvatureVector {
    let mut k = vec![2.0 * PI; c.vertex_count()];
    for (t, theta) in angles.iter().enumerate() {
        let vt = c.vertices_of(t);
        for i in 0..3 {
            k[vt[i]] -= theta[i];
        }
    }
    CurvatureVector(k)
}

/// `∂l/∂u_a` for the edge between circles `a` and `b`, where `u = ln r`
/// (Euclidean) or `u = ln tanh(r/2)` (hyperbolic).
fn length_du(ra: f64, rb: f64, phi: f64, l: f64, bg: Background) -> f64 {
    match bg {
        Background::Euclidean => ra * (ra + rb * phi.cos()) / l,
        Background::Hyperbolic => ra.sinh() * (ra.sinh() * rb.cosh() + ra.cosh() * rb.sinh() * phi.cos()) / l.sinh(),
    }
}

/// `∂θ_i/∂l_i`; the off-diagonal partials are `−∂θ_i/∂l_i · cos θ_k`.
fn angle_dl(l: [f64; 3], theta: [f64; 3], i: usize, bg: Background) -> f64 {
    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
    match bg {
        Background::Euclidean => l[i] / (l[j] * l[k] * theta[i].sin()),
        Background::Hyperbolic => l[i].sinh() / (l[j].sinh() * l[k].sinh() * theta[i].sin()),
    }
}

/// Jacobian `∂K_a/∂u_b` of the curvature map in u-coordinates.
pub fn curvature_jacobian(c: &DeltaComplex, phi: &AngleData, m: &PackingMetric) -> Result<DMatrix<f64>, GeometryError> {
    let geo = triangle_geometry(c, phi, m)?;
    let bg = m.background();
    let r = m.radii();
    let n = c.vertex_count();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for (t, tri) in c.triangles().iter().enumerate() {
        let vt = c.vertices_of(t);
        let l = geo.lengths[t];
        let theta = geo.angles[t];
        // dl[e][s]: derivative of the side opposite slot e w.r.t. u at slot s
        let mut dl = [[0.0; 3]; 3];
        for e in 0..3 {
            let (a, b) = ((e + 1) % 3, (e + 2) % 3);
            let p = phi.get(tri.faces[e]);
            dl[e][a] = length_du(r[vt[a]], r[vt[b]], p, l[e], bg);
            dl[e][b] = length_du(r[vt[b]], r[vt[a]], p, l[e], bg);
        }
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let g = angle_dl(l, theta, i, bg);
            // dθ_i = g (dl_i − cos θ_k dl_j − cos θ_j dl_k)
            let coef = [(i, g), (j, -g * theta[k].cos()), (k, -g * theta[j].cos())];
            for s in 0..3 {
                let d: f64 = coef.iter().map(|&(e, w)| w * dl[e][s]).sum();
                jac[(vt[i], vt[s])] -= d;
            }
        }
    }
    Ok(jac)
}

/// Euclidean placement of a three-circle configuration: center `i` at the
/// origin, `j` on the positive x-axis, `k` in the upper half-plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripleLayout {
    pub radii: [f64; 3],
    pub phi: [f64; 3],
    pub centers: [[f64; 2]; 3],
    pub lengths: [f64; 3],
    pub angles: [f64; 3],
}

impl TripleLayout {
    pub fn new(radii: [f64; 3], phi: [f64; 3]) -> Result<Self, Degenerate> {
        let lengths = triple_lengths(radii, phi, Background::Euclidean);
        let angles = triangle_angles(lengths, Background::Euclidean)?;
        let (lij, lik, ljk) = (lengths[2], lengths[1], lengths[0]);
        let x = (lik * lik - ljk * ljk + lij * lij) / (2.0 * lij);
        let y = (lik * lik - x * x).max(0.0).sqrt();
        Ok(Self {
            radii,
            phi,
            centers: [[0.0, 0.0], [lij, 0.0], [x, y]],
            lengths,
            angles,
        })
    }

    /// Interior angles recomputed from the center coordinates.
    pub fn measured_angles(&self) -> [f64; 3] {
        let p = self.centers;
        let angle_at = |a: usize, b: usize, c: usize| {
            let u = [p[b][0] - p[a][0], p[b][1] - p[a][1]];
            let v = [p[c][0] - p[a][0], p[c][1] - p[a][1]];
            (u[0] * v[1] - u[1] * v[0]).abs().atan2(u[0] * v[0] + u[1] * v[1])
        };
        [angle_at(0, 1, 2), angle_at(1, 2, 0), angle_at(2, 0, 1)]
    }
}
