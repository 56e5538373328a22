//! Prescribed-curvature solver.
//!
//! Works in u-coordinates, `u = ln r` (Euclidean) or `u = ln tanh(r/2)`
//! (hyperbolic), where the curvature Jacobian is symmetric and positive
//! (semi)definite. Newton's method with backtracking is the primary method;
//! an explicit Euler discretisation of the combinatorial Ricci flow
//! `du/dt = −(K(u) − K̄)` serves as fallback and cross-check.
//!
//! Euclidean curvatures are scale invariant, so Euclidean iterates are kept
//! in the gauge `Σ u = 0`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::DeltaComplex;
use crate::covering::{
    is_deck_invariant, pullback_edge_data, pullback_vertex_data, pushforward_average, Covering, DeckInvariance,
};
use crate::geometry::{
    condition_s_all, curvature_jacobian, curvature_map, AngleData, Background, GeometryError, PackingMetric,
};
use crate::kat::{check_cover, gauss_bonnet, GaussBonnetCheck, KatConstraint, KatError, KatOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Newton,
    Flow,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "newton" => Ok(Self::Newton),
            "flow" => Ok(Self::Flow),
            other => Err(format!("unknown method `{other}` (expected newton or flow)")),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Newton => "newton",
            Self::Flow => "flow",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub method: Method,
    /// Target for `max_v |K_v − K̄_v|`.
    pub tol: f64,
    pub max_newton_iter: usize,
    pub max_flow_steps: usize,
    pub backtrack: f64,
    pub min_step: f64,
    /// Switch to the flow when Newton stalls or runs out of iterations.
    pub fallback: bool,
    /// Starting radii; `r ≡ 1` when absent.
    pub initial: Option<Vec<f64>>,
    /// Record symmetry and eigenvalue bounds of the Jacobian at every
    /// accepted Newton iterate.
    pub check_jacobian: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: Method::Newton,
            tol: 1e-10,
            max_newton_iter: 200,
            max_flow_steps: 1_000_000,
            backtrack: 0.5,
            min_step: 1e-12,
            fallback: true,
            initial: None,
            check_jacobian: false,
        }
    }
}

/// Where the iteration was heading when it gave up.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Divergence {
    /// Vertices whose radius fell below 1e-6.
    pub shrinking: Vec<usize>,
    /// Vertices whose radius exceeded 1e6 (Euclidean) or 30 (hyperbolic).
    pub growing: Vec<usize>,
    pub radii: Vec<f64>,
    /// Most binding subset constraint, when a cover was supplied.
    pub nearest_constraint: Option<KatConstraint>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Kat(#[from] KatError),
    #[error("u-coordinate {value} at vertex {vertex} is outside the hyperbolic domain u < 0")]
    Domain { vertex: usize, value: f64 },
    #[error("angle condition (S) fails on triangles {0:?}")]
    ConditionS(Vec<usize>),
    #[error("{what}: expected {expected} values, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid options: {0}")]
    Options(String),
    #[error("{method} exhausted its budget after {iterations} iterations with residual {residual:e}")]
    BudgetExhausted {
        method: Method,
        iterations: usize,
        residual: f64,
        divergence: Box<Divergence>,
    },
    #[error("flow step fell below {min_step:e} after {iterations} steps with residual {residual:e}")]
    StepUnderflow {
        iterations: usize,
        residual: f64,
        min_step: f64,
        divergence: Box<Divergence>,
    },
}

pub fn to_u(m: &PackingMetric) -> Vec<f64> {
    m.radii()
        .iter()
        .map(|&r| match m.background() {
            Background::Euclidean => r.ln(),
            // ln tanh(r/2) = ln(1 − e^{−r}) − ln(1 + e^{−r})
            Background::Hyperbolic => (-(-r).exp()).ln_1p() - (-r).exp().ln_1p(),
        })
        .collect()
}

pub fn from_u(u: &[f64], bg: Background) -> Result<PackingMetric, SolveError> {
    let mut radii = Vec::with_capacity(u.len());
    for (vertex, &x) in u.iter().enumerate() {
        let r = match bg {
            Background::Euclidean => x.exp(),
            Background::Hyperbolic => {
                if x.is_nan() || x >= 0.0 {
                    return Err(SolveError::Domain { vertex, value: x });
                }
                // 2 artanh(e^u) = ln(1 + e^u) − ln(1 − e^u)
                x.exp().ln_1p() - (-x.exp_m1()).ln()
            }
        };
        radii.push(r);
    }
    Ok(PackingMetric::new(radii, bg)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JacobianCheck {
    pub asymmetry: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Symmetry defect and eigenvalue range of the curvature Jacobian.
pub fn jacobian_check(c: &DeltaComplex, phi: &AngleData, m: &PackingMetric) -> Result<JacobianCheck, SolveError> {
    let j = curvature_jacobian(c, phi, m)?;
    let asymmetry = (&j - j.transpose()).abs().max();
    let sym = (&j + j.transpose()) * 0.5;
    let eig = sym.symmetric_eigen().eigenvalues;
    Ok(JacobianCheck {
        asymmetry,
        min_eigenvalue: eig.min(),
        max_eigenvalue: eig.max(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum Infeasible {
    GaussBonnet {
        check: GaussBonnetCheck,
    },
    Kat {
        worst: Option<KatConstraint>,
        violation_count: u64,
        gauss_bonnet: GaussBonnetCheck,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveResult {
    /// Present exactly when the solve converged.
    pub metric: Option<PackingMetric>,
    pub infeasible: Option<Infeasible>,
    /// Method that produced the final iterate.
    pub method: Method,
    pub fallback_used: bool,
    pub iterations: usize,
    pub residual: f64,
    /// `max |K − K̄|` per iteration, starting point included.
    pub trajectory: Vec<f64>,
    /// `"sum_u_zero"` for Euclidean solutions.
    pub gauge: Option<&'static str>,
    pub jacobian_checks: Vec<JacobianCheck>,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.metric.is_some()
    }

    fn infeasible(method: Method, reason: Infeasible) -> Self {
        Self {
            metric: None,
            infeasible: Some(reason),
            method,
            fallback_used: false,
            iterations: 0,
            residual: f64::INFINITY,
            trajectory: Vec::new(),
            gauge: None,
            jacobian_checks: Vec::new(),
        }
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn two_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn project_mean_zero(u: &mut [f64]) {
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    for x in u.iter_mut() {
        *x -= mean;
    }
}

/// The residual map `F(u) = K(from_u(u)) − K̄` on one complex.
struct Problem<'a> {
    c: &'a DeltaComplex,
    phi: &'a AngleData,
    target: &'a [f64],
    bg: Background,
}

impl Problem<'_> {
    fn residual(&self, u: &[f64]) -> Option<Vec<f64>> {
        let m = from_u(u, self.bg).ok()?;
        let k = curvature_map(self.c, self.phi, &m).ok()?;
        Some(k.0.iter().zip(self.target).map(|(a, b)| a - b).collect())
    }

    fn in_domain(&self, u: &[f64]) -> bool {
        u.iter().all(|x| x.is_finite()) && (self.bg == Background::Euclidean || u.iter().all(|&x| x < 0.0))
    }

    fn divergence(&self, u: &[f64]) -> Divergence {
        let radii: Vec<f64> = match from_u(u, self.bg) {
            Ok(m) => m.radii().to_vec(),
            Err(_) => u
                .iter()
                .map(|&x| {
                    if self.bg == Background::Euclidean {
                        x.exp()
                    } else {
                        f64::INFINITY
                    }
                })
                .collect(),
        };
        let big = match self.bg {
            Background::Euclidean => 1e6,
            Background::Hyperbolic => 30.0,
        };
        Divergence {
            shrinking: (0..radii.len()).filter(|&v| radii[v] < 1e-6).collect(),
            growing: (0..radii.len()).filter(|&v| radii[v] > big).collect(),
            radii,
            nearest_constraint: None,
        }
    }

    fn newton_direction(&self, u: &[f64], f: &[f64]) -> Option<Vec<f64>> {
        let m = from_u(u, self.bg).ok()?;
        let j = curvature_jacobian(self.c, self.phi, &m).ok()?;
        let n = u.len();
        let (a, rhs) = match self.bg {
            Background::Euclidean => {
                let mean = f.iter().sum::<f64>() / n as f64;
                let a = &j + DMatrix::from_element(n, n, 1.0 / n as f64) + DMatrix::identity(n, n) * 1e-12;
                (a, DVector::from_iterator(n, f.iter().map(|x| -(x - mean))))
            }
            Background::Hyperbolic => (
                &j + DMatrix::identity(n, n) * 1e-12,
                DVector::from_iterator(n, f.iter().map(|x| -x)),
            ),
        };
        let sym = (&a + a.transpose()) * 0.5;
        let delta = match sym.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => sym.lu().solve(&rhs)?,
        };
        let mut d: Vec<f64> = delta.iter().copied().collect();
        if self.bg == Background::Euclidean {
            project_mean_zero(&mut d);
        }
        d.iter().all(|x| x.is_finite()).then_some(d)
    }
}

struct Run {
    u: Vec<f64>,
    residual: f64,
    iterations: usize,
    trajectory: Vec<f64>,
    jacobian_checks: Vec<JacobianCheck>,
}

enum Stop {
    Converged,
    Stalled,
    Budget,
}

fn newton(p: &Problem<'_>, mut u: Vec<f64>, opts: &SolveOptions) -> Result<(Run, Stop), SolveError> {
    let mut f = p
        .residual(&u)
        .ok_or_else(|| SolveError::Options("starting point is degenerate".into()))?;
    let mut res = inf_norm(&f);
    let mut trajectory = vec![res];
    let mut checks = Vec::new();
    let mut iterations = 0;
    let stop = loop {
        if opts.check_jacobian {
            checks.push(jacobian_check(p.c, p.phi, &from_u(&u, p.bg)?)?);
        }
        if res <= opts.tol {
            break Stop::Converged;
        }
        if iterations >= opts.max_newton_iter {
            break Stop::Budget;
        }
        let Some(d) = p.newton_direction(&u, &f) else {
            break Stop::Stalled;
        };
        let mut t = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            if p.in_domain(&trial) {
                if let Some(ft) = p.residual(&trial) {
                    let rt = inf_norm(&ft);
                    if rt < (1.0 - 1e-4 * t) * res {
                        break Some((trial, ft, rt));
                    }
                }
            }
            t *= opts.backtrack;
            if t < opts.min_step {
                break None;
            }
        };
        let Some((mut nu, nf, nr)) = accepted else {
            break Stop::Stalled;
        };
        if p.bg == Background::Euclidean {
            project_mean_zero(&mut nu);
        }
        u = nu;
        f = nf;
        res = nr;
        iterations += 1;
        trajectory.push(res);
    };
    Ok((
        Run {
            u,
            residual: res,
            iterations,
            trajectory,
            jacobian_checks: checks,
        },
        stop,
    ))
}

fn flow(p: &Problem<'_>, mut u: Vec<f64>, opts: &SolveOptions) -> Result<(Run, Stop), SolveError> {
    let mut f = p
        .residual(&u)
        .ok_or_else(|| SolveError::Options("starting point is degenerate".into()))?;
    let mut res = inf_norm(&f);
    let mut energy = two_norm(&f);
    let mut trajectory = vec![res];
    let m = from_u(&u, p.bg)?;
    let diag = curvature_jacobian(p.c, p.phi, &m)?.diagonal().max();
    let mut dt = 1.0 / diag.max(1.0);
    let mut iterations = 0;
    let stop = loop {
        if res <= opts.tol {
            break Stop::Converged;
        }
        if iterations >= opts.max_flow_steps {
            break Stop::Budget;
        }
        let trial: Vec<f64> = u.iter().zip(&f).map(|(a, b)| a - dt * b).collect();
        let next = if p.in_domain(&trial) {
            p.residual(&trial).map(|ft| (trial, ft))
        } else {
            None
        };
        match next {
            Some((mut nu, nf)) if two_norm(&nf) < energy => {
                if p.bg == Background::Euclidean {
                    project_mean_zero(&mut nu);
                }
                u = nu;
                energy = two_norm(&nf);
                res = inf_norm(&nf);
                f = nf;
                iterations += 1;
                trajectory.push(res);
                dt = (dt * 1.2).min(1e6);
            }
            _ => {
                dt *= opts.backtrack;
                if dt < opts.min_step {
                    break Stop::Stalled;
                }
            }
        }
    };
    Ok((
        Run {
            u,
            residual: res,
            iterations,
            trajectory,
            jacobian_checks: Vec::new(),
        },
        stop,
    ))
}

fn validate(c: &DeltaComplex, phi: &AngleData, target: &[f64], opts: &SolveOptions) -> Result<(), SolveError> {
    let lens = [
        ("angles", c.edge_count(), phi.len()),
        ("target curvatures", c.vertex_count(), target.len()),
    ];
    for (what, expected, got) in lens {
        if expected != got {
            return Err(SolveError::LengthMismatch { what, expected, got });
        }
    }
    if let Some(r) = &opts.initial {
        if r.len() != c.vertex_count() {
            return Err(SolveError::LengthMismatch {
                what: "initial radii",
                expected: c.vertex_count(),
                got: r.len(),
            });
        }
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(SolveError::Options(format!("tolerance {} must be positive", opts.tol)));
    }
    if !(opts.backtrack > 0.0 && opts.backtrack < 1.0) {
        return Err(SolveError::Options(format!(
            "backtracking ratio {} must lie in (0, 1)",
            opts.backtrack
        )));
    }
    if !(opts.min_step > 0.0 && opts.min_step < 1.0) {
        return Err(SolveError::Options(format!(
            "minimum step {} must lie in (0, 1)",
            opts.min_step
        )));
    }
    if target.iter().any(|k| !k.is_finite()) {
        return Err(SolveError::Options("target curvatures must be finite".into()));
    }
    let cond = condition_s_all(c, phi);
    if !cond.ok {
        return Err(SolveError::ConditionS(cond.failing_triangles));
    }
    Ok(())
}

/// Solves `K(r) = K̄` with the configured method.
pub fn solve_prescribed(
    c: &DeltaComplex,
    phi: &AngleData,
    target: &[f64],
    bg: Background,
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    solve_prescribed_with_cover(c, phi, target, bg, opts, None)
}

/// Explicit-Euler Ricci flow towards `K̄`.
pub fn flow_to_target(
    c: &DeltaComplex,
    phi: &AngleData,
    target: &[f64],
    bg: Background,
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    let opts = SolveOptions {
        method: Method::Flow,
        ..opts.clone()
    };
    solve_prescribed_with_cover(c, phi, target, bg, &opts, None)
}

/// As [`solve_prescribed`]; when `cover` (over `c`) is given, its subset
/// constraints are checked first and used for divergence diagnostics.
pub fn solve_prescribed_with_cover(
    c: &DeltaComplex,
    phi: &AngleData,
    target: &[f64],
    bg: Background,
    opts: &SolveOptions,
    cover: Option<&Covering>,
) -> Result<SolveResult, SolveError> {
    validate(c, phi, target, opts)?;
    let gb = gauss_bonnet(target, c.euler_characteristic(), bg);
    if !gb.ok {
        return Ok(SolveResult::infeasible(
            opts.method,
            Infeasible::GaussBonnet { check: gb },
        ));
    }
    let mut nearest = None;
    if let Some(cov) = cover {
        let verdict = check_cover(cov, phi, target, bg, &KatOptions::default())?;
        if !verdict.feasible {
            return Ok(SolveResult::infeasible(
                opts.method,
                Infeasible::Kat {
                    worst: verdict.worst,
                    violation_count: verdict.violation_count,
                    gauss_bonnet: verdict.gauss_bonnet,
                },
            ));
        }
        nearest = verdict.worst;
    }

    let p = Problem { c, phi, target, bg };
    let start = match &opts.initial {
        Some(r) => PackingMetric::new(r.clone(), bg)?,
        None => PackingMetric::constant(c.vertex_count(), 1.0, bg)?,
    };
    let mut u0 = to_u(&start);
    if bg == Background::Euclidean {
        project_mean_zero(&mut u0);
    }

    let (mut run, mut stop, mut method, mut fallback_used) = match opts.method {
        Method::Newton => {
            let (run, stop) = newton(&p, u0, opts)?;
            (run, stop, Method::Newton, false)
        }
        Method::Flow => {
            let (run, stop) = flow(&p, u0, opts)?;
            (run, stop, Method::Flow, false)
        }
    };
    if !matches!(stop, Stop::Converged) && method == Method::Newton && opts.fallback {
        let (frun, fstop) = flow(&p, run.u.clone(), opts)?;
        let mut trajectory = std::mem::take(&mut run.trajectory);
        trajectory.extend_from_slice(&frun.trajectory[1..]);
        let checks = std::mem::take(&mut run.jacobian_checks);
        run = Run {
            iterations: run.iterations + frun.iterations,
            trajectory,
            jacobian_checks: checks,
            ..frun
        };
        stop = fstop;
        method = Method::Flow;
        fallback_used = true;
    }
    let divergence = |run: &Run| {
        let mut d = p.divergence(&run.u);
        d.nearest_constraint = nearest.clone();
        Box::new(d)
    };
    match stop {
        Stop::Converged => Ok(SolveResult {
            metric: Some(from_u(&run.u, bg)?),
            infeasible: None,
            method,
            fallback_used,
            iterations: run.iterations,
            residual: run.residual,
            trajectory: run.trajectory,
            gauge: (bg == Background::Euclidean).then_some("sum_u_zero"),
            jacobian_checks: run.jacobian_checks,
        }),
        Stop::Stalled if method == Method::Flow => Err(SolveError::StepUnderflow {
            iterations: run.iterations,
            residual: run.residual,
            min_step: opts.min_step,
            divergence: divergence(&run),
        }),
        _ => Err(SolveError::BudgetExhausted {
            method,
            iterations: run.iterations,
            residual: run.residual,
            divergence: divergence(&run),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverSolveResult {
    pub solve: SolveResult,
    pub seed: u64,
    /// Half-width of the uniform log-radius perturbation of the start.
    pub perturbation: f64,
    /// Spread of the solution radii over each deck orbit.
    pub invariance: DeckInvariance,
    /// `max |p̂∗K̂(r̂) − K̄|`.
    pub pushforward_residual: f64,
    /// Fiber-averaged radii on the base.
    pub base_metric: PackingMetric,
    /// `max |K(base_metric) − K̄|`.
    pub base_residual: f64,
}

pub const COVER_PERTURBATION: f64 = 0.25;

/// Solves the pulled-back problem on the cover from a seeded, deliberately
/// non-invariant start and measures how invariant the solution is.
pub fn solve_on_cover(
    cov: &Covering,
    phi: &AngleData,
    target: &[f64],
    bg: Background,
    opts: &SolveOptions,
    seed: u64,
) -> Result<CoverSolveResult, SolveError> {
    let base = cov.base();
    validate(base, phi, target, opts)?;
    let start_base = opts.initial.clone().unwrap_or_else(|| vec![1.0; base.vertex_count()]);
    let (solve, perturbation) = if cov.degree() == 1 {
        (solve_prescribed(base, phi, target, bg, opts)?, 0.0)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start: Vec<f64> = pullback_vertex_data(cov, &start_base)
            .into_iter()
            .map(|r| r * rng.random_range(-COVER_PERTURBATION..COVER_PERTURBATION).exp())
            .collect();
        let phi_hat = AngleData::new(pullback_edge_data(cov, phi.values()))?;
        let target_hat = pullback_vertex_data(cov, target);
        let o = SolveOptions {
            initial: Some(start),
            ..opts.clone()
        };
        (
            solve_prescribed(cov.total(), &phi_hat, &target_hat, bg, &o)?,
            COVER_PERTURBATION,
        )
    };
    let Some(metric) = &solve.metric else {
        let base_metric = PackingMetric::new(start_base, bg)?;
        return Ok(CoverSolveResult {
            solve,
            seed,
            perturbation,
            invariance: DeckInvariance {
                invariant: false,
                max_deviation: f64::INFINITY,
            },
            pushforward_residual: f64::INFINITY,
            base_metric,
            base_residual: f64::INFINITY,
        });
    };
    let invariance = is_deck_invariant(cov, metric.radii(), 1e-7);
    let phi_hat = AngleData::new(pullback_edge_data(cov, phi.values()))?;
    let k_hat = curvature_map(cov.total(), &phi_hat, metric)?;
    let pushed = pushforward_average(cov, k_hat.values());
    let pushforward_residual = pushed
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let base_metric = PackingMetric::new(pushforward_average(cov, metric.radii()), bg)?;
    let base_residual = curvature_map(base, phi, &base_metric)?.max_abs_diff(target);
    Ok(CoverSolveResult {
        solve,
        seed,
        perturbation,
        invariance,
        pushforward_residual,
        base_metric,
        base_residual,
    })
}

/// `2πχ` split evenly over the vertices: a Gauss–Bonnet-consistent
/// Euclidean target.
pub fn uniform_euclidean_target(c: &DeltaComplex) -> Vec<f64> {
    vec![2.0 * PI * c.euler_characteristic() as f64 / c.vertex_count() as f64; c.vertex_count()]
}
