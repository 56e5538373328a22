use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use circlepat::complex::DeltaComplex;
use circlepat::covering::{
    derived_cover, homology_voltages, pullback_edge_data, unwrap_with_attempts, Covering, PrimeAttempt,
    VoltageAssignment,
};
use circlepat::geometry::{
    condition_s_all, condition_w, curvature_from_angles, degenerate_witness, euclidean_e, triangle_geometry, AngleData,
    PackingMetric, TripleLayout,
};
use circlepat::io::{
    parse_triangulation, parse_vertex_values, parse_voltages, write_triangulation, write_vertex_values,
    ParsedTriangulation,
};
use circlepat::kat::{check_base_necessary, check_cover, constant_curvature_interval, gauss_bonnet, KatOptions};
use circlepat::solver::{solve_on_cover, solve_prescribed_with_cover, Method, SolveOptions};
use serde::Serialize;
use serde_json::json;

use crate::error::{exit, CliError};
use crate::output::{downsample, emit, read_text, write_atomic, Invocation};
use crate::{svg, Command, CoverArgs, CurvatureArgs, KatArgs, RenderArgs, SolveArgs, ValidateArgs};

const MAX_WITNESSES: usize = 200;
const TRAJECTORY_SAMPLES: usize = 100;

pub fn dispatch(cmd: &Command, inv: &Invocation) -> Result<i32, CliError> {
    match cmd {
        Command::Validate(a) => validate(a, inv),
        Command::Cover(a) => cover(a, inv),
        Command::Curvature(a) => curvature(a, inv),
        Command::Kat(a) => kat(a, inv),
        Command::Solve(a) => solve(a, inv),
        Command::RenderTriple(a) => render_triple(a, inv),
    }
}

fn load(path: &Path) -> Result<ParsedTriangulation, CliError> {
    Ok(parse_triangulation(&read_text(path)?)?)
}

/// A per-vertex value argument: an existing file, or a number applied to
/// every vertex.
fn vertex_values(arg: &str, vertices: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(parse_vertex_values(&read_text(path)?, vertices)?);
    }
    match arg.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(vec![x; vertices]),
        _ => Err(CliError::usage(format!(
            "{what} `{arg}` is neither a readable file nor a finite number"
        ))),
    }
}

#[derive(Serialize)]
struct Counts {
    vertices: usize,
    edges: usize,
    triangles: usize,
}

impl Counts {
    fn of(c: &DeltaComplex) -> Self {
        Self {
            vertices: c.vertex_count(),
            edges: c.edge_count(),
            triangles: c.triangle_count(),
        }
    }
}

fn capped<T: Clone>(xs: &[T]) -> Vec<T> {
    xs.iter().take(MAX_WITNESSES).cloned().collect()
}

fn validate(a: &ValidateArgs, inv: &Invocation) -> Result<i32, CliError> {
    let parsed = load(&a.file)?;
    let c = &parsed.complex;
    let simp = c.is_simplicial();
    let orientation = c.orientation();
    let chi = c.euler_characteristic();
    let genus = c.genus();
    let error = orientation
        .as_ref()
        .err()
        .or(genus.as_ref().err())
        .map(|e| e.to_string());
    let cond = condition_s_all(c, &parsed.phi);
    let report = json!({
        "invocation": inv,
        "file": a.file,
        "valid": error.is_none(),
        "error": error,
        "counts": Counts::of(c),
        "simplicial": simp.simplicial,
        "loops": simp.loops,
        "parallel": simp.parallel,
        "euler_characteristic": chi,
        "orientable": orientation.is_ok(),
        "orientation": orientation.as_ref().ok().map(|o| &o.eps),
        "genus": genus.as_ref().ok(),
        "degrees": (0..c.vertex_count()).map(|v| c.degree(v)).collect::<Vec<_>>(),
        "phi": parsed.phi.values(),
        "phi_defaulted": parsed.defaulted_phi,
        "condition_s": cond,
    });
    emit(a.out.as_deref(), &report)?;
    if let Some(e) = error {
        eprintln!("error: {e}");
        return Ok(exit::DOMAIN);
    }
    Ok(exit::OK)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".sidecar.json");
    PathBuf::from(s)
}

fn cover_from_arg(
    c: &DeltaComplex,
    arg: &str,
    p_max: u32,
) -> Result<(Covering, Vec<PrimeAttempt>, String), CliError> {
    if arg == "auto" {
        let (cov, attempts) = unwrap_with_attempts(c, p_max)?;
        return Ok((cov, attempts, format!("auto (p_max {p_max})")));
    }
    let va = parse_voltages(&read_text(Path::new(arg))?, c.edge_count())?;
    Ok((derived_cover(c, &va)?, Vec::new(), format!("voltages {arg}")))
}

fn group_json(va: &VoltageAssignment) -> serde_json::Value {
    let g = va.group();
    json!({ "p": g.modulus, "k": g.rank, "order": g.order() })
}

fn cover(a: &CoverArgs, inv: &Invocation) -> Result<i32, CliError> {
    let parsed = load(&a.file)?;
    let c = &parsed.complex;
    let (cov, attempts, mode) = if let Some(path) = &a.voltages {
        let va = parse_voltages(&read_text(path)?, c.edge_count())?;
        (
            derived_cover(c, &va)?,
            Vec::new(),
            format!("voltages {}", path.display()),
        )
    } else if let Some(p) = a.p {
        let va = homology_voltages(c, p)?;
        (derived_cover(c, &va)?, Vec::new(), format!("homology p={p}"))
    } else {
        let p_max = a.auto.unwrap_or(circlepat::covering::DEFAULT_P_MAX);
        let (cov, attempts) = unwrap_with_attempts(c, p_max)?;
        (cov, attempts, format!("auto (p_max {p_max})"))
    };
    cov.verify()?;
    let total = cov.total();
    let simp = total.is_simplicial();
    let mut outputs = json!(null);
    if let Some(out) = &a.out {
        let phi_hat = AngleData::new(pullback_edge_data(&cov, parsed.phi.values()))?;
        let header = format!("# cover of {} ({mode}), degree {}\n", a.file.display(), cov.degree());
        write_atomic(out, (header + &write_triangulation(total, Some(&phi_hat))).as_bytes())?;
        let side = sidecar_path(out);
        write_atomic(&side, crate::output::to_json(&cov.sidecar()).as_bytes())?;
        outputs = json!({ "complex": out, "sidecar": side });
    }
    let report = json!({
        "invocation": inv,
        "mode": mode,
        "base": {
            "counts": Counts::of(c),
            "euler_characteristic": c.euler_characteristic(),
            "genus": c.genus().ok(),
            "simplicial": c.is_simplicial().simplicial,
        },
        "group": group_json(cov.voltages()),
        "voltages": cov.voltages().voltages(),
        "degree": cov.degree(),
        "total": {
            "counts": Counts::of(total),
            "euler_characteristic": total.euler_characteristic(),
            "genus": total.genus().ok(),
            "genus_from_degree": cov.total_genus().ok(),
        },
        "simplicial": simp.simplicial,
        "loops": capped(&simp.loops),
        "parallel": capped(&simp.parallel),
        "loop_count": simp.loops.len(),
        "parallel_count": simp.parallel.len(),
        "rejected_primes": attempts.iter().map(|at| json!({
            "p": at.p,
            "degree": at.degree,
            "loop_count": at.loops.len(),
            "parallel_count": at.parallel.len(),
            "loops": capped(&at.loops),
            "parallel": capped(&at.parallel),
        })).collect::<Vec<_>>(),
        "outputs": outputs,
    });
    emit(a.report.as_deref(), &report)?;
    if !simp.simplicial {
        eprintln!(
            "error: cover is not simplicial ({} loops, {} parallel pairs)",
            simp.loops.len(),
            simp.parallel.len()
        );
        return Ok(exit::DOMAIN);
    }
    Ok(exit::OK)
}

fn curvature(a: &CurvatureArgs, inv: &Invocation) -> Result<i32, CliError> {
    let parsed = load(&a.file)?;
    let c = &parsed.complex;
    let radii = vertex_values(&a.radii, c.vertex_count(), "radii")?;
    let m = PackingMetric::new(radii, a.bg)?;
    let cond = condition_s_all(c, &parsed.phi);
    if !cond.ok {
        eprintln!(
            "warning: angle condition (S) fails on triangles {:?}",
            cond.failing_triangles
        );
    }
    let geo = triangle_geometry(c, &parsed.phi, &m)?;
    let k = curvature_from_angles(c, &geo.angles);
    let gb = gauss_bonnet(k.values(), c.euler_characteristic(), a.bg);
    let deficits = geo.angle_deficits();
    let triangles: Vec<_> = (0..c.triangle_count())
        .map(|t| {
            json!({
                "id": t,
                "vertices": c.vertices_of(t).0,
                "edges": c.triangle(t).faces,
                "lengths": geo.lengths[t],
                "angles": geo.angles[t],
            })
        })
        .collect();
    let report = json!({
        "invocation": inv,
        "background": a.bg,
        "radii": m.radii(),
        "phi": parsed.phi.values(),
        "phi_defaulted": parsed.defaulted_phi,
        "condition_s": cond,
        "curvature": k.values(),
        "total_curvature": k.total(),
        "gauss_bonnet": {
            "sum": gb.lhs,
            "two_pi_chi": gb.rhs,
            "mode": gb.mode,
            "ok": gb.ok,
            "angle_deficit_sum": deficits.iter().sum::<f64>(),
        },
        "triangles": triangles,
    });
    emit(a.out.as_deref(), &report)?;
    Ok(exit::OK)
}

fn kat(a: &KatArgs, inv: &Invocation) -> Result<i32, CliError> {
    let started = Instant::now();
    let parsed = load(&a.file)?;
    let c = &parsed.complex;
    let k = vertex_values(&a.k, c.vertex_count(), "K")?;
    let (cov, attempts, mode) = cover_from_arg(c, &a.cover, a.p_max)?;
    let opts = KatOptions {
        cap: a.cap,
        max_listed: a.max_listed,
        cone_positivity: a.cone_positivity,
    };
    let on_cover = check_cover(&cov, &parsed.phi, &k, a.bg, &opts)?;
    let on_base = check_base_necessary(c, &parsed.phi, &k, a.bg, &opts)?;
    let constant = if c.vertex_count() == 1 {
        Some(constant_curvature_interval(&cov, &parsed.phi, a.bg, &opts)?)
    } else {
        None
    };
    let report = json!({
        "invocation": inv,
        "background": a.bg,
        "K": k,
        "phi": parsed.phi.values(),
        "phi_defaulted": parsed.defaulted_phi,
        "cover": {
            "mode": mode,
            "group": group_json(cov.voltages()),
            "degree": cov.degree(),
            "vertices": cov.total().vertex_count(),
            "rejected_primes": attempts.iter().map(|at| at.p).collect::<Vec<_>>(),
        },
        "verdict": if on_cover.feasible { "feasible" } else { "infeasible" },
        "cover_check": on_cover,
        "base_check": on_base,
        "contrast": {
            "cover_subsets_checked": on_cover.subsets_checked,
            "base_subsets_checked": on_base.subsets_checked,
            "base_vacuous": on_base.subsets_checked == 0,
            "cover_feasible": on_cover.feasible,
            "base_feasible": on_base.feasible,
            "agree": on_cover.feasible == on_base.feasible,
        },
        "constant_curvature": constant,
        "wall_time_ms": started.elapsed().as_secs_f64() * 1e3,
    });
    emit(a.out.as_deref(), &report)?;
    Ok(if on_cover.feasible { exit::OK } else { exit::DOMAIN })
}

fn solve(a: &SolveArgs, inv: &Invocation) -> Result<i32, CliError> {
    let parsed = load(&a.file)?;
    let c = &parsed.complex;
    let target = vertex_values(&a.k, c.vertex_count(), "K")?;
    let initial = a
        .init
        .as_deref()
        .map(|s| vertex_values(s, c.vertex_count(), "initial radii"))
        .transpose()?;
    let mut opts = SolveOptions {
        method: a.method,
        tol: a.tol,
        fallback: !a.no_fallback,
        initial,
        ..SolveOptions::default()
    };
    if let Some(n) = a.max_iter {
        match a.method {
            Method::Newton => opts.max_newton_iter = n,
            Method::Flow => opts.max_flow_steps = n,
        }
    }
    let cover = a
        .cover
        .as_deref()
        .map(|arg| cover_from_arg(c, arg, a.p_max))
        .transpose()?;
    let kat_cover = cover
        .as_ref()
        .filter(|(cov, _, _)| {
            cov.total().vertex_count() <= circlepat::kat::DEFAULT_SUBSET_CAP && cov.total().is_simplicial().simplicial
        })
        .map(|(cov, _, _)| cov);
    let result = solve_prescribed_with_cover(c, &parsed.phi, &target, a.bg, &opts, kat_cover)?;

    let mut cover_json = json!(null);
    if let (Some((cov, _, mode)), true) = (&cover, result.converged()) {
        let r = solve_on_cover(cov, &parsed.phi, &target, a.bg, &opts, a.seed)?;
        cover_json = json!({
            "mode": mode,
            "group": group_json(cov.voltages()),
            "degree": cov.degree(),
            "kat_precheck": kat_cover.is_some(),
            "seed": r.seed,
            "perturbation": r.perturbation,
            "converged": r.solve.converged(),
            "iterations": r.solve.iterations,
            "residual": r.solve.residual,
            "method_used": r.solve.method,
            "invariance_deviation": r.invariance.max_deviation,
            "invariant": r.invariance.invariant,
            "pushforward_residual": r.pushforward_residual,
            "base_residual": r.base_residual,
            "pushforward_radii": r.base_metric.radii(),
        });
    }

    let mut outputs = json!(null);
    if let Some(m) = &result.metric {
        let radii_path = a
            .radii_out
            .clone()
            .or_else(|| a.out.as_ref().map(|p| p.with_extension("radii")));
        if let Some(p) = radii_path {
            write_atomic(&p, write_vertex_values(m.radii()).as_bytes())?;
            outputs = json!({ "radii": p });
        }
    }
    let report = json!({
        "invocation": inv,
        "background": a.bg,
        "method": a.method,
        "method_used": result.method,
        "fallback_used": result.fallback_used,
        "seed": a.seed,
        "converged": result.converged(),
        "infeasible": result.infeasible,
        "iterations": result.iterations,
        "residual": result.residual,
        "tolerance": a.tol,
        "trajectory": downsample(&result.trajectory, TRAJECTORY_SAMPLES),
        "radii": result.metric.as_ref().map(|m| m.radii()),
        "gauge": result.gauge,
        "cover": cover_json,
        "outputs": outputs,
    });
    emit(a.out.as_deref(), &report)?;
    if !result.converged() {
        eprintln!("error: target curvature is infeasible");
        return Ok(exit::DOMAIN);
    }
    Ok(exit::OK)
}

fn render_triple(a: &RenderArgs, inv: &Invocation) -> Result<i32, CliError> {
    let radii = [a.r_i, a.r_j, a.r_k];
    let phi = [a.phi_i, a.phi_j, a.phi_k];
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(CliError::new(
            "invalid-input",
            exit::DOMAIN,
            format!("radius {r} is not positive"),
        ));
    }
    if let Some(p) = phi.iter().find(|p| !(**p >= 0.0 && **p < PI)) {
        return Err(CliError::new(
            "invalid-input",
            exit::DOMAIN,
            format!("angle {p} outside [0, π)"),
        ));
    }
    let e = euclidean_e(radii, phi);
    let scale = radii.iter().sum::<f64>().powi(4);
    if e <= 1e-12 * scale {
        let witness = degenerate_witness(phi).ok();
        return Err(CliError::new(
            "degenerate",
            exit::DOMAIN,
            format!("degenerate configuration: E = {e:e} ≤ 0; the centers cannot form a triangle"),
        )
        .with_details(json!({
            "E": e,
            "weak_condition": condition_w(phi),
            "degenerate_witness": witness,
        })));
    }
    let layout = TripleLayout::new(radii, phi).map_err(|d| {
        CliError::new(
            "degenerate",
            exit::DOMAIN,
            format!("degenerate configuration with side lengths {:?}", d.lengths),
        )
    })?;
    write_atomic(&a.out, svg::render(&layout).as_bytes())?;
    let measured = layout.measured_angles();
    let err = (0..3)
        .map(|i| (measured[i] - layout.angles[i]).abs())
        .fold(0.0, f64::max);
    let report = json!({
        "invocation": inv,
        "radii": radii,
        "phi": phi,
        "E": e,
        "centers": layout.centers,
        "sides": layout.lengths,
        "angles": layout.angles,
        "measured_angles": measured,
        "max_angle_error": err,
        "output": a.out,
    });
    emit(a.report.as_deref(), &report)?;
    Ok(exit::OK)
}
