//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` still print FAIL when they fail,
//! but do not turn the process exit status nonzero. Anything else failing
//! does.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use circlepat::complex::DeltaComplex;
use circlepat::covering::{
    derived_cover, homology_voltages, identity_cover, pullback_edge_data, pullback_vertex_data, pushforward_average,
    unwrap,
};
use circlepat::fixtures;
use circlepat::geometry::{
    condition_s, condition_s_all, condition_w, curvature_map, degenerate_witness, euclidean_e, triangle_angles,
    triangle_geometry, triple_lengths, AngleData, Background, PackingMetric,
};
use circlepat::kat::{
    check_base_necessary, check_cover, curvature_limit_base, evaluate_cover_subset, kat_rhs_delta, GaussBonnetMode,
    KatOptions,
};
use circlepat::solver::{solve_on_cover, solve_prescribed, Method, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Criterion 4 demands a strictly negative derivative of the angle sum in
/// both backgrounds; in the Euclidean plane that sum is identically π.
const KNOWN_UNATTAINABLE: &[usize] = &[4];

fn main() {
    let criteria: [Criterion; 13] = [
        ("one-vertex torus pipeline", c01_torus_pipeline),
        ("flat torus curvature and Newton", c02_flat_torus),
        ("Gauss-Bonnet identities", c03_gauss_bonnet),
        ("angle monotonicity", c04_monotonicity),
        ("angle limits", c05_limits),
        ("degeneracy when (W) fails", c06_necessity),
        ("(S) implies (W), strictly", c07_s_implies_w),
        ("pullback-pushforward of curvature", c08_pushforward),
        ("deck-invariant cover solutions", c09_cover_invariance),
        ("cover check soundness and completeness probe", c10_soundness),
        ("preimage subset equivalence", c11_preimage),
        ("curvature limit formula", c12_limit_formula),
        ("base inequalities are vacuous", c13_insufficiency),
    ];
    let started = Instant::now();
    let mut unexpected = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let ms = t0.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("PASS {n:>2} {name} [{ms:.0} ms]: {detail}"),
            Err(detail) => {
                let known = KNOWN_UNATTAINABLE.contains(&n);
                if !known {
                    unexpected += 1;
                }
                let tag = if known { " (known unattainable)" } else { "" };
                println!("FAIL {n:>2} {name}{tag} [{ms:.0} ms]: {detail}");
            }
        }
    }
    println!("total {:.1} s", started.elapsed().as_secs_f64());
    if unexpected > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn cli(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_circlepat"))
        .args(args)
        .output()
        .expect("run circlepat");
    let code = out.status.code().unwrap_or(-1);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Random edge angles with (S) in every triangle: rejection sampling over a
/// wide range, then the always-valid acute range.
fn random_phi(c: &DeltaComplex, rng: &mut ChaCha8Rng) -> AngleData {
    for _ in 0..2000 {
        let phi = AngleData::new((0..c.edge_count()).map(|_| rng.random_range(0.0..0.8 * PI)).collect()).unwrap();
        if condition_s_all(c, &phi).ok {
            return phi;
        }
    }
    AngleData::new((0..c.edge_count()).map(|_| rng.random_range(0.0..0.5 * PI)).collect()).unwrap()
}

fn random_s_triple(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let phi = [0; 3].map(|_| rng.random_range(0.0..PI));
        if condition_s(phi) {
            return phi;
        }
    }
}

/// Interior angles by the plain law of cosines.
fn oracle_angles(r: [f64; 3], phi: [f64; 3], bg: Background) -> [f64; 3] {
    let len = |a: f64, b: f64, f: f64| match bg {
        Background::Euclidean => (a * a + b * b + 2.0 * a * b * f.cos()).sqrt(),
        Background::Hyperbolic => (a.cosh() * b.cosh() + a.sinh() * b.sinh() * f.cos()).acosh(),
    };
    let l = [
        len(r[1], r[2], phi[0]),
        len(r[2], r[0], phi[1]),
        len(r[0], r[1], phi[2]),
    ];
    let mut th = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let c = match bg {
            Background::Euclidean => (l[j] * l[j] + l[k] * l[k] - l[i] * l[i]) / (2.0 * l[j] * l[k]),
            Background::Hyperbolic => (l[j].cosh() * l[k].cosh() - l[i].cosh()) / (l[j].sinh() * l[k].sinh()),
        };
        th[i] = c.clamp(-1.0, 1.0).acos();
    }
    th
}

fn angles(r: [f64; 3], phi: [f64; 3], bg: Background) -> [f64; 3] {
    triangle_angles(triple_lengths(r, phi, bg), bg).expect("non-degenerate triple")
}

fn c01_torus_pipeline() -> Outcome {
    let torus = data("torus.tri");
    let torus = torus.to_str().unwrap();
    let (code, v) = cli(&["validate", torus]);
    ensure(code == 0, || format!("validate exit {code}"))?;
    ensure(v["euler_characteristic"] == 0 && v["genus"] == 1, || {
        "χ or genus wrong".into()
    })?;
    ensure(v["simplicial"] == false, || "base reported simplicial".into())?;
    let loops = v["loops"].as_array().map_or(0, Vec::len);
    ensure(loops == 3, || format!("{loops} loop witnesses"))?;

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cover.tri");
    let (code, rep) = cli(&["cover", torus, "--auto", "--out", out.to_str().unwrap()]);
    ensure(code == 0, || format!("cover exit {code}"))?;
    ensure(rep["group"]["p"] == 3 && rep["degree"] == 9, || {
        format!("group {}", rep["group"])
    })?;
    let counts = &rep["total"]["counts"];
    ensure(
        counts["vertices"] == 9 && counts["edges"] == 27 && counts["triangles"] == 18,
        || format!("cells {counts}"),
    )?;
    ensure(rep["simplicial"] == true, || "cover not simplicial".into())?;
    let rejected = rep["rejected_primes"].as_array().cloned().unwrap_or_default();
    ensure(
        rejected.len() == 1 && rejected[0]["p"] == 2 && rejected[0]["parallel_count"].as_u64().unwrap_or(0) > 0,
        || format!("rejected primes {rejected:?}"),
    )?;
    let parallel = rejected[0]["parallel_count"].as_u64().unwrap();

    let (code, tv) = cli(&["validate", out.to_str().unwrap()]);
    ensure(code == 0, || format!("validate on cover exit {code}"))?;
    let degrees: Vec<u64> = tv["degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_u64().unwrap())
        .collect();
    ensure(degrees.len() == 9 && degrees.iter().all(|&d| d == 6), || {
        format!("degrees {degrees:?}")
    })?;
    ensure(tv["simplicial"] == true && tv["genus"] == 1, || {
        "cover file not a simplicial torus".into()
    })?;

    let (code, p2) = cli(&["cover", torus, "--p", "2"]);
    ensure(code == 1 && p2["simplicial"] == false, || format!("--p 2 exit {code}"))?;
    Ok(format!(
        "χ=0 g=1, 3 loops; p=3 deg 9 cells (9,27,18) all degree 6; p=2 rejected with {parallel} parallel pairs"
    ))
}

fn c02_flat_torus() -> Outcome {
    let c = fixtures::one_vertex_torus();
    let phi = AngleData::zeros(c.edge_count());
    let k = curvature_map(
        &c,
        &phi,
        &PackingMetric::constant(1, 1.0, Background::Euclidean).unwrap(),
    )
    .unwrap();
    let kmax = k.values().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    ensure(kmax <= 1e-12, || format!("|K| = {kmax:e}"))?;
    let opts = SolveOptions {
        method: Method::Newton,
        fallback: false,
        initial: Some(vec![0.37]),
        ..SolveOptions::default()
    };
    let res = solve_prescribed(&c, &phi, &[0.0], Background::Euclidean, &opts).map_err(|e| e.to_string())?;
    let m = res.metric.as_ref().ok_or("no metric")?;
    ensure(res.residual < 1e-10, || format!("residual {:e}", res.residual))?;
    ensure(res.iterations <= 20, || format!("{} iterations", res.iterations))?;
    let dr = (m.radii()[0] - 1.0).abs();
    ensure(dr < 1e-12, || format!("gauged radius off by {dr:e}"))?;
    Ok(format!(
        "|K| = {kmax:.1e} for every r; from r=0.37: {} Newton iterations, residual {:.1e}, r = {}",
        res.iterations,
        res.residual,
        m.radii()[0]
    ))
}

fn c03_gauss_bonnet() -> Outcome {
    let complexes = [
        fixtures::one_vertex_torus(),
        fixtures::tetrahedron(),
        fixtures::one_vertex_genus2(),
    ];
    let mut rng = rng(3);
    let (mut worst_e, mut worst_h, mut worst_oracle) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..200 {
        let c = &complexes[n % 3];
        let phi = random_phi(c, &mut rng);
        let chi = c.euler_characteristic() as f64;
        for bg in [Background::Euclidean, Background::Hyperbolic] {
            let hi = if bg == Background::Euclidean { 5.0 } else { 2.5 };
            let radii: Vec<f64> = (0..c.vertex_count()).map(|_| log_uniform(&mut rng, 0.05, hi)).collect();
            let m = PackingMetric::new(radii.clone(), bg).unwrap();
            let geo = triangle_geometry(c, &phi, &m).map_err(|e| e.to_string())?;
            let k = curvature_map(c, &phi, &m).unwrap();
            let excess = k.total() - 2.0 * PI * chi;
            for (t, th) in geo.angles.iter().enumerate() {
                let vt = c.vertices_of(t).0;
                let tp = [0, 1, 2].map(|s| {
                    let e = c.triangle(t).faces[s];
                    phi.get(e)
                });
                let o = oracle_angles(vt.map(|v| radii[v]), tp, bg);
                for s in 0..3 {
                    worst_oracle = worst_oracle.max((o[s] - th[s]).abs());
                }
            }
            match bg {
                Background::Euclidean => worst_e = worst_e.max(excess.abs()),
                Background::Hyperbolic => {
                    let deficits: f64 = geo.angles.iter().map(|a| PI - a.iter().sum::<f64>()).sum();
                    ensure(deficits > 0.0, || format!("instance {n}: deficit sum {deficits}"))?;
                    worst_h = worst_h.max((excess - deficits).abs());
                }
            }
        }
    }
    ensure(worst_e <= 1e-9, || format!("Euclidean |ΣK − 2πχ| = {worst_e:e}"))?;
    ensure(worst_h <= 1e-9, || format!("hyperbolic |ΣK − 2πχ − Σδ| = {worst_h:e}"))?;
    ensure(worst_oracle <= 1e-6, || {
        format!("angles differ from the law of cosines by {worst_oracle:e}")
    })?;
    Ok(format!(
        "200 instances; Euclidean max error {worst_e:.1e}, hyperbolic {worst_h:.1e}; law-of-cosines angles agree to {worst_oracle:.1e}"
    ))
}

fn c04_monotonicity() -> Outcome {
    let mut rng = rng(4);
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for bg in [Background::Euclidean, Background::Hyperbolic] {
        let (mut own_max, mut other_min, mut sum_max) = (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        let (mut own_bad, mut other_bad, mut sum_bad) = (0, 0, 0);
        for _ in 0..500 {
            let phi = random_s_triple(&mut rng);
            let hi = if bg == Background::Euclidean { 10.0 } else { 3.0 };
            let r = [0; 3].map(|_| log_uniform(&mut rng, 0.1, hi));
            let i = rng.random_range(0..3);
            let h = 1e-6 * r[i];
            let (mut rp, mut rm) = (r, r);
            rp[i] += h;
            rm[i] -= h;
            let (tp, tm) = (angles(rp, phi, bg), angles(rm, phi, bg));
            let d: Vec<f64> = (0..3).map(|s| (tp[s] - tm[s]) / (2.0 * h)).collect();
            let own = d[i];
            let other = d[(i + 1) % 3].min(d[(i + 2) % 3]);
            let sum = d.iter().sum::<f64>();
            own_max = own_max.max(own);
            other_min = other_min.min(other);
            sum_max = sum_max.max(sum);
            own_bad += (own >= 0.0) as usize;
            other_bad += (other < -1e-9) as usize;
            sum_bad += (sum >= 0.0) as usize;
        }
        report.push(format!(
            "{bg}: max ∂θi/∂ri {own_max:.2e}, min ∂θj/∂ri {other_min:.2e}, max ∂Σθ/∂ri {sum_max:.2e}"
        ));
        if own_bad + other_bad + sum_bad > 0 {
            failures.push(format!(
                "{bg}: {own_bad} own-angle, {other_bad} other-angle, {sum_bad} angle-sum sign failures of 500"
            ));
        }
    }
    if failures.is_empty() {
        Ok(report.join("; "))
    } else {
        Err(format!(
            "{}; {} (the Euclidean angle sum is constantly π, so its derivative is 0 up to rounding)",
            failures.join("; "),
            report.join("; ")
        ))
    }
}

fn c05_limits() -> Outcome {
    let phis = [
        [0.0, 0.0, 0.0],
        [PI / 3.0; 3],
        [0.5, 1.0, 0.3],
        [PI / 2.0, PI / 2.0, 0.2],
        [0.1, 0.2, 1.2],
    ];
    let others = [(0.5, 2.0), (1.0, 1.0), (3.0, 0.7)];
    let mut worst = [0.0f64; 4];
    for phi in phis {
        ensure(condition_s(phi), || format!("probe {phi:?} violates (S)"))?;
        for &(a, b) in &others {
            let big_e = angles([1e6, a, b], phi, Background::Euclidean)[0];
            let big_h = angles([50.0, a, b], phi, Background::Hyperbolic)[0];
            worst[0] = worst[0].max(big_e).max(big_h);
            for bg in [Background::Euclidean, Background::Hyperbolic] {
                let t = angles([1e-8, a, b], phi, bg);
                worst[1] = worst[1].max((t[0] - (PI - phi[0])).abs());
                let t = angles([1e-8, 1e-8, a], phi, bg);
                worst[2] = worst[2].max((t[0] + t[1] - PI).abs());
                let t = angles([1e-8; 3], phi, bg);
                worst[3] = worst[3].max((t.iter().sum::<f64>() - PI).abs());
            }
        }
    }
    let names = ["θi at large ri", "|θi − (π − Φi)|", "|θi + θj − π|", "|Σθ − π|"];
    for (w, name) in worst.iter().zip(names) {
        ensure(*w < 1e-3, || format!("{name} = {w:e}"))?;
    }
    Ok(format!(
        "{}: {:.1e}, {}: {:.1e}, {}: {:.1e}, {}: {:.1e}",
        names[0], worst[0], names[1], worst[1], names[2], worst[2], names[3], worst[3]
    ))
}

fn c06_necessity() -> Outcome {
    let mut rng = rng(6);
    let mut n = 0;
    let mut e_max = f64::NEG_INFINITY;
    while n < 50 {
        let phi = [0; 3].map(|_| rng.random_range(0.0..PI));
        if condition_w(phi) {
            continue;
        }
        let small = (0..3)
            .find(|&k| phi[(k + 1) % 3] + phi[(k + 2) % 3] >= PI + phi[k])
            .unwrap();
        if phi[small].cos().abs() >= 1.0 {
            continue;
        }
        n += 1;
        let w = degenerate_witness(phi).map_err(|e| e.to_string())?;
        let e = euclidean_e(w.radii, phi);
        e_max = e_max.max(e);
        ensure(e <= 0.0, || format!("{phi:?}: E = {e:e} at {:?}", w.radii))?;
        let lengths = triple_lengths(w.radii, phi, Background::Euclidean);
        ensure(triangle_angles(lengths, Background::Euclidean).is_err(), || {
            format!("{phi:?}: lengths {lengths:?} not reported degenerate")
        })?;
    }
    Ok(format!(
        "50 triples, max E at the witness {e_max:.2e}, all reported degenerate"
    ))
}

fn c07_s_implies_w() -> Outcome {
    let mut rng = rng(7);
    let mut s_true = 0;
    for _ in 0..10_000 {
        let phi = [0; 3].map(|_| rng.random_range(0.0..PI));
        if condition_s(phi) {
            s_true += 1;
            ensure(condition_w(phi), || format!("{phi:?} satisfies (S) but not (W)"))?;
        }
    }
    let witness = [0.6 * PI; 3];
    ensure(!condition_s(witness) && condition_w(witness), || {
        "(0.6π)³ is not a strictness witness".into()
    })?;
    Ok(format!(
        "10⁴ triples, {s_true} with (S), none without (W); (0.6π)³ has (W) but not (S)"
    ))
}

fn c08_pushforward() -> Outcome {
    let c = fixtures::one_vertex_torus();
    let cov = unwrap(&c, 7).map_err(|e| e.to_string())?;
    ensure(cov.degree() == 9, || format!("degree {}", cov.degree()))?;
    let mut rng = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let phi = random_phi(&c, &mut rng);
        let phi_hat = AngleData::new(pullback_edge_data(&cov, phi.values())).unwrap();
        for bg in [Background::Euclidean, Background::Hyperbolic] {
            let r = vec![log_uniform(&mut rng, 0.05, 4.0)];
            let base = curvature_map(&c, &phi, &PackingMetric::new(r.clone(), bg).unwrap()).unwrap();
            let m_hat = PackingMetric::new(pullback_vertex_data(&cov, &r), bg).unwrap();
            let k_hat = curvature_map(cov.total(), &phi_hat, &m_hat).unwrap();
            let pushed = pushforward_average(&cov, k_hat.values());
            worst = worst.max(base.max_abs_diff(&pushed));
        }
    }
    ensure(worst <= 1e-10, || format!("max difference {worst:e}"))?;
    Ok(format!(
        "100 radii per background on the degree-9 cover, max difference {worst:.1e}"
    ))
}

fn c09_cover_invariance() -> Outcome {
    let c = fixtures::one_vertex_torus();
    let cov = unwrap(&c, 7).map_err(|e| e.to_string())?;
    let phi = AngleData::new(vec![0.3, 0.5, 0.2]).unwrap();
    let target_h = curvature_map(
        &c,
        &phi,
        &PackingMetric::new(vec![0.8], Background::Hyperbolic).unwrap(),
    )
    .unwrap()
    .0;
    let mut worst = 0.0f64;
    let mut worst_start = 0.0f64;
    for (bg, target) in [(Background::Euclidean, vec![0.0]), (Background::Hyperbolic, target_h)] {
        for seed in 0..20 {
            let r =
                solve_on_cover(&cov, &phi, &target, bg, &SolveOptions::default(), seed).map_err(|e| e.to_string())?;
            ensure(r.solve.converged(), || format!("{bg} seed {seed} did not converge"))?;
            ensure(r.perturbation > 0.0, || "start was not perturbed".into())?;
            worst = worst.max(r.invariance.max_deviation);
            worst_start = worst_start.max(r.perturbation);
        }
    }
    ensure(worst <= 1e-7, || format!("orbit spread {worst:e}"))?;
    Ok(format!(
        "20 seeds per background from starts perturbed by up to ±{worst_start} in log r, max orbit spread {worst:.1e}"
    ))
}

fn c10_soundness() -> Outcome {
    let c = fixtures::one_vertex_torus();
    let cov = unwrap(&c, 7).map_err(|e| e.to_string())?;
    let bg = Background::Hyperbolic;
    let opts = KatOptions::default();
    let mut rng = rng(10);
    let mut min_slack = f64::INFINITY;
    for n in 0..100 {
        let phi = random_phi(&c, &mut rng);
        let r = vec![log_uniform(&mut rng, 0.05, 4.0)];
        let k = curvature_map(&c, &phi, &PackingMetric::new(r, bg).unwrap()).unwrap();
        let v = check_cover(&cov, &phi, k.values(), bg, &opts).map_err(|e| e.to_string())?;
        ensure(v.subsets_checked == 510, || format!("{} subsets", v.subsets_checked))?;
        ensure(v.feasible && v.violation_count == 0 && v.boundary_count == 0, || {
            format!(
                "instance {n}: realised curvature rejected ({} violations)",
                v.violation_count
            )
        })?;
        ensure(
            v.gauss_bonnet.mode == GaussBonnetMode::Strict && v.gauss_bonnet.ok,
            || format!("instance {n}: Gauss-Bonnet not strict"),
        )?;
        if let Some(w) = &v.worst {
            min_slack = min_slack.min(w.slack);
        }
    }

    let phi = AngleData::zeros(c.edge_count());
    let (mut agree, mut feasible_count) = (0, 0);
    let mut disagreements = Vec::new();
    let grid: Vec<f64> = (1..=62).map(|j| 0.1 * j as f64).collect();
    for &kc in &grid {
        let verdict = check_cover(&cov, &phi, &[kc], bg, &opts).map_err(|e| e.to_string())?;
        let solved = solve_prescribed(&c, &phi, &[kc], bg, &SolveOptions::default())
            .map(|r| r.converged())
            .unwrap_or(false);
        feasible_count += verdict.feasible as usize;
        if verdict.feasible == solved {
            agree += 1;
        } else {
            disagreements.push(format!("K={kc:.1}: check {} solver {}", verdict.feasible, solved));
        }
    }
    if !disagreements.is_empty() {
        println!(
            "     criterion 10 disagreements (cone positivity question): {}",
            disagreements.join(", ")
        );
    }
    ensure(disagreements.is_empty(), || {
        format!("{} grid disagreements", disagreements.len())
    })?;
    Ok(format!(
        "100 realised curvatures accepted, min slack {min_slack:.3}; grid of {} constants in (0, 2π): {agree} agree, {feasible_count} feasible",
        grid.len()
    ))
}

fn c11_preimage() -> Outcome {
    let mut rng = rng(11);
    let tet = fixtures::tetrahedron();
    let two = fixtures::two_vertex_torus();
    let two_cov =
        derived_cover(&two, &homology_voltages(&two, 3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(two_cov.total().is_simplicial().simplicial, || {
        "two-vertex torus cover not simplicial".into()
    })?;
    let cases = [(identity_cover(&tet), "tetrahedron"), (two_cov, "two-vertex torus")];
    let mut checked = 0;
    let mut worst = 0.0f64;
    for (cov, name) in &cases {
        let base = cov.base();
        let deg = cov.degree() as f64;
        let n = base.vertex_count();
        for mask in 1..(1u32 << n) - 1 {
            let subset: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let pre: Vec<usize> = (0..cov.total().vertex_count())
                .filter(|&v| subset.contains(&cov.proj_vertex(v)))
                .collect();
            let zero = AngleData::zeros(base.edge_count());
            let cover_rhs = evaluate_cover_subset(cov, &zero, &vec![0.0; n], &pre)
                .map_err(|e| e.to_string())?
                .rhs;
            let base_rhs = kat_rhs_delta(base, &zero, &subset).map_err(|e| e.to_string())?;
            let (cu, bu) = ((cover_rhs / PI).round(), (base_rhs / PI).round());
            ensure(
                (cover_rhs / PI - cu).abs() < 1e-12 && (base_rhs / PI - bu).abs() < 1e-12 && cu == deg * bu,
                || format!("{name} {subset:?}: combinatorial rhs {cover_rhs} vs {deg} × {base_rhs}"),
            )?;
            for _ in 0..5 {
                let phi = random_phi(base, &mut rng);
                let c = evaluate_cover_subset(cov, &phi, &vec![0.0; n], &pre)
                    .map_err(|e| e.to_string())?
                    .rhs;
                let b = kat_rhs_delta(base, &phi, &subset).map_err(|e| e.to_string())?;
                let d = (c - deg * b).abs() / deg;
                worst = worst.max(d);
                ensure(d <= 1e-12, || format!("{name} {subset:?}: {c} vs {deg} × {b}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} proper subsets (degrees 1 and 9), integer parts exact, angle sums within {worst:.1e}"
    ))
}

fn c12_limit_formula() -> Outcome {
    let c = fixtures::tetrahedron();
    let mut rng = rng(12);
    let mut phis = vec![AngleData::zeros(c.edge_count())];
    phis.extend((0..4).map(|_| random_phi(&c, &mut rng)));
    let mut worst = 0.0f64;
    let mut count = 0;
    for phi in &phis {
        for mask in 1..15u32 {
            let subset: Vec<usize> = (0..4).filter(|&v| mask >> v & 1 == 1).collect();
            let limit = curvature_limit_base(&c, phi, &subset).map_err(|e| e.to_string())?;
            let radii = (0..4).map(|v| if subset.contains(&v) { 1e-6 } else { 1.0 }).collect();
            let k = curvature_map(&c, phi, &PackingMetric::new(radii, Background::Euclidean).unwrap()).unwrap();
            let sum: f64 = subset.iter().map(|&v| k.values()[v]).sum();
            worst = worst.max((sum - limit).abs());
            count += 1;
        }
    }
    ensure(worst <= 1e-2, || format!("max difference {worst:e}"))?;
    Ok(format!("{count} (subset, angle) cases, max |ΣK − limit| = {worst:.1e}"))
}

fn c13_insufficiency() -> Outcome {
    let torus = data("torus.tri");
    let (code, v) = cli(&["kat", torus.to_str().unwrap(), "--K", "0"]);
    ensure(code == 0, || format!("kat exit {code}"))?;
    let contrast = &v["contrast"];
    ensure(contrast["base_subsets_checked"] == 0, || {
        format!("base checked {}", contrast["base_subsets_checked"])
    })?;
    ensure(contrast["cover_subsets_checked"] == 510, || {
        format!("cover checked {}", contrast["cover_subsets_checked"])
    })?;
    ensure(contrast["base_vacuous"] == true, || {
        "report does not flag the empty base set".into()
    })?;

    // large angles make the lifted subset inequalities bind above Gauss-Bonnet
    let c = fixtures::one_vertex_torus();
    let cov = unwrap(&c, 7).map_err(|e| e.to_string())?;
    let phi = AngleData::uniform(c.edge_count(), 2.5).unwrap();
    let k = [1.0];
    let opts = KatOptions::default();
    let base = check_base_necessary(&c, &phi, &k, Background::Hyperbolic, &opts).map_err(|e| e.to_string())?;
    let on_cover = check_cover(&cov, &phi, &k, Background::Hyperbolic, &opts).map_err(|e| e.to_string())?;
    ensure(base.feasible && !on_cover.feasible, || {
        format!("Φ≡2.5, K=1: base {} cover {}", base.feasible, on_cover.feasible)
    })?;
    Ok(format!(
        "base 0 subsets vs cover 510; hyperbolic Φ≡2.5, K=1 passes the base check and fails {} cover constraints",
        on_cover.violation_count
    ))
}
