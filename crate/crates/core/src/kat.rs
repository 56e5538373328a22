//! Subset inequalities characterising attainable curvature vectors.
//!
//! For a non-empty proper vertex subset `I` the constraint reads
//! `Σ_{v∈I} K_v > −Σ_{(e,t)∈Lk(I)} (π − Φ(e)) + 2π χ(Σ(I))`. On a simplicial
//! cover the family over all subsets, together with the Gauss–Bonnet clause,
//! decides whether `K` is realised by some packing; on the base Delta
//! complex the same inequalities are only necessary.
//!
//! Subsets are enumerated in Gray-code order. Each step toggles one vertex
//! and updates integer incidence counts, so floating-point sums are formed
//! from exact counts and do not depend on the path taken.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{ComplexError, DeltaComplex, LinkMode};
use crate::covering::{pullback_edge_data, pullback_vertex_data, Covering};
use crate::geometry::{AngleData, Background};

pub const DEFAULT_SUBSET_CAP: usize = 24;
pub const BOUNDARY_TOL: f64 = 1e-9;
pub const GAUSS_BONNET_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_LISTED: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KatError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("the cover is not simplicial; subset constraints need a simplicial total complex")]
    NotSimplicial,
    #[error("subset enumeration needs {required} vertices but the cap is {cap}")]
    CapExceeded { required: usize, cap: usize },
    #[error("{what}: expected {expected} values, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("constant-curvature bounds need a one-vertex base, this one has {0} vertices")]
    MultiVertexBase(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintStatus {
    Satisfied,
    Boundary,
    Violated,
}

impl ConstraintStatus {
    pub fn classify(slack: f64) -> Self {
        if slack > BOUNDARY_TOL {
            Self::Satisfied
        } else if slack >= -BOUNDARY_TOL {
            Self::Boundary
        } else {
            Self::Violated
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KatConstraint {
    pub subset: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub status: ConstraintStatus,
    /// Position by increasing slack within the list it was reported in.
    pub binding_rank: usize,
}

impl KatConstraint {
    fn new(subset: Vec<usize>, lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            subset,
            lhs,
            rhs,
            slack,
            status: ConstraintStatus::classify(slack),
            binding_rank: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussBonnetMode {
    Equality,
    Strict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussBonnetCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub mode: GaussBonnetMode,
    pub ok: bool,
}

pub fn gauss_bonnet(k: &[f64], chi: i64, bg: Background) -> GaussBonnetCheck {
    let lhs: f64 = k.iter().sum();
    let rhs = 2.0 * PI * chi as f64;
    let (mode, ok) = match bg {
        Background::Euclidean => (GaussBonnetMode::Equality, (lhs - rhs).abs() <= GAUSS_BONNET_TOL),
        Background::Hyperbolic => (GaussBonnetMode::Strict, lhs - rhs > GAUSS_BONNET_TOL),
    };
    GaussBonnetCheck { lhs, rhs, mode, ok }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckScope {
    /// All subsets of a simplicial cover: necessary and sufficient.
    Cover,
    /// Subsets of the base Delta complex: necessary only.
    NecessaryOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConePositivity {
    pub ok: bool,
    /// Base vertices with `K_v ≥ 2π`.
    pub violating_vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityVerdict {
    pub scope: CheckScope,
    pub feasible: bool,
    pub gauss_bonnet_ok: bool,
    pub gauss_bonnet: GaussBonnetCheck,
    pub worst: Option<KatConstraint>,
    /// Constraints without a clean pass (violated or boundary), most binding
    /// retained, listed by subset rank.
    pub violations: Vec<KatConstraint>,
    pub violation_count: u64,
    pub boundary_count: u64,
    pub subsets_checked: u64,
    /// Checked subsets that are unions of whole fibers.
    pub preimage_subsets: u64,
    pub cone_positivity: Option<ConePositivity>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KatOptions {
    pub cap: usize,
    pub max_listed: usize,
    pub cone_positivity: bool,
}

impl Default for KatOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_SUBSET_CAP,
            max_listed: DEFAULT_MAX_LISTED,
            cone_positivity: false,
        }
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), KatError> {
    if expected != got {
        return Err(KatError::LengthMismatch { what, expected, got });
    }
    Ok(())
}

fn link_weights(phi: &AngleData) -> Vec<f64> {
    phi.values().iter().map(|p| PI - p).collect()
}

/// Right-hand side on a simplicial complex, using simplicial-mode links.
pub fn kat_rhs(c: &DeltaComplex, phi: &AngleData, subset: &[usize]) -> Result<f64, KatError> {
    check_len("angles", c.edge_count(), phi.len())?;
    let link = c.link_pairs(subset, LinkMode::Simplicial)?;
    let chi = c.subcomplex_summary(subset)?.euler_char;
    let s: f64 = link.iter().map(|lp| PI - phi.get(lp.edge)).sum();
    Ok(-s + 2.0 * PI * chi as f64)
}

/// Right-hand side on a Delta complex with slot-multiplicity links.
pub fn kat_rhs_delta(c: &DeltaComplex, phi: &AngleData, subset: &[usize]) -> Result<f64, KatError> {
    check_len("angles", c.edge_count(), phi.len())?;
    let link = c.link_pairs(subset, LinkMode::Delta)?;
    let chi = c.subcomplex_summary(subset)?.euler_char;
    let s: f64 = link.iter().map(|lp| PI - phi.get(lp.edge)).sum();
    Ok(-s + 2.0 * PI * chi as f64)
}

/// Limit of `Σ_{v∈I} K_v` as the radii on `I` shrink to zero:
/// `2π|I| − (|A₂| + |A₃|) π − Σ_{Lk(I)} (π − Φ)`, where `A_m` are the
/// triangles with exactly `m` indexed vertices in `I`.
pub fn curvature_limit_base(c: &DeltaComplex, phi: &AngleData, subset: &[usize]) -> Result<f64, KatError> {
    check_len("angles", c.edge_count(), phi.len())?;
    c.check_proper_subset(subset)?;
    let mask = c.membership(subset)?;
    let inside = mask.iter().filter(|&&m| m).count();
    let a23 = c
        .vertex_triples()
        .iter()
        .filter(|vt| vt.0.iter().filter(|&&v| mask[v]).count() >= 2)
        .count();
    let link: f64 = c
        .link_pairs(subset, LinkMode::Delta)?
        .iter()
        .map(|lp| PI - phi.get(lp.edge))
        .sum();
    Ok(2.0 * PI * inside as f64 - a23 as f64 * PI - link)
}

/// One constraint on the cover, with `K` and `Φ` given on the base.
pub fn evaluate_cover_subset(
    cov: &Covering,
    phi: &AngleData,
    k: &[f64],
    subset: &[usize],
) -> Result<KatConstraint, KatError> {
    check_len("curvatures", cov.base().vertex_count(), k.len())?;
    check_len("angles", cov.base().edge_count(), phi.len())?;
    let phi_hat = AngleData::new(pullback_edge_data(cov, phi.values())).expect("pullback of valid angles");
    let k_hat = pullback_vertex_data(cov, k);
    let rhs = kat_rhs(cov.total(), &phi_hat, subset)?;
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let lhs = sorted.iter().map(|&v| k_hat[v]).sum();
    Ok(KatConstraint::new(sorted, lhs, rhs))
}

/// One base constraint with Delta-mode links.
pub fn evaluate_base_subset(
    c: &DeltaComplex,
    phi: &AngleData,
    k: &[f64],
    subset: &[usize],
) -> Result<KatConstraint, KatError> {
    check_len("curvatures", c.vertex_count(), k.len())?;
    let rhs = kat_rhs_delta(c, phi, subset)?;
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let lhs = sorted.iter().map(|&v| k[v]).sum();
    Ok(KatConstraint::new(sorted, lhs, rhs))
}

/// Incidence tables for incremental subset enumeration. Vertex and edge
/// classes index the base data (projections on a cover, identity on the
/// base itself).
struct Tables {
    n: usize,
    class_count: usize,
    fiber_size: Vec<i64>,
    vertex_class: Vec<usize>,
    triangles_of: Vec<Vec<usize>>,
    slots_of: Vec<Vec<(usize, u8)>>,
    edges_of: Vec<Vec<usize>>,
    edge_ends: Vec<(usize, usize)>,
    face_classes: Vec<[usize; 3]>,
    edge_class_count: usize,
}

impl Tables {
    fn new(
        c: &DeltaComplex,
        vertex_class: Vec<usize>,
        edge_class: &[usize],
        class_count: usize,
        edge_class_count: usize,
    ) -> Self {
        let n = c.vertex_count();
        let mut triangles_of = vec![Vec::new(); n];
        let mut slots_of = vec![Vec::new(); n];
        for (t, vt) in c.vertex_triples().iter().enumerate() {
            for i in 0..3 {
                slots_of[vt[i]].push((t, 1u8 << i));
                if !triangles_of[vt[i]].contains(&t) {
                    triangles_of[vt[i]].push(t);
                }
            }
        }
        let edges_of = (0..n).map(|v| c.incident_edges(v).to_vec()).collect();
        let edge_ends = c.edges().iter().map(|e| (e.d0, e.d1)).collect();
        let face_classes = c.triangles().iter().map(|t| t.faces.map(|e| edge_class[e])).collect();
        let mut fiber_size = vec![0i64; class_count];
        for &cl in &vertex_class {
            fiber_size[cl] += 1;
        }
        Self {
            n,
            class_count,
            fiber_size,
            vertex_class,
            triangles_of,
            slots_of,
            edges_of,
            edge_ends,
            face_classes,
            edge_class_count,
        }
    }
}

/// Counts describing the current subset.
struct SubsetState {
    inside: Vec<bool>,
    pattern: Vec<u8>,
    class_members: Vec<i64>,
    link_counts: Vec<i64>,
    size: i64,
    edges_in: i64,
    faces_in: i64,
}

impl SubsetState {
    fn new(t: &Tables, triangles: usize) -> Self {
        Self {
            inside: vec![false; t.n],
            pattern: vec![0; triangles],
            class_members: vec![0; t.class_count],
            link_counts: vec![0; t.edge_class_count],
            size: 0,
            edges_in: 0,
            faces_in: 0,
        }
    }

    fn triangle_contribution(&mut self, t: &Tables, tri: usize, sign: i64) {
        let pat = self.pattern[tri];
        if pat == 0b111 {
            self.faces_in += sign;
        }
        if pat.count_ones() == 1 {
            let slot = pat.trailing_zeros() as usize;
            self.link_counts[t.face_classes[tri][slot]] += sign;
        }
    }

    fn toggle(&mut self, t: &Tables, v: usize) {
        let sign = if self.inside[v] { -1 } else { 1 };
        for &e in &t.edges_of[v] {
            let (a, b) = t.edge_ends[e];
            if self.inside[a] && self.inside[b] {
                self.edges_in -= 1;
            }
        }
        for &tri in &t.triangles_of[v] {
            self.triangle_contribution(t, tri, -1);
        }
        self.inside[v] = !self.inside[v];
        for &(tri, bit) in &t.slots_of[v] {
            self.pattern[tri] ^= bit;
        }
        for &tri in &t.triangles_of[v] {
            self.triangle_contribution(t, tri, 1);
        }
        for &e in &t.edges_of[v] {
            let (a, b) = t.edge_ends[e];
            if self.inside[a] && self.inside[b] {
                self.edges_in += 1;
            }
        }
        self.class_members[t.vertex_class[v]] += sign;
        self.size += sign;
    }

    fn chi(&self) -> i64 {
        self.size - self.edges_in + self.faces_in
    }

    fn is_preimage(&self, t: &Tables) -> bool {
        self.class_members
            .iter()
            .zip(&t.fiber_size)
            .all(|(&m, &f)| m == 0 || m == f)
    }
}

/// What the enumeration reports for each proper non-empty subset.
struct SubsetView<'a> {
    mask: u64,
    size: i64,
    class_members: &'a [i64],
    rhs: f64,
    preimage: bool,
}

/// Visits every non-empty proper subset in Gray-code order.
fn enumerate(c: &DeltaComplex, tables: &Tables, weights: &[f64], mut visit: impl FnMut(SubsetView<'_>)) -> u64 {
    let n = tables.n;
    if n < 2 {
        return 0;
    }
    let full: u64 = (1u64 << n) - 1;
    let mut state = SubsetState::new(tables, c.triangle_count());
    let mut checked = 0;
    for step in 1..=full {
        let v = step.trailing_zeros() as usize;
        state.toggle(tables, v);
        let mask = step ^ (step >> 1);
        if mask == full {
            continue;
        }
        let link: f64 = state.link_counts.iter().zip(weights).map(|(&k, &w)| k as f64 * w).sum();
        let rhs = -link + 2.0 * PI * state.chi() as f64;
        visit(SubsetView {
            mask,
            size: state.size,
            class_members: &state.class_members,
            rhs,
            preimage: state.is_preimage(tables),
        });
        checked += 1;
    }
    checked
}

fn mask_to_subset(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Retains the `cap` most binding constraints by `(slack, mask)`.
struct Retained {
    cap: usize,
    items: Vec<(f64, u64, f64, f64)>,
}

impl Retained {
    fn new(cap: usize) -> Self {
        Self { cap, items: Vec::new() }
    }

    fn push(&mut self, slack: f64, mask: u64, lhs: f64, rhs: f64) {
        self.items.push((slack, mask, lhs, rhs));
        if self.items.len() >= 2 * self.cap.max(1) {
            self.compact();
        }
    }

    fn compact(&mut self) {
        self.items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        self.items.truncate(self.cap);
    }

    fn finish(mut self) -> Vec<KatConstraint> {
        self.compact();
        let mut out: Vec<(u64, KatConstraint)> = self
            .items
            .iter()
            .enumerate()
            .map(|(rank, &(_, mask, lhs, rhs))| {
                let mut k = KatConstraint::new(mask_to_subset(mask), lhs, rhs);
                k.binding_rank = rank;
                (mask, k)
            })
            .collect();
        out.sort_by_key(|(mask, _)| *mask);
        out.into_iter().map(|(_, k)| k).collect()
    }
}

fn run_check(
    scope: CheckScope,
    c: &DeltaComplex,
    tables: &Tables,
    phi_base: &AngleData,
    k_base: &[f64],
    gb: GaussBonnetCheck,
    opts: &KatOptions,
) -> FeasibilityVerdict {
    let weights = link_weights(phi_base);
    let mut worst: Option<(f64, u64, f64, f64)> = None;
    let mut retained = Retained::new(opts.max_listed);
    let (mut violation_count, mut boundary_count, mut preimage_subsets) = (0u64, 0u64, 0u64);
    let subsets_checked = enumerate(c, tables, &weights, |s| {
        let lhs: f64 = s.class_members.iter().zip(k_base).map(|(&m, &k)| m as f64 * k).sum();
        let slack = lhs - s.rhs;
        if s.preimage {
            preimage_subsets += 1;
        }
        let better = match worst {
            None => true,
            Some((w, m, _, _)) => slack < w || (slack == w && s.mask < m),
        };
        if better {
            worst = Some((slack, s.mask, lhs, s.rhs));
        }
        match ConstraintStatus::classify(slack) {
            ConstraintStatus::Satisfied => {}
            status => {
                violation_count += 1;
                if status == ConstraintStatus::Boundary {
                    boundary_count += 1;
                }
                retained.push(slack, s.mask, lhs, s.rhs);
            }
        }
    });
    let cone_positivity = opts.cone_positivity.then(|| {
        let violating_vertices: Vec<usize> = (0..k_base.len()).filter(|&v| k_base[v] >= 2.0 * PI).collect();
        ConePositivity {
            ok: violating_vertices.is_empty(),
            violating_vertices,
        }
    });
    let cone_ok = cone_positivity.as_ref().is_none_or(|c| c.ok);
    FeasibilityVerdict {
        scope,
        feasible: gb.ok && violation_count == 0 && cone_ok,
        gauss_bonnet_ok: gb.ok,
        gauss_bonnet: gb,
        worst: worst.map(|(_, mask, lhs, rhs)| KatConstraint::new(mask_to_subset(mask), lhs, rhs)),
        violations: retained.finish(),
        violation_count,
        boundary_count,
        subsets_checked,
        preimage_subsets,
        cone_positivity,
    }
}

fn cover_tables(cov: &Covering, opts: &KatOptions) -> Result<Tables, KatError> {
    let total = cov.total();
    let n = total.vertex_count();
    if n > opts.cap.min(63) {
        return Err(KatError::CapExceeded {
            required: n,
            cap: opts.cap,
        });
    }
    if !total.is_simplicial().simplicial {
        return Err(KatError::NotSimplicial);
    }
    let vclass = (0..n).map(|v| cov.proj_vertex(v)).collect();
    let eclass: Vec<usize> = (0..total.edge_count()).map(|e| cov.proj_edge(e)).collect();
    Ok(Tables::new(
        total,
        vclass,
        &eclass,
        cov.base().vertex_count(),
        cov.base().edge_count(),
    ))
}

/// All subset constraints on a simplicial cover plus the base Gauss–Bonnet
/// clause. `phi` and `k` live on the base and are pulled back.
pub fn check_cover(
    cov: &Covering,
    phi: &AngleData,
    k: &[f64],
    bg: Background,
    opts: &KatOptions,
) -> Result<FeasibilityVerdict, KatError> {
    let base = cov.base();
    check_len("curvatures", base.vertex_count(), k.len())?;
    check_len("angles", base.edge_count(), phi.len())?;
    let tables = cover_tables(cov, opts)?;
    let gb = gauss_bonnet(k, base.euler_characteristic(), bg);
    Ok(run_check(CheckScope::Cover, cov.total(), &tables, phi, k, gb, opts))
}

/// The same inequalities on the base Delta complex with Delta-mode links.
/// Vacuous (zero subsets) on a one-vertex base.
pub fn check_base_necessary(
    c: &DeltaComplex,
    phi: &AngleData,
    k: &[f64],
    bg: Background,
    opts: &KatOptions,
) -> Result<FeasibilityVerdict, KatError> {
    check_len("curvatures", c.vertex_count(), k.len())?;
    check_len("angles", c.edge_count(), phi.len())?;
    let n = c.vertex_count();
    if n > opts.cap.min(63) {
        return Err(KatError::CapExceeded {
            required: n,
            cap: opts.cap,
        });
    }
    let ident: Vec<usize> = (0..c.edge_count()).collect();
    let tables = Tables::new(c, (0..n).collect(), &ident, n, c.edge_count());
    let gb = gauss_bonnet(k, c.euler_characteristic(), bg);
    Ok(run_check(CheckScope::NecessaryOnly, c, &tables, phi, k, gb, opts))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantCurvatureBounds {
    /// `max rhs(Î) / |Î|` over all proper non-empty cover subsets.
    pub kat_bound: f64,
    /// Subsets attaining `kat_bound` (within 1e-12), capped.
    pub kat_binding: Vec<Vec<usize>>,
    pub kat_binding_count: u64,
    pub gauss_bonnet_bound: f64,
    pub gauss_bonnet_mode: GaussBonnetMode,
    /// `max(kat_bound, gauss_bonnet_bound)`; constant `K` must exceed it.
    pub lower_bound: f64,
    pub binding: BindingClause,
    /// Constraints available on the base itself.
    pub base_constraints: u64,
    pub subsets_checked: u64,
    pub preimage_subsets: u64,
    pub non_preimage_subsets: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BindingClause {
    GaussBonnet,
    Kat,
    Both,
}

/// Lower bound for a constant curvature on a one-vertex base, from every
/// cover constraint `K > rhs(Î)/|Î|` and Gauss–Bonnet `K > 2πχ`.
pub fn constant_curvature_interval(
    cov: &Covering,
    phi: &AngleData,
    bg: Background,
    opts: &KatOptions,
) -> Result<ConstantCurvatureBounds, KatError> {
    let base = cov.base();
    if base.vertex_count() != 1 {
        return Err(KatError::MultiVertexBase(base.vertex_count()));
    }
    check_len("angles", base.edge_count(), phi.len())?;
    let tables = cover_tables(cov, opts)?;
    let weights = link_weights(phi);
    let mut best = f64::NEG_INFINITY;
    let mut binding: Vec<u64> = Vec::new();
    let mut binding_count = 0u64;
    let mut preimage = 0u64;
    let checked = enumerate(cov.total(), &tables, &weights, |s| {
        if s.preimage {
            preimage += 1;
        }
        let bound = s.rhs / s.size as f64;
        if bound > best + 1e-12 {
            best = bound;
            binding.clear();
            binding_count = 0;
        }
        if (bound - best).abs() <= 1e-12 {
            binding_count += 1;
            if binding.len() < opts.max_listed {
                binding.push(s.mask);
            }
        }
    });
    binding.sort_unstable();
    let gb_bound = 2.0 * PI * base.euler_characteristic() as f64;
    let clause = if (best - gb_bound).abs() <= 1e-12 {
        BindingClause::Both
    } else if best > gb_bound {
        BindingClause::Kat
    } else {
        BindingClause::GaussBonnet
    };
    Ok(ConstantCurvatureBounds {
        kat_bound: best,
        kat_binding: binding.into_iter().map(mask_to_subset).collect(),
        kat_binding_count: binding_count,
        gauss_bonnet_bound: gb_bound,
        gauss_bonnet_mode: match bg {
            Background::Euclidean => GaussBonnetMode::Equality,
            Background::Hyperbolic => GaussBonnetMode::Strict,
        },
        lower_bound: best.max(gb_bound),
        binding: clause,
        base_constraints: 0,
        subsets_checked: checked,
        preimage_subsets: preimage,
        non_preimage_subsets: checked - preimage,
    })
}
