//! Finite abelian covers built from voltage assignments.
//!
//! A voltage assignment sends every edge to an element of `(Z/p)^k`. The
//! derived complex has cells `(x, g)` for every base cell `x` and group
//! element `g`, numbered `x * p^k + rank(g)` with group elements ranked
//! lexicographically. The deck group acts by translation in the second
//! coordinate.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{ComplexError, DeltaComplex, Edge, Triangle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoveringError {
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),
    #[error("voltage of edge {edge} has {got} components, expected {expected}")]
    VoltageRank { edge: usize, expected: usize, got: usize },
    #[error("voltage component {value} on edge {edge} is not reduced mod {modulus}")]
    VoltageRange { edge: usize, value: u32, modulus: u32 },
    #[error("voltages cover {got} edges, the complex has {expected}")]
    VoltageCount { expected: usize, got: usize },
    #[error("triangle {triangle}: voltages violate the boundary relation α(d2) + α(d0) = α(d1)")]
    RelatorViolation { triangle: usize },
    #[error("group of order {order} is too large to build a cover")]
    GroupTooLarge { order: u128 },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("no prime up to {p_max} yields a simplicial cover")]
    NoSimplicialCover { p_max: u32, attempts: Vec<PrimeAttempt> },
    #[error("covering invariant violated: {0}")]
    Invariant(String),
}

/// One rejected prime from [`unwrap`], with the loops and parallel pairs
/// that survive in its cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeAttempt {
    pub p: u32,
    pub degree: usize,
    pub loops: Vec<usize>,
    pub parallel: Vec<(usize, usize)>,
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The elementary abelian group `(Z/p)^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub modulus: u32,
    pub rank: usize,
}

impl AbelianGroup {
    pub fn order(&self) -> usize {
        (self.modulus as usize).pow(self.rank as u32)
    }

    /// Lexicographic rank of an element, first component most significant.
    pub fn index_of(&self, g: &[u32]) -> usize {
        g.iter()
            .fold(0usize, |acc, &c| acc * self.modulus as usize + c as usize)
    }

    pub fn element(&self, mut index: usize) -> Vec<u32> {
        let p = self.modulus as usize;
        let mut g = vec![0u32; self.rank];
        for slot in g.iter_mut().rev() {
            *slot = (index % p) as u32;
            index /= p;
        }
        g
    }

    /// Sum of two elements given by their ranks.
    pub fn add(&self, a: usize, b: usize) -> usize {
        let p = self.modulus as usize;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.rank {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }
}

/// Edge voltages in `(Z/p)^k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VoltageAssignment {
    group: AbelianGroup,
    alpha: Vec<Vec<u32>>,
}

impl VoltageAssignment {
    /// `p` must be prime unless `k = 0` (trivial group).
    pub fn new(modulus: u32, rank: usize, alpha: Vec<Vec<u32>>) -> Result<Self, CoveringError> {
        if rank > 0 && !is_prime(modulus) {
            return Err(CoveringError::NotPrime(modulus));
        }
        let order = (modulus as u128).checked_pow(rank as u32).unwrap_or(u128::MAX);
        if order > 1 << 24 {
            return Err(CoveringError::GroupTooLarge { order });
        }
        for (edge, g) in alpha.iter().enumerate() {
            if g.len() != rank {
                return Err(CoveringError::VoltageRank {
                    edge,
                    expected: rank,
                    got: g.len(),
                });
            }
            if let Some(&value) = g.iter().find(|&&x| x >= modulus) {
                return Err(CoveringError::VoltageRange { edge, value, modulus });
            }
        }
        Ok(Self {
            group: AbelianGroup { modulus, rank },
            alpha,
        })
    }

    /// All-zero voltages in the trivial group.
    pub fn trivial(edges: usize) -> Self {
        Self {
            group: AbelianGroup { modulus: 1, rank: 0 },
            alpha: vec![Vec::new(); edges],
        }
    }

    pub fn group(&self) -> AbelianGroup {
        self.group
    }

    pub fn voltage(&self, e: usize) -> &[u32] {
        &self.alpha[e]
    }

    pub fn voltages(&self) -> &[Vec<u32>] {
        &self.alpha
    }

    /// Checks `α(d2) + α(d0) = α(d1)` on every triangle.
    pub fn verify(&self, c: &DeltaComplex) -> Result<(), CoveringError> {
        if self.alpha.len() != c.edge_count() {
            return Err(CoveringError::VoltageCount {
                expected: c.edge_count(),
                got: self.alpha.len(),
            });
        }
        let p = self.group.modulus;
        for (id, t) in c.triangles().iter().enumerate() {
            let [e0, e1, e2] = t.faces.map(|e| &self.alpha[e]);
            let holds = (0..self.group.rank).all(|i| (e2[i] + e0[i]) % p == e1[i]);
            if !holds {
                return Err(CoveringError::RelatorViolation { triangle: id });
            }
        }
        Ok(())
    }
}

/// Breadth-first spanning tree from vertex 0, taking incident edges in id
/// order. Loops never enter the tree.
pub fn spanning_tree(c: &DeltaComplex) -> Vec<bool> {
    let mut in_tree = vec![false; c.edge_count()];
    let mut seen = vec![false; c.vertex_count()];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &e in c.incident_edges(v) {
            let edge = c.edge(e);
            if edge.is_loop() {
                continue;
            }
            let w = if edge.d0 == v { edge.d1 } else { edge.d0 };
            if !seen[w] {
                seen[w] = true;
                in_tree[e] = true;
                queue.push_back(w);
            }
        }
    }
    in_tree
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2)
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Voltages of the mod-`p` homology cover: `α: E → H1(Σ; Z/p) ≅ (Z/p)^{2g}`.
pub fn homology_voltages(c: &DeltaComplex, p: u32) -> Result<VoltageAssignment, CoveringError> {
    if !is_prime(p) {
        return Err(CoveringError::NotPrime(p));
    }
    let genus = c.genus()?;
    let tree = spanning_tree(c);
    let free_edges: Vec<usize> = (0..c.edge_count()).filter(|&e| !tree[e]).collect();
    let column: Vec<Option<usize>> = {
        let mut col = vec![None; c.edge_count()];
        for (j, &e) in free_edges.iter().enumerate() {
            col[e] = Some(j);
        }
        col
    };
    let pm = p as u64;
    let n = free_edges.len();
    let mut rows: Vec<Vec<u64>> = c
        .triangles()
        .iter()
        .map(|t| {
            let mut row = vec![0u64; n];
            for (slot, coef) in [(2, 1), (0, 1), (1, pm - 1)] {
                if let Some(j) = column[t.faces[slot]] {
                    row[j] = (row[j] + coef) % pm;
                }
            }
            row
        })
        .collect();

    // reduced row echelon form over Z/p
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = inv_mod(rows[r][col], pm);
        for x in rows[r].iter_mut() {
            *x = *x * inv % pm;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + (pm - f) * y) % pm;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let rank = free_cols.len();
    if rank as i64 != 2 * genus {
        return Err(CoveringError::Invariant(format!(
            "homology rank {rank} differs from 2g = {}",
            2 * genus
        )));
    }
    let mut alpha = vec![vec![0u32; rank]; c.edge_count()];
    for (q, &col) in free_cols.iter().enumerate() {
        alpha[free_edges[col]][q] = 1;
    }
    for &(row, col) in &pivots {
        let e = free_edges[col];
        for (q, &fc) in free_cols.iter().enumerate() {
            alpha[e][q] = ((pm - rows[row][fc]) % pm) as u32;
        }
    }
    let va = VoltageAssignment::new(p, rank, alpha)?;
    va.verify(c)?;
    Ok(va)
}

/// A regular abelian cover together with its projections.
#[derive(Clone, Debug)]
pub struct Covering {
    base: DeltaComplex,
    voltages: VoltageAssignment,
    total: DeltaComplex,
    degree: usize,
}

impl Covering {
    pub fn base(&self) -> &DeltaComplex {
        &self.base
    }

    pub fn total(&self) -> &DeltaComplex {
        &self.total
    }

    pub fn voltages(&self) -> &VoltageAssignment {
        &self.voltages
    }

    pub fn group(&self) -> AbelianGroup {
        self.voltages.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn proj_vertex(&self, v: usize) -> usize {
        v / self.degree
    }

    pub fn proj_edge(&self, e: usize) -> usize {
        e / self.degree
    }

    pub fn proj_triangle(&self, t: usize) -> usize {
        t / self.degree
    }

    /// Group element (as a rank) labelling a total cell.
    pub fn sheet(&self, cell: usize) -> usize {
        cell % self.degree
    }

    /// Total-cell id of `(base cell, sheet)`.
    pub fn lift(&self, base_cell: usize, sheet: usize) -> usize {
        base_cell * self.degree + sheet
    }

    /// Image of a total cell under the deck transformation `g`.
    pub fn deck(&self, g: usize, cell: usize) -> usize {
        self.lift(cell / self.degree, self.voltages.group.add(cell % self.degree, g))
    }

    pub fn fiber(&self, base_vertex: usize) -> std::ops::Range<usize> {
        base_vertex * self.degree..(base_vertex + 1) * self.degree
    }

    /// Genus of the total surface, `deg (g − 1) + 1`.
    pub fn total_genus(&self) -> Result<i64, ComplexError> {
        let g = self.base.genus()?;
        Ok(self.degree as i64 * (g - 1) + 1)
    }

    /// Exhaustive check of the covering invariants: projections and deck
    /// transformations commute with every face map, fibers are single free
    /// orbits, and `χ(total) = deg χ(base)`.
    pub fn verify(&self) -> Result<(), CoveringError> {
        let fail = |m: String| Err(CoveringError::Invariant(m));
        let (b, t) = (&self.base, &self.total);
        for (id, e) in t.edges().iter().enumerate() {
            let be = b.edge(self.proj_edge(id));
            if self.proj_vertex(e.d0) != be.d0 || self.proj_vertex(e.d1) != be.d1 {
                return fail(format!("projection of edge {id} does not commute with face maps"));
            }
        }
        for (id, tri) in t.triangles().iter().enumerate() {
            let bt = b.triangle(self.proj_triangle(id));
            for i in 0..3 {
                if self.proj_edge(tri.faces[i]) != bt.faces[i] {
                    return fail(format!("projection of triangle {id} does not commute with d{i}"));
                }
            }
        }
        let order = self.degree;
        for g in 0..order {
            for (id, e) in t.edges().iter().enumerate() {
                let moved = t.edge(self.deck(g, id));
                if moved.d0 != self.deck(g, e.d0) || moved.d1 != self.deck(g, e.d1) {
                    return fail(format!("deck element {g} does not commute with faces of edge {id}"));
                }
            }
            for (id, tri) in t.triangles().iter().enumerate() {
                let moved = t.triangle(self.deck(g, id));
                if (0..3).any(|i| moved.faces[i] != self.deck(g, tri.faces[i])) {
                    return fail(format!("deck element {g} does not commute with faces of triangle {id}"));
                }
            }
        }
        for v in 0..b.vertex_count() {
            let start = self.lift(v, 0);
            let mut orbit: Vec<usize> = (0..order).map(|g| self.deck(g, start)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            if orbit != self.fiber(v).collect::<Vec<_>>() {
                return fail(format!("deck action is not simply transitive on the fiber of {v}"));
            }
        }
        if t.euler_characteristic() != order as i64 * b.euler_characteristic() {
            return fail("Euler characteristic is not multiplicative".into());
        }
        if 2 * t.edge_count() != 3 * t.triangle_count() {
            return fail("2|E| != 3|F| on the cover".into());
        }
        Ok(())
    }
}

/// Derived complex of a voltage assignment: `d1(e, h) = (d1 e, h)`,
/// `d0(e, h) = (d0 e, h + α(e))`, and triangle `(t, g)` has faces
/// `(d0 t, g + α(d2 t))`, `(d1 t, g)`, `(d2 t, g)`.
pub fn derived_cover(c: &DeltaComplex, va: &VoltageAssignment) -> Result<Covering, CoveringError> {
    va.verify(c)?;
    let group = va.group;
    let deg = group.order();
    let alpha: Vec<usize> = va.alpha.iter().map(|g| group.index_of(g)).collect();
    let mut edges = Vec::with_capacity(c.edge_count() * deg);
    for (id, e) in c.edges().iter().enumerate() {
        for h in 0..deg {
            edges.push(Edge::new(e.d0 * deg + group.add(h, alpha[id]), e.d1 * deg + h));
        }
    }
    let mut triangles = Vec::with_capacity(c.triangle_count() * deg);
    for t in c.triangles() {
        let [e0, e1, e2] = t.faces;
        for g in 0..deg {
            triangles.push(Triangle::new(
                e0 * deg + group.add(g, alpha[e2]),
                e1 * deg + g,
                e2 * deg + g,
            ));
        }
    }
    let total = DeltaComplex::new_relaxed(c.vertex_count() * deg, edges, triangles)?;
    Ok(Covering {
        base: c.clone(),
        voltages: va.clone(),
        total,
        degree: deg,
    })
}

/// The identity cover of `c`.
pub fn identity_cover(c: &DeltaComplex) -> Covering {
    Covering {
        base: c.clone(),
        voltages: VoltageAssignment::trivial(c.edge_count()),
        total: c.clone(),
        degree: 1,
    }
}

pub const DEFAULT_P_MAX: u32 = 31;

/// First mod-`p` homology cover (over primes up to `p_max`) whose total
/// complex is simplicial; the identity cover when `c` already is.
pub fn unwrap(c: &DeltaComplex, p_max: u32) -> Result<Covering, CoveringError> {
    unwrap_with_attempts(c, p_max).map(|(cov, _)| cov)
}

/// Like [`unwrap`], also returning the rejected primes and their witnesses.
pub fn unwrap_with_attempts(c: &DeltaComplex, p_max: u32) -> Result<(Covering, Vec<PrimeAttempt>), CoveringError> {
    if c.is_simplicial().simplicial {
        c.orientation()?;
        return Ok((identity_cover(c), Vec::new()));
    }
    let mut attempts = Vec::new();
    for p in (2..=p_max).filter(|&p| is_prime(p)) {
        let va = homology_voltages(c, p)?;
        if va.group().order() > 1 << 20 {
            break;
        }
        let cov = derived_cover(c, &va)?;
        let check = cov.total.is_simplicial();
        if check.simplicial {
            return Ok((cov, attempts));
        }
        attempts.push(PrimeAttempt {
            p,
            degree: cov.degree,
            loops: check.loops,
            parallel: check.parallel,
        });
    }
    Err(CoveringError::NoSimplicialCover { p_max, attempts })
}

/// `f̂(x̂) = f(p(x̂))` on vertices.
pub fn pullback_vertex_data(cov: &Covering, f: &[f64]) -> Vec<f64> {
    assert_eq!(f.len(), cov.base.vertex_count(), "vertex data length");
    (0..cov.total.vertex_count()).map(|v| f[cov.proj_vertex(v)]).collect()
}

/// `f̂(ê) = f(p(ê))` on edges.
pub fn pullback_edge_data(cov: &Covering, f: &[f64]) -> Vec<f64> {
    assert_eq!(f.len(), cov.base.edge_count(), "edge data length");
    (0..cov.total.edge_count()).map(|e| f[cov.proj_edge(e)]).collect()
}

/// Mean over each vertex fiber.
pub fn pushforward_average(cov: &Covering, f: &[f64]) -> Vec<f64> {
    assert_eq!(f.len(), cov.total.vertex_count(), "cover vertex data length");
    (0..cov.base.vertex_count())
        .map(|v| {
            let fib = &f[cov.fiber(v)];
            // offset from the first entry keeps constant fibers exact
            fib[0] + fib.iter().map(|x| x - fib[0]).sum::<f64>() / cov.degree as f64
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeckInvariance {
    pub invariant: bool,
    /// Largest `max − min` over the deck orbits.
    pub max_deviation: f64,
}

pub fn is_deck_invariant(cov: &Covering, f: &[f64], tol: f64) -> DeckInvariance {
    assert_eq!(f.len(), cov.total.vertex_count(), "cover vertex data length");
    let max_deviation = (0..cov.base.vertex_count())
        .map(|v| {
            let fib = &f[cov.fiber(v)];
            let hi = fib.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = fib.iter().cloned().fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .fold(0.0, f64::max);
    DeckInvariance {
        invariant: max_deviation <= tol,
        max_deviation,
    }
}

/// Map from total cells to `(base cell, group element)`, serialized next to
/// an exported cover.
#[derive(Clone, Debug, Serialize)]
pub struct CoverSidecar {
    pub modulus: u32,
    pub rank: usize,
    pub degree: usize,
    pub vertices: Vec<CellLift>,
    pub edges: Vec<CellLift>,
    pub triangles: Vec<CellLift>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellLift {
    pub id: usize,
    pub base: usize,
    pub group: Vec<u32>,
}

impl Covering {
    pub fn sidecar(&self) -> CoverSidecar {
        let lifts = |n: usize| {
            (0..n)
                .map(|id| CellLift {
                    id,
                    base: id / self.degree,
                    group: self.voltages.group.element(id % self.degree),
                })
                .collect()
        };
        CoverSidecar {
            modulus: self.voltages.group.modulus,
            rank: self.voltages.group.rank,
            degree: self.degree,
            vertices: lifts(self.total.vertex_count()),
            edges: lifts(self.total.edge_count()),
            triangles: lifts(self.total.triangle_count()),
        }
    }
}
