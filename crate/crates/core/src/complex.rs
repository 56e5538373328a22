//! Delta-complex model of a triangulated closed surface.
//!
//! Cells are dense integer ids. An edge carries two face maps (`d0` is the
//! terminal vertex, `d1` the initial one) and a triangle carries three face
//! maps into the edge set, `d_i` being the edge opposite its `i`-th vertex.
//! Loops and parallel edges are ordinary cells here; nothing is ever merged.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::DMatrix;
use num::{BigInt, BigRational, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("complex has no vertices")]
    Empty,
    #[error("edge {edge} references missing vertex {vertex}")]
    MissingVertex { edge: usize, vertex: usize },
    #[error("triangle {triangle} references missing edge {edge}")]
    MissingEdge { triangle: usize, edge: usize },
    #[error("triangle {triangle} violates the simplicial identity {identity}")]
    SimplicialIdentity { triangle: usize, identity: &'static str },
    #[error("edge {edge} is a face of {count} triangle slots, expected exactly 2")]
    EdgeIncidence { edge: usize, count: usize },
    #[error("vertex {vertex} has degree {degree}, expected at least 3")]
    LowDegree { vertex: usize, degree: usize },
    #[error("complex is disconnected: vertex {vertex} is not reachable from vertex 0")]
    Disconnected { vertex: usize },
    #[error("complex is not orientable; obstructing edge cycle {cycle:?}")]
    NonOrientable { cycle: Vec<usize> },
    #[error("Euler characteristic {chi} does not belong to a closed orientable surface")]
    NotOrientableSurface { chi: i64 },
    #[error("vertex subset must be non-empty")]
    EmptySubset,
    #[error("vertex subset must be a proper subset of the vertex set")]
    FullSubset,
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("simplicial link mode requires a simplicial complex")]
    NotSimplicial,
}

/// An edge with its terminal (`d0`) and initial (`d1`) vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub d0: usize,
    pub d1: usize,
}

impl Edge {
    pub fn new(d0: usize, d1: usize) -> Self {
        Self { d0, d1 }
    }

    pub fn is_loop(&self) -> bool {
        self.d0 == self.d1
    }

    /// Endpoints as an unordered pair, smaller id first.
    pub fn unordered(&self) -> (usize, usize) {
        (self.d0.min(self.d1), self.d0.max(self.d1))
    }
}

/// A triangle given by its three face maps: `faces[i]` is `d_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triangle {
    pub faces: [usize; 3],
}

impl Triangle {
    pub fn new(d0: usize, d1: usize, d2: usize) -> Self {
        Self { faces: [d0, d1, d2] }
    }
}

/// Ordered vertices of a triangle: `v0 = d1∘d2`, `v1 = d0∘d2`, `v2 = d0∘d1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct VertexTriple(pub [usize; 3]);

impl VertexTriple {
    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }
}

impl std::ops::Index<usize> for VertexTriple {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// A validated Delta complex. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaComplex {
    vertex_count: usize,
    edges: Vec<Edge>,
    triangles: Vec<Triangle>,
    vertex_triples: Vec<VertexTriple>,
    edge_slots: Vec<[(usize, usize); 2]>,
    vertex_edges: Vec<Vec<usize>>,
}

impl DeltaComplex {
    /// Builds a complex and checks every structural invariant, including the
    /// minimum vertex degree of three.
    pub fn new(vertex_count: usize, edges: Vec<Edge>, triangles: Vec<Triangle>) -> Result<Self, ComplexError> {
        let c = Self::new_relaxed(vertex_count, edges, triangles)?;
        for v in 0..c.vertex_count {
            let degree = c.degree(v);
            if degree < 3 {
                return Err(ComplexError::LowDegree { vertex: v, degree });
            }
        }
        Ok(c)
    }

    /// Like [`DeltaComplex::new`] but skips the vertex degree check. Used for
    /// degenerate closed surfaces such as the doubled triangle.
    pub fn new_relaxed(vertex_count: usize, edges: Vec<Edge>, triangles: Vec<Triangle>) -> Result<Self, ComplexError> {
        if vertex_count == 0 {
            return Err(ComplexError::Empty);
        }
        for (id, e) in edges.iter().enumerate() {
            for v in [e.d0, e.d1] {
                if v >= vertex_count {
                    return Err(ComplexError::MissingVertex { edge: id, vertex: v });
                }
            }
        }
        let mut slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); edges.len()];
        let mut vertex_triples = Vec::with_capacity(triangles.len());
        for (id, t) in triangles.iter().enumerate() {
            for (slot, &e) in t.faces.iter().enumerate() {
                if e >= edges.len() {
                    return Err(ComplexError::MissingEdge { triangle: id, edge: e });
                }
                slots[e].push((id, slot));
            }
            let [f0, f1, f2] = t.faces.map(|e| edges[e]);
            // d_i ∘ d_j = d_{j-1} ∘ d_i for i < j
            if f0.d1 != f2.d0 {
                return Err(ComplexError::SimplicialIdentity {
                    triangle: id,
                    identity: "d1(d0) = d0(d2)",
                });
            }
            if f0.d0 != f1.d0 {
                return Err(ComplexError::SimplicialIdentity {
                    triangle: id,
                    identity: "d0(d0) = d0(d1)",
                });
            }
            if f1.d1 != f2.d1 {
                return Err(ComplexError::SimplicialIdentity {
                    triangle: id,
                    identity: "d1(d1) = d1(d2)",
                });
            }
            vertex_triples.push(VertexTriple([f2.d1, f2.d0, f1.d0]));
        }
        let mut edge_slots = Vec::with_capacity(edges.len());
        for (e, s) in slots.iter().enumerate() {
            if s.len() != 2 {
                return Err(ComplexError::EdgeIncidence {
                    edge: e,
                    count: s.len(),
                });
            }
            edge_slots.push([s[0], s[1]]);
        }
        let mut vertex_edges = vec![Vec::new(); vertex_count];
        for (id, e) in edges.iter().enumerate() {
            vertex_edges[e.d1].push(id);
            if !e.is_loop() {
                vertex_edges[e.d0].push(id);
            }
        }
        for list in &mut vertex_edges {
            list.sort_unstable();
        }
        Ok(Self {
            vertex_count,
            edges,
            triangles,
            vertex_triples,
            edge_slots,
            vertex_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    pub fn triangle(&self, t: usize) -> Triangle {
        self.triangles[t]
    }

    pub fn vertices_of(&self, t: usize) -> VertexTriple {
        self.vertex_triples[t]
    }

    pub fn vertex_triples(&self) -> &[VertexTriple] {
        &self.vertex_triples
    }

    /// The two `(triangle, slot)` incidences of an edge.
    pub fn edge_slots(&self, e: usize) -> [(usize, usize); 2] {
        self.edge_slots[e]
    }

    /// Distinct edges incident to `v`, sorted by id.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    /// Number of edge ends at `v`; loops count twice.
    pub fn degree(&self, v: usize) -> usize {
        self.vertex_edges[v]
            .iter()
            .map(|&e| if self.edges[e].is_loop() { 2 } else { 1 })
            .sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Genus of a connected closed orientable surface.
    pub fn genus(&self) -> Result<i64, ComplexError> {
        self.orientation()?;
        let chi = self.euler_characteristic();
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(ComplexError::NotOrientableSurface { chi });
        }
        Ok((2 - chi) / 2)
    }

    pub fn check_connected(&self) -> Result<(), ComplexError> {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &self.vertex_edges[v] {
                let edge = self.edges[e];
                for w in [edge.d0, edge.d1] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(vertex) => Err(ComplexError::Disconnected { vertex }),
            None => Ok(()),
        }
    }

    pub fn is_simplicial(&self) -> SimplicialCheck {
        let loops: Vec<usize> = (0..self.edges.len()).filter(|&e| self.edges[e].is_loop()).collect();
        let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (id, e) in self.edges.iter().enumerate() {
            if !e.is_loop() {
                by_pair.entry(e.unordered()).or_default().push(id);
            }
        }
        let mut parallel = Vec::new();
        for ids in by_pair.values() {
            for (a, &x) in ids.iter().enumerate() {
                for &y in &ids[a + 1..] {
                    parallel.push((x, y));
                }
            }
        }
        SimplicialCheck {
            simplicial: loops.is_empty() && parallel.is_empty(),
            loops,
            parallel,
        }
    }

    /// Boundary matrices `(D1, D2)` with `∂1(e) = d1(e) − d0(e)` and
    /// `∂2(t) = d0(t) − d1(t) + d2(t)`.
    pub fn boundary_matrices(&self) -> (DMatrix<i64>, DMatrix<i64>) {
        let mut d1 = DMatrix::<i64>::zeros(self.vertex_count, self.edges.len());
        for (j, e) in self.edges.iter().enumerate() {
            d1[(e.d1, j)] += 1;
            d1[(e.d0, j)] -= 1;
        }
        let mut d2 = DMatrix::<i64>::zeros(self.edges.len(), self.triangles.len());
        for (j, t) in self.triangles.iter().enumerate() {
            d2[(t.faces[0], j)] += 1;
            d2[(t.faces[1], j)] -= 1;
            d2[(t.faces[2], j)] += 1;
        }
        (d1, d2)
    }

    /// Sign assignment `ε` with `ε(t)(−1)^i + ε(t')(−1)^j = 0` across every
    /// edge, normalized so that `ε(0) = +1`.
    pub fn orientation(&self) -> Result<Orientation, ComplexError> {
        self.check_connected()?;
        let n = self.triangles.len();
        let mut eps = vec![0i8; n];
        // tree edge used to reach each triangle, for reporting cycles
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        if n == 0 {
            return Ok(Orientation { eps });
        }
        eps[0] = 1;
        let mut queue = VecDeque::from([0usize]);
        while let Some(t) = queue.pop_front() {
            for slot in 0..3 {
                let e = self.triangles[t].faces[slot];
                let [a, b] = self.edge_slots[e];
                let (other, other_slot) = if a == (t, slot) { b } else { a };
                let required = -eps[t] * sign(slot) * sign(other_slot);
                if eps[other] == 0 {
                    eps[other] = required;
                    parent[other] = Some((t, e));
                    queue.push_back(other);
                } else if eps[other] != required {
                    return Err(ComplexError::NonOrientable {
                        cycle: self.obstruction_cycle(&parent, t, other, e),
                    });
                }
            }
        }
        // with every edge in two slots and a connected 1-skeleton, the dual
        // graph is connected as well, so every triangle has been reached
        debug_assert!(eps.iter().all(|&s| s != 0));
        Ok(Orientation { eps })
    }

    /// Dual-graph cycle (as edge ids) closed by `closing` between triangles
    /// `a` and `b`, running through their lowest common BFS ancestor.
    fn obstruction_cycle(&self, parent: &[Option<(usize, usize)>], a: usize, b: usize, closing: usize) -> Vec<usize> {
        let chain = |mut t: usize| {
            let mut tris = vec![t];
            let mut edges = Vec::new();
            while let Some((p, e)) = parent[t] {
                tris.push(p);
                edges.push(e);
                t = p;
            }
            (tris, edges)
        };
        let (ta, ea) = chain(a);
        let (tb, eb) = chain(b);
        let ia = ta.iter().position(|t| tb.contains(t)).unwrap_or(ta.len() - 1);
        let ib = tb.iter().position(|&t| t == ta[ia]).unwrap_or(tb.len() - 1);
        let mut cycle: Vec<usize> = ea[..ia].iter().rev().copied().collect();
        cycle.push(closing);
        cycle.extend_from_slice(&eb[..ib]);
        cycle
    }

    /// Validates a vertex subset and returns its membership mask.
    pub fn membership(&self, subset: &[usize]) -> Result<Vec<bool>, ComplexError> {
        if subset.is_empty() {
            return Err(ComplexError::EmptySubset);
        }
        let mut mask = vec![false; self.vertex_count];
        for &v in subset {
            if v >= self.vertex_count {
                return Err(ComplexError::VertexOutOfRange(v));
            }
            mask[v] = true;
        }
        Ok(mask)
    }

    fn proper_membership(&self, subset: &[usize]) -> Result<Vec<bool>, ComplexError> {
        let mask = self.membership(subset)?;
        if mask.iter().all(|&m| m) {
            return Err(ComplexError::FullSubset);
        }
        Ok(mask)
    }

    /// Counts of the cells all of whose vertices lie in `subset`.
    pub fn subcomplex_summary(&self, subset: &[usize]) -> Result<SubcomplexSummary, ComplexError> {
        let mask = self.membership(subset)?;
        let vertex_count = mask.iter().filter(|&&m| m).count();
        let edge_count = self.edges.iter().filter(|e| mask[e.d0] && mask[e.d1]).count();
        let face_count = self
            .vertex_triples
            .iter()
            .filter(|t| t.0.iter().all(|&v| mask[v]))
            .count();
        let mut sorted: Vec<usize> = (0..self.vertex_count).filter(|&v| mask[v]).collect();
        sorted.dedup();
        Ok(SubcomplexSummary {
            subset: sorted,
            vertex_count,
            edge_count,
            face_count,
            euler_char: vertex_count as i64 - edge_count as i64 + face_count as i64,
        })
    }

    /// Link pairs of a proper vertex subset.
    ///
    /// Simplicial mode: `(e, t)` with `e` a side of `t`, both endpoints of `e`
    /// outside the subset and `t` touching it. Delta mode: one pair per slot
    /// `i` with `v_i(t)` inside and the other two indexed vertices outside, so
    /// a triangle may contribute several pairs.
    pub fn link_pairs(&self, subset: &[usize], mode: LinkMode) -> Result<Vec<LinkPair>, ComplexError> {
        let mask = self.proper_membership(subset)?;
        let mut pairs = Vec::new();
        match mode {
            LinkMode::Simplicial => {
                if !self.is_simplicial().simplicial {
                    return Err(ComplexError::NotSimplicial);
                }
                for (t, tri) in self.triangles.iter().enumerate() {
                    if !self.vertex_triples[t].0.iter().any(|&v| mask[v]) {
                        continue;
                    }
                    let mut sides = tri.faces.to_vec();
                    sides.sort_unstable();
                    sides.dedup();
                    for e in sides {
                        let edge = self.edges[e];
                        if !mask[edge.d0] && !mask[edge.d1] {
                            pairs.push(LinkPair {
                                edge: e,
                                triangle: t,
                                slot: None,
                            });
                        }
                    }
                }
            }
            LinkMode::Delta => {
                for (t, tri) in self.triangles.iter().enumerate() {
                    let vt = self.vertex_triples[t];
                    for i in 0..3 {
                        let others_out = (0..3).filter(|&s| s != i).all(|s| !mask[vt[s]]);
                        if mask[vt[i]] && others_out {
                            pairs.push(LinkPair {
                                edge: tri.faces[i],
                                triangle: t,
                                slot: Some(i),
                            });
                        }
                    }
                }
            }
        }
        Ok(pairs)
    }

    /// Vertex set as a list, validated as a non-empty proper subset.
    pub fn check_proper_subset(&self, subset: &[usize]) -> Result<(), ComplexError> {
        self.proper_membership(subset).map(|_| ())
    }
}

fn sign(slot: usize) -> i8 {
    if slot.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Loop and parallel-edge witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplicialCheck {
    pub simplicial: bool,
    pub loops: Vec<usize>,
    pub parallel: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orientation {
    pub eps: Vec<i8>,
}

impl Orientation {
    /// Checks the per-edge sign condition.
    pub fn is_valid_for(&self, c: &DeltaComplex) -> bool {
        self.eps.len() == c.triangle_count()
            && (0..c.edge_count()).all(|e| {
                let [(t, i), (u, j)] = c.edge_slots(e);
                self.eps[t] * sign(i) + self.eps[u] * sign(j) == 0
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubcomplexSummary {
    pub subset: Vec<usize>,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub face_count: usize,
    pub euler_char: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LinkMode {
    Simplicial,
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LinkPair {
    pub edge: usize,
    pub triangle: usize,
    pub slot: Option<usize>,
}

/// Rank of an integer matrix over the rationals.
pub fn rational_rank(m: &DMatrix<i64>) -> usize {
    let mut rows: Vec<Vec<BigRational>> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| BigRational::from_integer(BigInt::from(m[(i, j)])))
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..m.ncols() {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        let p = pivot_row[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col].clone() / p.clone();
                for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= factor.clone() * y.clone();
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn torus_counts_and_loops() {
        let c = fixtures::one_vertex_torus();
        assert_eq!((c.vertex_count(), c.edge_count(), c.triangle_count()), (1, 3, 2));
        let s = c.is_simplicial();
        assert!(!s.simplicial);
        assert_eq!(s.loops, vec![0, 1, 2]);
        assert!(s.parallel.is_empty());
        assert_eq!(c.euler_characteristic(), 0);
        assert_eq!(c.genus().unwrap(), 1);
        assert_eq!(c.degree(0), 6);
    }

    #[test]
    fn tetrahedron_is_simplicial() {
        let c = fixtures::tetrahedron();
        let s = c.is_simplicial();
        assert!(s.simplicial && s.loops.is_empty() && s.parallel.is_empty());
        assert_eq!(c.euler_characteristic(), 2);
        assert_eq!(c.genus().unwrap(), 0);
    }

    #[test]
    fn parallel_pair_is_reported() {
        let c = fixtures::two_vertex_torus();
        let s = c.is_simplicial();
        assert!(!s.simplicial);
        assert_eq!(s.loops, vec![2, 3]);
        assert_eq!(s.parallel, vec![(0, 1), (0, 4), (0, 5), (1, 4), (1, 5), (4, 5)]);
    }

    #[test]
    fn missing_edge_is_rejected() {
        let err = DeltaComplex::new(
            1,
            vec![Edge::new(0, 0); 3],
            vec![Triangle::new(1, 2, 0), Triangle::new(0, 2, 7)],
        )
        .unwrap_err();
        assert_eq!(err, ComplexError::MissingEdge { triangle: 1, edge: 7 });
    }

    #[test]
    fn simplicial_identity_is_checked() {
        // tetrahedron with one triangle's face maps permuted
        let t = fixtures::tetrahedron();
        let mut tris = t.triangles().to_vec();
        tris[0].faces.swap(0, 1);
        let err = DeltaComplex::new(4, t.edges().to_vec(), tris).unwrap_err();
        assert!(matches!(err, ComplexError::SimplicialIdentity { triangle: 0, .. }));
    }

    #[test]
    fn open_edge_is_rejected() {
        let t = fixtures::tetrahedron();
        let tris = t.triangles()[..3].to_vec();
        let err = DeltaComplex::new(4, t.edges().to_vec(), tris).unwrap_err();
        assert!(matches!(err, ComplexError::EdgeIncidence { count: 1, .. }));
    }

    #[test]
    fn low_degree_is_rejected_unless_relaxed() {
        let c = fixtures::doubled_triangle();
        let err = DeltaComplex::new(3, c.edges().to_vec(), c.triangles().to_vec()).unwrap_err();
        assert!(matches!(err, ComplexError::LowDegree { degree: 2, .. }));
    }

    #[test]
    fn boundary_matrices_compose_to_zero() {
        for c in [
            fixtures::one_vertex_torus(),
            fixtures::tetrahedron(),
            fixtures::one_vertex_genus2(),
            fixtures::two_vertex_torus(),
        ] {
            let (d1, d2) = c.boundary_matrices();
            assert!((&d1 * &d2).iter().all(|&x| x == 0));
        }
        let (d1, _) = fixtures::one_vertex_torus().boundary_matrices();
        assert_eq!(d1.shape(), (1, 3));
        assert!(d1.iter().all(|&x| x == 0));
    }

    #[test]
    fn doubled_triangle_ranks() {
        let c = fixtures::doubled_triangle();
        let (d1, d2) = c.boundary_matrices();
        assert_eq!(rational_rank(&d1), 2);
        assert_eq!(rational_rank(&d2), 1);
        assert_eq!(c.euler_characteristic(), 2);
    }

    #[test]
    fn torus_orientation() {
        let c = fixtures::one_vertex_torus();
        let o = c.orientation().unwrap();
        assert_eq!(o.eps, vec![1, -1]);
        assert!(o.is_valid_for(&c));
    }

    #[test]
    fn klein_bottle_is_not_orientable() {
        let c = fixtures::one_vertex_klein_bottle();
        match c.orientation() {
            Err(ComplexError::NonOrientable { cycle }) => assert!(!cycle.is_empty()),
            other => panic!("expected non-orientable, got {other:?}"),
        }
        assert!(c.genus().is_err());
    }

    #[test]
    fn genus_two_counts() {
        let c = fixtures::one_vertex_genus2();
        assert_eq!((c.vertex_count(), c.edge_count(), c.triangle_count()), (1, 9, 6));
        assert_eq!(c.euler_characteristic(), -2);
        assert_eq!(c.genus().unwrap(), 2);
    }

    /// Brute force over all 2^|F| sign vectors: exactly two satisfy the
    /// edge condition on a connected orientable surface.
    #[test]
    fn orientation_unique_up_to_sign() {
        for c in [
            fixtures::one_vertex_torus(),
            fixtures::tetrahedron(),
            fixtures::one_vertex_genus2(),
            fixtures::two_vertex_torus(),
        ] {
            let f = c.triangle_count();
            let valid = (0u32..1 << f)
                .filter(|bits| {
                    let eps = (0..f).map(|t| if bits >> t & 1 == 1 { -1 } else { 1 }).collect();
                    Orientation { eps }.is_valid_for(&c)
                })
                .count();
            assert_eq!(valid, 2);
        }
        let k = fixtures::one_vertex_klein_bottle();
        let valid = (0u32..4)
            .filter(|bits| {
                let eps = (0..2).map(|t| if bits >> t & 1 == 1 { -1 } else { 1 }).collect();
                Orientation { eps }.is_valid_for(&k)
            })
            .count();
        assert_eq!(valid, 0);
    }

    #[test]
    fn disconnected_input_is_rejected_at_orientation() {
        let t = fixtures::tetrahedron();
        let mut edges = t.edges().to_vec();
        let mut tris = t.triangles().to_vec();
        edges.extend(t.edges().iter().map(|e| Edge::new(e.d0 + 4, e.d1 + 4)));
        tris.extend(t.triangles().iter().map(|tr| Triangle {
            faces: tr.faces.map(|e| e + 6),
        }));
        let c = DeltaComplex::new(8, edges, tris).unwrap();
        assert_eq!(c.orientation(), Err(ComplexError::Disconnected { vertex: 4 }));
    }

    #[test]
    fn subcomplex_summaries_on_tetrahedron() {
        let c = fixtures::tetrahedron();
        let s = c.subcomplex_summary(&[0]).unwrap();
        assert_eq!((s.vertex_count, s.edge_count, s.face_count, s.euler_char), (1, 0, 0, 1));
        let face = c.vertices_of(0);
        let s = c.subcomplex_summary(&face.0).unwrap();
        assert_eq!((s.vertex_count, s.edge_count, s.face_count, s.euler_char), (3, 3, 1, 1));
        let all: Vec<usize> = (0..4).collect();
        let s = c.subcomplex_summary(&all).unwrap();
        assert_eq!((s.edge_count, s.face_count, s.euler_char), (6, 4, 2));
        assert_eq!(c.subcomplex_summary(&[]), Err(ComplexError::EmptySubset));
    }

    #[test]
    fn tetrahedron_singleton_link() {
        let c = fixtures::tetrahedron();
        let simp = c.link_pairs(&[0], LinkMode::Simplicial).unwrap();
        assert_eq!(simp.len(), 3);
        let delta = c.link_pairs(&[0], LinkMode::Delta).unwrap();
        assert_eq!(delta.len(), 3);
        assert_eq!(
            c.link_pairs(&[0, 1, 2, 3], LinkMode::Delta),
            Err(ComplexError::FullSubset)
        );
        assert_eq!(
            fixtures::one_vertex_torus().link_pairs(&[], LinkMode::Delta),
            Err(ComplexError::EmptySubset)
        );
    }

    #[test]
    fn simplicial_link_rejects_loops() {
        let c = fixtures::two_vertex_torus();
        assert_eq!(
            c.link_pairs(&[0], LinkMode::Simplicial),
            Err(ComplexError::NotSimplicial)
        );
        assert!(c.link_pairs(&[0], LinkMode::Delta).is_ok());
    }
}
