//! Small named triangulations used by tests, examples and the CLI data files.

use crate::complex::{DeltaComplex, Edge, Triangle};

/// One vertex, three loops `a, b, c` and two triangles with `a + b = c`.
pub fn one_vertex_torus() -> DeltaComplex {
    let edges = vec![Edge::new(0, 0); 3];
    let triangles = vec![Triangle::new(1, 2, 0), Triangle::new(0, 2, 1)];
    DeltaComplex::new(1, edges, triangles).expect("torus fixture")
}

/// Boundary of the 3-simplex, edges oriented from the smaller vertex.
pub fn tetrahedron() -> DeltaComplex {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let edge_id = |a: usize, b: usize| pairs.iter().position(|&p| p == (a, b)).unwrap();
    let edges = pairs.iter().map(|&(a, b)| Edge::new(b, a)).collect();
    let triangles = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
        .iter()
        .map(|&(a, b, c)| Triangle::new(edge_id(b, c), edge_id(a, c), edge_id(a, b)))
        .collect();
    DeltaComplex::new(4, edges, triangles).expect("tetrahedron fixture")
}

/// Two copies of one triangle glued along their boundary. Vertices have
/// degree two, so this is only constructible through the relaxed builder.
pub fn doubled_triangle() -> DeltaComplex {
    let edges = vec![Edge::new(1, 0), Edge::new(2, 0), Edge::new(2, 1)];
    let triangles = vec![Triangle::new(2, 1, 0); 2];
    DeltaComplex::new_relaxed(3, edges, triangles).expect("doubled triangle fixture")
}

/// The torus `R^2 / (2Z x Z)` cut into two unit squares, each split along
/// its diagonal: two vertices, four parallel edges between them and a loop
/// at each vertex.
pub fn two_vertex_torus() -> DeltaComplex {
    // h0, h1 horizontal; v0, v1 vertical loops; g0, g1 diagonals
    let edges = vec![
        Edge::new(1, 0),
        Edge::new(0, 1),
        Edge::new(0, 0),
        Edge::new(1, 1),
        Edge::new(1, 0),
        Edge::new(0, 1),
    ];
    let triangles = vec![
        Triangle::new(3, 4, 0),
        Triangle::new(0, 4, 2),
        Triangle::new(2, 5, 1),
        Triangle::new(1, 5, 3),
    ];
    DeltaComplex::new(2, edges, triangles).expect("two-vertex torus fixture")
}

/// Genus-two surface from the octagon `a b c d a⁻¹ b⁻¹ c⁻¹ d⁻¹`, fanned
/// from one corner: one vertex, nine loops, six triangles. Every loop has a
/// distinct nonzero homology class.
pub fn one_vertex_genus2() -> DeltaComplex {
    // side k runs from corner k to corner k+1; (edge, forward?)
    let sides = [
        (0, true),
        (1, true),
        (2, true),
        (3, true),
        (0, false),
        (1, false),
        (2, false),
        (3, false),
    ];
    // edge from corner 0 to corner m, always oriented away from corner 0
    let from_root = |m: usize| match m {
        1 => 0,
        7 => 3,
        m => 4 + m - 2,
    };
    let edges = vec![Edge::new(0, 0); 9];
    let triangles = (1..7)
        .map(|m| {
            let (side, forward) = sides[m];
            if forward {
                Triangle::new(side, from_root(m + 1), from_root(m))
            } else {
                Triangle::new(side, from_root(m), from_root(m + 1))
            }
        })
        .collect();
    DeltaComplex::new(1, edges, triangles).expect("genus-two fixture")
}

/// Klein bottle from the square with sides `a`, `b` glued `a b a b⁻¹`,
/// split along a diagonal `c`.
pub fn one_vertex_klein_bottle() -> DeltaComplex {
    let edges = vec![Edge::new(0, 0); 3];
    let triangles = vec![Triangle::new(1, 0, 2), Triangle::new(0, 2, 1)];
    DeltaComplex::new(1, edges, triangles).expect("klein bottle fixture")
}

/// Look up a fixture by name.
pub fn by_name(name: &str) -> Option<DeltaComplex> {
    Some(match name {
        "torus" | "one-vertex-torus" => one_vertex_torus(),
        "tetrahedron" => tetrahedron(),
        "doubled-triangle" => doubled_triangle(),
        "two-vertex-torus" => two_vertex_torus(),
        "genus2" | "one-vertex-genus2" => one_vertex_genus2(),
        "klein-bottle" => one_vertex_klein_bottle(),
        _ => return None,
    })
}
