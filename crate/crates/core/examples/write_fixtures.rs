//! Writes the named fixtures as `.tri` files into the given directory.

use circlepat::fixtures;
use circlepat::io::write_triangulation;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "data".into());
    std::fs::create_dir_all(&dir).expect("create output directory");
    let all = [
        ("torus", fixtures::one_vertex_torus()),
        ("two_vertex_torus", fixtures::two_vertex_torus()),
        ("tetrahedron", fixtures::tetrahedron()),
        ("genus2", fixtures::one_vertex_genus2()),
        ("klein", fixtures::one_vertex_klein_bottle()),
    ];
    for (name, c) in all {
        let path = format!("{dir}/{name}.tri");
        std::fs::write(&path, write_triangulation(&c, None)).expect("write fixture");
        println!("{path}");
    }
}
