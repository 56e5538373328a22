//! Plain-text formats: triangulations, voltage assignments and per-vertex
//! value files.
//!
//! Triangulation file (`#` starts a comment, tokens are whitespace
//! separated):
//!
//! ```text
//! vertices 1
//! edge 0 0 0          # edge <id> <d0> <d1>
//! edge 1 0 0
//! edge 2 0 0
//! triangle 0 1 2 0    # triangle <id> <d0-edge> <d1-edge> <d2-edge>
//! triangle 1 0 2 1
//! phi 2 0.5           # optional, radians
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::complex::{ComplexError, DeltaComplex, Edge, Triangle};
use crate::covering::{CoveringError, VoltageAssignment};
use crate::geometry::{AngleData, GeometryError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid triangulation: {0}")]
    Complex(#[from] ComplexError),
    #[error("invalid angle data: {0}")]
    Geometry(#[from] GeometryError),
    #[error("invalid voltages: {0}")]
    Covering(#[from] CoveringError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn field<T: FromStr>(line: usize, tokens: &[&str], idx: usize, what: &str) -> Result<T, ParseError> {
    let tok = tokens.get(idx).ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("cannot parse {what} from `{tok}`")))
}

fn arity(line: usize, tokens: &[&str], n: usize) -> Result<(), ParseError> {
    if tokens.len() != n {
        return Err(syntax(
            line,
            format!("`{}` expects {} fields, found {}", tokens[0], n - 1, tokens.len() - 1),
        ));
    }
    Ok(())
}

/// Places `items` by their declared ids, which must be exactly `0..n`.
fn dense<T>(kind: &str, items: Vec<(usize, usize, T)>) -> Result<Vec<T>, ParseError> {
    let n = items.len();
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    for (line, id, item) in items {
        if id >= n {
            return Err(syntax(
                line,
                format!("{kind} id {id} breaks the contiguous range 0..{n}"),
            ));
        }
        if slots[id].is_some() {
            return Err(syntax(line, format!("duplicate {kind} id {id}")));
        }
        slots[id] = Some(item);
    }
    Ok(slots.into_iter().map(|s| s.expect("ids are a permutation")).collect())
}

/// A parsed triangulation file.
#[derive(Clone, Debug)]
pub struct ParsedTriangulation {
    pub complex: DeltaComplex,
    pub phi: AngleData,
    /// Edges without a `phi` line; they carry angle 0.
    pub defaulted_phi: Vec<usize>,
}

pub fn parse_triangulation(text: &str) -> Result<ParsedTriangulation, ParseError> {
    let mut vertices: Option<usize> = None;
    let mut edges = Vec::new();
    let mut triangles = Vec::new();
    let mut phis: Vec<(usize, usize, f64)> = Vec::new();
    let mut last_line = 0;
    for (line, tokens) in content_lines(text) {
        last_line = line;
        match tokens[0] {
            "vertices" => {
                arity(line, &tokens, 2)?;
                if vertices.is_some() {
                    return Err(syntax(line, "repeated `vertices` header"));
                }
                vertices = Some(field(line, &tokens, 1, "vertex count")?);
            }
            _ if vertices.is_none() => {
                return Err(syntax(line, "expected `vertices N` before any cell"));
            }
            "edge" => {
                arity(line, &tokens, 4)?;
                let id = field(line, &tokens, 1, "edge id")?;
                let d0 = field(line, &tokens, 2, "d0 vertex")?;
                let d1 = field(line, &tokens, 3, "d1 vertex")?;
                edges.push((line, id, Edge::new(d0, d1)));
            }
            "triangle" => {
                arity(line, &tokens, 5)?;
                let id = field(line, &tokens, 1, "triangle id")?;
                let f: [usize; 3] = [
                    field(line, &tokens, 2, "d0 edge")?,
                    field(line, &tokens, 3, "d1 edge")?,
                    field(line, &tokens, 4, "d2 edge")?,
                ];
                triangles.push((line, id, Triangle::new(f[0], f[1], f[2])));
            }
            "phi" => {
                arity(line, &tokens, 3)?;
                let e = field(line, &tokens, 1, "edge id")?;
                let value: f64 = field(line, &tokens, 2, "angle")?;
                phis.push((line, e, value));
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    let vertices = vertices.ok_or_else(|| syntax(last_line.max(1), "missing `vertices N` header"))?;
    let edges = dense("edge", edges)?;
    let triangles = dense("triangle", triangles)?;
    let mut phi = vec![None; edges.len()];
    for (line, e, value) in phis {
        if e >= edges.len() {
            return Err(syntax(line, format!("phi names edge {e}, which does not exist")));
        }
        if phi[e].is_some() {
            return Err(syntax(line, format!("duplicate phi for edge {e}")));
        }
        phi[e] = Some(value);
    }
    let defaulted_phi = (0..phi.len()).filter(|&e| phi[e].is_none()).collect();
    let phi = AngleData::new(phi.into_iter().map(|p| p.unwrap_or(0.0)).collect())?;
    let complex = DeltaComplex::new(vertices, edges, triangles)?;
    Ok(ParsedTriangulation {
        complex,
        phi,
        defaulted_phi,
    })
}

/// Full-precision decimal for text files.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_triangulation(c: &DeltaComplex, phi: Option<&AngleData>) -> String {
    let mut out = String::new();
    writeln!(out, "vertices {}", c.vertex_count()).unwrap();
    for (id, e) in c.edges().iter().enumerate() {
        writeln!(out, "edge {id} {} {}", e.d0, e.d1).unwrap();
    }
    for (id, t) in c.triangles().iter().enumerate() {
        let [a, b, d] = t.faces;
        writeln!(out, "triangle {id} {a} {b} {d}").unwrap();
    }
    if let Some(phi) = phi {
        for (id, &p) in phi.values().iter().enumerate() {
            writeln!(out, "phi {id} {}", format_float(p)).unwrap();
        }
    }
    out
}

/// Parses `group p k` followed by one `volt <edge> <c1> … <ck>` per edge.
pub fn parse_voltages(text: &str, edges: usize) -> Result<VoltageAssignment, ParseError> {
    let mut header: Option<(u32, usize)> = None;
    let mut volts = Vec::new();
    let mut last_line = 0;
    for (line, tokens) in content_lines(text) {
        last_line = line;
        match tokens[0] {
            "group" => {
                arity(line, &tokens, 3)?;
                if header.is_some() {
                    return Err(syntax(line, "repeated `group` header"));
                }
                header = Some((field(line, &tokens, 1, "modulus")?, field(line, &tokens, 2, "rank")?));
            }
            "volt" => {
                let (_, k) = header.ok_or_else(|| syntax(line, "expected `group p k` before voltages"))?;
                arity(line, &tokens, k + 2)?;
                let e: usize = field(line, &tokens, 1, "edge id")?;
                let g = (0..k)
                    .map(|i| field(line, &tokens, i + 2, "voltage component"))
                    .collect::<Result<Vec<u32>, _>>()?;
                volts.push((line, e, g));
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    let (p, k) = header.ok_or_else(|| syntax(last_line.max(1), "missing `group p k` header"))?;
    if volts.len() != edges {
        return Err(syntax(
            last_line.max(1),
            format!("voltage file lists {} edges, the complex has {edges}", volts.len()),
        ));
    }
    let alpha = dense("voltage edge", volts)?;
    Ok(VoltageAssignment::new(p, k, alpha)?)
}

pub fn write_voltages(va: &VoltageAssignment) -> String {
    let g = va.group();
    let mut out = format!("group {} {}\n", g.modulus, g.rank);
    for (e, v) in va.voltages().iter().enumerate() {
        write!(out, "volt {e}").unwrap();
        for c in v {
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses `<vertex-id> <value>` lines; every vertex must appear once.
pub fn parse_vertex_values(text: &str, vertices: usize) -> Result<Vec<f64>, ParseError> {
    let mut rows = Vec::new();
    let mut last_line = 0;
    for (line, tokens) in content_lines(text) {
        last_line = line;
        arity_plain(line, &tokens, 2)?;
        let v: usize = field(line, &tokens, 0, "vertex id")?;
        let x: f64 = field(line, &tokens, 1, "value")?;
        if !x.is_finite() {
            return Err(syntax(line, format!("value `{}` is not finite", tokens[1])));
        }
        rows.push((line, v, x));
    }
    if rows.len() != vertices {
        return Err(syntax(
            last_line.max(1),
            format!("expected {vertices} vertex values, found {}", rows.len()),
        ));
    }
    dense("vertex", rows)
}

fn arity_plain(line: usize, tokens: &[&str], n: usize) -> Result<(), ParseError> {
    if tokens.len() != n {
        return Err(syntax(line, format!("expected {n} fields, found {}", tokens.len())));
    }
    Ok(())
}

pub fn write_vertex_values(values: &[f64]) -> String {
    let mut out = String::new();
    for (v, x) in values.iter().enumerate() {
        writeln!(out, "{v} {}", format_float(*x)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const TORUS: &str = "\
# one-vertex torus
vertices 1
edge 0 0 0
edge 1 0 0
edge 2 0 0
triangle 0 1 2 0
triangle 1 0 2 1
phi 1 0.25
";

    #[test]
    fn parses_torus() {
        let p = parse_triangulation(TORUS).unwrap();
        assert_eq!(p.complex, fixtures::one_vertex_torus());
        assert_eq!(p.phi.values(), &[0.0, 0.25, 0.0]);
        assert_eq!(p.defaulted_phi, vec![0, 2]);
    }

    #[test]
    fn round_trips_every_fixture() {
        for name in ["torus", "tetrahedron", "two-vertex-torus", "genus2", "klein-bottle"] {
            let c = fixtures::by_name(name).unwrap();
            let phi = AngleData::uniform(c.edge_count(), 0.1).unwrap();
            let back = parse_triangulation(&write_triangulation(&c, Some(&phi))).unwrap();
            assert_eq!(back.complex, c, "{name}");
            assert_eq!(back.phi, phi, "{name}");
            assert!(back.defaulted_phi.is_empty());
        }
    }

    #[test]
    fn ids_may_come_in_any_order() {
        let text = "vertices 1\nedge 2 0 0\nedge 0 0 0\nedge 1 0 0\ntriangle 1 0 2 1\ntriangle 0 1 2 0\n";
        assert_eq!(parse_triangulation(text).unwrap().complex, fixtures::one_vertex_torus());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let cases = [
            ("vertices 1\nedge 0 0\n", 2),
            ("vertices x\n", 1),
            ("edge 0 0 0\n", 1),
            ("vertices 1\n\n# c\nblob 1\n", 4),
            ("vertices 1\nedge 0 0 0\nedge 0 0 0\n", 3),
            ("vertices 1\nedge 0 0 0\nedge 5 0 0\n", 3),
            ("vertices 1\nedge 0 0 0\nphi 3 0.1\n", 3),
            ("vertices 1\nedge 0 0 0\nphi 0 zz\n", 3),
        ];
        for (text, want) in cases {
            match parse_triangulation(text) {
                Err(ParseError::Syntax { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn invariant_errors_pass_through() {
        let missing = "vertices 1\nedge 0 0 0\nedge 1 0 0\nedge 2 0 0\ntriangle 0 1 2 7\ntriangle 1 0 2 1\n";
        assert!(matches!(
            parse_triangulation(missing),
            Err(ParseError::Complex(ComplexError::MissingEdge { triangle: 0, edge: 7 }))
        ));
        let truncated = &TORUS[..TORUS.find("triangle 1").unwrap()];
        assert!(matches!(parse_triangulation(truncated), Err(ParseError::Complex(_))));
        let bad_angle = "vertices 1\nedge 0 0 0\nedge 1 0 0\nedge 2 0 0\ntriangle 0 1 2 0\ntriangle 1 0 2 1\nphi 0 4\n";
        assert!(matches!(parse_triangulation(bad_angle), Err(ParseError::Geometry(_))));
    }

    #[test]
    fn voltage_files() {
        let va = VoltageAssignment::new(3, 2, vec![vec![2, 1], vec![1, 0], vec![0, 1]]).unwrap();
        let text = write_voltages(&va);
        assert_eq!(parse_voltages(&text, 3).unwrap(), va);
        assert!(matches!(
            parse_voltages("group 3 2\nvolt 0 1 0\n", 3),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_voltages("group 3 2\nvolt 0 1\n", 1),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_voltages("group 6 1\nvolt 0 1\n", 1),
            Err(ParseError::Covering(CoveringError::NotPrime(6)))
        ));
    }

    #[test]
    fn vertex_value_files() {
        let vals = [1.0, 0.1 + 0.2, std::f64::consts::PI, 1e-300];
        let back = parse_vertex_values(&write_vertex_values(&vals), 4).unwrap();
        assert_eq!(back, vals);
        assert_eq!(parse_vertex_values("1 2.0\n0 1.5 # x\n", 2).unwrap(), vec![1.5, 2.0]);
        assert!(parse_vertex_values("0 1\n", 2).is_err());
        assert!(parse_vertex_values("0 nan\n", 1).is_err());
    }
}
