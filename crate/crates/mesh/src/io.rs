//! Mesh import and export.
//!
//! # Datafile format
//!
//! A plain-text, line-oriented description of a constrained triangulation.
//! `#` starts a comment; blank lines are ignored; tokens are separated by
//! whitespace.  The file starts with a chart line and then has up to four
//! sections, each opened by its keyword on a line of its own:
//!
//! ```text
//! chart conformal <kappa>                  # or: chart cartan|halfspace|berger <kappa> <tau>
//! constraints
//!   <id> plane <nx> <ny> <nz> <offset>     # nx x + ny y + nz z = offset
//!   <id> sphere <radius>                   # |p| = radius
//!   <id> slice <z0>                        # z = z0 (Cartan coordinates)
//!   <id> vplane <kappa> <px> <py> <dx> <dy>  # vertical plane over a base geodesic
//! vertices
//!   <id> <x> <y> <z> [constraints <cid>...] [fixed]
//! edges
//!   <id> <tail> <head> [constraints <cid>...] [fixed]
//! faces
//!   <id> <e1> <e2> <e3>                    # signed edge ids; -e runs e backwards
//! ```
//!
//! Ids are positive integers, unique within their section, in any order.
//! The edges of a face must form a closed loop `a → b → c → a`, which fixes
//! the facet orientation.  Vertices are projected onto their constraints on
//! load; points created on an edge by refinement inherit the edge's
//! constraints and fixed flag.  Only triangular faces are accepted.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ekt_geometry::{Chart, ChartKind, SpaceParams, Vector3};

use crate::constraint::Constraint;
use crate::error::{MeshError, Result};
use crate::mesh::{edge_key, EdgeAttr, TriMesh, Vertex};

/// Formats `x` like C's `%.<digits>g`.
pub fn fmt_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// OFF text of the mesh, coordinates with 12 significant digits.
pub fn to_off(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "OFF");
    let _ = writeln!(out, "{} {} {}", mesh.num_vertices(), mesh.num_facets(), mesh.num_edges());
    for v in &mesh.vertices {
        let _ = writeln!(out, "{} {} {}", fmt_g(v.x.x, 12), fmt_g(v.x.y, 12), fmt_g(v.x.z, 12));
    }
    for f in &mesh.facets {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    out
}

/// Wavefront OBJ text of the mesh (one-based indices).
pub fn to_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", fmt_g(v.x.x, 12), fmt_g(v.x.y, 12), fmt_g(v.x.z, 12));
    }
    for f in &mesh.facets {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

/// Parses a datafile (see the module documentation).
pub fn parse_datafile(text: &str) -> Result<TriMesh> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        Header,
        Constraints,
        Vertices,
        Edges,
        Faces,
    }
    let mut section = Section::Header;
    let mut chart: Option<Chart> = None;
    let mut constraints: BTreeMap<u64, (usize, Constraint)> = BTreeMap::new();
    let mut vertices: BTreeMap<u64, (usize, Vector3<f64>, Vec<u64>, bool)> = BTreeMap::new();
    let mut edges: BTreeMap<u64, (usize, u64, u64, Vec<u64>, bool)> = BTreeMap::new();
    let mut faces: BTreeMap<u64, (usize, [i64; 3])> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| MeshError::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            ["constraints"] => {
                section = Section::Constraints;
                continue;
            }
            ["vertices"] => {
                section = Section::Vertices;
                continue;
            }
            ["edges"] => {
                section = Section::Edges;
                continue;
            }
            ["faces"] => {
                section = Section::Faces;
                continue;
            }
            ["chart", rest @ ..] => {
                if chart.is_some() {
                    return Err(err("duplicate chart line".into()));
                }
                chart = Some(parse_chart(rest).map_err(err)?);
                continue;
            }
            _ => {}
        }
        let id = parse_id(toks[0]).map_err(err)?;
        let rest = &toks[1..];
        let dup = || err(format!("duplicate id {id}"));
        match section {
            Section::Header => return Err(err(format!("unexpected line before any section: {content:?}"))),
            Section::Constraints => {
                let c = parse_constraint(rest).map_err(err)?;
                if constraints.insert(id, (line, c)).is_some() {
                    return Err(dup());
                }
            }
            Section::Vertices => {
                if rest.len() < 3 {
                    return Err(err("vertex needs three coordinates".into()));
                }
                let x = Vector3::new(
                    parse_f64(rest[0]).map_err(err)?,
                    parse_f64(rest[1]).map_err(err)?,
                    parse_f64(rest[2]).map_err(err)?,
                );
                let (cs, fixed) = parse_attrs(&rest[3..]).map_err(err)?;
                if vertices.insert(id, (line, x, cs, fixed)).is_some() {
                    return Err(dup());
                }
            }
            Section::Edges => {
                if rest.len() < 2 {
                    return Err(err("edge needs two vertex ids".into()));
                }
                let (a, b) = (parse_id(rest[0]).map_err(err)?, parse_id(rest[1]).map_err(err)?);
                let (cs, fixed) = parse_attrs(&rest[2..]).map_err(err)?;
                if edges.insert(id, (line, a, b, cs, fixed)).is_some() {
                    return Err(dup());
                }
            }
            Section::Faces => {
                if rest.len() != 3 {
                    return Err(err(format!("only triangular faces are supported, got {} edges", rest.len())));
                }
                let mut es = [0i64; 3];
                for (k, t) in rest.iter().enumerate() {
                    es[k] = t.parse::<i64>().ok().filter(|&e| e != 0).ok_or_else(|| err(format!("bad signed edge id {t:?}")))?;
                }
                if faces.insert(id, (line, es)).is_some() {
                    return Err(dup());
                }
            }
        }
    }

    let chart = chart.ok_or(MeshError::Parse { line: 1, message: "missing chart line".into() })?;
    let cidx: BTreeMap<u64, usize> = constraints.keys().enumerate().map(|(i, &id)| (id, i)).collect();
    let map_constraints = |line: usize, ids: &[u64]| -> Result<Vec<usize>> {
        ids.iter()
            .map(|c| cidx.get(c).copied().ok_or(MeshError::Parse { line, message: format!("unknown constraint {c}") }))
            .collect()
    };
    let vidx: BTreeMap<u64, usize> = vertices.keys().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut verts = Vec::with_capacity(vertices.len());
    for (line, x, cs, fixed) in vertices.values() {
        let mut v = Vertex::new(*x).with_constraints(&map_constraints(*line, cs)?);
        v.fixed = *fixed;
        verts.push(v);
    }
    let mut attrs = BTreeMap::new();
    let mut edge_ends: BTreeMap<u64, (usize, usize)> = BTreeMap::new();
    for (&id, (line, a, b, cs, fixed)) in &edges {
        let lookup =
            |v: &u64| vidx.get(v).copied().ok_or(MeshError::Parse { line: *line, message: format!("unknown vertex {v}") });
        let (a, b) = (lookup(a)?, lookup(b)?);
        if a == b {
            return Err(MeshError::Parse { line: *line, message: "edge joins a vertex to itself".into() });
        }
        edge_ends.insert(id, (a, b));
        let mut constraints = map_constraints(*line, cs)?;
        constraints.sort_unstable();
        constraints.dedup();
        attrs.insert(edge_key(a, b), EdgeAttr { constraints, fixed: *fixed });
    }
    let mut facets = Vec::with_capacity(faces.len());
    let mut used_edges = vec![];
    for (line, es) in faces.values() {
        let mut loop_ = Vec::with_capacity(3);
        for &e in es {
            let (a, b) = *edge_ends
                .get(&e.unsigned_abs())
                .ok_or(MeshError::Parse { line: *line, message: format!("unknown edge {}", e.unsigned_abs()) })?;
            used_edges.push(e.unsigned_abs());
            loop_.push(if e > 0 { (a, b) } else { (b, a) });
        }
        for k in 0..3 {
            if loop_[k].1 != loop_[(k + 1) % 3].0 {
                return Err(MeshError::Parse { line: *line, message: "face edges do not form a closed loop".into() });
            }
        }
        facets.push([loop_[0].0, loop_[1].0, loop_[2].0]);
    }
    if let Some(id) = edge_ends.keys().find(|id| !used_edges.contains(id)) {
        return Err(MeshError::Parse { line: edges[id].0, message: format!("edge {id} belongs to no face") });
    }
    TriMesh::with_edges(chart, verts, facets, constraints.into_values().map(|(_, c)| c).collect(), attrs)
}

/// Writes the mesh in datafile form; parsing the result reproduces the
/// mesh up to vertex order (which is preserved) and edge numbering.
pub fn to_datafile(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let chart = mesh.chart();
    let SpaceParams { kappa, tau, .. } = chart.params();
    let g = |x: f64| fmt_g(x, 17);
    match chart.kind() {
        ChartKind::ConformalProduct => {
            let _ = writeln!(out, "chart conformal {}", g(kappa));
        }
        kind => {
            let _ = writeln!(out, "chart {} {} {}", kind.name(), g(kappa), g(tau));
        }
    }
    if !mesh.constraints.is_empty() {
        let _ = writeln!(out, "constraints");
        for (i, c) in mesh.constraints.iter().enumerate() {
            let body = match *c {
                Constraint::LinearPlane { normal, offset } => {
                    format!("plane {} {} {} {}", g(normal.x), g(normal.y), g(normal.z), g(offset))
                }
                Constraint::OriginSphere { radius } => format!("sphere {}", g(radius)),
                Constraint::CartanSlice { z0 } => format!("slice {}", g(z0)),
                Constraint::CartanVerticalPlane { kappa, point, direction } => {
                    format!("vplane {} {} {} {} {}", g(kappa), g(point[0]), g(point[1]), g(direction[0]), g(direction[1]))
                }
            };
            let _ = writeln!(out, "  {} {body}", i + 1);
        }
    }
    let attrs_text = |cs: &[usize], fixed: bool| {
        let mut s = String::new();
        if !cs.is_empty() {
            s.push_str(" constraints");
            for c in cs {
                let _ = write!(s, " {}", c + 1);
            }
        }
        if fixed {
            s.push_str(" fixed");
        }
        s
    };
    let _ = writeln!(out, "vertices");
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(out, "  {} {} {} {}{}", i + 1, g(v.x.x), g(v.x.y), g(v.x.z), attrs_text(&v.constraints, v.fixed));
    }
    let _ = writeln!(out, "edges");
    let mut ids = BTreeMap::new();
    for (n, (a, b)) in mesh.edges().into_keys().enumerate() {
        ids.insert((a, b), n + 1);
        let attr = mesh.edge_attr(a, b);
        let _ = writeln!(out, "  {} {} {}{}", n + 1, a + 1, b + 1, attrs_text(&attr.constraints, attr.fixed));
    }
    let _ = writeln!(out, "faces");
    for (i, f) in mesh.facets.iter().enumerate() {
        let signed: Vec<String> = (0..3)
            .map(|k| {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let id = ids[&edge_key(a, b)] as i64;
                (if a < b { id } else { -id }).to_string()
            })
            .collect();
        let _ = writeln!(out, "  {} {}", i + 1, signed.join(" "));
    }
    out
}

fn parse_id(t: &str) -> std::result::Result<u64, String> {
    t.parse::<u64>().ok().filter(|&i| i > 0).ok_or_else(|| format!("expected a positive integer id, got {t:?}"))
}

fn parse_f64(t: &str) -> std::result::Result<f64, String> {
    t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("expected a finite number, got {t:?}"))
}

fn parse_chart(rest: &[&str]) -> std::result::Result<Chart, String> {
    let nums = |xs: &[&str]| xs.iter().map(|t| parse_f64(t)).collect::<std::result::Result<Vec<f64>, String>>();
    let chart = match rest {
        ["conformal", k] => Chart::conformal(parse_f64(k)?),
        [kind @ ("cartan" | "halfspace" | "berger"), k, t] => {
            let v = nums(&[k, t])?;
            match *kind {
                "cartan" => Ok(Chart::cartan(v[0], v[1])),
                "halfspace" => Chart::half_space(v[0], v[1]),
                _ => Chart::berger(v[0], v[1]),
            }
        }
        _ => return Err(format!("bad chart line: chart {}", rest.join(" "))),
    };
    chart.map_err(|e| e.to_string())
}

fn parse_constraint(rest: &[&str]) -> std::result::Result<Constraint, String> {
    let nums = |xs: &[&str]| xs.iter().map(|t| parse_f64(t)).collect::<std::result::Result<Vec<f64>, String>>();
    match rest {
        ["plane", args @ ..] if args.len() == 4 => {
            let v = nums(args)?;
            let normal = Vector3::new(v[0], v[1], v[2]);
            if normal.norm() == 0.0 {
                return Err("plane normal must be non-zero".into());
            }
            Ok(Constraint::LinearPlane { normal, offset: v[3] })
        }
        ["sphere", r] => {
            let r = parse_f64(r)?;
            if r > 0.0 {
                Ok(Constraint::OriginSphere { radius: r })
            } else {
                Err("sphere radius must be positive".into())
            }
        }
        ["slice", z] => Ok(Constraint::CartanSlice { z0: parse_f64(z)? }),
        ["vplane", args @ ..] if args.len() == 5 => {
            let v = nums(args)?;
            if v[3] == 0.0 && v[4] == 0.0 {
                return Err("vertical plane direction must be non-zero".into());
            }
            Ok(Constraint::CartanVerticalPlane { kappa: v[0], point: [v[1], v[2]], direction: [v[3], v[4]] })
        }
        _ => Err(format!("bad constraint: {}", rest.join(" "))),
    }
}

fn parse_attrs(toks: &[&str]) -> std::result::Result<(Vec<u64>, bool), String> {
    let mut cs = Vec::new();
    let mut fixed = false;
    let mut in_constraints = false;
    for t in toks {
        match *t {
            "constraints" | "constraint" => in_constraints = true,
            "fixed" => {
                fixed = true;
                in_constraints = false;
            }
            _ if in_constraints => cs.push(parse_id(t)?),
            other => return Err(format!("unexpected token {other:?}")),
        }
    }
    Ok((cs, fixed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_matches_c() {
        assert_eq!(fmt_g(1.0, 12), "1");
        assert_eq!(fmt_g(0.1, 12), "0.1");
        assert_eq!(fmt_g(-2.5e-7, 12), "-2.5e-07");
        assert_eq!(fmt_g(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(fmt_g(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_g(100.0, 12), "100");
        assert_eq!(fmt_g(0.0001, 12), "0.0001");
        assert_eq!(fmt_g(999999999999.9, 12), "1e+12");
    }

    const TRIANGLE: &str = "
        # a single triangle in R^3
        chart cartan 0 0
        constraints
          1 plane 0 0 1 0
        vertices
          1 0 0 0.3 constraints 1
          2 1 0 0 fixed
          3 0 1 0
        edges
          1 1 2 constraints 1
          2 2 3
          3 3 1
        faces
          1 1 2 3
    ";

    #[test]
    fn parses_and_projects() {
        let m = parse_datafile(TRIANGLE).unwrap();
        assert_eq!((m.num_vertices(), m.num_facets()), (3, 1));
        assert_eq!(m.position(0).z, 0.0);
        assert!(m.vertices[1].fixed);
        assert_eq!(m.edge_attr(0, 1).constraints, vec![0]);
        assert!((m.area().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let m = parse_datafile(TRIANGLE).unwrap();
        let again = parse_datafile(&to_datafile(&m)).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn reports_line_numbers() {
        let bad = TRIANGLE.replace("1 1 2 3\n", "1 1 -2 3\n");
        match parse_datafile(&bad).unwrap_err() {
            MeshError::Parse { line, .. } => assert_eq!(line, 15),
            e => panic!("unexpected {e:?}"),
        }
        let bad = TRIANGLE.replace("1 1 2 constraints 1", "1 1 2 constraints 7");
        assert_eq!(parse_datafile(&bad).unwrap_err().kind(), "ParseError");
    }

    #[test]
    fn off_layout() {
        let m = parse_datafile(TRIANGLE).unwrap();
        let off = to_off(&m);
        assert_eq!(off, "OFF\n3 1 3\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
        assert!(to_obj(&m).ends_with("f 1 2 3\n"));
    }
}
