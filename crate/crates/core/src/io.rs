//! Text formats: ASCII OBJ in and out, the ITM intrinsic-mesh format, and
//! the MAP barycentric-mapping format.
//!
//! ITM exists because a Delta-complex cannot be stored as bare vertex
//! triples: self-edges and doubled edges make corner ids ambiguous, so each
//! face record names its three corners, its three twin sides, and its three
//! side lengths explicitly. Lengths are printed with round-trip-exact
//! decimals; a parsed file reproduces them bit for bit.
//!
//! Vertex ids survive serialization unchanged, dead slots included, so a
//! mapping file written next to a mesh keeps referring to the original
//! vertex numbering. Face ids are compacted to file order; the serializer
//! returns the renumbering so the mapping writer can follow it.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::correspondence::{BarycentricMapping, BarycentricPoint};
use crate::mesh::{BuildError, FaceId, IntrinsicMesh, VertexId};

/// Parse failure, addressed by 1-based line number.
#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn perr(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Failure while reading a mesh from text or disk.
#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("mesh construction: {0}")]
    Build(#[from] BuildError),
}

/// Position of each live face's record in the serialized file, indexed by
/// face id. Dead faces map to `None`.
pub type FaceNumbering = Vec<Option<usize>>;

/// Vertex positions plus 0-based triangle corner indices.
pub type ObjData = (Vec<[f64; 3]>, Vec<[usize; 3]>);

/// Parse an ASCII OBJ. Only `v` and `f` records matter; normals, texture
/// coordinates, groups, and materials are ignored. Faces must be triangles
/// and come back 0-based.
pub fn parse_obj(text: &str) -> Result<ObjData, ParseError> {
    let mut positions: Vec<[f64; 3]> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for slot in &mut p {
                    let t = tokens
                        .next()
                        .ok_or_else(|| perr(line, "vertex with fewer than 3 coordinates"))?;
                    *slot = t
                        .parse()
                        .map_err(|_| perr(line, format!("bad coordinate {t:?}")))?;
                }
                // A fourth (weight) coordinate is legal OBJ; ignore it.
                positions.push(p);
            }
            Some("f") => {
                let corners: Vec<&str> = tokens.collect();
                if corners.len() != 3 {
                    return Err(perr(
                        line,
                        format!(
                            "face with {} corners; only triangles are accepted",
                            corners.len()
                        ),
                    ));
                }
                let mut tri = [0usize; 3];
                for (slot, t) in tri.iter_mut().zip(&corners) {
                    let first = t.split('/').next().unwrap_or("");
                    let idx: usize = first
                        .parse()
                        .map_err(|_| perr(line, format!("bad face index {t:?}")))?;
                    if idx == 0 || idx > positions.len() {
                        return Err(perr(
                            line,
                            format!(
                                "face index {idx} out of range ({} vertices)",
                                positions.len()
                            ),
                        ));
                    }
                    *slot = idx - 1;
                }
                faces.push(tri);
            }
            // Comments, blank lines, and every other record type.
            _ => {}
        }
    }
    Ok((positions, faces))
}

/// Serialize positions and 0-based triangles as ASCII OBJ (1-based indices).
pub fn obj_string(positions: &[[f64; 3]], faces: &[[usize; 3]]) -> String {
    let mut out = String::new();
    for p in positions {
        writeln!(out, "v {} {} {}", p[0], p[1], p[2]).unwrap();
    }
    for f in faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}

pub fn load_obj(path: impl AsRef<Path>) -> Result<ObjData, ReadError> {
    Ok(parse_obj(&std::fs::read_to_string(path)?)?)
}

/// Serialize a mesh as ITM text. Returns the text and the face renumbering
/// used in it; vertex ids are written as-is, with the header carrying the id
/// space size so dead slots survive a round trip.
pub fn itm_string(mesh: &IntrinsicMesh) -> (String, FaceNumbering) {
    let c = mesh.complex();
    let mut renumbering: FaceNumbering = vec![None; c.face_capacity()];
    for (i, f) in c.faces().enumerate() {
        renumbering[f.0] = Some(i);
    }
    let mut out = String::new();
    writeln!(out, "ITM 1").unwrap();
    writeln!(out, "{} {}", c.vertex_capacity(), c.num_faces()).unwrap();
    for f in c.faces() {
        let hs = c.face_halfedges(f);
        out.push('f');
        for &h in &hs {
            write!(out, " {}", c.origin(h).0).unwrap();
        }
        for &h in &hs {
            match c.twin(h) {
                None => out.push_str(" -1 -1"),
                Some(t) => {
                    let tf = c.face(t);
                    let side = c
                        .face_halfedges(tf)
                        .iter()
                        .position(|&x| x == t)
                        .expect("twin lies in its own face");
                    write!(out, " {} {}", renumbering[tf.0].unwrap(), side).unwrap();
                }
            }
        }
        for &h in &hs {
            write!(out, " {}", mesh.halfedge_length(h)).unwrap();
        }
        out.push('\n');
    }
    (out, renumbering)
}

pub fn parse_itm(text: &str) -> Result<IntrinsicMesh, ReadError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    if header.trim() != "ITM 1" {
        return Err(perr(hline, "expected header \"ITM 1\"").into());
    }
    let (cline, counts) = lines
        .next()
        .ok_or_else(|| perr(hline, "missing counts line"))?;
    let mut it = counts.split_whitespace();
    let parse_count = |t: Option<&str>| -> Result<usize, ParseError> {
        t.and_then(|t| t.parse().ok())
            .ok_or_else(|| perr(cline, "expected \"<vertices> <faces>\""))
    };
    let num_vertices = parse_count(it.next())?;
    let num_faces = parse_count(it.next())?;
    if it.next().is_some() {
        return Err(perr(cline, "trailing tokens after counts").into());
    }

    let mut corners: Vec<[usize; 3]> = Vec::with_capacity(num_faces);
    let mut twins: Vec<[Option<(usize, usize)>; 3]> = Vec::with_capacity(num_faces);
    let mut sides: Vec<[f64; 3]> = Vec::with_capacity(num_faces);
    let mut face_lines: Vec<usize> = Vec::with_capacity(num_faces);
    for _ in 0..num_faces {
        let (line, raw) = lines
            .next()
            .ok_or_else(|| perr(cline, format!("expected {num_faces} face records")))?;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.len() != 13 || tokens[0] != "f" {
            return Err(perr(line, "expected \"f v v v  t s t s t s  l l l\"").into());
        }
        let mut cs = [0usize; 3];
        for (k, slot) in cs.iter_mut().enumerate() {
            let t = tokens[1 + k];
            *slot = t
                .parse()
                .map_err(|_| perr(line, format!("bad vertex id {t:?}")))?;
            if *slot >= num_vertices {
                return Err(perr(line, format!("vertex id {slot} out of range")).into());
            }
        }
        let mut tw = [None; 3];
        for (k, slot) in tw.iter_mut().enumerate() {
            let (ft, st) = (tokens[4 + 2 * k], tokens[5 + 2 * k]);
            let fi: i64 = ft
                .parse()
                .map_err(|_| perr(line, format!("bad twin face {ft:?}")))?;
            let si: i64 = st
                .parse()
                .map_err(|_| perr(line, format!("bad twin side {st:?}")))?;
            *slot = match (fi, si) {
                (-1, -1) => None,
                (f, s) if f >= 0 && (0..3).contains(&s) => {
                    if f as usize >= num_faces {
                        return Err(perr(line, format!("twin face {f} out of range")).into());
                    }
                    Some((f as usize, s as usize))
                }
                _ => return Err(perr(line, format!("bad twin reference {ft} {st}")).into()),
            };
        }
        let mut ls = [0.0f64; 3];
        for (k, slot) in ls.iter_mut().enumerate() {
            let t = tokens[10 + k];
            *slot = t
                .parse()
                .map_err(|_| perr(line, format!("bad length {t:?}")))?;
            if !(slot.is_finite() && *slot > 0.0) {
                return Err(perr(line, format!("length {t} is not positive and finite")).into());
            }
        }
        corners.push(cs);
        twins.push(tw);
        sides.push(ls);
        face_lines.push(line);
    }
    if let Some((line, _)) = lines.next() {
        return Err(perr(line, "trailing content after face records").into());
    }

    // Cross-record validation: twins must point back, agree on endpoints,
    // and carry bit-identical lengths.
    for fi in 0..num_faces {
        for k in 0..3 {
            let Some((tf, ts)) = twins[fi][k] else {
                continue;
            };
            let line = face_lines[fi];
            if (tf, ts) == (fi, k) {
                return Err(perr(line, format!("side {k} is its own twin")).into());
            }
            if twins[tf][ts] != Some((fi, k)) {
                return Err(perr(
                    line,
                    format!("twin {tf}/{ts} of side {k} does not point back"),
                )
                .into());
            }
            if corners[fi][k] != corners[tf][(ts + 1) % 3]
                || corners[fi][(k + 1) % 3] != corners[tf][ts]
            {
                return Err(perr(
                    line,
                    format!("twin {tf}/{ts} of side {k} disagrees on endpoints"),
                )
                .into());
            }
            if sides[fi][k].to_bits() != sides[tf][ts].to_bits() {
                return Err(perr(
                    line,
                    format!("twin {tf}/{ts} of side {k} disagrees on length"),
                )
                .into());
            }
        }
    }

    Ok(IntrinsicMesh::from_raw_faces(
        num_vertices,
        &corners,
        &twins,
        &sides,
    )?)
}

pub fn load_itm(path: impl AsRef<Path>) -> Result<IntrinsicMesh, ReadError> {
    parse_itm(&std::fs::read_to_string(path)?)
}

/// Serialize a mapping next to a mesh serialized with `itm_string`; host
/// face ids go through the same renumbering.
pub fn mapping_string(mapping: &BarycentricMapping, renumbering: &FaceNumbering) -> String {
    let mut out = String::new();
    for (v, p) in mapping.tracked() {
        let host = renumbering[p.face.0].expect("host face is live");
        writeln!(
            out,
            "m {} {} {} {} {}",
            v.0, host, p.coords[0], p.coords[1], p.coords[2]
        )
        .unwrap();
    }
    out
}

/// Parse a mapping against the mesh it accompanies. Host faces must exist
/// there; coordinates must sum to 1 within 1e-9.
pub fn parse_mapping(
    text: &str,
    mesh: &IntrinsicMesh,
) -> Result<Vec<(VertexId, BarycentricPoint)>, ParseError> {
    let c = mesh.complex();
    let mut seen = vec![false; c.vertex_capacity()];
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.len() != 6 || tokens[0] != "m" {
            return Err(perr(line, "expected \"m <vertex> <face> <c0> <c1> <c2>\""));
        }
        let v: usize = tokens[1]
            .parse()
            .map_err(|_| perr(line, format!("bad vertex id {:?}", tokens[1])))?;
        if v >= c.vertex_capacity() {
            return Err(perr(line, format!("vertex id {v} out of range")));
        }
        if seen[v] {
            return Err(perr(line, format!("vertex {v} mapped twice")));
        }
        seen[v] = true;
        let f: usize = tokens[2]
            .parse()
            .map_err(|_| perr(line, format!("bad face id {:?}", tokens[2])))?;
        if !c.face_alive(FaceId(f)) {
            return Err(perr(line, format!("host face {f} is not in the mesh")));
        }
        let mut coords = [0.0f64; 3];
        for (k, slot) in coords.iter_mut().enumerate() {
            let t = tokens[3 + k];
            *slot = t
                .parse()
                .map_err(|_| perr(line, format!("bad coordinate {t:?}")))?;
            if !slot.is_finite() {
                return Err(perr(line, format!("coordinate {t} is not finite")));
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(perr(line, format!("coordinates sum to {sum}, not 1")));
        }
        entries.push((
            VertexId(v),
            BarycentricPoint {
                face: FaceId(f),
                coords,
            },
        ));
    }
    Ok(entries)
}

pub fn load_mapping(
    path: impl AsRef<Path>,
    mesh: &IntrinsicMesh,
) -> Result<Vec<(VertexId, BarycentricPoint)>, ReadError> {
    Ok(parse_mapping(&std::fs::read_to_string(path)?, mesh)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplify::{simplify, SimplifyConfig};
    use crate::synthetic;

    #[test]
    fn obj_quad_parses_to_two_triangles() {
        let text = "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3\nf 1 3 4\n";
        let (positions, faces) = parse_obj(text).unwrap();
        assert_eq!(positions.len(), 4);
        assert_eq!(faces, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn obj_attribute_indices_are_ignored() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nf 1/1/1 2/2/2 3/3/3\n";
        let (_, faces) = parse_obj(text).unwrap();
        assert_eq!(faces, vec![[0, 1, 2]]);
    }

    #[test]
    fn obj_errors_name_their_line() {
        let quad = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        let e = parse_obj(quad).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.to_string().contains("4 corners"));

        let e = parse_obj("v 0 0 0\nv 1 x 0\n").unwrap_err();
        assert_eq!(e.line, 2);

        let e = parse_obj("v 0 0 0\nf 1 1 9\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.to_string().contains("out of range"));

        let e = parse_obj("v 0 0 0\nf 0 1 1\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn obj_round_trips_bit_exactly() {
        let soup = synthetic::jittered_grid(4, 0.3, 7);
        let text = obj_string(&soup.positions, &soup.faces);
        let (positions, faces) = parse_obj(&text).unwrap();
        assert_eq!(positions, soup.positions);
        assert_eq!(faces, soup.faces);
    }

    #[test]
    fn itm_serialization_is_a_fixed_point() {
        for mesh in [
            synthetic::grid(4).mesh(),
            synthetic::jittered_grid(5, 0.3, 3).mesh(),
            synthetic::cylinder(8, 4).mesh(),
            synthetic::pillow(),
            synthetic::wheel(6, 2.5 * std::f64::consts::PI),
        ] {
            let (text, _) = itm_string(&mesh);
            let parsed = parse_itm(&text).unwrap();
            parsed.check_invariants();
            let (again, _) = itm_string(&parsed);
            assert_eq!(text, again);
            assert_eq!(
                parsed.complex().num_vertices(),
                mesh.complex().num_vertices()
            );
            assert_eq!(parsed.complex().num_faces(), mesh.complex().num_faces());
            assert_eq!(parsed.complex().num_edges(), mesh.complex().num_edges());
            assert_eq!(
                parsed.complex().boundary_loop_count(),
                mesh.complex().boundary_loop_count()
            );
            assert_eq!(parsed.curvature_sum(), mesh.curvature_sum());
        }
    }

    #[test]
    fn itm_keeps_dead_vertex_slots_and_live_ids() {
        let mut mesh = synthetic::grid(5).mesh();
        let out = simplify(&mut mesh, &SimplifyConfig::new(1e-8)).unwrap();
        assert!(out.report.removed > 0);
        let (text, _) = itm_string(&mesh);
        let parsed = parse_itm(&text).unwrap();
        parsed.check_invariants();
        let live_before: Vec<_> = mesh.complex().vertices().collect();
        let live_after: Vec<_> = parsed.complex().vertices().collect();
        assert_eq!(live_before, live_after);
        assert_eq!(
            parsed.complex().vertex_capacity(),
            mesh.complex().vertex_capacity()
        );
        // Lengths are bit-exact, but a compacted mesh may start each fan at a
        // different anchor, so the angle sums can differ in the last ulps.
        for v in parsed.complex().vertices() {
            assert!((parsed.gaussian_curvature(v) - mesh.gaussian_curvature(v)).abs() < 1e-12);
        }
    }

    #[test]
    fn itm_rejects_inconsistent_records() {
        let (good, _) = itm_string(&synthetic::grid(3).mesh());

        let bad = good.replacen("ITM 1", "ITM 2", 1);
        assert!(matches!(parse_itm(&bad), Err(ReadError::Parse(_))));

        // Break one side's twin reference; its partner still points back.
        let victim = good.lines().nth(2).unwrap();
        let tampered: String = {
            let tokens: Vec<&str> = victim.split_whitespace().collect();
            let mut t = tokens.clone();
            let pos = (4..10).step_by(2).find(|&i| tokens[i] != "-1").unwrap();
            t[pos] = "-1";
            t[pos + 1] = "-1";
            good.replacen(victim, &t.join(" "), 1)
        };
        let err = parse_itm(&tampered).unwrap_err();
        assert!(err.to_string().contains("point back"), "{err}");

        // Corrupt one side's length without touching its twin.
        let (text, _) = itm_string(&synthetic::grid(3).mesh());
        let victim = text.lines().nth(2).unwrap();
        let tokens: Vec<&str> = victim.split_whitespace().collect();
        let mut t = tokens.clone();
        t[12] = "1.25";
        let tampered = text.replacen(victim, &t.join(" "), 1);
        let err = parse_itm(&tampered).unwrap_err();
        assert!(err.to_string().contains("length"), "{err}");

        let e = parse_itm("ITM 1\n1 1\nf 0 0 0 -1 -1 -1 -1 -1 -1 1 1 nan\n").unwrap_err();
        assert!(e.to_string().contains("finite"), "{e}");
    }

    #[test]
    fn mapping_round_trips_against_serialized_mesh() {
        let mut mesh = synthetic::grid(4).mesh();
        let out = simplify(&mut mesh, &SimplifyConfig::new(1e-8)).unwrap();
        let mapping = out.mapping.expect("tracking is on by default");
        assert_eq!(mapping.len(), 4);
        let (mesh_text, renumbering) = itm_string(&mesh);
        let map_text = mapping_string(&mapping, &renumbering);
        let parsed_mesh = parse_itm(&mesh_text).unwrap();
        let entries = parse_mapping(&map_text, &parsed_mesh).unwrap();
        assert_eq!(entries.len(), mapping.len());
        for (v, p) in &entries {
            let original = mapping.get(*v).unwrap();
            assert_eq!(p.coords, original.coords);
            // Same host face, identified by its corner vertex ids.
            let mut a = parsed_mesh.complex().face_vertices(p.face);
            let mut b = mesh.complex().face_vertices(original.face);
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mapping_rejects_bad_lines() {
        let mesh = synthetic::grid(3).mesh();
        let e = parse_mapping("m 4 0 0.5 0.5 0.1\n", &mesh).unwrap_err();
        assert!(e.to_string().contains("sum"), "{e}");
        let e = parse_mapping("m 4 99 0.5 0.5 0\n", &mesh).unwrap_err();
        assert!(e.to_string().contains("host face"), "{e}");
        let e = parse_mapping("m 4 0 0.5 0.5 0\nm 4 1 1 0 0\n", &mesh).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.to_string().contains("twice"), "{e}");
        let e = parse_mapping("m 900 0 1 0 0\n", &mesh).unwrap_err();
        assert!(e.to_string().contains("out of range"), "{e}");
        assert!(parse_mapping("m 4 0 x 0.5 0.5\n", &mesh).is_err());
    }
}
