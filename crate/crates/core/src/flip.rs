//! Intrinsic edge flips and Delaunay retriangulation.
//!
//! A flip replaces the diagonal of the two faces adjacent to an edge. The
//! new diagonal length comes from laying the two faces out flat as a quad;
//! the flip is permitted only when that quad is strictly convex, which is
//! exactly when the new diagonal crosses the old one inside the surface.
//!
//! Flips reuse all incident element ids: the edge keeps its id with a new
//! length and new endpoints, and the two faces keep theirs. Each flip emits
//! a [`FlipRecord`] that restores the previous state exactly, bit-for-bit,
//! when undone in reverse order.

use std::collections::VecDeque;

use thiserror::Error;

use crate::geom::{self, Point2};
use crate::mesh::{EdgeId, FaceId, HalfedgeId, IntrinsicMesh, VertexId};

/// Everything needed to reverse one flip. Undo rebuilds the two face cycles
/// and restores every anchor and the stored length verbatim, so a flip
/// followed by its undo leaves the mesh equal to the original under `==`.
#[derive(Clone, Debug)]
pub struct FlipRecord {
    pub(crate) edge: EdgeId,
    pub(crate) h1: HalfedgeId,
    pub(crate) h2: HalfedgeId,
    pub(crate) h1n: HalfedgeId,
    pub(crate) h1p: HalfedgeId,
    pub(crate) h2n: HalfedgeId,
    pub(crate) h2p: HalfedgeId,
    pub(crate) f1: FaceId,
    pub(crate) f2: FaceId,
    edge_anchor: HalfedgeId,
    f1_anchor: HalfedgeId,
    f2_anchor: HalfedgeId,
    va: VertexId,
    va_anchor: HalfedgeId,
    vb: VertexId,
    vb_anchor: HalfedgeId,
    old_len: f64,
}

/// The two faces around an interior edge, flattened into one plane.
/// With `h1: a -> b`, the layout puts `a` at the origin, `b` on the positive
/// x-axis, the far corner of `face(h1)` above the axis and the far corner of
/// `face(h2)` below it.
pub(crate) struct Quad {
    pub(crate) h1: HalfedgeId,
    pub(crate) h2: HalfedgeId,
    pub(crate) h1n: HalfedgeId,
    pub(crate) h1p: HalfedgeId,
    pub(crate) h2n: HalfedgeId,
    pub(crate) h2p: HalfedgeId,
    pub(crate) f1: FaceId,
    pub(crate) f2: FaceId,
    pub(crate) pa: Point2,
    pub(crate) pb: Point2,
    pub(crate) pc: Point2,
    pub(crate) pd: Point2,
}

/// Lay out the quad around an interior edge. `None` for boundary edges and
/// for edges whose two halfedges share a face (a one-triangle cone), which
/// also covers edges at degree-1 vertices.
pub(crate) fn quad_layout(mesh: &IntrinsicMesh, e: EdgeId) -> Option<Quad> {
    let c = mesh.complex();
    let h1 = c.halfedge_of_edge(e);
    let h2 = c.twin(h1)?;
    let (f1, f2) = (c.face(h1), c.face(h2));
    if f1 == f2 {
        return None;
    }
    let (h1n, h1p) = (c.next(h1), c.prev(h1));
    let (h2n, h2p) = (c.next(h2), c.prev(h2));
    let l = mesh.length(e);
    let pa = [0.0, 0.0];
    let pb = [l, 0.0];
    let pc = geom::apex_position(l, mesh.halfedge_length(h1p), mesh.halfedge_length(h1n), 1.0);
    let pd = geom::apex_position(
        l,
        mesh.halfedge_length(h2n),
        mesh.halfedge_length(h2p),
        -1.0,
    );
    Some(Quad {
        h1,
        h2,
        h1n,
        h1p,
        h2n,
        h2p,
        f1,
        f2,
        pa,
        pb,
        pc,
        pd,
    })
}

fn flippable_quad(mesh: &IntrinsicMesh, e: EdgeId) -> Option<Quad> {
    let q = quad_layout(mesh, e)?;
    let c = mesh.complex();
    let (va, vb) = (c.origin(q.h1), c.origin(q.h2));
    // Flipping removes one edge incidence at each endpoint (two when the
    // edge is a loop); refuse to take a vertex below valence 1.
    if va == vb {
        if c.vertex_valence(va) < 3 {
            return None;
        }
    } else if c.vertex_valence(va) < 2 || c.vertex_valence(vb) < 2 {
        return None;
    }
    // Strict convexity at the two old endpoints, with a scale-invariant
    // margin. This is the length-only analogue of "the new diagonal stays
    // inside the quad" and rejects reflex quads that every per-triangle
    // inequality test would miss.
    let perimeter = mesh.halfedge_length(q.h1n)
        + mesh.halfedge_length(q.h1p)
        + mesh.halfedge_length(q.h2n)
        + mesh.halfedge_length(q.h2p)
        + mesh.length(e);
    let margin = 1e-12 * perimeter * perimeter;
    if geom::cross2(q.pa, q.pd, q.pc) <= margin || geom::cross2(q.pb, q.pc, q.pd) <= margin {
        return None;
    }
    Some(q)
}

/// Whether [`flip_edge`] would succeed on `e`.
pub fn is_flippable(mesh: &IntrinsicMesh, e: EdgeId) -> bool {
    flippable_quad(mesh, e).is_some()
}

/// Flip `e` in place. Returns `None`, leaving the mesh untouched, when the
/// edge is on the boundary, its faces coincide, an endpoint valence is too
/// low, or the flattened quad is not strictly convex.
pub fn flip_edge(mesh: &mut IntrinsicMesh, e: EdgeId) -> Option<FlipRecord> {
    let q = flippable_quad(mesh, e)?;
    let Quad {
        h1,
        h2,
        h1n,
        h1p,
        h2n,
        h2p,
        f1,
        f2,
        pc,
        pd,
        ..
    } = q;
    let c = &mesh.complex;
    let va = c.origin(h1);
    let vb = c.origin(h2);
    let vc = c.origin(h1p);
    let vd = c.origin(h2p);
    let record = FlipRecord {
        edge: e,
        h1,
        h2,
        h1n,
        h1p,
        h2n,
        h2p,
        f1,
        f2,
        edge_anchor: c.halfedge_of_edge(e),
        f1_anchor: c.halfedge_of_face(f1),
        f2_anchor: c.halfedge_of_face(f2),
        va,
        va_anchor: c.halfedge_of_vertex(va),
        vb,
        vb_anchor: c.halfedge_of_vertex(vb),
        old_len: mesh.length(e),
    };

    let c = &mut mesh.complex;
    // The diagonal stops leaving va/vb, so move their anchors onto outgoing
    // halfedges that survive. h1 and h2 are interior, while a boundary
    // vertex anchors on a twinless halfedge, so this never disturbs the
    // boundary-anchor invariant.
    if c.halfedge_of_vertex(va) == h1 {
        c.set_vertex_anchor(va, h2n);
    }
    if c.halfedge_of_vertex(vb) == h2 {
        c.set_vertex_anchor(vb, h1n);
    }
    // New faces: f1 = (a, d, c) cycled [h2n, h1, h1p], f2 = (b, c, d)
    // cycled [h1n, h2, h2p]. The diagonal becomes h1: d -> c, h2: c -> d.
    c.set_origin(h1, vd);
    c.set_origin(h2, vc);
    c.set_next(h2n, h1);
    c.set_next(h1, h1p);
    c.set_next(h1p, h2n);
    c.set_next(h1n, h2);
    c.set_next(h2, h2p);
    c.set_next(h2p, h1n);
    c.set_face(h2n, f1);
    c.set_face(h1n, f2);
    c.set_face_anchor(f1, h1);
    c.set_face_anchor(f2, h2);
    c.set_edge_anchor(e, h1);
    mesh.set_length(e, geom::dist2(pc, pd));
    Some(record)
}

/// Reverse one flip. The mesh must be in exactly the state `flip_edge` left
/// it in; interleaved records must be undone newest first.
pub fn undo_flip(mesh: &mut IntrinsicMesh, r: &FlipRecord) {
    let c = &mut mesh.complex;
    c.set_next(r.h1, r.h1n);
    c.set_next(r.h1n, r.h1p);
    c.set_next(r.h1p, r.h1);
    c.set_next(r.h2, r.h2n);
    c.set_next(r.h2n, r.h2p);
    c.set_next(r.h2p, r.h2);
    c.set_face(r.h2n, r.f2);
    c.set_face(r.h1n, r.f1);
    c.set_origin(r.h1, r.va);
    c.set_origin(r.h2, r.vb);
    c.set_face_anchor(r.f1, r.f1_anchor);
    c.set_face_anchor(r.f2, r.f2_anchor);
    c.set_edge_anchor(r.edge, r.edge_anchor);
    c.set_vertex_anchor(r.va, r.va_anchor);
    c.set_vertex_anchor(r.vb, r.vb_anchor);
    mesh.set_length(r.edge, r.old_len);
}

/// Ordered list of flips, undone newest first.
#[derive(Debug, Default)]
pub struct FlipLog {
    records: Vec<FlipRecord>,
}

impl FlipLog {
    pub fn push(&mut self, r: FlipRecord) {
        self.records.push(r);
    }

    pub fn pop(&mut self) -> Option<FlipRecord> {
        self.records.pop()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[FlipRecord] {
        &self.records
    }

    pub fn clear(&mut self) {
        self.records.clear();
    }
}

/// Undo every flip in `log`, newest first, leaving `log` empty.
pub fn undo_flips(mesh: &mut IntrinsicMesh, log: &mut FlipLog) {
    while let Some(r) = log.pop() {
        undo_flip(mesh, &r);
    }
}

/// Local Delaunay test: the corner angles opposite an interior edge sum to
/// at most `pi + tol`. Boundary edges always pass.
pub fn is_delaunay(mesh: &IntrinsicMesh, e: EdgeId, tol: f64) -> bool {
    let c = mesh.complex();
    let h1 = c.halfedge_of_edge(e);
    let Some(h2) = c.twin(h1) else { return true };
    let sum = mesh.corner_angle_at(c.prev(h1)) + mesh.corner_angle_at(c.prev(h2));
    sum <= std::f64::consts::PI + tol
}

#[derive(Debug, Error)]
#[error("Delaunay retriangulation did not settle within {budget} flips")]
pub struct DelaunayStall {
    pub flips: usize,
    pub budget: usize,
}

/// Flip until every edge satisfies the local Delaunay condition. Returns the
/// number of flips. The flip count is bounded in exact arithmetic; the
/// budget of `50 * edges` guards against a floating-point livelock.
pub fn flip_to_delaunay(mesh: &mut IntrinsicMesh, tol: f64) -> Result<usize, DelaunayStall> {
    let budget = 50 * mesh.complex().num_edges().max(1);
    let mut in_queue = vec![false; mesh.complex().edge_capacity()];
    let mut queue: VecDeque<EdgeId> = VecDeque::new();
    for e in mesh.complex().edges() {
        if !mesh.complex().is_boundary_edge(e) {
            in_queue[e.0] = true;
            queue.push_back(e);
        }
    }
    let mut flips = 0usize;
    while let Some(e) = queue.pop_front() {
        in_queue[e.0] = false;
        if !mesh.complex().edge_alive(e) || is_delaunay(mesh, e, tol) {
            continue;
        }
        // A non-Delaunay edge is flippable in exact arithmetic; with floats
        // the convexity margin can still refuse, in which case the edge is
        // left as is rather than looping on it.
        let Some(rec) = flip_edge(mesh, e) else {
            continue;
        };
        flips += 1;
        if flips > budget {
            return Err(DelaunayStall { flips, budget });
        }
        for h in [rec.h1n, rec.h1p, rec.h2n, rec.h2p] {
            let ne = mesh.complex().edge(h);
            if !in_queue[ne.0] {
                in_queue[ne.0] = true;
                queue.push_back(ne);
            }
        }
    }
    Ok(flips)
}
