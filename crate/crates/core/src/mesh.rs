//! Δ-complex halfedge mesh with intrinsic edge lengths.
//!
//! Connectivity is a halfedge structure over a generalized triangulation:
//! an edge may connect a vertex to itself and two faces may share several
//! edges, as long as every face keeps three distinct halfedges. The metric
//! is carried entirely by per-edge lengths; vertex positions are used only
//! while building and are not stored.
//!
//! Element records live in index-addressed vectors with free lists, so
//! removing elements is O(1) and the ids of surviving elements never move.
//! Downstream bookkeeping (removed-vertex mappings, flip logs) relies on
//! that stability.

use std::collections::HashMap;

use thiserror::Error;

use crate::geom;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub usize);

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Vertex id; equal to the input vertex index for built meshes and
    /// stable across simplification.
    VertexId
);
id_type!(
    /// Halfedge id. Each face owns three; boundary edges have a single one.
    HalfedgeId
);
id_type!(
    /// Edge id. A flipped edge keeps its id; its length and endpoints change.
    EdgeId
);
id_type!(
    /// Face id. New faces created by vertex removal take fresh ids.
    FaceId
);

#[derive(Clone, Debug, PartialEq)]
struct HalfedgeRec {
    next: HalfedgeId,
    twin: Option<HalfedgeId>,
    origin: VertexId,
    edge: EdgeId,
    face: FaceId,
    alive: bool,
}

#[derive(Clone, Debug, PartialEq)]
struct VertexRec {
    /// An outgoing halfedge. For boundary vertices this is always the
    /// outgoing halfedge that lies on a boundary edge, so that rotation
    /// sweeps the whole fan.
    halfedge: HalfedgeId,
    boundary: bool,
    alive: bool,
}

#[derive(Clone, Debug, PartialEq)]
struct EdgeRec {
    halfedge: HalfedgeId,
    alive: bool,
}

#[derive(Clone, Debug, PartialEq)]
struct FaceRec {
    halfedge: HalfedgeId,
    alive: bool,
}

/// Pure connectivity of a triangulated Δ-complex.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DeltaComplex {
    halfedges: Vec<HalfedgeRec>,
    vertices: Vec<VertexRec>,
    edges: Vec<EdgeRec>,
    faces: Vec<FaceRec>,
    free_faces: Vec<usize>,
    live_vertices: usize,
    live_edges: usize,
    live_faces: usize,
    live_halfedges: usize,
}

/// Per-edge metric. Indexed by [`EdgeId`]; entries of dead edges are stale.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EdgeLengths {
    values: Vec<f64>,
}

impl EdgeLengths {
    #[inline]
    pub fn get(&self, e: EdgeId) -> f64 {
        self.values[e.0]
    }

    #[inline]
    pub(crate) fn set(&mut self, e: EdgeId, len: f64) {
        self.values[e.0] = len;
    }
}

/// A triangulated Δ-complex together with its edge lengths.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct IntrinsicMesh {
    pub(crate) complex: DeltaComplex,
    pub(crate) lengths: EdgeLengths,
}

/// Construction failures. All variants carry enough context to point at the
/// offending input element.
#[derive(Debug, Error)]
pub enum BuildError {
    #[error("face {face} references vertex {index} but only {count} vertices were given")]
    InvalidIndex {
        face: usize,
        index: usize,
        count: usize,
    },
    #[error("face {face} has a zero-length side ({v0}, {v1})")]
    ZeroLengthEdge { face: usize, v0: usize, v1: usize },
    #[error("face {face} violates the strict triangle inequality ({lengths:?})")]
    DegenerateFace { face: usize, lengths: [f64; 3] },
    #[error("directed edge ({v0}, {v1}) appears in more than one face; the mesh is non-manifold or inconsistently oriented")]
    InconsistentOrientation { v0: usize, v1: usize },
    #[error("vertex {vertex} is non-manifold: its faces do not form a single fan")]
    NonManifoldVertex { vertex: usize },
    #[error("mesh has no faces")]
    Empty,
}

const INVALID: usize = usize::MAX;

impl DeltaComplex {
    // ------------------------------------------------------------------
    // Raw accessors. Callers are expected to pass live ids; dead ids are a
    // programming error and panic in debug builds via the index checks.
    // ------------------------------------------------------------------

    #[inline]
    pub fn next(&self, h: HalfedgeId) -> HalfedgeId {
        self.halfedges[h.0].next
    }

    #[inline]
    pub fn prev(&self, h: HalfedgeId) -> HalfedgeId {
        self.next(self.next(h))
    }

    #[inline]
    pub fn twin(&self, h: HalfedgeId) -> Option<HalfedgeId> {
        self.halfedges[h.0].twin
    }

    #[inline]
    pub fn origin(&self, h: HalfedgeId) -> VertexId {
        self.halfedges[h.0].origin
    }

    /// Vertex the halfedge points at.
    #[inline]
    pub fn head(&self, h: HalfedgeId) -> VertexId {
        self.origin(self.next(h))
    }

    #[inline]
    pub fn edge(&self, h: HalfedgeId) -> EdgeId {
        self.halfedges[h.0].edge
    }

    #[inline]
    pub fn face(&self, h: HalfedgeId) -> FaceId {
        self.halfedges[h.0].face
    }

    #[inline]
    pub fn halfedge_of_edge(&self, e: EdgeId) -> HalfedgeId {
        self.edges[e.0].halfedge
    }

    #[inline]
    pub fn halfedge_of_face(&self, f: FaceId) -> HalfedgeId {
        self.faces[f.0].halfedge
    }

    #[inline]
    pub fn halfedge_of_vertex(&self, v: VertexId) -> HalfedgeId {
        self.vertices[v.0].halfedge
    }

    #[inline]
    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.vertices[v.0].boundary
    }

    #[inline]
    pub fn is_boundary_edge(&self, e: EdgeId) -> bool {
        self.twin(self.halfedge_of_edge(e)).is_none()
    }

    #[inline]
    pub fn vertex_alive(&self, v: VertexId) -> bool {
        v.0 < self.vertices.len() && self.vertices[v.0].alive
    }

    #[inline]
    pub fn edge_alive(&self, e: EdgeId) -> bool {
        e.0 < self.edges.len() && self.edges[e.0].alive
    }

    #[inline]
    pub fn face_alive(&self, f: FaceId) -> bool {
        f.0 < self.faces.len() && self.faces[f.0].alive
    }

    #[inline]
    pub fn halfedge_alive(&self, h: HalfedgeId) -> bool {
        h.0 < self.halfedges.len() && self.halfedges[h.0].alive
    }

    pub fn num_vertices(&self) -> usize {
        self.live_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.live_edges
    }

    pub fn num_faces(&self) -> usize {
        self.live_faces
    }

    pub fn num_halfedges(&self) -> usize {
        self.live_halfedges
    }

    /// Upper bound (exclusive) on vertex ids ever allocated.
    pub fn vertex_capacity(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_capacity(&self) -> usize {
        self.edges.len()
    }

    pub fn face_capacity(&self) -> usize {
        self.faces.len()
    }

    // ------------------------------------------------------------------
    // Iteration
    // ------------------------------------------------------------------

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, r)| r.alive)
            .map(|(i, _)| VertexId(i))
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, r)| r.alive)
            .map(|(i, _)| EdgeId(i))
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, r)| r.alive)
            .map(|(i, _)| FaceId(i))
    }

    /// The three halfedges of a face in cycle order, starting at the face's
    /// anchor halfedge. This order defines the face's canonical corner order
    /// used by barycentric coordinates and the mesh file format.
    pub fn face_halfedges(&self, f: FaceId) -> [HalfedgeId; 3] {
        let h0 = self.halfedge_of_face(f);
        let h1 = self.next(h0);
        [h0, h1, self.next(h1)]
    }

    /// Corner vertices of a face in canonical order. Corners may repeat in a
    /// Δ-complex; use [`Self::face_halfedges`] when identity matters.
    pub fn face_vertices(&self, f: FaceId) -> [VertexId; 3] {
        let hs = self.face_halfedges(f);
        [self.origin(hs[0]), self.origin(hs[1]), self.origin(hs[2])]
    }

    /// Rotate an outgoing halfedge counterclockwise around its origin.
    /// Returns `None` when the rotation crosses the boundary.
    #[inline]
    pub fn rotate_ccw(&self, h: HalfedgeId) -> Option<HalfedgeId> {
        self.twin(self.prev(h))
    }

    /// All outgoing halfedges of `v`, one per incident face corner.
    ///
    /// Starts at the vertex anchor; for boundary vertices the anchor lies on
    /// the boundary, so the sweep covers the whole fan before running out of
    /// twins. Terminates on any mesh satisfying the single-fan invariant.
    pub fn outgoing_halfedges(&self, v: VertexId) -> Vec<HalfedgeId> {
        debug_assert!(self.vertex_alive(v), "fan walk on dead {v:?}");
        let start = self.halfedge_of_vertex(v);
        let mut out = Vec::with_capacity(6);
        let mut h = start;
        loop {
            out.push(h);
            assert!(
                out.len() <= self.halfedges.len(),
                "fan walk at {v:?} did not close (start {start:?})"
            );
            match self.rotate_ccw(h) {
                Some(nh) if nh != start => h = nh,
                _ => break,
            }
        }
        out
    }

    /// Number of edge incidences at `v`; a self-edge counts twice.
    pub fn vertex_valence(&self, v: VertexId) -> usize {
        let corners = self.outgoing_halfedges(v).len();
        corners + usize::from(self.is_boundary_vertex(v))
    }

    /// True if any incident edge connects `v` to itself. Both halfedges of a
    /// self-edge originate at `v`, so checking heads of outgoing ones is
    /// exhaustive.
    pub fn has_self_edge(&self, v: VertexId) -> bool {
        self.outgoing_halfedges(v)
            .iter()
            .any(|&h| self.head(h) == v)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.live_vertices as i64 - self.live_edges as i64 + self.live_faces as i64
    }

    /// Number of boundary loops, traced independently of the vertex anchors.
    pub fn boundary_loop_count(&self) -> usize {
        let mut visited = vec![false; self.halfedges.len()];
        let mut loops = 0;
        for (i, rec) in self.halfedges.iter().enumerate() {
            if !rec.alive || rec.twin.is_some() || visited[i] {
                continue;
            }
            loops += 1;
            // Walk the boundary: from a twinless halfedge v->w, the next
            // boundary halfedge is w's outgoing twinless halfedge, found by
            // rotating clockwise from next(h).
            let mut h = HalfedgeId(i);
            loop {
                visited[h.0] = true;
                let mut g = self.next(h);
                while let Some(t) = self.twin(g) {
                    g = self.next(t);
                }
                h = g;
                if visited[h.0] {
                    break;
                }
            }
        }
        loops
    }

    // ------------------------------------------------------------------
    // Mutation primitives (crate-internal)
    // ------------------------------------------------------------------

    #[inline]
    pub(crate) fn set_next(&mut self, h: HalfedgeId, next: HalfedgeId) {
        self.halfedges[h.0].next = next;
    }

    #[inline]
    pub(crate) fn set_origin(&mut self, h: HalfedgeId, v: VertexId) {
        self.halfedges[h.0].origin = v;
    }

    #[inline]
    pub(crate) fn set_face(&mut self, h: HalfedgeId, f: FaceId) {
        self.halfedges[h.0].face = f;
    }

    #[inline]
    pub(crate) fn set_twin(&mut self, h: HalfedgeId, twin: Option<HalfedgeId>) {
        self.halfedges[h.0].twin = twin;
    }

    #[inline]
    pub(crate) fn set_face_anchor(&mut self, f: FaceId, h: HalfedgeId) {
        self.faces[f.0].halfedge = h;
    }

    #[inline]
    pub(crate) fn set_edge_anchor(&mut self, e: EdgeId, h: HalfedgeId) {
        self.edges[e.0].halfedge = h;
    }

    #[inline]
    pub(crate) fn set_vertex_anchor(&mut self, v: VertexId, h: HalfedgeId) {
        self.vertices[v.0].halfedge = h;
    }

    pub(crate) fn alloc_face(&mut self, h: HalfedgeId) -> FaceId {
        self.live_faces += 1;
        if let Some(i) = self.free_faces.pop() {
            self.faces[i] = FaceRec {
                halfedge: h,
                alive: true,
            };
            FaceId(i)
        } else {
            self.faces.push(FaceRec {
                halfedge: h,
                alive: true,
            });
            FaceId(self.faces.len() - 1)
        }
    }

    pub(crate) fn free_face(&mut self, f: FaceId) {
        debug_assert!(self.faces[f.0].alive);
        self.faces[f.0].alive = false;
        self.free_faces.push(f.0);
        self.live_faces -= 1;
    }

    pub(crate) fn free_edge(&mut self, e: EdgeId) {
        debug_assert!(self.edges[e.0].alive);
        self.edges[e.0].alive = false;
        self.live_edges -= 1;
    }

    pub(crate) fn free_vertex(&mut self, v: VertexId) {
        debug_assert!(self.vertices[v.0].alive);
        self.vertices[v.0].alive = false;
        self.live_vertices -= 1;
    }

    pub(crate) fn free_halfedge(&mut self, h: HalfedgeId) {
        debug_assert!(self.halfedges[h.0].alive);
        self.halfedges[h.0].alive = false;
        self.live_halfedges -= 1;
    }
}

impl IntrinsicMesh {
    /// Build from vertex positions and triangles, deriving edge lengths from
    /// the Euclidean distances. Rejects non-manifold or inconsistently
    /// oriented input and degenerate faces. Vertex and face ids equal the
    /// input indices; vertices referenced by no face are left dead.
    pub fn build_from_extrinsic(
        positions: &[[f64; 3]],
        faces: &[[usize; 3]],
    ) -> Result<IntrinsicMesh, BuildError> {
        let mut sides = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            let mut s = [0.0; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                for &idx in &[a, b] {
                    if idx >= positions.len() {
                        return Err(BuildError::InvalidIndex {
                            face: fi,
                            index: idx,
                            count: positions.len(),
                        });
                    }
                }
                let (p, q) = (positions[a], positions[b]);
                let d =
                    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
                if d <= 0.0 {
                    return Err(BuildError::ZeroLengthEdge {
                        face: fi,
                        v0: a,
                        v1: b,
                    });
                }
                s[k] = d;
            }
            sides.push(s);
        }
        Self::from_face_sides(positions.len(), faces, &sides)
    }

    /// Build from connectivity plus explicit per-face side lengths; side `k`
    /// of face `(v0, v1, v2)` runs from `v[k]` to `v[(k+1) % 3]`. Sides are
    /// glued by matching opposite directed vertex pairs, so faces with
    /// repeated vertices are not expressible here; such configurations only
    /// arise through simplification or the mesh file format.
    pub fn from_connectivity_and_lengths(
        num_vertices: usize,
        faces: &[[usize; 3]],
        side_lengths: &[[f64; 3]],
    ) -> Result<IntrinsicMesh, BuildError> {
        assert_eq!(faces.len(), side_lengths.len());
        Self::from_face_sides(num_vertices, faces, side_lengths)
    }

    fn from_face_sides(
        num_vertices: usize,
        faces: &[[usize; 3]],
        sides: &[[f64; 3]],
    ) -> Result<IntrinsicMesh, BuildError> {
        if faces.is_empty() {
            return Err(BuildError::Empty);
        }
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                if f[k] >= num_vertices {
                    return Err(BuildError::InvalidIndex {
                        face: fi,
                        index: f[k],
                        count: num_vertices,
                    });
                }
                if sides[fi][k] <= 0.0 {
                    return Err(BuildError::ZeroLengthEdge {
                        face: fi,
                        v0: f[k],
                        v1: f[(k + 1) % 3],
                    });
                }
            }
            let s = sides[fi];
            if !geom::strict_triangle(s[0], s[1], s[2]) {
                return Err(BuildError::DegenerateFace {
                    face: fi,
                    lengths: s,
                });
            }
        }

        let mut complex = DeltaComplex {
            halfedges: Vec::with_capacity(faces.len() * 3),
            vertices: vec![
                VertexRec {
                    halfedge: HalfedgeId(INVALID),
                    boundary: false,
                    alive: false
                };
                num_vertices
            ],
            edges: Vec::new(),
            faces: Vec::with_capacity(faces.len()),
            free_faces: Vec::new(),
            live_vertices: 0,
            live_edges: 0,
            live_faces: 0,
            live_halfedges: 0,
        };
        let mut lengths = EdgeLengths::default();

        // Face k owns halfedges 3k, 3k+1, 3k+2.
        for (fi, f) in faces.iter().enumerate() {
            let base = fi * 3;
            for k in 0..3 {
                complex.halfedges.push(HalfedgeRec {
                    next: HalfedgeId(base + (k + 1) % 3),
                    twin: None,
                    origin: VertexId(f[k]),
                    edge: EdgeId(INVALID),
                    face: FaceId(fi),
                    alive: true,
                });
            }
            complex.faces.push(FaceRec {
                halfedge: HalfedgeId(base),
                alive: true,
            });
        }
        complex.live_faces = faces.len();
        complex.live_halfedges = faces.len() * 3;

        // Glue twins by directed vertex pair. A repeated directed pair means
        // either a third face on the edge or a flipped orientation.
        let mut directed: HashMap<(usize, usize), HalfedgeId> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let key = (f[k], f[(k + 1) % 3]);
                if directed.insert(key, HalfedgeId(fi * 3 + k)).is_some() {
                    return Err(BuildError::InconsistentOrientation {
                        v0: key.0,
                        v1: key.1,
                    });
                }
            }
        }
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let h = HalfedgeId(fi * 3 + k);
                if complex.halfedges[h.0].edge.0 != INVALID {
                    continue;
                }
                let twin = directed.get(&(f[(k + 1) % 3], f[k])).copied();
                let e = EdgeId(complex.edges.len());
                complex.edges.push(EdgeRec {
                    halfedge: h,
                    alive: true,
                });
                lengths.values.push(sides[fi][k]);
                complex.halfedges[h.0].edge = e;
                if let Some(t) = twin {
                    complex.halfedges[h.0].twin = Some(t);
                    complex.halfedges[t.0].twin = Some(h);
                    complex.halfedges[t.0].edge = e;
                }
            }
        }
        complex.live_edges = complex.edges.len();

        // Vertex records: boundary flag, anchor, single-fan check.
        let mut corner_count = vec![0usize; num_vertices];
        let mut boundary_out: Vec<Option<HalfedgeId>> = vec![None; num_vertices];
        let mut any_out: Vec<Option<HalfedgeId>> = vec![None; num_vertices];
        for (i, rec) in complex.halfedges.iter().enumerate() {
            let v = rec.origin.0;
            corner_count[v] += 1;
            any_out[v].get_or_insert(HalfedgeId(i));
            if rec.twin.is_none() {
                if boundary_out[v].is_some() {
                    // Two boundary wedges meeting at one vertex.
                    return Err(BuildError::NonManifoldVertex { vertex: v });
                }
                boundary_out[v] = Some(HalfedgeId(i));
            }
        }
        for v in 0..num_vertices {
            let Some(any) = any_out[v] else { continue };
            let anchor = boundary_out[v].unwrap_or(any);
            complex.vertices[v] = VertexRec {
                halfedge: anchor,
                boundary: boundary_out[v].is_some(),
                alive: true,
            };
            complex.live_vertices += 1;
            if complex.outgoing_halfedges(VertexId(v)).len() != corner_count[v] {
                return Err(BuildError::NonManifoldVertex { vertex: v });
            }
        }

        Ok(IntrinsicMesh { complex, lengths })
    }

    /// Assemble a mesh directly from parsed records: per-face corner vertex
    /// ids, per-side twins as `(face index, side index)`, and per-side
    /// lengths. This is the only construction path that admits self-edges.
    pub(crate) fn from_raw_faces(
        num_vertices: usize,
        corners: &[[usize; 3]],
        twins: &[[Option<(usize, usize)>; 3]],
        sides: &[[f64; 3]],
    ) -> Result<IntrinsicMesh, BuildError> {
        if corners.is_empty() {
            return Err(BuildError::Empty);
        }
        for (fi, s) in sides.iter().enumerate() {
            if !geom::strict_triangle(s[0], s[1], s[2]) {
                return Err(BuildError::DegenerateFace {
                    face: fi,
                    lengths: *s,
                });
            }
        }
        let mut complex = DeltaComplex::default();
        let mut lengths = EdgeLengths::default();
        complex.vertices = vec![
            VertexRec {
                halfedge: HalfedgeId(INVALID),
                boundary: false,
                alive: false
            };
            num_vertices
        ];
        for (fi, f) in corners.iter().enumerate() {
            let base = fi * 3;
            for k in 0..3 {
                if f[k] >= num_vertices {
                    return Err(BuildError::InvalidIndex {
                        face: fi,
                        index: f[k],
                        count: num_vertices,
                    });
                }
                complex.halfedges.push(HalfedgeRec {
                    next: HalfedgeId(base + (k + 1) % 3),
                    twin: None,
                    origin: VertexId(f[k]),
                    edge: EdgeId(INVALID),
                    face: FaceId(fi),
                    alive: true,
                });
            }
            complex.faces.push(FaceRec {
                halfedge: HalfedgeId(base),
                alive: true,
            });
        }
        complex.live_faces = corners.len();
        complex.live_halfedges = corners.len() * 3;

        for (fi, per_side) in twins.iter().enumerate() {
            for (k, t) in per_side.iter().enumerate() {
                let h = HalfedgeId(fi * 3 + k);
                if complex.halfedges[h.0].edge.0 != INVALID {
                    continue;
                }
                let e = EdgeId(complex.edges.len());
                complex.edges.push(EdgeRec {
                    halfedge: h,
                    alive: true,
                });
                lengths.values.push(sides[fi][k]);
                complex.halfedges[h.0].edge = e;
                if let Some((tf, ts)) = *t {
                    if tf >= corners.len() || ts >= 3 {
                        return Err(BuildError::InvalidIndex {
                            face: fi,
                            index: tf,
                            count: corners.len(),
                        });
                    }
                    let th = HalfedgeId(tf * 3 + ts);
                    complex.halfedges[h.0].twin = Some(th);
                    complex.halfedges[th.0].twin = Some(h);
                    complex.halfedges[th.0].edge = e;
                }
            }
        }
        complex.live_edges = complex.edges.len();

        let mut corner_count = vec![0usize; num_vertices];
        let mut boundary_out: Vec<Option<HalfedgeId>> = vec![None; num_vertices];
        let mut any_out: Vec<Option<HalfedgeId>> = vec![None; num_vertices];
        for (i, rec) in complex.halfedges.iter().enumerate() {
            let v = rec.origin.0;
            corner_count[v] += 1;
            any_out[v].get_or_insert(HalfedgeId(i));
            if rec.twin.is_none() && boundary_out[v].replace(HalfedgeId(i)).is_some() {
                return Err(BuildError::NonManifoldVertex { vertex: v });
            }
        }
        for v in 0..num_vertices {
            let Some(any) = any_out[v] else { continue };
            complex.vertices[v] = VertexRec {
                halfedge: boundary_out[v].unwrap_or(any),
                boundary: boundary_out[v].is_some(),
                alive: true,
            };
            complex.live_vertices += 1;
            if complex.outgoing_halfedges(VertexId(v)).len() != corner_count[v] {
                return Err(BuildError::NonManifoldVertex { vertex: v });
            }
        }
        Ok(IntrinsicMesh { complex, lengths })
    }

    #[inline]
    pub fn complex(&self) -> &DeltaComplex {
        &self.complex
    }

    #[inline]
    pub fn length(&self, e: EdgeId) -> f64 {
        self.lengths.get(e)
    }

    #[inline]
    pub fn lengths(&self) -> &EdgeLengths {
        &self.lengths
    }

    #[inline]
    pub(crate) fn set_length(&mut self, e: EdgeId, len: f64) {
        self.lengths.set(e, len);
    }

    /// Side length of the halfedge's edge.
    #[inline]
    pub fn halfedge_length(&self, h: HalfedgeId) -> f64 {
        self.lengths.get(self.complex.edge(h))
    }

    /// Interior angle of `face(h)` at `origin(h)`, from lengths alone.
    pub fn corner_angle_at(&self, h: HalfedgeId) -> f64 {
        let c = &self.complex;
        geom::angle_from_lengths(
            self.halfedge_length(h),
            self.halfedge_length(c.prev(h)),
            self.halfedge_length(c.next(h)),
        )
    }

    /// Interior angle of `face` at the corner `v`. Panics if `v` is not a
    /// corner of `face`; with repeated corners the first matching corner in
    /// canonical order is used.
    pub fn corner_angle(&self, face: FaceId, v: VertexId) -> f64 {
        let h = self
            .complex
            .face_halfedges(face)
            .into_iter()
            .find(|&h| self.complex.origin(h) == v)
            .expect("vertex is not a corner of the face");
        self.corner_angle_at(h)
    }

    /// Face area by Heron's formula; the radicand is clamped at zero.
    pub fn face_area(&self, f: FaceId) -> f64 {
        let hs = self.complex.face_halfedges(f);
        geom::area_from_lengths(
            self.halfedge_length(hs[0]),
            self.halfedge_length(hs[1]),
            self.halfedge_length(hs[2]),
        )
    }

    pub fn total_area(&self) -> f64 {
        self.complex.faces().map(|f| self.face_area(f)).sum()
    }

    /// Discrete Gaussian curvature: the angle defect `2π - Σθ` at interior
    /// vertices and the geodesic defect `π - Σθ` at boundary vertices, so a
    /// straight boundary vertex scores zero.
    pub fn gaussian_curvature(&self, v: VertexId) -> f64 {
        let sum: f64 = self
            .complex
            .outgoing_halfedges(v)
            .iter()
            .map(|&h| self.corner_angle_at(h))
            .sum();
        if self.complex.is_boundary_vertex(v) {
            std::f64::consts::PI - sum
        } else {
            2.0 * std::f64::consts::PI - sum
        }
    }

    /// Sum of Gaussian curvature over all live vertices.
    pub fn curvature_sum(&self) -> f64 {
        self.complex
            .vertices()
            .map(|v| self.gaussian_curvature(v))
            .sum()
    }

    /// Exhaustive structural check. Intended for tests and debugging; cost
    /// is linear in the mesh, so call sites in hot paths gate it.
    pub fn check_invariants(&self) {
        let c = &self.complex;
        let mut live_h = 0;
        for (i, rec) in c.halfedges.iter().enumerate() {
            if !rec.alive {
                continue;
            }
            live_h += 1;
            let h = HalfedgeId(i);
            assert!(c.halfedge_alive(rec.next), "next of {h} is dead");
            assert_eq!(
                c.next(c.next(rec.next)),
                h,
                "halfedge {h} is not in a 3-cycle"
            );
            assert!(c.face_alive(rec.face), "face of {h} is dead");
            assert!(c.edge_alive(rec.edge), "edge of {h} is dead");
            assert!(c.vertex_alive(rec.origin), "origin of {h} is dead");
            if let Some(t) = rec.twin {
                assert!(c.halfedge_alive(t), "twin of {h} is dead");
                assert_eq!(c.twin(t), Some(h), "twin involution broken at {h}");
                assert_eq!(c.edge(t), rec.edge, "twins of {h} disagree on edge");
            }
            // Cycle consistency: next shares the face.
            assert_eq!(c.face(rec.next), rec.face);
        }
        assert_eq!(live_h, c.live_halfedges);

        let mut live_e = 0;
        for (i, rec) in c.edges.iter().enumerate() {
            if !rec.alive {
                continue;
            }
            live_e += 1;
            let e = EdgeId(i);
            assert!(c.halfedge_alive(rec.halfedge), "anchor of edge {e} is dead");
            assert_eq!(
                c.edge(rec.halfedge),
                e,
                "anchor of edge {e} points elsewhere"
            );
            assert!(
                self.lengths.get(e) > 0.0,
                "edge {e} has non-positive length"
            );
        }
        assert_eq!(live_e, c.live_edges);

        let mut live_f = 0;
        for (i, rec) in c.faces.iter().enumerate() {
            if !rec.alive {
                continue;
            }
            live_f += 1;
            let f = FaceId(i);
            assert!(c.halfedge_alive(rec.halfedge));
            assert_eq!(c.face(rec.halfedge), f);
            let hs = c.face_halfedges(f);
            assert!(hs[0] != hs[1] && hs[1] != hs[2] && hs[0] != hs[2]);
            let (a, b, cc) = (
                self.halfedge_length(hs[0]),
                self.halfedge_length(hs[1]),
                self.halfedge_length(hs[2]),
            );
            assert!(
                geom::strict_triangle(a, b, cc),
                "face {f} violates the triangle inequality: {a} {b} {cc}"
            );
        }
        assert_eq!(live_f, c.live_faces);

        let mut live_v = 0;
        let mut corner_count = vec![0usize; c.vertices.len()];
        for rec in c.halfedges.iter().filter(|r| r.alive) {
            corner_count[rec.origin.0] += 1;
        }
        for (i, rec) in c.vertices.iter().enumerate() {
            if !rec.alive {
                continue;
            }
            live_v += 1;
            let v = VertexId(i);
            assert!(
                c.halfedge_alive(rec.halfedge),
                "anchor of vertex {v} is dead"
            );
            assert_eq!(
                c.origin(rec.halfedge),
                v,
                "anchor of vertex {v} points elsewhere"
            );
            if rec.boundary {
                assert!(
                    c.twin(rec.halfedge).is_none(),
                    "boundary vertex {v} anchor is not on the boundary"
                );
            }
            assert_eq!(
                c.outgoing_halfedges(v).len(),
                corner_count[i],
                "vertex {v} fan does not cover all corners"
            );
        }
        assert_eq!(live_v, c.live_vertices);
    }
}
