//! Curvature-guided vertex removal.
//!
//! Vertices whose Gaussian curvature magnitude is strictly below a threshold
//! are brought to removable valence with intrinsic edge flips (3 interior, 2
//! on the boundary), then removed. Interior removal merges the three ring
//! faces into one; boundary removal cuts the ear face off. With tracking
//! enabled, each removed vertex is projected into the merged face through a
//! conformal flattening of its ring, and every previously removed vertex
//! hosted in a dying face is rewritten in place, so the mapping always refers
//! to live faces of the current mesh.
//!
//! Candidates are processed in order of increasing curvature magnitude.
//! Failed candidates are deferred and retried after the mesh has changed;
//! the loop stops on the first full pass that removes nothing.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use crate::correspondence::{
    conformal_scale, project_removed_vertex, substitute_dependent, tracked_flip, tracked_undo,
    BarycentricMapping,
};
use crate::flip::{flip_edge, is_delaunay, is_flippable, undo_flip, FlipLog};
use crate::geom::{clamp_and_normalize, strict_triangle};
use crate::mesh::{EdgeId, FaceId, HalfedgeId, IntrinsicMesh, VertexId};

/// Why a candidate vertex was not removed. Most reasons are transient: the
/// candidate is retried after other removals have changed its neighborhood.
/// `ValenceLowerBound` is permanent, since flips preserve curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RemovalFailure {
    /// Interior vertex with fewer than three incident edges; nothing to flip.
    LowValence,
    /// A self-edge at the vertex; the ring structure is not a simple fan.
    SelfEdge,
    /// Curvature rules out the removable valence: a valence-3 interior corner
    /// sum stays under `3 * pi` and a valence-2 boundary corner under `pi`,
    /// so interior candidates with `kappa <= -pi` and boundary candidates
    /// with `kappa <= 0` can never reach removable shape.
    ValenceLowerBound,
    /// No spoke edge at the vertex admitted a flip.
    NoFlippableEdge,
    /// The per-vertex flip budget ran out before reaching removable valence.
    AttemptsExhausted,
    /// The merged face the removal would create violates the strict triangle
    /// inequality.
    TriangleInequality,
    /// The boundary ear's interior side has no neighbor face to host the
    /// removed vertex (an isolated triangle).
    BoundaryTopology,
    /// The ring does not flatten: no conformal scale reproduces a full
    /// angle of `2 * pi` around the vertex.
    ProjectionFailure,
}

impl fmt::Display for RemovalFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RemovalFailure::LowValence => "valence too low to form a removable pattern",
            RemovalFailure::SelfEdge => "self-edge at the vertex",
            RemovalFailure::ValenceLowerBound => "curvature excludes removable valence",
            RemovalFailure::NoFlippableEdge => "no spoke edge was flippable",
            RemovalFailure::AttemptsExhausted => "flip budget exhausted",
            RemovalFailure::TriangleInequality => "merged face violates the triangle inequality",
            RemovalFailure::BoundaryTopology => "ear face has no interior neighbor",
            RemovalFailure::ProjectionFailure => "ring does not flatten around the vertex",
        };
        f.write_str(s)
    }
}

/// What to do when a removal is geometrically sound but the removed vertex
/// cannot be projected into the merged face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionFailurePolicy {
    /// Undo the candidate's flips and retry it later. Keeps the mapping
    /// total over removed vertices.
    #[default]
    UndoAndRequeue,
    /// Remove the vertex anyway without a mapping entry, dropping any
    /// previously tracked vertices hosted in the merged faces.
    RemoveUntracked,
}

/// Knobs for [`simplify`]. `new` picks the defaults used throughout; fields
/// are public so callers can adjust them directly.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplifyConfig {
    /// Strict curvature threshold: only vertices with `|kappa| < kappa_max`
    /// are candidates.
    pub kappa_max: f64,
    /// Maintain barycentric coordinates for removed vertices.
    pub track_mappings: bool,
    /// Slack for the opposite-angle Delaunay test.
    pub delaunay_tolerance: f64,
    /// Flip budget per candidate; `None` means ten times its valence.
    pub max_flip_attempts_per_vertex: Option<usize>,
    /// Flip the whole mesh to Delaunay before looking at candidates.
    pub initial_delaunay: bool,
    pub on_projection_failure: ProjectionFailurePolicy,
    /// Shuffles the processing order of equal-curvature candidates.
    pub seed: Option<u64>,
    /// Record the edge id of every committed flip in the report.
    pub record_flipped_edges: bool,
}

impl SimplifyConfig {
    pub fn new(kappa_max: f64) -> Self {
        SimplifyConfig {
            kappa_max,
            track_mappings: true,
            delaunay_tolerance: 1e-10,
            max_flip_attempts_per_vertex: None,
            initial_delaunay: true,
            on_projection_failure: ProjectionFailurePolicy::default(),
            seed: None,
            record_flipped_edges: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimplifyError {
    #[error("delaunay repair did not settle after {flips} flips (budget {budget})")]
    DelaunayStall { flips: usize, budget: usize },
}

/// Counters and invariant snapshots from one [`simplify`] run. Failure
/// counts are events, not vertices: a deferred candidate that fails again in
/// a later round contributes each time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimplifyReport {
    pub vertices_before: usize,
    pub vertices_after: usize,
    /// Vertices below the curvature threshold before any removal.
    pub removable_initial: usize,
    /// Distinct vertices that reached candidate processing.
    pub candidates_encountered: usize,
    pub removed: usize,
    pub failures: BTreeMap<RemovalFailure, usize>,
    pub curvature_sum_before: f64,
    pub curvature_sum_after: f64,
    pub euler_before: i64,
    pub euler_after: i64,
    pub boundary_loops_before: usize,
    pub boundary_loops_after: usize,
    /// Full passes over the candidate queue, including the final empty one.
    pub rounds: usize,
    pub delaunay_flips_initial: usize,
    /// Wall-clock spent outside mapping maintenance.
    pub remove_seconds: f64,
    /// Wall-clock spent maintaining barycentric coordinates.
    pub track_seconds: f64,
    pub total_seconds: f64,
    /// Edge ids of committed flips, in order, when requested.
    pub flipped_edges: Option<Vec<EdgeId>>,
}

/// Result of [`simplify`]: the mapping (when tracking was on) plus counters.
#[derive(Debug)]
pub struct SimplifyOutcome {
    pub mapping: Option<BarycentricMapping>,
    pub report: SimplifyReport,
}

const STALE_CURVATURE_TOL: f64 = 1e-12;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    mag: f64,
    tie: u64,
    vertex: VertexId,
    epoch: u64,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.mag
            .total_cmp(&other.mag)
            .then_with(|| self.tie.cmp(&other.tie))
            .then_with(|| self.vertex.0.cmp(&other.vertex.0))
            .then_with(|| self.epoch.cmp(&other.epoch))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Min-heap over curvature magnitude with lazy invalidation. Entries carry
/// the epoch of their vertex at push time; bumping the epoch strands every
/// older entry, which is dropped when popped.
struct CurvatureQueue {
    heap: BinaryHeap<Reverse<Entry>>,
    epochs: Vec<u64>,
    seed: Option<u64>,
}

impl CurvatureQueue {
    fn new(vertex_capacity: usize, seed: Option<u64>) -> Self {
        CurvatureQueue {
            heap: BinaryHeap::new(),
            epochs: vec![0; vertex_capacity],
            seed,
        }
    }

    fn tie(&self, v: VertexId) -> u64 {
        match self.seed {
            Some(s) => splitmix64(s.wrapping_add(v.0 as u64)),
            None => v.0 as u64,
        }
    }

    fn push(&mut self, v: VertexId, mag: f64) {
        let entry = Entry {
            mag,
            tie: self.tie(v),
            vertex: v,
            epoch: self.epochs[v.0],
        };
        self.heap.push(Reverse(entry));
    }

    fn bump_and_push(&mut self, mesh: &IntrinsicMesh, v: VertexId) {
        self.epochs[v.0] += 1;
        self.push(v, mesh.gaussian_curvature(v).abs());
    }

    /// Next live candidate strictly below the threshold. Entries whose
    /// stored magnitude has drifted are reinserted with the current value so
    /// ordering stays faithful.
    fn pop_candidate(&mut self, mesh: &IntrinsicMesh, kappa_max: f64) -> Option<VertexId> {
        while let Some(Reverse(entry)) = self.heap.pop() {
            let v = entry.vertex;
            if !mesh.complex().vertex_alive(v) || entry.epoch != self.epochs[v.0] {
                continue;
            }
            let mag = mesh.gaussian_curvature(v).abs();
            if (mag - entry.mag).abs() > STALE_CURVATURE_TOL {
                self.push(v, mag);
                continue;
            }
            if mag >= kappa_max {
                continue;
            }
            return Some(v);
        }
        None
    }
}

/// The fan around an interior valence-3 vertex `v`. For each sector `t`,
/// `spokes[t]` runs `v -> ring[t]`, `outer[t] = next(spokes[t])` runs
/// `ring[t] -> ring[t+1]`, and `rears[t] = next(outer[t])` closes the face.
struct InteriorRing {
    spokes: [HalfedgeId; 3],
    outer: [HalfedgeId; 3],
    rears: [HalfedgeId; 3],
    ring: [VertexId; 3],
    faces: [FaceId; 3],
    spoke_edges: [EdgeId; 3],
    spoke_lens: [f64; 3],
    outer_lens: [f64; 3],
}

fn interior_ring(mesh: &IntrinsicMesh, v: VertexId) -> InteriorRing {
    let c = mesh.complex();
    let out = c.outgoing_halfedges(v);
    debug_assert_eq!(out.len(), 3, "interior removal needs valence 3");
    let spokes = [out[0], out[1], out[2]];
    let mut ring = InteriorRing {
        spokes,
        outer: spokes,
        rears: spokes,
        ring: [v; 3],
        faces: [c.face(spokes[0]); 3],
        spoke_edges: [c.edge(spokes[0]); 3],
        spoke_lens: [0.0; 3],
        outer_lens: [0.0; 3],
    };
    for t in 0..3 {
        let s = spokes[t];
        let o = c.next(s);
        let r = c.next(o);
        debug_assert_eq!(c.next(r), s);
        debug_assert_eq!(
            c.twin(r),
            Some(spokes[(t + 1) % 3]),
            "fan faces share spokes in order"
        );
        ring.outer[t] = o;
        ring.rears[t] = r;
        ring.ring[t] = c.origin(o);
        ring.faces[t] = c.face(s);
        ring.spoke_edges[t] = c.edge(s);
        ring.spoke_lens[t] = mesh.halfedge_length(s);
        ring.outer_lens[t] = mesh.halfedge_length(o);
    }
    ring
}

/// Replace the three fan faces around `v` with one face over the outer
/// halfedges, then free the fan. Slot `t` of the new face is `ring[t]`.
fn remove_interior_valence3(mesh: &mut IntrinsicMesh, v: VertexId, ring: &InteriorRing) -> FaceId {
    // The dying outgoing halfedge at ring[t] is rears[(t + 2) % 3]; move the
    // anchor onto the surviving outer halfedge. Boundary anchors are
    // twinless and rears all have twins, so this never breaks that invariant.
    for t in 0..3 {
        if mesh.complex.halfedge_of_vertex(ring.ring[t]) == ring.rears[(t + 2) % 3] {
            mesh.complex.set_vertex_anchor(ring.ring[t], ring.outer[t]);
        }
    }
    let f_new = mesh.complex.alloc_face(ring.outer[0]);
    for t in 0..3 {
        mesh.complex
            .set_next(ring.outer[t], ring.outer[(t + 1) % 3]);
        mesh.complex.set_face(ring.outer[t], f_new);
    }
    for t in 0..3 {
        mesh.complex.free_halfedge(ring.spokes[t]);
        mesh.complex.free_halfedge(ring.rears[t]);
        mesh.complex.free_edge(ring.spoke_edges[t]);
        mesh.complex.free_face(ring.faces[t]);
    }
    mesh.complex.free_vertex(v);
    f_new
}

/// The single face at a boundary valence-2 vertex `v`. The cycle is
/// `s: v -> j`, `o: j -> l`, `rear: l -> v`, with `s` and `rear` on the
/// boundary and `host = twin(o)` the surviving neighbor across the rim.
struct BoundaryEar {
    s: HalfedgeId,
    o: HalfedgeId,
    rear: HalfedgeId,
    host: HalfedgeId,
    j: VertexId,
    l: VertexId,
    face: FaceId,
    len_vj: f64,
    len_lv: f64,
}

fn boundary_ear(mesh: &IntrinsicMesh, v: VertexId) -> Result<BoundaryEar, RemovalFailure> {
    let c = mesh.complex();
    debug_assert!(c.is_boundary_vertex(v));
    debug_assert_eq!(c.vertex_valence(v), 2, "boundary removal needs valence 2");
    let s = c.halfedge_of_vertex(v);
    debug_assert!(c.twin(s).is_none());
    let o = c.next(s);
    let rear = c.next(o);
    debug_assert_eq!(c.next(rear), s);
    debug_assert!(
        c.twin(rear).is_none(),
        "a valence-2 ear has both rim sides on the boundary"
    );
    let host = c.twin(o).ok_or(RemovalFailure::BoundaryTopology)?;
    Ok(BoundaryEar {
        s,
        o,
        rear,
        host,
        j: c.origin(o),
        l: c.origin(rear),
        face: c.face(s),
        len_vj: mesh.halfedge_length(s),
        len_lv: mesh.halfedge_length(rear),
    })
}

/// Cut the ear face off, promoting `host` to a boundary halfedge.
fn remove_boundary_valence2(mesh: &mut IntrinsicMesh, v: VertexId, ear: &BoundaryEar) {
    let edge_s = mesh.complex.edge(ear.s);
    let edge_o = mesh.complex.edge(ear.o);
    let edge_rear = mesh.complex.edge(ear.rear);
    mesh.complex.set_twin(ear.host, None);
    mesh.complex.set_edge_anchor(edge_o, ear.host);
    // l's boundary anchor was rear; host is its new twinless outgoing
    // halfedge. j's anchor is twinless and so never the dying o.
    debug_assert_eq!(mesh.complex.halfedge_of_vertex(ear.l), ear.rear);
    mesh.complex.set_vertex_anchor(ear.l, ear.host);
    mesh.complex.free_halfedge(ear.s);
    mesh.complex.free_halfedge(ear.o);
    mesh.complex.free_halfedge(ear.rear);
    mesh.complex.free_edge(edge_s);
    mesh.complex.free_edge(edge_rear);
    mesh.complex.free_face(ear.face);
    mesh.complex.free_vertex(v);
}

/// Flip every queued edge that fails the opposite-angle test until none is
/// left, enqueueing the quad sides of each flip. Seeds may be stale; dead
/// edges are skipped. Mapping maintenance rides along when tracking is on.
fn delaunay_pass(
    mesh: &mut IntrinsicMesh,
    mapping: &mut Option<BarycentricMapping>,
    seeds: Vec<EdgeId>,
    tolerance: f64,
    flipped: &mut Option<Vec<EdgeId>>,
) -> Result<usize, SimplifyError> {
    let mut in_queue = vec![false; mesh.complex().edge_capacity()];
    let mut queue = VecDeque::new();
    for e in seeds {
        if !in_queue[e.0] {
            in_queue[e.0] = true;
            queue.push_back(e);
        }
    }
    let budget = 50 * mesh.complex().num_edges().max(1);
    let mut flips = 0;
    while let Some(e) = queue.pop_front() {
        in_queue[e.0] = false;
        if !mesh.complex().edge_alive(e)
            || is_delaunay(mesh, e, tolerance)
            || !is_flippable(mesh, e)
        {
            continue;
        }
        if flips >= budget {
            return Err(SimplifyError::DelaunayStall { flips, budget });
        }
        let rec = match mapping.as_mut() {
            Some(m) => tracked_flip(mesh, m, e),
            None => flip_edge(mesh, e),
        }
        .expect("edge was just checked flippable");
        flips += 1;
        if let Some(sink) = flipped.as_mut() {
            sink.push(e);
        }
        for h in [rec.h1n, rec.h1p, rec.h2n, rec.h2p] {
            let e2 = mesh.complex().edge(h);
            if !in_queue[e2.0] {
                in_queue[e2.0] = true;
                queue.push_back(e2);
            }
        }
    }
    Ok(flips)
}

enum Step {
    Removed,
    Deferred(RemovalFailure),
    Unremovable(RemovalFailure),
}

struct Driver<'a> {
    mesh: &'a mut IntrinsicMesh,
    config: &'a SimplifyConfig,
    mapping: Option<BarycentricMapping>,
    queue: CurvatureQueue,
    report: SimplifyReport,
    encountered: Vec<bool>,
    flipped: Option<Vec<EdgeId>>,
}

impl Driver<'_> {
    fn count_failure(&mut self, f: RemovalFailure) {
        *self.report.failures.entry(f).or_insert(0) += 1;
    }

    fn rollback(&mut self, log: &mut FlipLog) {
        while let Some(rec) = log.pop() {
            match self.mapping.as_mut() {
                Some(m) => tracked_undo(self.mesh, m, &rec),
                None => undo_flip(self.mesh, &rec),
            }
        }
    }

    /// Flip spokes at `v` until its valence drops to `target`. Each flip
    /// replaces a spoke with a chord between ring neighbors, so valence
    /// strictly decreases; spokes are tried in fan order from the anchor.
    fn reduce(
        &mut self,
        v: VertexId,
        target: usize,
        log: &mut FlipLog,
    ) -> Result<(), RemovalFailure> {
        let max_attempts = self
            .config
            .max_flip_attempts_per_vertex
            .unwrap_or_else(|| 10 * self.mesh.complex().vertex_valence(v));
        let mut attempts = 0;
        while self.mesh.complex().vertex_valence(v) > target {
            let mut progressed = false;
            for s in self.mesh.complex().outgoing_halfedges(v) {
                let e = self.mesh.complex().edge(s);
                if !is_flippable(self.mesh, e) {
                    continue;
                }
                if attempts >= max_attempts {
                    return Err(RemovalFailure::AttemptsExhausted);
                }
                let rec = match self.mapping.as_mut() {
                    Some(m) => tracked_flip(self.mesh, m, e),
                    None => flip_edge(self.mesh, e),
                }
                .expect("edge was just checked flippable");
                log.push(rec);
                attempts += 1;
                progressed = true;
                break;
            }
            if !progressed {
                return Err(RemovalFailure::NoFlippableEdge);
            }
        }
        Ok(())
    }

    /// Commit the candidate's flips and restore the Delaunay condition
    /// around the wound: the merged face plus every committed flip's quad.
    fn commit_and_repair(&mut self, mut log: FlipLog, f: FaceId) -> Result<(), SimplifyError> {
        let c = self.mesh.complex();
        let mut seeds: Vec<EdgeId> = c.face_halfedges(f).iter().map(|&h| c.edge(h)).collect();
        for rec in log.records() {
            if c.edge_alive(rec.edge) {
                seeds.push(rec.edge);
            }
            for h in [rec.h1n, rec.h1p, rec.h2n, rec.h2p] {
                if c.halfedge_alive(h) {
                    seeds.push(c.edge(h));
                }
            }
        }
        if let Some(sink) = self.flipped.as_mut() {
            sink.extend(log.records().iter().map(|rec| rec.edge));
        }
        log.clear();
        delaunay_pass(
            self.mesh,
            &mut self.mapping,
            seeds,
            self.config.delaunay_tolerance,
            &mut self.flipped,
        )?;
        Ok(())
    }

    fn finish_interior(&mut self, v: VertexId, mut log: FlipLog) -> Result<Step, SimplifyError> {
        let ring = interior_ring(self.mesh, v);
        if !strict_triangle(ring.outer_lens[0], ring.outer_lens[1], ring.outer_lens[2]) {
            self.rollback(&mut log);
            return Ok(Step::Deferred(RemovalFailure::TriangleInequality));
        }
        let mut projection_failed = false;
        let mut center = None;
        let mut moved: Vec<(VertexId, [f64; 3])> = Vec::new();
        if let Some(map) = self.mapping.as_mut() {
            let t0 = Instant::now();
            center = conformal_scale(ring.outer_lens, ring.spoke_lens)
                .and_then(|s| project_removed_vertex(ring.outer_lens, ring.spoke_lens, s));
            match center {
                Some(c) => {
                    // Rewrite dependents hosted in the dying faces. Their
                    // coordinates are rotated spoke-first, so slot 0 is the
                    // corner at v and slots 1, 2 are ring[t], ring[t + 1],
                    // which land in slots t and t + 1 of the merged face.
                    for t in 0..3 {
                        let cyc = self.mesh.complex().face_halfedges(ring.faces[t]);
                        let idx = cyc
                            .iter()
                            .position(|&h| h == ring.spokes[t])
                            .expect("spoke lies in its fan face");
                        for w in map.take_hosted(ring.faces[t]) {
                            let old = map.point(w).coords;
                            let rot = [old[idx], old[(idx + 1) % 3], old[(idx + 2) % 3]];
                            moved.push((w, substitute_dependent(rot, c, t, (t + 1) % 3)));
                        }
                    }
                }
                None => projection_failed = true,
            }
            map.add_maintenance(t0.elapsed().as_secs_f64());
        }
        if projection_failed {
            match self.config.on_projection_failure {
                ProjectionFailurePolicy::UndoAndRequeue => {
                    self.rollback(&mut log);
                    return Ok(Step::Deferred(RemovalFailure::ProjectionFailure));
                }
                ProjectionFailurePolicy::RemoveUntracked => {
                    self.count_failure(RemovalFailure::ProjectionFailure);
                    let map = self
                        .mapping
                        .as_mut()
                        .expect("projection only runs when tracking");
                    let t0 = Instant::now();
                    for t in 0..3 {
                        for w in map.take_hosted(ring.faces[t]) {
                            map.clear_entry(w);
                        }
                    }
                    map.add_maintenance(t0.elapsed().as_secs_f64());
                }
            }
        }
        let f_new = remove_interior_valence3(self.mesh, v, &ring);
        if let (Some(map), Some(c)) = (self.mapping.as_mut(), center) {
            let t0 = Instant::now();
            map.place(v, f_new, c);
            for (w, coords) in moved.drain(..) {
                map.place(w, f_new, clamp_and_normalize(coords));
            }
            map.add_maintenance(t0.elapsed().as_secs_f64());
        }
        self.commit_and_repair(log, f_new)?;
        for x in ring.ring {
            self.queue.bump_and_push(&*self.mesh, x);
        }
        Ok(Step::Removed)
    }

    fn finish_boundary(&mut self, v: VertexId, mut log: FlipLog) -> Result<Step, SimplifyError> {
        let ear = match boundary_ear(self.mesh, v) {
            Ok(ear) => ear,
            Err(f) => {
                self.rollback(&mut log);
                return Ok(Step::Deferred(f));
            }
        };
        let host_face = self.mesh.complex().face(ear.host);
        let cyc = self.mesh.complex().face_halfedges(host_face);
        let slot_l = cyc
            .iter()
            .position(|&h| h == ear.host)
            .expect("host lies in its face");
        let slot_j = (slot_l + 1) % 3;
        // Flattening the ear folds v onto the segment j-l; the scale that
        // does it puts v at arc length len_vj from j, hence this weight on l.
        let u = ear.len_vj / (ear.len_vj + ear.len_lv);
        let mut center = [0.0; 3];
        center[slot_l] = u;
        center[slot_j] = 1.0 - u;
        let mut moved: Vec<(VertexId, [f64; 3])> = Vec::new();
        if let Some(map) = self.mapping.as_mut() {
            let t0 = Instant::now();
            let ear_cyc = self.mesh.complex().face_halfedges(ear.face);
            let idx = ear_cyc
                .iter()
                .position(|&h| h == ear.s)
                .expect("ear anchor lies in its face");
            for w in map.take_hosted(ear.face) {
                let old = map.point(w).coords;
                let rot = [old[idx], old[(idx + 1) % 3], old[(idx + 2) % 3]];
                moved.push((w, substitute_dependent(rot, center, slot_j, slot_l)));
            }
            map.add_maintenance(t0.elapsed().as_secs_f64());
        }
        remove_boundary_valence2(self.mesh, v, &ear);
        if let Some(map) = self.mapping.as_mut() {
            let t0 = Instant::now();
            map.place(v, host_face, center);
            for (w, coords) in moved.drain(..) {
                map.place(w, host_face, clamp_and_normalize(coords));
            }
            map.add_maintenance(t0.elapsed().as_secs_f64());
        }
        self.commit_and_repair(log, host_face)?;
        self.queue.bump_and_push(&*self.mesh, ear.j);
        if ear.l != ear.j {
            self.queue.bump_and_push(&*self.mesh, ear.l);
        }
        Ok(Step::Removed)
    }

    fn process(&mut self, v: VertexId) -> Result<Step, SimplifyError> {
        let c = self.mesh.complex();
        let boundary = c.is_boundary_vertex(v);
        if !boundary && c.vertex_valence(v) < 3 {
            return Ok(Step::Deferred(RemovalFailure::LowValence));
        }
        if c.has_self_edge(v) {
            return Ok(Step::Deferred(RemovalFailure::SelfEdge));
        }
        let kappa = self.mesh.gaussian_curvature(v);
        if (!boundary && kappa <= -PI) || (boundary && kappa <= 0.0) {
            return Ok(Step::Unremovable(RemovalFailure::ValenceLowerBound));
        }
        let target = if boundary { 2 } else { 3 };
        let mut log = FlipLog::default();
        if let Err(f) = self.reduce(v, target, &mut log) {
            self.rollback(&mut log);
            return Ok(Step::Deferred(f));
        }
        if boundary {
            self.finish_boundary(v, log)
        } else {
            self.finish_interior(v, log)
        }
    }
}

/// Remove every vertex the curvature threshold and local geometry allow.
/// The mesh is modified in place; the outcome carries the mapping from
/// removed vertices to barycentric coordinates in surviving faces (when
/// tracking is on) and the run's counters.
pub fn simplify(
    mesh: &mut IntrinsicMesh,
    config: &SimplifyConfig,
) -> Result<SimplifyOutcome, SimplifyError> {
    let t_start = Instant::now();
    let mut report = SimplifyReport {
        vertices_before: mesh.complex().num_vertices(),
        curvature_sum_before: mesh.curvature_sum(),
        euler_before: mesh.complex().euler_characteristic(),
        boundary_loops_before: mesh.complex().boundary_loop_count(),
        ..SimplifyReport::default()
    };
    let mut flipped = config.record_flipped_edges.then(Vec::new);
    let mut mapping = None;
    if config.initial_delaunay {
        let seeds: Vec<EdgeId> = mesh.complex().edges().collect();
        report.delaunay_flips_initial = delaunay_pass(
            mesh,
            &mut mapping,
            seeds,
            config.delaunay_tolerance,
            &mut flipped,
        )?;
    }
    if config.track_mappings {
        mapping = Some(BarycentricMapping::new(mesh));
    }
    report.removable_initial = mesh
        .complex()
        .vertices()
        .filter(|&v| mesh.gaussian_curvature(v).abs() < config.kappa_max)
        .count();
    let mut queue = CurvatureQueue::new(mesh.complex().vertex_capacity(), config.seed);
    for v in mesh.complex().vertices() {
        queue.push(v, mesh.gaussian_curvature(v).abs());
    }
    let encountered = vec![false; mesh.complex().vertex_capacity()];
    let mut driver = Driver {
        mesh,
        config,
        mapping,
        queue,
        report,
        encountered,
        flipped,
    };
    let mut deferred: Vec<(VertexId, RemovalFailure)> = Vec::new();
    loop {
        driver.report.rounds += 1;
        let mut removed_this_round = 0;
        while let Some(v) = driver.queue.pop_candidate(&*driver.mesh, config.kappa_max) {
            if !driver.encountered[v.0] {
                driver.encountered[v.0] = true;
                driver.report.candidates_encountered += 1;
            }
            match driver.process(v)? {
                Step::Removed => {
                    driver.report.removed += 1;
                    removed_this_round += 1;
                }
                Step::Deferred(f) => {
                    driver.count_failure(f);
                    deferred.push((v, f));
                }
                Step::Unremovable(f) => {
                    driver.count_failure(f);
                }
            }
        }
        if removed_this_round == 0 || deferred.is_empty() {
            break;
        }
        for (v, _) in deferred.drain(..) {
            // a deferral can be followed by a successful removal within the
            // same round once a neighbor's removal requeues the vertex
            if driver.mesh.complex().vertex_alive(v) {
                driver.queue.bump_and_push(&*driver.mesh, v);
            }
        }
    }
    let mut report = driver.report;
    report.vertices_after = driver.mesh.complex().num_vertices();
    report.curvature_sum_after = driver.mesh.curvature_sum();
    report.euler_after = driver.mesh.complex().euler_characteristic();
    report.boundary_loops_after = driver.mesh.complex().boundary_loop_count();
    report.total_seconds = t_start.elapsed().as_secs_f64();
    report.track_seconds = driver
        .mapping
        .as_ref()
        .map_or(0.0, |m| m.maintenance_seconds());
    report.remove_seconds = (report.total_seconds - report.track_seconds).max(0.0);
    report.flipped_edges = driver.flipped;
    Ok(SimplifyOutcome {
        mapping: driver.mapping,
        report,
    })
}
