//! Barycentric tracking of removed vertices.
//!
//! Every vertex removed during simplification is recorded as barycentric
//! coordinates inside a surviving face, so scalar data sampled at the
//! original vertices can be carried through the simplified mesh. Two
//! operations maintain those records:
//!
//! * an edge flip rewrites the diagonal of a quad, and every point hosted in
//!   the two faces is re-expressed in whichever new face contains it;
//! * a vertex removal merges the faces around the vertex, the removed vertex
//!   is assigned coordinates by flattening its neighborhood (conformally
//!   rescaling the spokes so the corner angles sum to a full turn), and
//!   points hosted in the dying faces are rewritten by substituting the
//!   removed vertex's new coordinates into theirs.
//!
//! Coordinates are always stored in the host face's canonical corner order,
//! the cycle starting at the face's anchor halfedge. Faces in a Δ-complex
//! can visit the same vertex twice, so every slot computation here works
//! with halfedges, never with vertex ids.

use std::time::Instant;

use crate::flip::{self, FlipRecord};
use crate::geom::{self, Point2};
use crate::mesh::{EdgeId, FaceId, HalfedgeId, IntrinsicMesh, VertexId};

/// Location of a removed vertex: a host face and barycentric coordinates in
/// that face's canonical corner order. Coordinates are kept nonnegative and
/// normalized to sum to 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarycentricPoint {
    pub face: FaceId,
    pub coords: [f64; 3],
}

/// Forward and reverse index of all tracked removed vertices, plus the time
/// spent maintaining them. The time counter lets callers report how much of
/// a simplification run went into correspondence bookkeeping without
/// threading timers through every call site.
#[derive(Clone, Debug, Default)]
pub struct BarycentricMapping {
    forward: Vec<Option<BarycentricPoint>>,
    hosted: Vec<Vec<VertexId>>,
    maintenance_seconds: f64,
}

impl BarycentricMapping {
    pub fn new(mesh: &IntrinsicMesh) -> Self {
        BarycentricMapping {
            forward: vec![None; mesh.complex().vertex_capacity()],
            hosted: vec![Vec::new(); mesh.complex().face_capacity()],
            maintenance_seconds: 0.0,
        }
    }

    pub fn get(&self, v: VertexId) -> Option<&BarycentricPoint> {
        self.forward.get(v.0).and_then(|p| p.as_ref())
    }

    /// Number of tracked removed vertices.
    pub fn len(&self) -> usize {
        self.forward.iter().filter(|p| p.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.iter().all(|p| p.is_none())
    }

    /// Tracked vertices in id order.
    pub fn tracked(&self) -> impl Iterator<Item = (VertexId, &BarycentricPoint)> {
        self.forward
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.as_ref().map(|p| (VertexId(i), p)))
    }

    /// Vertices currently hosted in `f`.
    pub fn hosted_in(&self, f: FaceId) -> &[VertexId] {
        self.hosted.get(f.0).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Seconds spent in mapping maintenance so far.
    pub fn maintenance_seconds(&self) -> f64 {
        self.maintenance_seconds
    }

    pub(crate) fn add_maintenance(&mut self, seconds: f64) {
        self.maintenance_seconds += seconds;
    }

    pub(crate) fn point(&self, v: VertexId) -> &BarycentricPoint {
        self.forward[v.0].as_ref().expect("vertex is not tracked")
    }

    /// Remove and return the host list of `f`. Entries stay in `forward`;
    /// the caller must `place` or `clear_entry` each one.
    pub(crate) fn take_hosted(&mut self, f: FaceId) -> Vec<VertexId> {
        if f.0 < self.hosted.len() {
            std::mem::take(&mut self.hosted[f.0])
        } else {
            Vec::new()
        }
    }

    /// Set `v`'s record and add it to the host list. The caller is
    /// responsible for having removed `v` from any previous host list.
    pub(crate) fn place(&mut self, v: VertexId, face: FaceId, coords: [f64; 3]) {
        if face.0 >= self.hosted.len() {
            self.hosted.resize(face.0 + 1, Vec::new());
        }
        self.forward[v.0] = Some(BarycentricPoint { face, coords });
        self.hosted[face.0].push(v);
    }

    /// Forget `v` entirely. Only valid after its host list entry was drained.
    pub(crate) fn clear_entry(&mut self, v: VertexId) {
        self.forward[v.0] = None;
    }

    /// Hosted points of the two faces around `e`, lifted to planar positions
    /// in the quad layout frame. Drains the host lists; the matching
    /// [`Self::relocate_after_change`] call re-files every point. `None`
    /// when nothing is hosted there (and nothing was drained).
    pub(crate) fn snapshot_quad(
        &mut self,
        mesh: &IntrinsicMesh,
        e: EdgeId,
    ) -> Option<QuadSnapshot> {
        let c = mesh.complex();
        let h1 = c.halfedge_of_edge(e);
        let h2 = c.twin(h1)?;
        let (f1, f2) = (c.face(h1), c.face(h2));
        if self.hosted_in(f1).is_empty() && self.hosted_in(f2).is_empty() {
            return None;
        }
        let t0 = Instant::now();
        let q = flip::quad_layout(mesh, e).expect("interior edge with distinct faces");
        let snap_frame = QuadSnapshot {
            h1: q.h1,
            h2: q.h2,
            h1n: q.h1n,
            h1p: q.h1p,
            h2n: q.h2n,
            h2p: q.h2p,
            pa: q.pa,
            pb: q.pb,
            pc: q.pc,
            pd: q.pd,
            points: Vec::new(),
        };
        let mut points = Vec::new();
        for f in [f1, f2] {
            let cyc = c.face_halfedges(f);
            let corners = cyc.map(|g| snap_frame.origin_pos(g));
            for v in self.take_hosted(f) {
                let bc = self.point(v).coords;
                let mut p = [0.0, 0.0];
                for m in 0..3 {
                    p[0] += bc[m] * corners[m][0];
                    p[1] += bc[m] * corners[m][1];
                }
                points.push((v, p));
            }
        }
        self.maintenance_seconds += t0.elapsed().as_secs_f64();
        Some(QuadSnapshot {
            points,
            ..snap_frame
        })
    }

    /// Re-express every snapshot point in the two faces now spanning the
    /// quad. Valid right after the one structural change (flip or undo) that
    /// followed the snapshot.
    pub(crate) fn relocate_after_change(&mut self, mesh: &IntrinsicMesh, snap: QuadSnapshot) {
        let t0 = Instant::now();
        let c = mesh.complex();
        let fa = c.face(snap.h1);
        let fb = c.face(snap.h2);
        let ta = snap.current_corners(mesh, fa);
        let tb = snap.current_corners(mesh, fb);
        for (v, p) in &snap.points {
            let ca = geom::barycentric(*p, ta);
            let cb = geom::barycentric(*p, tb);
            let ma = ca[0].min(ca[1]).min(ca[2]);
            let mb = cb[0].min(cb[1]).min(cb[2]);
            // The quad's interior is covered by the two faces under either
            // diagonal; prefer the face the point is deeper inside, ties to
            // the smaller id so the outcome is deterministic.
            let (f, coords, worst) = if (ma - mb).abs() <= 1e-9 {
                if fa.0 <= fb.0 {
                    (fa, ca, ma)
                } else {
                    (fb, cb, mb)
                }
            } else if ma > mb {
                (fa, ca, ma)
            } else {
                (fb, cb, mb)
            };
            assert!(
                worst >= -1e-6,
                "tracked vertex {v} left its quad during a flip (coordinate {worst})"
            );
            self.place(*v, f, geom::clamp_and_normalize(coords));
        }
        self.maintenance_seconds += t0.elapsed().as_secs_f64();
    }
}

/// Planar frame over the two faces around one edge, captured before a flip
/// or an undo, plus the hosted points lifted into that frame. Halfedge
/// labels follow the layout at capture time: `h1` runs `a -> b` along the
/// diagonal with the `face(h1)` apex `c` above and the `face(h2)` apex `d`
/// below.
#[derive(Debug)]
pub(crate) struct QuadSnapshot {
    h1: HalfedgeId,
    h2: HalfedgeId,
    h1n: HalfedgeId,
    h1p: HalfedgeId,
    h2n: HalfedgeId,
    h2p: HalfedgeId,
    pa: Point2,
    pb: Point2,
    pc: Point2,
    pd: Point2,
    points: Vec<(VertexId, Point2)>,
}

impl QuadSnapshot {
    /// Position of `origin(g)` at capture time.
    fn origin_pos(&self, g: HalfedgeId) -> Point2 {
        match g {
            _ if g == self.h1 => self.pa,
            _ if g == self.h1n => self.pb,
            _ if g == self.h1p => self.pc,
            _ if g == self.h2 => self.pb,
            _ if g == self.h2n => self.pa,
            _ if g == self.h2p => self.pd,
            _ => unreachable!("halfedge {g} is not part of the snapshot quad"),
        }
    }

    /// Position of `head(g)` for the four outer halfedges, whose endpoints
    /// never change while the diagonal is rewired.
    fn outer_head_pos(&self, g: HalfedgeId) -> Point2 {
        match g {
            _ if g == self.h1n => self.pc,
            _ if g == self.h1p => self.pa,
            _ if g == self.h2n => self.pd,
            _ if g == self.h2p => self.pb,
            _ => unreachable!("halfedge {g} is not an outer quad halfedge"),
        }
    }

    /// Corner positions of face `f` in its current canonical order. Outer
    /// halfedges keep their origins through any diagonal rewiring; a
    /// diagonal halfedge's origin is the head of its current predecessor,
    /// which is always an outer halfedge.
    fn current_corners(&self, mesh: &IntrinsicMesh, f: FaceId) -> [Point2; 3] {
        let c = mesh.complex();
        c.face_halfedges(f).map(|g| {
            if g == self.h1 || g == self.h2 {
                self.outer_head_pos(c.prev(g))
            } else {
                self.origin_pos(g)
            }
        })
    }
}

/// Flip with mapping maintenance: points hosted in the two faces are
/// re-expressed in the post-flip faces. Behaves like [`flip::flip_edge`]
/// when nothing is hosted there.
pub fn tracked_flip(
    mesh: &mut IntrinsicMesh,
    mapping: &mut BarycentricMapping,
    e: EdgeId,
) -> Option<FlipRecord> {
    if !flip::is_flippable(mesh, e) {
        return None;
    }
    let snap = mapping.snapshot_quad(mesh, e);
    let rec = flip::flip_edge(mesh, e).expect("edge was just checked flippable");
    if let Some(snap) = snap {
        mapping.relocate_after_change(mesh, snap);
    }
    Some(rec)
}

/// Undo with mapping maintenance, the inverse of [`tracked_flip`]. Records
/// must be undone newest first, exactly as in [`flip::undo_flip`].
pub fn tracked_undo(mesh: &mut IntrinsicMesh, mapping: &mut BarycentricMapping, rec: &FlipRecord) {
    let snap = mapping.snapshot_quad(mesh, rec.edge);
    flip::undo_flip(mesh, rec);
    if let Some(snap) = snap {
        mapping.relocate_after_change(mesh, snap);
    }
}

/// Angle sum collected at the center when the three triangles
/// `(s * spokes[t], outer[t], s * spokes[t+1])` are laid side by side.
/// Strictly decreasing in `s` wherever the triangles are nondegenerate.
fn flattened_angle_sum(outer: [f64; 3], spokes: [f64; 3], s: f64) -> f64 {
    (0..3)
        .map(|t| geom::angle_from_lengths(s * spokes[t], s * spokes[(t + 1) % 3], outer[t]))
        .sum()
}

/// Newton refinement of a candidate scale on the angle-sum defect. Writing
/// `cos theta_t = C1 - C2 / s^2` (only the spokes scale) gives the exact
/// derivative `d theta_t / d s = -2 C2 / (s^3 sin theta_t)`, so each step is
/// cheap and the defect drops to rounding level in a few iterations. The
/// quadratic's coefficients suffer heavy cancellation when the spokes are
/// nearly equal, which leaves raw roots too inaccurate for the angle-sum
/// gate below; polishing restores them.
fn polish_scale(outer: [f64; 3], spokes: [f64; 3], mut s: f64) -> f64 {
    for _ in 0..8 {
        let mut f = -2.0 * std::f64::consts::PI;
        let mut df = 0.0;
        for t in 0..3 {
            let (u, v, w) = (spokes[t], spokes[(t + 1) % 3], outer[t]);
            let (su, sv) = (s * u, s * v);
            if !geom::strict_triangle(su, w, sv) {
                return s;
            }
            let cos_t = ((su * su + sv * sv - w * w) / (2.0 * su * sv)).clamp(-1.0, 1.0);
            f += cos_t.acos();
            let sin_t = (1.0 - cos_t * cos_t).sqrt().max(1e-300);
            df -= w * w / (u * v * s * s * s * sin_t);
        }
        if df == 0.0 {
            break;
        }
        let step = f / df;
        let next = s - step;
        if !(next.is_finite() && next > 0.0) {
            break;
        }
        s = next;
        if step.abs() <= 1e-15 * s {
            break;
        }
    }
    s
}

/// A scale validates when all three rescaled triangles are strictly valid
/// and their center angles sum to a full turn.
fn scale_is_valid(outer: [f64; 3], spokes: [f64; 3], s: f64) -> bool {
    if !(s.is_finite() && s > 0.0) {
        return false;
    }
    for t in 0..3 {
        if !geom::strict_triangle(s * spokes[t], outer[t], s * spokes[(t + 1) % 3]) {
            return false;
        }
    }
    (flattened_angle_sum(outer, spokes, s) - 2.0 * std::f64::consts::PI).abs() <= 1e-9
}

/// Common spoke scale that flattens a valence-3 neighborhood.
///
/// `spokes[t]` is the length from the center to ring vertex `t` and
/// `outer[t]` the ring side from vertex `t` to `t+1`. Returns the factor `s`
/// such that scaling all three spokes by `s` makes the center angles sum to
/// exactly a full turn, which is when the center can be placed inside the
/// flattened ring triangle at the scaled distances. `None` when no such
/// scale exists, for instance around a sharp cone point whose total angle
/// cannot reach a full turn. A root pressed against the degeneracy boundary,
/// where a rescaled triangle sits within rounding of collinear, may also
/// come back `None`: coefficient noise in the quadratic swamps the sliver of
/// feasibility, and callers treat the missing scale as a projection failure
/// that leaves the vertex in place.
///
/// Solved in closed form: writing the center position against two ring
/// corners gives two linear equations in the position, and eliminating it
/// from the third distance constraint leaves a quadratic in `s^2`. Each
/// candidate root is Newton-polished on the angle-sum defect, then validated
/// against the triangle inequalities and the angle sum; roots where the
/// constraints hold only with the center outside the ring triangle are
/// rejected there. When both roots validate the one closer to 1 wins.
pub fn conformal_scale(outer: [f64; 3], spokes: [f64; 3]) -> Option<f64> {
    let (a, c, b) = (outer[0], outer[1], outer[2]);
    let (p, q, r) = (spokes[0], spokes[1], spokes[2]);
    let a1 = p * p - q * q;
    let a2 = p * p - r * r;
    let cos_t = ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0);
    let sin2_t = 1.0 - cos_t * cos_t;
    let alpha = b * b * a1 * a1 + a * a * a2 * a2 - 2.0 * a * b * cos_t * a1 * a2;
    let beta = 2.0 * a * a * b * b * (a1 + a2)
        - 2.0 * a * b * cos_t * (a * a * a2 + b * b * a1)
        - 4.0 * a * a * b * b * p * p * sin2_t;
    let gamma = a * a * b * b * c * c;

    let scale = alpha.abs().max(beta.abs()).max(gamma.abs());
    let mut candidates: [Option<f64>; 2] = [None, None];
    if alpha.abs() <= 1e-14 * scale {
        // Degenerate leading coefficient, e.g. all spokes equal. gamma > 0,
        // so a positive root needs beta < 0.
        if beta != 0.0 {
            candidates[0] = Some(-gamma / beta);
        }
    } else {
        // Discriminant with compensated products; the naive form loses it
        // entirely to cancellation near double roots.
        let bb = beta * beta;
        let bb_err = beta.mul_add(beta, -bb);
        let ag = 4.0 * alpha * gamma;
        let ag_err = (4.0 * alpha).mul_add(gamma, -ag);
        let disc = (bb - ag) + (bb_err - ag_err);
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        // Stable form: compute the larger-magnitude root first, derive the
        // other from the product to avoid cancellation.
        let qq = -0.5 * (beta + beta.signum() * sq);
        candidates[0] = Some(qq / alpha);
        if qq != 0.0 {
            candidates[1] = Some(gamma / qq);
        }
    }

    let mut best: Option<f64> = None;
    for x in candidates.into_iter().flatten() {
        if !(x.is_finite() && x > 0.0) {
            continue;
        }
        let s = polish_scale(outer, spokes, x.sqrt());
        if !scale_is_valid(outer, spokes, s) {
            continue;
        }
        best = match best {
            None => Some(s),
            Some(prev) if (s.ln()).abs() < (prev.ln()).abs() => Some(s),
            keep => keep,
        };
    }

    #[cfg(debug_assertions)]
    {
        // Relative distance of the most nearly degenerate rescaled triangle
        // from collinearity. Roots this close to the boundary are beyond the
        // closed form's reach and excused below.
        let feasibility_margin = |s: f64| -> f64 {
            (0..3).fold(f64::INFINITY, |m, t| {
                let (su, sv, w) = (s * spokes[t], s * spokes[(t + 1) % 3], outer[t]);
                let longest = su.max(sv).max(w);
                m.min((su + sv - w).min(w + su - sv).min(w + sv - su) / longest)
            })
        };
        let by_bisection = conformal_scale_bisection(outer, spokes);
        match (best, by_bisection) {
            (Some(s), Some(sb)) => debug_assert!(
                (s - sb).abs() <= 1e-7 * s.max(1.0),
                "closed form {s} disagrees with bisection {sb} for {outer:?} {spokes:?}"
            ),
            (None, Some(sb)) => debug_assert!(
                !scale_is_valid(outer, spokes, sb) || feasibility_margin(sb) < 1e-6,
                "closed form missed the interior root {sb} for {outer:?} {spokes:?}"
            ),
            _ => {}
        }
    }

    best
}

/// Root of the flattening condition by bisection, an independent check on
/// [`conformal_scale`]. The angle sum is monotone nonincreasing in `s`, so
/// the root is bracketed between the smallest scale at which every rescaled
/// triangle closes and the largest at which none is stretched flat.
pub fn conformal_scale_bisection(outer: [f64; 3], spokes: [f64; 3]) -> Option<f64> {
    let full = 2.0 * std::f64::consts::PI;
    let g = |s: f64| flattened_angle_sum(outer, spokes, s) - full;

    let mut lo: f64 = 0.0;
    let mut hi = f64::INFINITY;
    for t in 0..3 {
        let (u, w) = (spokes[t], spokes[(t + 1) % 3]);
        lo = lo.max(outer[t] / (u + w));
        let d = (u - w).abs();
        if d > 0.0 {
            hi = hi.min(outer[t] / d);
        }
    }
    if g(lo) < 0.0 {
        return None;
    }
    if hi.is_finite() {
        if g(hi) > 0.0 {
            return None;
        }
    } else {
        hi = 2.0 * lo.max(1.0);
        let mut rounds = 0;
        while g(hi) > 0.0 {
            hi *= 2.0;
            rounds += 1;
            if rounds > 200 {
                return None;
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Barycentric coordinates of a removed valence-3 vertex inside its
/// flattened ring triangle, ordered like the ring. `s` must come from
/// [`conformal_scale`] on the same lengths. `None` signals a numerically
/// inconsistent layout, which callers treat like a failed projection.
pub fn project_removed_vertex(outer: [f64; 3], spokes: [f64; 3], s: f64) -> Option<[f64; 3]> {
    let x0 = [0.0, 0.0];
    let x1 = [outer[0], 0.0];
    let x2 = geom::apex_position(outer[0], outer[2], outer[1], 1.0);
    let center = geom::apex_position(outer[0], s * spokes[0], s * spokes[1], 1.0);
    // The third distance was not used to place the center; if it disagrees,
    // the scale does not actually flatten this ring.
    let expected = s * spokes[2];
    let got = geom::dist2(center, x2);
    if (got - expected).abs() > 1e-6 * expected.max(1.0) {
        debug_assert!(
            false,
            "flattening layout inconsistent: |ix2| = {got}, expected {expected}"
        );
        return None;
    }
    let coords = geom::barycentric(center, [x0, x1, x2]);
    if coords.iter().any(|&c| c < -1e-9) {
        debug_assert!(
            false,
            "flattened center fell outside its ring triangle: {coords:?}"
        );
        return None;
    }
    Some(geom::clamp_and_normalize(coords))
}

/// Rewrite a point's coordinates when the corner it depends on is replaced
/// by a point of the host triangle. `dependent` is ordered with the removed
/// corner first; its other two entries transfer to host slots `slot_a` and
/// `slot_b`, and the removed corner's share is distributed through
/// `removed`, the removed point's coordinates in the host triangle.
pub fn substitute_dependent(
    dependent: [f64; 3],
    removed: [f64; 3],
    slot_a: usize,
    slot_b: usize,
) -> [f64; 3] {
    let mut out = [0.0; 3];
    out[slot_a] += dependent[1];
    out[slot_b] += dependent[2];
    for m in 0..3 {
        out[m] += dependent[0] * removed[m];
    }
    out
}
