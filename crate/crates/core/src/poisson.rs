//! Intrinsic Poisson solves and the coarse-to-fine transfer error.
//!
//! The cotan Laplacian here is assembled purely from edge lengths, so it works
//! on any intrinsic mesh, simplified or not. Fidelity of a simplification is
//! measured by solving the same Poisson problem on the original and the
//! simplified mesh, pulling the coarse solution back through the barycentric
//! mapping, and comparing over the original vertices.

use crate::correspondence::BarycentricMapping;
use crate::mesh::{IntrinsicMesh, VertexId};

const REL_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PoissonError {
    #[error("conjugate gradients stopped after {iterations} iterations at relative residual {relative_residual:.3e}")]
    NotConverged {
        iterations: usize,
        relative_residual: f64,
    },
}

/// Per-edge cotan weight, indexed by edge id. Dead edges and self-edges get
/// zero; a self-edge joins a vertex to itself, so no energy crosses it.
///
/// Each face adjacent to an edge contributes half the cotangent of the corner
/// opposite that edge, written in terms of the three lengths. Individual
/// weights can be negative on non-Delaunay meshes; the assembled operator is
/// still positive semidefinite because it is a sum of per-face energies.
pub fn cotan_weights(mesh: &IntrinsicMesh) -> Vec<f64> {
    let c = mesh.complex();
    let mut w = vec![0.0; c.edge_capacity()];
    for e in c.edges() {
        let h = c.halfedge_of_edge(e);
        if c.origin(h) == c.head(h) {
            continue;
        }
        let mut acc = 0.0;
        for side in [Some(h), c.twin(h)] {
            let Some(s) = side else { continue };
            let lh = mesh.halfedge_length(s);
            let lp = mesh.halfedge_length(c.prev(s));
            let ln = mesh.halfedge_length(c.next(s));
            let area = mesh.face_area(c.face(s)).max(f64::MIN_POSITIVE);
            acc += (lp * lp + ln * ln - lh * lh) / (8.0 * area);
        }
        w[e.0] = acc;
    }
    w
}

/// Compressed sparse rows over the live vertices only. The diagonal entry is
/// always the first slot of its row; doubled edges simply appear as repeated
/// columns, which matvec sums correctly.
struct Csr {
    rows: Vec<VertexId>,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl Csr {
    fn n(&self) -> usize {
        self.rows.len()
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for r in 0..self.n() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.val[k] * x[self.col[k]];
            }
            out[r] = acc;
        }
    }

    /// Connected component label per row, via flood fill on the pattern.
    fn components(&self) -> Vec<usize> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            stack.push(start);
            while let Some(r) = stack.pop() {
                for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                    let q = self.col[k];
                    if comp[q] == usize::MAX {
                        comp[q] = next;
                        stack.push(q);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

fn assemble(mesh: &IntrinsicMesh, weights: &[f64]) -> Csr {
    let c = mesh.complex();
    let mut row_of = vec![usize::MAX; c.vertex_capacity()];
    let mut rows = Vec::with_capacity(c.num_vertices());
    for v in c.vertices() {
        row_of[v.0] = rows.len();
        rows.push(v);
    }
    let n = rows.len();
    let mut counts = vec![1usize; n];
    for e in c.edges() {
        let h = c.halfedge_of_edge(e);
        let i = c.origin(h);
        let j = c.head(h);
        if i == j {
            continue;
        }
        counts[row_of[i.0]] += 1;
        counts[row_of[j.0]] += 1;
    }
    let mut row_ptr = vec![0usize; n + 1];
    for r in 0..n {
        row_ptr[r + 1] = row_ptr[r] + counts[r];
    }
    let nnz = row_ptr[n];
    let mut col = vec![0usize; nnz];
    let mut val = vec![0.0; nnz];
    let mut cursor: Vec<usize> = row_ptr[..n].to_vec();
    for (r, slot) in cursor.iter_mut().enumerate() {
        col[*slot] = r;
        *slot += 1;
    }
    for e in c.edges() {
        let h = c.halfedge_of_edge(e);
        let i = c.origin(h);
        let j = c.head(h);
        if i == j {
            continue;
        }
        let w = weights[e.0];
        let (ri, rj) = (row_of[i.0], row_of[j.0]);
        col[cursor[ri]] = rj;
        val[cursor[ri]] = -w;
        cursor[ri] += 1;
        col[cursor[rj]] = ri;
        val[cursor[rj]] = -w;
        cursor[rj] += 1;
        val[row_ptr[ri]] += w;
        val[row_ptr[rj]] += w;
    }
    Csr {
        rows,
        row_ptr,
        col,
        val,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn subtract_component_means(x: &mut [f64], comp: &[usize], ncomp: usize) {
    let mut sum = vec![0.0; ncomp];
    let mut count = vec![0usize; ncomp];
    for (i, &c) in comp.iter().enumerate() {
        sum[c] += x[i];
        count[c] += 1;
    }
    for (i, &c) in comp.iter().enumerate() {
        x[i] -= sum[c] / count[c] as f64;
    }
}

/// Jacobi-preconditioned conjugate gradients. The matrix is positive
/// semidefinite with the constants as kernel, so this is valid as long as the
/// right-hand side has been projected off the kernel beforehand.
fn conjugate_gradient(csr: &Csr, b: &[f64]) -> Result<Vec<f64>, PoissonError> {
    let n = csr.n();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let inv_diag: Vec<f64> = (0..n)
        .map(|r| {
            let d = csr.val[csr.row_ptr[r]];
            if d.abs() <= 1e-300 {
                1.0
            } else {
                1.0 / d
            }
        })
        .collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let max_iters = 1000.max(20 * n);
    let mut iterations = 0;
    let mut rel = 1.0;
    while iterations < max_iters {
        iterations += 1;
        csr.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = dot(&r, &r).sqrt() / bnorm;
        if rel <= REL_RESIDUAL_TOL {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(PoissonError::NotConverged {
        iterations,
        relative_residual: rel,
    })
}

/// Solve the Poisson problem `L u = b` on the live vertices.
///
/// `rhs` is indexed by vertex id over the full capacity; entries at dead slots
/// are ignored. The right-hand side is shifted to mean zero on each connected
/// component (the compatibility condition), and the returned solution is
/// likewise mean-centered per component, with zeros at dead slots.
pub fn poisson_solve(mesh: &IntrinsicMesh, rhs: &[f64]) -> Result<Vec<f64>, PoissonError> {
    let c = mesh.complex();
    assert_eq!(rhs.len(), c.vertex_capacity(), "rhs indexed by vertex id");
    let weights = cotan_weights(mesh);
    let csr = assemble(mesh, &weights);
    let n = csr.n();
    let mut out = vec![0.0; c.vertex_capacity()];
    if n == 0 {
        return Ok(out);
    }
    let mut b = vec![0.0; n];
    for r in 0..n {
        b[r] = rhs[csr.rows[r].0];
    }
    let comp = csr.components();
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    subtract_component_means(&mut b, &comp, ncomp);
    let mut u = conjugate_gradient(&csr, &b)?;
    subtract_component_means(&mut u, &comp, ncomp);
    for r in 0..n {
        out[csr.rows[r].0] = u[r];
    }
    Ok(out)
}

/// Push a right-hand side through the mapping onto the simplified mesh: live
/// vertices keep their own entry, and each tracked vertex distributes its
/// entry to the corners of its host face by barycentric weight. This is the
/// transpose of barycentric interpolation, so total mass is conserved for
/// every tracked vertex.
pub fn restrict_rhs(
    simplified: &IntrinsicMesh,
    mapping: &BarycentricMapping,
    rhs: &[f64],
) -> Vec<f64> {
    let c = simplified.complex();
    assert_eq!(rhs.len(), c.vertex_capacity(), "rhs indexed by vertex id");
    let mut out = vec![0.0; c.vertex_capacity()];
    for v in c.vertices() {
        out[v.0] = rhs[v.0];
    }
    for (v, point) in mapping.tracked() {
        let corners = c.face_vertices(point.face);
        for k in 0..3 {
            out[corners[k].0] += point.coords[k] * rhs[v.0];
        }
    }
    out
}

/// Barycentric interpolation of a field at one tracked vertex, or None if the
/// vertex is not tracked.
pub fn value_at_tracked(
    simplified: &IntrinsicMesh,
    mapping: &BarycentricMapping,
    field: &[f64],
    v: VertexId,
) -> Option<f64> {
    let point = mapping.get(v)?;
    let corners = simplified.complex().face_vertices(point.face);
    Some((0..3).map(|k| point.coords[k] * field[corners[k].0]).sum())
}

/// Extend a field on the simplified mesh back over the original vertex set:
/// surviving vertices keep their value, tracked vertices interpolate inside
/// their host face. A face may repeat a corner vertex; summing the weighted
/// corners handles that without special cases. Vertices that are neither
/// alive nor tracked stay at the field's dead-slot value of zero.
pub fn extend_to_original(
    simplified: &IntrinsicMesh,
    mapping: &BarycentricMapping,
    field: &[f64],
) -> Vec<f64> {
    let c = simplified.complex();
    assert_eq!(
        field.len(),
        c.vertex_capacity(),
        "field indexed by vertex id"
    );
    let mut out = field.to_vec();
    for (v, point) in mapping.tracked() {
        let corners = c.face_vertices(point.face);
        let mut acc = 0.0;
        for k in 0..3 {
            acc += point.coords[k] * field[corners[k].0];
        }
        out[v.0] = acc;
    }
    out
}

/// Plain mean squared difference over the given vertices. Fields differing by
/// a constant c give c squared; gauge alignment is the solver's job (its
/// solutions come back mean-centered per component), not this function's.
pub fn mse(a: &[f64], b: &[f64], vertices: &[VertexId]) -> f64 {
    assert_eq!(a.len(), b.len());
    if vertices.is_empty() {
        return 0.0;
    }
    let sum: f64 = vertices
        .iter()
        .map(|v| {
            let d = a[v.0] - b[v.0];
            d * d
        })
        .sum();
    sum / vertices.len() as f64
}

/// End-to-end fidelity measure: solve on the original mesh, restrict the same
/// right-hand side to the simplified mesh, solve there, pull the coarse
/// solution back through the mapping, and report the mean squared error over
/// the original live vertices.
///
/// Both meshes must share one vertex id space, i.e. `simplified` was produced
/// by simplifying a clone of `original`. Vertices removed without a tracked
/// mapping contribute their full deviation, so dropping correspondence shows
/// up as error instead of being silently excluded.
pub fn poisson_transfer_mse(
    original: &IntrinsicMesh,
    simplified: &IntrinsicMesh,
    mapping: &BarycentricMapping,
    rhs: &[f64],
) -> Result<f64, PoissonError> {
    debug_assert_eq!(
        original.complex().vertex_capacity(),
        simplified.complex().vertex_capacity(),
        "meshes must share a vertex id space"
    );
    let u_original = poisson_solve(original, rhs)?;
    let restricted = restrict_rhs(simplified, mapping, rhs);
    let u_simplified = poisson_solve(simplified, &restricted)?;
    let extended = extend_to_original(simplified, mapping, &u_simplified);
    let vertices: Vec<VertexId> = original.complex().vertices().collect();
    Ok(mse(&u_original, &extended, &vertices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::flip_edge;
    use crate::simplify::{simplify, SimplifyConfig};
    use crate::testutil::{grid, jittered_grid, tetrahedron};

    /// Applies the operator edge by edge, independently of the CSR assembly.
    fn apply_laplacian(mesh: &IntrinsicMesh, u: &[f64]) -> Vec<f64> {
        let c = mesh.complex();
        let w = cotan_weights(mesh);
        let mut lu = vec![0.0; c.vertex_capacity()];
        for e in c.edges() {
            let h = c.halfedge_of_edge(e);
            let i = c.origin(h);
            let j = c.head(h);
            if i == j {
                continue;
            }
            lu[i.0] += w[e.0] * (u[i.0] - u[j.0]);
            lu[j.0] += w[e.0] * (u[j.0] - u[i.0]);
        }
        lu
    }

    #[test]
    fn grid_weights_match_right_triangles() {
        // Unit right triangles: cot(pi/2) = 0 across diagonals, cot(pi/4) = 1
        // halved per side across axis edges.
        let mesh = grid(3);
        let c = mesh.complex();
        let w = cotan_weights(&mesh);
        for e in c.edges() {
            let h = c.halfedge_of_edge(e);
            let a = c.origin(h).0;
            let b = c.head(h).0;
            let (dx, dy) = ((a % 3).abs_diff(b % 3), (a / 3).abs_diff(b / 3));
            let expect = if dx == 1 && dy == 1 {
                0.0
            } else if c.is_boundary_edge(e) {
                0.5
            } else {
                1.0
            };
            assert!(
                (w[e.0] - expect).abs() < 1e-12,
                "edge {a}-{b}: weight {} expected {expect}",
                w[e.0]
            );
        }
    }

    #[test]
    fn cotan_rows_annihilate_linear_functions() {
        let (mesh, pts) = jittered_grid(6, 0.35, 11);
        let c = mesh.complex();
        let w = cotan_weights(&mesh);
        let mut interior = 0;
        for v in c.vertices() {
            if c.is_boundary_vertex(v) {
                continue;
            }
            interior += 1;
            let mut rx = 0.0;
            let mut ry = 0.0;
            for h in c.outgoing_halfedges(v) {
                let we = w[c.edge(h).0];
                let u = c.head(h);
                rx += we * (pts[u.0][0] - pts[v.0][0]);
                ry += we * (pts[u.0][1] - pts[v.0][1]);
            }
            assert!(
                rx.abs() < 1e-9 && ry.abs() < 1e-9,
                "row {v:?} residual ({rx}, {ry})"
            );
        }
        assert_eq!(interior, 16);
    }

    #[test]
    fn mse_of_constant_offset_is_its_square() {
        let verts: Vec<VertexId> = (0..5).map(VertexId).collect();
        let a = vec![0.25, -1.5, 3.0, 0.0, 2.0];
        let b: Vec<f64> = a.iter().map(|x| x + 0.75).collect();
        assert!((mse(&a, &b, &verts) - 0.5625).abs() < 1e-12);
        assert_eq!(mse(&a, &a, &verts), 0.0);
    }

    #[test]
    fn delaunay_weights_are_nonnegative() {
        use crate::flip::flip_to_delaunay;
        // Interior edges only: a boundary edge is Delaunay by fiat since it
        // cannot flip, yet its single opposite angle may be obtuse (the empty
        // circumdisk can bulge past the hull), giving a negative weight.
        let (mut mesh, _) = jittered_grid(8, 0.35, 4);
        flip_to_delaunay(&mut mesh, 1e-12).unwrap();
        let c = mesh.complex();
        let w = cotan_weights(&mesh);
        let mut interior = 0;
        for e in c.edges() {
            if c.is_boundary_edge(e) {
                continue;
            }
            interior += 1;
            assert!(w[e.0] >= -1e-12, "edge {e:?} weight {}", w[e.0]);
        }
        assert!(interior > 100);

        // On a closed mesh every edge is interior, so the bound is global.
        let tetra = tetrahedron();
        let wt = cotan_weights(&tetra);
        for e in tetra.complex().edges() {
            assert!(wt[e.0] > 0.0);
        }
    }

    #[test]
    fn interpolation_examples() {
        let mesh = grid(3);
        let c = mesh.complex();
        let mut mapping = BarycentricMapping::new(&mesh);
        let f = c.faces().next().unwrap();
        let corners = c.face_vertices(f);
        let mut field = vec![0.0; c.vertex_capacity()];
        field[corners[0].0] = 3.0;
        field[corners[1].0] = 6.0;
        field[corners[2].0] = 9.0;

        mapping.place(VertexId(7), f, [1.0, 0.0, 0.0]);
        assert_eq!(
            value_at_tracked(&mesh, &mapping, &field, VertexId(7)),
            Some(3.0)
        );

        mapping.place(VertexId(8), f, [1.0 / 3.0; 3]);
        let mid = value_at_tracked(&mesh, &mapping, &field, VertexId(8)).unwrap();
        assert!((mid - 6.0).abs() < 1e-12);

        let constant = vec![7.5; c.vertex_capacity()];
        let at = value_at_tracked(&mesh, &mapping, &constant, VertexId(8)).unwrap();
        assert!((at - 7.5).abs() < 1e-12);

        assert_eq!(value_at_tracked(&mesh, &mapping, &field, VertexId(0)), None);
    }

    #[test]
    fn zero_rhs_solves_to_zero() {
        let mesh = grid(4);
        let rhs = vec![0.0; mesh.complex().vertex_capacity()];
        let u = poisson_solve(&mesh, &rhs).unwrap();
        assert!(u.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn spike_solution_is_symmetric_and_converged() {
        let mesh = grid(5);
        let c = mesh.complex();
        let mut rhs = vec![0.0; c.vertex_capacity()];
        rhs[12] = 1.0;
        let u = poisson_solve(&mesh, &rhs).unwrap();

        // The triangulation's diagonals all run the same way, so the symmetry
        // group is generated by the 180 degree turn and the diagonal mirror.
        let id = |x: usize, y: usize| y * 5 + x;
        let orbits: [&[usize]; 5] = [
            &[id(1, 2), id(2, 1), id(3, 2), id(2, 3)],
            &[id(1, 3), id(3, 1)],
            &[id(1, 1), id(3, 3)],
            &[id(0, 0), id(4, 4)],
            &[id(4, 0), id(0, 4)],
        ];
        for orbit in orbits {
            for &v in &orbit[1..] {
                assert!(
                    (u[v] - u[orbit[0]]).abs() < 1e-8,
                    "asymmetry between {v} and {}: {} vs {}",
                    orbit[0],
                    u[v],
                    u[orbit[0]]
                );
            }
        }

        // Residual against the compensated right-hand side, applied through
        // an independent edge-by-edge operator.
        let lu = apply_laplacian(&mesh, &u);
        let mean = 1.0 / 25.0;
        let mut worst = 0.0f64;
        for v in c.vertices() {
            worst = worst.max((lu[v.0] - (rhs[v.0] - mean)).abs());
        }
        assert!(worst < 1e-8, "residual {worst}");
    }

    #[test]
    fn self_edge_carries_no_weight() {
        // Flipping the shared edge of a two-triangle pillow yields a
        // self-edge; the solver must ignore it and still converge.
        let mesh_faces = [[0, 1, 2], [1, 0, 2]];
        let lengths = [[1.0; 3]; 2];
        let mut mesh =
            IntrinsicMesh::from_connectivity_and_lengths(3, &mesh_faces, &lengths).unwrap();
        let w0 = cotan_weights(&mesh);
        let c = mesh.complex();
        for e in c.edges() {
            // two equilateral corners oppose every pillow edge
            assert!((w0[e.0] - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
        let shared = c
            .edges()
            .find(|&e| {
                let h = c.halfedge_of_edge(e);
                let (a, b) = (c.origin(h).0, c.head(h).0);
                a + b == 1
            })
            .unwrap();
        flip_edge(&mut mesh, shared).unwrap();
        let c = mesh.complex();
        let self_edge = c
            .edges()
            .find(|&e| {
                let h = c.halfedge_of_edge(e);
                c.origin(h) == c.head(h)
            })
            .expect("flip should produce a self-edge");
        let w = cotan_weights(&mesh);
        assert_eq!(w[self_edge.0], 0.0);

        let mut rhs = vec![0.0; c.vertex_capacity()];
        rhs[0] = 1.0;
        let u = poisson_solve(&mesh, &rhs).unwrap();
        assert!(u.iter().all(|x| x.is_finite()));
        let lu = apply_laplacian(&mesh, &u);
        let mean = 1.0 / 3.0;
        for v in c.vertices() {
            assert!((lu[v.0] - (rhs[v.0] - mean)).abs() < 1e-9);
        }
    }

    #[test]
    fn disconnected_components_are_balanced_separately() {
        let faces = [[0, 1, 2], [1, 0, 2], [3, 4, 5], [4, 3, 5]];
        let lengths = [[1.0; 3]; 4];
        let mesh = IntrinsicMesh::from_connectivity_and_lengths(6, &faces, &lengths).unwrap();
        let mut rhs = vec![0.0; 6];
        rhs[0] = 1.0;
        rhs[3] = 2.0;
        let u = poisson_solve(&mesh, &rhs).unwrap();
        let lu = apply_laplacian(&mesh, &u);
        for v in 0..3 {
            assert!((lu[v] - (rhs[v] - 1.0 / 3.0)).abs() < 1e-9);
        }
        for v in 3..6 {
            assert!((lu[v] - (rhs[v] - 2.0 / 3.0)).abs() < 1e-9);
        }
        assert!(u[..3].iter().sum::<f64>().abs() < 1e-12);
        assert!(u[3..].iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn identity_transfer_is_exact() {
        // Same mesh, empty mapping: both solves follow the same float path,
        // so the error is zero to the last bit.
        let mesh = grid(4);
        let copy = mesh.clone();
        let mapping = BarycentricMapping::new(&mesh);
        let mut rhs = vec![0.0; 16];
        rhs[5] = 1.0;
        rhs[10] = -0.5;
        let err = poisson_transfer_mse(&mesh, &copy, &mapping, &rhs).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn flat_grid_transfer_stays_small() {
        let original = grid(5);
        let mut mesh = original.clone();
        let outcome = simplify(&mut mesh, &SimplifyConfig::new(1e-8)).unwrap();
        assert_eq!(outcome.report.removed, 9);
        let mapping = outcome.mapping.unwrap();
        let verts: Vec<VertexId> = original.complex().vertices().collect();

        // Smooth load: even with every interior vertex gone, the coarse
        // solve lands within a few percent of the fine one.
        let smooth: Vec<f64> = (0..25).map(|v| (v % 5) as f64 - 2.0).collect();
        let err = poisson_transfer_mse(&original, &mesh, &mapping, &smooth).unwrap();
        let u0 = poisson_solve(&original, &smooth).unwrap();
        let power = mse(&u0, &[0.0; 25], &verts);
        assert!(err > 0.0);
        assert!(
            err < 0.05 * power,
            "smooth transfer error {err} vs power {power}"
        );

        // A point load at the removed center is the worst case: the peak
        // carries most of the signal and nothing in the interior is left to
        // represent it. The transfer must still beat a constant predictor.
        let mut spike = vec![0.0; 25];
        spike[12] = 1.0;
        assert!(mapping.get(VertexId(12)).is_some());
        let err_spike = poisson_transfer_mse(&original, &mesh, &mapping, &spike).unwrap();
        let u0s = poisson_solve(&original, &spike).unwrap();
        let power_spike = mse(&u0s, &[0.0; 25], &verts);
        assert!(
            err_spike < 0.8 * power_spike,
            "spike transfer error {err_spike} vs power {power_spike}"
        );
    }
}
