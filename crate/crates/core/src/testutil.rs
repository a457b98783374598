//! Small mesh builders shared by unit tests.

use crate::geom::{dist2, Point2};
use crate::mesh::{EdgeId, IntrinsicMesh};
use crate::synthetic;

/// Grid with vertices shaken in the plane; returns the mesh and the planar
/// positions the lengths came from.
pub(crate) fn jittered_grid(n: usize, amplitude: f64, seed: u64) -> (IntrinsicMesh, Vec<Point2>) {
    let soup = synthetic::jittered_grid(n, amplitude, seed);
    let pts2 = soup.positions.iter().map(|p| [p[0], p[1]]).collect();
    (soup.mesh(), pts2)
}

/// Regular tetrahedron with unit edges; every corner has defect pi.
pub(crate) fn tetrahedron() -> IntrinsicMesh {
    synthetic::tetrahedron().mesh()
}

/// n x n vertex grid in the z = 0 plane, unit spacing.
pub(crate) fn grid(n: usize) -> IntrinsicMesh {
    synthetic::grid(n).mesh()
}

/// Two faces over the diagonal (a, b) of a planar quad, with the apex of the
/// first face above the diagonal and the apex of the second below. Returns
/// the mesh and its single interior edge. The corner layout matches the one
/// `flip_edge` reconstructs from lengths.
pub(crate) fn planar_quad(
    pa: Point2,
    pb: Point2,
    pc: Point2,
    pd: Point2,
) -> (IntrinsicMesh, EdgeId) {
    let sides = [
        [dist2(pa, pb), dist2(pb, pc), dist2(pc, pa)],
        [dist2(pb, pa), dist2(pa, pd), dist2(pd, pb)],
    ];
    let mesh =
        IntrinsicMesh::from_connectivity_and_lengths(4, &[[0, 1, 2], [1, 0, 3]], &sides).unwrap();
    let c = mesh.complex();
    let e = c
        .edges()
        .find(|&e| !c.is_boundary_edge(e))
        .expect("quad has one interior edge");
    (mesh, e)
}
