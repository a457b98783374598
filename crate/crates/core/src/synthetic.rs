//! Procedural meshes for tests, benchmarks, and the command line.
//!
//! Extrinsic shapes come back as a `TriangleSoup` so callers can keep the
//! embedding (for OBJ export or position oracles) next to the intrinsic mesh
//! built from it. The two shapes without a meaningful embedding, the pillow
//! and the prescribed-angle wheel, construct their metric directly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::mesh::IntrinsicMesh;

/// Vertex positions plus triangle corner indices.
#[derive(Clone, Debug)]
pub struct TriangleSoup {
    pub positions: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

impl TriangleSoup {
    pub fn mesh(&self) -> IntrinsicMesh {
        IntrinsicMesh::build_from_extrinsic(&self.positions, &self.faces)
            .expect("generator produces a valid complex")
    }
}

fn grid_faces(n: usize) -> Vec<[usize; 3]> {
    let at = |x: usize, y: usize| y * n + x;
    let mut faces = Vec::with_capacity(2 * (n - 1) * (n - 1));
    for y in 0..n - 1 {
        for x in 0..n - 1 {
            faces.push([at(x, y), at(x + 1, y), at(x + 1, y + 1)]);
            faces.push([at(x, y), at(x + 1, y + 1), at(x, y + 1)]);
        }
    }
    faces
}

fn height_grid(n: usize, mut z: impl FnMut(f64, f64) -> f64) -> TriangleSoup {
    let mut positions = Vec::with_capacity(n * n);
    for y in 0..n {
        for x in 0..n {
            let (xf, yf) = (x as f64, y as f64);
            positions.push([xf, yf, z(xf, yf)]);
        }
    }
    TriangleSoup {
        positions,
        faces: grid_faces(n),
    }
}

/// Flat unit-spacing n-by-n grid, row-major vertex ids.
pub fn grid(n: usize) -> TriangleSoup {
    height_grid(n, |_, _| 0.0)
}

/// Grid with vertices shaken inside the plane; z stays 0, so the first two
/// position components double as an exact planar oracle.
pub fn jittered_grid(n: usize, amplitude: f64, seed: u64) -> TriangleSoup {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions = Vec::with_capacity(n * n);
    for y in 0..n {
        for x in 0..n {
            positions.push([
                x as f64 + rng.gen_range(-amplitude..amplitude),
                y as f64 + rng.gen_range(-amplitude..amplitude),
                0.0,
            ]);
        }
    }
    TriangleSoup {
        positions,
        faces: grid_faces(n),
    }
}

/// Grid with uniform random heights in [-amplitude, amplitude].
pub fn noisy_plane(n: usize, amplitude: f64, seed: u64) -> TriangleSoup {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    height_grid(n, |_, _| rng.gen_range(-amplitude..amplitude))
}

/// Grid with a centered Gaussian bump of the given height and width.
pub fn bump_grid(n: usize, amplitude: f64, sigma: f64) -> TriangleSoup {
    let c = (n - 1) as f64 / 2.0;
    height_grid(n, |x, y| {
        let d2 = (x - c) * (x - c) + (y - c) * (y - c);
        amplitude * (-d2 / (2.0 * sigma * sigma)).exp()
    })
}

/// Wave carpet with curvature graded along x: the height is a sine product
/// whose amplitude ramps linearly from 0 at x = 0 to `max_amplitude` at the
/// far edge, so the Gaussian curvature magnitude sweeps several decades
/// across the grid. Useful when a threshold sweep should bite progressively.
pub fn graded_waves(n: usize, max_amplitude: f64, period: f64) -> TriangleSoup {
    let w = 2.0 * PI / period;
    let span = (n - 1) as f64;
    height_grid(n, |x, y| {
        max_amplitude * (x / span) * (w * x).sin() * (w * y).sin()
    })
}

/// Grid over the saddle z = coefficient * (x^2 - y^2), centered.
pub fn saddle(n: usize, coefficient: f64) -> TriangleSoup {
    let c = (n - 1) as f64 / 2.0;
    height_grid(n, |x, y| {
        coefficient * ((x - c) * (x - c) - (y - c) * (y - c))
    })
}

/// Two-row flat strip; every vertex lies on the single boundary loop.
pub fn strip(length: usize) -> TriangleSoup {
    let mut positions = Vec::with_capacity(2 * length);
    for y in 0..2 {
        for x in 0..length {
            positions.push([x as f64, y as f64, 0.0]);
        }
    }
    let at = |x: usize, y: usize| y * length + x;
    let mut faces = Vec::with_capacity(2 * (length - 1));
    for x in 0..length - 1 {
        faces.push([at(x, 0), at(x + 1, 0), at(x + 1, 1)]);
        faces.push([at(x, 0), at(x + 1, 1), at(x, 1)]);
    }
    TriangleSoup { positions, faces }
}

/// Cap-less unit-radius cylinder: `around` vertices per ring, `rings` rings,
/// ring spacing chosen so cells are roughly square. Developable, so interior
/// vertices have zero curvature up to rounding.
pub fn cylinder(around: usize, rings: usize) -> TriangleSoup {
    let h = 2.0 * PI / around as f64;
    let mut positions = Vec::with_capacity(around * rings);
    for j in 0..rings {
        for i in 0..around {
            let th = 2.0 * PI * i as f64 / around as f64;
            positions.push([th.cos(), th.sin(), j as f64 * h]);
        }
    }
    let at = |i: usize, j: usize| j * around + (i % around);
    let mut faces = Vec::with_capacity(2 * around * (rings - 1));
    for j in 0..rings - 1 {
        for i in 0..around {
            faces.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            faces.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    TriangleSoup { positions, faces }
}

/// Open cone: an apex fan plus `rings - 1` quad bands, slant half-angle
/// `half_angle`. Slant vertices are developable; all curvature concentrates
/// at the apex.
pub fn cone(segments: usize, rings: usize, half_angle: f64) -> TriangleSoup {
    let (sin_a, cos_a) = (half_angle.sin(), half_angle.cos());
    let slant_step = 1.0;
    let mut positions = vec![[0.0, 0.0, 0.0]];
    for j in 1..=rings {
        let rho = j as f64 * slant_step * sin_a;
        let z = -(j as f64) * slant_step * cos_a;
        for i in 0..segments {
            let th = 2.0 * PI * i as f64 / segments as f64;
            positions.push([rho * th.cos(), rho * th.sin(), z]);
        }
    }
    let at = |i: usize, j: usize| 1 + (j - 1) * segments + (i % segments);
    let mut faces = Vec::new();
    for i in 0..segments {
        faces.push([0, at(i, 1), at(i + 1, 1)]);
    }
    for j in 1..rings {
        for i in 0..segments {
            faces.push([at(i, j), at(i, j + 1), at(i + 1, j + 1)]);
            faces.push([at(i, j), at(i + 1, j + 1), at(i + 1, j)]);
        }
    }
    TriangleSoup { positions, faces }
}

/// Torus with `major` vertices around the big circle and `minor` around the
/// tube. Closed, genus one.
pub fn torus(major: usize, minor: usize, major_radius: f64, minor_radius: f64) -> TriangleSoup {
    let mut positions = Vec::with_capacity(major * minor);
    for j in 0..minor {
        let ph = 2.0 * PI * j as f64 / minor as f64;
        for i in 0..major {
            let th = 2.0 * PI * i as f64 / major as f64;
            let ring = major_radius + minor_radius * ph.cos();
            positions.push([ring * th.cos(), ring * th.sin(), minor_radius * ph.sin()]);
        }
    }
    let at = |i: usize, j: usize| (j % minor) * major + (i % major);
    let mut faces = Vec::with_capacity(2 * major * minor);
    for j in 0..minor {
        for i in 0..major {
            faces.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            faces.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    TriangleSoup { positions, faces }
}

/// Regular tetrahedron with unit edges.
pub fn tetrahedron() -> TriangleSoup {
    let p = [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 3f64.sqrt() / 2.0, 0.0],
        [0.5, 3f64.sqrt() / 6.0, (2f64 / 3.0).sqrt()],
    ];
    TriangleSoup {
        positions: p.to_vec(),
        faces: vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]],
    }
}

/// Icosahedron subdivided `subdivisions` times, vertices projected onto the
/// unit sphere. 10 * 4^s + 2 vertices.
pub fn icosphere(subdivisions: usize) -> TriangleSoup {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut positions: Vec<[f64; 3]> = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
    .iter()
    .map(|p| normalize(*p))
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(&mut positions, &mut midpoints, a, b);
            let bc = midpoint(&mut positions, &mut midpoints, b, c);
            let ca = midpoint(&mut positions, &mut midpoints, c, a);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    TriangleSoup { positions, faces }
}

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let len = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / len, p[1] / len, p[2] / len]
}

fn midpoint(
    positions: &mut Vec<[f64; 3]>,
    cache: &mut HashMap<(usize, usize), usize>,
    a: usize,
    b: usize,
) -> usize {
    let key = (a.min(b), a.max(b));
    *cache.entry(key).or_insert_with(|| {
        let (p, q) = (positions[a], positions[b]);
        positions.push(normalize([
            (p[0] + q[0]) / 2.0,
            (p[1] + q[1]) / 2.0,
            (p[2] + q[2]) / 2.0,
        ]));
        positions.len() - 1
    })
}

/// Two unit equilateral triangles glued along all three edges: the smallest
/// closed Delta-complex, with three vertices of defect 4pi/3.
pub fn pillow() -> IntrinsicMesh {
    IntrinsicMesh::from_connectivity_and_lengths(3, &[[0, 1, 2], [1, 0, 2]], &[[1.0; 3]; 2])
        .expect("pillow is a valid complex")
}

/// Closed fan of unit spokes around a central vertex whose corner angles sum
/// to `angle_sum`, so its curvature is exactly 2pi - angle_sum. The rim forms
/// the boundary.
pub fn wheel(spokes: usize, angle_sum: f64) -> IntrinsicMesh {
    let step = angle_sum / spokes as f64;
    let chord = (2.0 - 2.0 * step.cos()).sqrt();
    let faces: Vec<[usize; 3]> = (0..spokes)
        .map(|i| [0, i + 1, (i + 1) % spokes + 1])
        .collect();
    let sides: Vec<[f64; 3]> = (0..spokes).map(|_| [1.0, chord, 1.0]).collect();
    IntrinsicMesh::from_connectivity_and_lengths(spokes + 1, &faces, &sides)
        .expect("wheel is a valid complex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::VertexId;

    fn gauss_bonnet(mesh: &IntrinsicMesh) {
        let chi = mesh.complex().euler_characteristic() as f64;
        let sum = mesh.curvature_sum();
        assert!(
            (sum - 2.0 * PI * chi).abs() < 1e-9,
            "curvature sum {sum} vs 2 pi chi {}",
            2.0 * PI * chi
        );
    }

    #[test]
    fn generators_satisfy_gauss_bonnet() {
        let soups = [
            ("grid", grid(6)),
            ("jittered", jittered_grid(6, 0.3, 5)),
            ("noisy", noisy_plane(6, 0.2, 9)),
            ("bump", bump_grid(9, 2.0, 1.5)),
            ("saddle", saddle(7, 0.2)),
            ("strip", strip(7)),
            ("cylinder", cylinder(10, 6)),
            ("cone", cone(9, 4, PI / 6.0)),
            ("torus", torus(12, 8, 2.0, 0.7)),
            ("tetrahedron", tetrahedron()),
            ("icosphere", icosphere(1)),
        ];
        for (name, soup) in soups {
            let mesh = soup.mesh();
            mesh.check_invariants();
            gauss_bonnet(&mesh);
            assert_eq!(
                mesh.complex().num_vertices(),
                soup.positions.len(),
                "{name}"
            );
        }
        gauss_bonnet(&pillow());
        gauss_bonnet(&wheel(8, 3.2 * PI));
    }

    #[test]
    fn topology_counts() {
        let cyl = cylinder(8, 5).mesh();
        assert_eq!(cyl.complex().num_vertices(), 40);
        assert_eq!(cyl.complex().euler_characteristic(), 0);
        assert_eq!(cyl.complex().boundary_loop_count(), 2);

        let tor = torus(8, 6, 2.0, 0.5).mesh();
        assert_eq!(tor.complex().num_vertices(), 48);
        assert_eq!(tor.complex().euler_characteristic(), 0);
        assert_eq!(tor.complex().boundary_loop_count(), 0);

        let ico = icosphere(2).mesh();
        assert_eq!(ico.complex().num_vertices(), 162);
        assert_eq!(ico.complex().euler_characteristic(), 2);
        for v in ico.complex().vertices() {
            assert!(ico.gaussian_curvature(v) > 0.0);
        }

        let con = cone(8, 4, PI / 6.0).mesh();
        assert_eq!(con.complex().num_vertices(), 33);
        assert_eq!(con.complex().euler_characteristic(), 1);
        assert_eq!(con.complex().boundary_loop_count(), 1);

        let st = strip(7).mesh();
        assert_eq!(st.complex().num_vertices(), 14);
        assert_eq!(st.complex().euler_characteristic(), 1);
        assert!(st
            .complex()
            .vertices()
            .all(|v| st.complex().is_boundary_vertex(v)));

        let pil = pillow();
        assert_eq!(pil.complex().euler_characteristic(), 2);
        assert_eq!(pil.complex().boundary_loop_count(), 0);
    }

    #[test]
    fn developable_interiors_are_flat() {
        let cyl = cylinder(12, 6).mesh();
        for v in cyl.complex().vertices() {
            if !cyl.complex().is_boundary_vertex(v) {
                assert!(cyl.gaussian_curvature(v).abs() < 1e-10);
            }
        }
        let con = cone(10, 5, PI / 6.0).mesh();
        for v in con.complex().vertices() {
            if !con.complex().is_boundary_vertex(v) && v != VertexId(0) {
                assert!(con.gaussian_curvature(v).abs() < 1e-10);
            }
        }
        assert!(con.gaussian_curvature(VertexId(0)) > 1.0);
    }

    #[test]
    fn wheel_prescribes_center_curvature() {
        let w = wheel(8, 3.2 * PI);
        let kappa = w.gaussian_curvature(VertexId(0));
        assert!((kappa - (2.0 * PI - 3.2 * PI)).abs() < 1e-12);
        assert!(!w.complex().is_boundary_vertex(VertexId(0)));
    }

    #[test]
    fn seeded_generators_are_deterministic() {
        let a = noisy_plane(6, 0.3, 42);
        let b = noisy_plane(6, 0.3, 42);
        assert_eq!(a.positions, b.positions);
        let c = noisy_plane(6, 0.3, 43);
        assert_ne!(a.positions, c.positions);
    }
}
