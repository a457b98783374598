//! Planar helpers shared by the flip and tracking code.
//!
//! Every geometric quantity in this crate is derived from edge lengths
//! alone, so these routines all take lengths and hand back angles, areas,
//! or positions in a local 2D frame.

/// A point in a local planar layout frame.
pub type Point2 = [f64; 2];

#[inline]
pub fn dist2(p: Point2, q: Point2) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    (dx * dx + dy * dy).sqrt()
}

/// Twice the signed area of the triangle `(a, b, c)`; positive when the
/// corners wind counterclockwise.
#[inline]
pub fn cross2(a: Point2, b: Point2, c: Point2) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Interior angle between the sides of lengths `a` and `b`, opposite the
/// side of length `c`. The cosine is clamped to `[-1, 1]` so near-degenerate
/// triangles round to `0` or `pi` instead of producing NaN.
#[inline]
pub fn angle_from_lengths(a: f64, b: f64, c: f64) -> f64 {
    let cos = (a * a + b * b - c * c) / (2.0 * a * b);
    cos.clamp(-1.0, 1.0).acos()
}

/// Heron's formula with the radicand clamped at zero.
#[inline]
pub fn area_from_lengths(a: f64, b: f64, c: f64) -> f64 {
    let s = 0.5 * (a + b + c);
    (s * (s - a) * (s - b) * (s - c)).max(0.0).sqrt()
}

/// Strict triangle inequality on three lengths.
#[inline]
pub fn strict_triangle(a: f64, b: f64, c: f64) -> bool {
    a > 0.0 && b > 0.0 && c > 0.0 && a + b > c && b + c > a && c + a > b
}

/// Apex of a triangle whose base runs from the origin to `(base, 0)`, with
/// `from_origin` and `from_far` the distances to the two base endpoints.
/// `sign` picks the half-plane for the apex.
#[inline]
pub fn apex_position(base: f64, from_origin: f64, from_far: f64, sign: f64) -> Point2 {
    let x = (base * base + from_origin * from_origin - from_far * from_far) / (2.0 * base);
    let y2 = (from_origin * from_origin - x * x).max(0.0);
    [x, sign * y2.sqrt()]
}

/// Barycentric coordinates of `p` with respect to triangle `t`.
/// The result always sums to 1; components go negative outside `t`.
pub fn barycentric(p: Point2, t: [Point2; 3]) -> [f64; 3] {
    let denom = cross2(t[0], t[1], t[2]);
    debug_assert!(denom.abs() > 0.0, "degenerate layout triangle");
    let c0 = cross2(p, t[1], t[2]) / denom;
    let c1 = cross2(t[0], p, t[2]) / denom;
    let c2 = 1.0 - c0 - c1;
    [c0, c1, c2]
}

/// Clamp tiny negative components to zero and rescale so the sum is 1.
pub fn clamp_and_normalize(c: [f64; 3]) -> [f64; 3] {
    let c = [c[0].max(0.0), c[1].max(0.0), c[2].max(0.0)];
    let sum = c[0] + c[1] + c[2];
    [c[0] / sum, c[1] / sum, c[2] / sum]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_triangle_angles() {
        // 3-4-5 triangle: the angle opposite the hypotenuse is a right angle.
        let a = angle_from_lengths(3.0, 4.0, 5.0);
        assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let sum = a + angle_from_lengths(4.0, 5.0, 3.0) + angle_from_lengths(5.0, 3.0, 4.0);
        assert!((sum - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn degenerate_angle_clamps() {
        // Violates the triangle inequality slightly; must not be NaN.
        let a = angle_from_lengths(1.0, 1.0, 2.0 + 1e-15);
        assert!(a.is_finite());
        assert!((a - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn heron_area() {
        assert!((area_from_lengths(3.0, 4.0, 5.0) - 6.0).abs() < 1e-12);
        // Degenerate radicand clamps to zero.
        assert_eq!(area_from_lengths(1.0, 1.0, 2.0), 0.0);
    }

    #[test]
    fn barycentric_roundtrip() {
        let t = [[0.0, 0.0], [2.0, 0.0], [0.5, 1.5]];
        let p = [0.9, 0.4];
        let c = barycentric(p, t);
        assert!((c[0] + c[1] + c[2] - 1.0).abs() < 1e-12);
        let rx = c[0] * t[0][0] + c[1] * t[1][0] + c[2] * t[2][0];
        let ry = c[0] * t[0][1] + c[1] * t[1][1] + c[2] * t[2][1];
        assert!((rx - p[0]).abs() < 1e-12 && (ry - p[1]).abs() < 1e-12);
    }
}
