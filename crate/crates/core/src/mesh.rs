//! Quasi-uniform triangulations of the unit disc.
//!
//! Nodes sit on concentric rings: the centre, then rings of radius `k/K`,
//! the outermost (`k = K`) being the unit circle. Consecutive rings are
//! stitched by merging their angular orderings. Interior nodes are numbered
//! first and boundary nodes last, which makes the trace of a bulk vector the
//! trailing block of its entries.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary vertices in counterclockwise traversal order; the loop closes implicitly.
    pub boundary_loop: Vec<usize>,
    pub n_interior: usize,
    pub n_boundary: usize,
}

/// Radial spacing relative to `h`; `sqrt(3)/2` makes ring-to-ring triangles close to equilateral.
const RADIAL_FACTOR: f64 = 0.866_025_403_784_438_6;

/// Deterministic ring mesh of the unit disc with target edge length `h_target`.
pub fn generate_disc_mesh(h_target: f64) -> Result<Mesh> {
    if !(h_target > 0.0 && h_target < 1.0) {
        return Err(Error::InvalidArgument("h_target must lie in (0, 1)"));
    }
    let n_rings = libm::ceil(1.0 / (RADIAL_FACTOR * h_target)) as usize;
    let mut vertices = vec![[0.0, 0.0]];
    // rings[k] holds the vertex indices of ring k in counterclockwise order.
    let mut rings: Vec<Vec<usize>> = vec![vec![0]];
    let mut phases: Vec<f64> = vec![0.0];
    for k in 1..=n_rings {
        let radius = k as f64 / n_rings as f64;
        let count = (libm::ceil(2.0 * PI * radius / h_target) as usize).max(3);
        // Stagger alternate rings by half a spacing.
        let phase = if k % 2 == 1 { PI / count as f64 } else { 0.0 };
        let mut ring = Vec::with_capacity(count);
        for i in 0..count {
            let theta = phase + 2.0 * PI * i as f64 / count as f64;
            let (s, c) = libm::sincos(theta);
            let p = if k == n_rings { [c, s] } else { [radius * c, radius * s] };
            ring.push(vertices.len());
            vertices.push(p);
        }
        rings.push(ring);
        phases.push(phase);
    }

    let mut triangles = Vec::new();
    let first = &rings[1];
    for i in 0..first.len() {
        triangles.push([0, first[i], first[(i + 1) % first.len()]]);
    }
    for k in 1..n_rings {
        stitch(&rings[k], phases[k], &rings[k + 1], phases[k + 1], &mut triangles);
    }
    for t in &mut triangles {
        if signed_area(&vertices, *t) < 0.0 {
            t.swap(1, 2);
        }
    }

    let n_boundary = rings[n_rings].len();
    let n_interior = vertices.len() - n_boundary;
    let boundary_loop = rings[n_rings].clone();
    Ok(Mesh { vertices, triangles, boundary_loop, n_interior, n_boundary })
}

/// Triangulates the annulus between an inner and an outer ring by walking both in angle.
fn stitch(
    inner: &[usize],
    inner_phase: f64,
    outer: &[usize],
    outer_phase: f64,
    out: &mut Vec<[usize; 3]>,
) {
    let (m, n) = (inner.len(), outer.len());
    let inner_angle = |i: usize| inner_phase + 2.0 * PI * i as f64 / m as f64;
    // Outer node closest in angle to inner node 0 starts the walk.
    let outer_step = 2.0 * PI / n as f64;
    let rel = libm::round((inner_phase - outer_phase) / outer_step) as i64;
    let start = rel.rem_euclid(n as i64) as usize;
    let outer_base = outer_phase + rel as f64 * outer_step;
    let outer_angle = |t: usize| outer_base + outer_step * t as f64;

    let (mut i, mut t) = (0usize, 0usize);
    while i < m || t < n {
        let a = inner[i % m];
        let b = outer[(start + t) % n];
        let advance_inner = if i == m {
            false
        } else if t == n {
            true
        } else {
            inner_angle(i + 1) < outer_angle(t + 1)
        };
        if advance_inner {
            out.push([a, inner[(i + 1) % m], b]);
            i += 1;
        } else {
            out.push([a, b, outer[(start + t + 1) % n]]);
            t += 1;
        }
    }
}

fn signed_area(v: &[[f64; 2]], t: [usize; 3]) -> f64 {
    let [a, b, c] = t.map(|i| v[i]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    libm::hypot(a[0] - b[0], a[1] - b[1])
}

/// Maximum edge length over all triangles.
pub fn mesh_width(mesh: &Mesh) -> f64 {
    mesh.triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| dist(mesh.vertices[a], mesh.vertices[b]))
        .fold(0.0, f64::max)
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, self.triangles[t])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Boundary edges `(a, b)` in loop order, including the closing edge.
    pub fn boundary_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.boundary_loop.len();
        (0..n).map(move |i| (self.boundary_loop[i], self.boundary_loop[(i + 1) % n]))
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges().map(|(a, b)| dist(self.vertices[a], self.vertices[b])).sum()
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_degrees(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in &self.triangles {
            for k in 0..3 {
                let p = self.vertices[t[k]];
                let q = self.vertices[t[(k + 1) % 3]];
                let r = self.vertices[t[(k + 2) % 3]];
                let (u, v) = ([q[0] - p[0], q[1] - p[1]], [r[0] - p[0], r[1] - p[1]]);
                let cos = (u[0] * v[0] + u[1] * v[1]) / (libm::hypot(u[0], u[1]) * libm::hypot(v[0], v[1]));
                min = min.min(libm::acos(cos.clamp(-1.0, 1.0)) * 180.0 / PI);
            }
        }
        min
    }

    /// Checks ordering, orientation, conformity and the boundary loop.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.n_interior + self.n_boundary != n {
            return Err(Error::InvalidArgument("vertex counts do not add up"));
        }
        for (k, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= n) {
                return Err(Error::InvalidArgument("triangle references a missing vertex"));
            }
            let area = self.triangle_area(k);
            if !(area > 1e-14) {
                return Err(Error::DegenerateTriangle { triangle: k, area });
            }
        }
        // Each undirected edge: interior edges appear once in each direction, boundary edges once.
        let mut edges: Vec<(usize, usize)> =
            self.triangles.iter().flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]).collect();
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("directed edge used twice (non-conforming or flipped)"));
        }
        let mut boundary: Vec<(usize, usize)> =
            edges.iter().copied().filter(|&(a, b)| edges.binary_search(&(b, a)).is_err()).collect();
        let mut expected: Vec<(usize, usize)> = self.boundary_edges().collect();
        boundary.sort_unstable();
        expected.sort_unstable();
        if boundary != expected {
            return Err(Error::InvalidArgument("boundary loop does not match the mesh boundary"));
        }
        let mut loop_sorted = self.boundary_loop.clone();
        loop_sorted.sort_unstable();
        if loop_sorted != (self.n_interior..n).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument("boundary vertices must be numbered last"));
        }
        for &b in &self.boundary_loop {
            let [x, y] = self.vertices[b];
            if libm::fabs(libm::hypot(x, y) - 1.0) > 1e-12 {
                return Err(Error::InvalidArgument("boundary vertex off the unit circle"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_h() {
        for h in [0.0, -0.1, 1.0, 1.5, f64::NAN] {
            assert!(generate_disc_mesh(h).is_err());
        }
    }

    #[test]
    fn coarse_mesh_is_valid_and_inscribed() {
        let m = generate_disc_mesh(0.5).unwrap();
        m.validate().unwrap();
        let area = m.total_area();
        assert!(area < PI && area > 2.5);
        // The mesh area is exactly the area of the inscribed boundary polygon.
        let nb = m.n_boundary as f64;
        let polygon = 0.5 * nb * libm::sin(2.0 * PI / nb);
        assert!((area - polygon).abs() < 1e-12);
    }

    #[test]
    fn quality_over_a_range_of_h() {
        for h in [0.95, 0.7, 0.5, 0.45, 0.3, 0.2, 0.12, 0.09, 0.05, 0.03, 0.02] {
            let m = generate_disc_mesh(h).unwrap();
            m.validate().unwrap();
            let w = mesh_width(&m);
            assert!(w <= 1.5 * h, "h={h}: width {w}");
            let a = m.min_angle_degrees();
            assert!(a >= 20.0, "h={h}: min angle {a}");
        }
    }

    #[test]
    fn equilateral_width() {
        let s3 = libm::sqrt(3.0);
        let m = Mesh {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.5, s3 / 2.0]],
            triangles: vec![[0, 1, 2]],
            boundary_loop: vec![0, 1, 2],
            n_interior: 0,
            n_boundary: 3,
        };
        assert!((mesh_width(&m) - 1.0).abs() < 1e-15);
    }
}
