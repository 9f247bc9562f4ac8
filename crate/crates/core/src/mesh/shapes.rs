//! Procedural reference surfaces with known curvature.

use std::collections::HashMap;

use super::TriangleMesh;
use crate::geom::Vec3;
use crate::scalar::Real;

fn build<T: Real>(vertices: Vec<Vec3<T>>, triangles: Vec<[usize; 3]>) -> TriangleMesh<T> {
    TriangleMesh::new(vertices, triangles).expect("generated mesh is well formed")
}

/// Flips faces of a star-shaped closed mesh whose normal points toward the origin.
fn orient_outward<T: Real>(vertices: &[Vec3<T>], triangles: &mut [[usize; 3]]) {
    for t in triangles.iter_mut() {
        let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
        if (b - a).cross(c - a).dot(a + b + c) < T::zero() {
            t.swap(1, 2);
        }
    }
}

/// Regular tetrahedron centred at the origin.
pub fn tetrahedron<T: Real>(edge: T) -> TriangleMesh<T> {
    let s = edge / (T::two() * T::two().sqrt());
    let o = T::one();
    let vertices: Vec<Vec3<T>> = [[o, o, o], [o, -o, -o], [-o, o, -o], [-o, -o, o]]
        .iter()
        .map(|&[x, y, z]| Vec3::new(x * s, y * s, z * s))
        .collect();
    let mut tris = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    orient_outward(&vertices, &mut tris);
    build(vertices, tris)
}

/// Subdivided icosahedron projected onto a sphere; `10·4^s + 2` vertices.
pub fn icosphere<T: Real>(radius: T, subdivisions: u32) -> TriangleMesh<T> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let base: [[f64; 3]; 12] = [
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
    ];
    let mut unit: Vec<[f64; 3]> = base
        .iter()
        .map(|p| {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            [p[0] / n, p[1] / n, p[2] / n]
        })
        .collect();
    let mut tris: Vec<[usize; 3]> = vec![
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
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, unit: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (unit[a], unit[b]);
                let m = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
                let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
                unit.push([m[0] / n, m[1] / n, m[2] / n]);
                unit.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for &[a, b, c] in &tris {
            let ab = midpoint(a, b, &mut unit);
            let bc = midpoint(b, c, &mut unit);
            let ca = midpoint(c, a, &mut unit);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let vertices: Vec<Vec3<T>> = unit
        .iter()
        .map(|p| Vec3::new(T::lit(p[0]), T::lit(p[1]), T::lit(p[2])) * radius)
        .collect();
    orient_outward(&vertices, &mut tris);
    build(vertices, tris)
}

/// Open tube of radius `radius` along +z from 0 to `length`, with aligned
/// rings so every quad is a planar rectangle.
pub fn cylinder<T: Real>(radius: T, length: T, radial: usize, rings: usize) -> TriangleMesh<T> {
    assert!(radial >= 3 && rings >= 2);
    let mut vertices = Vec::with_capacity(radial * rings);
    for j in 0..rings {
        let z = length * T::from_usize_lossy(j) / T::from_usize_lossy(rings - 1);
        for i in 0..radial {
            let th = T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(radial);
            vertices.push(Vec3::new(radius * th.cos(), radius * th.sin(), z));
        }
    }
    let id = |i: usize, j: usize| j * radial + i % radial;
    let mut tris = Vec::with_capacity(2 * radial * (rings - 1));
    for j in 0..rings - 1 {
        for i in 0..radial {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    build(vertices, tris)
}

/// Torus around the z axis with major radius `major` and tube radius `minor`.
/// Vertex `(i, j)` sits at angle `u = 2πi/nu` around the axis and
/// `v = 2πj/nv` around the tube; `v = 0` is the outer equator.
pub fn torus<T: Real>(major: T, minor: T, nu: usize, nv: usize) -> TriangleMesh<T> {
    assert!(nu >= 3 && nv >= 3);
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(nu);
        for j in 0..nv {
            let v = T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(nv);
            let w = major + minor * v.cos();
            vertices.push(Vec3::new(w * u.cos(), w * u.sin(), minor * v.sin()));
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + j % nv;
    let mut tris = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    build(vertices, tris)
}

/// Flat `nx × ny` grid of squares in the plane `z = 0`, normal +z.
pub fn plane_grid<T: Real>(nx: usize, ny: usize, spacing: T) -> TriangleMesh<T> {
    assert!(nx >= 1 && ny >= 1);
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Vec3::new(
                spacing * T::from_usize_lossy(i),
                spacing * T::from_usize_lossy(j),
                T::zero(),
            ));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            // Alternate diagonals so interior vertices see mixed fans.
            if (i + j) % 2 == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            }
        }
    }
    build(vertices, tris)
}
