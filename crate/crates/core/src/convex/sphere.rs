use std::collections::HashMap;

use crate::scalar::Real;

/// Geodesic triangulation of `S²`: a subdivided icosahedron with outward
/// oriented faces.
#[derive(Debug, Clone)]
pub struct GeodesicSphere<T> {
    pub vertices: Vec<[T; 3]>,
    pub faces: Vec<[usize; 3]>,
}

fn normalize<T: Real>(p: [T; 3]) -> [T; 3] {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / r, p[1] / r, p[2] / r]
}

impl<T: Real> GeodesicSphere<T> {
    /// Icosahedron subdivided `level` times (`20·4^level` faces).
    pub fn new(level: u32) -> Self {
        let t = (T::one() + T::lit(5.0).sqrt()) / T::lit(2.0);
        let o = T::one();
        let z = T::zero();
        let raw = [
            [-o, t, z],
            [o, t, z],
            [-o, -t, z],
            [o, -t, z],
            [z, -o, t],
            [z, o, t],
            [z, -o, -t],
            [z, o, -t],
            [t, z, -o],
            [t, z, o],
            [-t, z, -o],
            [-t, z, o],
        ];
        let mut vertices: Vec<[T; 3]> = raw.iter().map(|&p| normalize(p)).collect();
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
        for _ in 0..level {
            let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
            let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[T; 3]>| -> usize {
                let key = (a.min(b), a.max(b));
                *mid.entry(key).or_insert_with(|| {
                    let (p, q) = (verts[a], verts[b]);
                    verts.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                    verts.len() - 1
                })
            };
            let mut next = Vec::with_capacity(faces.len() * 4);
            for f in &faces {
                let ab = midpoint(f[0], f[1], &mut vertices);
                let bc = midpoint(f[1], f[2], &mut vertices);
                let ca = midpoint(f[2], f[0], &mut vertices);
                next.push([f[0], ab, ca]);
                next.push([f[1], bc, ab]);
                next.push([f[2], ca, bc]);
                next.push([ab, bc, ca]);
            }
            faces = next;
        }
        Self { vertices, faces }
    }

    /// Smallest subdivision level with at least `faces` triangles.
    pub fn level_for(faces: usize) -> u32 {
        let mut level = 0;
        while 20usize << (2 * level) < faces {
            level += 1;
        }
        level
    }

    /// Signed volume enclosed by the image of the triangulation under a
    /// vertex map.
    pub fn enclosed_volume(&self, points: &[[T; 3]]) -> T {
        let mut acc = T::zero();
        for f in &self.faces {
            let (a, b, c) = (points[f[0]], points[f[1]], points[f[2]]);
            acc += a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]);
        }
        acc / T::lit(6.0)
    }
}
