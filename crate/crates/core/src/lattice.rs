//! Exact convex hulls and volumes of integer point sets in dimension 1, 2 and 3.
//!
//! Volumes are returned scaled by `dim!` so that they are integers for
//! lattice inputs (`2·area` in the plane, `6·volume` in space).

use std::collections::{BTreeSet, HashSet};

use num_integer::Integer;

use crate::error::{Error, Result};

pub type LatticePoint = Vec<i64>;

fn sub3(a: &[i64], b: &[i64]) -> [i128; 3] {
    [
        a[0] as i128 - b[0] as i128,
        a[1] as i128 - b[1] as i128,
        a[2] as i128 - b[2] as i128,
    ]
}

fn cross(u: [i128; 3], v: [i128; 3]) -> [i128; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn dot(u: [i128; 3], v: [i128; 3]) -> i128 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn det3(u: [i128; 3], v: [i128; 3], w: [i128; 3]) -> i128 {
    dot(u, cross(v, w))
}

/// Signed `det(b-a, c-a, p-a)`.
fn orient3(a: &[i64], b: &[i64], c: &[i64], p: &[i64]) -> i128 {
    det3(sub3(b, a), sub3(c, a), sub3(p, a))
}

fn cross2(o: &[i64], a: &[i64], b: &[i64]) -> i128 {
    (a[0] as i128 - o[0] as i128) * (b[1] as i128 - o[1] as i128)
        - (a[1] as i128 - o[1] as i128) * (b[0] as i128 - o[0] as i128)
}

fn dedup_sorted(points: &[LatticePoint]) -> Vec<LatticePoint> {
    let set: BTreeSet<LatticePoint> = points.iter().cloned().collect();
    set.into_iter().collect()
}

fn check_points(points: &[LatticePoint], dim: usize) -> Result<()> {
    if dim == 0 || dim > 3 {
        return Err(Error::UnsupportedDimension {
            dim,
            max: 3,
            what: "exact lattice hulls",
        });
    }
    if points.is_empty() {
        return Err(Error::validation("empty point set"));
    }
    for p in points {
        Error::check_dim(dim, p.len())?;
    }
    Ok(())
}

/// Counter-clockwise hull of planar points; collinear points are dropped.
/// Returns indices into the (deduplicated, lexicographically sorted) input.
fn monotone_chain(pts: &[LatticePoint]) -> Vec<usize> {
    let n = pts.len();
    if n < 3 {
        return (0..n).collect();
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * n);
    for i in 0..n {
        while hull.len() >= 2
            && cross2(
                &pts[hull[hull.len() - 2]],
                &pts[hull[hull.len() - 1]],
                &pts[i],
            ) <= 0
        {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for i in (0..n - 1).rev() {
        while hull.len() >= lower
            && cross2(
                &pts[hull[hull.len() - 2]],
                &pts[hull[hull.len() - 1]],
                &pts[i],
            ) <= 0
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    hull
}

struct Hull3 {
    faces: Vec<[usize; 3]>,
}

/// Incremental hull with outward-oriented triangles. `None` when the points
/// do not span space.
fn hull3(pts: &[LatticePoint]) -> Option<Hull3> {
    let n = pts.len();
    if n < 4 {
        return None;
    }
    let i0 = 0;
    let i1 = (1..n).find(|&i| pts[i] != pts[i0])?;
    let d01 = sub3(&pts[i1], &pts[i0]);
    let i2 = (0..n).find(|&i| cross(d01, sub3(&pts[i], &pts[i0])) != [0, 0, 0])?;
    let i3 = (0..n).find(|&i| orient3(&pts[i0], &pts[i1], &pts[i2], &pts[i]) != 0)?;

    let mut faces: Vec<[usize; 3]> = Vec::new();
    // Orient so the opposite vertex of the seed tetrahedron lies on the negative side.
    let tet = [i0, i1, i2, i3];
    for skip in 0..4 {
        let f: Vec<usize> = (0..4).filter(|&k| k != skip).map(|k| tet[k]).collect();
        let (a, b, c) = (f[0], f[1], f[2]);
        if orient3(&pts[a], &pts[b], &pts[c], &pts[tet[skip]]) > 0 {
            faces.push([a, c, b]);
        } else {
            faces.push([a, b, c]);
        }
    }

    for p in 0..n {
        if tet.contains(&p) {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| orient3(&pts[f[0]], &pts[f[1]], &pts[f[2]], &pts[p]) > 0)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            edges.insert((f[0], f[1]));
            edges.insert((f[1], f[2]));
            edges.insert((f[2], f[0]));
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(u, v)| !edges.contains(&(v, u)))
            .collect();
        let mut kept: Vec<[usize; 3]> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| *f)
            .collect();
        kept.extend(horizon.into_iter().map(|(u, v)| [u, v, p]));
        faces = kept;
    }
    Some(Hull3 { faces })
}

/// Primitive integer normal and offset of a face plane, used to merge
/// coplanar triangles.
fn face_plane(pts: &[LatticePoint], f: &[usize; 3]) -> ([i128; 3], i128) {
    let nrm = cross(sub3(&pts[f[1]], &pts[f[0]]), sub3(&pts[f[2]], &pts[f[0]]));
    let g = nrm[0].gcd(&nrm[1]).gcd(&nrm[2]);
    let nrm = [nrm[0] / g, nrm[1] / g, nrm[2] / g];
    let p0 = [
        pts[f[0]][0] as i128,
        pts[f[0]][1] as i128,
        pts[f[0]][2] as i128,
    ];
    (nrm, dot(nrm, p0))
}

fn normals_span_space(normals: &[[i128; 3]]) -> bool {
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            for k in j + 1..normals.len() {
                if det3(normals[i], normals[j], normals[k]) != 0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Dimension of the affine hull of a nonempty point set.
pub fn affine_rank(points: &[LatticePoint]) -> usize {
    let dim = points.first().map_or(0, Vec::len);
    let base = &points[0];
    let diffs: Vec<Vec<i128>> = points
        .iter()
        .map(|p| {
            p.iter()
                .zip(base)
                .map(|(a, b)| *a as i128 - *b as i128)
                .collect()
        })
        .collect();
    // Fraction-free elimination.
    let mut rows: Vec<Vec<i128>> = diffs
        .into_iter()
        .filter(|r| r.iter().any(|&v| v != 0))
        .collect();
    let mut rank = 0;
    for col in 0..dim {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let a = rows[rank][col];
                let b = rows[r][col];
                let g = a.gcd(&b);
                let (ma, mb) = (a / g, b / g);
                for c in 0..dim {
                    rows[r][c] = rows[r][c] * ma - rows[rank][c] * mb;
                }
                let rg = rows[r].iter().fold(0i128, |acc, v| acc.gcd(v));
                if rg > 1 {
                    for v in rows[r].iter_mut() {
                        *v /= rg;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Indices of extreme points among `pts` (deduplicated, sorted, dim 3).
fn extreme_indices_3d(pts: &[LatticePoint]) -> Vec<usize> {
    match hull3(pts) {
        Some(h) => {
            let mut planes_at: Vec<Vec<[i128; 3]>> = vec![Vec::new(); pts.len()];
            let mut seen: HashSet<([i128; 3], i128)> = HashSet::new();
            for f in &h.faces {
                let plane = face_plane(pts, f);
                if seen.insert(plane) {
                    let (nrm, off) = plane;
                    for (i, p) in pts.iter().enumerate() {
                        let pv = [p[0] as i128, p[1] as i128, p[2] as i128];
                        if dot(nrm, pv) == off {
                            planes_at[i].push(nrm);
                        }
                    }
                }
            }
            (0..pts.len())
                .filter(|&i| planes_at[i].len() >= 3 && normals_span_space(&planes_at[i]))
                .collect()
        }
        None => {
            // Flat or lower: project onto coordinates that stay injective.
            let rank = affine_rank(pts);
            match rank {
                0 => vec![0],
                1 => {
                    let dir = pts
                        .iter()
                        .find(|p| **p != pts[0])
                        .map(|p| sub3(p, &pts[0]))
                        .unwrap();
                    let axis = (0..3).find(|&k| dir[k] != 0).unwrap();
                    let mut lo = 0;
                    let mut hi = 0;
                    for (i, p) in pts.iter().enumerate() {
                        if p[axis] < pts[lo][axis] {
                            lo = i;
                        }
                        if p[axis] > pts[hi][axis] {
                            hi = i;
                        }
                    }
                    vec![lo, hi]
                }
                _ => {
                    let d1 = sub3(&pts[1], &pts[0]);
                    let k = (0..pts.len())
                        .find(|&k| cross(d1, sub3(&pts[k], &pts[0])) != [0, 0, 0])
                        .unwrap();
                    let nrm = cross(d1, sub3(&pts[k], &pts[0]));
                    let drop = (0..3).max_by_key(|&c| nrm[c].abs()).unwrap();
                    let keep: Vec<usize> = (0..3).filter(|&c| c != drop).collect();
                    let projected: Vec<LatticePoint> =
                        pts.iter().map(|p| vec![p[keep[0]], p[keep[1]]]).collect();
                    // Projection is injective on the plane, so sorted order may change
                    // but identity is preserved; re-sort indices by projected order.
                    let mut order: Vec<usize> = (0..pts.len()).collect();
                    order.sort_by(|&a, &b| projected[a].cmp(&projected[b]));
                    let sorted: Vec<LatticePoint> =
                        order.iter().map(|&i| projected[i].clone()).collect();
                    monotone_chain(&sorted)
                        .into_iter()
                        .map(|i| order[i])
                        .collect()
                }
            }
        }
    }
}

/// Extreme points of the convex hull of `points`, deduplicated and in
/// lexicographic order.
pub fn extreme_points(points: &[LatticePoint], dim: usize) -> Result<Vec<LatticePoint>> {
    check_points(points, dim)?;
    let pts = dedup_sorted(points);
    let mut idx: Vec<usize> = match dim {
        1 => {
            if pts.len() == 1 {
                vec![0]
            } else {
                vec![0, pts.len() - 1]
            }
        }
        2 => monotone_chain(&pts),
        _ => extreme_indices_3d(&pts),
    };
    idx.sort_unstable();
    idx.dedup();
    Ok(idx.into_iter().map(|i| pts[i].clone()).collect())
}

/// `dim! · Vol(conv(points))`, an exact integer.
pub fn scaled_hull_volume(points: &[LatticePoint], dim: usize) -> Result<i128> {
    check_points(points, dim)?;
    let pts = dedup_sorted(points);
    Ok(match dim {
        1 => (pts[pts.len() - 1][0] as i128) - (pts[0][0] as i128),
        2 => {
            let h = monotone_chain(&pts);
            if h.len() < 3 {
                return Ok(0);
            }
            let origin = &pts[h[0]];
            (1..h.len() - 1)
                .map(|k| cross2(origin, &pts[h[k]], &pts[h[k + 1]]))
                .sum()
        }
        _ => match hull3(&pts) {
            None => 0,
            Some(h) => {
                let o = &pts[h.faces[0][0]];
                h.faces
                    .iter()
                    .map(|f| -orient3(&pts[f[0]], &pts[f[1]], &pts[f[2]], o))
                    .sum()
            }
        },
    })
}

/// Vertex set of the Minkowski sum of two vertex sets.
pub fn minkowski_sum(
    a: &[LatticePoint],
    b: &[LatticePoint],
    dim: usize,
) -> Result<Vec<LatticePoint>> {
    let mut sums = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            Error::check_dim(p.len(), q.len())?;
            sums.push(p.iter().zip(q).map(|(x, y)| x + y).collect());
        }
    }
    extreme_points(&sums, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[i64]]) -> Vec<LatticePoint> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn square_with_interior_and_edge_points() {
        let p = pts(&[&[0, 0], &[2, 0], &[2, 2], &[0, 2], &[1, 1], &[1, 0]]);
        assert_eq!(
            extreme_points(&p, 2).unwrap(),
            pts(&[&[0, 0], &[0, 2], &[2, 0], &[2, 2]])
        );
        assert_eq!(scaled_hull_volume(&p, 2).unwrap(), 8);
    }

    #[test]
    fn degenerate_planar_sets() {
        let seg = pts(&[&[0, 0], &[1, 1], &[3, 3]]);
        assert_eq!(extreme_points(&seg, 2).unwrap(), pts(&[&[0, 0], &[3, 3]]));
        assert_eq!(scaled_hull_volume(&seg, 2).unwrap(), 0);
        let single = pts(&[&[4, -1], &[4, -1]]);
        assert_eq!(extreme_points(&single, 2).unwrap(), pts(&[&[4, -1]]));
    }

    #[test]
    fn cube_vertices_and_volume() {
        let mut p = Vec::new();
        for x in 0..=2 {
            for y in 0..=2 {
                for z in 0..=2 {
                    p.push(vec![x, y, z]);
                }
            }
        }
        let v = extreme_points(&p, 3).unwrap();
        assert_eq!(v.len(), 8);
        assert!(v.iter().all(|q| q.iter().all(|&c| c == 0 || c == 2)));
        assert_eq!(scaled_hull_volume(&p, 3).unwrap(), 6 * 8);
    }

    #[test]
    fn simplex_3d() {
        let p = pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(scaled_hull_volume(&p, 3).unwrap(), 1);
        assert_eq!(extreme_points(&p, 3).unwrap().len(), 4);
    }

    #[test]
    fn flat_sets_in_space() {
        let tri = pts(&[&[0, 0, 1], &[2, 0, 1], &[0, 2, 1], &[1, 1, 1], &[1, 0, 1]]);
        assert_eq!(
            extreme_points(&tri, 3).unwrap(),
            pts(&[&[0, 0, 1], &[0, 2, 1], &[2, 0, 1]])
        );
        assert_eq!(scaled_hull_volume(&tri, 3).unwrap(), 0);
        let line = pts(&[&[0, 0, 0], &[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(
            extreme_points(&line, 3).unwrap(),
            pts(&[&[0, 0, 0], &[2, 4, 6]])
        );
        assert_eq!(affine_rank(&line), 1);
        assert_eq!(affine_rank(&tri), 2);
    }

    #[test]
    fn octahedron_is_sum_of_nothing_but_itself() {
        let p = pts(&[
            &[1, 0, 0],
            &[-1, 0, 0],
            &[0, 1, 0],
            &[0, -1, 0],
            &[0, 0, 1],
            &[0, 0, -1],
            &[0, 0, 0],
        ]);
        assert_eq!(extreme_points(&p, 3).unwrap().len(), 6);
        // Vol = 4/3
        assert_eq!(scaled_hull_volume(&p, 3).unwrap(), 8);
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(matches!(
            extreme_points(&pts(&[&[0, 0, 0, 0]]), 4),
            Err(Error::UnsupportedDimension { .. })
        ));
    }
}
