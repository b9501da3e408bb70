use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, LatticePoint};
use crate::space::SupportShape;

/// Convex lattice polytope in dimension ≤ 3, stored by its vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeDoc", into = "PolytopeDoc")]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<LatticePoint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeDoc {
    n: usize,
    vertices: Vec<LatticePoint>,
}

impl TryFrom<PolytopeDoc> for LatticePolytope {
    type Error = Error;
    fn try_from(doc: PolytopeDoc) -> Result<Self> {
        LatticePolytope::new(doc.n, doc.vertices)
    }
}

impl From<LatticePolytope> for PolytopeDoc {
    fn from(p: LatticePolytope) -> Self {
        PolytopeDoc {
            n: p.dim,
            vertices: p.vertices,
        }
    }
}

impl LatticePolytope {
    /// Requires `vertices` to be exactly the extreme points of their hull.
    pub fn new(dim: usize, vertices: Vec<LatticePoint>) -> Result<Self> {
        let ext = lattice::extreme_points(&vertices, dim)?;
        let given: BTreeSet<&LatticePoint> = vertices.iter().collect();
        if given.len() != vertices.len()
            || given.len() != ext.len()
            || ext.iter().any(|v| !given.contains(v))
        {
            return Err(Error::validation(
                "polytope vertices must be exactly the extreme points of their hull",
            ));
        }
        Ok(Self { dim, vertices: ext })
    }

    /// Convex hull of arbitrary lattice points.
    pub fn hull_of(dim: usize, points: &[LatticePoint]) -> Result<Self> {
        Ok(Self {
            dim,
            vertices: lattice::extreme_points(points, dim)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn dilate(&self, d: i64) -> Result<Self> {
        if d < 0 {
            return Err(Error::validation("dilation factor must be nonnegative"));
        }
        let pts: Vec<LatticePoint> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|c| c * d).collect())
            .collect();
        Self::hull_of(self.dim, &pts)
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            vertices: lattice::minkowski_sum(&self.vertices, &other.vertices, self.dim)?,
        })
    }

    /// Exact volume.
    pub fn volume(&self) -> Ratio<i128> {
        let scaled =
            lattice::scaled_hull_volume(&self.vertices, self.dim).expect("validated polytope");
        Ratio::new(scaled, factorial(self.dim))
    }
}

impl From<SupportShape> for LatticePolytope {
    fn from(s: SupportShape) -> Self {
        Self {
            dim: s.dim,
            vertices: s.vertices,
        }
    }
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// Exact mixed volume of `n ≤ 3` lattice polytopes in `ℝⁿ`.
pub fn mixed_volume_polytopes(polys: &[LatticePolytope]) -> Result<Ratio<i128>> {
    let n = polys.len();
    if n == 0 {
        return Err(Error::validation(
            "mixed volume needs at least one polytope",
        ));
    }
    if n > 3 {
        return Err(Error::UnsupportedDimension {
            dim: n,
            max: 3,
            what: "polytope mixed volumes",
        });
    }
    for p in polys {
        Error::check_dim(n, p.dim)?;
    }
    let mut acc: i128 = 0;
    for mask in 1usize..(1 << n) {
        let mut members = (0..n).filter(|i| mask & (1 << i) != 0);
        let first = members.next().expect("nonempty subset");
        let mut sum = polys[first].vertices.clone();
        for i in members {
            sum = lattice::minkowski_sum(&sum, &polys[i].vertices, n)?;
        }
        let vol = lattice::scaled_hull_volume(&sum, n)?;
        if (n - mask.count_ones() as usize) % 2 == 0 {
            acc += vol;
        } else {
            acc -= vol;
        }
    }
    let nf = factorial(n);
    Ok(Ratio::new(acc, nf * nf))
}

/// `n! · MV(P₁,…,Pₙ)`, the generic number of torus roots. Always an integer
/// for lattice polytopes.
pub fn generic_count_of(polys: &[LatticePolytope]) -> Result<i128> {
    let mv = mixed_volume_polytopes(polys)?;
    let count = mv * Ratio::from_integer(factorial(polys.len()));
    debug_assert!(
        count.is_integer(),
        "n!·MV of lattice polytopes is an integer"
    );
    Ok(count.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(dim: usize, v: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::hull_of(dim, &v.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn simplex_diagonal() {
        let d = poly(2, &[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(
            mixed_volume_polytopes(&[d.clone(), d.clone()]).unwrap(),
            Ratio::new(1, 2)
        );
        assert_eq!(d.volume(), Ratio::new(1, 2));
        assert_eq!(generic_count_of(&[d.clone(), d]).unwrap(), 1);
    }

    #[test]
    fn axis_segments() {
        let a = poly(2, &[&[0, 0], &[2, 0]]);
        let b = poly(2, &[&[0, 0], &[0, 3]]);
        assert_eq!(
            mixed_volume_polytopes(&[a.clone(), b.clone()]).unwrap(),
            Ratio::from_integer(3)
        );
        assert_eq!(generic_count_of(&[a, b]).unwrap(), 6);
    }

    #[test]
    fn bezout_in_three_variables() {
        let s = poly(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        for (d1, d2, d3) in [(1, 1, 1), (2, 3, 1), (2, 2, 3)] {
            let polys = [
                s.dilate(d1).unwrap(),
                s.dilate(d2).unwrap(),
                s.dilate(d3).unwrap(),
            ];
            assert_eq!(generic_count_of(&polys).unwrap(), (d1 * d2 * d3) as i128);
        }
    }

    #[test]
    fn multilinear_in_three_variables() {
        let a = poly(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let a2 = poly(
            3,
            &[&[0, 0, 0], &[2, 0, 0], &[0, 1, 1], &[1, 1, 0], &[0, 0, 1]],
        );
        let b = poly(3, &[&[0, 0, 0], &[1, 1, 0], &[0, 1, 2]]);
        let c = poly(
            3,
            &[
                &[0, 0, 0],
                &[1, 0, 0],
                &[0, 1, 0],
                &[1, 1, 0],
                &[0, 0, 1],
                &[1, 1, 1],
            ],
        );
        let sum = a.minkowski_sum(&a2).unwrap();
        let lhs = mixed_volume_polytopes(&[sum, b.clone(), c.clone()]).unwrap();
        let rhs = mixed_volume_polytopes(&[a, b.clone(), c.clone()]).unwrap()
            + mixed_volume_polytopes(&[a2, b, c]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn validation() {
        assert!(LatticePolytope::new(2, vec![vec![0, 0], vec![2, 0], vec![1, 0]]).is_err());
        assert!(LatticePolytope::new(2, vec![vec![0, 0], vec![2, 0]]).is_ok());
        let a = poly(2, &[&[0, 0], &[1, 0]]);
        let b = poly(3, &[&[0, 0, 0], &[1, 0, 0]]);
        assert!(matches!(
            mixed_volume_polytopes(&[a, b]),
            Err(Error::DimensionMismatch { .. })
        ));
        let json = r#"{"n":2,"vertices":[[0,0],[1,0],[0,1]]}"#;
        let p: LatticePolytope = serde_json::from_str(json).unwrap();
        assert_eq!(p.volume(), Ratio::new(1, 2));
        assert!(serde_json::from_str::<LatticePolytope>(
            r#"{"n":2,"vertices":[[0,0],[1,0],[2,0]]}"#
        )
        .is_err());
    }
}
