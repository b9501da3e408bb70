use crate::convex::sphere::GeodesicSphere;
use crate::convex::{ball_volume, ln_factorial};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

const PSD_TOLERANCE: f64 = 1e-10;

/// Centered convex body with support function `h(u) = √(uᵀMu)`, `M` PSD.
/// Lower-rank `M` gives flat bodies (discs, segments, the origin).
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidBody<T> {
    m: Matrix<T>,
}

impl<T: Real> EllipsoidBody<T> {
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if m.dim() == 0 {
            return Err(Error::InvalidBody("empty matrix".into()));
        }
        let scale = T::one().max(m.max_abs());
        if !m.is_symmetric(T::lit(1e-12) * scale) {
            return Err(Error::InvalidBody("matrix is not symmetric".into()));
        }
        if m.rows().iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("matrix has non-finite entries".into()));
        }
        let min_eig = if m.dim() == 1 {
            m[(0, 0)]
        } else {
            m.symmetric_eigenvalues()[0]
        };
        if min_eig < -T::lit(PSD_TOLERANCE) * scale {
            return Err(Error::InvalidBody(format!(
                "matrix has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { m })
    }

    /// Skips validation; `m` must already be symmetric PSD (a metric).
    pub(crate) fn from_psd_unchecked(m: Matrix<T>) -> Self {
        Self { m }
    }

    /// Body with support function `‖Σu‖/√(2π)`, the zonoid of a centered
    /// Gaussian with covariance `Σ²`.
    pub fn gaussian_zonoid(covariance: &Matrix<T>) -> Result<Self> {
        Self::new(covariance.scaled(T::one() / (T::lit(2.0) * T::PI())))
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.m
    }

    /// `λC` for `λ ≥ 0`.
    pub fn scaled(&self, lambda: T) -> Self {
        Self {
            m: self.m.scaled(lambda * lambda),
        }
    }

    pub fn support(&self, u: &[T]) -> T {
        self.m.quad_form(u).max(T::zero()).sqrt()
    }

    /// Point of the body where direction `u` is maximized, `Mu/h(u)`.
    /// Directions with zero support map to the center.
    pub fn touch_point(&self, u: &[T]) -> Vec<T> {
        let h = self.support(u);
        let mu = self.m.mul_vec(u);
        if h > T::zero() {
            mu.into_iter().map(|v| v / h).collect()
        } else {
            vec![T::zero(); u.len()]
        }
    }

    /// Whether `h_self ≤ h_other + tol` on a direction grid.
    pub fn support_dominated_by(&self, other: &Self, tol: T) -> bool {
        directions::<T>(self.dim())
            .iter()
            .all(|u| self.support(u) <= other.support(u) + tol)
    }

    /// Eigenvalues of `M`, small negative ones clamped to zero.
    fn clamped_eigenvalues(&self) -> Vec<T> {
        let vals = if self.dim() == 1 {
            vec![self.m[(0, 0)]]
        } else {
            self.m.symmetric_eigenvalues()
        };
        vals.into_iter().map(|l| l.max(T::zero())).collect()
    }

    pub fn volume(&self) -> T {
        let det: T = self.clamped_eigenvalues().into_iter().product();
        det.sqrt() * ball_volume::<T>(self.dim())
    }
}

fn directions<T: Real>(n: usize) -> Vec<Vec<T>> {
    match n {
        1 => vec![vec![T::one()], vec![-T::one()]],
        2 => (0..720)
            .map(|k| {
                let t = T::lit(2.0) * T::PI() * T::from_count(k) / T::lit(720.0);
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let s = GeodesicSphere::<T>::new(3);
            s.vertices.iter().map(|v| v.to_vec()).collect()
        }
    }
}

/// `√det(M) · Vol(Bⁿ)`.
pub fn ellipsoid_volume<T: Real>(body: &EllipsoidBody<T>) -> T {
    body.volume()
}

/// How Minkowski-sum volumes are evaluated for `n = 2, 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixedVolumeRule {
    /// Closed-form mixed area in the plane; geodesic grid with 20480 faces
    /// in space.
    #[default]
    Auto,
    /// Direction grid of the given size: uniform angular boundary quadrature
    /// in the plane, geodesic triangulation with at least that many faces in
    /// space.
    Grid(usize),
}

pub const DEFAULT_SPHERE_FACES: usize = 20480;

/// Perimeter of an ellipse with semi-axes `a, b` through the
/// arithmetic-geometric mean.
pub fn ellipse_perimeter<T: Real>(a: T, b: T) -> T {
    let (mut a, mut b) = (a.max(b), a.min(b));
    if a == T::zero() {
        return T::zero();
    }
    if b == T::zero() {
        return T::lit(4.0) * a;
    }
    let a0 = a;
    let mut sum = (a * a - b * b) * T::lit(0.5);
    let mut pow = T::lit(0.5);
    for _ in 0..64 {
        let c = (a - b) * T::lit(0.5);
        let (an, bn) = ((a + b) * T::lit(0.5), (a * b).sqrt());
        a = an;
        b = bn;
        pow = pow * T::lit(2.0);
        let term = pow * c * c;
        sum += term;
        if term <= T::epsilon() * a0 * a0 * T::lit(1e-3) {
            break;
        }
    }
    T::lit(2.0) * T::PI() * (a0 * a0 - sum) / a
}

/// Mixed area of two centered planar ellipsoid bodies.
///
/// With `μ±` the roots of `μ² − tμ + det M₁ det M₂` where
/// `t = tr(adj(M₁) M₂)`, the mixed area is half the perimeter of the ellipse
/// with semi-axes `√μ₊, √μ₋`. Flat bodies need no special casing.
pub fn mixed_area_closed_form<T: Real>(m1: &Matrix<T>, m2: &Matrix<T>) -> T {
    let d1 = (m1[(0, 0)] * m1[(1, 1)] - m1[(0, 1)] * m1[(1, 0)]).max(T::zero());
    let d2 = (m2[(0, 0)] * m2[(1, 1)] - m2[(0, 1)] * m2[(1, 0)]).max(T::zero());
    let t = (m1[(1, 1)] * m2[(0, 0)] + m1[(0, 0)] * m2[(1, 1)]
        - m1[(0, 1)] * m2[(1, 0)]
        - m1[(1, 0)] * m2[(0, 1)])
        .max(T::zero());
    let p = d1 * d2;
    let disc = (t * t - T::lit(4.0) * p).max(T::zero());
    let mu_plus = (t + disc.sqrt()) * T::lit(0.5);
    if mu_plus <= T::zero() {
        return T::zero();
    }
    let mu_minus = (p / mu_plus).min(mu_plus);
    T::lit(0.5) * ellipse_perimeter(mu_plus.sqrt(), mu_minus.sqrt())
}

/// Area of `Σ Cᵢ` on a uniform angular grid, as `½ Σᵢ ∫ h dSᵢ` where `dSᵢ`
/// is the curvature measure of each summand: `(hᵢ + hᵢ'')dθ` for full-rank
/// bodies, two point masses `2|v|` for a segment `[−v, v]`, nothing for a
/// point. Only smooth-against-smooth terms are integrated numerically (by
/// parts, `∫ hⱼ hᵢ − hⱼ' hᵢ'`); every term involving a segment is evaluated
/// from its point masses.
fn planar_sum_area<T: Real>(bodies: &[&EllipsoidBody<T>], grid: usize) -> T {
    let mut smooth: Vec<&EllipsoidBody<T>> = Vec::new();
    let mut segments: Vec<[T; 2]> = Vec::new();
    for b in bodies {
        let (vals, vecs) = b.m.symmetric_eigen();
        let (lo, hi) = (vals[0].max(T::zero()), vals[1].max(T::zero()));
        if hi == T::zero() {
            continue;
        }
        if lo <= T::lit(1e-14) * hi {
            let r = hi.sqrt();
            segments.push([vecs[(0, 1)] * r, vecs[(1, 1)] * r]);
        } else {
            smooth.push(b);
        }
    }
    let smooth_support = |u: &[T]| {
        smooth
            .iter()
            .map(|b| b.support(u))
            .fold(T::zero(), |a, v| a + v)
    };
    let total_support = |u: &[T]| {
        bodies
            .iter()
            .map(|b| b.support(u))
            .fold(T::zero(), |a, v| a + v)
    };
    let mut area = T::zero();
    if !smooth.is_empty() {
        // even integrand: half a turn suffices, and ½ ∫₀^{2π} = ∫₀^{π}
        let half = (grid / 2).max(4);
        let dt = T::PI() / T::from_count(half);
        let mut acc = T::zero();
        for k in 0..half {
            let (s, c) = (dt * T::from_count(k)).sin_cos();
            let u = [c, s];
            let du = [-s, c];
            let mut h = T::zero();
            let mut dh = T::zero();
            for b in &smooth {
                let hb = b.support(&u);
                let mu = b.m.mul_vec(&u);
                h += hb;
                dh += (mu[0] * du[0] + mu[1] * du[1]) / hb;
            }
            acc += h * h - dh * dh;
        }
        area += acc * dt;
    }
    for v in segments {
        let jv = [-v[1], v[0]];
        // smooth summands against the segment, and the segment against everything
        area += T::lit(2.0) * (smooth_support(&jv) + total_support(&jv));
    }
    area
}

/// Volume of `Σ Cᵢ` as the volume enclosed by the touch points over a
/// geodesic triangulation. The inscribed-surface error expands in even
/// powers of the mesh width, so three levels are combined by two Richardson
/// steps (factor 4, then 16).
fn spatial_sum_volumes<T: Real>(bodies: &[&EllipsoidBody<T>], faces: usize) -> Vec<T> {
    let level = GeodesicSphere::<T>::level_for(faces).max(2);
    let n = bodies.len();
    let subsets = 1usize << n;
    let mut result = vec![T::zero(); subsets];
    let mut per_level = Vec::new();
    for lvl in [level - 2, level - 1, level] {
        let sphere = GeodesicSphere::<T>::new(lvl);
        let touch: Vec<Vec<[T; 3]>> = bodies
            .iter()
            .map(|b| {
                sphere
                    .vertices
                    .iter()
                    .map(|u| {
                        let p = b.touch_point(u);
                        [p[0], p[1], p[2]]
                    })
                    .collect()
            })
            .collect();
        let mut vols = vec![T::zero(); subsets];
        for (mask, vol) in vols.iter_mut().enumerate().skip(1) {
            let pts: Vec<[T; 3]> = (0..sphere.vertices.len())
                .map(|v| {
                    let mut p = [T::zero(); 3];
                    for (i, t) in touch.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            for k in 0..3 {
                                p[k] += t[v][k];
                            }
                        }
                    }
                    p
                })
                .collect();
            *vol = sphere.enclosed_volume(&pts);
        }
        per_level.push(vols);
    }
    for mask in 1..subsets {
        let v: Vec<T> = per_level.iter().map(|l| l[mask]).collect();
        let r_mid = (T::lit(4.0) * v[1] - v[0]) / T::lit(3.0);
        let r_fine = (T::lit(4.0) * v[2] - v[1]) / T::lit(3.0);
        result[mask] = (T::lit(16.0) * r_fine - r_mid) / T::lit(15.0);
    }
    result
}

/// Mixed volume of `n ≤ 3` ellipsoid bodies in `ℝⁿ`.
pub fn mixed_volume_ellipsoids<T: Real>(
    bodies: &[EllipsoidBody<T>],
    rule: MixedVolumeRule,
) -> Result<T> {
    let n = bodies.len();
    if n == 0 {
        return Err(Error::validation("mixed volume needs at least one body"));
    }
    for b in bodies {
        Error::check_dim(n, b.dim())?;
    }
    match (n, rule) {
        (1, _) => Ok(bodies[0].volume()),
        (2, MixedVolumeRule::Auto) => Ok(mixed_area_closed_form(&bodies[0].m, &bodies[1].m)),
        (2, MixedVolumeRule::Grid(grid)) => {
            let area = |s: &[&EllipsoidBody<T>]| planar_sum_area(s, grid);
            let a12 = area(&[&bodies[0], &bodies[1]]);
            let a1 = area(&[&bodies[0]]);
            let a2 = area(&[&bodies[1]]);
            Ok(T::lit(0.5) * (a12 - a1 - a2))
        }
        (3, rule) => {
            let faces = match rule {
                MixedVolumeRule::Auto => DEFAULT_SPHERE_FACES,
                MixedVolumeRule::Grid(g) => g,
            };
            let refs: Vec<&EllipsoidBody<T>> = bodies.iter().collect();
            let vols = spatial_sum_volumes(&refs, faces);
            let mut acc = T::zero();
            for (mask, &v) in vols.iter().enumerate().skip(1) {
                let size = mask.count_ones() as usize;
                if (n - size) % 2 == 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            Ok(acc / T::lit(6.0))
        }
        _ => Err(Error::UnsupportedDimension {
            dim: n,
            max: 3,
            what: "ellipsoid mixed volumes",
        }),
    }
}

/// `E|det R|` for independent Gaussian rows `rᵢ ~ N(0, Σᵢ²)`, as
/// `n! · MV(C₁,…,Cₙ)` over the Gaussian zonoids.
pub fn expected_abs_det_gaussian<T: Real>(
    covariances: &[Matrix<T>],
    rule: MixedVolumeRule,
) -> Result<T> {
    let bodies = covariances
        .iter()
        .map(EllipsoidBody::gaussian_zonoid)
        .collect::<Result<Vec<_>>>()?;
    let mv = mixed_volume_ellipsoids(&bodies, rule)?;
    Ok(ln_factorial::<T>(bodies.len()).exp() * mv)
}
