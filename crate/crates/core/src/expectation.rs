//! Expected number of real roots of random systems.
//!
//! For spaces `F₁,…,Fₙ` on `ℝⁿ` the expected root count over `𝒟` is the
//! integral of
//!
//! ```text
//! ρ(x) = n! / (2π)^{n/2} · MV(C₁(x), …, Cₙ(x)),   Cᵢ(x) = {h(u) = √(uᵀGᵢ(x)u / 2π)}
//! ```
//!
//! where `Gᵢ` is the pullback metric of `Fᵢ`. When all spaces coincide this
//! collapses to `n!·Vol(Bⁿ)/(2π)ⁿ · √det G(x)`, the Veronese volume density
//! divided by `Vol(ℝPⁿ)`.

use crate::convex::{
    generic_count_of, ln_ball_volume, ln_factorial, mixed_area_closed_form,
    mixed_volume_ellipsoids, projective_volume, EllipsoidBody, LatticePolytope, MixedVolumeRule,
};
use crate::domain::{DomainBox, DomainUnion, Region, SignedDomain};
use crate::error::{Error, Result};
use crate::kernel::metric;
use crate::linalg::Matrix;
use crate::quadrature::{integrate_box, GaussLegendre};
use crate::scalar::Real;
use crate::space::ExpSumSpace;

const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    /// Gauss–Legendre order per axis and cell.
    pub nodes_per_axis: usize,
    /// Equal cells per axis.
    pub subdivisions: usize,
    pub mv_rule: MixedVolumeRule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes_per_axis: 64,
            subdivisions: 8,
            mv_rule: MixedVolumeRule::Auto,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis == 0 || self.subdivisions == 0 {
            return Err(Error::validation(
                "quadrature nodes and subdivisions must be positive",
            ));
        }
        if self.mv_rule == MixedVolumeRule::Grid(0) {
            return Err(Error::validation("mixed volume grid must be positive"));
        }
        Ok(())
    }

    fn halved(&self) -> Self {
        Self {
            nodes_per_axis: (self.nodes_per_axis / 2).max(1),
            ..*self
        }
    }
}

/// A quadrature value together with `|Q(k) − Q(k/2)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

fn check_system<T: Real>(spaces: &[ExpSumSpace<T>]) -> Result<usize> {
    let n = spaces.len();
    if n == 0 {
        return Err(Error::validation("a system needs at least one space"));
    }
    if n > MAX_DIM {
        return Err(Error::UnsupportedDimension {
            dim: n,
            max: MAX_DIM,
            what: "root expectation",
        });
    }
    for s in spaces {
        Error::check_dim(n, s.dim())?;
    }
    Ok(n)
}

/// `n!·Vol(Bⁿ)/(2π)ⁿ`.
fn equal_space_constant<T: Real>(n: usize) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    (ln_factorial::<T>(n) + ln_ball_volume::<T>(n) - T::from_count(n) * two_pi.ln()).exp()
}

fn sqrt_det<T: Real>(g: &Matrix<T>) -> T {
    let det = match g.dim() {
        1 => g[(0, 0)],
        2 => g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)],
        _ => g.det(),
    };
    det.max(T::zero()).sqrt()
}

/// The integrand in a form that can be evaluated without error handling.
enum Integrand<'a, T> {
    Equal {
        space: &'a ExpSumSpace<T>,
        constant: T,
    },
    Mixed {
        spaces: &'a [ExpSumSpace<T>],
        rule: MixedVolumeRule,
        constant: T,
    },
}

impl<'a, T: Real> Integrand<'a, T> {
    fn new(
        spaces: &'a [ExpSumSpace<T>],
        cfg: &QuadratureConfig,
        allow_equal: bool,
    ) -> Result<Self> {
        let n = check_system(spaces)?;
        cfg.validate()?;
        if allow_equal && spaces.iter().all(|s| s == &spaces[0]) {
            return Ok(Self::Equal {
                space: &spaces[0],
                constant: equal_space_constant(n),
            });
        }
        let two_pi = T::lit(2.0) * T::PI();
        let constant = (ln_factorial::<T>(n) - T::from_count(n) * T::lit(0.5) * two_pi.ln()).exp();
        Ok(Self::Mixed {
            spaces,
            rule: cfg.mv_rule,
            constant,
        })
    }

    fn eval(&self, x: &[T]) -> T {
        match self {
            Self::Equal { space, constant } => *constant * sqrt_det(metric(space, x).matrix()),
            Self::Mixed {
                spaces,
                rule,
                constant,
            } => {
                let inv_two_pi = T::one() / (T::lit(2.0) * T::PI());
                let ms: Vec<Matrix<T>> = spaces
                    .iter()
                    .map(|s| metric(s, x).0.scaled(inv_two_pi))
                    .collect();
                let mv = match (ms.len(), rule) {
                    (1, _) => T::lit(2.0) * ms[0][(0, 0)].max(T::zero()).sqrt(),
                    (2, MixedVolumeRule::Auto) => mixed_area_closed_form(&ms[0], &ms[1]),
                    _ => {
                        let bodies: Vec<_> = ms
                            .into_iter()
                            .map(EllipsoidBody::from_psd_unchecked)
                            .collect();
                        mixed_volume_ellipsoids(&bodies, *rule).expect("validated system")
                    }
                };
                *constant * mv.max(T::zero())
            }
        }
    }
}

fn check_point<T: Real>(n: usize, x: &[T]) -> Result<()> {
    Error::check_dim(n, x.len())?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation(
            "evaluation point must have finite entries",
        ));
    }
    Ok(())
}

/// Pointwise expected root density at `x` (logarithmic coordinates). Equal
/// spaces use the `√det G` closed form.
pub fn density<T: Real>(spaces: &[ExpSumSpace<T>], x: &[T], cfg: &QuadratureConfig) -> Result<T> {
    let f = Integrand::new(spaces, cfg, true)?;
    check_point(spaces.len(), x)?;
    Ok(f.eval(x))
}

/// [`density`] always through the mixed volume of the ellipsoids.
pub fn density_by_mixed_volume<T: Real>(
    spaces: &[ExpSumSpace<T>],
    x: &[T],
    cfg: &QuadratureConfig,
) -> Result<T> {
    let f = Integrand::new(spaces, cfg, false)?;
    check_point(spaces.len(), x)?;
    Ok(f.eval(x))
}

/// `n!·Vol(Bⁿ)/(2π)ⁿ · √det G(x)` for the system `(F, …, F)`.
pub fn density_closed_form<T: Real>(space: &ExpSumSpace<T>, x: &[T]) -> Result<T> {
    let n = space.dim();
    if n > MAX_DIM {
        return Err(Error::UnsupportedDimension {
            dim: n,
            max: MAX_DIM,
            what: "root expectation",
        });
    }
    check_point(n, x)?;
    Ok(equal_space_constant::<T>(n) * sqrt_det(metric(space, x).matrix()))
}

fn integrate_boxes<T: Real>(
    boxes: &[DomainBox<T>],
    cfg: &QuadratureConfig,
    f: impl Fn(&[T]) -> T + Sync,
) -> T {
    let rule = GaussLegendre::<T>::new(cfg.nodes_per_axis);
    boxes
        .iter()
        .map(|b| integrate_box(&rule, b.lo(), b.hi(), cfg.subdivisions, &f))
        .fold(T::zero(), |a, v| a + v)
}

fn with_error_estimate<T: Real>(
    boxes: &[DomainBox<T>],
    cfg: &QuadratureConfig,
    f: impl Fn(&[T]) -> T + Sync,
) -> Estimate<T> {
    let value = integrate_boxes(boxes, cfg, &f);
    let coarse = integrate_boxes(boxes, &cfg.halved(), &f);
    Estimate {
        value,
        error: (value - coarse).abs(),
    }
}

fn region_boxes<T: Real>(n: usize, region: &impl Region<T>) -> Result<Vec<DomainBox<T>>> {
    Error::check_dim(n, region.dim())?;
    region.log_boxes()
}

/// Expected number of real roots in a region, by tensor Gauss–Legendre
/// quadrature of the density over every box.
pub fn expected_roots<T: Real>(
    spaces: &[ExpSumSpace<T>],
    region: &impl Region<T>,
    cfg: &QuadratureConfig,
) -> Result<Estimate<T>> {
    let f = Integrand::new(spaces, cfg, true)?;
    let boxes = region_boxes(spaces.len(), region)?;
    Ok(with_error_estimate(&boxes, cfg, |x| f.eval(x)))
}

/// Sum over orthants of the expected counts in `log|W_s|`. Reflecting an
/// orthant maps the coefficient distribution to itself, so every piece uses
/// the same density.
pub fn expected_roots_signed<T: Real>(
    spaces: &[ExpSumSpace<T>],
    region: &SignedDomain<T>,
    cfg: &QuadratureConfig,
) -> Result<Estimate<T>> {
    expected_roots(spaces, region, cfg)
}

/// `∫ √det G(x) dx`, the volume of the image of the domain on the Veronese
/// variety.
pub fn veronese_volume<T: Real>(
    space: &ExpSumSpace<T>,
    region: &impl Region<T>,
    cfg: &QuadratureConfig,
) -> Result<T> {
    cfg.validate()?;
    let n = space.dim();
    if n > MAX_DIM {
        return Err(Error::UnsupportedDimension {
            dim: n,
            max: MAX_DIM,
            what: "root expectation",
        });
    }
    let boxes = region_boxes(n, region)?;
    Ok(integrate_boxes(&boxes, cfg, |x| {
        sqrt_det(metric(space, x).matrix())
    }))
}

/// Veronese volume divided by `Vol(ℝPⁿ)`.
pub fn expected_roots_from_veronese<T: Real>(
    space: &ExpSumSpace<T>,
    region: &impl Region<T>,
    cfg: &QuadratureConfig,
) -> Result<T> {
    Ok(veronese_volume(space, region, cfg)? / projective_volume::<T>(space.dim()))
}

fn powered<T: Real>(spaces: &[ExpSumSpace<T>], degrees: &[u32]) -> Result<Vec<ExpSumSpace<T>>> {
    Error::check_dim(spaces.len(), degrees.len())?;
    spaces
        .iter()
        .zip(degrees)
        .map(|(s, &d)| s.power(d))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingCheck<T> {
    /// `E(F₁^{d₁},…,Fₙ^{dₙ})`, through the powered spaces.
    pub lhs: T,
    /// `√(d₁⋯dₙ)·E(F₁,…,Fₙ)`.
    pub rhs: T,
    /// `lhs / E(F₁,…,Fₙ)`, to be compared with `√(d₁⋯dₙ)`.
    pub ratio: T,
    pub expected_ratio: T,
    /// Combined quadrature error estimate of both sides.
    pub error: T,
}

pub fn scaling_check<T: Real>(
    spaces: &[ExpSumSpace<T>],
    degrees: &[u32],
    region: &impl Region<T>,
    cfg: &QuadratureConfig,
) -> Result<ScalingCheck<T>> {
    let lifted = powered(spaces, degrees)?;
    let lhs = expected_roots(&lifted, region, cfg)?;
    let base = expected_roots(spaces, region, cfg)?;
    let expected_ratio = degrees
        .iter()
        .map(|&d| T::from_count(d as usize))
        .product::<T>()
        .sqrt();
    Ok(ScalingCheck {
        lhs: lhs.value,
        rhs: expected_ratio * base.value,
        ratio: lhs.value / base.value,
        expected_ratio,
        error: lhs.error + expected_ratio * base.error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubadditivityCheck<T> {
    /// `E(F₁,…,Fₙ₋₁, GH)`.
    pub lhs: T,
    /// `E(…, G) + E(…, H)`.
    pub rhs_sum: T,
    /// `rhs_sum − lhs`.
    pub slack: T,
    /// Combined quadrature error estimate of the three integrals.
    pub error: T,
}

pub fn subadditivity_check<T: Real>(
    fixed: &[ExpSumSpace<T>],
    g: &ExpSumSpace<T>,
    h: &ExpSumSpace<T>,
    region: &impl Region<T>,
    cfg: &QuadratureConfig,
) -> Result<SubadditivityCheck<T>> {
    let system = |last: ExpSumSpace<T>| {
        let mut v = fixed.to_vec();
        v.push(last);
        v
    };
    let lhs = expected_roots(&system(g.product(h)?), region, cfg)?;
    let eg = expected_roots(&system(g.clone()), region, cfg)?;
    let eh = expected_roots(&system(h.clone()), region, cfg)?;
    let rhs_sum = eg.value + eh.value;
    Ok(SubadditivityCheck {
        lhs: lhs.value,
        rhs_sum,
        slack: rhs_sum - lhs.value,
        error: lhs.error + eg.error + eh.error,
    })
}

/// Generic number of roots in the complex torus, `n!·MV(P₁,…,Pₙ)`.
pub fn generic_count(supports: &[LatticePolytope]) -> Result<i128> {
    generic_count_of(supports)
}

/// `E(F₁^{d₁},…) / √(generic count of the powered supports)`, which does not
/// depend on the degrees.
pub fn square_root_ratio<T: Real>(
    spaces: &[ExpSumSpace<T>],
    degrees: &[u32],
    region: &impl Region<T>,
    cfg: &QuadratureConfig,
) -> Result<T> {
    let lifted = powered(spaces, degrees)?;
    check_system(&lifted)?;
    let hulls = lifted
        .iter()
        .map(|s| Ok(LatticePolytope::from(s.support_hull()?)))
        .collect::<Result<Vec<_>>>()?;
    let count = generic_count(&hulls)?;
    if count == 0 {
        return Err(Error::UndefinedRatio(
            "generic root count of the supports is zero".into(),
        ));
    }
    let e = expected_roots(&lifted, region, cfg)?;
    Ok(e.value / T::lit(count as f64).sqrt())
}

/// Density sampled on a `k`-point grid per axis of a box (endpoints
/// included; a single point sits at the center). Rows are in row-major order
/// with the first axis slowest.
pub fn density_profile<T: Real>(
    spaces: &[ExpSumSpace<T>],
    domain: &DomainBox<T>,
    points_per_axis: usize,
    cfg: &QuadratureConfig,
) -> Result<Vec<(Vec<T>, T)>> {
    let f = Integrand::new(spaces, cfg, true)?;
    let n = spaces.len();
    Error::check_dim(n, domain.dim())?;
    if points_per_axis == 0 {
        return Err(Error::validation(
            "profile needs at least one point per axis",
        ));
    }
    let k = points_per_axis;
    let coord = |axis: usize, j: usize| {
        let (lo, hi) = (domain.lo()[axis], domain.hi()[axis]);
        if k == 1 {
            T::lit(0.5) * (lo + hi)
        } else {
            lo + (hi - lo) * T::from_count(j) / T::from_count(k - 1)
        }
    };
    let total = k.pow(n as u32);
    let mut rows = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut x = vec![T::zero(); n];
        for axis in (0..n).rev() {
            x[axis] = coord(axis, rem % k);
            rem /= k;
        }
        let v = f.eval(&x);
        rows.push((x, v));
    }
    Ok(rows)
}

/// Region covering `[lo, hi]ⁿ`.
pub fn cube_domain<T: Real>(n: usize, lo: T, hi: T) -> Result<DomainUnion<T>> {
    Ok(DomainUnion::single(DomainBox::cube(n, lo, hi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{kostlan_space, make_space};
    use std::f64::consts::PI;

    fn kostlan(n: usize) -> ExpSumSpace<f64> {
        kostlan_space(n).unwrap()
    }

    fn sp(n: usize, terms: Vec<(Vec<i64>, f64)>) -> Result<ExpSumSpace<f64>> {
        make_space(n, terms)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn kostlan_line_density_at_origin() {
        let d = density(&[kostlan(1)], &[0.0], &cfg()).unwrap();
        assert!((d - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn singleton_has_zero_density() {
        let s = sp(2, vec![(vec![1, 2], 3.0)]).unwrap();
        assert_eq!(
            density(&[s.clone(), s.clone()], &[0.3, -0.2], &cfg()).unwrap(),
            0.0
        );
        let k = kostlan(2);
        assert_eq!(density(&[k, s], &[0.3, -0.2], &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn equal_space_paths_agree() {
        let s = sp(
            2,
            vec![
                (vec![0, 0], 1.0),
                (vec![2, 1], 0.5),
                (vec![1, 3], 2.0),
                (vec![3, 0], 0.25),
            ],
        )
        .unwrap();
        for x in [[0.0, 0.0], [0.4, -0.7], [-1.5, 2.0]] {
            let a = density(&[s.clone(), s.clone()], &x, &cfg()).unwrap();
            let b = density_by_mixed_volume(&[s.clone(), s.clone()], &x, &cfg()).unwrap();
            assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn translation_invariance() {
        let s = sp(
            2,
            vec![(vec![0, 0], 1.0), (vec![2, 1], 0.5), (vec![1, 3], 2.0)],
        )
        .unwrap();
        let t = s.shifted(&[-3, 5], 7.0).unwrap();
        let k = kostlan(2);
        let x = [0.25, -0.5];
        let a = density(&[s, k.clone()], &x, &cfg()).unwrap();
        let b = density(&[t, k], &x, &cfg()).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn kostlan_halves_per_dimension() {
        let e =
            expected_roots(&[kostlan(1)], &cube_domain(1, -30.0, 30.0).unwrap(), &cfg()).unwrap();
        assert!((e.value - 0.5).abs() < 1e-3);
        assert!(e.error < 1e-6);
        let k = kostlan(2);
        let e = expected_roots(
            &[k.clone(), k],
            &cube_domain(2, -30.0, 30.0).unwrap(),
            &cfg(),
        )
        .unwrap();
        assert!((e.value - 0.25).abs() < 1e-3, "{}", e.value);
    }

    #[test]
    fn fourth_power_of_kostlan_line() {
        let s = kostlan(1).power(4).unwrap();
        let e = expected_roots(&[s], &cube_domain(1, -30.0, 30.0).unwrap(), &cfg()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn thin_box_is_negligible() {
        let d = DomainUnion::single(DomainBox::new(vec![0.0], vec![1e-300]).unwrap());
        let e = expected_roots(&[kostlan(1)], &d, &cfg()).unwrap();
        assert!(e.value.abs() < 1e-12);
    }

    #[test]
    fn veronese_arc_length() {
        let dom = cube_domain(1, -30.0, 30.0).unwrap();
        let v = veronese_volume(&kostlan(1), &dom, &cfg()).unwrap();
        let exact = 30f64.exp().atan() - (-30f64).exp().atan();
        assert!((v - exact).abs() < 1e-6);
        let e = expected_roots(&[kostlan(1)], &dom, &cfg()).unwrap().value;
        assert!(
            (e - expected_roots_from_veronese(&kostlan(1), &dom, &cfg()).unwrap()).abs() < 1e-9 * e
        );
        let single = sp(1, vec![(vec![2], 1.0)]).unwrap();
        assert_eq!(veronese_volume(&single, &dom, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn veronese_volume_scales_with_power() {
        let s = sp(
            2,
            vec![(vec![0, 0], 1.0), (vec![1, 0], 2.0), (vec![0, 2], 0.5)],
        )
        .unwrap();
        let dom = cube_domain(2, -6.0, 6.0).unwrap();
        let c = QuadratureConfig {
            nodes_per_axis: 32,
            subdivisions: 4,
            ..cfg()
        };
        let v1 = veronese_volume(&s, &dom, &c).unwrap();
        let v3 = veronese_volume(&s.power(3).unwrap(), &dom, &c).unwrap();
        assert!((v3 / v1 - 3.0).abs() < 1e-6 * 3.0);
    }

    #[test]
    fn scaling_examples() {
        let s = sp(1, vec![(vec![0], 1.0), (vec![1], 1.0), (vec![3], 0.5)]).unwrap();
        let dom = cube_domain(1, -20.0, 20.0).unwrap();
        let one = scaling_check(&[s.clone()], &[1], &dom, &cfg()).unwrap();
        assert_eq!(one.ratio, 1.0);
        let four = scaling_check(&[s], &[4], &dom, &cfg()).unwrap();
        assert!((four.ratio - 2.0).abs() < 1e-3);
        let k = kostlan(2);
        let dom = cube_domain(2, -15.0, 15.0).unwrap();
        let c = QuadratureConfig {
            nodes_per_axis: 32,
            subdivisions: 8,
            ..cfg()
        };
        let r = scaling_check(&[k.clone(), k], &[2, 3], &dom, &c).unwrap();
        assert!((r.ratio - 6f64.sqrt()).abs() < 5e-3, "{}", r.ratio);
    }

    #[test]
    fn subadditivity_examples() {
        let dom = cube_domain(1, -30.0, 30.0).unwrap();
        let g = kostlan(1);
        let eq = subadditivity_check(&[], &g, &g, &dom, &cfg()).unwrap();
        assert!((eq.lhs - 2f64.sqrt() * 0.5).abs() < 1e-3);
        assert!((eq.slack - (2.0 - 2f64.sqrt()) * 0.5).abs() < 1e-3);
        let h = sp(1, vec![(vec![2], 3.0)]).unwrap();
        let sing = subadditivity_check(&[], &g, &h, &dom, &cfg()).unwrap();
        assert!(sing.slack.abs() < 1e-9);
        assert!((sing.lhs - 0.5).abs() < 1e-3);
    }

    #[test]
    fn generic_counts() {
        let tri = LatticePolytope::hull_of(2, &[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(generic_count(&[tri.clone(), tri.clone()]).unwrap(), 1);
        assert_eq!(
            generic_count(&[tri.dilate(2).unwrap(), tri.dilate(5).unwrap()]).unwrap(),
            10
        );
        let a = LatticePolytope::hull_of(2, &[vec![0, 0], vec![2, 0]]).unwrap();
        let b = LatticePolytope::hull_of(2, &[vec![0, 0], vec![0, 3]]).unwrap();
        assert_eq!(generic_count(&[a, b]).unwrap(), 6);
    }

    #[test]
    fn square_root_ratio_examples() {
        let k = kostlan(1);
        let pos = cube_domain(1, -30.0, 30.0).unwrap();
        let both = SignedDomain::all_orthants(&pos).unwrap();
        let r = square_root_ratio(&[k.clone()], &[3], &both, &cfg()).unwrap();
        assert!((r - 1.0).abs() < 2e-3);
        let r1 = square_root_ratio(&[k.clone()], &[2], &pos, &cfg()).unwrap();
        let r4 = square_root_ratio(&[k], &[8], &pos, &cfg()).unwrap();
        assert!((r1 - 0.5).abs() < 2e-3);
        assert!((r1 - r4).abs() < 2e-3);
        let seg = sp(2, vec![(vec![0, 0], 1.0), (vec![1, 1], 1.0)]).unwrap();
        let seg2 = sp(2, vec![(vec![0, 0], 1.0), (vec![2, 2], 1.0)]).unwrap();
        let r = square_root_ratio(
            &[seg, seg2],
            &[1, 1],
            &cube_domain(2, -1.0, 1.0).unwrap(),
            &cfg(),
        );
        assert!(matches!(r, Err(Error::UndefinedRatio(_))));
    }

    #[test]
    fn signed_domains() {
        let k = kostlan(1).power(2).unwrap();
        let e = std::f64::consts::E;
        let w = SignedDomain::from_monomial_boxes(vec![
            DomainBox::new(vec![-e * e], vec![-e]).unwrap(),
            DomainBox::new(vec![e], vec![e * e]).unwrap(),
        ])
        .unwrap();
        let two = expected_roots_signed(&[k.clone()], &w, &cfg())
            .unwrap()
            .value;
        let one = expected_roots(&[k.clone()], &cube_domain(1, 1.0, 2.0).unwrap(), &cfg())
            .unwrap()
            .value;
        assert!((two - 2.0 * one).abs() < 1e-12);

        let dom = cube_domain(1, -30.0, 30.0).unwrap();
        for d in [2u32, 3, 5] {
            let s = kostlan(1).power(d).unwrap();
            let w = SignedDomain::all_orthants(&dom).unwrap();
            let v = expected_roots_signed(&[s], &w, &cfg()).unwrap().value;
            assert!((v - (d as f64).sqrt()).abs() < 2e-3, "d={d}: {v}");
        }

        let w = SignedDomain::positive(&dom).unwrap();
        let a = expected_roots_signed(&[k.clone()], &w, &cfg())
            .unwrap()
            .value;
        let b = expected_roots(&[k], &dom, &cfg()).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn profile_grid() {
        let rows = density_profile(
            &[kostlan(1)],
            &DomainBox::cube(1, -1.0, 1.0).unwrap(),
            3,
            &cfg(),
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].0, vec![0.0]);
        assert!((rows[1].1 - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let k = kostlan(2);
        let rows = density_profile(
            &[k.clone(), k],
            &DomainBox::cube(2, -1.0, 1.0).unwrap(),
            2,
            &cfg(),
        )
        .unwrap();
        assert_eq!(
            rows.iter().map(|r| r.0.clone()).collect::<Vec<_>>()[1],
            vec![-1.0, 1.0]
        );
    }

    #[test]
    fn rejects_bad_input() {
        let k = kostlan(2);
        assert!(matches!(
            density(&[k.clone()], &[0.0, 0.0], &cfg()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(density(&[k.clone(), k.clone()], &[0.0], &cfg()).is_err());
        let k4 = kostlan(4);
        assert!(matches!(
            density(&[k4.clone(), k4.clone(), k4.clone(), k4], &[0.0; 4], &cfg()),
            Err(Error::UnsupportedDimension { .. })
        ));
        let bad = QuadratureConfig {
            nodes_per_axis: 0,
            ..cfg()
        };
        assert!(expected_roots(&[kostlan(1)], &cube_domain(1, 0.0, 1.0).unwrap(), &bad).is_err());
    }
}
