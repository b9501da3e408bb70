//! Tensor Gauss–Legendre quadrature over boxes with uniform subdivision.

use rayon::prelude::*;

use crate::scalar::Real;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Nodes by Newton iteration on the three-term recurrence, computed in
    /// `f64` and converted.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (b + a) * T::lit(0.5);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over the box `[lo, hi]` with a tensor rule on each of
/// `subdivisions^n` equal cells. Cells are evaluated in parallel and summed
/// in a fixed order, so the result does not depend on scheduling.
pub fn integrate_box<T, F>(
    rule: &GaussLegendre<T>,
    lo: &[T],
    hi: &[T],
    subdivisions: usize,
    f: F,
) -> T
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    let n = lo.len();
    assert_eq!(n, hi.len());
    let subdivisions = subdivisions.max(1);
    let cells = subdivisions.pow(n as u32);
    let width: Vec<T> = lo
        .iter()
        .zip(hi)
        .map(|(&a, &b)| (b - a) / T::from_count(subdivisions))
        .collect();
    let q = rule.order();
    let points = q.pow(n as u32);
    let partial: Vec<T> = (0..cells)
        .into_par_iter()
        .map(|cell| {
            let mut idx = cell;
            let mut c_lo = vec![T::zero(); n];
            for k in 0..n {
                let j = idx % subdivisions;
                idx /= subdivisions;
                c_lo[k] = lo[k] + width[k] * T::from_count(j);
            }
            let mut x = vec![T::zero(); n];
            let mut acc = T::zero();
            for p in 0..points {
                let mut pi = p;
                let mut w = T::one();
                for k in 0..n {
                    let j = pi % q;
                    pi /= q;
                    let t = (rule.nodes[j] + T::one()) * T::lit(0.5);
                    x[k] = c_lo[k] + width[k] * t;
                    w *= rule.weights[j];
                }
                acc += w * f(&x);
            }
            let jac: T = width.iter().map(|&w| w * T::lit(0.5)).product();
            acc * jac
        })
        .collect();
    partial.into_iter().fold(T::zero(), |a, b| a + b)
}
