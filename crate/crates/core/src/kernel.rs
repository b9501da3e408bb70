//! Kernel, potential, momentum map and pullback metric of a space.
//!
//! Points live in logarithmic coordinates `x`; the monomial point is
//! `X = exp(x)`. Every exponential sum is evaluated with a log-sum-exp shift
//! by `max_a(log α²ₐ + 2a·x)`, so nothing overflows for large `|a·x|`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::space::ExpSumSpace;

/// A finite point in logarithmic coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationPoint<T>(Vec<T>);

impl<T: Real> EvaluationPoint<T> {
    pub fn new(x: Vec<T>) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation(
                "evaluation point must have finite entries",
            ));
        }
        Ok(Self(x))
    }

    /// Logarithmic coordinates of a point in the positive orthant.
    pub fn from_monomial_point(big_x: &[T]) -> Result<Self> {
        if big_x.iter().any(|&v| !(v > T::zero())) {
            return Err(Error::validation(
                "monomial point must lie in the positive orthant",
            ));
        }
        Self::new(big_x.iter().map(|v| v.ln()).collect())
    }

    pub fn monomial_point(&self) -> Vec<T> {
        self.0.iter().map(|v| v.exp()).collect()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl<T> AsRef<[T]> for EvaluationPoint<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

impl<T> std::ops::Deref for EvaluationPoint<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Inner product `⟨·,·⟩ₓ`, half the Hessian of the potential.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix<T>(pub Matrix<T>);

impl<T: Real> MetricMatrix<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn norm(&self, u: &[T]) -> T {
        self.0.quad_form(u).max(T::zero()).sqrt()
    }

    pub fn det(&self) -> T {
        if self.dim() == 1 {
            return self.0[(0, 0)];
        }
        self.0.det()
    }

    pub fn min_eigenvalue(&self) -> T {
        self.0.symmetric_eigenvalues()[0]
    }
}

/// Gradient of the potential; lies in the convex hull of the support.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumVector<T>(pub Vec<T>);

impl<T> std::ops::Deref for MomentumVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// `log α²ₐ + 2a·x` for every term, and their maximum.
fn shifted_logs<T: Real>(space: &ExpSumSpace<T>, x: &[T]) -> (Vec<T>, T) {
    let two = T::lit(2.0);
    let logs: Vec<T> = space
        .terms()
        .map(|(a, c)| {
            let ax: T = a
                .iter()
                .zip(x)
                .map(|(&ai, &xi)| T::lit(ai as f64) * xi)
                .sum();
            c.ln() + two * ax
        })
        .collect();
    let shift = logs.iter().copied().fold(T::neg_infinity(), T::max);
    (logs, shift)
}

fn check_point<T: Real>(space: &ExpSumSpace<T>, x: &[T]) {
    debug_assert_eq!(space.dim(), x.len(), "point dimension must match the space");
}

/// `φ(x) = ½ log Σ α²ₐ e^{2a·x}`.
pub fn log_kernel_norm<T: Real>(space: &ExpSumSpace<T>, x: &[T]) -> T {
    check_point(space, x);
    let (logs, shift) = shifted_logs(space, x);
    let s: T = logs.iter().map(|&l| (l - shift).exp()).sum();
    T::lit(0.5) * (shift + s.ln())
}

/// Normalized weights `α²ₐ e^{2a·x} / ‖V(x)‖²`, in term order.
pub fn term_weights<T: Real>(space: &ExpSumSpace<T>, x: &[T]) -> Vec<T> {
    check_point(space, x);
    let (logs, shift) = shifted_logs(space, x);
    let mut w: Vec<T> = logs.iter().map(|&l| (l - shift).exp()).collect();
    let s: T = w.iter().copied().sum();
    for v in &mut w {
        *v /= s;
    }
    w
}

/// Momentum map `m(x) = Σ wₐ a`.
pub fn momentum<T: Real>(space: &ExpSumSpace<T>, x: &[T]) -> MomentumVector<T> {
    let w = term_weights(space, x);
    MomentumVector(weighted_mean(space, &w))
}

fn weighted_mean<T: Real>(space: &ExpSumSpace<T>, w: &[T]) -> Vec<T> {
    let n = space.dim();
    let mut m = vec![T::zero(); n];
    for ((a, _), &wa) in space.terms().zip(w) {
        for k in 0..n {
            m[k] += wa * T::lit(a[k] as f64);
        }
    }
    m
}

/// Pullback metric `G(x) = Σ wₐ (a − m)(a − m)ᵀ`, the weighted covariance of
/// the exponents (centered form).
pub fn metric<T: Real>(space: &ExpSumSpace<T>, x: &[T]) -> MetricMatrix<T> {
    let w = term_weights(space, x);
    let m = weighted_mean(space, &w);
    covariance(space, &w, &m)
}

fn covariance<T: Real>(space: &ExpSumSpace<T>, w: &[T], m: &[T]) -> MetricMatrix<T> {
    let n = space.dim();
    let mut g = Matrix::zeros(n);
    let mut d = vec![T::zero(); n];
    for ((a, _), &wa) in space.terms().zip(w) {
        for k in 0..n {
            d[k] = T::lit(a[k] as f64) - m[k];
        }
        for i in 0..n {
            for j in 0..=i {
                g[(i, j)] += wa * d[i] * d[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            g[(j, i)] = g[(i, j)];
        }
    }
    MetricMatrix(g)
}

/// Everything at once, sharing a single log-sum-exp pass.
#[derive(Debug, Clone)]
pub struct LocalGeometry<T> {
    pub log_norm: T,
    pub weights: Vec<T>,
    pub momentum: MomentumVector<T>,
    pub metric: MetricMatrix<T>,
}

pub fn local_geometry<T: Real>(space: &ExpSumSpace<T>, x: &[T]) -> LocalGeometry<T> {
    check_point(space, x);
    let (logs, shift) = shifted_logs(space, x);
    let mut w: Vec<T> = logs.iter().map(|&l| (l - shift).exp()).collect();
    let s: T = w.iter().copied().sum();
    for v in &mut w {
        *v /= s;
    }
    let m = weighted_mean(space, &w);
    let g = covariance(space, &w, &m);
    LocalGeometry {
        log_norm: T::lit(0.5) * (shift + s.ln()),
        weights: w,
        momentum: MomentumVector(m),
        metric: g,
    }
}

/// `log K(x, y)` where `K(x, y) = Σ α²ₐ e^{a·(x+y)}` (always positive).
pub fn log_kernel<T: Real>(space: &ExpSumSpace<T>, x: &[T], y: &[T]) -> Result<T> {
    Error::check_dim(space.dim(), x.len())?;
    Error::check_dim(space.dim(), y.len())?;
    let mid: Vec<T> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| T::lit(0.5) * (a + b))
        .collect();
    Ok(T::lit(2.0) * log_kernel_norm(space, &mid))
}
