//! Monte Carlo ground truth: Gaussian systems are sampled, their real roots
//! are counted directly, and counts are averaged.
//!
//! Every sample owns a ChaCha stream selected by its index, and coefficients
//! are drawn in the fixed order (space, term). A sample is therefore the
//! same whatever the batch size or worker count. Results are reduced in
//! index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::domain::{DomainBox, Region, SignVector};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Coefficient, Real};
use crate::space::ExpSumSpace;

/// A cell had no sign change but a critical point whose value has the other
/// sign; two roots were isolated inside it.
pub const TANGENCY_REFINED: u32 = 1;
/// A two-dimensional candidate cell where Newton did not converge.
pub const NEWTON_FAILED: u32 = 2;
/// Newton left the neighbourhood of the box from a candidate cell.
pub const NEWTON_ESCAPED: u32 = 4;

pub const DEFAULT_CELLS_1D: usize = 4096;
pub const DEFAULT_CELLS_2D: usize = 512;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
const DEDUP_RADIUS: f64 = 1e-8;

/// A system `fᵢ·Vᵢ(x) = 0` with explicit coefficient vectors in term order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSystem<T> {
    spaces: Vec<ExpSumSpace<T>>,
    coefficients: Vec<Vec<T>>,
    seed: u64,
    index: u64,
}

impl<T: Real> SampledSystem<T> {
    pub fn new(spaces: Vec<ExpSumSpace<T>>, coefficients: Vec<Vec<T>>) -> Result<Self> {
        let n = check_system(&spaces, usize::MAX)?;
        Error::check_dim(n, coefficients.len())?;
        for (s, f) in spaces.iter().zip(&coefficients) {
            Error::check_dim(s.len(), f.len())?;
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation("coefficients must be finite"));
            }
        }
        Ok(Self {
            spaces,
            coefficients,
            seed: 0,
            index: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.spaces.len()
    }

    pub fn spaces(&self) -> &[ExpSumSpace<T>] {
        &self.spaces
    }

    pub fn coefficients(&self) -> &[Vec<T>] {
        &self.coefficients
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootCountSample<T> {
    pub count: usize,
    pub seed: u64,
    pub index: u64,
    /// Bitset of [`TANGENCY_REFINED`], [`NEWTON_FAILED`], [`NEWTON_ESCAPED`].
    pub flags: u32,
    /// Located roots in logarithmic coordinates.
    pub roots: Vec<Vec<T>>,
}

fn check_system<T: Real>(spaces: &[ExpSumSpace<T>], max: usize) -> Result<usize> {
    let n = spaces.len();
    if n == 0 {
        return Err(Error::validation("a system needs at least one space"));
    }
    if n > max {
        return Err(Error::UnsupportedDimension {
            dim: n,
            max,
            what: "root counting",
        });
    }
    for s in spaces {
        Error::check_dim(n, s.dim())?;
    }
    Ok(n)
}

fn draw<T: Real>(spaces: &[ExpSumSpace<T>], seed: u64, index: u64) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    spaces
        .iter()
        .map(|s| {
            (0..s.len())
                .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                .collect()
        })
        .collect()
}

/// Sample `index` of the stream keyed by `seed`.
pub fn sample_system_at<T: Real>(
    spaces: &[ExpSumSpace<T>],
    seed: u64,
    index: u64,
) -> Result<SampledSystem<T>> {
    check_system(spaces, usize::MAX)?;
    Ok(SampledSystem {
        spaces: spaces.to_vec(),
        coefficients: draw(spaces, seed, index),
        seed,
        index,
    })
}

/// Independent standard normal coefficients, deterministic in `seed`.
pub fn sample_system<T: Real>(spaces: &[ExpSumSpace<T>], seed: u64) -> Result<SampledSystem<T>> {
    sample_system_at(spaces, seed, 0)
}

/// Exponents and `log αₐ` of one space.
struct Terms<T> {
    exps: Vec<Vec<i64>>,
    exps_real: Vec<Vec<T>>,
    log_alpha: Vec<T>,
}

impl<T: Real> Terms<T> {
    fn of(space: &ExpSumSpace<T>) -> Self {
        let mut exps = Vec::new();
        let mut log_alpha = Vec::new();
        for (a, &c2) in space.terms() {
            exps.push(a.clone());
            log_alpha.push(T::lit(0.5) * c2.ln());
        }
        let exps_real = exps
            .iter()
            .map(|a| a.iter().map(|&v| T::lit(v as f64)).collect())
            .collect();
        Self {
            exps,
            exps_real,
            log_alpha,
        }
    }

    fn len(&self) -> usize {
        self.log_alpha.len()
    }

    fn logs(&self, x: &[T]) -> impl Iterator<Item = T> + '_ {
        let x = x.to_vec();
        self.exps_real
            .iter()
            .zip(&self.log_alpha)
            .map(move |(a, &la)| la + a.iter().zip(&x).map(|(&ak, &xk)| ak * xk).sum::<T>())
    }

    fn shift(&self, x: &[T]) -> T {
        self.logs(x).fold(T::neg_infinity(), T::max)
    }

    /// Normalized basis `αₐ e^{a·x} / ‖V(x)‖`.
    fn normalized_basis(&self, x: &[T]) -> Vec<T> {
        let shift = self.shift(x);
        let mut v: Vec<T> = self.logs(x).map(|l| (l - shift).exp()).collect();
        let norm = v.iter().map(|&t| t * t).sum::<T>().sqrt();
        for t in &mut v {
            *t /= norm;
        }
        v
    }

    /// `Σ fₐ αₐ e^{a·x − shift}` and its gradient.
    fn eval_shifted(&self, f: &[T], x: &[T], shift: T) -> (T, Vec<T>) {
        let mut g = T::zero();
        let mut grad = vec![T::zero(); x.len()];
        for ((l, a), &fa) in self.logs(x).zip(&self.exps_real).zip(f) {
            let t = fa * (l - shift).exp();
            g += t;
            for (gk, &ak) in grad.iter_mut().zip(a) {
                *gk += ak * t;
            }
        }
        (g, grad)
    }

    /// Normalized residual `f·V(x)/‖V(x)‖`.
    fn residual(&self, f: &[T], x: &[T]) -> T {
        self.normalized_basis(x)
            .iter()
            .zip(f)
            .map(|(&v, &c)| v * c)
            .sum()
    }

    /// Coefficients of the reflected system: `fₐ · sᵃ`.
    fn signed(&self, f: &[T], signs: &[i8]) -> Vec<T> {
        self.exps
            .iter()
            .zip(f)
            .map(|(a, &c)| {
                let odd = a
                    .iter()
                    .zip(signs)
                    .filter(|&(&ak, &s)| s < 0 && ak.rem_euclid(2) == 1)
                    .count()
                    % 2
                    == 1;
                if odd {
                    -c
                } else {
                    c
                }
            })
            .collect()
    }
}

/// Residual `f·V(x)/‖V(x)‖` of every equation.
pub fn evaluate_system<T: Real>(sys: &SampledSystem<T>, x: &[T]) -> Result<Vec<T>> {
    Error::check_dim(sys.dim(), x.len())?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation(
            "evaluation point must have finite entries",
        ));
    }
    Ok(sys
        .spaces
        .iter()
        .zip(&sys.coefficients)
        .map(|(s, f)| Terms::of(s).residual(f, x))
        .collect())
}

#[inline]
fn positive<T: Real>(v: T) -> bool {
    v >= T::zero()
}

/// Precomputed normalized basis of one space on a uniform grid.
struct Grid1<T> {
    xs: Vec<T>,
    basis: Vec<T>,
    deriv: Vec<T>,
    m: usize,
}

impl<T: Real> Grid1<T> {
    fn new(terms: &Terms<T>, lo: T, hi: T, cells: usize) -> Self {
        let m = terms.len();
        let h = (hi - lo) / T::from_count(cells);
        let xs: Vec<T> = (0..=cells)
            .map(|j| {
                if j == cells {
                    hi
                } else {
                    lo + h * T::from_count(j)
                }
            })
            .collect();
        let mut basis = Vec::with_capacity(xs.len() * m);
        let mut deriv = Vec::with_capacity(xs.len() * m);
        for &x in &xs {
            let v = terms.normalized_basis(&[x]);
            for (a, &va) in terms.exps_real.iter().zip(&v) {
                deriv.push(a[0] * va);
            }
            basis.extend(v);
        }
        Self {
            xs,
            basis,
            deriv,
            m,
        }
    }

    fn count(&self, terms: &Terms<T>, f: &[T], tol: T, roots: &mut Vec<Vec<T>>) -> u32 {
        let dot = |row: &[T]| row.iter().zip(f).map(|(&b, &c)| b * c).sum::<T>();
        let r: Vec<T> = self.basis.chunks_exact(self.m).map(dot).collect();
        let d: Vec<T> = self.deriv.chunks_exact(self.m).map(dot).collect();
        let value = |x: T| terms.residual(f, &[x]);
        let slope = |x: T| {
            let shift = terms.shift(&[x]);
            terms.eval_shifted(f, &[x], shift).1[0]
        };
        let mut flags = 0;
        for j in 0..self.xs.len() - 1 {
            let (a, b) = (self.xs[j], self.xs[j + 1]);
            if positive(r[j]) != positive(r[j + 1]) {
                roots.push(vec![bisect(a, b, positive(r[j]), tol, |x| {
                    positive(value(x))
                })]);
            } else if d[j] * d[j + 1] < T::zero() {
                let c = bisect(a, b, positive(d[j]), tol, |x| positive(slope(x)));
                if positive(value(c)) != positive(r[j]) {
                    roots.push(vec![bisect(a, c, positive(r[j]), tol, |x| {
                        positive(value(x))
                    })]);
                    roots.push(vec![bisect(c, b, !positive(r[j]), tol, |x| {
                        positive(value(x))
                    })]);
                    flags |= TANGENCY_REFINED;
                }
            }
        }
        flags
    }
}

/// Shrinks `[a, b]` with `sign(a) = left` to width `tol`; returns the midpoint.
fn bisect<T: Real>(mut a: T, mut b: T, left: bool, tol: T, sign: impl Fn(T) -> bool) -> T {
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let mid = T::lit(0.5) * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if sign(mid) == left {
            a = mid;
        } else {
            b = mid;
        }
    }
    T::lit(0.5) * (a + b)
}

/// Precomputed normalized bases of two spaces on a `(cells+1)²` grid.
struct Grid2<T> {
    lo: [T; 2],
    hi: [T; 2],
    h: [T; 2],
    cells: usize,
    basis: [Vec<T>; 2],
    m: [usize; 2],
}

enum NewtonOutcome<T> {
    Converged([T; 2]),
    Escaped,
    Failed,
}

impl<T: Real> Grid2<T> {
    fn new(terms: [&Terms<T>; 2], b: &DomainBox<T>, cells: usize) -> Self {
        let lo = [b.lo()[0], b.lo()[1]];
        let hi = [b.hi()[0], b.hi()[1]];
        let h = [
            (hi[0] - lo[0]) / T::from_count(cells),
            (hi[1] - lo[1]) / T::from_count(cells),
        ];
        let pts = cells + 1;
        let mut basis = [
            Vec::with_capacity(pts * pts * terms[0].len()),
            Vec::with_capacity(pts * pts * terms[1].len()),
        ];
        for i in 0..pts {
            for j in 0..pts {
                let x = [
                    Self::coord(lo[0], hi[0], h[0], i, cells),
                    Self::coord(lo[1], hi[1], h[1], j, cells),
                ];
                for k in 0..2 {
                    basis[k].extend(terms[k].normalized_basis(&x));
                }
            }
        }
        Self {
            lo,
            hi,
            h,
            cells,
            basis,
            m: [terms[0].len(), terms[1].len()],
        }
    }

    fn coord(lo: T, hi: T, h: T, i: usize, cells: usize) -> T {
        if i == cells {
            hi
        } else {
            lo + h * T::from_count(i)
        }
    }

    fn count(&self, terms: [&Terms<T>; 2], f: [&[T]; 2], roots: &mut Vec<Vec<T>>) -> u32 {
        let residuals: Vec<Vec<bool>> = (0..2)
            .map(|k| {
                self.basis[k]
                    .chunks_exact(self.m[k])
                    .map(|row| positive(row.iter().zip(f[k]).map(|(&b, &c)| b * c).sum::<T>()))
                    .collect()
            })
            .collect();
        let pts = self.cells + 1;
        let mixed = |s: &[bool], i: usize, j: usize| {
            let c = [
                s[i * pts + j],
                s[i * pts + j + 1],
                s[(i + 1) * pts + j],
                s[(i + 1) * pts + j + 1],
            ];
            c.iter().any(|&v| v) && c.iter().any(|&v| !v)
        };
        let mut flags = 0;
        let mut found: Vec<[T; 2]> = Vec::new();
        let radius = T::lit(DEDUP_RADIUS);
        for i in 0..self.cells {
            for j in 0..self.cells {
                if !(mixed(&residuals[0], i, j) && mixed(&residuals[1], i, j)) {
                    continue;
                }
                let x0 = [
                    self.lo[0] + self.h[0] * (T::from_count(i) + T::lit(0.5)),
                    self.lo[1] + self.h[1] * (T::from_count(j) + T::lit(0.5)),
                ];
                match self.newton(terms, f, x0) {
                    NewtonOutcome::Converged(x) => {
                        let inside = (0..2).all(|k| x[k] >= self.lo[k] && x[k] < self.hi[k]);
                        let duplicate = found
                            .iter()
                            .any(|y| (0..2).all(|k| (x[k] - y[k]).abs() <= radius));
                        if inside && !duplicate {
                            found.push(x);
                        }
                    }
                    NewtonOutcome::Escaped => flags |= NEWTON_ESCAPED,
                    NewtonOutcome::Failed => flags |= NEWTON_FAILED,
                }
            }
        }
        roots.extend(found.into_iter().map(|x| x.to_vec()));
        flags
    }

    /// Damped Newton on both equations, each scaled by a fixed factor taken
    /// at the starting point.
    fn newton(&self, terms: [&Terms<T>; 2], f: [&[T]; 2], x0: [T; 2]) -> NewtonOutcome<T> {
        let shifts = [terms[0].shift(&x0), terms[1].shift(&x0)];
        let eval = |x: &[T; 2]| {
            let (g0, j0) = terms[0].eval_shifted(f[0], x, shifts[0]);
            let (g1, j1) = terms[1].eval_shifted(f[1], x, shifts[1]);
            ([g0, g1], [[j0[0], j0[1]], [j1[0], j1[1]]])
        };
        let norm = |g: &[T; 2]| g[0].abs().max(g[1].abs());
        let margin = [self.h[0] * T::lit(4.0), self.h[1] * T::lit(4.0)];
        let mut x = x0;
        let (mut g, mut jac) = eval(&x);
        for _ in 0..60 {
            if norm(&g) == T::zero() {
                return NewtonOutcome::Converged(x);
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det == T::zero() || !det.is_finite() {
                return NewtonOutcome::Failed;
            }
            let mut dx = [
                -(jac[1][1] * g[0] - jac[0][1] * g[1]) / det,
                -(-jac[1][0] * g[0] + jac[0][0] * g[1]) / det,
            ];
            let big = dx[0].abs().max(dx[1].abs());
            if big > T::one() {
                dx = [dx[0] / big, dx[1] / big];
            }
            let scale = T::one() + x[0].abs().max(x[1].abs());
            if big <= T::lit(1e-13) * scale {
                return NewtonOutcome::Converged([x[0] + dx[0], x[1] + dx[1]]);
            }
            let mut t = T::one();
            let mut accepted = None;
            for _ in 0..40 {
                let xn = [x[0] + t * dx[0], x[1] + t * dx[1]];
                let (gn, jn) = eval(&xn);
                if gn[0].is_finite() && gn[1].is_finite() && norm(&gn) < norm(&g) {
                    accepted = Some((xn, gn, jn));
                    break;
                }
                t = t * T::lit(0.5);
            }
            match accepted {
                Some((xn, gn, jn)) => {
                    x = xn;
                    g = gn;
                    jac = jn;
                }
                None => {
                    return if big <= T::lit(1e-9) * scale {
                        NewtonOutcome::Converged(x)
                    } else {
                        NewtonOutcome::Failed
                    };
                }
            }
            if (0..2).any(|k| x[k] < self.lo[k] - margin[k] || x[k] > self.hi[k] + margin[k]) {
                return NewtonOutcome::Escaped;
            }
        }
        NewtonOutcome::Failed
    }
}

fn sample_of<T: Real>(
    sys: &SampledSystem<T>,
    flags: u32,
    roots: Vec<Vec<T>>,
) -> RootCountSample<T> {
    RootCountSample {
        count: roots.len(),
        seed: sys.seed,
        index: sys.index,
        flags,
        roots,
    }
}

/// Real roots of a one-variable system in an interval: sign changes on a
/// grid of `cells` half-open cells, refined by bisection to width `tol`, with
/// a guard for cells hiding a pair of roots.
pub fn count_roots_1d_with<T: Real>(
    sys: &SampledSystem<T>,
    interval: &DomainBox<T>,
    cells: usize,
    tol: T,
) -> Result<RootCountSample<T>> {
    Error::check_dim(1, sys.dim())?;
    Error::check_dim(1, interval.dim())?;
    if cells == 0 || !(tol > T::zero()) {
        return Err(Error::validation("cells and tolerance must be positive"));
    }
    let terms = Terms::of(&sys.spaces[0]);
    let grid = Grid1::new(&terms, interval.lo()[0], interval.hi()[0], cells);
    let mut roots = Vec::new();
    let flags = grid.count(&terms, &sys.coefficients[0], tol, &mut roots);
    Ok(sample_of(sys, flags, roots))
}

pub fn count_roots_1d<T: Real>(
    sys: &SampledSystem<T>,
    interval: &DomainBox<T>,
    tol: T,
) -> Result<RootCountSample<T>> {
    count_roots_1d_with(sys, interval, DEFAULT_CELLS_1D, tol)
}

/// Transversal intersections of the two zero curves inside a box: candidate
/// cells where both residuals change sign, each refined by damped Newton
/// from its center, converged roots deduplicated.
pub fn count_roots_2d<T: Real>(
    sys: &SampledSystem<T>,
    region: &DomainBox<T>,
    cells: usize,
) -> Result<RootCountSample<T>> {
    Error::check_dim(2, sys.dim())?;
    Error::check_dim(2, region.dim())?;
    if cells == 0 {
        return Err(Error::validation("cells must be positive"));
    }
    let terms = [Terms::of(&sys.spaces[0]), Terms::of(&sys.spaces[1])];
    let grid = Grid2::new([&terms[0], &terms[1]], region, cells);
    let mut roots = Vec::new();
    let flags = grid.count(
        [&terms[0], &terms[1]],
        [&sys.coefficients[0], &sys.coefficients[1]],
        &mut roots,
    );
    Ok(sample_of(sys, flags, roots))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    pub cells_1d: usize,
    pub cells_2d: usize,
    pub tolerance: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            cells_1d: DEFAULT_CELLS_1D,
            cells_2d: DEFAULT_CELLS_2D,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate<T> {
    pub mean: T,
    pub stderr: T,
    pub samples: usize,
    /// Samples with at least one flag set.
    pub flagged: usize,
    /// Bitwise union of all sample flags.
    pub flags: u32,
}

impl<T: Real> MonteCarloEstimate<T> {
    /// `(value − mean)/stderr`; infinite when the standard error vanishes
    /// and the values differ.
    pub fn z_score(&self, value: T) -> T {
        let diff = value - self.mean;
        if self.stderr > T::zero() {
            diff / self.stderr
        } else if diff == T::zero() {
            T::zero()
        } else {
            T::infinity()
        }
    }
}

/// Grids for one orthant piece.
enum PieceGrid<T> {
    One(Grid1<T>),
    Two(Grid2<T>),
}

/// Mean and standard error of the root count over `samples` independent
/// systems. Orthant pieces of a signed region are handled by reflecting the
/// coefficients, `fₐ ↦ sᵃ fₐ`.
pub fn estimate_expected_roots_with<T: Real>(
    spaces: &[ExpSumSpace<T>],
    region: &impl Region<T>,
    samples: usize,
    seed: u64,
    cfg: &MonteCarloConfig,
) -> Result<MonteCarloEstimate<T>> {
    let n = check_system(spaces, 2)?;
    Error::check_dim(n, region.dim())?;
    if samples == 0 {
        return Err(Error::validation("need at least one sample"));
    }
    if cfg.cells_1d == 0 || cfg.cells_2d == 0 || !(cfg.tolerance > 0.0) {
        return Err(Error::validation(
            "Monte Carlo grid sizes and tolerance must be positive",
        ));
    }
    let terms: Vec<Terms<T>> = spaces.iter().map(Terms::of).collect();
    let pieces: Vec<(SignVector, PieceGrid<T>)> = region
        .signed_log_boxes()?
        .into_iter()
        .map(|(s, b)| {
            let grid = if n == 1 {
                PieceGrid::One(Grid1::new(&terms[0], b.lo()[0], b.hi()[0], cfg.cells_1d))
            } else {
                PieceGrid::Two(Grid2::new([&terms[0], &terms[1]], &b, cfg.cells_2d))
            };
            (s, grid)
        })
        .collect();
    let tol = T::lit(cfg.tolerance);
    let results: Vec<(usize, u32)> = (0..samples as u64)
        .into_par_iter()
        .map(|index| {
            let f = draw(spaces, seed, index);
            let mut roots = Vec::new();
            let mut flags = 0;
            for (s, grid) in &pieces {
                let fs: Vec<Vec<T>> = terms
                    .iter()
                    .zip(&f)
                    .map(|(t, fi)| t.signed(fi, s))
                    .collect();
                flags |= match grid {
                    PieceGrid::One(g) => g.count(&terms[0], &fs[0], tol, &mut roots),
                    PieceGrid::Two(g) => {
                        g.count([&terms[0], &terms[1]], [&fs[0], &fs[1]], &mut roots)
                    }
                };
            }
            (roots.len(), flags)
        })
        .collect();
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    let mut flagged = 0;
    let mut all_flags = 0;
    for &(c, fl) in &results {
        sum += c as u128;
        sum_sq += (c * c) as u128;
        if fl != 0 {
            flagged += 1;
        }
        all_flags |= fl;
    }
    let (mean, stderr) = mean_and_stderr(sum as f64, sum_sq as f64, samples);
    Ok(MonteCarloEstimate {
        mean: T::lit(mean),
        stderr: T::lit(stderr),
        samples,
        flagged,
        flags: all_flags,
    })
}

pub fn estimate_expected_roots<T: Real>(
    spaces: &[ExpSumSpace<T>],
    region: &impl Region<T>,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate<T>> {
    estimate_expected_roots_with(spaces, region, samples, seed, &MonteCarloConfig::default())
}

fn mean_and_stderr(sum: f64, sum_sq: f64, samples: usize) -> (f64, f64) {
    let n = samples as f64;
    let mean = sum / n;
    if samples < 2 {
        return (mean, f64::INFINITY);
    }
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMean<T> {
    pub mean: T,
    pub stderr: T,
    pub samples: usize,
}

fn psd_sqrt<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    let n = m.dim();
    if n == 1 {
        return Matrix::from_diag(&[m[(0, 0)].max(T::zero()).sqrt()]);
    }
    let (vals, vecs) = m.symmetric_eigen();
    let mut out = Matrix::zeros(n);
    for (k, &l) in vals.iter().enumerate() {
        let s = l.max(T::zero()).sqrt();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += vecs[(i, k)] * s * vecs[(j, k)];
            }
        }
    }
    out
}

const ABS_DET_CHUNK: u64 = 1024;

/// Mean of `|det R|` over matrices whose rows are independent with
/// `rᵢ ~ N(0, covᵢ)`.
pub fn estimate_abs_det<T: Real>(
    covariances: &[Matrix<T>],
    samples: usize,
    seed: u64,
) -> Result<SampleMean<T>> {
    let n = covariances.len();
    if n == 0 {
        return Err(Error::validation("need at least one covariance"));
    }
    if n > 4 {
        return Err(Error::UnsupportedDimension {
            dim: n,
            max: 4,
            what: "absolute determinant sampling",
        });
    }
    if samples == 0 {
        return Err(Error::validation("need at least one sample"));
    }
    for c in covariances {
        Error::check_dim(n, c.dim())?;
        let scale = T::one().max(c.max_abs());
        if !c.is_symmetric(T::lit(1e-12) * scale)
            || c.rows().iter().flatten().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidBody(
                "covariance must be symmetric and finite".into(),
            ));
        }
        if n > 1 && c.symmetric_eigenvalues()[0] < -T::lit(1e-10) * scale {
            return Err(Error::InvalidBody(
                "covariance must be positive semidefinite".into(),
            ));
        }
    }
    let roots: Vec<Matrix<T>> = covariances.iter().map(psd_sqrt).collect();
    let chunks = (samples as u64).div_ceil(ABS_DET_CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = ABS_DET_CHUNK.min(samples as u64 - chunk * ABS_DET_CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            let mut z = vec![T::zero(); n];
            for _ in 0..count {
                let mut rows = Vec::with_capacity(n);
                for r in &roots {
                    for v in z.iter_mut() {
                        *v = T::lit(rng.sample::<f64, _>(StandardNormal));
                    }
                    rows.push(r.mul_vec(&z));
                }
                let d = Coefficient::to_f64(&Matrix::from_rows(&rows).det().abs());
                s += d;
                s2 += d * d;
            }
            (s, s2)
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), &(c, d)| (a + c, b + d));
    let (mean, stderr) = mean_and_stderr(sum, sum_sq, samples);
    Ok(SampleMean {
        mean: T::lit(mean),
        stderr: T::lit(stderr),
        samples,
    })
}
