//! Randomized property suites shared by the command line tool and the test
//! suite. Every suite is deterministic in its seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::convex::{
    expected_abs_det_gaussian, tech_identity_residual, LatticePolytope, MixedVolumeRule,
};
use crate::error::{Error, Result};
use crate::expectation::{cube_domain, scaling_check, subadditivity_check, QuadratureConfig};
use crate::kernel::{log_kernel_norm, metric};
use crate::lattice::affine_rank;
use crate::linalg::Matrix;
use crate::montecarlo::estimate_abs_det;
use crate::space::ExpSumSpace;

pub const SUITES: [&str; 5] = ["identities", "additivity", "scaling", "subadd", "vitale"];

/// Random space on `ℝⁿ` with `2..=max_terms` distinct exponents in
/// `[0, max_exp]ⁿ` whose convex hull is full-dimensional, and squared
/// coefficients in `[0.25, 4]`.
pub fn random_space(
    rng: &mut impl Rng,
    n: usize,
    max_terms: usize,
    max_exp: i64,
) -> ExpSumSpace<f64> {
    let min_terms = n + 1;
    let lattice_points = ((max_exp + 1) as usize).pow(n as u32);
    let max_terms = max_terms.max(min_terms).min(lattice_points);
    loop {
        let k = rng.gen_range(min_terms..=max_terms);
        let mut exps: Vec<Vec<i64>> = Vec::new();
        while exps.len() < k {
            let e: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=max_exp)).collect();
            if !exps.contains(&e) {
                exps.push(e);
            }
        }
        if affine_rank(&exps) < n {
            continue;
        }
        let terms = exps
            .into_iter()
            .map(|e| (e, 0.25 * 16f64.powf(rng.gen::<f64>())))
            .collect::<Vec<_>>();
        return ExpSumSpace::new(n, terms).expect("valid random space");
    }
}

/// Random lattice polygon with 3 to 6 generating points in `[0, 4]²` and
/// nonzero area.
pub fn random_lattice_polygon(rng: &mut impl Rng) -> LatticePolytope {
    loop {
        let k = rng.gen_range(3..=6);
        let pts: Vec<Vec<i64>> = (0..k)
            .map(|_| vec![rng.gen_range(0..=4), rng.gen_range(0..=4)])
            .collect();
        if affine_rank(&pts) == 2 {
            return LatticePolytope::hull_of(2, &pts).expect("planar points");
        }
    }
}

/// `AAᵀ` for a standard Gaussian `A`, scaled by a random factor in `[0.5, 2]`.
pub fn random_covariance(rng: &mut impl Rng, n: usize) -> Matrix<f64> {
    let a = Matrix::from_rows(
        &(0..n)
            .map(|_| {
                (0..n)
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect::<Vec<_>>(),
    );
    let scale = 0.5 * 4f64.powf(rng.gen::<f64>());
    a.mul(&a.transpose()).scaled(scale)
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// The checked quantity (residual, error, ratio, z-score, ...).
    pub value: f64,
    /// The bound it was compared against.
    pub bound: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Number of random cases; each suite has its own default.
    pub cases: Option<usize>,
    /// Monte Carlo samples per case (vitale only).
    pub samples: Option<usize>,
    pub quadrature: QuadratureConfig,
}

impl SuiteOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            cases: None,
            samples: None,
            quadrature: QuadratureConfig::default(),
        }
    }
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    let checks = match name {
        "identities" => identities(),
        "additivity" => additivity(opts.seed, opts.cases.unwrap_or(100)),
        "scaling" => scaling(opts.seed, opts.cases.unwrap_or(20), &opts.quadrature)?,
        "subadd" => subadditivity(opts.seed, opts.cases.unwrap_or(50), &opts.quadrature)?,
        "vitale" => vitale(
            opts.seed,
            opts.cases.unwrap_or(20),
            opts.samples.unwrap_or(1_000_000),
            opts.quadrature.mv_rule,
        )?,
        other => {
            return Err(Error::validation(format!(
                "unknown suite '{other}' (expected one of {SUITES:?})"
            )))
        }
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        seed: opts.seed,
        checks,
    })
}

fn check(name: String, value: f64, bound: f64, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        value,
        bound,
        detail,
    }
}

/// `n!/(2π)ⁿ · Vol(Bⁿ) · Vol(ℝPⁿ) = 1` for `n = 1..12`.
fn identities() -> Vec<CheckOutcome> {
    (1..=12)
        .map(|n| {
            let r = tech_identity_residual::<f64>(n).abs();
            check(
                format!("volume identity n={n}"),
                r,
                1e-12,
                r < 1e-12,
                String::new(),
            )
        })
        .collect()
}

/// `½ D²φ` by central differences.
fn fd_metric(space: &ExpSumSpace<f64>, x: &[f64], h: f64) -> Matrix<f64> {
    let n = x.len();
    let phi = |dx: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(k, d) in dx {
            y[k] += d;
        }
        log_kernel_norm(space, &y)
    };
    let mut g = Matrix::zeros(n);
    let p0 = phi(&[]);
    for i in 0..n {
        g[(i, i)] = 0.5 * (phi(&[(i, h)]) - 2.0 * p0 + phi(&[(i, -h)])) / (h * h);
        for j in 0..i {
            let v = (phi(&[(i, h), (j, h)]) - phi(&[(i, h), (j, -h)]) - phi(&[(i, -h), (j, h)])
                + phi(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            g[(i, j)] = 0.5 * v;
            g[(j, i)] = 0.5 * v;
        }
    }
    g
}

/// Metric additivity `G_{BC} = G_B + G_C` and `G = ½D²φ`.
fn additivity(seed: u64, cases: usize) -> Vec<CheckOutcome> {
    let mut rng = rng_for(seed, 1);
    let mut out = Vec::new();
    let mut worst_add: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    for _ in 0..cases {
        let n = rng.gen_range(1..=3);
        let b = random_space(&mut rng, n, 5, 3);
        let c = random_space(&mut rng, n, 5, 3);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let bc = b.product(&c).expect("same dimension");
        let gb = metric(&b, &x).0;
        let gc = metric(&c, &x).0;
        let gbc = metric(&bc, &x).0;
        worst_add = worst_add.max(gbc.max_abs_diff(&gb.add(&gc)));
        let coarse = fd_metric(&bc, &x, 2e-3);
        let fine = fd_metric(&bc, &x, 1e-3);
        let fd = fine.scaled(4.0 / 3.0).add(&coarse.scaled(-1.0 / 3.0));
        worst_fd = worst_fd.max(fd.max_abs_diff(&gbc) / gbc.max_abs().max(1e-300));
    }
    out.push(check(
        format!("metric additivity over {cases} pairs"),
        worst_add,
        1e-9,
        worst_add < 1e-9,
        "max entry of |G_BC - G_B - G_C|".into(),
    ));
    out.push(check(
        format!("half Hessian of the potential over {cases} points"),
        worst_fd,
        1e-5,
        worst_fd < 1e-5,
        "max relative entry error against extrapolated central differences".into(),
    ));
    out
}

fn scaling(seed: u64, cases: usize, cfg: &QuadratureConfig) -> Result<Vec<CheckOutcome>> {
    let mut rng = rng_for(seed, 2);
    let mut out = Vec::new();
    for case in 0..cases {
        let n = rng.gen_range(1..=2);
        let spaces: Vec<_> = (0..n).map(|_| random_space(&mut rng, n, 5, 4)).collect();
        let degrees: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
        let dom = cube_domain(n, -20.0, 20.0)?;
        let r = scaling_check(&spaces, &degrees, &dom, cfg)?;
        let rel = (r.ratio - r.expected_ratio).abs() / r.expected_ratio;
        out.push(check(
            format!("scaling case {case} n={n} degrees={degrees:?}"),
            rel,
            5e-3,
            rel < 5e-3,
            format!("ratio {:.12} expected {:.12}", r.ratio, r.expected_ratio),
        ));
    }
    Ok(out)
}

fn subadditivity(seed: u64, cases: usize, cfg: &QuadratureConfig) -> Result<Vec<CheckOutcome>> {
    let mut rng = rng_for(seed, 3);
    let mut out = Vec::new();
    for case in 0..cases {
        let n = rng.gen_range(1..=2);
        let fixed: Vec<_> = (0..n - 1)
            .map(|_| random_space(&mut rng, n, 5, 3))
            .collect();
        let g = random_space(&mut rng, n, 4, 3);
        let h = random_space(&mut rng, n, 4, 3);
        let dom = cube_domain(n, -10.0, 10.0)?;
        let r = subadditivity_check(&fixed, &g, &h, &dom, cfg)?;
        out.push(check(
            format!("subadditivity case {case} n={n}"),
            r.slack,
            -1e-6,
            r.slack >= -1e-6,
            format!("lhs {:.12} rhs {:.12}", r.lhs, r.rhs_sum),
        ));
    }
    Ok(out)
}

/// Closed-form `E|det|` against sampling: the identity pair first, then
/// random covariance tuples.
fn vitale(
    seed: u64,
    cases: usize,
    samples: usize,
    rule: MixedVolumeRule,
) -> Result<Vec<CheckOutcome>> {
    let mut rng = rng_for(seed, 4);
    let mut tuples = vec![vec![Matrix::identity(2), Matrix::identity(2)]];
    let mut dims: Vec<usize> = (0..cases).map(|k| 1 + k % 3).collect();
    dims.shuffle(&mut rng);
    for n in dims {
        tuples.push((0..n).map(|_| random_covariance(&mut rng, n)).collect());
    }
    let mut out = Vec::new();
    for (k, covs) in tuples.iter().enumerate() {
        let closed = expected_abs_det_gaussian(covs, rule)?;
        let mc = estimate_abs_det(covs, samples, seed.wrapping_add(k as u64))?;
        let z = (closed - mc.mean).abs() / mc.stderr;
        let name = if k == 0 {
            "vitale identity n=2".to_string()
        } else {
            format!("vitale case {} n={}", k - 1, covs.len())
        };
        out.push(check(
            name,
            z,
            3.0,
            z <= 3.0,
            format!(
                "closed form {closed:.9} sampled {:.9} +- {:.2e}",
                mc.mean, mc.stderr
            ),
        ));
    }
    Ok(out)
}
