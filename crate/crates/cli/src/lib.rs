//! Command-line front end for `kernel-roots`.
//!
//! Every command prints one canonical JSON document on standard output and
//! reports through its exit status: 0 success, 1 verification failure,
//! 2 input error, 3 unsupported configuration.

pub mod domain_spec;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kernel_roots::convex::{mixed_volume_polytopes, MixedVolumeRule, DEFAULT_SPHERE_FACES};
use kernel_roots::expectation::{density, density_profile, expected_roots, generic_count};
use kernel_roots::kernel::local_geometry;
use kernel_roots::montecarlo::{self, estimate_expected_roots, MonteCarloEstimate};
use kernel_roots::verify::{run_suite, SuiteOptions, SUITES};
use kernel_roots::{
    Domain, Error, LatticePolytope, LogBox, QuadratureConfig, Region, Signed, Space,
};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::domain_spec::parse_domain;
use crate::report::{canonical, estimate, exact, num, nums};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "KERNEL_ROOTS_THREADS";

/// Agreement band for `--method both`, in standard errors.
const Z_BAND: f64 = 3.0;

const DEFAULT_DOMAIN: &str = "-30:30";

#[derive(Debug, Parser)]
#[command(
    name = "kernel-roots",
    version,
    about = "Expected real roots of random exponential-sum systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Products, powers and support hulls of spaces.
    #[command(subcommand)]
    Space(SpaceCommand),
    /// Potential, momentum, metric and root density at a point.
    Eval(EvalArgs),
    /// Expected number of roots in a domain.
    Expect(ExpectArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Generic number of complex roots in the torus.
    Bkk(BkkArgs),
}

#[derive(Debug, Subcommand)]
pub enum SpaceCommand {
    /// Product of two or more spaces.
    Product {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
    },
    /// `d`-th power of a space.
    Power {
        #[arg(long)]
        d: u32,
        file: PathBuf,
    },
    /// Vertices of the convex hull of the support.
    Hull { file: PathBuf },
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// Gauss–Legendre nodes per axis and cell.
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,
    /// Cells per axis.
    #[arg(long, default_value_t = 8)]
    pub subdiv: usize,
    /// Direction grid for mixed volumes instead of the closed form.
    #[arg(long)]
    pub mv_grid: Option<usize>,
}

impl QuadArgs {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            nodes_per_axis: self.nodes,
            subdivisions: self.subdiv,
            mv_rule: self
                .mv_grid
                .map_or(MixedVolumeRule::Auto, MixedVolumeRule::Grid),
        }
    }

    fn echo(&self, m: &mut Map<String, Value>) {
        m.insert("nodes".into(), self.nodes.into());
        m.insert("subdiv".into(), self.subdiv.into());
        m.insert(
            "mv_grid".into(),
            self.mv_grid.map_or(Value::Null, Value::from),
        );
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Point in logarithmic coordinates, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Space files; a single file of dimension n stands for n copies.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Quad,
    Mc,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Signs {
    /// The positive orthant only.
    Positive,
    /// All 2ⁿ orthants, each with the same logarithmic domain.
    All,
}

#[derive(Debug, Args)]
pub struct ExpectArgs {
    /// Logarithmic domain, e.g. `-5:5,-1:1+5:6,-1:1`.
    #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_DOMAIN)]
    pub domain: String,
    /// Powers applied to the spaces: one value for all or one per space.
    #[arg(long, value_delimiter = ',')]
    pub degrees: Vec<u32>,
    #[arg(long, value_enum, default_value_t = Method::Quad)]
    pub method: Method,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo systems.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Write the density on a k-point grid per axis as CSV.
    #[arg(long)]
    pub profile: Option<usize>,
    /// Destination of the profile.
    #[arg(long, default_value = "density_profile.csv")]
    pub profile_out: PathBuf,
    #[arg(long, value_enum, default_value_t = Signs::Positive)]
    pub signed: Signs,
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random cases; each suite has its own default.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Monte Carlo samples per case.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct BkkArgs {
    /// Space documents or polytope documents `{"n": .., "vertices": [..]}`;
    /// a single file of dimension n stands for n copies.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

/// A failed command and the exit status it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnsupportedDimension { .. } => EXIT_UNSUPPORTED,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Output of a successful command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

type Run = Result<Outcome, Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<Space, Failure> {
    Space::from_json(&read_text(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Loads the system; one file of dimension n is repeated n times.
fn load_system(files: &[PathBuf]) -> Result<Vec<Space>, Failure> {
    let spaces = files
        .iter()
        .map(|f| load_space(f))
        .collect::<Result<Vec<_>, _>>()?;
    if spaces.len() == 1 {
        let n = spaces[0].dim();
        return Ok(vec![spaces[0].clone(); n]);
    }
    let n = spaces.len();
    for (s, f) in spaces.iter().zip(files) {
        if s.dim() != n {
            return Err(Failure::input(format!(
                "{}: space has dimension {}, the system has {n} equations",
                f.display(),
                s.dim()
            )));
        }
    }
    Ok(spaces)
}

fn apply_degrees(spaces: Vec<Space>, degrees: &[u32]) -> Result<Vec<Space>, Failure> {
    let per_space: Vec<u32> = match degrees.len() {
        0 => return Ok(spaces),
        1 => vec![degrees[0]; spaces.len()],
        k if k == spaces.len() => degrees.to_vec(),
        k => {
            return Err(Failure::input(format!(
                "{k} degrees given for {} spaces",
                spaces.len()
            )))
        }
    };
    spaces
        .iter()
        .zip(per_space)
        .map(|(s, d)| s.power(d).map_err(Failure::from))
        .collect()
}

fn parse_point(spec: &str) -> Result<Vec<f64>, Failure> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Failure::input(format!("'{s}' is not a finite number")))
        })
        .collect()
}

fn flag_names(flags: u32) -> Vec<Value> {
    [
        (montecarlo::TANGENCY_REFINED, "TANGENCY_REFINED"),
        (montecarlo::NEWTON_FAILED, "NEWTON_FAILED"),
        (montecarlo::NEWTON_ESCAPED, "NEWTON_ESCAPED"),
    ]
    .iter()
    .filter(|(bit, _)| flags & bit != 0)
    .map(|(_, name)| Value::from(*name))
    .collect()
}

struct Report {
    command: &'static str,
    argv: Vec<String>,
    config: Map<String, Value>,
    results: Vec<Value>,
    flags: Vec<Value>,
    seed: Option<u64>,
    passed: bool,
    extra: Map<String, Value>,
}

impl Report {
    fn new(command: &'static str, argv: &[String]) -> Self {
        Self {
            command,
            argv: argv.to_vec(),
            config: Map::new(),
            results: Vec::new(),
            flags: Vec::new(),
            seed: None,
            passed: true,
            extra: Map::new(),
        }
    }

    fn finish(self, start: Instant) -> Outcome {
        let mut m = self.extra;
        m.insert("command".into(), self.command.into());
        m.insert("argv".into(), self.argv.into());
        m.insert("config".into(), Value::Object(self.config));
        m.insert("results".into(), Value::Array(self.results));
        m.insert("flags".into(), Value::Array(self.flags));
        m.insert("seed".into(), self.seed.map_or(Value::Null, Value::from));
        m.insert(
            "status".into(),
            if self.passed { "pass" } else { "fail" }.into(),
        );
        m.insert("wall_time_s".into(), num(start.elapsed().as_secs_f64()));
        Outcome {
            stdout: canonical(&Value::Object(m)),
            code: if self.passed { EXIT_OK } else { EXIT_VERIFY },
        }
    }
}

fn cmd_space(cmd: &SpaceCommand) -> Run {
    let text = match cmd {
        SpaceCommand::Product { files } => {
            let spaces = files
                .iter()
                .map(|f| load_space(f))
                .collect::<Result<Vec<_>, _>>()?;
            let mut acc = spaces[0].clone();
            for s in &spaces[1..] {
                acc = acc.product(s)?;
            }
            acc.to_json()
        }
        SpaceCommand::Power { d, file } => load_space(file)?.power(*d)?.to_json(),
        SpaceCommand::Hull { file } => {
            let p = LatticePolytope::from(load_space(file)?.support_hull()?);
            serde_json::to_string(&p).expect("polytopes serialize")
        }
    };
    Ok(Outcome {
        stdout: text + "\n",
        code: EXIT_OK,
    })
}

fn cmd_eval(args: &EvalArgs, argv: &[String]) -> Run {
    let start = Instant::now();
    let spaces = load_system(&args.files)?;
    let x = parse_point(&args.at)?;
    let n = spaces.len();
    if x.len() != n {
        return Err(Failure::input(format!(
            "point has {} coordinates, the system has dimension {n}",
            x.len()
        )));
    }
    let cfg = args.quad.config();
    cfg.validate()?;
    let mut r = Report::new("eval", argv);
    args.quad.echo(&mut r.config);
    r.config.insert("at".into(), nums(&x));
    for (k, s) in spaces.iter().enumerate() {
        let g = local_geometry(s, &x);
        let rows: Vec<Value> = g
            .metric
            .matrix()
            .rows()
            .iter()
            .map(|row| nums(row))
            .collect();
        r.results
            .push(exact(&format!("space{}.potential", k + 1), num(g.log_norm)));
        r.results.push(exact(
            &format!("space{}.momentum", k + 1),
            nums(&g.momentum.0),
        ));
        r.results
            .push(exact(&format!("space{}.metric", k + 1), Value::Array(rows)));
    }
    let d = density(&spaces, &x, &cfg)?;
    let all_equal = spaces.windows(2).all(|w| w[0] == w[1]);
    if n == 3 && !all_equal {
        // Coarser direction grid as the error reference.
        let faces = match cfg.mv_rule {
            MixedVolumeRule::Grid(g) => g,
            MixedVolumeRule::Auto => DEFAULT_SPHERE_FACES,
        };
        let coarse = QuadratureConfig {
            mv_rule: MixedVolumeRule::Grid((faces / 4).max(20)),
            ..cfg
        };
        let dc = density(&spaces, &x, &coarse)?;
        r.results.push(estimate("density", num(d), (d - dc).abs()));
    } else if cfg.mv_rule != MixedVolumeRule::Auto && n == 2 && !all_equal {
        let dc = density(
            &spaces,
            &x,
            &QuadratureConfig {
                mv_rule: MixedVolumeRule::Auto,
                ..cfg
            },
        )?;
        r.results.push(estimate("density", num(d), (d - dc).abs()));
    } else {
        r.results.push(exact("density", num(d)));
    }
    Ok(r.finish(start))
}

fn write_profile(
    spaces: &[Space],
    domain: &Domain,
    k: usize,
    cfg: &QuadratureConfig,
    path: &Path,
) -> Result<(), Failure> {
    let n = spaces.len();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for b in domain.boxes() {
        for i in 0..n {
            lo[i] = lo[i].min(b.lo()[i]);
            hi[i] = hi[i].max(b.hi()[i]);
        }
    }
    let rows = density_profile(spaces, &LogBox::new(lo, hi)?, k, cfg)?;
    let header: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain(["density".to_string()])
        .collect();
    let mut csv = header.join(",") + "\n";
    for (x, d) in rows {
        let cells: Vec<String> = x.iter().chain([&d]).map(|v| format!("{v:.16e}")).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    fs::write(path, csv).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn mc_results(r: &mut Report, mc: &MonteCarloEstimate<f64>) {
    let mut m = estimate("mc", num(mc.mean), mc.stderr);
    let obj = m.as_object_mut().expect("estimate is an object");
    obj.insert("samples".into(), mc.samples.into());
    obj.insert("flagged".into(), mc.flagged.into());
    r.results.push(m);
    r.flags.extend(flag_names(mc.flags));
}

fn expect_on(
    args: &ExpectArgs,
    spaces: &[Space],
    region: &impl Region<f64>,
    cfg: &QuadratureConfig,
    r: &mut Report,
) -> Result<(), Failure> {
    let n = spaces.len();
    if args.method != Method::Quad && n > 2 {
        return Err(Failure {
            code: EXIT_UNSUPPORTED,
            message: format!("Monte Carlo supports systems of dimension at most 2, got {n}"),
        });
    }
    let quad = match args.method {
        Method::Mc => None,
        _ => {
            let e = expected_roots(spaces, region, cfg)?;
            r.results.push(estimate("quad", num(e.value), e.error));
            Some(e.value)
        }
    };
    if args.method != Method::Quad {
        let mc = estimate_expected_roots(spaces, region, args.samples, args.seed)?;
        mc_results(r, &mc);
        if let Some(q) = quad {
            let z = mc.z_score(q);
            r.results.push(exact("z_score", num(z)));
            r.passed = z.abs() <= Z_BAND;
        }
    }
    Ok(())
}

fn cmd_expect(args: &ExpectArgs, argv: &[String]) -> Run {
    let start = Instant::now();
    let spaces = apply_degrees(load_system(&args.files)?, &args.degrees)?;
    let n = spaces.len();
    let domain = parse_domain(&args.domain, n).map_err(Failure::input)?;
    let cfg = args.quad.config();
    cfg.validate()?;
    let min_samples = if args.method == Method::Both { 2 } else { 1 };
    if args.method != Method::Quad && args.samples < min_samples {
        return Err(Failure::input(format!(
            "--samples must be at least {min_samples} for method {:?}",
            args.method
        )));
    }
    let mut r = Report::new("expect", argv);
    r.seed = Some(args.seed);
    args.quad.echo(&mut r.config);
    r.config.insert("domain".into(), args.domain.clone().into());
    r.config
        .insert("degrees".into(), args.degrees.clone().into());
    r.config.insert(
        "method".into(),
        format!("{:?}", args.method).to_lowercase().into(),
    );
    r.config.insert("samples".into(), args.samples.into());
    r.config.insert(
        "signed".into(),
        format!("{:?}", args.signed).to_lowercase().into(),
    );
    r.config.insert("dimension".into(), n.into());
    match args.signed {
        Signs::Positive => expect_on(args, &spaces, &domain, &cfg, &mut r)?,
        Signs::All => expect_on(args, &spaces, &Signed::all_orthants(&domain)?, &cfg, &mut r)?,
    }
    if let Some(k) = args.profile {
        write_profile(&spaces, &domain, k, &cfg, &args.profile_out)?;
        r.config.insert("profile".into(), k.into());
        r.extra.insert(
            "profile_path".into(),
            args.profile_out.display().to_string().into(),
        );
    }
    Ok(r.finish(start))
}

fn cmd_verify(args: &VerifyArgs, argv: &[String]) -> Run {
    let start = Instant::now();
    let quadrature = args.quad.config();
    quadrature.validate()?;
    let opts = SuiteOptions {
        seed: args.seed,
        cases: args.cases,
        samples: args.samples,
        quadrature,
    };
    let suite = run_suite(&args.suite, &opts)?;
    let mut r = Report::new("verify", argv);
    r.seed = Some(args.seed);
    args.quad.echo(&mut r.config);
    r.config.insert("suite".into(), args.suite.clone().into());
    r.config
        .insert("cases".into(), args.cases.map_or(Value::Null, Value::from));
    r.config.insert(
        "samples".into(),
        args.samples.map_or(Value::Null, Value::from),
    );
    let checks: Vec<Value> = suite
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "passed": c.passed,
                "value": num(c.value),
                "bound": num(c.bound),
                "detail": c.detail,
            })
        })
        .collect();
    r.results.push(exact("checks", checks.len().into()));
    r.results.push(exact("failures", suite.failures().into()));
    r.extra.insert("checks".into(), Value::Array(checks));
    r.passed = suite.passed();
    Ok(r.finish(start))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeFile {
    n: usize,
    vertices: Vec<Vec<i64>>,
}

fn load_polytope(path: &Path) -> Result<LatticePolytope, Failure> {
    let text = read_text(path)?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: malformed JSON: {e}", path.display())))?;
    if v.get("vertices").is_some() {
        let doc: PolytopeFile = serde_json::from_value(v)
            .map_err(|e| Failure::input(format!("{}: malformed polytope: {e}", path.display())))?;
        if doc.vertices.iter().any(|p| p.len() != doc.n) {
            return Err(Failure::input(format!(
                "{}: vertex dimension differs from n = {}",
                path.display(),
                doc.n
            )));
        }
        Ok(LatticePolytope::hull_of(doc.n, &doc.vertices)?)
    } else {
        let s = Space::from_json(&text)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        Ok(LatticePolytope::from(s.support_hull()?))
    }
}

fn cmd_bkk(args: &BkkArgs, argv: &[String]) -> Run {
    let start = Instant::now();
    let mut polys = args
        .files
        .iter()
        .map(|f| load_polytope(f))
        .collect::<Result<Vec<_>, _>>()?;
    if polys.len() == 1 {
        polys = vec![polys[0].clone(); polys[0].dim()];
    }
    let n = polys.len();
    if let Some(p) = polys.iter().find(|p| p.dim() != n) {
        return Err(Failure::input(format!(
            "polytope of dimension {} in a system of {n} equations",
            p.dim()
        )));
    }
    let count = generic_count(&polys)?;
    let mv = mixed_volume_polytopes(&polys)?;
    let mut r = Report::new("bkk", argv);
    r.config.insert("dimension".into(), n.into());
    let count = i64::try_from(count).map_err(|_| Failure {
        code: EXIT_UNSUPPORTED,
        message: "count exceeds 64 bits".into(),
    })?;
    r.results.push(exact("generic_count", count.into()));
    r.results.push(exact(
        "mixed_volume",
        format!("{}/{}", mv.numer(), mv.denom()).into(),
    ));
    Ok(r.finish(start))
}

/// Worker cap from the environment: `None` when unset.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, Failure> {
    match value {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Failure::input(format!(
                "{THREADS_ENV} must be a positive integer, got '{s}'"
            ))),
        },
    }
}

/// Runs a parsed command. `argv` is echoed into the report.
pub fn execute(cli: &Cli, argv: &[String]) -> Run {
    match &cli.command {
        Command::Space(cmd) => cmd_space(cmd),
        Command::Eval(args) => cmd_eval(args, argv),
        Command::Expect(args) => cmd_expect(args, argv),
        Command::Verify(args) => cmd_verify(args, argv),
        Command::Bkk(args) => cmd_bkk(args, argv),
    }
}
