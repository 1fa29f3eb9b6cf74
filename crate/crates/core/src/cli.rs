//! Command-line front end. Reports are JSON (or CSV for grid data) with the run
//! configuration embedded, so equal inputs and seeds give byte-identical output.
//!
//! Exit codes: 0 success, 2 malformed input, 3 numeric failure or failed checks.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fredholm::{
    self, AlgebraElement, BlockDiagonalHom, BlockTriangular, ExactSpectrum, Excluded, IdentityHom,
    SpectrumKind, SpectrumReport,
};
use crate::grid::GridSpec;
use crate::qmat::{QMatrix, SpectrumOptions};
use crate::quat::Quaternion;
use crate::random::{self, SuiteRng};
use crate::shiftlab::{self, ShiftOp};
use crate::sresolvent;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "sspec",
    version,
    about = "S-spectra of quaternionic matrices and shift operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// S-spectrum of a matrix (JSON `{"n", "entries"}`).
    Spectrum(SpectrumArgs),
    /// `σ_min(R_q(A))` over a grid of spheres.
    Scan(ScanArgs),
    /// Series and coefficient residuals of the S-resolvent at `q`.
    Resolvent(ResolventArgs),
    /// Fredholm S-spectrum relative to a homomorphism.
    FredholmSpectrum(HomArgs),
    /// Weyl S-spectrum relative to a homomorphism.
    WeylSpectrum(HomArgs),
    /// Boundary S-spectrum.
    BoundarySpectrum(HomArgs),
    /// Randomised checks of the spectral theorems.
    Verify(VerifyArgs),
    /// Shift-plus-finite-rank operators.
    #[command(subcommand)]
    Shift(ShiftCommand),
}

#[derive(Args, Debug)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub dedup_tol: Option<f64>,
    #[arg(long)]
    pub verify_tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    pub input: PathBuf,
    /// `u0,u1,rmax,step`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: GridSpec,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ResolventArgs {
    pub input: PathBuf,
    /// `w` or `w,x,y,z`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_quaternion)]
    pub q: Quaternion,
    #[arg(long, default_value_t = 60)]
    pub n: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Hom {
    /// Matrices with the identity map.
    Identity,
    /// Block upper-triangular `2k×2k` matrices with the diagonal-block map.
    Block,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exclude {
    None,
    Zero,
    Hp0,
}

impl From<Exclude> for Excluded {
    fn from(e: Exclude) -> Self {
        match e {
            Exclude::None => Excluded::None,
            Exclude::Zero => Excluded::Zero,
            Exclude::Hp0 => Excluded::Hp0,
        }
    }
}

#[derive(Args, Debug)]
pub struct HomArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "identity")]
    pub hom: Hom,
    #[arg(long, value_enum, default_value = "none")]
    pub exclude: Exclude,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Sum,
    Inverse,
    Product,
    IdentityE1,
    Boundary,
    ShiftBoundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    Matrix,
    Block,
    Both,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub algebra: Option<Algebra>,
    /// Matrix (or block) size for random instances.
    #[arg(long, default_value_t = 3)]
    pub size: usize,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_quaternion)]
    pub q: Option<Quaternion>,
    #[arg(long)]
    pub n: Option<u32>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct OpArgs {
    /// `R`, `T`, `RT`, `V`, `Su` or `I`.
    #[arg(long, conflicts_with = "op_file")]
    pub op: Option<String>,
    /// JSON operator `{"coeff", "power", "fin", "terms"?, "domain"?}`.
    #[arg(long)]
    pub op_file: Option<PathBuf>,
    /// Use the operator raised to this power.
    #[arg(long, default_value_t = 1)]
    pub power: u32,
}

#[derive(Subcommand, Debug)]
pub enum ShiftCommand {
    /// Fredholm and Weyl S-spectra over a grid.
    Spectrum {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "-1.5,1.5,1.5,0.05")]
        grid: GridSpec,
        /// Window half-width for the residual column.
        #[arg(long, default_value_t = 20)]
        window: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Kernel, cokernel and index (of `R_q(T)` when `--q` is given).
    Index {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_quaternion)]
        q: Option<Quaternion>,
        #[command(flatten)]
        output: Output,
    },
    /// Operator norm estimate on a window.
    Norm {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// `(R + T_{qⁿ})² → R²` for `n = 1..N`.
    Boundary {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_quaternion, default_value = "0.5")]
        q: Quaternion,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=60))]
        n: u32,
        #[command(flatten)]
        output: Output,
    },
}

/// Parses `w` or `w,x,y,z`.
pub fn parse_quaternion(s: &str) -> Result<Quaternion> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Input(format!("quaternion `{s}`: {e}")))?;
    let q = match *parts.as_slice() {
        [w] => Quaternion::real(w),
        [w, x, y, z] => Quaternion::new(w, x, y, z),
        _ => {
            return Err(Error::Input(format!(
                "quaternion `{s}` must be `w` or `w,x,y,z`"
            )))
        }
    };
    if !q.to_array().iter().all(|v| v.is_finite()) {
        return Err(Error::Input(format!("quaternion `{s}` is not finite")));
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub invertibility: f64,
    pub dedup: f64,
}

/// Reproducibility header embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    pub tolerances: Tolerances,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
}

impl RunConfig {
    fn new(command: &str, tolerances: Tolerances) -> Self {
        Self {
            command: command.into(),
            inputs: Vec::new(),
            grid: None,
            tolerances,
            format: Format::Json,
            seed: None,
            params: BTreeMap::new(),
        }
    }

    fn input(mut self, p: &Path) -> Self {
        self.inputs.push(p.display().to_string());
        self
    }

    fn param(mut self, k: &str, v: impl Serialize) -> Self {
        self.params
            .insert(k.into(), serde_json::to_value(v).expect("plain data"));
        self
    }

    fn csv_header(&self) -> String {
        format!("# {}\n", serde_json::to_string(self).expect("plain data"))
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a RunConfig,
    result: T,
}

fn json_report<T: Serialize>(config: &RunConfig, result: T) -> String {
    let mut s = serde_json::to_string_pretty(&Report { config, result }).expect("plain data");
    s.push('\n');
    s
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_matrix(path: &Path) -> Result<QMatrix> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn read_op(args: &OpArgs) -> Result<(ShiftOp, String)> {
    let (op, label) = match (&args.op, &args.op_file) {
        (Some(name), None) => (ShiftOp::named(name)?, name.clone()),
        (None, Some(path)) => (
            ShiftOp::from_json(&fs::read_to_string(path)?)?,
            path.display().to_string(),
        ),
        _ => return Err(Error::Input("give exactly one of --op or --op-file".into())),
    };
    Ok((op.powi(args.power), label))
}

fn matrix_tolerances(a: &QMatrix) -> Tolerances {
    let o = SpectrumOptions::for_matrix(a);
    Tolerances {
        invertibility: a.default_tol(),
        dedup: o.dedup_tol,
    }
}

fn shift_tolerances() -> Tolerances {
    Tolerances {
        invertibility: 1e-6,
        dedup: fredholm::SET_TOL,
    }
}

/// Exit code of a finished run.
pub fn exit_code(res: &Result<bool>) -> i32 {
    match res {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_NUMERIC,
        Err(e) if e.is_numeric() => EXIT_NUMERIC,
        Err(_) => EXIT_INPUT,
    }
}

/// Runs a parsed command. `Ok(false)` means the report was written but some check failed.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Spectrum(a) => run_spectrum(a),
        Command::Scan(a) => run_scan(a),
        Command::Resolvent(a) => run_resolvent(a),
        Command::FredholmSpectrum(a) => run_hom(a, SpectrumKind::FredholmS),
        Command::WeylSpectrum(a) => run_hom(a, SpectrumKind::WeylS),
        Command::BoundarySpectrum(a) => run_hom(a, SpectrumKind::BoundaryS),
        Command::Verify(a) => run_verify(a),
        Command::Shift(c) => run_shift(c),
    }
}

fn run_spectrum(args: SpectrumArgs) -> Result<bool> {
    let a = read_matrix(&args.input)?;
    let mut opts = SpectrumOptions::for_matrix(&a);
    for t in [args.dedup_tol, args.verify_tol].into_iter().flatten() {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Input(format!("tolerance {t} must be positive")));
        }
    }
    opts.dedup_tol = args.dedup_tol.unwrap_or(opts.dedup_tol);
    opts.verify_tol = args.verify_tol.unwrap_or(opts.verify_tol);
    let spheres = a.s_spectrum_with(&opts)?;
    let config = RunConfig::new(
        "spectrum",
        Tolerances {
            invertibility: a.default_tol(),
            dedup: opts.dedup_tol,
        },
    )
    .input(&args.input)
    .param("verifyTol", opts.verify_tol);
    emit(
        &args.output,
        &json_report(&config, SpectrumReport::new(SpectrumKind::S, spheres)),
    )?;
    Ok(true)
}

fn run_scan(args: ScanArgs) -> Result<bool> {
    let a = read_matrix(&args.input)?;
    let scan = a.s_spectrum_scan(&args.grid)?;
    let mut config = RunConfig::new("scan", matrix_tolerances(&a)).input(&args.input);
    config.grid = Some(args.grid);
    config.format = args.format;
    let text = match args.format {
        Format::Csv => config.csv_header() + &scan.to_csv(),
        Format::Json => json_report(&config, &scan),
    };
    emit(&args.output, &text)?;
    Ok(true)
}

fn run_resolvent(args: ResolventArgs) -> Result<bool> {
    let a = read_matrix(&args.input)?;
    let report = sresolvent::resolvent_report(&a, args.q, args.n)?;
    let resolvent = sresolvent::s_resolvent_left(&a, args.q)?;
    let config = RunConfig::new("resolvent", matrix_tolerances(&a))
        .input(&args.input)
        .param("q", args.q)
        .param("n", args.n);
    emit(
        &args.output,
        &json_report(
            &config,
            json!({ "resolvent": resolvent, "residuals": report }),
        ),
    )?;
    Ok(true)
}

fn hom_spectrum<H>(h: &H, v: &H::Source, kind: SpectrumKind) -> Result<SpectrumReport>
where
    H: fredholm::Homomorphism,
    H::Source: ExactSpectrum,
    H::Target: ExactSpectrum,
{
    match kind {
        SpectrumKind::FredholmS => fredholm::fredholm_s_spectrum(h, v),
        SpectrumKind::WeylS => fredholm::weyl_s_spectrum(h, v),
        SpectrumKind::BoundaryS => fredholm::boundary_s_spectrum(v),
        SpectrumKind::S => Ok(SpectrumReport::new(SpectrumKind::S, v.s_spectrum()?)),
    }
}

fn run_hom(args: HomArgs, kind: SpectrumKind) -> Result<bool> {
    let a = read_matrix(&args.input)?;
    let report = match args.hom {
        Hom::Identity => hom_spectrum(&IdentityHom, &a, kind)?,
        Hom::Block => hom_spectrum(&BlockDiagonalHom, &BlockTriangular::from_matrix(&a)?, kind)?,
    }
    .excluding(args.exclude.into());
    let command = match kind {
        SpectrumKind::FredholmS => "fredholm-spectrum",
        SpectrumKind::WeylS => "weyl-spectrum",
        _ => "boundary-spectrum",
    };
    let tol = Tolerances {
        invertibility: fredholm::spectral_tol(a.op_norm()),
        dedup: fredholm::SET_TOL,
    };
    let config = RunConfig::new(command, tol)
        .input(&args.input)
        .param("hom", args.hom)
        .param("exclude", args.exclude);
    emit(&args.output, &json_report(&config, report))?;
    Ok(true)
}

/// One checked theorem instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    pub trial: usize,
    pub algebra: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Instance {
    fn measured(trial: usize, algebra: &'static str, residual: f64, tol: f64) -> Self {
        Self {
            trial,
            algebra,
            pass: residual <= tol,
            residual: Some(residual),
            tol: Some(tol),
            detail: None,
        }
    }

    fn from_result(trial: usize, algebra: &'static str, res: Result<Instance>) -> Self {
        res.unwrap_or_else(|e| Self {
            trial,
            algebra,
            pass: false,
            residual: None,
            tol: None,
            detail: Some(e.to_string()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
    pub instances: Vec<Instance>,
}

impl VerifyReport {
    fn new(suite: Suite, instances: Vec<Instance>) -> Self {
        let passed = instances.iter().filter(|i| i.pass).count();
        let failed = instances.len() - passed;
        Self {
            suite,
            passed,
            failed,
            pass: failed == 0,
            instances,
        }
    }
}

fn algebra_for(trial: usize, algebra: Algebra) -> &'static str {
    match algebra {
        Algebra::Matrix => "matrix",
        Algebra::Block => "block",
        Algebra::Both if trial.is_multiple_of(2) => "matrix",
        Algebra::Both => "block",
    }
}

fn identity_instance(
    rng: &mut SuiteRng,
    k: usize,
    algebra: &'static str,
    trial: usize,
) -> Result<Instance> {
    let q = random::quaternion(rng);
    let (res, scale) = if algebra == "matrix" {
        let a = random::matrix(rng, k, 1.0);
        let b = random::matrix(rng, k, 1.0);
        let scale = (1.0 + q.norm() + a.norm() + b.norm()).powi(2);
        (fredholm::verify_sum_identity(q, &a, &b)?, scale)
    } else {
        let a = BlockTriangular::random(rng, k);
        let b = BlockTriangular::random(rng, k);
        let scale = (1.0 + q.norm() + a.norm() + b.norm()).powi(2);
        (fredholm::verify_sum_identity(q, &a, &b)?, scale)
    };
    Ok(Instance::measured(trial, algebra, res, 1e-9 * scale))
}

fn sum_instance(
    rng: &mut SuiteRng,
    k: usize,
    algebra: &'static str,
    trial: usize,
) -> Result<Instance> {
    let (a, b) = fredholm::annihilating_pair(rng, k.max(2));
    let report = if algebra == "matrix" {
        fredholm::theorem_sum_spectra(&IdentityHom, &a.d1, &b.d1)?
    } else {
        fredholm::theorem_sum_spectra(&BlockDiagonalHom, &a, &b)?
    };
    let residual = report.weyl.as_ref().map_or(report.fredholm.distance, |w| {
        w.distance.max(report.fredholm.distance)
    });
    let mut inst = Instance::measured(trial, algebra, residual, report.fredholm.tol);
    inst.pass = report.pass();
    Ok(inst)
}

fn random_block_invertible(rng: &mut SuiteRng, k: usize) -> BlockTriangular {
    BlockTriangular {
        d1: random::invertible_matrix(rng, k, 0.1),
        u: random::matrix(rng, k, 1.0),
        d2: random::invertible_matrix(rng, k, 0.1),
    }
}

fn inverse_instance(
    rng: &mut SuiteRng,
    k: usize,
    algebra: &'static str,
    trial: usize,
) -> Result<Instance> {
    let cmp = if algebra == "matrix" {
        fredholm::inverse_spectral_map(&IdentityHom, &random::invertible_matrix(rng, k, 0.1))?
    } else {
        fredholm::inverse_spectral_map(&BlockDiagonalHom, &random_block_invertible(rng, k))?
    };
    Ok(Instance::measured(trial, algebra, cmp.distance, cmp.tol))
}

/// Every third pair has a singular second factor.
fn product_pair(rng: &mut SuiteRng, k: usize, trial: usize) -> (QMatrix, QMatrix) {
    let v1 = random::matrix(rng, k, 1.0);
    let mut v2 = random::matrix(rng, k, 1.0);
    if trial % 3 == 2 {
        let kill = trial % k;
        for j in 0..k {
            v2[(kill, j)] = Quaternion::ZERO;
        }
    }
    (v1, v2)
}

fn product_instance(
    rng: &mut SuiteRng,
    k: usize,
    algebra: &'static str,
    trial: usize,
) -> Result<Instance> {
    let cmp = if algebra == "matrix" {
        let (v1, v2) = product_pair(rng, k, trial);
        fredholm::product_spectra_off_imaginaries(&IdentityHom, &v1, &v2)?
    } else {
        let (a1, a2) = product_pair(rng, k, trial);
        let (b1, b2) = product_pair(rng, k, trial);
        let v1 = BlockTriangular {
            d1: a1,
            u: random::matrix(rng, k, 1.0),
            d2: b1,
        };
        let v2 = BlockTriangular {
            d1: a2,
            u: random::matrix(rng, k, 1.0),
            d2: b2,
        };
        fredholm::product_spectra_off_imaginaries(&BlockDiagonalHom, &v1, &v2)?
    };
    Ok(Instance::measured(trial, algebra, cmp.distance, cmp.tol))
}

fn boundary_instance(
    rng: &mut SuiteRng,
    k: usize,
    algebra: &'static str,
    trial: usize,
) -> Result<Instance> {
    let cmp = if algebra == "matrix" {
        fredholm::inversion_of_boundary(&random::invertible_matrix(rng, k, 0.1))?
    } else {
        fredholm::inversion_of_boundary(&random_block_invertible(rng, k))?
    };
    Ok(Instance::measured(trial, algebra, cmp.distance, cmp.tol))
}

/// Instances of `suite`; precondition violations are recorded per instance.
pub fn verify_suite(
    suite: Suite,
    trials: usize,
    seed: u64,
    algebra: Algebra,
    size: usize,
) -> Result<VerifyReport> {
    type Maker = fn(&mut SuiteRng, usize, &'static str, usize) -> Result<Instance>;
    let make: Maker = match suite {
        Suite::Sum => sum_instance,
        Suite::Inverse => inverse_instance,
        Suite::Product => product_instance,
        Suite::IdentityE1 => identity_instance,
        Suite::Boundary => boundary_instance,
        Suite::ShiftBoundary => {
            return Err(Error::Input(
                "shift-boundary takes --q and --n, see `shift_boundary_suite`".into(),
            ))
        }
    };
    if size == 0 {
        return Err(Error::Input("--size must be positive".into()));
    }
    let mut rng = random::seeded(seed);
    let instances = (0..trials)
        .map(|t| {
            let alg = algebra_for(t, algebra);
            Instance::from_result(t, alg, make(&mut rng, size, alg, t))
        })
        .collect();
    Ok(VerifyReport::new(suite, instances))
}

/// `‖R_n − R²‖ ≤ 2|q|ⁿ + |q|^{2n}` and the inverse formula for `n = 1..N`, then the decay.
pub fn shift_boundary_suite(q: Quaternion, n: u32, seed: u64) -> Result<VerifyReport> {
    let mut instances = Vec::new();
    let mut distances = Vec::new();
    for k in 1..=n {
        let w = shiftlab::boundary_witness_r_seeded(q, k, seed)?;
        distances.push(w.distance);
        instances.push(Instance {
            trial: k as usize,
            algebra: "shift",
            pass: w.pass,
            residual: Some(w.distance),
            tol: Some(w.bound),
            detail: Some(format!("inverse residual {:e}", w.inverse_residual)),
        });
    }
    let decreasing = distances.windows(2).all(|d| d[1] < d[0]);
    instances.push(Instance {
        trial: n as usize + 1,
        algebra: "shift",
        pass: decreasing,
        residual: distances.last().copied(),
        tol: None,
        detail: Some("distances strictly decreasing".into()),
    });
    Ok(VerifyReport::new(Suite::ShiftBoundary, instances))
}

fn run_verify(args: VerifyArgs) -> Result<bool> {
    let algebra = args.algebra.unwrap_or(match args.suite {
        Suite::IdentityE1 => Algebra::Both,
        Suite::Sum => Algebra::Block,
        _ => Algebra::Matrix,
    });
    let mut config = RunConfig::new(
        "verify",
        Tolerances {
            invertibility: 1e-6,
            dedup: fredholm::SET_TOL,
        },
    )
    .param("suite", args.suite);
    config.seed = Some(args.seed);
    let report = if args.suite == Suite::ShiftBoundary {
        let q = args.q.unwrap_or(Quaternion::real(0.5));
        let n = args.n.unwrap_or(10);
        if !(1..=60).contains(&n) {
            return Err(Error::Input(format!("--n {n} must be in 1..=60")));
        }
        config = config.param("q", q).param("n", n);
        shift_boundary_suite(q, n, args.seed)?
    } else {
        let trials = args.trials.unwrap_or(if args.suite == Suite::IdentityE1 {
            1000
        } else {
            50
        });
        config = config
            .param("trials", trials)
            .param("algebra", algebra)
            .param("size", args.size);
        verify_suite(args.suite, trials, args.seed, algebra, args.size)?
    };
    emit(&args.output, &json_report(&config, &report))?;
    if !report.pass {
        eprintln!(
            "verify {:?}: {} of {} instances failed",
            args.suite,
            report.failed,
            report.instances.len()
        );
    }
    Ok(report.pass)
}

fn run_shift(cmd: ShiftCommand) -> Result<bool> {
    match cmd {
        ShiftCommand::Spectrum {
            op,
            grid,
            window,
            format,
            output,
        } => {
            let (t, label) = read_op(&op)?;
            let spec = shiftlab::shift_spectrum(&t, &grid, window)?;
            let mut config = RunConfig::new("shift spectrum", shift_tolerances())
                .param("op", label)
                .param("power", op.power)
                .param("window", window);
            config.grid = Some(grid);
            config.format = format;
            let text = match format {
                Format::Csv => config.csv_header() + &spec.to_csv(),
                Format::Json => json_report(&config, &spec),
            };
            emit(&output, &text)?;
            Ok(true)
        }
        ShiftCommand::Index { op, q, output } => {
            let (t, label) = read_op(&op)?;
            let target = q.map_or_else(|| t.clone(), |q| t.char_elem(q));
            let res = shiftlab::index(&target)?;
            let mut config = RunConfig::new("shift index", shift_tolerances())
                .param("op", label)
                .param("power", op.power);
            if let Some(q) = q {
                config = config.param("q", q);
            }
            emit(&output, &json_report(&config, res))?;
            Ok(true)
        }
        ShiftCommand::Norm { op, window, output } => {
            let (t, label) = read_op(&op)?;
            let est = match window {
                Some(n) => shiftlab::op_norm_estimate(&t, n)?,
                None => shiftlab::op_norm(&t),
            };
            let config = RunConfig::new("shift norm", shift_tolerances())
                .param("op", label)
                .param("power", op.power)
                .param("window", window);
            emit(&output, &json_report(&config, est))?;
            Ok(true)
        }
        ShiftCommand::Boundary { q, n, output } => {
            let report = shift_boundary_suite(q, n, 0)?;
            let config = RunConfig::new("shift boundary", shift_tolerances())
                .param("q", q)
                .param("n", n);
            emit(&output, &json_report(&config, &report))?;
            Ok(report.pass)
        }
    }
}

/// Sets the rayon pool size from `SSPEC_THREADS`, if present.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("SSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize =
        v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::Input(format!("SSPEC_THREADS=`{v}` is not a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_arguments() {
        assert_eq!(parse_quaternion("0.5").unwrap(), Quaternion::real(0.5));
        assert_eq!(
            parse_quaternion("1,-2,0,3").unwrap(),
            Quaternion::new(1.0, -2.0, 0.0, 3.0)
        );
        assert!(parse_quaternion("1,2").is_err());
        assert!(parse_quaternion("x").is_err());
        assert!(parse_quaternion("inf").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(true)), 0);
        assert_eq!(exit_code(&Ok(false)), 3);
        assert_eq!(exit_code(&Err(Error::Input("x".into()))), 2);
        assert_eq!(exit_code(&Err(Error::Numeric("x".into()))), 3);
    }

    #[test]
    fn suites_pass_and_are_deterministic() {
        for suite in [
            Suite::Sum,
            Suite::Inverse,
            Suite::Product,
            Suite::IdentityE1,
            Suite::Boundary,
        ] {
            let a = verify_suite(suite, 6, 3, Algebra::Both, 3).unwrap();
            assert!(a.pass, "{a:?}");
            assert_eq!(a, verify_suite(suite, 6, 3, Algebra::Both, 3).unwrap());
        }
        let r = shift_boundary_suite(Quaternion::real(0.5), 10, 1).unwrap();
        assert!(r.pass && r.instances.len() == 11);
    }

    #[test]
    fn command_line_parsing() {
        let cli = Cli::try_parse_from([
            "sspec",
            "verify",
            "identity-e1",
            "--trials",
            "5",
            "--seed",
            "7",
        ])
        .unwrap();
        assert!(matches!(
            cli.command,
            Command::Verify(VerifyArgs {
                suite: Suite::IdentityE1,
                ..
            })
        ));
        let cli = Cli::try_parse_from(["sspec", "scan", "a.json", "--grid", "-1,1,1,0.1"]).unwrap();
        assert!(matches!(cli.command, Command::Scan(_)));
        assert!(Cli::try_parse_from(["sspec", "scan", "a.json", "--grid", "1,0,1,0.1"]).is_err());
        assert!(Cli::try_parse_from(["sspec", "verify", "nonsense"]).is_err());
        assert!(Cli::try_parse_from(["sspec", "shift", "boundary", "--n", "0"]).is_err());
    }
}
