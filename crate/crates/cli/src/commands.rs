use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};

use normctl::differential::{diff_inequality_sample_sized, DiffReport};
use normctl::function::{wiener1_norm, wiener_inverse, wiener_norm, WienerInverse};
use normctl::generators::{gen_decay, gen_invertible, gen_laurent, gen_symbol, gen_trig_poly};
use normctl::inversion::{
    bn_digit_bound, Branch, Certifier, CertifyOptions, DMode, InversionCertificate,
};
use normctl::norms::parse_p;
use normctl::{AlgebraSpec, Error, Family, FiniteMatrix, FourierSymbol, IndexWindow};

use crate::manifest::{Recorder, RunManifest};

/// Map an error chain onto the documented exit codes.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::NotInvertible(_) | Error::Degenerate { .. } => 3,
                Error::Convergence { .. } | Error::Generation(_) => 4,
                Error::Structural(_) | Error::Parameter(_) | Error::Format(_) => 2,
            };
        }
    }
    2
}

/// A result with its manifest appended.
#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    #[serde(flatten)]
    result: &'a T,
    manifest: RunManifest,
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(out, &text)
}

fn emit<C: Serialize, T: Serialize>(
    recorder: &Recorder,
    config: &C,
    seed: Option<u64>,
    result: &T,
    out: Option<&Path>,
) -> Result<()> {
    let manifest = recorder.finish(config, seed, result)?;
    write_json(out, &Report { result, manifest })
}

fn write_csv<R: Serialize>(out: Option<&Path>, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    write_text(out, &String::from_utf8(bytes)?)
}

/// Family, `p` and `α` selecting a norm.
#[derive(Debug, Args, Serialize)]
pub struct SpecArgs {
    /// schur, bgs, beurling, jaffard or op.
    #[arg(long, default_value = "schur")]
    family: String,
    /// Exponent in [1, ∞]; `inf` is accepted.
    #[arg(long, default_value = "1")]
    p: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
}

impl SpecArgs {
    fn spec(&self) -> Result<AlgebraSpec> {
        let family: Family = self.family.parse()?;
        Ok(AlgebraSpec::new(family, parse_p(&self.p)?, self.alpha)?)
    }
}

fn read_matrix(recorder: &mut Recorder, path: &Path) -> Result<FiniteMatrix> {
    let text = recorder.read(path)?;
    FiniteMatrix::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_symbol(recorder: &mut Recorder, path: &Path) -> Result<FourierSymbol> {
    let text = recorder.read(path)?;
    FourierSymbol::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

// ---------------------------------------------------------------- gen

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Random matrix with entries of size (1 + |i − j|)^{−α−1}.
    Decay {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// I + tE with κ(A*A) at most the target.
    Invertible {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 4.0)]
        kappa: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Laurent matrix of a random decaying symbol on [lo, hi].
    Laurent {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        lo: i64,
        #[arg(long, allow_hyphen_values = true)]
        hi: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random decaying symbol.
    Symbol {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trigonometric polynomial sampled on a grid, bounded below by one.
    Trig {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = std::f64::consts::TAU, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run_gen(cmd: GenCommand) -> Result<ExitCode> {
    let (text, out) = match cmd {
        GenCommand::Decay { n, alpha, seed, out } => (gen_decay(n, alpha, seed)?.to_json(), out),
        GenCommand::Invertible { n, alpha, kappa, seed, out } => {
            let g = gen_invertible(n, alpha, kappa, seed)?;
            eprintln!("kappa = {}, scale = {}", g.kappa, g.scale);
            (g.matrix.to_json(), out)
        }
        GenCommand::Laurent { degree, alpha, lo, hi, seed, out } => {
            let window = IndexWindow::new(lo, hi)?;
            (gen_laurent(degree, alpha, window, seed)?.to_json(), out)
        }
        GenCommand::Symbol { degree, alpha, seed, out } => {
            (gen_symbol(degree, alpha, seed)?.to_json(), out)
        }
        GenCommand::Trig { degree, lo, hi, grid, seed, out } => {
            (gen_trig_poly(degree, seed, (lo, hi), grid)?.1.to_json(), out)
        }
    };
    let mut text = text;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    write_text(out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- norm

#[derive(Debug, Args, Serialize)]
pub struct NormArgs {
    file: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct NormResult {
    norm: f64,
    /// `None` when the family is not a Banach algebra at these parameters.
    normalized_norm: Option<f64>,
    #[serde(flatten)]
    spec: AlgebraSpec,
    size: usize,
}

pub fn run_norm(args: NormArgs, mut recorder: Recorder) -> Result<ExitCode> {
    let spec = args.spec.spec()?;
    let a = read_matrix(&mut recorder, &args.file)?;
    let result = NormResult {
        norm: spec.norm(&a)?,
        normalized_norm: if spec.algebra_valid() {
            Some(spec.normalized_norm(&a)?)
        } else {
            None
        },
        spec,
        size: a.size(),
    };
    emit(&recorder, &args, None, &result, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- diffcheck

#[derive(Debug, Args, Serialize)]
pub struct DiffArgs {
    #[command(flatten)]
    #[serde(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    theta: f64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Matrix size.
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Count samples whose ratio exceeds this constant.
    #[arg(long)]
    certified_d0: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_diffcheck(args: DiffArgs, recorder: Recorder) -> Result<ExitCode> {
    let spec = args.spec.spec()?;
    let report: DiffReport = diff_inequality_sample_sized(
        &spec,
        args.theta,
        args.samples,
        args.seed,
        args.n,
        args.certified_d0,
    )?;
    emit(&recorder, &args, Some(args.seed), &report, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- powers

#[derive(Debug, Args, Serialize)]
pub struct PowersArgs {
    file: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long)]
    theta: f64,
    #[arg(long, default_value_t = 64)]
    nmax: u64,
    /// Power-condition constant; measured on the table when omitted.
    #[arg(long = "D")]
    d: Option<f64>,
    /// CSV destination (stdout by default).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the full JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct PowerLine {
    n: u64,
    #[serde(rename = "norm_A_Bn")]
    norm: f64,
    digit_bound: f64,
    operator_bound: f64,
}

#[derive(Serialize)]
struct PowersResult {
    spec: AlgebraSpec,
    m: u32,
    theta: f64,
    kappa: f64,
    a: f64,
    b: f64,
    d: f64,
    d_empirical: Option<f64>,
    rows: Vec<PowerLine>,
}

pub fn run_powers(args: PowersArgs, mut recorder: Recorder) -> Result<ExitCode> {
    let spec = args.spec.spec()?;
    normctl::inversion::branch(args.m, args.theta)?;
    if args.nmax < 2 {
        return Err(Error::Parameter("nmax must be at least 2".into()).into());
    }
    let a = read_matrix(&mut recorder, &args.file)?;
    let options = CertifyOptions {
        ladder_max: args.nmax,
        ..CertifyOptions::default()
    };
    // Fails with a degenerate-conditioning error when B = 0.
    let c = normctl::inversion::constants(&a, &spec)?;
    let certifier = Certifier::new(&a, &spec, options)?;
    let table = certifier.power_table().expect("non-degenerate");
    let d_empirical = certifier.d_empirical(args.m, args.theta)?;
    let d = match args.d {
        Some(d) => d,
        None => d_empirical.unwrap_or(1.0).max(1.0),
    };
    let mut rows = Vec::with_capacity(args.nmax as usize);
    for n in 1..=args.nmax {
        rows.push(PowerLine {
            n,
            norm: table.ln_norm(n).map_or(0.0, f64::exp),
            digit_bound: bn_digit_bound(n, args.m, args.theta, d, c.a, c.b)?.value_or_inf(),
            operator_bound: (-(n as f64) * c.a.ln()).exp(),
        });
    }
    let result = PowersResult {
        spec,
        m: args.m,
        theta: args.theta,
        kappa: c.kappa,
        a: c.a,
        b: c.b,
        d,
        d_empirical,
        rows,
    };
    write_csv(args.out.as_deref(), &result.rows)?;
    if let Some(path) = &args.json {
        emit(&recorder, &args, None, &result, Some(path))?;
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- invert

#[derive(Debug, Args, Serialize)]
pub struct InvertArgs {
    file: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long)]
    theta: f64,
    /// `auto` to measure D, or a positive value.
    #[arg(long = "D", default_value = "auto")]
    d: String,
    /// Neumann truncation tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Largest power of B measured.
    #[arg(long, default_value_t = 256)]
    ladder: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_d(s: &str) -> Result<DMode> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(DMode::Empirical);
    }
    let d: f64 = s
        .parse()
        .map_err(|_| Error::Parameter(format!("--D expects 'auto' or a number, got '{s}'")))?;
    Ok(DMode::User(d))
}

pub fn run_invert(args: InvertArgs, mut recorder: Recorder) -> Result<ExitCode> {
    let spec = args.spec.spec()?;
    let d_mode = parse_d(&args.d)?;
    let a = read_matrix(&mut recorder, &args.file)?;
    let options = CertifyOptions {
        ladder_max: args.ladder,
        tol: args.tol,
        ..CertifyOptions::default()
    };
    let cert = normctl::inversion::certify(&a, &spec, args.m, args.theta, d_mode, options)?;
    emit(&recorder, &args, None, &cert, args.out.as_deref())?;
    if cert.branch == Branch::Degenerate {
        eprintln!("A*A is a multiple of the identity; certificate uses s^-1 A*");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- wiener

#[derive(Debug, Subcommand)]
pub enum WienerCommand {
    /// Σ |f̂(n)|.
    Norm(WienerFile),
    /// Σ (1 + |n|) |f̂(n)|.
    Norm1(WienerFile),
    /// Fourier coefficients of 1/f.
    Invert(WienerInvertArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct WienerFile {
    file: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WienerInvertArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct WienerNorm {
    norm: f64,
    weighted: bool,
    degree: u64,
}

pub fn run_wiener(cmd: WienerCommand, mut recorder: Recorder) -> Result<ExitCode> {
    match cmd {
        WienerCommand::Norm(args) => {
            let f = read_symbol(&mut recorder, &args.file)?;
            let result = WienerNorm {
                norm: wiener_norm(&f),
                weighted: false,
                degree: f.degree(),
            };
            emit(&recorder, &args, None, &result, args.out.as_deref())?;
        }
        WienerCommand::Norm1(args) => {
            let f = read_symbol(&mut recorder, &args.file)?;
            let result = WienerNorm {
                norm: wiener1_norm(&f),
                weighted: true,
                degree: f.degree(),
            };
            emit(&recorder, &args, None, &result, args.out.as_deref())?;
        }
        WienerCommand::Invert(args) => {
            let f = read_symbol(&mut recorder, &args.file)?;
            let result: WienerInverse = wiener_inverse(&f, args.grid, args.tol)?;
            emit(&recorder, &args, None, &result, args.out.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- report

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Certificates written by `invert`.
    #[arg(required = true)]
    certs: Vec<PathBuf>,
    /// CSV destination (stdout by default).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the table as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ReportRow {
    n: usize,
    kappa: f64,
    a: Option<f64>,
    b: Option<f64>,
    t0: Option<f64>,
    #[serde(rename = "D")]
    d: f64,
    bound: f64,
    measured: f64,
    /// measured / bound.
    ratio: f64,
}

#[derive(Serialize)]
struct ReportTable {
    rows: Vec<ReportRow>,
}

pub fn run_report(args: ReportArgs, mut recorder: Recorder) -> Result<ExitCode> {
    let mut rows = Vec::with_capacity(args.certs.len());
    for path in &args.certs {
        let text = recorder.read(path)?;
        let cert: InversionCertificate = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        rows.push(ReportRow {
            n: cert.size,
            kappa: cert.kappa,
            a: cert.a,
            b: cert.b,
            t0: cert.t0,
            d: cert.d,
            bound: cert.bound.value_or_inf(),
            measured: cert.measured_inverse_norm,
            ratio: (cert.measured_inverse_norm.ln() - cert.bound.ln).exp(),
        });
    }
    let table = ReportTable { rows };
    write_csv(args.out.as_deref(), &table.rows)?;
    if let Some(path) = &args.json {
        emit(&recorder, &args, None, &table, Some(path))?;
    }
    Ok(ExitCode::SUCCESS)
}
