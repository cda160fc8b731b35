//! Command-line front end: emit model fields, validate sample files,
//! compute invariants and classify pairs.
//!
//! Exit codes: 0 success/pass, 1 validation failure, 2 usage or
//! space/rank mismatch or unknown model, 3 unreadable input, 4 numerical
//! failure.

mod report;
mod sample;

use clap::{Parser, Subcommand, ValueEnum};
use diii_core::grid::{CircleGrid, InvolutionGrid, TorusGrid};
use diii_core::invariants::{
    gerbe_sign_1d, invariant_report_circle, invariant_report_torus, normalize_determinant,
    teo_kane_1d, weak_invariants_2d, Homotopy,
};
use diii_core::linalg::{op_norm, skewness_residual, unitarity_residual};
use diii_core::models::{ModelField, ModelId};
use diii_core::symmetry::{extract_sewing, verify_class_diii, SymmetryTriple};
use diii_core::toeplitz::{exact_kernel_dim_banded, fourier_coefficients, z2_index};
use diii_core::{Error as CoreError, SewingField};
use report::{ReportFile, ToeplitzSection, WitnessJson};
use sample::{LoadedField, SampleError, SampleFile};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_VALIDATION: u8 = 1;
const EXIT_MISMATCH: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "diii",
    about = "Z2 invariants of class-DIII band insulators from sampled sewing matrices or Hamiltonians",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in models with their expected invariants.
    Models,
    /// Sample a named model onto a grid and write it as a sample file.
    Emit {
        /// Model name (see `diii models`).
        model: String,
        /// Grid sizes: N for the circle, N1,N2 for the torus.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<usize>,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a sample file: symmetry/sewing residuals and the gap.
    Check {
        file: PathBuf,
        /// Validation tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Compute the invariants of a sample file.
    Invariant {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Tolerance for Toeplitz kernel counting.
        #[arg(long, default_value_t = 1e-8)]
        tol_kernel: f64,
        /// Also compute the Toeplitz Z2 index (circle fields).
        #[arg(long)]
        toeplitz: bool,
        /// Also compute the gerbe sign after determinant normalization
        /// (circle fields).
        #[arg(long)]
        gerbe: bool,
        /// Include kernel witnesses in the report (with --toeplitz).
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also write the report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two sample files: homotopy verdict (circle) and relative
    /// invariants.
    Classify {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn core_exit_code(e: &CoreError) -> u8 {
    use CoreError::*;
    match e {
        NotHermitian(_)
        | SingularInput(_)
        | NotSkewSymmetric(_)
        | NotSkewUnitary { .. }
        | NotUnitary(_)
        | SymmetryViolation { .. }
        | NotInCommutant { .. }
        | NotStandardForm(_)
        | SewingViolation(_)
        | OddSewingRank(_)
        | OddTotalDimension(_)
        | NonFinite
        | UnequalChiralEigenspaces { .. } => EXIT_VALIDATION,
        DimensionMismatch { .. }
        | OddDimension(_)
        | OddN(_)
        | TooSmall(_)
        | GridMismatch
        | RankMismatch { .. }
        | UnknownModel(_)
        | BandwidthTooLarge { .. } => EXIT_MISMATCH,
        NoConvergence(_)
        | GridTooCoarse { .. }
        | BadStartValue(_)
        | NonzeroWinding { .. }
        | InconsistentUnwrap(_)
        | NotEquivariant(_)
        | CrossCheckFailure(_)
        | NotSignLike(_)
        | NonzeroDetWinding(_)
        | Unstable(_) => EXIT_NUMERICAL,
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::new(core_exit_code(&e), e.to_string())
    }
}

impl From<SampleError> for Failure {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::Schema(_) => Failure::new(EXIT_PARSE, e.to_string()),
            SampleError::Core(c) => c.into(),
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("DIII_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Models => cmd_models(),
        Command::Emit { model, grid, out } => cmd_emit(&model, &grid, out.as_deref()),
        Command::Check { file, tol } => cmd_check(&file, tol),
        Command::Invariant {
            file,
            tol,
            tol_kernel,
            toeplitz,
            gerbe,
            witness,
            format,
            out,
        } => cmd_invariant(
            &file,
            tol,
            tol_kernel,
            toeplitz,
            gerbe,
            witness,
            format,
            out.as_deref(),
        ),
        Command::Classify {
            file_a,
            file_b,
            tol,
        } => cmd_classify(&file_a, &file_b, tol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_models() -> Result<(), Failure> {
    println!(
        "{:<10} {:<7} {:<5} expected invariants",
        "name", "space", "rank"
    );
    for m in ModelId::ALL {
        println!(
            "{:<10} {:<7} {:<5} {}",
            m.name(),
            m.space().to_string(),
            m.rank(),
            m.expected_invariants()
        );
    }
    Ok(())
}

fn cmd_emit(model: &str, grid: &[usize], out: Option<&Path>) -> Result<(), Failure> {
    let id = ModelId::parse(model)?;
    let field = id.emit(grid)?;
    let file = match &field {
        ModelField::Circle(q) => SampleFile::from_circle_sewing(q),
        ModelField::Torus(q) => SampleFile::from_torus_sewing(q),
    };
    let mut body = serde_json::to_string_pretty(&file).expect("sample serialization");
    body.push('\n');
    match out {
        Some(path) => std::fs::write(path, &body)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot write {path:?}: {e}")))?,
        None => print!("{body}"),
    }
    Ok(())
}

fn read_sample(path: &Path) -> Result<(SampleFile, String), Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {path:?}: {e}")))?;
    let parsed: SampleFile = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot parse {path:?}: {e}")))?;
    parsed.validate_shape()?;
    let digest = format!("sha256:{:x}", Sha256::digest(&bytes));
    Ok((parsed, digest))
}

/// Per-point residual scan of a sewing field, locating the worst offender.
fn sewing_residual_table<G: InvolutionGrid>(q: &SewingField<G>) -> (f64, usize, f64, usize, f64) {
    let mut worst_unit = (0.0f64, 0usize);
    let mut worst_sewing = (0.0f64, 0usize);
    for j in 0..q.grid.len() {
        let u = unitarity_residual(&q.samples[j]);
        if u > worst_unit.0 {
            worst_unit = (u, j);
        }
        let p = q.grid.pair(j);
        let s = op_norm(&(&q.samples[p] + q.samples[j].transpose()));
        if s > worst_sewing.0 {
            worst_sewing = (s, j);
        }
    }
    let fp_skew = q
        .grid
        .fixed_points()
        .iter()
        .map(|&j| skewness_residual(&q.samples[j]))
        .fold(0.0, f64::max);
    (
        worst_unit.0,
        worst_unit.1,
        worst_sewing.0,
        worst_sewing.1,
        fp_skew,
    )
}

fn print_sewing_check<G: InvolutionGrid>(q: &SewingField<G>, tol: f64) -> bool {
    let (u, ui, s, si, fp) = sewing_residual_table(q);
    println!("{:<28} {:>12} {:>8}", "residual", "max", "at index");
    println!("{:<28} {:>12.3e} {:>8}", "unitarity", u, ui);
    println!("{:<28} {:>12.3e} {:>8}", "sewing q(-k)+q(k)^t", s, si);
    println!("{:<28} {:>12.3e} {:>8}", "fixed-point skewness", fp, "-");
    u.max(s).max(fp) <= tol
}

fn cmd_check(path: &Path, tol: f64) -> Result<(), Failure> {
    let (file, _) = read_sample(path)?;
    let loaded = file.load(tol)?;
    let pass = match &loaded {
        LoadedField::CircleSewing(q) => print_sewing_check(q, tol),
        LoadedField::TorusSewing(q) => print_sewing_check(q, tol),
        LoadedField::CircleHamiltonian(h) => {
            let rep = verify_class_diii(h, &SymmetryTriple::standard(h.dim / 2), tol)?;
            println!("gap: {:.6}", h.gap);
            print_diii_report(rep.c_residual, rep.t_residual, rep.chiral_residual);
            rep.pass() && print_sewing_check(&extract_sewing(h, tol)?, 10.0 * tol)
        }
        LoadedField::TorusHamiltonian(h) => {
            let rep = verify_class_diii(h, &SymmetryTriple::standard(h.dim / 2), tol)?;
            println!("gap: {:.6}", h.gap);
            print_diii_report(rep.c_residual, rep.t_residual, rep.chiral_residual);
            rep.pass() && print_sewing_check(&extract_sewing(h, tol)?, 10.0 * tol)
        }
    };
    if pass {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(Failure::new(
            EXIT_VALIDATION,
            format!("residuals exceed tolerance {tol:.1e}"),
        ))
    }
}

fn print_diii_report(c: f64, t: f64, chi: f64) {
    println!("{:<28} {:>12.3e}", "particle-hole relation", c);
    println!("{:<28} {:>12.3e}", "time-reversal relation", t);
    println!("{:<28} {:>12.3e}", "chiral anticommutation", chi);
}

enum AnySewing {
    Circle(SewingField<CircleGrid>),
    Torus(SewingField<TorusGrid>),
}

/// Hamiltonian inputs are reduced to their sewing matrices up front.
fn to_sewing(loaded: LoadedField, tol: f64) -> Result<AnySewing, Failure> {
    Ok(match loaded {
        LoadedField::CircleSewing(q) => AnySewing::Circle(q),
        LoadedField::TorusSewing(q) => AnySewing::Torus(q),
        LoadedField::CircleHamiltonian(h) => AnySewing::Circle(extract_sewing(&h, tol)?),
        LoadedField::TorusHamiltonian(h) => AnySewing::Torus(extract_sewing(&h, tol)?),
    })
}

fn gap_of(loaded: &LoadedField) -> Option<f64> {
    match loaded {
        LoadedField::CircleHamiltonian(h) => Some(h.gap),
        LoadedField::TorusHamiltonian(h) => Some(h.gap),
        _ => None,
    }
}

/// Smallest bandwidth whose reconstruction error is negligible, capped to
/// keep sections small for non-banded inputs.
fn auto_bandwidth(q: &SewingField<CircleGrid>, tol: f64) -> Result<(usize, f64), Failure> {
    let cap = (q.grid.n() / 2 - 1).min(32);
    let mut best = (0usize, f64::INFINITY);
    for w in 0..=cap {
        let sym = fourier_coefficients(q, w)?;
        if sym.truncation_residual < best.1 {
            best = (w, sym.truncation_residual);
        }
        if sym.truncation_residual <= tol.max(1e-10) {
            return Ok((w, sym.truncation_residual));
        }
    }
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn cmd_invariant(
    path: &Path,
    tol: f64,
    tol_kernel: f64,
    toeplitz: bool,
    gerbe: bool,
    witness: bool,
    format: Format,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let (file, digest) = read_sample(path)?;
    let loaded = file.load(tol)?;
    let gap = gap_of(&loaded);
    let sewing = to_sewing(loaded, tol)?;

    let report = match &sewing {
        AnySewing::Circle(q) => {
            let rep = invariant_report_circle(q)?;
            let nu = rep.nu_1d.expect("circle report carries nu_1d");
            let mut report = ReportFile::from_invariants(
                digest,
                &file.kind,
                file.grid.clone(),
                q.rank,
                &rep,
                gap,
            );
            if toeplitz {
                let (w, truncation_residual) = auto_bandwidth(q, tol)?;
                let sym = fourier_coefficients(q, w)?;
                let kernel = exact_kernel_dim_banded(&sym, tol_kernel)?;
                let index = z2_index(&sym, tol_kernel)?;
                report.toeplitz = Some(ToeplitzSection {
                    index: index.as_i8(),
                    kernel_dim: kernel.dim,
                    agree: index == nu,
                    bandwidth: w,
                    truncation_residual,
                    certified: truncation_residual < 1.0,
                    witnesses: witness.then(|| {
                        kernel
                            .witnesses
                            .iter()
                            .map(WitnessJson::from_witness)
                            .collect()
                    }),
                });
            }
            if gerbe {
                let qn = normalize_determinant(q)?;
                report.gerbe = Some(gerbe_sign_1d(&qn)?.as_i8());
            }
            report
        }
        AnySewing::Torus(q) => {
            if toeplitz || gerbe {
                return Err(Failure::new(
                    EXIT_MISMATCH,
                    "--toeplitz and --gerbe apply to circle fields only",
                ));
            }
            let rep = invariant_report_torus(q)?;
            ReportFile::from_invariants(digest, &file.kind, file.grid.clone(), q.rank, &rep, gap)
        }
    };

    let body = match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    print!("{body}");
    if let Some(p) = out {
        std::fs::write(p, &body)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot write {p:?}: {e}")))?;
    }
    Ok(())
}

fn cmd_classify(path_a: &Path, path_b: &Path, tol: f64) -> Result<(), Failure> {
    let (file_a, _) = read_sample(path_a)?;
    let (file_b, _) = read_sample(path_b)?;
    let a = to_sewing(file_a.load(tol)?, tol)?;
    let b = to_sewing(file_b.load(tol)?, tol)?;
    match (a, b) {
        (AnySewing::Circle(qa), AnySewing::Circle(qb)) => {
            if qa.rank != qb.rank {
                return Err(CoreError::RankMismatch {
                    a: qa.rank,
                    b: qb.rank,
                }
                .into());
            }
            let nu_a = teo_kane_1d(&qa)?;
            let nu_b = teo_kane_1d(&qb)?;
            let verdict = if nu_a == nu_b {
                Homotopy::Homotopic
            } else {
                Homotopy::NotHomotopic
            };
            println!("nu(A) = {nu_a}");
            println!("nu(B) = {nu_b}");
            println!("relative invariant = {}", nu_a * nu_b);
            println!("{verdict}");
        }
        (AnySewing::Torus(qa), AnySewing::Torus(qb)) => {
            if qa.rank != qb.rank {
                return Err(CoreError::RankMismatch {
                    a: qa.rank,
                    b: qb.rank,
                }
                .into());
            }
            let ta = diii_core::invariants::full_invariant_2d(&qa)?;
            let tb = diii_core::invariants::full_invariant_2d(&qb)?;
            let (wa, wb) = (weak_invariants_2d(&qa)?, weak_invariants_2d(&qb)?);
            println!("triple(A) = ({}, {}, {})", ta.0, ta.1, ta.2);
            println!("triple(B) = ({}, {}, {})", tb.0, tb.1, tb.2);
            println!("relative weak pair = ({}, {})", wa.0 * wb.0, wa.1 * wb.1);
        }
        _ => {
            return Err(Failure::new(
                EXIT_MISMATCH,
                "cannot classify fields over different spaces",
            ))
        }
    }
    Ok(())
}
