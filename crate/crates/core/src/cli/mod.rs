//! Command-line frontend.
//!
//! [`run`] takes the full argument vector and two output streams and returns
//! the process exit code, so the binary is a one-line wrapper and tests can
//! drive every subcommand in-process.
//!
//! Exit codes: 0 success, 1 verification or bound failure, 2 usage error,
//! 3 numerical-capacity error (cap, truncation, quadrature, oracle size).

mod bell;
mod manifest;
mod optimize;
mod sweep;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fock::{truncation_for, FockTruncation, SqueezeParam, DEFAULT_TAIL_TOL, DEFAULT_ZETA_CAP};
use crate::pseudospin::{
    alt_phase, number_config, position_config, ConfigLabel, PseudospinConfig, DEFAULT_UNITARITY_TOL,
};
use crate::quadrature::QuadratureSpec;

pub use manifest::RunManifest;
pub use sweep::{SweepRow, CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "parity-bell",
    version,
    about = "Parity-pseudospin CHSH values for the two-mode squeezed vacuum"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// F and the Bell value over a squeezing grid, as CSV.
    Sweep(sweep::SweepArgs),
    /// All routes to F and both Bell optimizers at one squeezing value.
    Bell(bell::BellArgs),
    /// Operator algebra, state oracle, purity and route checks.
    Verify(verify::VerifyArgs),
    /// Configurational search against the tanh 2zeta bound.
    Optimize(optimize::OptimizeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct TruncationArgs {
    /// Fock levels per mode (even); overrides the adaptive choice.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Largest Schmidt weight the truncation may discard.
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the result to this file (JSON reports embed a run manifest;
    /// CSV gets a `.manifest.json` sidecar).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print JSON on standard output instead of a text summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String),
    /// A check ran and failed; the report has already been written.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_capacity() => EXIT_CAPACITY,
            CliError::Core(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAILED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let recorded: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let result = match &cli.command {
        Command::Sweep(a) => sweep::run(a, &recorded, out),
        Command::Bell(a) => bell::run(a, &recorded, out),
        Command::Verify(a) => verify::run(a, &recorded, out),
        Command::Optimize(a) => optimize::run(a, &recorded, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub(crate) fn squeeze(zeta: f64) -> CliResult<SqueezeParam> {
    let z = SqueezeParam::new(zeta)?;
    if zeta > DEFAULT_ZETA_CAP {
        return Err(Error::CapExceeded {
            zeta,
            cap: DEFAULT_ZETA_CAP,
        }
        .into());
    }
    Ok(z)
}

/// Adaptive truncation unless a dimension is forced by `--dim` or by a
/// custom configuration; forced dimensions must still meet `tail_tol`.
pub(crate) fn truncation(
    zeta: SqueezeParam,
    args: &TruncationArgs,
    forced: Option<usize>,
) -> CliResult<FockTruncation> {
    let dim = match (args.dim, forced) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::DimensionMismatch {
                expected: b,
                found: a,
            }
            .into())
        }
        (a, b) => a.or(b),
    };
    match dim {
        None => Ok(truncation_for(zeta, args.tail_tol)?),
        Some(d) => {
            let t = FockTruncation::fixed(zeta, d, args.tail_tol)?;
            if !t.within_tol() {
                return Err(Error::TruncationTooSmall {
                    dim: d,
                    zeta: zeta.value(),
                    discarded: t.discarded(),
                    tail_tol: args.tail_tol,
                }
                .into());
            }
            Ok(t)
        }
    }
}

/// Complex matrix as two parallel real arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(u: &DMatrix<Complex64>) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..u.nrows())
                .map(|i| (0..u.ncols()).map(|j| f(&u[(i, j)])).collect())
                .collect()
        };
        Self {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> CliResult<DMatrix<Complex64>> {
        let h = self.re.len();
        let square = |m: &Vec<Vec<f64>>| m.len() == h && m.iter().all(|r| r.len() == h);
        if h == 0 || !square(&self.re) || !square(&self.im) {
            return Err(CliError::Usage(
                "config file must hold two equal square arrays `re` and `im`".into(),
            ));
        }
        Ok(DMatrix::from_fn(h, h, |i, j| Complex64::new(self.re[i][j], self.im[i][j])))
    }
}

pub(crate) fn load_custom(path: &Path) -> CliResult<PseudospinConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let file: MatrixFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(PseudospinConfig::custom(file.to_matrix()?, DEFAULT_UNITARITY_TOL)?)
}

/// Labels from `--configs` plus `custom` when a config file is given.
pub(crate) fn parse_labels(
    names: &[String],
    config_file: Option<&Path>,
    default: &[ConfigLabel],
) -> CliResult<Vec<ConfigLabel>> {
    let mut labels = Vec::new();
    for n in names {
        let label: ConfigLabel = n.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
        if label == ConfigLabel::DiagonalPhase {
            return Err(CliError::Usage(
                "diagonal-phase is a search family; use `optimize`".into(),
            ));
        }
        labels.push(label);
    }
    if labels.is_empty() {
        if config_file.is_some() {
            labels.push(ConfigLabel::Custom);
        } else {
            labels.extend_from_slice(default);
        }
    }
    let wants_custom = labels.contains(&ConfigLabel::Custom);
    if wants_custom && config_file.is_none() {
        return Err(CliError::Usage("`custom` needs --config-file".into()));
    }
    if !wants_custom && config_file.is_some() {
        labels.push(ConfigLabel::Custom);
    }
    Ok(labels)
}

/// Builds configurations on demand; the position family is computed once at
/// the largest half-dimension and sliced.
pub(crate) struct ConfigFactory {
    custom: Option<PseudospinConfig>,
    position: Option<PseudospinConfig>,
}

impl ConfigFactory {
    pub(crate) fn new(
        labels: &[ConfigLabel],
        max_half_dim: usize,
        custom: Option<PseudospinConfig>,
    ) -> CliResult<Self> {
        let position = if labels.contains(&ConfigLabel::Position) {
            let quad = QuadratureSpec::for_levels(2 * max_half_dim - 1);
            Some(position_config(max_half_dim, &quad)?)
        } else {
            None
        };
        Ok(Self { custom, position })
    }

    pub(crate) fn custom_half_dim(&self) -> Option<usize> {
        self.custom.as_ref().map(|c| c.half_dim())
    }

    pub(crate) fn get(&self, label: ConfigLabel, half_dim: usize) -> CliResult<PseudospinConfig> {
        Ok(match label {
            ConfigLabel::Number => number_config(half_dim),
            ConfigLabel::AltPhase => alt_phase(half_dim),
            ConfigLabel::Position => self
                .position
                .as_ref()
                .expect("position prepared")
                .leading_block(half_dim)?,
            ConfigLabel::Custom => {
                let c = self.custom.as_ref().expect("custom loaded");
                if c.half_dim() != half_dim {
                    return Err(Error::DimensionMismatch {
                        expected: c.half_dim(),
                        found: half_dim,
                    }
                    .into());
                }
                c.clone()
            }
            ConfigLabel::DiagonalPhase => unreachable!("rejected while parsing"),
        })
    }
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub(crate) fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write output: {e}")))
}

/// A value with a run manifest alongside, for JSON reports.
#[derive(Debug, Serialize)]
pub(crate) struct WithManifest<'a, T: Serialize> {
    pub manifest: &'a RunManifest,
    #[serde(flatten)]
    pub report: &'a T,
}

/// Writes a JSON report to `--out` (if any) and either JSON or `summary`
/// to `out`.
pub(crate) fn publish<T: Serialize>(
    output: &OutputArgs,
    manifest: &RunManifest,
    report: &T,
    summary: &str,
    out: &mut dyn Write,
) -> CliResult<()> {
    let json = to_json(&WithManifest { manifest, report });
    if let Some(path) = &output.out {
        write_file(path, json.as_bytes())?;
    }
    if output.json {
        emit(out, &json)
    } else {
        emit(out, summary)
    }
}
