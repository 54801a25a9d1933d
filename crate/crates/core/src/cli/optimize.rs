use std::io::Write;

use clap::{Args, ValueEnum};
use serde::Serialize;

use super::{publish, squeeze, truncation, CliError, CliResult, OutputArgs, RunManifest, TruncationArgs};
use crate::fock::{reduced_density, tmsv_state};
use crate::optimize::{optimize_phases, ConfigSearchResult, RandomUnitarySearch, BOUND_SLACK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    DiagonalPhase,
    RandomUnitary,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: f64,
    #[arg(long, value_enum, default_value_t = FamilyArg::DiagonalPhase)]
    pub family: FamilyArg,
    /// Random unitaries drawn (random-unitary family).
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Required for the random-unitary family.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Phase grid points per level (diagonal-phase family).
    #[arg(long, default_value_t = 16)]
    pub steps: usize,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct OptimizeReport<'a> {
    #[serde(flatten)]
    result: &'a ConfigSearchResult,
    gap: f64,
    dim: usize,
}

pub(super) fn run(args: &OptimizeArgs, recorded: &[String], out: &mut dyn Write) -> CliResult<()> {
    let zp = squeeze(args.zeta)?;
    let trunc = truncation(zp, &args.truncation, None)?;
    let rho = reduced_density(&tmsv_state(zp, &trunc)?);
    let result = match args.family {
        FamilyArg::DiagonalPhase => optimize_phases(&rho, args.steps)?,
        FamilyArg::RandomUnitary => {
            let seed = args
                .seed
                .ok_or_else(|| CliError::Usage("random-unitary needs --seed".into()))?;
            RandomUnitarySearch::new(args.trials, seed).run(&rho)?
        }
    };
    let report = OptimizeReport {
        result: &result,
        gap: result.gap(),
        dim: trunc.dim(),
    };
    let manifest = RunManifest::new("optimize", recorded)
        .seed(result.seed)
        .tol("bound_slack", BOUND_SLACK)
        .tol("tail_tol", args.truncation.tail_tol)
        .truncation(args.truncation.dim, args.truncation.tail_tol);
    let summary = format!(
        "zeta = {}  N = {}  trials = {}\nbest F = {:.12}  bound tanh 2zeta = {:.12}  gap = {:.3e}\n",
        args.zeta,
        trunc.dim(),
        result.trials,
        result.best_f,
        result.bound,
        result.gap()
    );
    publish(&args.output, &manifest, &report, &summary, out)?;
    if result.within_bound {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "best F {} exceeds the bound {} by more than {:e}",
            result.best_f, result.bound, BOUND_SLACK
        )))
    }
}
