use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    emit, load_custom, parse_labels, squeeze, to_json, truncation, write_file, CliError, CliResult,
    ConfigFactory, OutputArgs, RunManifest, TruncationArgs,
};
use crate::bell::horodecki_max;
use crate::correlations::{bell_from_f, correlation_tensor, f_direct};
use crate::fock::tmsv_state;
use crate::optimize::linspace;
use crate::pseudospin::{operator_set, ConfigLabel};

pub const CSV_HEADER: &str = "zeta,config,F,bell_value,dim,condition15";

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub zeta_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub zeta_max: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Comma-separated: number, position, alt-phase, custom.
    #[arg(long, value_delimiter = ',')]
    pub configs: Vec<String>,
    /// JSON file `{"re": [[..]], "im": [[..]]}` with a custom unitary.
    #[arg(long)]
    pub config_file: Option<PathBuf>,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub zeta: f64,
    pub config: ConfigLabel,
    #[serde(rename = "F")]
    pub f: f64,
    pub bell_value: f64,
    pub dim: usize,
    pub condition15: bool,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{:.16e},{},{:.16e},{:.16e},{},{}",
            self.zeta, self.config, self.f, self.bell_value, self.dim, self.condition15
        )
    }
}

#[derive(Serialize)]
struct SweepReport<'a> {
    rows: &'a [SweepRow],
}

pub(super) fn run(args: &SweepArgs, recorded: &[String], out: &mut dyn Write) -> CliResult<()> {
    if args.steps < 2 {
        return Err(CliError::Usage(format!("--steps {} < 2", args.steps)));
    }
    if !(args.zeta_min <= args.zeta_max) {
        return Err(CliError::Usage("--zeta-min must not exceed --zeta-max".into()));
    }
    squeeze(args.zeta_min)?;
    let top = squeeze(args.zeta_max)?;
    let labels = parse_labels(
        &args.configs,
        args.config_file.as_deref(),
        &[ConfigLabel::Number, ConfigLabel::Position],
    )?;
    let custom = args.config_file.as_deref().map(load_custom).transpose()?;
    let forced = custom.as_ref().map(|c| 2 * c.half_dim());

    // truncation grows with zeta, so the top of the grid fixes the largest block
    let max_trunc = truncation(top, &args.truncation, forced)?;
    let factory = ConfigFactory::new(&labels, max_trunc.half_dim(), custom)?;
    let grid = linspace(args.zeta_min, args.zeta_max, args.steps);

    let rows: Vec<Vec<SweepRow>> = grid
        .par_iter()
        .map(|&z| {
            let zp = squeeze(z)?;
            let trunc = truncation(zp, &args.truncation, factory.custom_half_dim().map(|h| 2 * h))?;
            let state = tmsv_state(zp, &trunc)?;
            let h = state.dim() / 2;
            labels
                .iter()
                .map(|&label| {
                    let cfg = factory.get(label, h)?;
                    let r = f_direct(&state, &cfg, &cfg)?;
                    let bell_value = if r.condition15_ok {
                        bell_from_f(r.f)
                    } else {
                        let set = operator_set(&cfg)?;
                        horodecki_max(&correlation_tensor(&state, &set, &set)?).value
                    };
                    Ok(SweepRow {
                        zeta: z,
                        config: label,
                        f: r.f,
                        bell_value,
                        dim: state.dim(),
                        condition15: r.condition15_ok,
                    })
                })
                .collect::<CliResult<Vec<_>>>()
        })
        .collect::<CliResult<_>>()?;
    let rows: Vec<SweepRow> = rows.into_iter().flatten().collect();

    let manifest = RunManifest::new("sweep", recorded)
        .tol("tail_tol", args.truncation.tail_tol)
        .tol("condition15", crate::correlations::DEFAULT_CONDITION_TOL)
        .truncation(args.truncation.dim.or(forced), args.truncation.tail_tol);

    let mut csv = String::with_capacity(64 * (rows.len() + 1));
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_line());
        csv.push('\n');
    }
    if let Some(path) = &args.output.out {
        write_file(path, csv.as_bytes())?;
        let mut sidecar = path.clone().into_os_string();
        sidecar.push(".manifest.json");
        write_file(&PathBuf::from(sidecar), to_json(&manifest).as_bytes())?;
    }
    if args.output.json {
        emit(
            out,
            &to_json(&super::WithManifest {
                manifest: &manifest,
                report: &SweepReport { rows: &rows },
            }),
        )
    } else if args.output.out.is_none() {
        emit(out, &csv)
    } else {
        Ok(())
    }
}
