use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use serde::Serialize;

use super::{
    load_custom, parse_labels, publish, squeeze, truncation, CliError, CliResult, ConfigFactory,
    OutputArgs, RunManifest, TruncationArgs,
};
use crate::bell::{direct_search, horodecki_max, BellOutcome};
use crate::correlations::{
    bell_from_f, correlation_tensor, f_closed, f_direct, f_position_integral, f_trace, ClosedForm,
    CorrelationTensor, FResult, PlaneQuadrature, Route,
};
use crate::fock::{reduced_density, tmsv_state};
use crate::pseudospin::{operator_set, ConfigLabel};

#[derive(Debug, Clone, Args)]
pub struct BellArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: f64,
    /// One label for both channels, or two comma-separated labels.
    #[arg(long, value_delimiter = ',')]
    pub configs: Vec<String>,
    #[arg(long)]
    pub config_file: Option<PathBuf>,
    /// Agreement required between routes and between the two optimizers.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Restarts of the direct search.
    #[arg(long, default_value_t = 8)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Serialize)]
struct RouteEntry {
    route: Route,
    f: f64,
    plus_plus: Option<Complex64>,
    minus_minus: Option<Complex64>,
    condition15: Option<bool>,
}

impl From<FResult> for RouteEntry {
    fn from(r: FResult) -> Self {
        Self {
            route: r.route,
            f: r.f,
            plus_plus: Some(r.plus_plus),
            minus_minus: Some(r.minus_minus),
            condition15: Some(r.condition15_ok),
        }
    }
}

impl RouteEntry {
    fn scalar(route: Route, f: f64) -> Self {
        Self {
            route,
            f,
            plus_plus: None,
            minus_minus: None,
            condition15: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct BellReport {
    zeta: f64,
    dim: usize,
    discarded: f64,
    configs: [ConfigLabel; 2],
    routes: Vec<RouteEntry>,
    route_spread: f64,
    tol: f64,
    routes_agree: bool,
    tensor: CorrelationTensor,
    condition15: bool,
    /// `2 sqrt(1 + F^2)`, valid when the tensor is diagonal with unit `zz`.
    formula: Option<f64>,
    horodecki: BellOutcome,
    direct_search: BellOutcome,
    optimizers_agree: bool,
    violation: bool,
    verdict: &'static str,
    passed: bool,
}

fn closed_form_for(a: ConfigLabel, b: ConfigLabel) -> Option<ClosedForm> {
    if a != b {
        return None;
    }
    match a {
        ConfigLabel::Number => Some(ClosedForm::Number),
        ConfigLabel::Position => Some(ClosedForm::Position),
        ConfigLabel::AltPhase => Some(ClosedForm::AltPhase),
        _ => None,
    }
}

pub(super) fn run(args: &BellArgs, recorded: &[String], out: &mut dyn Write) -> CliResult<()> {
    let zp = squeeze(args.zeta)?;
    let labels = parse_labels(&args.configs, args.config_file.as_deref(), &[ConfigLabel::Number])?;
    let pair = match labels.as_slice() {
        [a] => [*a, *a],
        [a, b] => [*a, *b],
        _ => return Err(CliError::Usage("--configs takes one or two labels".into())),
    };
    let custom = args.config_file.as_deref().map(load_custom).transpose()?;
    let forced = custom.as_ref().map(|c| 2 * c.half_dim());
    let trunc = truncation(zp, &args.truncation, forced)?;
    let state = tmsv_state(zp, &trunc)?;
    let h = state.dim() / 2;
    let factory = ConfigFactory::new(&pair, h, custom)?;
    let (c1, c2) = (factory.get(pair[0], h)?, factory.get(pair[1], h)?);

    let direct = f_direct(&state, &c1, &c2)?;
    let trace = f_trace(&reduced_density(&state), &c1, &c2)?;
    let mut routes: Vec<RouteEntry> = vec![direct.into(), trace.into()];
    if let Some(which) = closed_form_for(pair[0], pair[1]) {
        routes.push(RouteEntry::scalar(Route::ClosedForm, f_closed(zp, which)));
    }
    if pair == [ConfigLabel::Position; 2] {
        let f = f_position_integral(zp, &PlaneQuadrature::default())?;
        routes.push(RouteEntry::scalar(Route::Integral, f));
    }
    let (lo, hi) = routes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.f), hi.max(r.f)));
    let route_spread = hi - lo;

    let (s1, s2) = (operator_set(&c1)?, operator_set(&c2)?);
    let tensor = correlation_tensor(&state, &s1, &s2)?;
    let horodecki = horodecki_max(&tensor);
    let searched = direct_search(&tensor, args.trials, args.seed)?;
    let formula = direct.condition15_ok.then(|| bell_from_f(direct.f));
    let optimizers_agree = (horodecki.value - searched.value).abs() <= args.tol
        && formula.map_or(true, |v| (v - horodecki.value).abs() <= args.tol);
    let routes_agree = route_spread <= args.tol;
    let violation = horodecki.violates();

    let report = BellReport {
        zeta: args.zeta,
        dim: state.dim(),
        discarded: trunc.discarded(),
        configs: pair,
        routes,
        route_spread,
        tol: args.tol,
        routes_agree,
        tensor,
        condition15: direct.condition15_ok,
        formula,
        horodecki,
        direct_search: searched,
        optimizers_agree,
        violation,
        verdict: if violation { "violation" } else { "no violation" },
        passed: routes_agree && optimizers_agree,
    };
    let manifest = RunManifest::new("bell", recorded)
        .seed(Some(args.seed))
        .tol("agreement", args.tol)
        .tol("tail_tol", args.truncation.tail_tol)
        .truncation(args.truncation.dim.or(forced), args.truncation.tail_tol);

    let summary = format!(
        "zeta = {}  configs = {} / {}  N = {}\nF = {:.12} (spread {:.3e} over {} routes)\nBell = {:.12} (horodecki), {:.12} (direct search): {}\n",
        args.zeta,
        pair[0],
        pair[1],
        state.dim(),
        direct.f,
        route_spread,
        report.routes.len(),
        horodecki.value,
        searched.value,
        report.verdict,
    );
    publish(&args.output, &manifest, &report, &summary, out)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "disagreement above {:e}: route spread {:e}, optimizer gap {:e}",
            args.tol,
            route_spread,
            (horodecki.value - searched.value).abs()
        )))
    }
}
