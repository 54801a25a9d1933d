use std::fmt::Write as _;
use std::io::Write;

use clap::Args;
use serde::Serialize;

use super::{publish, squeeze, CliError, CliResult, OutputArgs, RunManifest};
use crate::correlations::{
    f_closed, f_direct, f_position_integral, f_trace, ClosedForm, PlaneQuadrature,
};
use crate::fock::{
    reduced_density, squeeze_oracle_with_limit, tmsv_state, truncation_for, DEFAULT_TAIL_TOL,
};
use crate::pseudospin::{
    alt_phase, number_config, operator_set, position_config, position_config_exact, verify_su2,
    AlgebraReport, ConfigLabel, PseudospinConfig,
};
use crate::quadrature::QuadratureSpec;

/// Truncation used for the state oracle; tighter than the default so the
/// truncated generator's edge stays far below the fidelity threshold.
pub const ORACLE_TAIL_TOL: f64 = 1e-10;
pub const ORACLE_MAX_DIM: usize = 256;
pub const FIDELITY_THRESHOLD: f64 = 1e-8;
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-10;
pub const PURITY_THRESHOLD: f64 = 1e-10;
/// Matrix routes against closed forms for the finite unitary families.
pub const ROUTE_TOL: f64 = 1e-10;
/// Position routes, limited by the plane quadrature.
pub const POSITION_ROUTE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Squeezing values for the state, purity and route checks.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1.0", allow_hyphen_values = true)]
    pub zeta: Vec<f64>,
    /// Tolerance for the operator algebra and the position quadrature.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Fock levels per mode for the algebra checks.
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Serialize)]
struct AlgebraEntry {
    #[serde(flatten)]
    report: AlgebraReport,
    /// Position blocks are contractions, so their algebra residuals are
    /// reported but do not decide the run.
    gating: bool,
}

#[derive(Debug, Serialize)]
struct PositionEntry {
    half_dim: usize,
    quadrature_residual: f64,
    quadrature_ok: bool,
    max_line_norm: f64,
    contraction_ok: bool,
    interior_unitarity_residual: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct FidelityEntry {
    zeta: f64,
    dim: usize,
    fidelity: f64,
    max_off_diagonal: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct PurityEntry {
    zeta: f64,
    purity: f64,
    expected: f64,
    residual: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct RouteEntry {
    zeta: f64,
    config: ConfigLabel,
    direct: f64,
    trace: f64,
    closed_form: f64,
    integral: Option<f64>,
    spread: f64,
    tol: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    tol: f64,
    algebra: Vec<AlgebraEntry>,
    position: PositionEntry,
    fidelity: Vec<FidelityEntry>,
    purity: Vec<PurityEntry>,
    routes: Vec<RouteEntry>,
    passed: bool,
}

fn position_entry(half_dim: usize, cfg: &PseudospinConfig, tol: f64) -> PositionEntry {
    let exact = position_config_exact(half_dim);
    let quadrature_residual = (cfg.u() - exact.u()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let max_line_norm = cfg.max_line_norm();
    let quadrature_ok = quadrature_residual <= tol;
    let contraction_ok = max_line_norm <= 1.0 + tol;
    PositionEntry {
        half_dim,
        quadrature_residual,
        quadrature_ok,
        max_line_norm,
        contraction_ok,
        interior_unitarity_residual: cfg.interior_unitarity_residual(half_dim.saturating_sub(1)),
        passed: quadrature_ok && contraction_ok,
    }
}

pub(super) fn run(args: &VerifyArgs, recorded: &[String], out: &mut dyn Write) -> CliResult<()> {
    if args.dim < 4 || args.dim % 2 != 0 {
        return Err(CliError::Usage(format!("--dim {} must be even and at least 4", args.dim)));
    }
    if !(args.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol {} must be positive", args.tol)));
    }
    let zetas = args.zeta.iter().map(|&z| squeeze(z)).collect::<CliResult<Vec<_>>>()?;

    let h = args.dim / 2;
    let position = position_config(h, &QuadratureSpec::for_levels(2 * h - 1))?;
    let mut algebra = Vec::new();
    for cfg in [number_config(h), position.clone(), alt_phase(h)] {
        let report = verify_su2(&operator_set(&cfg)?, args.tol);
        algebra.push(AlgebraEntry {
            gating: !report.truncated_block,
            report,
        });
    }
    let position_check = position_entry(h, &position, args.tol);

    let mut fidelity = Vec::new();
    let mut purity = Vec::new();
    let mut routes = Vec::new();
    let mut states = Vec::new();
    for &zp in &zetas {
        let z = zp.value();
        let trunc = truncation_for(zp, ORACLE_TAIL_TOL)?;
        let oracle = squeeze_oracle_with_limit(zp, &trunc, ORACLE_MAX_DIM)?;
        let fid = oracle.fidelity_with(&tmsv_state(zp, &trunc)?);
        let off = oracle.max_off_diagonal();
        fidelity.push(FidelityEntry {
            zeta: z,
            dim: trunc.dim(),
            fidelity: fid,
            max_off_diagonal: off,
            passed: fid >= 1.0 - FIDELITY_THRESHOLD && off < OFF_DIAGONAL_THRESHOLD,
        });

        let state = tmsv_state(zp, &truncation_for(zp, args.tail_tol)?)?;
        let rho = reduced_density(&state);
        let expected = 1.0 / (2.0 * z).cosh();
        let residual = (rho.purity() - expected).abs();
        purity.push(PurityEntry {
            zeta: z,
            purity: rho.purity(),
            expected,
            residual,
            passed: residual < PURITY_THRESHOLD,
        });
        states.push((zp, state, rho));
    }

    let max_h = states.iter().map(|(_, s, _)| s.dim() / 2).max().unwrap_or(1);
    let wide_position = if max_h > 0 && !states.is_empty() {
        Some(position_config(max_h, &QuadratureSpec::for_levels(2 * max_h - 1))?)
    } else {
        None
    };
    for (zp, state, rho) in &states {
        let hz = state.dim() / 2;
        for (label, which) in [
            (ConfigLabel::Number, ClosedForm::Number),
            (ConfigLabel::Position, ClosedForm::Position),
            (ConfigLabel::AltPhase, ClosedForm::AltPhase),
        ] {
            let cfg = match label {
                ConfigLabel::Number => number_config(hz),
                ConfigLabel::AltPhase => alt_phase(hz),
                _ => wide_position.as_ref().expect("built above").leading_block(hz)?,
            };
            let direct = f_direct(state, &cfg, &cfg)?.f;
            let trace = f_trace(rho, &cfg, &cfg)?.f;
            let closed_form = f_closed(*zp, which);
            let integral = if label == ConfigLabel::Position {
                Some(f_position_integral(*zp, &PlaneQuadrature::default())?)
            } else {
                None
            };
            let values = [Some(direct), Some(trace), Some(closed_form), integral];
            let (lo, hi) = values
                .iter()
                .flatten()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            let tol = if label == ConfigLabel::Position {
                POSITION_ROUTE_TOL
            } else {
                ROUTE_TOL
            };
            routes.push(RouteEntry {
                zeta: zp.value(),
                config: label,
                direct,
                trace,
                closed_form,
                integral,
                spread: hi - lo,
                tol,
                passed: hi - lo <= tol,
            });
        }
    }

    let passed = algebra.iter().all(|a| !a.gating || a.report.passed)
        && position_check.passed
        && fidelity.iter().all(|f| f.passed)
        && purity.iter().all(|p| p.passed)
        && routes.iter().all(|r| r.passed);
    let report = VerifyReport {
        tol: args.tol,
        algebra,
        position: position_check,
        fidelity,
        purity,
        routes,
        passed,
    };

    let mut summary = String::new();
    let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
    for a in &report.algebra {
        let r = &a.report;
        let _ = writeln!(
            summary,
            "{} algebra {:<9} N={} squares {:.2e} commutators {:.2e} projectors {:.2e}{}",
            mark(r.passed || !a.gating),
            r.label,
            r.dim,
            r.max_square_residual,
            r.max_commutator_residual,
            r.unitarity_residual,
            if a.gating { "" } else { " (truncated block, not gating)" }
        );
    }
    let p = &report.position;
    let _ = writeln!(
        summary,
        "{} position quadrature residual {:.2e}, max line norm {:.12}",
        mark(p.passed),
        p.quadrature_residual,
        p.max_line_norm
    );
    for f in &report.fidelity {
        let _ = writeln!(
            summary,
            "{} oracle zeta={} N={} 1-fidelity {:.2e}",
            mark(f.passed),
            f.zeta,
            f.dim,
            1.0 - f.fidelity
        );
    }
    for q in &report.purity {
        let _ = writeln!(summary, "{} purity zeta={} residual {:.2e}", mark(q.passed), q.zeta, q.residual);
    }
    for r in &report.routes {
        let _ = writeln!(
            summary,
            "{} routes zeta={} {} spread {:.2e}",
            mark(r.passed),
            r.zeta,
            r.config,
            r.spread
        );
    }
    let _ = writeln!(summary, "{}", if passed { "all checks passed" } else { "verification failed" });

    let manifest = RunManifest::new("verify", recorded)
        .tol("algebra", args.tol)
        .tol("quadrature", args.tol)
        .tol("fidelity", FIDELITY_THRESHOLD)
        .tol("purity", PURITY_THRESHOLD)
        .tol("route", ROUTE_TOL)
        .tol("position_route", POSITION_ROUTE_TOL)
        .tol("oracle_tail_tol", ORACLE_TAIL_TOL)
        .truncation(None, args.tail_tol);
    publish(&args.output, &manifest, &report, &summary, out)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed("verification failed; see the report for residuals".into()))
    }
}
