//! Acceptance suite. Prints one PASS/FAIL line per criterion, with the
//! measured residuals, and exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::Instant;

use parity_bell::bell::{direct_search, horodecki_max, TSIRELSON};
use parity_bell::cli;
use parity_bell::correlations::{
    bell_from_f, correlation_tensor, f_closed, f_direct, f_position_integral, f_trace, ClosedForm,
    PlaneQuadrature,
};
use parity_bell::fock::{reduced_density, squeeze_oracle, tmsv_state, truncation_for, FockTruncation, SqueezeParam};
use parity_bell::optimize::{
    haar_unitary, linspace, nonmonotonicity_certificate, RandomUnitarySearch,
};
use parity_bell::pseudospin::{
    alt_phase, number_config, operator_set, position_config, verify_su2, ConfigLabel,
    PseudospinConfig,
};
use parity_bell::quadrature::QuadratureSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TAIL_TOL: f64 = 1e-12;

struct Outcome {
    passed: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.passed &= ok;
        self.details.push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn zp(z: f64) -> SqueezeParam {
    SqueezeParam::new(z).unwrap()
}

fn state(z: f64) -> parity_bell::TmsvState {
    tmsv_state(zp(z), &truncation_for(zp(z), TAIL_TOL).unwrap()).unwrap()
}

fn named(label: ConfigLabel, h: usize, position: &PseudospinConfig) -> PseudospinConfig {
    match label {
        ConfigLabel::Number => number_config(h),
        ConfigLabel::AltPhase => alt_phase(h),
        ConfigLabel::Position => position.leading_block(h).unwrap(),
        _ => unreachable!(),
    }
}

fn position_up_to(z: f64) -> PseudospinConfig {
    let h = state(z).dim() / 2;
    position_config(h, &QuadratureSpec::for_levels(2 * h - 1)).unwrap()
}

const NAMED: [ConfigLabel; 3] = [ConfigLabel::Number, ConfigLabel::Position, ConfigLabel::AltPhase];

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["parity-bell"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    (code, out)
}

/// Matrix-route F over 200 points on [0, 2] through the sweep command.
fn closed_form_reproduction() -> Outcome {
    let mut o = Outcome::new();
    let (code, csv) = run_cli(&[
        "sweep", "--zeta-min", "0", "--zeta-max", "2", "--steps", "200", "--configs", "number,position",
    ]);
    o.check(code == 0, format!("sweep exit code {code}"));
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    o.check(lines.next() == Some(cli::CSV_HEADER), "CSV header".into());
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    o.check(rows.len() == 400, format!("{} rows", rows.len()));

    let (mut worst_number, mut worst_position) = (0.0f64, 0.0f64);
    let mut dominated = true;
    for pair in rows.chunks(2) {
        let z: f64 = pair[0][0].parse().unwrap();
        let f_number: f64 = pair[0][2].parse().unwrap();
        let f_position: f64 = pair[1][2].parse().unwrap();
        assert_eq!((pair[0][1], pair[1][1]), ("number", "position"));
        worst_number = worst_number.max((f_number - (2.0 * z).tanh()).abs());
        worst_position = worst_position.max((f_position - 2.0 / PI * (2.0 * z).sinh().atan()).abs());
        if z > 0.0 && (f_number < f_position || f_number.is_nan() || f_position.is_nan()) {
            dominated = false;
        }
    }
    o.check(worst_number <= 1e-9, format!("number |F - tanh 2z| max {worst_number:.3e} (tol 1e-9)"));
    o.check(
        worst_position <= 1e-6,
        format!("position |F - (2/pi) atan sinh 2z| max {worst_position:.3e} (tol 1e-6)"),
    );
    o.check(dominated, "number curve >= position curve for every z > 0".into());
    o
}

/// Seeded random unitaries never beat tanh 2z; the identity attains it.
fn bound_certification() -> Outcome {
    let mut o = Outcome::new();
    for (i, z) in [0.4, 0.8, 1.2].into_iter().enumerate() {
        let rho = reduced_density(&state(z));
        let bound = (2.0 * z).tanh();
        let r = RandomUnitarySearch::new(1000, 1000 + i as u64).run(&rho).unwrap();
        o.check(
            r.best_f <= bound + 1e-9,
            format!("z={z}: best of {} random F {:.12} <= tanh 2z {:.12} + 1e-9", r.trials, r.best_f, bound),
        );
        let id = number_config(rho.half_dim());
        let f_id = f_trace(&rho, &id, &id).unwrap().f;
        o.check(
            (f_id - bound).abs() <= 1e-12,
            format!("z={z}: U = I gives |F - tanh 2z| = {:.3e} (tol 1e-12)", (f_id - bound).abs()),
        );
    }
    o
}

/// Horodecki and seeded direct search agree and equal 2 sqrt(1 + F^2).
fn orientational_optimum() -> Outcome {
    let mut o = Outcome::new();
    let position = position_up_to(1.0);
    for z in [0.25, 0.5, 1.0] {
        let s = state(z);
        for label in NAMED {
            let cfg = named(label, s.dim() / 2, &position);
            let set = operator_set(&cfg).unwrap();
            let k = correlation_tensor(&s, &set, &set).unwrap();
            let h = horodecki_max(&k);
            let d = direct_search(&k, 16, 7).unwrap();
            let formula = bell_from_f(f_direct(&s, &cfg, &cfg).unwrap().f);
            let gap = (h.value - d.value).abs().max((h.value - formula).abs());
            o.check(
                gap <= 1e-8,
                format!("z={z} {label}: horodecki {:.12} direct {:.12} formula {:.12} (gap {gap:.2e}, tol 1e-8)", h.value, d.value, formula),
            );
        }
    }
    o
}

/// No Bell value above 2 sqrt 2; the number configuration approaches it at z = 3.
fn cirelson_limit() -> Outcome {
    let mut o = Outcome::new();
    let position = position_up_to(3.0);
    let mut worst = f64::NEG_INFINITY;
    let mut at = (0.0, ConfigLabel::Number);
    for z in linspace(0.0, 3.0, 31) {
        let s = state(z);
        for label in NAMED {
            let cfg = named(label, s.dim() / 2, &position);
            let set = operator_set(&cfg).unwrap();
            let v = horodecki_max(&correlation_tensor(&s, &set, &set).unwrap()).value;
            if v > worst {
                worst = v;
                at = (z, label);
            }
        }
    }
    o.check(
        worst <= TSIRELSON + 1e-9,
        format!("max Bell value {worst:.12} at z={} {} <= 2 sqrt 2 + 1e-9", at.0, at.1),
    );
    let s = state(3.0);
    let cfg = number_config(s.dim() / 2);
    let set = operator_set(&cfg).unwrap();
    let v = horodecki_max(&correlation_tensor(&s, &set, &set).unwrap()).value;
    o.check(
        v >= TSIRELSON - 1e-4,
        format!("number at z=3: {v:.12} >= 2 sqrt 2 - 1e-4 (N = {})", s.dim()),
    );
    o
}

/// Alternating-phase F rises then falls while the entropy keeps growing.
fn non_monotonicity() -> Outcome {
    let mut o = Outcome::new();
    let grid = linspace(0.05, 3.0, 300);
    let r = nonmonotonicity_certificate(&grid).unwrap();
    o.check(r.all_positive, "F > 0 on all 300 points".into());
    o.check(
        r.interior_maximum,
        format!("interior maximum F = {:.9} at z = {:.6}", r.max_f, r.argmax_zeta),
    );
    o.check(r.last_f < 0.02, format!("F(3.0) = {:.6e} < 0.02", r.last_f));
    o.check(r.entropy_increasing, "Schmidt entropy strictly increasing".into());

    // dense scan of the closed form, independent of the matrix route
    let mut best = (0.0, 0.0);
    for i in 0..=600_000 {
        let z = 0.05 + 2.95 * i as f64 / 600_000.0;
        let f = f_closed(zp(z), ClosedForm::AltPhase);
        if f > best.1 {
            best = (z, f);
        }
    }
    let step = grid[1] - grid[0];
    o.check(
        (best.1 - FRAC_1_SQRT_2).abs() < 1e-9,
        format!("dense scan maximum {:.12} at z = {:.6} (1/sqrt 2 = {FRAC_1_SQRT_2:.12})", best.1, best.0),
    );
    o.check(
        (r.argmax_zeta - best.0).abs() <= step && (r.max_f - best.1).abs() < 1e-3,
        format!("grid argmax within one step ({step:.4}) of the dense-scan argmax"),
    );
    o
}

/// Direct and trace routes on random unitaries; plane integral for position.
fn route_agreement() -> Outcome {
    let mut o = Outcome::new();
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let z = 0.1 + 1.4 * (trial as f64) / 99.0;
        let s = state(z);
        let rho = reduced_density(&s);
        let h = s.dim() / 2;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        rng.set_stream(trial);
        let c1 = PseudospinConfig::custom(haar_unitary(h, &mut rng), 1e-10).unwrap();
        let c2 = PseudospinConfig::custom(haar_unitary(h, &mut rng), 1e-10).unwrap();
        let d = f_direct(&s, &c1, &c2).unwrap().f;
        let t = f_trace(&rho, &c1, &c2).unwrap().f;
        worst = worst.max((d - t).abs());
    }
    o.check(worst <= 1e-12, format!("100 random unitary pairs: max |direct - trace| {worst:.3e} (tol 1e-12)"));
    for z in [0.25, 0.5, 1.0, 2.0] {
        let quad = PlaneQuadrature {
            tol: 1e-6,
            ..PlaneQuadrature::default()
        };
        let ok = match f_position_integral(zp(z), &quad) {
            Ok(v) => {
                let err = (v - f_closed(zp(z), ClosedForm::Position)).abs();
                (err <= 1e-6, format!("z={z}: |integral - closed form| {err:.3e} (tol 1e-6)"))
            }
            Err(e) => (false, format!("z={z}: {e}")),
        };
        o.check(ok.0, ok.1);
    }
    o
}

/// Squeeze-operator oracle against the Schmidt form at N = 32; purity identity.
fn state_construction_oracle() -> Outcome {
    let mut o = Outcome::new();
    for z in [0.25, 0.5, 1.0] {
        let trunc = FockTruncation::fixed(zp(z), 32, TAIL_TOL).unwrap();
        let oracle = squeeze_oracle(zp(z), &trunc).unwrap();
        let fid = oracle.fidelity_with(&tmsv_state(zp(z), &trunc).unwrap());
        o.check(
            fid >= 1.0 - 1e-8,
            format!("z={z} N=32: 1 - fidelity = {:.3e} (tol 1e-8; discarded weight {:.3e})", 1.0 - fid, trunc.discarded()),
        );
        let rho = reduced_density(&state(z));
        let residual = (rho.purity() - 1.0 / (2.0 * z).cosh()).abs();
        o.check(residual < 1e-10, format!("z={z}: |Tr rho^2 - 1/cosh 2z| = {residual:.3e} (tol 1e-10)"));
    }
    o
}

/// Pseudospin algebra on the interior block at N = 64.
fn algebra_suite() -> Outcome {
    let mut o = Outcome::new();
    let tol = 1e-10;
    let h = 32;
    let position = position_config(h, &QuadratureSpec::for_levels(2 * h - 1)).unwrap();
    for label in NAMED {
        let cfg = named(label, h, &position);
        let r = verify_su2(&operator_set(&cfg).unwrap(), tol);
        o.check(
            r.passed,
            format!(
                "{label} N=64: squares {:.2e} commutators {:.2e} projectors {:.2e} (tol {tol:e})",
                r.max_square_residual, r.max_commutator_residual, r.unitarity_residual
            ),
        );
    }
    let residual = position.interior_unitarity_residual(h - 1);
    o.check(
        residual < 1e-8,
        format!("position U interior unitarity residual {residual:.3e} at N=64 (tol 1e-8)"),
    );
    o
}

/// Byte-identical output for repeated runs of every subcommand.
fn determinism() -> Outcome {
    let mut o = Outcome::new();
    let commands: [&[&str]; 5] = [
        &["sweep", "--zeta-min", "0", "--zeta-max", "1.5", "--steps", "40", "--configs", "number,position,alt-phase"],
        &["bell", "--zeta", "0.7", "--configs", "position", "--seed", "3", "--json"],
        &["verify", "--json"],
        &["optimize", "--zeta", "0.8", "--family", "random-unitary", "--trials", "1000", "--seed", "42", "--json"],
        &["optimize", "--zeta", "0.8", "--family", "diagonal-phase", "--json"],
    ];
    for args in commands {
        let (c1, a) = run_cli(args);
        let (c2, b) = run_cli(args);
        o.check(
            c1 == 0 && c2 == 0 && a == b && !a.is_empty(),
            format!("`{}`: {} bytes, identical = {}", args.join(" "), a.len(), a == b),
        );
    }
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("closed-form reproduction", closed_form_reproduction),
        ("bound certification", bound_certification),
        ("orientational optimum", orientational_optimum),
        ("Cirel'son limit", cirelson_limit),
        ("non-monotonicity", non_monotonicity),
        ("route agreement", route_agreement),
        ("state construction oracle", state_construction_oracle),
        ("algebra suite", algebra_suite),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    println!("acceptance: {} criteria", criteria.len());
    for (name, f) in criteria {
        let start = Instant::now();
        let o = f();
        println!(
            "[{}] {name} ({:.1}s)",
            if o.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        for d in &o.details {
            println!("       {d}");
        }
        if !o.passed {
            failed.push(name);
        }
    }
    println!();
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failed: {}", failed.len(), failed.join(", "));
        std::process::exit(1);
    }
}
