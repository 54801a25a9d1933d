use parity_bell::bell::{bell_value, horodecki_max, BellSetting, TSIRELSON};
use parity_bell::cli::SweepRow;
use parity_bell::correlations::{correlation_tensor, f_direct, f_trace, CorrelationTensor};
use parity_bell::fock::{reduced_density, tail_weight, tmsv_state, truncation_for, SqueezeParam};
use parity_bell::optimize::haar_unitary;
use parity_bell::pseudospin::{operator_set, ConfigLabel, PseudospinConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn angles() -> impl Strategy<Value = (f64, f64)> {
    (0.0..std::f64::consts::PI, 0.0..2.0 * std::f64::consts::PI)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_is_the_smallest_even_dimension(z in 0.0f64..3.0, exp in 4.0f64..14.0) {
        let tol = 10f64.powf(-exp);
        let zp = SqueezeParam::new(z).unwrap();
        let t = truncation_for(zp, tol).unwrap();
        prop_assert!(t.dim() >= 2 && t.dim() % 2 == 0);
        prop_assert!(tail_weight(zp, t.dim()) < tol);
        prop_assert!(t.dim() == 2 || tail_weight(zp, t.dim() - 2) >= tol);
    }

    #[test]
    fn schmidt_coefficients_decrease_and_nearly_normalize(z in 0.01f64..2.5) {
        let zp = SqueezeParam::new(z).unwrap();
        let s = tmsv_state(zp, &truncation_for(zp, 1e-12).unwrap()).unwrap();
        prop_assert!(s.lambda().windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
        prop_assert!(s.deficit() >= -1e-15 && s.deficit() < 1e-12 + 1e-14);
    }

    #[test]
    fn direct_and_trace_routes_agree(z in 0.0f64..1.5, seed in any::<u64>()) {
        let zp = SqueezeParam::new(z).unwrap();
        let s = tmsv_state(zp, &truncation_for(zp, 1e-12).unwrap()).unwrap();
        let h = s.dim() / 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = PseudospinConfig::custom(haar_unitary(h, &mut rng), 1e-10).unwrap();
        let b = PseudospinConfig::custom(haar_unitary(h, &mut rng), 1e-10).unwrap();
        let d = f_direct(&s, &a, &b).unwrap();
        let t = f_trace(&reduced_density(&s), &a, &b).unwrap();
        prop_assert!((d.f - t.f).abs() < 1e-12);
        // equal channels never beat the number configuration
        let same = f_direct(&s, &a, &a).unwrap().f;
        prop_assert!(same <= (2.0 * z).tanh() + 1e-12);
    }

    #[test]
    fn horodecki_dominates_any_setting(
        z in 0.0f64..1.2,
        seed in any::<u64>(),
        a in angles(), b in angles(), c in angles(), d in angles(),
    ) {
        let zp = SqueezeParam::new(z).unwrap();
        let s = tmsv_state(zp, &truncation_for(zp, 1e-12).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = PseudospinConfig::custom(haar_unitary(s.dim() / 2, &mut rng), 1e-10).unwrap();
        let set = operator_set(&cfg).unwrap();
        let k = correlation_tensor(&s, &set, &set).unwrap();
        let best = horodecki_max(&k);
        let setting = BellSetting::new(unit(a.0, a.1), unit(b.0, b.1), unit(c.0, c.1), unit(d.0, d.1)).unwrap();
        prop_assert!(bell_value(&k, &setting) <= best.value + 1e-12);
        prop_assert!(best.value <= TSIRELSON + 1e-9);
        prop_assert!((bell_value(&k, &best.setting) - best.value).abs() < 1e-12);
    }

    #[test]
    fn horodecki_value_is_rotation_invariant(
        x in -1.0f64..1.0, y in -1.0f64..1.0, zz in -1.0f64..1.0, t in 0.0f64..6.3,
    ) {
        let k = CorrelationTensor::diag(x, y, zz);
        let (c, s) = (t.cos(), t.sin());
        let rotated = CorrelationTensor::from_rows([
            [c * x, -s * y, 0.0],
            [s * x, c * y, 0.0],
            [0.0, 0.0, zz],
        ]);
        prop_assert!((horodecki_max(&k).value - horodecki_max(&rotated).value).abs() < 1e-12);
    }

    #[test]
    fn csv_numbers_round_trip(z in 0.0f64..3.0, f in -1.0f64..1.0, bell in 0.0f64..3.0) {
        let row = SweepRow { zeta: z, config: ConfigLabel::Position, f, bell_value: bell, dim: 12, condition15: true };
        let line = row.csv_line();
        let cols: Vec<&str> = line.split(',').collect();
        prop_assert_eq!(cols[0].parse::<f64>().unwrap().to_bits(), z.to_bits());
        prop_assert_eq!(cols[2].parse::<f64>().unwrap().to_bits(), f.to_bits());
        prop_assert_eq!(cols[3].parse::<f64>().unwrap().to_bits(), bell.to_bits());
    }
}
