//! Normalized harmonic-oscillator eigenfunctions
//! `psi_n(q) = (2^n n! sqrt(pi))^{-1/2} H_n(q) exp(-q^2 / 2)`.
//!
//! Values come from the three-term recurrence
//! `psi_{n+1} = sqrt(2/(n+1)) q psi_n - sqrt(n/(n+1)) psi_{n-1}`
//! run on the polynomial part with a running power-of-two exponent, so large
//! `q` neither underflows the Gaussian nor overflows the polynomial.

const PI_M14: f64 = 0.751_125_544_464_942_5; // pi^{-1/4}
const RESCALE_ABOVE: f64 = 1e150;

/// `psi_n(q)`.
pub fn hermite_psi(n: usize, q: f64) -> f64 {
    let mut out = 0.0;
    HermiteLadder::new(q).run(n, |k, v| {
        if k == n {
            out = v;
        }
    });
    out
}

/// `psi_0(q), ..., psi_{max_level}(q)`.
pub fn hermite_psi_all(max_level: usize, q: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_level + 1];
    HermiteLadder::new(q).run(max_level, |k, v| out[k] = v);
    out
}

struct HermiteLadder {
    q: f64,
}

impl HermiteLadder {
    fn new(q: f64) -> Self {
        Self { q }
    }

    fn run(&self, max_level: usize, mut emit: impl FnMut(usize, f64)) {
        let q = self.q;
        // value = p * exp(log_scale - q^2 / 2)
        let mut log_scale = 0.0f64;
        let mut p_prev = 0.0f64;
        let mut p = PI_M14;
        let gauss = |p: f64, ls: f64| {
            if p == 0.0 {
                0.0
            } else {
                p * (ls - 0.5 * q * q).exp()
            }
        };
        emit(0, gauss(p, log_scale));
        for n in 0..max_level {
            let nf = n as f64;
            let next = (2.0 / (nf + 1.0)).sqrt() * q * p - (nf / (nf + 1.0)).sqrt() * p_prev;
            p_prev = p;
            p = next;
            if p.abs() > RESCALE_ABOVE {
                p /= RESCALE_ABOVE;
                p_prev /= RESCALE_ABOVE;
                log_scale += RESCALE_ABOVE.ln();
            }
            emit(n + 1, gauss(p, log_scale));
        }
    }
}

/// `psi_n(0)`: zero for odd `n`, `(-1)^{n/2} pi^{-1/4} sqrt(n!) / (2^{n/2} (n/2)!)` for even `n`.
pub fn psi_at_origin(n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    // psi_{2k+2}(0) = -sqrt((2k+1)/(2k+2)) psi_{2k}(0)
    let mut v = PI_M14;
    for k in 0..n / 2 {
        let kf = k as f64;
        v *= -((2.0 * kf + 1.0) / (2.0 * kf + 2.0)).sqrt();
    }
    v
}

/// `psi_n'(0)`: zero for even `n`, `sqrt(2n) psi_{n-1}(0)` for odd `n`.
pub fn psi_derivative_at_origin(n: usize) -> f64 {
    if n % 2 == 0 {
        return 0.0;
    }
    (2.0 * n as f64).sqrt() * psi_at_origin(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureSpec;

    #[test]
    fn ground_state_at_origin() {
        // direct formula pi^{-1/4}
        let direct = std::f64::consts::PI.powf(-0.25);
        assert!((hermite_psi(0, 0.0) - direct).abs() < 1e-16);
        assert!((hermite_psi(0, 0.0) - 0.751_126).abs() < 1e-6);
        assert_eq!(hermite_psi(1, 0.0), 0.0);
    }

    #[test]
    fn matches_explicit_low_order_formulas() {
        let pi14 = std::f64::consts::PI.powf(-0.25);
        for q in [-2.3f64, -0.4, 0.0, 0.7, 1.9, 4.2] {
            let g = (-q * q / 2.0).exp();
            let psi1 = pi14 * 2f64.sqrt() * q * g;
            let psi2 = pi14 / 2f64.sqrt() * (2.0 * q * q - 1.0) * g;
            let psi3 = pi14 / 3f64.sqrt() * (2.0 * q * q * q - 3.0 * q) * g;
            let all = hermite_psi_all(3, q);
            assert!((all[1] - psi1).abs() < 1e-15);
            assert!((all[2] - psi2).abs() < 1e-15);
            assert!((all[3] - psi3).abs() < 1e-14);
        }
    }

    #[test]
    fn orthonormality_by_quadrature() {
        let rule = QuadratureSpec::new(-14.0, 14.0, 40, 24).unwrap();
        let (x, w) = rule.nodes_weights();
        let table: Vec<Vec<f64>> = x.iter().map(|&q| hermite_psi_all(40, q)).collect();
        for n in [0, 3, 17, 40] {
            for m in [0, 3, 17, 40] {
                let v: f64 = table.iter().zip(&w).map(|(t, wi)| wi * t[n] * t[m]).sum();
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-10, "<{n}|{m}> = {v}");
            }
        }
    }

    #[test]
    fn far_tail_does_not_overflow() {
        let v = hermite_psi(2000, 80.0);
        assert!(v.is_finite());
        assert!(hermite_psi(3000, 40.0).is_finite());
        // inside the classical region the functions are O(n^{-1/4})
        assert!(hermite_psi(3000, 40.0).abs() < 1.0);
    }

    #[test]
    fn origin_values_agree_with_recurrence() {
        let at0 = hermite_psi_all(60, 0.0);
        for (n, v) in at0.iter().enumerate() {
            assert!((psi_at_origin(n) - v).abs() < 1e-15);
        }
        // derivative by central difference
        let h = 1e-5;
        for n in [1, 5, 21] {
            let d = (hermite_psi(n, h) - hermite_psi(n, -h)) / (2.0 * h);
            assert!((d - psi_derivative_at_origin(n)).abs() < 1e-8);
        }
    }
}
