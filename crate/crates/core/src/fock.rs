//! Truncated Fock-space description of the two-mode squeezed vacuum.
//!
//! The state is kept in Schmidt form, `|psi> = sum_n lambda_n |n n>` with
//! `lambda_n = tanh^n(zeta) / cosh(zeta)`. The truncation keeps the first `N`
//! levels (`N` even), so the discarded weight is exactly `tanh^{2N}(zeta)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest squeezing parameter accepted by [`truncation_for`].
pub const DEFAULT_ZETA_CAP: f64 = 3.0;
/// Default bound on the discarded Schmidt weight.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Default cap on the per-mode dimension of [`squeeze_oracle`].
pub const DEFAULT_ORACLE_MAX_DIM: usize = 64;

/// Real squeezing parameter, restricted to `zeta >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct SqueezeParam(f64);

impl SqueezeParam {
    pub fn new(zeta: f64) -> Result<Self> {
        if !zeta.is_finite() || zeta < 0.0 {
            return Err(Error::InvalidSqueeze(zeta));
        }
        Ok(Self(zeta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Exact weight `sum_{n >= dim} lambda_n^2 = tanh^{2 dim}(zeta)` dropped by a truncation.
pub fn tail_weight(zeta: SqueezeParam, dim: usize) -> f64 {
    let t = zeta.value().tanh();
    if t == 0.0 {
        return 0.0;
    }
    (2.0 * dim as f64 * t.ln()).exp()
}

/// Number of Fock levels kept per mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockTruncation {
    dim: usize,
    tail_tol: f64,
    /// Weight actually discarded for the squeezing this truncation was built for.
    discarded: f64,
    zeta: f64,
    /// Adaptive truncations refuse states whose tail exceeds `tail_tol`;
    /// fixed ones only record it.
    adaptive: bool,
}

impl FockTruncation {
    /// A fixed truncation with an explicit dimension. The discarded weight is
    /// recorded but not enforced.
    pub fn fixed(zeta: SqueezeParam, dim: usize, tail_tol: f64) -> Result<Self> {
        check_dim(dim)?;
        check_tol(tail_tol)?;
        Ok(Self {
            dim,
            tail_tol,
            discarded: tail_weight(zeta, dim),
            zeta: zeta.value(),
            adaptive: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_dim(&self) -> usize {
        self.dim / 2
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn discarded(&self) -> f64 {
        self.discarded
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn is_adaptive(&self) -> bool {
        self.adaptive
    }

    /// Whether the discarded weight is below the tolerance.
    pub fn within_tol(&self) -> bool {
        self.discarded < self.tail_tol
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 || dim % 2 != 0 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}

/// Smallest even `N >= 2` with `tanh^{2N}(zeta) < tail_tol`, using the default cap.
pub fn truncation_for(zeta: SqueezeParam, tail_tol: f64) -> Result<FockTruncation> {
    truncation_for_with_cap(zeta, tail_tol, DEFAULT_ZETA_CAP)
}

pub fn truncation_for_with_cap(
    zeta: SqueezeParam,
    tail_tol: f64,
    cap: f64,
) -> Result<FockTruncation> {
    check_tol(tail_tol)?;
    if zeta.value() > cap {
        return Err(Error::CapExceeded {
            zeta: zeta.value(),
            cap,
        });
    }
    let t = zeta.value().tanh();
    let mut dim = if t == 0.0 || tail_tol >= 1.0 {
        2
    } else {
        // tanh^{2N} < tol  <=>  N > ln(tol) / (2 ln t)
        let bound = tail_tol.ln() / (2.0 * t.ln());
        let n = bound.floor().max(0.0) as usize;
        (n + 1).max(2)
    };
    dim += dim % 2;
    // Settle rounding at the boundary against the exact tail.
    while dim > 2 && tail_weight(zeta, dim - 2) < tail_tol {
        dim -= 2;
    }
    while tail_weight(zeta, dim) >= tail_tol {
        dim += 2;
    }
    Ok(FockTruncation {
        dim,
        tail_tol,
        discarded: tail_weight(zeta, dim),
        zeta: zeta.value(),
        adaptive: true,
    })
}

/// Schmidt coefficients of the two-mode squeezed vacuum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TmsvState {
    zeta: f64,
    lambda: Vec<f64>,
}

impl TmsvState {
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.lambda.iter().map(|l| l * l).sum()
    }

    /// Normalization deficit left by the truncation.
    pub fn deficit(&self) -> f64 {
        1.0 - self.norm_sqr()
    }

    /// Entanglement entropy `-sum lambda_n^2 ln lambda_n^2` of the truncated state.
    pub fn schmidt_entropy(&self) -> f64 {
        self.lambda
            .iter()
            .map(|l| l * l)
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }
}

/// `lambda_n = tanh^n(zeta) / cosh(zeta)` for `n < N`, not renormalized.
pub fn tmsv_state(zeta: SqueezeParam, trunc: &FockTruncation) -> Result<TmsvState> {
    if trunc.is_adaptive() {
        let discarded = tail_weight(zeta, trunc.dim());
        if discarded >= trunc.tail_tol() {
            return Err(Error::TruncationTooSmall {
                dim: trunc.dim(),
                zeta: zeta.value(),
                discarded,
                tail_tol: trunc.tail_tol(),
            });
        }
    }
    let z = zeta.value();
    let t = z.tanh();
    let mut lambda = Vec::with_capacity(trunc.dim());
    let mut l = 1.0 / z.cosh();
    for _ in 0..trunc.dim() {
        lambda.push(l);
        l *= t;
    }
    Ok(TmsvState { zeta: z, lambda })
}

/// Diagonal reduced density over half-indices, `rho_n = tanh^{2n}(zeta) / cosh^2(zeta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedDensity {
    zeta: f64,
    rho: Vec<f64>,
    full_trace: f64,
}

impl ReducedDensity {
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn half_dim(&self) -> usize {
        self.rho.len()
    }

    /// Trace over every kept Fock level (not only half-indices).
    pub fn full_trace(&self) -> f64 {
        self.full_trace
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|r| r * r).sum()
    }

    /// Leading `half_dim` half-indices.
    pub fn leading(&self, half_dim: usize) -> Result<Self> {
        if half_dim > self.rho.len() || half_dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: self.rho.len(),
                found: half_dim,
            });
        }
        Ok(Self {
            zeta: self.zeta,
            rho: self.rho[..half_dim].to_vec(),
            full_trace: self.full_trace,
        })
    }
}

pub fn reduced_density(state: &TmsvState) -> ReducedDensity {
    let half = state.dim() / 2;
    let lambda = state.lambda();
    let rho: Vec<f64> = lambda[..half].iter().map(|l| l * l).collect();
    let scale = (2.0 * state.zeta()).sinh() / 2.0;
    debug_assert!((0..half).all(|n| {
        let m = half - 1 - n;
        let lhs = scale * rho[n] * rho[m];
        let rhs = lambda[2 * n] * lambda[2 * m + 1];
        (lhs - rhs).abs() <= 1e-13 * rhs.abs().max(f64::MIN_POSITIVE)
    }));
    ReducedDensity {
        zeta: state.zeta(),
        rho,
        full_trace: state.norm_sqr(),
    }
}

/// Amplitudes `amp[n][m] = <n m|psi>` of a two-mode state, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeVector {
    dim: usize,
    amp: Vec<Complex64>,
}

impl TwoModeVector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.amp[n * self.dim + m]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.dim;
        (0..d)
            .flat_map(|n| (0..d).filter(move |&m| m != n).map(move |m| (n, m)))
            .map(|(n, m)| self.get(n, m).norm())
            .fold(0.0, f64::max)
    }

    /// `|<self|schmidt>|^2` with both vectors normalized.
    pub fn fidelity_with(&self, state: &TmsvState) -> f64 {
        let d = self.dim.min(state.dim());
        let overlap: Complex64 = (0..d)
            .map(|n| self.get(n, n).conj() * state.lambda()[n])
            .sum();
        overlap.norm_sqr() / (self.norm_sqr() * state.norm_sqr())
    }
}

/// Applies `exp(zeta (a^+ b^+ - a b))` to `|00>` on `N x N` levels using
/// truncated ladder operators. Verification tool only: cost is `O(zeta N^3)`.
pub fn squeeze_oracle(zeta: SqueezeParam, trunc: &FockTruncation) -> Result<TwoModeVector> {
    squeeze_oracle_with_limit(zeta, trunc, DEFAULT_ORACLE_MAX_DIM)
}

pub fn squeeze_oracle_with_limit(
    zeta: SqueezeParam,
    trunc: &FockTruncation,
    max_dim: usize,
) -> Result<TwoModeVector> {
    let d = trunc.dim();
    if d > max_dim {
        return Err(Error::DimensionTooLarge {
            dim: d,
            limit: max_dim,
        });
    }
    let z = zeta.value();
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    psi[0] = Complex64::new(1.0, 0.0);

    // ||a^+ b^+ - a b|| <= 2 (N - 1); keep each substep's generator norm <= 1/2.
    let gen_norm = 2.0 * z * (d as f64 - 1.0);
    let steps = (gen_norm / 0.5).ceil().max(1.0) as usize;
    let dt = z / steps as f64;
    let sqrt: Vec<f64> = (0..=d).map(|n| (n as f64).sqrt()).collect();

    let apply = |v: &[Complex64], out: &mut [Complex64]| {
        for n in 0..d {
            for m in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                if n > 0 && m > 0 {
                    acc += v[(n - 1) * d + (m - 1)] * (sqrt[n] * sqrt[m]);
                }
                if n + 1 < d && m + 1 < d {
                    acc -= v[(n + 1) * d + (m + 1)] * (sqrt[n + 1] * sqrt[m + 1]);
                }
                out[n * d + m] = acc * dt;
            }
        }
    };

    let mut term = vec![Complex64::new(0.0, 0.0); d * d];
    let mut next = vec![Complex64::new(0.0, 0.0); d * d];
    for _ in 0..steps {
        term.copy_from_slice(&psi);
        let mut k = 1.0;
        loop {
            apply(&term, &mut next);
            for x in next.iter_mut() {
                *x /= k;
            }
            std::mem::swap(&mut term, &mut next);
            let mut size = 0.0;
            for (p, t) in psi.iter_mut().zip(&term) {
                *p += t;
                size += t.norm_sqr();
            }
            if size.sqrt() < 1e-18 || k > 60.0 {
                break;
            }
            k += 1.0;
        }
    }
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in psi.iter_mut() {
        *a /= norm;
    }
    Ok(TwoModeVector { dim: d, amp: psi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta(z: f64) -> SqueezeParam {
        SqueezeParam::new(z).unwrap()
    }

    #[test]
    fn rejects_negative_and_nonfinite_zeta() {
        assert!(SqueezeParam::new(-0.1).is_err());
        assert!(SqueezeParam::new(f64::NAN).is_err());
        assert!(SqueezeParam::new(f64::INFINITY).is_err());
    }

    #[test]
    fn vacuum_truncation_is_two_levels() {
        let t = truncation_for(zeta(0.0), 1e-12).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.discarded(), 0.0);
    }

    #[test]
    fn truncation_matches_direct_tail_summation() {
        let z = 1.0;
        let t = truncation_for(zeta(z), 1e-12).unwrap();
        // brute-force tail: sum lambda_n^2 for n >= N, and the same for N - 2
        let tail_from = |start: usize| -> f64 {
            let (th, ch) = (z.tanh(), z.cosh());
            (start..start + 20_000)
                .map(|n| th.powi(2 * n as i32) / (ch * ch))
                .sum()
        };
        assert_eq!(t.dim(), 52);
        assert!(tail_from(t.dim()) < 1e-12);
        assert!(tail_from(t.dim() - 2) >= 1e-12);
    }

    #[test]
    fn cap_and_tolerance_errors() {
        assert!(matches!(
            truncation_for(zeta(10.0), 1e-12),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            truncation_for(zeta(1.0), 0.0),
            Err(Error::InvalidTolerance(_))
        ));
        assert!(matches!(
            FockTruncation::fixed(zeta(1.0), 7, 1e-12),
            Err(Error::InvalidDimension(7))
        ));
    }

    #[test]
    fn schmidt_coefficients() {
        let z = zeta(0.5);
        let s = tmsv_state(z, &truncation_for(z, 1e-12).unwrap()).unwrap();
        let ratio = s.lambda()[1] / s.lambda()[0];
        assert!((ratio - 0.462_117_157_260_009_8).abs() < 1e-15);
        assert!(s.deficit() >= 0.0 && s.deficit() < 1e-12);
        assert!(s.lambda().windows(2).all(|w| w[1] < w[0]));

        let vac = tmsv_state(zeta(0.0), &truncation_for(zeta(0.0), 1e-12).unwrap()).unwrap();
        assert_eq!(vac.lambda(), &[1.0, 0.0]);
    }

    #[test]
    fn adaptive_truncation_refuses_larger_zeta() {
        let t = truncation_for(zeta(0.3), 1e-12).unwrap();
        assert!(matches!(
            tmsv_state(zeta(1.0), &t),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn purity_identity() {
        for z in [0.1, 0.5, 1.0, 2.0] {
            let zp = zeta(z);
            let s = tmsv_state(zp, &truncation_for(zp, 1e-12).unwrap()).unwrap();
            let rho = reduced_density(&s);
            // geometric series: sum_n t^{4n} / c^4
            let (t, c) = (z.tanh(), z.cosh());
            let series = 1.0 / (c.powi(4) * (1.0 - t.powi(4)));
            assert!((series - 1.0 / (2.0 * z).cosh()).abs() < 1e-14);
            assert!((rho.purity() - 1.0 / (2.0 * z).cosh()).abs() < 1e-10);
            assert!(((2.0 * z).sinh() * rho.purity() - (2.0 * z).tanh()).abs() < 1e-10);
            assert!((rho.full_trace() - 1.0).abs() < 1e-12);
        }
        let zp = zeta(0.5);
        let rho = reduced_density(&tmsv_state(zp, &truncation_for(zp, 1e-12).unwrap()).unwrap());
        assert!((rho.purity() - 0.648_054_273_663_885_4).abs() < 1e-12);
    }

    #[test]
    fn vacuum_reduced_density() {
        let z = zeta(0.0);
        let rho = reduced_density(&tmsv_state(z, &truncation_for(z, 1e-12).unwrap()).unwrap());
        assert_eq!(rho.rho(), &[1.0]);
    }

    #[test]
    fn oracle_identity_at_zero() {
        let z = zeta(0.0);
        let v = squeeze_oracle(z, &FockTruncation::fixed(z, 8, 1e-12).unwrap()).unwrap();
        assert_eq!(v.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(v.norm_sqr(), 1.0);
    }

    #[test]
    fn oracle_stays_on_the_diagonal() {
        let z = zeta(0.5);
        let trunc = FockTruncation::fixed(z, 32, 1e-12).unwrap();
        let v = squeeze_oracle(z, &trunc).unwrap();
        assert!(v.max_off_diagonal() < 1e-10);
        let s = tmsv_state(z, &trunc).unwrap();
        assert!(v.fidelity_with(&s) >= 1.0 - 1e-8);
    }

    #[test]
    fn oracle_matches_dense_matrix_exponential() {
        use nalgebra::DMatrix;
        let d = 6;
        let z = 0.7;
        let mut gen = DMatrix::<f64>::zeros(d * d, d * d);
        for n in 0..d - 1 {
            for m in 0..d - 1 {
                // a^+ b^+ |n m> = sqrt((n+1)(m+1)) |n+1 m+1>
                let w = (((n + 1) * (m + 1)) as f64).sqrt() * z;
                gen[((n + 1) * d + m + 1, n * d + m)] += w;
                gen[(n * d + m, (n + 1) * d + m + 1)] -= w;
            }
        }
        let col = gen.exp().column(0).into_owned();
        let zp = zeta(z);
        let v = squeeze_oracle(zp, &FockTruncation::fixed(zp, d, 1e-12).unwrap()).unwrap();
        for n in 0..d {
            for m in 0..d {
                assert!((v.get(n, m) - col[n * d + m]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn oracle_limit() {
        let z = zeta(0.5);
        let trunc = FockTruncation::fixed(z, 66, 1e-12).unwrap();
        assert!(matches!(
            squeeze_oracle(z, &trunc),
            Err(Error::DimensionTooLarge { dim: 66, limit: 64 })
        ));
    }
}
