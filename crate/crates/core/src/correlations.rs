//! Correlation tensor and the key correlation `F = <Pi_x (x) Pi_x>`.
//!
//! `F` is available by four routes: the Schmidt-form contraction
//! ([`f_direct`]), the reduced-density trace formula ([`f_trace`]), a
//! position-space double integral of the squeezed Gaussians
//! ([`f_position_integral`]), and closed forms for the named families
//! ([`f_closed`]).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ReducedDensity, SqueezeParam, TmsvState};
use crate::pseudospin::{Component, OperatorSet, PseudospinConfig};
use crate::quadrature::gauss_legendre;

/// Absolute tolerance used to decide equality/positivity of `<Pi_+ Pi_+>` and `<Pi_- Pi_->`.
pub const DEFAULT_CONDITION_TOL: f64 = 1e-10;
/// Declared agreement between the plane integral and the arctan closed form.
pub const DEFAULT_INTEGRAL_TOL: f64 = 1e-8;

/// `k[i][j] = <Pi_i (x) Pi_j>` for `i, j` in `x, y, z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationTensor {
    pub k: [[f64; 3]; 3],
    /// Largest discarded imaginary part.
    pub imag_residual: f64,
}

impl CorrelationTensor {
    pub fn from_rows(k: [[f64; 3]; 3]) -> Self {
        Self {
            k,
            imag_residual: 0.0,
        }
    }

    pub fn diag(x: f64, y: f64, z: f64) -> Self {
        Self::from_rows([[x, 0.0, 0.0], [0.0, y, 0.0], [0.0, 0.0, z]])
    }

    pub fn get(&self, i: Component, j: Component) -> f64 {
        self.k[i as usize][j as usize]
    }

    pub fn as_matrix(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::from_fn(|i, j| self.k[i][j])
    }
}

/// Contracts both operator sets against the Schmidt form,
/// `sum_{k,l} lambda_k lambda_l <k|A|l> <k|B|l>`, visiting only the non-zero
/// pattern (diagonal and even/odd pairs).
pub fn correlation_tensor(
    state: &TmsvState,
    set1: &OperatorSet,
    set2: &OperatorSet,
) -> Result<CorrelationTensor> {
    let d = state.dim();
    for s in [set1, set2] {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
    }
    let lambda = state.lambda();
    let mut acc = [[Complex64::new(0.0, 0.0); 3]; 3];
    let mut visit = |k: usize, l: usize| {
        let w = lambda[k] * lambda[l];
        if w == 0.0 {
            return;
        }
        let a = Component::ALL.map(|c| set1.element(c, k, l));
        let b = Component::ALL.map(|c| set2.element(c, k, l));
        for i in 0..3 {
            if a[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..3 {
                acc[i][j] += a[i] * b[j] * w;
            }
        }
    };
    for k in 0..d {
        visit(k, k);
    }
    for n in 0..d / 2 {
        for m in 0..d / 2 {
            visit(2 * n, 2 * m + 1);
            visit(2 * m + 1, 2 * n);
        }
    }
    let mut k = [[0.0; 3]; 3];
    let mut imag_residual = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = acc[i][j].re;
            imag_residual = imag_residual.max(acc[i][j].im.abs());
        }
    }
    Ok(CorrelationTensor { k, imag_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Direct,
    Trace,
    Integral,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FResult {
    pub f: f64,
    /// `<Pi_+ (x) Pi_+>`
    pub plus_plus: Complex64,
    /// `<Pi_- (x) Pi_->`
    pub minus_minus: Complex64,
    pub condition15_ok: bool,
    pub route: Route,
}

impl FResult {
    fn new(plus_plus: Complex64, minus_minus: Complex64, route: Route) -> Self {
        Self {
            f: (plus_plus + minus_minus).re,
            plus_plus,
            minus_minus,
            condition15_ok: condition15(plus_plus, minus_minus, DEFAULT_CONDITION_TOL),
            route,
        }
    }

    /// Imaginary part dropped from `plus_plus + minus_minus`.
    pub fn imag_residual(&self) -> f64 {
        (self.plus_plus + self.minus_minus).im.abs()
    }
}

/// Both expectations equal, real and positive within `tol`.
pub fn condition15(plus_plus: Complex64, minus_minus: Complex64, tol: f64) -> bool {
    plus_plus.re > tol
        && plus_plus.im.abs() <= tol
        && minus_minus.im.abs() <= tol
        && (plus_plus - minus_minus).norm() <= tol
}

fn check_half_dim(expected: usize, cfgs: [&PseudospinConfig; 2]) -> Result<()> {
    for c in cfgs {
        if c.half_dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: c.half_dim(),
            });
        }
    }
    Ok(())
}

/// `<Pi_+ (x) Pi_+> = sum_{n,m} lambda_{2n} lambda_{2m+1} <2n|Pi_+^1|2m+1> <2n|Pi_+^2|2m+1>`
/// and its `Pi_-` counterpart, summed over the Schmidt coefficients.
pub fn f_direct(
    state: &TmsvState,
    cfg1: &PseudospinConfig,
    cfg2: &PseudospinConfig,
) -> Result<FResult> {
    let half = state.dim() / 2;
    check_half_dim(half, [cfg1, cfg2])?;
    let lambda = state.lambda();
    let (u1, u2) = (cfg1.u(), cfg2.u());
    let mut pp = Complex64::new(0.0, 0.0);
    let mut mm = Complex64::new(0.0, 0.0);
    for m in 0..half {
        let lo = lambda[2 * m + 1];
        for n in 0..half {
            let w = lambda[2 * n] * lo;
            let (a, b) = (u1[(n, m)], u2[(n, m)]);
            pp += a * b * w;
            mm += a.conj() * b.conj() * w;
        }
    }
    Ok(FResult::new(pp, mm, Route::Direct))
}

/// `F = (sinh 2 zeta / 2) [Tr(rho U1 rho U2) + Tr(rho U1^dagger rho U2^dagger)]`
/// with `U2[m][n] = <2n|Pi_+^2|2m+1>` (the transpose of `cfg2.u()`).
pub fn f_trace(
    rho: &ReducedDensity,
    cfg1: &PseudospinConfig,
    cfg2: &PseudospinConfig,
) -> Result<FResult> {
    let half = rho.half_dim();
    check_half_dim(half, [cfg1, cfg2])?;
    let r = DVector::from_iterator(half, rho.rho().iter().map(|&x| Complex64::new(x, 0.0)));
    let u1 = cfg1.u();
    let u2 = cfg2.u().transpose();
    let scale_rows = |m: &DMatrix<Complex64>| {
        let mut out = m.clone();
        for (i, mut row) in out.row_iter_mut().enumerate() {
            row *= r[i];
        }
        out
    };
    // Tr(A B) = sum_{n,m} A[n][m] B[m][n]
    let trace_of_product =
        |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| a.component_mul(&b.transpose()).sum();
    let t1 = trace_of_product(&scale_rows(u1), &scale_rows(&u2));
    let t2 = trace_of_product(&scale_rows(&u1.adjoint()), &scale_rows(&u2.adjoint()));
    let s = (2.0 * rho.zeta()).sinh() / 2.0;
    Ok(FResult::new(t1 * s, t2 * s, Route::Trace))
}

/// Settings for [`f_position_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneQuadrature {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Gaussian half-widths kept on each side of a peak.
    pub width_sigmas: f64,
    /// Panels across each inner window.
    pub inner_panels: usize,
    /// Declared agreement with the arctan closed form.
    pub tol: f64,
}

impl Default for PlaneQuadrature {
    fn default() -> Self {
        Self {
            order: 16,
            width_sigmas: 10.0,
            inner_panels: 4,
            tol: DEFAULT_INTEGRAL_TOL,
        }
    }
}

/// `F = 2 int_0^inf int_0^inf (g_+^2 - g_-^2) dq dq'` with
/// `g_pm = pi^{-1/2} exp(-[q^2 + q'^2 -/+ 2 q q' tanh 2zeta] cosh 2zeta / 2)`.
///
/// Tensor-product Gauss–Legendre: the inner `q'` window follows the ridge
/// centred at `+/- q tanh 2zeta` with half-width `1/sqrt(2 cosh 2zeta)`; the
/// outer `q` range covers the `exp(-q^2 / cosh 2zeta)` marginal.
pub fn f_position_integral(zeta: SqueezeParam, quad: &PlaneQuadrature) -> Result<f64> {
    let value = position_plane_integral(zeta.value(), quad);
    let closed = f_closed(zeta, ClosedForm::Position);
    let residual = (value - closed).abs();
    if !(residual <= quad.tol) {
        return Err(Error::QuadratureInsufficient {
            residual,
            tol: quad.tol,
        });
    }
    Ok(value)
}

/// The raw plane integral, without certification.
///
/// After completing the square, `pi g_pm^2 = exp(-q^2 / c) exp(-c (q' -/+ q tanh 2zeta)^2)`
/// with `c = cosh 2zeta`, which stays finite for every `q`.
pub fn position_plane_integral(zeta: f64, quad: &PlaneQuadrature) -> f64 {
    let c = (2.0 * zeta).cosh();
    let tanh = (2.0 * zeta).tanh();
    let (gx, gw) = gauss_legendre(quad.order);
    let sigma = (0.5 / c).sqrt();
    let outer_sigma = (0.5 * c).sqrt();
    let l = quad.width_sigmas;

    let panel_sum = |a: f64, b: f64, panels: usize, f: &dyn Fn(f64) -> f64| -> f64 {
        let h = (b - a) / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            let left = a + p as f64 * h;
            for (x, w) in gx.iter().zip(&gw) {
                sum += 0.5 * h * w * f(left + 0.5 * h * (x + 1.0));
            }
        }
        sum
    };

    // int_0^inf exp(-c (q' - mu)^2) dq' over the window mu +/- l sigma
    let ridge = |mu: f64| -> f64 {
        let a = (mu - l * sigma).max(0.0);
        let b = mu + l * sigma;
        if b <= a {
            return 0.0;
        }
        panel_sum(a, b, quad.inner_panels, &|qp| (-c * (qp - mu) * (qp - mu)).exp())
    };

    let outer_len = l * outer_sigma;
    let outer_panels = ((outer_len / (2.0 * sigma)).ceil() as usize).max(8);
    let total = panel_sum(0.0, outer_len, outer_panels, &|q| {
        let mu = tanh * q;
        (-q * q / c).exp() * (ridge(mu) - ridge(-mu))
    });
    2.0 * total / PI
}

/// Closed forms of `F` for the three named families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedForm {
    /// `(2/pi) arctan(sinh 2 zeta)`
    Position,
    /// `tanh 2 zeta`
    Number,
    /// `sinh 2 zeta (1 - tanh^2 zeta)^2 / (1 + tanh^4 zeta)`
    AltPhase,
}

impl FromStr for ClosedForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "position" => Ok(ClosedForm::Position),
            "number" => Ok(ClosedForm::Number),
            "alt-phase" => Ok(ClosedForm::AltPhase),
            other => Err(Error::UnknownTag(other.to_string())),
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClosedForm::Position => "position",
            ClosedForm::Number => "number",
            ClosedForm::AltPhase => "alt-phase",
        })
    }
}

pub fn f_closed(zeta: SqueezeParam, which: ClosedForm) -> f64 {
    let z = zeta.value();
    match which {
        ClosedForm::Position => 2.0 / PI * (2.0 * z).sinh().atan(),
        ClosedForm::Number => (2.0 * z).tanh(),
        ClosedForm::AltPhase => {
            let t2 = z.tanh().powi(2);
            (2.0 * z).sinh() * (1.0 - t2).powi(2) / (1.0 + t2 * t2)
        }
    }
}

/// Tag-based lookup, for callers holding a string.
pub fn f_closed_by_tag(zeta: SqueezeParam, which: &str) -> Result<f64> {
    Ok(f_closed(zeta, which.parse()?))
}

/// Orientationally optimized Bell value `2 sqrt(1 + F^2)`.
pub fn bell_from_f(f: f64) -> f64 {
    2.0 * (1.0 + f * f).sqrt()
}
