//! Configurational families of parity pseudospin operators.
//!
//! Every family shares the parity `Pi_z = I_E - I_O` and differs only in the
//! half-space unitary `U` with `U[n][m] = <2n|Pi_+|2m+1>`. From it,
//! `Pi_- = Pi_+^dagger`, `Pi_x = Pi_+ + Pi_-` and `Pi_y = -i (Pi_+ - Pi_-)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{hermite_psi_all, psi_at_origin, psi_derivative_at_origin};
use crate::quadrature::QuadratureSpec;

/// Default tolerance for the unitarity invariant of a configuration.
pub const DEFAULT_UNITARITY_TOL: f64 = 1e-10;
/// Default tolerance for quadrature-built matrix elements.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfigLabel {
    Number,
    Position,
    AltPhase,
    DiagonalPhase,
    Custom,
}

impl ConfigLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfigLabel::Number => "number",
            ConfigLabel::Position => "position",
            ConfigLabel::AltPhase => "alt-phase",
            ConfigLabel::DiagonalPhase => "diagonal-phase",
            ConfigLabel::Custom => "custom",
        }
    }
}

impl fmt::Display for ConfigLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConfigLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "number" => Ok(ConfigLabel::Number),
            "position" => Ok(ConfigLabel::Position),
            "alt-phase" => Ok(ConfigLabel::AltPhase),
            "diagonal-phase" => Ok(ConfigLabel::DiagonalPhase),
            "custom" => Ok(ConfigLabel::Custom),
            other => Err(Error::UnknownTag(other.to_string())),
        }
    }
}

/// A configurational unitary on the half-index space.
///
/// Position configurations are leading blocks of an infinite unitary; they are
/// contractions rather than unitaries, and `truncated_block` records that.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudospinConfig {
    label: ConfigLabel,
    u: DMatrix<Complex64>,
    truncated_block: bool,
}

impl PseudospinConfig {
    /// A finite unitary supplied by the caller, checked against `tol`.
    pub fn custom(u: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        Self::checked(ConfigLabel::Custom, u, tol)
    }

    pub(crate) fn checked(label: ConfigLabel, u: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::DimensionMismatch {
                expected: u.nrows(),
                found: u.ncols(),
            });
        }
        if u.nrows() == 0 {
            return Err(Error::InvalidArgument("empty configuration".into()));
        }
        let cfg = Self {
            label,
            u,
            truncated_block: false,
        };
        let residual = cfg.unitarity_residual();
        if !(residual < tol) {
            return Err(Error::NonUnitaryConfig { residual, tol });
        }
        Ok(cfg)
    }

    pub fn label(&self) -> ConfigLabel {
        self.label
    }

    pub fn u(&self) -> &DMatrix<Complex64> {
        &self.u
    }

    pub fn half_dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn is_truncated_block(&self) -> bool {
        self.truncated_block
    }

    /// `max(|U U^dagger - I|_max, |U^dagger U - I|_max)`.
    pub fn unitarity_residual(&self) -> f64 {
        let h = self.half_dim();
        let diagonal = (0..h).all(|j| (0..h).all(|i| i == j || self.u[(i, j)] == ZERO));
        if diagonal {
            return (0..h)
                .map(|i| (self.u[(i, i)].norm_sqr() - 1.0).abs())
                .fold(0.0, f64::max);
        }
        let id = DMatrix::<Complex64>::identity(self.half_dim(), self.half_dim());
        let uh = self.u.adjoint();
        let a = max_abs(&(&self.u * &uh - &id));
        let b = max_abs(&(&uh * &self.u - &id));
        a.max(b)
    }

    /// Same residual restricted to the first `interior` half-indices.
    pub fn interior_unitarity_residual(&self, interior: usize) -> f64 {
        let h = interior.min(self.half_dim());
        let uh = self.u.adjoint();
        let uu = &self.u * &uh;
        let hu = &uh * &self.u;
        let mut worst = 0.0f64;
        for i in 0..h {
            for j in 0..h {
                let d = if i == j { ONE } else { ZERO };
                worst = worst.max((uu[(i, j)] - d).norm()).max((hu[(i, j)] - d).norm());
            }
        }
        worst
    }

    /// Largest row or column 2-norm; at most one for any block of a unitary.
    pub fn max_line_norm(&self) -> f64 {
        let rows = self.u.row_iter().map(|r| r.norm());
        let cols = self.u.column_iter().map(|c| c.norm());
        rows.chain(cols).fold(0.0, f64::max)
    }

    /// The leading `half_dim x half_dim` block.
    ///
    /// Exact for diagonal and position families; any other family is
    /// re-checked for unitarity.
    pub fn leading_block(&self, half_dim: usize) -> Result<Self> {
        if half_dim == 0 || half_dim > self.half_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.half_dim(),
                found: half_dim,
            });
        }
        let u = self.u.view((0, 0), (half_dim, half_dim)).into_owned();
        if self.truncated_block {
            return Ok(Self {
                label: self.label,
                u,
                truncated_block: true,
            });
        }
        Self::checked(self.label, u, DEFAULT_UNITARITY_TOL)
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `U = I`: the number configuration `S_+ = sum_n |2n><2n+1|`.
pub fn number_config(half_dim: usize) -> PseudospinConfig {
    assert!(half_dim >= 1, "half_dim must be positive");
    PseudospinConfig {
        label: ConfigLabel::Number,
        u: DMatrix::identity(half_dim, half_dim),
        truncated_block: false,
    }
}

/// `U = diag(exp(i theta_n))`.
pub fn phase_config(phases: &[f64]) -> PseudospinConfig {
    assert!(!phases.is_empty(), "at least one phase required");
    let diag: Vec<Complex64> = phases.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    PseudospinConfig {
        label: ConfigLabel::DiagonalPhase,
        u: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
        truncated_block: false,
    }
}

/// Phases `theta_n = -n pi / 2` of the alternating-phase configuration.
pub fn alt_phase_angles(half_dim: usize) -> Vec<f64> {
    (0..half_dim)
        .map(|n| -(n as f64) * std::f64::consts::FRAC_PI_2)
        .collect()
}

/// `U[n][n] = (-i)^n`, with exact entries.
pub fn alt_phase(half_dim: usize) -> PseudospinConfig {
    assert!(half_dim >= 1, "half_dim must be positive");
    let diag: Vec<Complex64> = (0..half_dim)
        .map(|n| match n % 4 {
            0 => ONE,
            1 => -I,
            2 => -ONE,
            _ => I,
        })
        .collect();
    PseudospinConfig {
        label: ConfigLabel::AltPhase,
        u: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
        truncated_block: false,
    }
}

/// Position configuration from half-line overlaps,
/// `U[n][m] = 2 int_0^inf psi_{2n}(q) psi_{2m+1}(q) dq`, by quadrature.
pub fn position_config(half_dim: usize, quad: &QuadratureSpec) -> Result<PseudospinConfig> {
    position_config_with_tol(half_dim, quad, DEFAULT_QUADRATURE_TOL)
}

/// As [`position_config`], certifying sampled rows against a rule with twice
/// the panels; fails with `QuadratureInsufficient` above `tol`.
pub fn position_config_with_tol(
    half_dim: usize,
    quad: &QuadratureSpec,
    tol: f64,
) -> Result<PseudospinConfig> {
    if half_dim == 0 {
        return Err(Error::InvalidArgument("half_dim must be positive".into()));
    }
    let top_level = 2 * half_dim - 1;
    let turning = (2.0 * top_level as f64 + 1.0).sqrt();
    if quad.lower > 0.0 || quad.upper <= turning {
        return Err(Error::QuadratureInsufficient {
            residual: f64::INFINITY,
            tol,
        });
    }
    let u = half_line_overlaps(half_dim, quad, None);

    let mut probe: Vec<usize> = vec![0, half_dim / 2, half_dim - 1];
    probe.dedup();
    let refined = half_line_overlaps(half_dim, &quad.refined(), Some(&probe));
    let mut residual = 0.0f64;
    for (r, &row) in probe.iter().enumerate() {
        for m in 0..half_dim {
            residual = residual.max((u[(row, m)] - refined[(r, m)]).abs());
        }
    }
    if !(residual < tol) {
        return Err(Error::QuadratureInsufficient { residual, tol });
    }
    Ok(PseudospinConfig {
        label: ConfigLabel::Position,
        u: u.map(|x| Complex64::new(x, 0.0)),
        truncated_block: true,
    })
}

/// Rows `rows` (or all) of `2 int psi_{2n} psi_{2m+1}` over the rule.
fn half_line_overlaps(half_dim: usize, quad: &QuadratureSpec, rows: Option<&[usize]>) -> DMatrix<f64> {
    let (nodes, weights) = quad.nodes_weights();
    let top_level = 2 * half_dim - 1;
    let row_list: Vec<usize> = rows.map_or_else(|| (0..half_dim).collect(), |r| r.to_vec());
    let nrows = row_list.len();

    const CHUNK: usize = 1024;
    let partials: Vec<DMatrix<f64>> = nodes
        .par_chunks(CHUNK)
        .zip(weights.par_chunks(CHUNK))
        .map(|(xs, ws)| {
            let k = xs.len();
            let mut even = DMatrix::<f64>::zeros(nrows, k);
            let mut odd = DMatrix::<f64>::zeros(half_dim, k);
            for (j, (&q, &w)) in xs.iter().zip(ws).enumerate() {
                let psi = hermite_psi_all(top_level, q);
                for (r, &n) in row_list.iter().enumerate() {
                    even[(r, j)] = 2.0 * w * psi[2 * n];
                }
                for m in 0..half_dim {
                    odd[(m, j)] = psi[2 * m + 1];
                }
            }
            even * odd.transpose()
        })
        .collect();
    // fixed-order reduction keeps the result independent of scheduling
    let mut acc = DMatrix::<f64>::zeros(nrows, half_dim);
    for p in partials {
        acc += p;
    }
    acc
}

/// Position configuration from the closed-form half-line overlap
/// `2 int_0^inf psi_{2n} psi_{2m+1} = psi_{2n}(0) psi'_{2m+1}(0) / (2m + 1 - 2n)`,
/// which follows from the Wronskian of two oscillator eigenfunctions.
pub fn position_config_exact(half_dim: usize) -> PseudospinConfig {
    assert!(half_dim >= 1, "half_dim must be positive");
    let even: Vec<f64> = (0..half_dim).map(|n| psi_at_origin(2 * n)).collect();
    let odd: Vec<f64> = (0..half_dim).map(|m| psi_derivative_at_origin(2 * m + 1)).collect();
    let u = DMatrix::from_fn(half_dim, half_dim, |n, m| {
        let gap = (2 * m + 1) as f64 - (2 * n) as f64;
        Complex64::new(even[n] * odd[m] / gap, 0.0)
    });
    PseudospinConfig {
        label: ConfigLabel::Position,
        u,
        truncated_block: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    X,
    Y,
    Z,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::X, Component::Y, Component::Z];
}

/// The pseudospin triple of one channel on `N = 2 * half_dim` levels.
///
/// Dense matrices are built on demand; contractions use [`OperatorSet::element`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSet {
    config: PseudospinConfig,
}

impl OperatorSet {
    pub fn config(&self) -> &PseudospinConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        2 * self.config.half_dim()
    }

    /// `<k|Pi_c|l>` without forming the matrix.
    pub fn element(&self, c: Component, k: usize, l: usize) -> Complex64 {
        match c {
            Component::Z => {
                if k != l {
                    ZERO
                } else if k % 2 == 0 {
                    ONE
                } else {
                    -ONE
                }
            }
            Component::X => self.plus(k, l) + self.minus(k, l),
            Component::Y => -I * (self.plus(k, l) - self.minus(k, l)),
        }
    }

    fn plus(&self, k: usize, l: usize) -> Complex64 {
        if k % 2 == 0 && l % 2 == 1 {
            self.config.u[(k / 2, l / 2)]
        } else {
            ZERO
        }
    }

    fn minus(&self, k: usize, l: usize) -> Complex64 {
        self.plus(l, k).conj()
    }

    pub fn pi_plus(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |k, l| self.plus(k, l))
    }

    pub fn pi_minus(&self) -> DMatrix<Complex64> {
        self.pi_plus().adjoint()
    }

    pub fn matrix(&self, c: Component) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |k, l| self.element(c, k, l))
    }

    pub fn pi_x(&self) -> DMatrix<Complex64> {
        self.matrix(Component::X)
    }

    pub fn pi_y(&self) -> DMatrix<Complex64> {
        self.matrix(Component::Y)
    }

    pub fn pi_z(&self) -> DMatrix<Complex64> {
        self.matrix(Component::Z)
    }
}

pub fn operator_set(config: &PseudospinConfig) -> Result<OperatorSet> {
    operator_set_with_tol(config, DEFAULT_UNITARITY_TOL)
}

/// Finite unitaries must satisfy `|UU^dagger - I| < tol`; truncated blocks
/// must be contractions line by line (`norm <= 1 + tol`).
pub fn operator_set_with_tol(config: &PseudospinConfig, tol: f64) -> Result<OperatorSet> {
    let residual = if config.is_truncated_block() {
        (config.max_line_norm() - 1.0).max(0.0)
    } else {
        config.unitarity_residual()
    };
    if !(residual < tol) {
        return Err(Error::NonUnitaryConfig { residual, tol });
    }
    Ok(OperatorSet {
        config: config.clone(),
    })
}

/// Residuals of the pseudospin algebra on the interior block (all levels but
/// the top even/odd pair) plus the full-matrix value for the edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub label: ConfigLabel,
    pub dim: usize,
    pub tol: f64,
    /// `max_i |Pi_i^2 - I|` on the interior.
    pub max_square_residual: f64,
    /// `|[Pi_x, Pi_y] - 2i Pi_z|` and cyclic, on the interior.
    pub max_commutator_residual: f64,
    /// `|Pi_+ Pi_- - I_E|`, `|Pi_- Pi_+ - I_O|` on the interior.
    pub unitarity_residual: f64,
    /// Worst of the three over the full truncated space.
    pub edge_residual: f64,
    pub truncated_block: bool,
    pub passed: bool,
}

pub fn verify_su2(opset: &OperatorSet, tol: f64) -> AlgebraReport {
    let d = opset.dim();
    let interior = d.saturating_sub(2);
    let id = DMatrix::<Complex64>::identity(d, d);
    let (x, y, z) = (opset.pi_x(), opset.pi_y(), opset.pi_z());
    let (p, m) = (opset.pi_plus(), opset.pi_minus());

    let block = |a: &DMatrix<Complex64>, n: usize| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(a[(i, j)].norm());
            }
        }
        worst
    };
    let squares = [&x * &x - &id, &y * &y - &id, &z * &z - &id];
    let two_i = Complex64::new(0.0, 2.0);
    let commutators = [
        &x * &y - &y * &x - &z * two_i,
        &y * &z - &z * &y - &x * two_i,
        &z * &x - &x * &z - &y * two_i,
    ];
    let even = DMatrix::from_fn(d, d, |i, j| if i == j && i % 2 == 0 { ONE } else { ZERO });
    let odd = &id - &even;
    let projectors = [&p * &m - &even, &m * &p - &odd];

    let worst_of = |ms: &[DMatrix<Complex64>], n: usize| ms.iter().map(|a| block(a, n)).fold(0.0, f64::max);
    let max_square_residual = worst_of(&squares, interior);
    let max_commutator_residual = worst_of(&commutators, interior);
    let unitarity_residual = worst_of(&projectors, interior);
    let edge_residual = worst_of(&squares, d)
        .max(worst_of(&commutators, d))
        .max(worst_of(&projectors, d));

    let passed = max_square_residual < tol && max_commutator_residual < tol && unitarity_residual < tol;
    AlgebraReport {
        label: opset.config().label(),
        dim: d,
        tol,
        max_square_residual,
        max_commutator_residual,
        unitarity_residual,
        edge_residual,
        truncated_block: opset.config().is_truncated_block(),
        passed,
    }
}
