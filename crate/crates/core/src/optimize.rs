//! Configurational search over the half-space unitary `U`.
//!
//! For equal configurations in both channels the trace formula gives
//! `F = sinh 2zeta Re sum_{n,m} rho_n rho_m U_{nm}^2 <= sinh 2zeta Tr rho^2 = tanh 2zeta`,
//! so every search here is bounded by `tanh 2zeta` and the identity attains it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{bell_from_f, f_direct, f_trace};
use crate::error::{Error, Result};
use crate::fock::{tmsv_state, truncation_for, ReducedDensity, SqueezeParam, DEFAULT_TAIL_TOL};
use crate::pseudospin::{
    alt_phase, alt_phase_angles, number_config, phase_config, ConfigLabel, PseudospinConfig,
};

/// Slack allowed above `tanh 2zeta` before a search is flagged.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchFamily {
    DiagonalPhase,
    RandomUnitary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSearchResult {
    pub family: SearchFamily,
    pub zeta: f64,
    pub best_f: f64,
    #[serde(skip)]
    pub best_config: PseudospinConfig,
    /// Number of configurations evaluated.
    pub trials: usize,
    pub seed: Option<u64>,
    /// `tanh 2zeta`.
    pub bound: f64,
    pub within_bound: bool,
    /// Index of the winning random trial.
    pub best_trial: Option<usize>,
    /// Phases of the winning diagonal configuration.
    pub best_phases: Option<Vec<f64>>,
    /// Closed-form optimum of the family, when known.
    pub analytic_optimum: Option<f64>,
    /// `F` at the alternating-phase starting point of the phase search.
    pub reference_f: Option<f64>,
}

impl ConfigSearchResult {
    pub fn gap(&self) -> f64 {
        self.bound - self.best_f
    }
}

fn bound_for(rho: &ReducedDensity) -> f64 {
    (2.0 * rho.zeta()).tanh()
}

/// `F` for `U = diag(exp(i theta))` in both channels: the trace formula
/// restricted to diagonal `U`, `(sinh 2zeta / 2) sum_n rho_n^2 (e^{2i theta_n} + e^{-2i theta_n})`.
fn diagonal_f(rho: &ReducedDensity, phases: &[f64]) -> f64 {
    let s = (2.0 * rho.zeta()).sinh() / 2.0;
    let sum: Complex64 = rho
        .rho()
        .iter()
        .zip(phases)
        .map(|(&r, &t)| {
            let u = Complex64::from_polar(1.0, t);
            r * r * (u * u + (u * u).conj())
        })
        .sum();
    s * sum.re
}

/// Coordinate search over diagonal phases on the grid `2 pi k / grid`,
/// started from the alternating-phase point.
pub fn optimize_phases(rho: &ReducedDensity, grid: usize) -> Result<ConfigSearchResult> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("phase grid {grid} < 2")));
    }
    let h = rho.half_dim();
    let candidates: Vec<f64> = (0..grid)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / grid as f64)
        .collect();
    let mut phases = alt_phase_angles(h);
    let reference_f = diagonal_f(rho, &phases);
    let mut current = reference_f;
    let mut evaluations = 1;
    loop {
        let mut changed = false;
        for n in 0..h {
            for &c in &candidates {
                let old = phases[n];
                phases[n] = c;
                let v = diagonal_f(rho, &phases);
                evaluations += 1;
                if v > current {
                    current = v;
                    changed = true;
                } else {
                    phases[n] = old;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let best_config = phase_config(&phases);
    let best_f = f_trace(rho, &best_config, &best_config)?.f;
    let bound = bound_for(rho);
    let analytic = (2.0 * rho.zeta()).sinh() * rho.purity();
    Ok(ConfigSearchResult {
        family: SearchFamily::DiagonalPhase,
        zeta: rho.zeta(),
        best_f,
        best_config,
        trials: evaluations,
        seed: None,
        bound,
        within_bound: best_f <= bound + BOUND_SLACK,
        best_trial: None,
        best_phases: Some(phases),
        analytic_optimum: Some(analytic),
        reference_f: Some(reference_f),
    })
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `diag(R)` moved into `Q`.
pub fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Seeded random-unitary search; see [`RandomUnitarySearch`].
pub fn random_unitary_search(
    rho: &ReducedDensity,
    trials: usize,
    seed: u64,
) -> Result<ConfigSearchResult> {
    RandomUnitarySearch::new(trials, seed).run(rho)
}

/// Each trial draws from its own ChaCha stream `(seed, trial)`, so results do
/// not depend on thread scheduling. Ties go to the lowest trial index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomUnitarySearch {
    pub trials: usize,
    pub seed: u64,
    /// Evaluate `U = I` as trial 0.
    pub include_identity: bool,
}

impl RandomUnitarySearch {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            include_identity: false,
        }
    }

    pub fn include_identity(mut self, yes: bool) -> Self {
        self.include_identity = yes;
        self
    }

    fn trial_config(&self, h: usize, trial: usize) -> Result<PseudospinConfig> {
        if self.include_identity && trial == 0 {
            return Ok(number_config(h));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        PseudospinConfig::checked(ConfigLabel::Custom, haar_unitary(h, &mut rng), 1e-10)
    }

    pub fn run(&self, rho: &ReducedDensity) -> Result<ConfigSearchResult> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        let h = rho.half_dim();
        let values: Vec<f64> = (0..self.trials)
            .into_par_iter()
            .map(|t| {
                let cfg = self.trial_config(h, t)?;
                Ok(f_trace(rho, &cfg, &cfg)?.f)
            })
            .collect::<Result<_>>()?;
        let mut best_trial = 0;
        for (i, &v) in values.iter().enumerate() {
            if v > values[best_trial] {
                best_trial = i;
            }
        }
        let best_f = values[best_trial];
        let bound = bound_for(rho);
        Ok(ConfigSearchResult {
            family: SearchFamily::RandomUnitary,
            zeta: rho.zeta(),
            best_f,
            best_config: self.trial_config(h, best_trial)?,
            trials: self.trials,
            seed: Some(self.seed),
            bound,
            within_bound: best_f <= bound + BOUND_SLACK,
            best_trial: Some(best_trial),
            best_phases: None,
            analytic_optimum: Some((2.0 * rho.zeta()).sinh() * rho.purity()),
            reference_f: None,
        })
    }
}

/// Minimum number of grid points accepted by [`nonmonotonicity_certificate`].
pub const MIN_CERTIFICATE_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificatePoint {
    pub zeta: f64,
    pub f: f64,
    pub bell_value: f64,
    pub entropy: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonmonotonicityReport {
    pub points: Vec<CertificatePoint>,
    pub max_f: f64,
    pub argmax_zeta: f64,
    pub last_f: f64,
    pub all_positive: bool,
    pub interior_maximum: bool,
    /// `max_f / last_f > 10`.
    pub falls_by_decade: bool,
    pub violates_on_interior: bool,
    pub entropy_increasing: bool,
    pub certified: bool,
}

/// Alternating-phase `F(zeta)` by the matrix route over `zeta_grid`:
/// positive, peaked inside the grid, down by more than a decade at the right
/// edge, while the Schmidt entropy grows monotonically.
pub fn nonmonotonicity_certificate(zeta_grid: &[f64]) -> Result<NonmonotonicityReport> {
    if zeta_grid.len() < MIN_CERTIFICATE_POINTS {
        return Err(Error::GridTooCoarse {
            points: zeta_grid.len(),
            required: MIN_CERTIFICATE_POINTS,
        });
    }
    if zeta_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("zeta grid must be strictly increasing".into()));
    }
    let (lo, hi) = (zeta_grid[0], zeta_grid[zeta_grid.len() - 1]);
    if lo > 0.05 + 1e-12 || hi < 3.0 - 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "zeta grid [{lo}, {hi}] must span [0.05, 3.0]"
        )));
    }
    let points: Vec<CertificatePoint> = zeta_grid
        .par_iter()
        .map(|&z| {
            let zp = SqueezeParam::new(z)?;
            let state = tmsv_state(zp, &truncation_for(zp, DEFAULT_TAIL_TOL)?)?;
            let cfg = alt_phase(state.dim() / 2);
            let f = f_direct(&state, &cfg, &cfg)?.f;
            Ok(CertificatePoint {
                zeta: z,
                f,
                bell_value: bell_from_f(f),
                entropy: state.schmidt_entropy(),
                dim: state.dim(),
            })
        })
        .collect::<Result<_>>()?;

    let mut arg = 0;
    for (i, p) in points.iter().enumerate() {
        if p.f > points[arg].f {
            arg = i;
        }
    }
    let last = points.len() - 1;
    let max_f = points[arg].f;
    let last_f = points[last].f;
    let all_positive = points.iter().all(|p| p.f > 0.0);
    let interior_maximum = arg > 0 && arg < last;
    let falls_by_decade = last_f > 0.0 && max_f / last_f > 10.0;
    let violates_on_interior = points[1..last].iter().all(|p| p.bell_value > 2.0);
    let entropy_increasing = points.windows(2).all(|w| w[1].entropy > w[0].entropy);
    let certified =
        all_positive && interior_maximum && falls_by_decade && violates_on_interior && entropy_increasing;
    Ok(NonmonotonicityReport {
        max_f,
        argmax_zeta: points[arg].zeta,
        last_f,
        points,
        all_positive,
        interior_maximum,
        falls_by_decade,
        violates_on_interior,
        entropy_increasing,
        certified,
    })
}

/// `count` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}
