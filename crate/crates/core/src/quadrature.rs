//! Composite Gauss–Legendre rules on finite intervals.

use serde::Serialize;

use crate::error::{Error, Result};

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `order` nodes on `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub lower: f64,
    pub upper: f64,
    pub panels: usize,
    pub order: usize,
}

impl QuadratureSpec {
    pub fn new(lower: f64, upper: f64, panels: usize, order: usize) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && upper > lower) {
            return Err(Error::InvalidArgument(format!(
                "quadrature interval [{lower}, {upper}] is empty"
            )));
        }
        if panels == 0 || order == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least one panel and one node".into(),
            ));
        }
        Ok(Self {
            lower,
            upper,
            panels,
            order,
        })
    }

    /// Rule on `[0, Q]` for products of oscillator functions up to Fock level
    /// `max_level`: `Q = sqrt(2(2 max_level + 1)) + 6`, panels sized to the
    /// shortest local wavelength.
    pub fn for_levels(max_level: usize) -> Self {
        let nf = max_level as f64;
        let upper = (2.0 * (2.0 * nf + 1.0)).sqrt() + 6.0;
        // product of two level-N functions oscillates with wavenumber <= 2 sqrt(2N + 1)
        let k_max = 2.0 * (2.0 * nf + 1.0).sqrt();
        let order = 24;
        let panels = ((upper * k_max / 12.0).ceil() as usize).max(4);
        Self {
            lower: 0.0,
            upper,
            panels,
            order,
        }
    }

    /// The same interval with twice as many panels.
    pub fn refined(&self) -> Self {
        Self {
            panels: self.panels * 2,
            ..*self
        }
    }

    pub fn len(&self) -> usize {
        self.panels * self.order
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nodes_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let (x, w) = gauss_legendre(self.order);
        let h = (self.upper - self.lower) / self.panels as f64;
        let mut nodes = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        for p in 0..self.panels {
            let a = self.lower + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        (nodes, weights)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let (nodes, weights) = self.nodes_weights();
        nodes.iter().zip(&weights).map(|(&x, &w)| w * f(x)).sum()
    }
}
