//! Orientational optimization of the CHSH combination
//! `B = n.K m + n'.K m + n.K m' - n'.K m'` over four unit vectors.

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::correlations::CorrelationTensor;
use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// Tsirelson's bound `2 sqrt 2`.
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellSetting {
    pub n: [f64; 3],
    pub n_prime: [f64; 3],
    pub m: [f64; 3],
    pub m_prime: [f64; 3],
}

impl BellSetting {
    pub fn new(n: [f64; 3], n_prime: [f64; 3], m: [f64; 3], m_prime: [f64; 3]) -> Result<Self> {
        for v in [n, n_prime, m, m_prime] {
            let norm = Vector3::from(v).norm();
            if !((norm - 1.0).abs() <= UNIT_TOL) {
                return Err(Error::InvalidArgument(format!(
                    "setting vector {v:?} has norm {norm}"
                )));
            }
        }
        Ok(Self {
            n,
            n_prime,
            m,
            m_prime,
        })
    }

    /// Vectors in the x–z plane at the given polar angles from the z axis.
    pub fn zero_azimuth(theta_n: f64, theta_n_prime: f64, theta_m: f64, theta_m_prime: f64) -> Self {
        let v = |t: f64| [t.sin(), 0.0, t.cos()];
        Self {
            n: v(theta_n),
            n_prime: v(theta_n_prime),
            m: v(theta_m),
            m_prime: v(theta_m_prime),
        }
    }

    fn from_vectors(v: [Vector3<f64>; 4]) -> Self {
        let a = |x: Vector3<f64>| [x[0], x[1], x[2]];
        Self {
            n: a(v[0]),
            n_prime: a(v[1]),
            m: a(v[2]),
            m_prime: a(v[3]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Horodecki,
    DirectSearch,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellOutcome {
    pub value: f64,
    pub setting: BellSetting,
    /// `K[x][x]` of the tensor the outcome was computed from.
    pub f_used: f64,
    pub method: Method,
}

impl BellOutcome {
    pub fn violates(&self) -> bool {
        self.value > 2.0
    }
}

pub fn bell_value(k: &CorrelationTensor, s: &BellSetting) -> f64 {
    let km = k.as_matrix();
    let form = |a: [f64; 3], b: [f64; 3]| Vector3::from(a).dot(&(km * Vector3::from(b)));
    form(s.n, s.m) + form(s.n_prime, s.m) + form(s.n, s.m_prime) - form(s.n_prime, s.m_prime)
}

/// `2 sqrt(s1 + s2)` from the two largest eigenvalues of `K^T K`, with an
/// explicit optimal setting: `m, m'` along the two dominant right singular
/// vectors and `n, n'` along `K(m + m')`, `K(m - m')`.
pub fn horodecki_max(k: &CorrelationTensor) -> BellOutcome {
    let km = k.as_matrix();
    let svd = km.svd(true, true);
    let (u, vt) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^T"));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let (i1, i2) = (order[0], order[1]);
    let (s1, s2) = (svd.singular_values[i1], svd.singular_values[i2]);

    let value = 2.0 * (s1 * s1 + s2 * s2).sqrt();
    let setting = if s1 == 0.0 {
        let z = Vector3::z();
        BellSetting::from_vectors([z, z, z, z])
    } else {
        let (a1, a2) = (u.column(i1).into_owned(), u.column(i2).into_owned());
        let (b1, b2) = (vt.row(i1).transpose(), vt.row(i2).transpose());
        let sum = a1 * s1 + a2 * s2;
        let diff = a1 * s1 - a2 * s2;
        BellSetting::from_vectors([sum.normalize(), diff.normalize(), b1, b2])
    };
    BellOutcome {
        value,
        setting,
        f_used: k.k[0][0],
        method: Method::Horodecki,
    }
}

/// Seeded multi-start ascent over four unrestricted unit vectors.
///
/// Each restart alternates exact block updates (`n, n'` given `m, m'` and vice
/// versa), then polishes with coordinate steps in polar/azimuthal angles,
/// halving the step until it drops below `1e-10`.
pub fn direct_search(k: &CorrelationTensor, restarts: usize, seed: u64) -> Result<BellOutcome> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let km = k.as_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, [Vector3<f64>; 4])> = None;
    for _ in 0..restarts {
        let start = [
            random_unit(&mut rng),
            random_unit(&mut rng),
            random_unit(&mut rng),
            random_unit(&mut rng),
        ];
        let ascended = alternate(&km, start);
        let (value, vecs) = polish(&km, ascended);
        if best.as_ref().map_or(true, |(b, _)| value > *b) {
            best = Some((value, vecs));
        }
    }
    let (value, vecs) = best.expect("restarts >= 1");
    Ok(BellOutcome {
        value,
        setting: BellSetting::from_vectors(vecs),
        f_used: k.k[0][0],
        method: Method::DirectSearch,
    })
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| StandardNormal.sample(rng));
        let norm: f64 = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

fn value_of(km: &Matrix3<f64>, v: &[Vector3<f64>; 4]) -> f64 {
    let [n, np, m, mp] = v;
    n.dot(&(km * (m + mp))) + np.dot(&(km * (m - mp)))
}

fn unit_or(v: Vector3<f64>, fallback: Vector3<f64>) -> Vector3<f64> {
    let norm = v.norm();
    if norm > 1e-300 {
        v / norm
    } else {
        fallback
    }
}

fn alternate(km: &Matrix3<f64>, mut v: [Vector3<f64>; 4]) -> [Vector3<f64>; 4] {
    let kt = km.transpose();
    let mut last = value_of(km, &v);
    for _ in 0..10_000 {
        let [n, np, m, mp] = v;
        let n = unit_or(km * (m + mp), n);
        let np = unit_or(km * (m - mp), np);
        let m = unit_or(kt * (n + np), m);
        let mp = unit_or(kt * (n - np), mp);
        v = [n, np, m, mp];
        let now = value_of(km, &v);
        if (now - last).abs() <= 1e-16 * now.abs().max(1.0) {
            break;
        }
        last = now;
    }
    v
}

fn to_angles(v: &Vector3<f64>) -> (f64, f64) {
    (v[2].clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

fn from_angles(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

fn polish(km: &Matrix3<f64>, v: [Vector3<f64>; 4]) -> (f64, [Vector3<f64>; 4]) {
    let mut angles = [0.0f64; 8];
    for (i, x) in v.iter().enumerate() {
        let (t, p) = to_angles(x);
        angles[2 * i] = t;
        angles[2 * i + 1] = p;
    }
    let build = |a: &[f64; 8]| -> [Vector3<f64>; 4] {
        [
            from_angles(a[0], a[1]),
            from_angles(a[2], a[3]),
            from_angles(a[4], a[5]),
            from_angles(a[6], a[7]),
        ]
    };
    let mut best = value_of(km, &build(&angles));
    let mut step = 1e-3;
    while step >= 1e-10 {
        let mut improved = false;
        for i in 0..8 {
            for dir in [1.0, -1.0] {
                let mut trial = angles;
                trial[i] += dir * step;
                let val = value_of(km, &build(&trial));
                if val > best {
                    best = val;
                    angles = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, build(&angles))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed(f: f64) -> f64 {
        2.0 * (1.0 + f * f).sqrt()
    }

    #[test]
    fn product_state_cannot_violate() {
        let k = CorrelationTensor::diag(0.0, 0.0, 1.0);
        let h = horodecki_max(&k);
        assert!((h.value - 2.0).abs() < 1e-15);
        assert!(!h.violates());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = BellSetting::from_vectors([
                random_unit(&mut rng),
                random_unit(&mut rng),
                random_unit(&mut rng),
                random_unit(&mut rng),
            ]);
            assert!(bell_value(&k, &s).abs() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn maximal_tensor_reaches_tsirelson() {
        let k = CorrelationTensor::diag(1.0, -1.0, 1.0);
        let h = horodecki_max(&k);
        assert!((h.value - TSIRELSON).abs() < 1e-14);
        assert!((bell_value(&k, &h.setting) - TSIRELSON).abs() < 1e-14);
    }

    #[test]
    fn zero_azimuth_setting_gives_closed_form() {
        let f = 1f64.tanh();
        let k = CorrelationTensor::diag(f, -f, 1.0);
        // m along z, m' along x; n, n' along (+-F, 0, 1)
        let a = f.atan();
        let s = BellSetting::zero_azimuth(a, -a, 0.0, std::f64::consts::FRAC_PI_2);
        assert!((bell_value(&k, &s) - closed(f)).abs() < 1e-14);
        let h = horodecki_max(&k);
        assert!((h.value - closed(f)).abs() < 1e-15);
        assert!((h.value - 2.513_981).abs() < 1e-6);
        assert!((bell_value(&k, &h.setting) - h.value).abs() < 1e-14);
    }

    #[test]
    fn direct_search_agrees_with_horodecki() {
        let f = 0.5511;
        let k = CorrelationTensor::diag(f, -f, 1.0);
        let h = horodecki_max(&k);
        for seed in [1, 7, 42] {
            let d = direct_search(&k, 8, seed).unwrap();
            assert!((d.value - h.value).abs() < 1e-8, "seed {seed}");
            assert!((d.value - 2.2836).abs() < 1e-4);
            assert!((bell_value(&k, &d.setting) - d.value).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_search_on_general_tensor() {
        let k = CorrelationTensor::from_rows([[0.3, -0.2, 0.1], [0.05, -0.6, 0.2], [0.0, 0.1, 0.9]]);
        let h = horodecki_max(&k);
        let d = direct_search(&k, 16, 5).unwrap();
        assert!((d.value - h.value).abs() < 1e-8);
        assert!((bell_value(&k, &h.setting) - h.value).abs() < 1e-12);
    }

    #[test]
    fn zero_tensor() {
        let k = CorrelationTensor::diag(0.0, 0.0, 0.0);
        assert_eq!(direct_search(&k, 2, 0).unwrap().value, 0.0);
        assert_eq!(horodecki_max(&k).value, 0.0);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let k = CorrelationTensor::diag(0.4, -0.4, 1.0);
        let a = direct_search(&k, 4, 11).unwrap();
        let b = direct_search(&k, 4, 11).unwrap();
        assert_eq!(a, b);
        assert!(direct_search(&k, 0, 11).is_err());
    }

    #[test]
    fn setting_validation() {
        assert!(BellSetting::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.8, 0.0]).is_ok());
        assert!(BellSetting::new([1.1, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.8, 0.0]).is_err());
    }
}
