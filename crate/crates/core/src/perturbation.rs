//! Second-order response of the pristine energy to a Kekulé perturbation,
//! and the two critical rigidities derived from it.
//!
//! For `k ∈ B6` write `m0, m1, m2` for `m` at `k`, `k + b1*`, `k + b2*` and
//! `φ_i = e^{iθ}` at the same momenta. With `w1 = φ0 φ̄2`, `w2 = φ2 φ̄1`,
//! `w3 = φ1 φ̄0`,
//!
//! ```text
//! c(k) = m2²|w1 − w2|²/(m0 + m1) + m1²|w2 − w3|²/(m0 + m2) + m0²|w3 − w1|²/(m1 + m2)
//! ```
//!
//! and `½ Tr|H(k) + ηS1| = ½ Tr|H(k)| + (η/3)(m0 + m1 + m2) + (c(k)/18) η² + o(η²)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{bloch_t, pristine_symbol, HoppingTriple};
use crate::energy::{elastic_energy, pristine_average, vtr_abs_t};
use crate::error::{Error, Result};
use crate::lattice::{basis, QuadratureGrid, Vec2, Zone};
use crate::linalg::jacobi_eigenvalues;

const DIRAC_TOL: f64 = 1e-12;

/// `θ(k)` with `e^{iθ} m(k) = 1 + e^{ik·a1} + e^{ik·a2}`.
pub fn phase_theta(k: &Vec2) -> Result<f64> {
    let z = pristine_symbol(k);
    if z.norm() < DIRAC_TOL {
        return Err(Error::DiracPoint(k.x, k.y));
    }
    Ok(z.arg())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationIntegrand {
    pub k: [f64; 2],
    pub m: [f64; 3],
    pub theta: [f64; 3],
    /// `Θ1, Θ2, Θ3`, each in `[0, 4]`.
    pub big_theta: [f64; 3],
    pub c_value: f64,
}

pub fn integrand(k: &Vec2) -> Result<PerturbationIntegrand> {
    let b = basis();
    let pts = [*k, k + b.b1s, k + b.b2s];
    let mut m = [0.0; 3];
    let mut ph = [Complex64::from(1.0); 3];
    for (i, p) in pts.iter().enumerate() {
        let z = pristine_symbol(p);
        m[i] = z.norm();
        if m[i] < DIRAC_TOL {
            return Err(Error::DiracPoint(k.x, k.y));
        }
        ph[i] = z / m[i];
    }
    let w1 = ph[0] * ph[2].conj();
    let w2 = ph[2] * ph[1].conj();
    let w3 = ph[1] * ph[0].conj();
    let big_theta = [(w1 - w2).norm_sqr(), (w2 - w3).norm_sqr(), (w3 - w1).norm_sqr()];
    let c_value = m[2] * m[2] * big_theta[0] / (m[0] + m[1])
        + m[1] * m[1] * big_theta[1] / (m[0] + m[2])
        + m[0] * m[0] * big_theta[2] / (m[1] + m[2]);
    Ok(PerturbationIntegrand {
        k: [k.x, k.y],
        m,
        theta: ph.map(|z| z.arg()),
        big_theta,
        c_value,
    })
}

pub fn c_of_k(k: &Vec2) -> Result<f64> {
    Ok(integrand(k)?.c_value)
}

/// `½ Tr|T(1 + η, 1, 1)(k)|` from a dense Jacobi eigensolve of the 6×6 matrix.
pub fn perturbed_half_trace(eta: f64, k: &Vec2) -> f64 {
    let t = bloch_t(&HoppingTriple::new(1.0 + eta, 1.0, 1.0), k).t;
    0.5 * jacobi_eigenvalues(&t).iter().map(|x| x.abs()).sum::<f64>()
}

/// `18 · [f(η) + f(−η) − 2f(0)] / (2η²)` with `f = perturbed_half_trace`.
pub fn c_finite_difference(k: &Vec2, eta: f64) -> f64 {
    let f0 = perturbed_half_trace(0.0, k);
    let (fp, fm) = (perturbed_half_trace(eta, k), perturbed_half_trace(-eta, k));
    9.0 * (fp + fm - 2.0 * f0) / (eta * eta)
}

/// `[f(η) − f(−η)] / (2η)`, which should equal `(m0 + m1 + m2)/3`.
pub fn first_order_finite_difference(k: &Vec2, eta: f64) -> f64 {
    (perturbed_half_trace(eta, k) - perturbed_half_trace(-eta, k)) / (2.0 * eta)
}

fn average_c(grid: &QuadratureGrid) -> Result<f64> {
    grid.require_zone(Zone::B6)?;
    let mut err = None;
    let v = grid.average(|k| c_of_k(k).unwrap_or(f64::NAN));
    if v.is_nan() {
        err = grid.points.iter().find(|k| c_of_k(k).is_err()).map(|k| Error::DiracPoint(k.x, k.y));
    }
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuCritical {
    pub value: f64,
    /// `|value(n) − value(n/2)|`
    pub error: f64,
    pub avg_c: f64,
    pub avg_m: f64,
    pub grid_n: usize,
}

fn mu_c_single(grid: &QuadratureGrid) -> Result<(f64, f64, f64)> {
    let avg_c = average_c(grid)?;
    let avg_m = pristine_average(grid, |m| m);
    Ok((avg_c / 9.0 - 2.0 * avg_m / 3.0, avg_c, avg_m))
}

/// `μ_c = (1/9)∮ c − (2/3)∮ m` on a B6 grid.
pub fn mu_c(grid: &QuadratureGrid) -> Result<MuCritical> {
    let (value, avg_c, avg_m) = mu_c_single(grid)?;
    let error = match grid.coarsened() {
        Some(g) => (value - mu_c_single(&g)?.0).abs(),
        None => f64::INFINITY,
    };
    Ok(MuCritical {
        value,
        error,
        avg_c,
        avg_m,
        grid_n: grid.n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuCriticalPrime {
    pub value: f64,
    pub error: f64,
    pub avg_m: f64,
    pub avg_inv_m: f64,
    pub grid_n: usize,
}

fn prime_single(grid: &QuadratureGrid) -> (f64, f64) {
    (pristine_average(grid, |m| m), pristine_average(grid, |m| 1.0 / m))
}

/// `∮_{B2} (3/m − m)`, an upper bound for the rigidity above which the pristine state wins.
pub fn mu_c_prime_bound(grid: &QuadratureGrid) -> Result<MuCriticalPrime> {
    grid.require_zone(Zone::B2)?;
    let (avg_m, avg_inv_m) = prime_single(grid);
    let value = 3.0 * avg_inv_m - avg_m;
    if !value.is_finite() {
        return Err(Error::InvalidArgument("grid samples a Dirac point".into()));
    }
    let error = match grid.coarsened() {
        Some(g) => {
            let (m, im) = prime_single(&g);
            (value - (3.0 * im - m)).abs()
        }
        None => f64::INFINITY,
    };
    Ok(MuCriticalPrime {
        value,
        error,
        avg_m,
        avg_inv_m,
        grid_n: grid.n,
    })
}

/// `(1/t)∮ c`: the curvature of `−∮ Tr|T|` (energy per 6-atom cell) along
/// `(t + 2h, t − h, t − h)` is `−(1/t)∮ c · h²`.
pub fn hessian_coefficient(t: f64, grid: &QuadratureGrid) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    Ok(average_c(grid)? / t)
}

/// Quantum energy per 6-atom cell, `−∮ Tr_{C6}|T| = −6 VTr|T|`.
pub fn quantum_energy_per_cell(cfg: &HoppingTriple, grid: &QuadratureGrid) -> Result<f64> {
    Ok(-6.0 * vtr_abs_t(cfg, grid)?)
}

/// `[ℰq(t+2h, t−h, t−h) + ℰq(t−2h, t+h, t+h) − 2ℰq(t, t, t)] / (2h²)` per 6-atom cell.
pub fn hessian_finite_difference(t: f64, h: f64, grid: &QuadratureGrid) -> Result<f64> {
    let e = |x: f64| quantum_energy_per_cell(&HoppingTriple::new(t + 2.0 * x, t - x, t - x), grid);
    Ok((e(h)? + e(-h)? - 2.0 * e(0.0)?) / (2.0 * h * h))
}

/// Lower bound for `ℰ(cfg)` from strict convexity around the pristine optimum:
/// `ℰ(t*) + (3δ²/(4t*))·[μ + ∮ m − 3∮ 1/m]` with `δ²` the mean square of `cfg − t*`.
///
/// `t*` and `ℰ(t*)` come from `grid_b6`, the two B2 averages from `grid_b2`.
pub fn convexity_lower_bound(
    cfg: &HoppingTriple,
    mu: f64,
    grid_b2: &QuadratureGrid,
    grid_b6: &QuadratureGrid,
) -> Result<f64> {
    grid_b2.require_zone(Zone::B2)?;
    grid_b6.require_zone(Zone::B6)?;
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
    }
    let vh = pristine_average(grid_b6, |m| m);
    let t_star = 1.0 + 2.0 * vh / (3.0 * mu);
    let pristine = HoppingTriple::pristine(t_star);
    let e_star = elastic_energy(&pristine, mu) - vtr_abs_t(&pristine, grid_b6)?;
    let delta2 = cfg.as_array().iter().map(|x| (x - t_star).powi(2)).sum::<f64>() / 3.0;
    let (avg_m, avg_inv_m) = prime_single(grid_b2);
    Ok(e_star + 3.0 * delta2 / (4.0 * t_star) * (mu + avg_m - 3.0 * avg_inv_m))
}
