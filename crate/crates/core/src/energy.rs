//! Trace per atom of `|T|`, the elastic penalty and the total energy
//!
//! ```text
//! ℰ(t, u, v; μ) = −VTr|T(t, u, v)| + (μ/4)((t − 1)² + (u − 1)² + (v − 1)²)
//! ```
//!
//! together with the pristine optimum and its variant for a general strongly
//! convex elastic potential.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{dispersion_m, trace_abs_a, BlochPhases, HoppingTriple};
use crate::error::{Error, Result};
use crate::lattice::{basis, pairwise_sum, Estimate, QuadratureGrid, Vec2, Zone};

/// Bloch phases of a B6 grid, computed once and reused across configurations.
///
/// `A(−k)` is the complex conjugate of `A(k)`, so both share their singular
/// values. When the grid is closed under `k → −k` (shift components 0 or 1/2)
/// only one point of each pair is stored, with multiplicity 2.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    pub n: usize,
    pub weight: f64,
    phases: Vec<BlochPhases>,
    multiplicity: Vec<f64>,
}

impl PhaseTable {
    pub fn new(grid: &QuadratureGrid) -> Result<Self> {
        grid.require_zone(Zone::B6)?;
        let n = grid.n;
        let twice = |s: f64| {
            let d = 2.0 * s;
            (d.fract() == 0.0).then_some(d as usize)
        };
        let (mut phases, mut multiplicity) = (Vec::new(), Vec::new());
        match (twice(grid.shift.0), twice(grid.shift.1)) {
            (Some(d1), Some(d2)) => {
                for i in 0..n {
                    for j in 0..n {
                        let ip = (2 * n - i - d1) % n;
                        let jp = (2 * n - j - d2) % n;
                        let (idx, partner) = (i * n + j, ip * n + jp);
                        if idx < partner {
                            phases.push(BlochPhases::at(&grid.points[idx]));
                            multiplicity.push(2.0);
                        } else if idx == partner {
                            phases.push(BlochPhases::at(&grid.points[idx]));
                            multiplicity.push(1.0);
                        }
                    }
                }
            }
            _ => {
                phases = grid.points.iter().map(BlochPhases::at).collect();
                multiplicity = vec![1.0; phases.len()];
            }
        }
        Ok(Self {
            n,
            weight: grid.weight,
            phases,
            multiplicity,
        })
    }

    /// Number of stored k-points.
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// `VTr|T| = (1/3) ∮_{B6} Tr √(A*A)`
    pub fn vtr_abs_t(&self, cfg: &HoppingTriple) -> f64 {
        let values: Vec<f64> = self
            .phases
            .par_iter()
            .zip(self.multiplicity.par_iter())
            .map(|(ph, w)| w * trace_abs_a(cfg, ph))
            .collect();
        pairwise_sum(&values) * self.weight / 3.0
    }
}

/// `VTr|T|` of a configuration on a B6 grid.
pub fn vtr_abs_t(cfg: &HoppingTriple, grid: &QuadratureGrid) -> Result<f64> {
    grid.require_zone(Zone::B6)?;
    Ok(grid.average(|k| trace_abs_a(cfg, &BlochPhases::at(k))) / 3.0)
}

pub fn vtr_abs_t_estimate(cfg: &HoppingTriple, grid: &QuadratureGrid) -> Result<Estimate> {
    crate::lattice::refine(grid, |g| vtr_abs_t(cfg, g))
}

/// B2 average of `f(m(k))`. On a B6 grid the three folded momenta are averaged instead.
pub fn pristine_average<F>(grid: &QuadratureGrid, f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    match grid.zone {
        Zone::B2 => grid.average(|k| f(dispersion_m(k))),
        Zone::B6 => {
            let b = basis();
            grid.average(|k: &Vec2| {
                (f(dispersion_m(k)) + f(dispersion_m(&(k + b.b1s))) + f(dispersion_m(&(k + b.b2s))))
                    / 3.0
            })
        }
    }
}

/// `VTr|H|` of the unit pristine configuration, i.e. `∮_{B2} m`.
pub fn pristine_vtr(grid: &QuadratureGrid) -> f64 {
    pristine_average(grid, |m| m)
}

pub fn pristine_vtr_estimate(grid: &QuadratureGrid) -> Result<Estimate> {
    crate::lattice::refine(grid, |g| Ok(pristine_vtr(g)))
}

/// `(μ/4) Σ (x − 1)²`
pub fn elastic_energy(cfg: &HoppingTriple, mu: f64) -> f64 {
    0.25 * mu * cfg.as_array().iter().map(|x| (x - 1.0).powi(2)).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub quantum: f64,
    pub elastic: f64,
    pub total: f64,
    pub grid_n: usize,
    pub quad_error: f64,
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")))
    }
}

pub fn total_energy(cfg: &HoppingTriple, mu: f64, grid: &QuadratureGrid) -> Result<EnergyBreakdown> {
    check_mu(mu)?;
    let q = vtr_abs_t_estimate(cfg, grid)?;
    let quantum = -q.value;
    let elastic = elastic_energy(cfg, mu);
    Ok(EnergyBreakdown {
        quantum,
        elastic,
        total: quantum + elastic,
        grid_n: grid.n,
        quad_error: q.error,
    })
}

/// Total energy from a precomputed phase table, without the error estimate.
pub fn energy_with_table(cfg: &HoppingTriple, mu: f64, table: &PhaseTable) -> f64 {
    elastic_energy(cfg, mu) - table.vtr_abs_t(cfg)
}

/// `t* = 1 + (2/(3μ)) VTr|H|`
pub fn pristine_optimum_from_vtr(mu: f64, vtr_h: f64) -> f64 {
    1.0 + 2.0 * vtr_h / (3.0 * mu)
}

pub fn pristine_optimum(mu: f64, grid: &QuadratureGrid) -> Result<f64> {
    check_mu(mu)?;
    Ok(pristine_optimum_from_vtr(mu, pristine_vtr(grid)))
}

/// `VTr M = (3/2)∮ 1/m − (1/6)∮ m`
pub fn vtr_m(grid: &QuadratureGrid) -> f64 {
    1.5 * pristine_average(grid, |m| 1.0 / m) - pristine_vtr(grid) / 6.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElasticKind {
    Quadratic,
    Custom,
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A strongly convex elastic potential `F` with minimum at `C`.
///
/// The per-bond elastic energy is `(μ/2)·(1/2)·F`, so the quadratic model
/// `F(x) = (x − 1)²` reproduces the default energy.
#[derive(Clone)]
pub struct ElasticModel {
    pub kind: ElasticKind,
    f: ScalarFn,
    f_prime: ScalarFn,
    /// Half the lower bound on `F''`.
    pub strong_convexity_alpha: f64,
    pub minimum_at: f64,
}

impl fmt::Debug for ElasticModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ElasticModel")
            .field("kind", &self.kind)
            .field("strong_convexity_alpha", &self.strong_convexity_alpha)
            .field("minimum_at", &self.minimum_at)
            .finish_non_exhaustive()
    }
}

impl ElasticModel {
    pub fn quadratic() -> Self {
        Self {
            kind: ElasticKind::Quadratic,
            f: Arc::new(|x| (x - 1.0).powi(2)),
            f_prime: Arc::new(|x| 2.0 * (x - 1.0)),
            strong_convexity_alpha: 1.0,
            minimum_at: 1.0,
        }
    }

    pub fn custom<F, G>(f: F, f_prime: G, strong_convexity_alpha: f64, minimum_at: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(strong_convexity_alpha > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "strong convexity constant must be positive, got {strong_convexity_alpha}"
            )));
        }
        if !(minimum_at > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "minimum must be at a positive amplitude, got {minimum_at}"
            )));
        }
        for i in 1..=200 {
            let t = -(i as f64) * 0.05;
            let (neg, pos) = (f(t), f(-t));
            if neg < pos - 1e-12 * (1.0 + pos.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "F({t}) = {neg} is below F({}) = {pos}",
                    -t
                )));
            }
        }
        Ok(Self {
            kind: ElasticKind::Custom,
            f: Arc::new(f),
            f_prime: Arc::new(f_prime),
            strong_convexity_alpha,
            minimum_at,
        })
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn f_prime(&self, x: f64) -> f64 {
        (self.f_prime)(x)
    }

    /// `λF`
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let (f, fp) = (self.f.clone(), self.f_prime.clone());
        Self::custom(
            move |x| lambda * f(x),
            move |x| lambda * fp(x),
            lambda * self.strong_convexity_alpha,
            self.minimum_at,
        )
    }

    /// Elastic energy `(μ/4) Σ F(x)`.
    pub fn energy(&self, cfg: &HoppingTriple, mu: f64) -> f64 {
        0.25 * mu * cfg.as_array().iter().map(|&x| self.f(x)).sum::<f64>()
    }

    /// Solve `F'(t) = target` on `[C, C + 10⁶]` by bisection.
    fn solve_derivative(&self, target: f64) -> Result<f64> {
        let c = self.minimum_at;
        let (mut lo, mut hi) = (c, c + 1e6);
        if self.f_prime(hi) < target {
            return Err(Error::NotCoercive { target, lo, hi });
        }
        while hi - lo > 1e-10 * (1.0 + lo.abs()) {
            let mid = 0.5 * (lo + hi);
            if self.f_prime(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Pristine optimum for a general elastic model: `F'(t*) = (4/(3μ)) VTr|H|`.
pub fn generalized_pristine_optimum(model: &ElasticModel, mu: f64, grid: &QuadratureGrid) -> Result<f64> {
    check_mu(mu)?;
    generalized_optimum_from_vtr(model, mu, pristine_vtr(grid))
}

pub fn generalized_optimum_from_vtr(model: &ElasticModel, mu: f64, vtr_h: f64) -> Result<f64> {
    model.solve_derivative(4.0 * vtr_h / (3.0 * mu))
}

/// Smallest `μ` with `(μ/2)·α ≥ VTr M / t*(μ)`.
pub fn generalized_critical_mu_bound(model: &ElasticModel, grid: &QuadratureGrid) -> Result<f64> {
    let vh = pristine_vtr(grid);
    let vm = vtr_m(grid);
    let alpha = model.strong_convexity_alpha;
    let excess = |mu: f64| -> Result<f64> {
        let t = generalized_optimum_from_vtr(model, mu, vh)?;
        Ok(0.5 * mu * alpha - vm / t)
    };

    let mut lo = 1e-3;
    if excess(lo)? >= 0.0 {
        return Ok(lo);
    }
    let mut hi = lo;
    loop {
        hi *= 1.25;
        if hi > 1e6 {
            return Err(Error::NotMonotone { lo, hi });
        }
        if excess(hi)? >= 0.0 {
            break;
        }
        lo = hi;
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
