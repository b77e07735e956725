//! Honeycomb geometry: the 2-atom and 6-atom Bravais lattices, their
//! reciprocal bases, and shifted uniform Brillouin-zone grids.
//!
//! All k-vectors are stored in Cartesian coordinates. Reduced coordinates
//! `(x, y)` with `k = x g1 + y g2` are computed on demand against the
//! reciprocal basis `(g1, g2)` of the zone in question.

use std::f64::consts::PI;
use std::sync::LazyLock;

use nalgebra::Vector2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

/// Brillouin zone of the 2-atom cell (`B2`) or of the 6-atom Kekulé cell (`B6`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Zone {
    B2,
    B6,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis {
    pub a1: Vec2,
    pub a2: Vec2,
    pub b1: Vec2,
    pub b2: Vec2,
    /// Duals of `a1, a2`: `a_i · a_j* = 2π δ_ij`.
    pub a1s: Vec2,
    pub a2s: Vec2,
    /// Duals of `b1, b2`.
    pub b1s: Vec2,
    pub b2s: Vec2,
    pub cell_area2: f64,
    pub cell_area6: f64,
}

fn cross(u: &Vec2, v: &Vec2) -> f64 {
    u.x * v.y - u.y * v.x
}

fn duals(u1: &Vec2, u2: &Vec2) -> (Vec2, Vec2) {
    let det = cross(u1, u2);
    let s = 2.0 * PI / det;
    (Vec2::new(u2.y, -u2.x) * s, Vec2::new(-u1.y, u1.x) * s)
}

impl LatticeBasis {
    pub fn honeycomb() -> Self {
        let h = 3f64.sqrt() / 2.0;
        let a1 = Vec2::new(h, 0.5);
        let a2 = Vec2::new(h, -0.5);
        let b1 = 2.0 * a1 - a2;
        let b2 = 2.0 * a2 - a1;
        let (a1s, a2s) = duals(&a1, &a2);
        let (b1s, b2s) = duals(&b1, &b2);
        Self {
            a1,
            a2,
            b1,
            b2,
            a1s,
            a2s,
            b1s,
            b2s,
            cell_area2: cross(&a1, &a2).abs(),
            cell_area6: cross(&b1, &b2).abs(),
        }
    }

    pub fn reciprocal(&self, zone: Zone) -> (Vec2, Vec2) {
        match zone {
            Zone::B2 => (self.a1s, self.a2s),
            Zone::B6 => (self.b1s, self.b2s),
        }
    }

    pub fn zone_area(&self, zone: Zone) -> f64 {
        let (g1, g2) = self.reciprocal(zone);
        cross(&g1, &g2).abs()
    }

    pub fn to_reduced(&self, zone: Zone, k: &Vec2) -> (f64, f64) {
        // k · a_i = 2π x_i because a_i · a_j* = 2π δ_ij (same for b).
        let (r1, r2) = match zone {
            Zone::B2 => (self.a1, self.a2),
            Zone::B6 => (self.b1, self.b2),
        };
        (k.dot(&r1) / (2.0 * PI), k.dot(&r2) / (2.0 * PI))
    }

    pub fn from_reduced(&self, zone: Zone, x: f64, y: f64) -> Vec2 {
        let (g1, g2) = self.reciprocal(zone);
        x * g1 + y * g2
    }

    /// The two Dirac points `K = (1/3, 2/3)` and `K' = (2/3, 1/3)` of `B2`
    /// in reduced coordinates, returned in Cartesian form.
    pub fn dirac_points(&self) -> [Vec2; 2] {
        [
            self.from_reduced(Zone::B2, 1.0 / 3.0, 2.0 / 3.0),
            self.from_reduced(Zone::B2, 2.0 / 3.0, 1.0 / 3.0),
        ]
    }

    /// Distance from `k` to `target` on the torus of `zone`, in reduced units.
    pub fn reduced_distance(&self, zone: Zone, k: &Vec2, target: &Vec2) -> f64 {
        let (x, y) = self.to_reduced(zone, &(k - target));
        let wrap = |v: f64| v - v.round();
        wrap(x).hypot(wrap(y))
    }
}

static BASIS: LazyLock<LatticeBasis> = LazyLock::new(LatticeBasis::honeycomb);

/// Shared instance of the honeycomb basis.
pub fn basis() -> &'static LatticeBasis {
    &BASIS
}

pub fn build_basis() -> LatticeBasis {
    LatticeBasis::honeycomb()
}

pub const DEFAULT_SHIFT: (f64, f64) = (0.5, 0.5);

/// Shifted periodic trapezoid grid realizing the normalized average `(1/|B|) ∫_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub zone: Zone,
    pub n: usize,
    pub shift: (f64, f64),
    pub points: Vec<Vec2>,
    pub weight: f64,
}

impl QuadratureGrid {
    pub fn new(zone: Zone, n: usize, shift: (f64, f64)) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooSmall(n));
        }
        let in_unit = |s: f64| (0.0..1.0).contains(&s);
        if !in_unit(shift.0) || !in_unit(shift.1) {
            return Err(Error::InvalidArgument(format!(
                "grid shift must lie in [0, 1), got ({}, {})",
                shift.0, shift.1
            )));
        }
        let (g1, g2) = basis().reciprocal(zone);
        let nf = n as f64;
        let points = (0..n)
            .flat_map(|i| {
                (0..n).map(move |j| {
                    ((i as f64 + shift.0) / nf) * g1 + ((j as f64 + shift.1) / nf) * g2
                })
            })
            .collect();
        Ok(Self {
            zone,
            n,
            shift,
            points,
            weight: 1.0 / (nf * nf),
        })
    }

    pub fn centered(zone: Zone, n: usize) -> Result<Self> {
        Self::new(zone, n, DEFAULT_SHIFT)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn require_zone(&self, zone: Zone) -> Result<()> {
        if self.zone == zone {
            Ok(())
        } else {
            Err(Error::WrongZone {
                expected: zone,
                found: self.zone,
            })
        }
    }

    /// Grid average of `f`. Evaluation may run in parallel; the reduction is a
    /// fixed-order pairwise sum, so the result does not depend on the thread count.
    pub fn average<F>(&self, f: F) -> f64
    where
        F: Fn(&Vec2) -> f64 + Sync + Send,
    {
        let values: Vec<f64> = self.points.par_iter().map(f).collect();
        pairwise_sum(&values) * self.weight
    }

    /// Same grid with half as many points per axis (same zone and shift).
    pub fn coarsened(&self) -> Option<Self> {
        Self::new(self.zone, self.n / 2, self.shift).ok()
    }
}

pub fn make_grid(zone: Zone, n: usize, shift: (f64, f64)) -> Result<QuadratureGrid> {
    QuadratureGrid::new(zone, n, shift)
}

/// Recursive pairwise summation with a sequential base case.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let (lo, hi) = values.split_at(values.len() / 2);
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// A quadrature value with its refinement error `|value(n) − value(n/2)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Evaluate `f` on `grid` and on its coarsened counterpart.
///
/// When the grid cannot be halved (n < 4) the error is reported as infinite.
pub fn refine<F>(grid: &QuadratureGrid, f: F) -> Result<Estimate>
where
    F: Fn(&QuadratureGrid) -> Result<f64>,
{
    let value = f(grid)?;
    let error = match grid.coarsened() {
        Some(coarse) => (value - f(&coarse)?).abs(),
        None => f64::INFINITY,
    };
    Ok(Estimate { value, error })
}
