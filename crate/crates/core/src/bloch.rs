//! k-resolved tight-binding matrices on the 6-atom cell.
//!
//! With the six atoms labelled as in the Kekulé cell (1–3 on one sublattice,
//! 4–6 on the other) the Bloch operator is block off-diagonal,
//!
//! ```text
//!        ( 0    A(k) )          ( t              v e^{-ik·b1}        u            )
//! T(k) = ( A(k)* 0   ),  A(k) = ( u              t                   v e^{ik·(b1+b2)} )
//!                               ( v e^{-ik·b2}   u                   t            )
//! ```
//!
//! Column 1 of `A` is where site 4 hops: to site 1 with `t`, site 2 with `u`
//! and site 3 of the neighbouring cell along `b2` with `v`. The spectrum of
//! `T(k)` is `± σ(A(k))`, so everything downstream works with the singular
//! values of the 3×3 block.

use nalgebra::{Matrix3, Matrix6};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{basis, Vec2};
use crate::linalg::hermitian3_eigenvalues;

/// The three hopping amplitudes of a Kekulé-periodic configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoppingTriple {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

impl HoppingTriple {
    pub const fn new(t: f64, u: f64, v: f64) -> Self {
        Self { t, u, v }
    }

    pub const fn pristine(t: f64) -> Self {
        Self::new(t, t, t)
    }

    /// `(pair, pair, single)`: two equal amplitudes and a distinct third.
    pub const fn kekule(pair: f64, single: f64) -> Self {
        Self::new(pair, pair, single)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.t, self.u, self.v]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// E = (t + u + v) / 3
    pub fn mean(&self) -> f64 {
        (self.t + self.u + self.v) / 3.0
    }

    /// s² = ((t − E)² + (u − E)² + (v − E)²) / 3
    pub fn variance(&self) -> f64 {
        let e = self.mean();
        self.as_array().iter().map(|x| (x - e).powi(2)).sum::<f64>() / 3.0
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// S = √(t² + u² + v²)
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.t * self.t + self.u * self.u + self.v * self.v
    }

    /// W = tuv
    pub fn product(&self) -> f64 {
        self.t * self.u * self.v
    }

    /// Width of the band gap at the Fermi level, `2 · (3/√2) · s`.
    pub fn gap(&self) -> f64 {
        3.0 * std::f64::consts::SQRT_2 * self.std_dev()
    }

    pub fn sorted(&self) -> Self {
        let mut a = self.as_array();
        a.sort_by(f64::total_cmp);
        Self::from_array(a)
    }

    pub fn abs(&self) -> Self {
        Self::new(self.t.abs(), self.u.abs(), self.v.abs())
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self::new(lambda * self.t, lambda * self.u, lambda * self.v)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.t >= 0.0 && self.u >= 0.0 && self.v >= 0.0
    }
}

/// The k-dependent phases entering `A(k)`: `e^{-ik·b1}`, `e^{ik·(b1+b2)}`, `e^{-ik·b2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPhases {
    pub p1: Complex64,
    pub p12: Complex64,
    pub p2: Complex64,
}

impl BlochPhases {
    pub fn at(k: &Vec2) -> Self {
        let b = basis();
        let kb1 = k.dot(&b.b1);
        let kb2 = k.dot(&b.b2);
        Self {
            p1: Complex64::cis(-kb1),
            p12: Complex64::cis(kb1 + kb2),
            p2: Complex64::cis(-kb2),
        }
    }
}

pub fn bloch_a_with(cfg: &HoppingTriple, ph: &BlochPhases) -> Matrix3<Complex64> {
    let (t, u, v) = (
        Complex64::from(cfg.t),
        Complex64::from(cfg.u),
        Complex64::from(cfg.v),
    );
    Matrix3::new(
        t,
        v * ph.p1,
        u,
        u,
        t,
        v * ph.p12,
        v * ph.p2,
        u,
        t,
    )
}

pub fn bloch_a(cfg: &HoppingTriple, k: &Vec2) -> Matrix3<Complex64> {
    bloch_a_with(cfg, &BlochPhases::at(k))
}

/// `A(k)* A(k)`, written out entrywise. The diagonal is `S²` for every k.
pub fn gram_with(cfg: &HoppingTriple, ph: &BlochPhases) -> Matrix3<Complex64> {
    let (t, u, v) = (cfg.t, cfg.u, cfg.v);
    let s2 = Complex64::from(cfg.norm_sqr());
    let g01 = t * v * ph.p1 + Complex64::from(t * u) + u * v * ph.p2.conj();
    let g02 = Complex64::from(t * u) + u * v * ph.p12 + t * v * ph.p2.conj();
    let g12 = u * v * ph.p1.conj() + t * v * ph.p12 + Complex64::from(t * u);
    Matrix3::new(
        s2,
        g01,
        g02,
        g01.conj(),
        s2,
        g12,
        g02.conj(),
        g12.conj(),
        s2,
    )
}

/// Singular values of `A(k)` in ascending order.
pub fn singular_values_with(cfg: &HoppingTriple, ph: &BlochPhases) -> [f64; 3] {
    hermitian3_eigenvalues(&gram_with(cfg, ph)).map(|x| x.max(0.0).sqrt())
}

pub fn singular_values(cfg: &HoppingTriple, k: &Vec2) -> [f64; 3] {
    singular_values_with(cfg, &BlochPhases::at(k))
}

/// `Tr √(A*A)(k)`, i.e. half of `Tr |T(k)|`.
pub fn trace_abs_a(cfg: &HoppingTriple, ph: &BlochPhases) -> f64 {
    let [a, b, c] = singular_values_with(cfg, ph);
    a + b + c
}

/// The six eigenvalues of `T(k)` sorted ascending; they come in ± pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSet {
    pub k: [f64; 2],
    pub values: [f64; 6],
}

impl BandSet {
    pub fn from_singular_values(k: &Vec2, sv: [f64; 3]) -> Self {
        let mut values = [-sv[0], -sv[1], -sv[2], sv[0], sv[1], sv[2]];
        values.sort_by(f64::total_cmp);
        Self {
            k: [k.x, k.y],
            values,
        }
    }

    /// Smallest |eigenvalue|.
    pub fn min_abs(&self) -> f64 {
        self.values.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochMatrix {
    pub k: Vec2,
    pub a: Matrix3<Complex64>,
    pub t: Matrix6<Complex64>,
}

impl BlochMatrix {
    pub fn bands(&self) -> BandSet {
        let g = self.a.ad_mul(&self.a);
        let sv = hermitian3_eigenvalues(&g).map(|x| x.max(0.0).sqrt());
        BandSet::from_singular_values(&self.k, sv)
    }

    /// max |T − T*| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        (self.t - self.t.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn block_off_diagonal(a: &Matrix3<Complex64>) -> Matrix6<Complex64> {
    let mut t = Matrix6::zeros();
    t.fixed_view_mut::<3, 3>(0, 3).copy_from(a);
    t.fixed_view_mut::<3, 3>(3, 0).copy_from(&a.adjoint());
    t
}

pub fn bloch_t(cfg: &HoppingTriple, k: &Vec2) -> BlochMatrix {
    let a = bloch_a(cfg, k);
    BlochMatrix {
        k: *k,
        t: block_off_diagonal(&a),
        a,
    }
}

/// Single-bond hop operators `S1 = T(1,0,0)`, `S2 = T(0,1,0)`, `S3 = T(0,0,1)`.
pub fn hop_components(k: &Vec2) -> [Matrix6<Complex64>; 3] {
    [
        bloch_t(&HoppingTriple::new(1.0, 0.0, 0.0), k).t,
        bloch_t(&HoppingTriple::new(0.0, 1.0, 0.0), k).t,
        bloch_t(&HoppingTriple::new(0.0, 0.0, 1.0), k).t,
    ]
}

/// Pristine dispersion `m(k) = |1 + e^{ik·a1} + e^{ik·a2}|`.
pub fn dispersion_m(k: &Vec2) -> f64 {
    pristine_symbol(k).norm()
}

/// `1 + e^{ik·a1} + e^{ik·a2}`
pub fn pristine_symbol(k: &Vec2) -> Complex64 {
    let b = basis();
    Complex64::new(1.0, 0.0) + Complex64::cis(k.dot(&b.a1)) + Complex64::cis(k.dot(&b.a2))
}

/// `m` at the three B2 momenta that fold onto `k ∈ B6`: `k`, `k + b1*`, `k + b2*`.
pub fn folded_dispersion(k: &Vec2) -> [f64; 3] {
    let b = basis();
    [
        dispersion_m(k),
        dispersion_m(&(k + b.b1s)),
        dispersion_m(&(k + b.b2s)),
    ]
}

/// Band-folded pristine spectrum `{± t m(k), ± t m(k + b1*), ± t m(k + b2*)}`.
pub fn folded_bands(t: f64, k: &Vec2) -> BandSet {
    let mut sv = folded_dispersion(k).map(|m| (t * m).abs());
    sv.sort_by(f64::total_cmp);
    BandSet::from_singular_values(k, sv)
}

/// Gap edges `(a, b) = (3s/√2, 3E)`: the spectrum of `T` is `[−b, −a] ∪ [a, b]`.
pub fn spectral_bounds(cfg: &HoppingTriple) -> Result<(f64, f64)> {
    if !cfg.is_nonnegative() {
        return Err(Error::NegativeAmplitude(cfg.t, cfg.u, cfg.v));
    }
    Ok((
        3.0 * cfg.std_dev() / std::f64::consts::SQRT_2,
        3.0 * cfg.mean(),
    ))
}

/// Double-hop anticommutator `Ω_ij = S_i S_j + S_j S_i` (indices 0-based).
pub fn omega(i: usize, j: usize, k: &Vec2) -> Matrix6<Complex64> {
    let s = hop_components(k);
    s[i] * s[j] + s[j] * s[i]
}
