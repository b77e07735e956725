//! Symmetric-polynomial description of `σ(A*A)`.
//!
//! With `E`, `s`, `S`, `W` the symmetric statistics of `(t, u, v)` the
//! eigenvalues `x1, x2, x3` of `A*A(k)` are the roots of
//! `x³ − αx² + βx − γ` where
//!
//! ```text
//! α = 3S²
//! β = 3S⁴ − (3/4)(9E² − S²)² + 6WE·Re Z(k)
//! γ = |(27/2)Es² + W·Z(k)|²
//! Z(k) = 3 − e^{−ik·b1} − e^{−ik·b2} − e^{ik·(b1+b2)}
//! ```
//!
//! `g = √x1 + √x2 + √x3` then solves `¼(g² − α)² = β + 2√γ·g`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::HoppingTriple;
use crate::error::{Error, Result};
use crate::lattice::{basis, Vec2};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// `Z(k)` and `Z̃(k)`.
pub fn z_factor(k: &Vec2) -> (Complex64, Complex64) {
    (z_of_k(k), Complex64::from(3.0) - z_tilde_terms(k))
}

pub fn z_of_k(k: &Vec2) -> Complex64 {
    let b = basis();
    let (x1, x2) = (k.dot(&b.b1), k.dot(&b.b2));
    Complex64::from(3.0) - Complex64::cis(-x1) - Complex64::cis(-x2) - Complex64::cis(x1 + x2)
}

/// `e^{ik·(b1−b2)} + e^{−ik·(2b1+b2)} + e^{−ik·(b1+2b2)}`, so that `Z̃ = 3 − terms`.
pub fn z_tilde_terms(k: &Vec2) -> Complex64 {
    let b = basis();
    let (x1, x2) = (k.dot(&b.b1), k.dot(&b.b2));
    Complex64::cis(x1 - x2) + Complex64::cis(-(2.0 * x1 + x2)) + Complex64::cis(-(x1 + 2.0 * x2))
}

/// Coefficients of `χ(x) = x³ − αx² + βx − γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPolyCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub z_re: f64,
    pub z_abs2: f64,
    e: f64,
    s2: f64,
}

impl CharPolyCoeffs {
    pub fn from_symmetric(e: f64, s: f64, w: f64, k: &Vec2) -> Self {
        let z = z_of_k(k);
        let s2 = s * s;
        let big_s2 = 3.0 * (e * e + s2);
        let alpha = 3.0 * big_s2;
        let beta = 3.0 * big_s2 * big_s2 - 0.75 * (9.0 * e * e - big_s2).powi(2) + 6.0 * w * e * z.re;
        let c0 = 13.5 * e * s2;
        let gamma = (Complex64::from(c0) + z * w).norm_sqr();
        Self {
            alpha,
            beta,
            gamma,
            z_re: z.re,
            z_abs2: z.norm_sqr(),
            e,
            s2,
        }
    }

    /// Raw coefficients without the symmetric-statistics decomposition.
    pub fn from_raw(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            z_re: f64::NAN,
            z_abs2: f64::NAN,
            e: f64::NAN,
            s2: f64::NAN,
        }
    }

    /// β = β0 + β1·W
    pub fn beta0(&self) -> f64 {
        let big_s2 = 3.0 * (self.e * self.e + self.s2);
        3.0 * big_s2 * big_s2 - 0.75 * (9.0 * self.e * self.e - big_s2).powi(2)
    }

    pub fn beta1(&self) -> f64 {
        6.0 * self.e * self.z_re
    }

    /// γ = γ0 + γ1·W + γ2·W²
    pub fn gamma0(&self) -> f64 {
        (13.5 * self.e * self.s2).powi(2)
    }

    pub fn gamma1(&self) -> f64 {
        2.0 * 13.5 * self.e * self.s2 * self.z_re
    }

    pub fn gamma2(&self) -> f64 {
        self.z_abs2
    }

    /// χ(x)
    pub fn eval(&self, x: f64) -> f64 {
        ((x - self.alpha) * x + self.beta) * x - self.gamma
    }
}

pub fn charpoly_coeffs(cfg: &HoppingTriple, k: &Vec2) -> CharPolyCoeffs {
    CharPolyCoeffs::from_symmetric(cfg.mean(), cfg.std_dev(), cfg.product(), k)
}

/// Unique root `g ≥ √α` of `¼(g² − α)² = β + 2√γ·g`.
pub fn g_from_quartic(c: &CharPolyCoeffs) -> Result<f64> {
    let (alpha, beta, gamma) = (c.alpha, c.beta, c.gamma);
    if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
        return Err(Error::InconsistentCoefficients("non-finite input".into()));
    }
    if gamma < 0.0 {
        return Err(Error::InconsistentCoefficients(format!("gamma = {gamma} < 0")));
    }
    if alpha < 0.0 {
        return Err(Error::InconsistentCoefficients(format!("alpha = {alpha} < 0")));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let rg = gamma.sqrt();
    let phi = |g: f64| 0.25 * (g * g - alpha).powi(2) - beta - 2.0 * rg * g;
    let dphi = |g: f64| g * (g * g - alpha) - 2.0 * rg;

    let mut lo = alpha.sqrt();
    let mut hi = (3.0 * alpha).sqrt() * (1.0 + 1e-9);
    let f_lo = phi(lo);
    if f_lo >= 0.0 {
        return Ok(lo);
    }
    if phi(hi) < 0.0 {
        return Err(Error::InconsistentCoefficients(format!(
            "no root in [{lo}, {hi}] for alpha = {alpha}, beta = {beta}, gamma = {gamma}"
        )));
    }

    // Newton from the right end stays inside the bracket because φ is
    // convex and increasing there; bisection guards the degenerate cases.
    let mut g = hi;
    let tol = 1e-15 * hi;
    for _ in 0..200 {
        let f = phi(g);
        if f > 0.0 {
            hi = g;
        } else {
            lo = g;
        }
        let d = dphi(g);
        let mut next = if d > 0.0 { g - f / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - g).abs() <= tol || hi - lo <= tol {
            return Ok(next);
        }
        g = next;
    }
    Ok(0.5 * (lo + hi))
}

/// Which minimizer of the energy bound the projection lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectionCase {
    /// `(0, 0, S)`: two vanishing amplitudes on the sphere of radius `S`.
    SphereCase,
    /// `(E − s/√2, E − s/√2, E + s√2)` on the circle of fixed `E`, `s`.
    CircleCase,
}

/// Kekulé-symmetric representative `(t̃, t̃, ṽ)` of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KekuleProjection {
    pub t_tilde: f64,
    pub v_tilde: f64,
    pub case: ProjectionCase,
}

impl KekuleProjection {
    pub fn triple(&self) -> HoppingTriple {
        HoppingTriple::kekule(self.t_tilde, self.v_tilde)
    }
}

pub fn kekule_projection(cfg: &HoppingTriple) -> KekuleProjection {
    let (e, s2) = (cfg.mean(), cfg.variance());
    let s = s2.sqrt();
    // E ≤ s/√2, with the boundary assigned to the sphere case.
    if e <= 0.0 || 2.0 * e * e <= s2 * (1.0 + 1e-12) {
        KekuleProjection {
            t_tilde: 0.0,
            v_tilde: cfg.norm(),
            case: ProjectionCase::SphereCase,
        }
    } else {
        KekuleProjection {
            t_tilde: e - s / SQRT_2,
            v_tilde: e + s * SQRT_2,
            case: ProjectionCase::CircleCase,
        }
    }
}

/// Extremes of `W = tuv` over the circle of configurations with mean `E` and spread `s`.
pub fn w_extrema(e: f64, s: f64) -> (f64, f64) {
    let w_min = (e - s * SQRT_2) * (e + s / SQRT_2).powi(2);
    let w_max = (e + s * SQRT_2) * (e - s / SQRT_2).powi(2);
    (w_min, w_max)
}

/// `(9/4)Es²`, the lower bound for `−W` below which `W ↦ g` may decrease.
pub fn w_monotonicity_floor(e: f64, s: f64) -> Result<f64> {
    if e <= s / SQRT_2 {
        return Err(Error::InvalidArgument(format!(
            "monotonicity floor needs E > s/sqrt(2), got E = {e}, s = {s}"
        )));
    }
    Ok(2.25 * e * s * s)
}

/// `Re Z / |Z|²`; undefined (NaN) at `Z = 0`.
pub fn z_ratio(k: &Vec2) -> f64 {
    let z = z_of_k(k);
    z.re / z.norm_sqr()
}
