//! The Kagome lattice as the line graph of the honeycomb: its adjacency
//! matrix in Bloch form, and on explicit periodic supercells.
//!
//! Bonds of an `L×L` honeycomb supercell are labelled `(R, b)` with `R` a cell
//! and `b ∈ {0, 1, 2}`: bond 0 joins `A(R)` to `B(R)`, bond 1 joins `A(R)` to
//! `B(R − a1)`, bond 2 joins `A(R)` to `B(R − a2)`. Two bonds are adjacent
//! when they share a carbon atom; for `L = 1` a pair may share two.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{basis, Vec2, Zone};
use crate::linalg::hermitian3_eigenvalues;

pub const MAX_SUPERCELL: usize = 8;

pub fn kagome_bloch(k: &Vec2) -> Matrix3<f64> {
    let b = basis();
    let c1 = 2.0 * (0.5 * b.a1.dot(k)).cos();
    let c2 = 2.0 * (0.5 * b.a2.dot(k)).cos();
    let c12 = 2.0 * (0.5 * (b.a1 - b.a2).dot(k)).cos();
    Matrix3::new(0.0, c1, c2, c1, 0.0, c12, c2, c12, 0.0)
}

/// `λ± = 1 ± √(3 + 2cos(a1·k) + 2cos(a2·k) + 2cos((a1 − a2)·k))`
pub fn kagome_dispersion(k: &Vec2) -> (f64, f64) {
    let b = basis();
    let r = 3.0 + 2.0 * b.a1.dot(k).cos() + 2.0 * b.a2.dot(k).cos() + 2.0 * (b.a1 - b.a2).dot(k).cos();
    let r = r.max(0.0).sqrt();
    (1.0 - r, 1.0 + r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KagomeBands {
    pub k: [f64; 2],
    pub flat: f64,
    pub lower: f64,
    pub upper: f64,
}

impl KagomeBands {
    pub fn values(&self) -> [f64; 3] {
        [self.flat, self.lower, self.upper]
    }
}

pub fn kagome_bands(k: &Vec2) -> KagomeBands {
    let m = kagome_bloch(k).map(Complex64::from);
    let [flat, lower, upper] = hermitian3_eigenvalues(&m);
    KagomeBands {
        k: [k.x, k.y],
        flat,
        lower,
        upper,
    }
}

fn check_supercell(l: usize) -> Result<()> {
    if (1..=MAX_SUPERCELL).contains(&l) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "supercell size must be in 1..={MAX_SUPERCELL}, got {l}"
        )))
    }
}

/// Index of bond `b` in cell `(i, j)` (coordinates along `a1`, `a2`, taken mod `L`).
pub fn bond_index(i: i64, j: i64, b: usize, l: usize) -> usize {
    let l = l as i64;
    let (i, j) = (i.rem_euclid(l) as usize, j.rem_euclid(l) as usize);
    (i * l as usize + j) * 3 + b
}

/// Line-graph adjacency of the periodic `L×L` honeycomb, `3L² × 3L²`.
pub fn kagome_adjacency(l: usize) -> Result<DMatrix<f64>> {
    check_supercell(l)?;
    let n = 3 * l * l;
    let mut adj = DMatrix::zeros(n, n);
    for i in 0..l as i64 {
        for j in 0..l as i64 {
            // The three bonds at A(i, j), and the three at B(i, j).
            let at_a = [bond_index(i, j, 0, l), bond_index(i, j, 1, l), bond_index(i, j, 2, l)];
            let at_b = [
                bond_index(i, j, 0, l),
                bond_index(i + 1, j, 1, l),
                bond_index(i, j + 1, 2, l),
            ];
            for star in [at_a, at_b] {
                for x in 0..3 {
                    for y in 0..3 {
                        if x != y {
                            adj[(star[x], star[y])] += 1.0;
                        }
                    }
                }
            }
        }
    }
    Ok(adj)
}

/// Sorted eigenvalues of the periodic adjacency.
pub fn adjacency_spectrum(l: usize) -> Result<Vec<f64>> {
    let adj = kagome_adjacency(l)?;
    let mut ev: Vec<f64> = SymmetricEigen::new(adj).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Sorted Bloch eigenvalues over the unshifted `L×L` grid of B2.
pub fn bloch_multiset(l: usize) -> Result<Vec<f64>> {
    check_supercell(l)?;
    let b = basis();
    let mut ev = Vec::with_capacity(3 * l * l);
    for i in 0..l {
        for j in 0..l {
            let k = b.from_reduced(Zone::B2, i as f64 / l as f64, j as f64 / l as f64);
            ev.extend(kagome_bands(&k).values());
        }
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `±1` alternating around one hexagon, zero elsewhere; an eigenvector for `−2`.
pub fn flat_mode(l: usize) -> Result<Vec<f64>> {
    check_supercell(l)?;
    let mut h = vec![0.0; 3 * l * l];
    let ring = [(0, 0, 0), (1, 0, 1), (1, 0, 2), (1, -1, 0), (1, -1, 1), (0, 0, 2)];
    for (n, &(i, j, b)) in ring.iter().enumerate() {
        h[bond_index(i, j, b, l)] += if n % 2 == 0 { 1.0 } else { -1.0 };
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborBoundCheck {
    /// `Σ_{adjacent pairs} h_i h_j = ½⟨h, A h⟩`
    pub lhs: f64,
    /// `−Σ h_i²`
    pub rhs: f64,
    pub pass: bool,
}

pub fn neighbor_quadratic_bound(h: &[f64], l: usize) -> Result<NeighborBoundCheck> {
    check_supercell(l)?;
    let n = 3 * l * l;
    if h.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: h.len(),
        });
    }
    let adj = kagome_adjacency(l)?;
    let v = nalgebra::DVector::from_column_slice(h);
    let lhs = 0.5 * v.dot(&(&adj * &v));
    let rhs = -v.norm_squared();
    Ok(NeighborBoundCheck {
        lhs,
        rhs,
        pass: lhs >= rhs - 1e-10 * (1.0 + rhs.abs()),
    })
}
