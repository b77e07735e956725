//! Eigenvalues of small dense Hermitian matrices.
//!
//! The 3×3 path is the trigonometric (Cardano) closed form. Near a double
//! eigenvalue the arccos argument approaches ±1 and the closed form loses
//! about half of its digits, so those inputs are routed to cyclic complex
//! Jacobi rotations instead.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SMatrix};
use num_complex::Complex64;

/// `1 − |r|` below which the closed form hands over to Jacobi.
const DEGENERACY_TOL: f64 = 1e-8;

/// Eigenvalues of a Hermitian 3×3 matrix, ascending.
pub fn hermitian3_eigenvalues(m: &Matrix3<Complex64>) -> [f64; 3] {
    let d = [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re];
    let off = m[(0, 1)].norm_sqr() + m[(0, 2)].norm_sqr() + m[(1, 2)].norm_sqr();
    let q = (d[0] + d[1] + d[2]) / 3.0;
    let p2 = (d[0] - q).powi(2) + (d[1] - q).powi(2) + (d[2] - q).powi(2) + 2.0 * off;
    let scale = d.iter().map(|x| x.abs()).fold(off.sqrt(), f64::max);
    if p2 <= (1e-15 * scale).powi(2) {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();

    // r = det((M − qI) / p) / 2, expanded for a Hermitian matrix.
    let (b00, b11, b22) = ((d[0] - q) / p, (d[1] - q) / p, (d[2] - q) / p);
    let b01 = m[(0, 1)] / p;
    let b02 = m[(0, 2)] / p;
    let b12 = m[(1, 2)] / p;
    let det = b00 * b11 * b22 + 2.0 * (b01 * b12 * b02.conj()).re
        - b00 * b12.norm_sqr()
        - b11 * b02.norm_sqr()
        - b22 * b01.norm_sqr();
    let r = det / 2.0;
    if 1.0 - r.abs() < DEGENERACY_TOL {
        return jacobi_eigenvalues(m);
    }

    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let mid = 3.0 * q - hi - lo;
    [lo, mid, hi]
}

/// Eigenvalues of a Hermitian N×N matrix by cyclic complex Jacobi
/// rotations, ascending. Intended for N ≤ 8 or so.
pub fn jacobi_eigenvalues<const N: usize>(m: &SMatrix<Complex64, N, N>) -> [f64; N] {
    let mut a = *m;
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return [0.0; N];
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * norm {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, p, q);
            }
        }
    }
    let mut ev = [0.0; N];
    for (i, e) in ev.iter_mut().enumerate() {
        *e = a[(i, i)].re;
    }
    ev.sort_by(f64::total_cmp);
    ev
}

/// Zero `a[(p, q)]` with the unitary `G = diag(1, e^{-iφ}) · R(θ)` acting on
/// rows/columns `p, q`.
fn rotate<const N: usize>(a: &mut SMatrix<Complex64, N, N>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let zeta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e = phase.conj();
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -e * s;
    let g_qq = e * c;

    // A ← A G
    for i in 0..N {
        let (x, y) = (a[(i, p)], a[(i, q)]);
        a[(i, p)] = x * g_pp + y * g_qp;
        a[(i, q)] = x * g_pq + y * g_qq;
    }
    // A ← G* A
    for j in 0..N {
        let (x, y) = (a[(p, j)], a[(q, j)]);
        a[(p, j)] = g_pp.conj() * x + g_qp.conj() * y;
        a[(q, j)] = g_pq.conj() * x + g_qq.conj() * y;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix6, SymmetricEigen};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hermitian3(v: &[f64; 9]) -> Matrix3<Complex64> {
        Matrix3::new(
            c(v[0], 0.0),
            c(v[3], v[4]),
            c(v[5], v[6]),
            c(v[3], -v[4]),
            c(v[1], 0.0),
            c(v[7], v[8]),
            c(v[5], -v[6]),
            c(v[7], -v[8]),
            c(v[2], 0.0),
        )
    }

    fn oracle<const N: usize>(m: &SMatrix<Complex64, N, N>) -> Vec<f64> {
        let dm = nalgebra::DMatrix::from_fn(N, N, |i, j| m[(i, j)]);
        let mut ev: Vec<f64> = SymmetricEigen::new(dm).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn diagonal_and_scalar() {
        let m = Matrix3::from_diagonal(&nalgebra::Vector3::new(c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)));
        for (a, b) in hermitian3_eigenvalues(&m).iter().zip([-1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let m = Matrix3::identity() * c(2.5, 0.0);
        assert_eq!(hermitian3_eigenvalues(&m), [2.5; 3]);
    }

    #[test]
    fn exact_double_root_goes_through_jacobi() {
        // all-ones: eigenvalues 0, 0, 3
        let m = Matrix3::from_element(c(1.0, 0.0));
        let ev = hermitian3_eigenvalues(&m);
        assert!((ev[0]).abs() < 1e-14 && (ev[1]).abs() < 1e-14);
        assert!((ev[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_six_by_six_matches_oracle() {
        let m = Matrix6::from_fn(|i, j| {
            let x = ((i * 7 + j * 3) as f64).sin();
            let y = ((i * 5 + j * 11) as f64).cos();
            c(x, y)
        });
        let h = (m + m.adjoint()) * c(0.5, 0.0);
        let ev = jacobi_eigenvalues(&h);
        for (a, b) in ev.iter().zip(oracle(&h)) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    proptest! {
        #[test]
        fn closed_form_matches_dense_oracle(v in proptest::array::uniform9(-3.0f64..3.0)) {
            let m = hermitian3(&v);
            let ev = hermitian3_eigenvalues(&m);
            let scale = 1.0 + v.iter().map(|x| x.abs()).fold(0.0, f64::max);
            for (a, b) in ev.iter().zip(oracle(&m)) {
                prop_assert!((a - b).abs() < 1e-11 * scale, "{} vs {}", a, b);
            }
        }

        #[test]
        fn near_degenerate_inputs_stay_accurate(
            base in -2.0f64..2.0, gap in 0.0f64..1e-5, top in 1.0f64..4.0,
            th in 0.0f64..std::f64::consts::TAU, ph in 0.0f64..std::f64::consts::TAU,
        ) {
            // U diag(base, base + gap, base + top) U*
            let u = nalgebra::Matrix3::new(
                c(th.cos(), 0.0), c(-th.sin(), 0.0), c(0.0, 0.0),
                Complex64::from_polar(th.sin(), ph), Complex64::from_polar(th.cos(), ph), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            );
            let w = nalgebra::Matrix3::new(
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(ph.cos(), 0.0), Complex64::from_polar(ph.sin(), th),
                c(0.0, 0.0), Complex64::from_polar(-ph.sin(), -th), c(ph.cos(), 0.0),
            );
            let q = u * w;
            let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(c(base, 0.0), c(base + gap, 0.0), c(base + top, 0.0)));
            let m = q * d * q.adjoint();
            let m = (m + m.adjoint()) * c(0.5, 0.0);
            let ev = hermitian3_eigenvalues(&m);
            let expect = [base, base + gap, base + top];
            for (a, b) in ev.iter().zip(expect) {
                prop_assert!((a - b).abs() < 1e-12 * (1.0 + top + base.abs()), "{:?} vs {:?}", ev, expect);
            }
        }
    }
}
