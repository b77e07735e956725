//! Brillouin-zone averages against independent reduced-coordinate oracles.

use std::f64::consts::TAU;

use approx::assert_abs_diff_eq;
use kekulattice_core::bloch::{singular_values, HoppingTriple};
use kekulattice_core::energy::{pristine_vtr, pristine_vtr_estimate, total_energy, vtr_abs_t};
use kekulattice_core::kagome::kagome_bands;
use kekulattice_core::{basis, make_grid, Zone};
use num_complex::Complex64;

/// Midpoint rule on the unit square of reduced coordinates, with
/// `m = |1 + e^{2πix} + e^{2πiy}|` written directly in those coordinates.
fn oracle_avg_m(n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
            acc += (Complex64::from(1.0) + Complex64::cis(TAU * x) + Complex64::cis(TAU * y)).norm();
        }
    }
    acc / (n * n) as f64
}

#[test]
fn pristine_average_matches_oracle() {
    let reference = oracle_avg_m(512);
    assert_abs_diff_eq!(reference, 1.5746, epsilon = 1e-4);
    let g = make_grid(Zone::B2, 64, (0.5, 0.5)).unwrap();
    let v = pristine_vtr(&g);
    assert_abs_diff_eq!(v, oracle_avg_m(64), epsilon = 1e-12);
    assert_abs_diff_eq!(v, reference, epsilon = 1e-3);
}

#[test]
fn zone_independence_of_the_pristine_trace() {
    // 6×6 route on B6 against the 2×2 route on B2.
    for n in [32, 64] {
        let g6 = make_grid(Zone::B6, n, (0.5, 0.5)).unwrap();
        let g2 = make_grid(Zone::B2, n, (0.5, 0.5)).unwrap();
        let e6 = kekulattice_core::energy::vtr_abs_t_estimate(&HoppingTriple::pristine(1.0), &g6).unwrap();
        let e2 = pristine_vtr_estimate(&g2).unwrap();
        assert!(
            (e6.value - e2.value).abs() <= 2.0 * e6.error.max(e2.error),
            "n = {n}: {e6:?} vs {e2:?}"
        );
    }
}

#[test]
fn vtr_of_unit_pristine_on_b6() {
    let g = make_grid(Zone::B6, 64, (0.5, 0.5)).unwrap();
    let v = vtr_abs_t(&HoppingTriple::pristine(1.0), &g).unwrap();
    assert_abs_diff_eq!(v, oracle_avg_m(512), epsilon = 2e-3);
    let e = total_energy(&HoppingTriple::pristine(1.0), 1.0, &g).unwrap();
    assert_abs_diff_eq!(e.total, -1.5746, epsilon = 2e-3);
}

#[test]
fn quadrature_error_shrinks_with_n() {
    let mut prev = f64::INFINITY;
    for n in [16, 32, 64, 128] {
        let g = make_grid(Zone::B6, n, (0.5, 0.5)).unwrap();
        let e = total_energy(&HoppingTriple::pristine(1.0), 1.0, &g).unwrap();
        assert!(e.quad_error < prev, "n = {n}: {} ≥ {prev}", e.quad_error);
        prev = e.quad_error;
    }
}

#[test]
fn gap_law_on_a_grid() {
    let g = make_grid(Zone::B6, 32, (0.0, 0.0)).unwrap();
    for cfg in [
        HoppingTriple::new(0.3, 1.1, 2.0),
        HoppingTriple::new(1.0, 1.0, 1.7),
        HoppingTriple::new(2.5, 0.1, 0.4),
    ] {
        let a = 3.0 * cfg.std_dev() / std::f64::consts::SQRT_2;
        let mut min = f64::INFINITY;
        let mut at = 0;
        for (i, k) in g.points.iter().enumerate() {
            let s = singular_values(&cfg, k)[0];
            if s < min {
                min = s;
                at = i;
            }
        }
        assert!(min >= a - 1e-8);
        // The centered grid contains k = 0, where the bound is attained.
        assert_eq!(at, 0);
        assert_abs_diff_eq!(min, a, epsilon = 1e-8);
    }
}

#[test]
fn kagome_flat_band_is_the_minimum() {
    let b = basis();
    let n = 64;
    let mut min = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let k = b.from_reduced(Zone::B2, i as f64 / n as f64, j as f64 / n as f64);
            let bands = kagome_bands(&k);
            min = min.min(bands.flat).min(bands.lower);
        }
    }
    assert_abs_diff_eq!(min, -2.0, epsilon = 1e-10);
}
