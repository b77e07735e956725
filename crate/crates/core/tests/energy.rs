use approx::assert_abs_diff_eq;
use kekulattice_core::bloch::HoppingTriple;
use kekulattice_core::energy::{
    generalized_critical_mu_bound, generalized_pristine_optimum, pristine_optimum, total_energy,
    vtr_abs_t, ElasticModel,
};
use kekulattice_core::minimize::{minimize_energy, MinimizeOptions};
use kekulattice_core::sympoly::kekule_projection;
use kekulattice_core::{make_grid, QuadratureGrid, SymClass, Zone};
use proptest::prelude::*;

fn b6(n: usize) -> QuadratureGrid {
    make_grid(Zone::B6, n, (0.5, 0.5)).unwrap()
}

fn b2(n: usize) -> QuadratureGrid {
    make_grid(Zone::B2, n, (0.5, 0.5)).unwrap()
}

/// Real root of `2x + 4x³ = r` via the depressed-cubic formula.
fn quartic_model_root(r: f64) -> f64 {
    // x³ + px + q = 0 with p = 1/2, q = −r/4; one real root.
    let (p, q) = (0.5, -r / 4.0);
    let d = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    (-q / 2.0 + d).cbrt() + (-q / 2.0 - d).cbrt()
}

fn quartic_model() -> ElasticModel {
    ElasticModel::custom(
        |x| (x - 1.0).powi(2) + (x - 1.0).powi(4),
        |x| 2.0 * (x - 1.0) + 4.0 * (x - 1.0).powi(3),
        1.0,
        1.0,
    )
    .unwrap()
}

#[test]
fn pristine_optimum_at_unit_rigidity() {
    let t = pristine_optimum(1.0, &b2(64)).unwrap();
    assert_abs_diff_eq!(t, 2.0497, epsilon = 2e-3);
}

#[test]
fn generalized_optimum_for_quartic_model() {
    let g = b2(64);
    let vh = kekulattice_core::energy::pristine_vtr(&g);
    let t = generalized_pristine_optimum(&quartic_model(), 1.0, &g).unwrap();
    let oracle = 1.0 + quartic_model_root(4.0 * vh / 3.0);
    assert_abs_diff_eq!(t, oracle, epsilon = 1e-9);
    assert_abs_diff_eq!(t, 1.6056, epsilon = 1e-3);

    let mut prev = f64::INFINITY;
    for mu in [0.2, 0.5, 1.0, 2.0, 10.0, 1e6] {
        let t = generalized_pristine_optimum(&quartic_model(), mu, &g).unwrap();
        assert!(t <= prev && t >= 1.0);
        prev = t;
    }
    assert!(prev - 1.0 < 1e-5);
}

#[test]
fn critical_bound_for_quadratic_and_scaled_models() {
    let g = b2(256);
    let q = generalized_critical_mu_bound(&ElasticModel::quadratic(), &g).unwrap();
    assert!(q <= 1.114 + 0.01, "{q}");
    assert_abs_diff_eq!(q, 1.114, epsilon = 0.01);
    let doubled = generalized_critical_mu_bound(&ElasticModel::quadratic().scaled(2.0).unwrap(), &g).unwrap();
    assert!(doubled < q);
    let quartic = generalized_critical_mu_bound(&quartic_model(), &g).unwrap();
    assert!(quartic.is_finite() && quartic > 0.0);
}

#[test]
fn above_the_bound_the_minimizer_is_pristine() {
    let g6 = b6(32);
    let bound = generalized_critical_mu_bound(&ElasticModel::quadratic(), &b2(128)).unwrap();
    let opts = MinimizeOptions {
        cross_check: false,
        search_n: 16,
        ..Default::default()
    };
    let r = minimize_energy(bound + 0.1, &g6, &opts).unwrap();
    assert_eq!(r.sym_class, SymClass::Pristine);
}

#[test]
fn projection_lowers_energy_for_210() {
    let g = b6(64);
    let cfg = HoppingTriple::new(2.0, 1.0, 0.0);
    let proj = kekule_projection(&cfg).triple();
    for mu in [0.5, 1.0, 2.0] {
        let a = total_energy(&proj, mu, &g).unwrap().total;
        let b = total_energy(&cfg, mu, &g).unwrap().total;
        assert!(a < b, "mu = {mu}: {a} ≥ {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_is_permutation_invariant(t in 0.0f64..3.0, u in 0.0f64..3.0, v in 0.0f64..3.0, mu in 0.1f64..3.0) {
        let g = b6(24);
        let e0 = total_energy(&HoppingTriple::new(t, u, v), mu, &g).unwrap().total;
        for p in [[t, v, u], [u, t, v], [u, v, t], [v, t, u], [v, u, t]] {
            let e = total_energy(&HoppingTriple::from_array(p), mu, &g).unwrap().total;
            prop_assert!((e - e0).abs() < 1e-12, "{} vs {}", e, e0);
        }
    }

    #[test]
    fn trace_is_absolutely_homogeneous(t in -3.0f64..3.0, u in -3.0f64..3.0, v in -3.0f64..3.0, l in -4.0f64..4.0) {
        let g = b6(16);
        let cfg = HoppingTriple::new(t, u, v);
        let a = vtr_abs_t(&cfg.scaled(l), &g).unwrap();
        let b = l.abs() * vtr_abs_t(&cfg, &g).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + b));
    }

    #[test]
    fn projection_dominance(t in 0.0f64..3.0, u in 0.0f64..3.0, v in 0.0f64..3.0) {
        let g = b6(16);
        let cfg = HoppingTriple::new(t, u, v);
        let proj = kekule_projection(&cfg).triple();
        for mu in [0.3, 1.0, 3.0] {
            let a = total_energy(&proj, mu, &g).unwrap().total;
            let b = total_energy(&cfg, mu, &g).unwrap().total;
            prop_assert!(a <= b + 1e-9);
        }
    }

    #[test]
    fn sphere_bound(t in -3.0f64..3.0, u in -3.0f64..3.0, v in -3.0f64..3.0) {
        let g = b6(16);
        let cfg = HoppingTriple::new(t, u, v);
        let s = cfg.norm();
        let sphere = vtr_abs_t(&HoppingTriple::new(s, 0.0, 0.0), &g).unwrap();
        prop_assert!((sphere - s).abs() < 1e-12 * (1.0 + s));
        prop_assert!(sphere >= vtr_abs_t(&cfg, &g).unwrap() - 1e-9);
    }
}
