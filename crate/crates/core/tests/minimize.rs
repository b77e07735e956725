use approx::assert_abs_diff_eq;
use kekulattice_core::bloch::HoppingTriple;
use kekulattice_core::energy::{pristine_optimum, total_energy};
use kekulattice_core::minimize::{
    minimize_energy, phase_scan, transition_bracket, MinimizeOptions, MinimizerTables,
};
use kekulattice_core::sympoly::kekule_projection;
use kekulattice_core::{make_grid, Phase, QuadratureGrid, SymClass, Zone};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn b6(n: usize) -> QuadratureGrid {
    make_grid(Zone::B6, n, (0.5, 0.5)).unwrap()
}

fn fast() -> MinimizeOptions {
    MinimizeOptions {
        cross_check: false,
        search_n: 32,
        ..Default::default()
    }
}

#[test]
fn strong_rigidity_gives_pristine_optimum() {
    let g = b6(64);
    let r = minimize_energy(1.5, &g, &MinimizeOptions::default()).unwrap();
    assert_eq!(r.sym_class, SymClass::Pristine);
    assert!(r.converged);
    let t_star = MinimizerTables::new(&g, 64).unwrap().pristine_optimum(1.5);
    for x in r.cfg.as_array() {
        assert_abs_diff_eq!(x, t_star, epsilon = 1e-5);
    }
    // The B6 optimum agrees with the B2 formula to quadrature accuracy.
    assert_abs_diff_eq!(t_star, pristine_optimum(1.5, &make_grid(Zone::B2, 64, (0.5, 0.5)).unwrap()).unwrap(), epsilon = 1e-3);
    assert!(r.cross_check_delta.unwrap().abs() < 1e-7);
}

#[test]
fn weak_rigidity_gives_kekule_distortion() {
    let g = b6(64);
    let mu = 0.5;
    let r = minimize_energy(mu, &g, &MinimizeOptions::default()).unwrap();
    assert_eq!(r.sym_class, SymClass::KekuleO);
    let c = r.cfg;
    assert!((c.u - c.t).abs() < 1e-5 && c.v > c.u + 0.1, "{c:?}");
    assert!(r.gap > 0.0);
    assert_abs_diff_eq!(r.gap, 3.0 * std::f64::consts::SQRT_2 * c.std_dev(), epsilon = 1e-10);
    // Reference minimizer from an independent Python search on the same slice.
    assert_abs_diff_eq!(c.t, 2.315, epsilon = 0.01);
    assert_abs_diff_eq!(c.v, 4.275, epsilon = 0.01);

    let t_star = pristine_optimum(mu, &g).unwrap();
    let pristine = total_energy(&HoppingTriple::pristine(t_star), mu, &g).unwrap().total;
    assert!(r.energy < pristine - 1e-3);
    assert!(r.cross_check_delta.unwrap().abs() < 1e-7);
}

#[test]
fn minimizer_is_stationary_and_seed_independent() {
    let g = b6(32);
    for mu in [0.5, 1.2] {
        let a = minimize_energy(mu, &g, &MinimizeOptions { seed: 1, ..fast() }).unwrap();
        let b = minimize_energy(mu, &g, &MinimizeOptions { seed: 99, ..fast() }).unwrap();
        for (x, y) in a.cfg.as_array().iter().zip(b.cfg.as_array()) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-6);
        }
        let h = 1e-4;
        let e = |c: [f64; 3]| total_energy(&HoppingTriple::from_array(c), mu, &g).unwrap().total;
        let mut grad2 = 0.0;
        for i in 0..3 {
            let (mut p, mut m) = (a.cfg.as_array(), a.cfg.as_array());
            p[i] += h;
            m[i] -= h;
            let (ep, em) = (e(p), e(m));
            grad2 += ((ep - em) / (2.0 * h)).powi(2);
            // ±1e-4 probes do not go below the minimum.
            assert!(ep >= a.energy - 1e-12 && em >= a.energy - 1e-12);
        }
        assert!(grad2.sqrt() <= 1e-5 * (1.0 + a.energy.abs()), "mu = {mu}: |grad| = {}", grad2.sqrt());
        assert!(a.cfg.as_array().iter().all(|x| *x >= -1e-5));
    }
}

#[test]
fn kekule_dominance_for_random_asymmetric_inputs() {
    let g = b6(32);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let cfg = HoppingTriple::new(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let proj = kekule_projection(&cfg).triple();
        let a = total_energy(&proj, 0.7, &g).unwrap().total;
        let b = total_energy(&cfg, 0.7, &g).unwrap().total;
        assert!(a <= b + 1e-12);
    }
}

#[test]
fn scans_far_from_the_transition() {
    let g = b6(32);
    let high = phase_scan(2.0, 3.0, 3, &g, &fast()).unwrap();
    assert!(high.iter().all(|p| p.phase == Phase::Pristine));

    let low = phase_scan(0.1, 0.3, 3, &g, &fast()).unwrap();
    assert!(low.iter().all(|p| p.phase == Phase::Distorted && p.gap > 0.0));

    let single = phase_scan(0.7, 0.7, 1, &g, &fast()).unwrap();
    assert_eq!(single.len(), 1);
    let r = minimize_energy(0.7, &g, &fast()).unwrap();
    assert_eq!(single[0].energy_kekule, r.energy);
}

#[test]
fn coarse_transition_estimate() {
    let g = b6(64);
    let (lo, hi) = transition_bracket(&g, 0.05, &fast()).unwrap();
    assert!(hi - lo <= 0.05);
    let mid = 0.5 * (lo + hi);
    assert!((0.80..=0.95).contains(&mid), "{mid}");
}
