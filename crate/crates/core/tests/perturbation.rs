use approx::assert_abs_diff_eq;
use kekulattice_core::bloch::HoppingTriple;
use kekulattice_core::energy::{pristine_average, total_energy};
use kekulattice_core::perturbation::{
    convexity_lower_bound, hessian_coefficient, hessian_finite_difference, mu_c, mu_c_prime_bound,
};
use kekulattice_core::{make_grid, Zone};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn critical_rigidity_at_256() {
    let g = make_grid(Zone::B6, 256, (0.5, 0.5)).unwrap();
    let r = mu_c(&g).unwrap();
    assert_abs_diff_eq!(r.value, 0.888, epsilon = 0.01);
    assert!(r.error < 0.01);
}

#[test]
fn refinement_is_self_consistent() {
    let a = mu_c(&make_grid(Zone::B6, 64, (0.5, 0.5)).unwrap()).unwrap();
    let b = mu_c(&make_grid(Zone::B6, 128, (0.5, 0.5)).unwrap()).unwrap();
    // O(1/n) convergence: the n → 2n change is at most the previous one.
    assert!((b.value - a.value).abs() <= a.error);
    assert!(b.error <= a.error);
}

#[test]
fn upper_bound_at_1024() {
    let g = make_grid(Zone::B2, 1024, (0.5, 0.5)).unwrap();
    let r = mu_c_prime_bound(&g).unwrap();
    assert_abs_diff_eq!(r.value, 1.114, epsilon = 0.01);
    assert!(3.0 * r.avg_inv_m - r.avg_m > 0.0);
    assert_abs_diff_eq!(r.avg_m, 1.5746, epsilon = 2e-3);
}

#[test]
fn lower_rigidity_is_below_upper_bound() {
    for n in [128, 256] {
        let a = mu_c(&make_grid(Zone::B6, n, (0.5, 0.5)).unwrap()).unwrap().value;
        let b = mu_c_prime_bound(&make_grid(Zone::B2, n, (0.5, 0.5)).unwrap()).unwrap().value;
        assert!(a < b, "n = {n}: {a} ≥ {b}");
    }
}

#[test]
fn hessian_matches_finite_difference() {
    let g = make_grid(Zone::B6, 256, (0.5, 0.5)).unwrap();
    let t = 1.0;
    let coeff = hessian_coefficient(t, &g).unwrap();
    let fd = hessian_finite_difference(t, 1e-3, &g).unwrap();
    assert!((fd + coeff).abs() <= 0.01 * coeff, "{fd} vs −{coeff}");
    // And μ_c follows from the same average.
    let r = mu_c(&g).unwrap();
    assert_abs_diff_eq!(coeff, r.avg_c, epsilon = 1e-12);
}

#[test]
fn convexity_bound_holds_near_the_optimum() {
    let (g2, g6) = (
        make_grid(Zone::B2, 128, (0.5, 0.5)).unwrap(),
        make_grid(Zone::B6, 64, (0.5, 0.5)).unwrap(),
    );
    let mu = 2.0;
    let t_star = 1.0 + 2.0 * pristine_average(&g6, |m| m) / (3.0 * mu);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let mut d = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let norm = d.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
        let r = rng.gen_range(0.0..0.5);
        d.iter_mut().for_each(|x| *x *= r / norm);
        let cfg = HoppingTriple::new(t_star + d[0], t_star + d[1], t_star + d[2]);
        let bound = convexity_lower_bound(&cfg, mu, &g2, &g6).unwrap();
        let e = total_energy(&cfg, mu, &g6).unwrap().total;
        assert!(e >= bound - 1e-6, "{e} < {bound}");
    }
}
