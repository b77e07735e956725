"""Smoke test for the kekulattice extension module."""

import math

import kekulattice as kl


def main() -> None:
    cfg = kl.HoppingTriple(0.9, 0.9, 1.3)
    lo, hi = kl.spectral_bounds(cfg)
    assert math.isclose(lo, 3 * cfg.std_dev() / math.sqrt(2), rel_tol=1e-12)
    assert math.isclose(hi, 3 * cfg.mean(), rel_tol=1e-12)

    ev = kl.bands(kl.HoppingTriple.pristine(1.0), 0.0, 0.0)
    assert sum(abs(e) < 1e-12 for e in ev) == 4

    g = kl.g_from_quartic(cfg, 0.3, -0.7)
    assert abs(g - sum(e for e in kl.bands(cfg, 0.3, -0.7) if e > 0)) < 1e-8

    grid = kl.QuadratureGrid("B6", 32)
    e = kl.total_energy(kl.HoppingTriple.pristine(1.0), 1.0, grid)
    assert abs(e.total + 1.5746) < 5e-3, e.total

    proj = kl.kekule_projection(kl.HoppingTriple(2.0, 1.0, 0.0))
    assert kl.total_energy(proj, 1.0, grid).total < kl.total_energy(kl.HoppingTriple(2.0, 1.0, 0.0), 1.0, grid).total

    r = kl.minimize(0.5, grid, cross_check=False)
    assert r.sym_class == "kekule_o" and r.gap > 0, r.sym_class
    r = kl.minimize(1.5, grid, cross_check=False)
    assert r.sym_class == "pristine"

    mu_c, err = kl.mu_c(128)
    bound, _ = kl.mu_c_prime_bound(128)
    assert mu_c < bound and abs(mu_c - 0.888) < 0.02, (mu_c, err)

    assert abs(kl.kagome_bands(1.0, 2.0)[0] + 2.0) < 1e-10

    ok, report = kl.verify(seed=1, samples=10)
    assert ok, report
    ok, _ = kl.verify(seed=1, samples=10, inject_fault=True)
    assert not ok

    try:
        kl.QuadratureGrid("B6", 1)
    except ValueError:
        pass
    else:
        raise AssertionError("small grid accepted")

    print("kekulattice smoke test passed")


if __name__ == "__main__":
    main()
