"""Verification battery: residuals, decay orders, suite runner, sweeps."""

import numpy as np
import pytest

from geopol import models, verify
from geopol.semigroup import GroupElement
from geopol.verify import (check_canonical_metric, check_equivariance,
                           check_fibration_holomorphy, check_kahler_identity,
                           check_monge_ampere_fiber, check_pullbacks,
                           check_real_polarization, check_siegel, run_suite,
                           sweep_domain)


def test_pullbacks_flat_and_identity(flat2, rng):
    x = flat2.point([0.3, 0.1], [0.5, -0.2])
    rep = check_pullbacks(x, GroupElement(1.0, 2.0), rng=rng, tol=1e-10)
    assert rep.passed
    rep = check_pullbacks(x, GroupElement(0.0, 1.0), rng=rng, tol=1e-14)
    assert rep.residual < 1e-14


def test_pullbacks_curved(sphere, rng):
    x = sphere.point([0.2, -0.1], [0.4, 0.3])
    rep = check_pullbacks(x, GroupElement(0.3, 0.5), rng=rng, tol=1e-8)
    assert rep.passed


def test_kahler_flat_exact(flat2):
    x = flat2.point([0.3, 0.1], [0.5, -0.2])
    rep = check_kahler_identity(x, 0.7 + 1.3j, h=1e-3, tol=1e-9)
    assert rep.passed


def test_kahler_sphere_second_order(sphere):
    x = sphere.point([0.2, -0.3], [0.6, 0.1])
    fine = check_kahler_identity(x, 1j, h=1e-3, tol=1e-4)
    coarse = check_kahler_identity(x, 1j, h=2e-3, tol=1e-3)
    assert fine.passed
    assert 3.5 < coarse.residual / fine.residual < 4.5


def test_kahler_positivity_flip(sphere):
    from geopol.adapted import complex_structure
    x = sphere.point([0.2, -0.3], [0.6, 0.1])
    j_up = complex_structure(x, 0.4 + 0.8j).J
    j_dn = complex_structure(x, 0.4 - 0.8j).J
    xi = np.array([1.0, 0.0, 0.0, 0.0])
    taming = lambda j: xi[:2] @ (j @ xi)[2:] - xi[2:] @ (j @ xi)[:2]
    assert taming(j_up) > 0 > taming(j_dn)


def test_equivariance_cases(flat2, sphere, hyperbolic):
    x = flat2.point([0.3, 0.1], [0.5, -0.2])
    assert check_equivariance(x, 1j, GroupElement(1.0, 2.0), tol=1e-10).passed
    assert check_equivariance(x, 1j, GroupElement(0.0, 1.0), tol=1e-13).passed
    xs = sphere.point([0.2, -0.1], [0.4, 0.2])
    assert check_equivariance(xs, 1j, GroupElement(0.3, 0.5), tol=1e-7).passed
    xh = hyperbolic.point([0.1, 0.1], [0.3, 0.2])
    assert check_equivariance(xh, 1j, GroupElement(0.0, 0.5), tol=1e-7).passed


def test_canonical_metric_all_models(flat2, sphere, hyperbolic, torus):
    samples = [
        (flat2.point([0.3, 0.1], [0.5, -0.2]), 1j, 1e-10),
        (sphere.point([0.2, -0.1], [0.4, 0.2]), 0.3 + 0.9j, 1e-6),
        (hyperbolic.point([0.1, 0.1], [0.3, 0.2]), -0.2 + 0.7j, 1e-6),
        (torus.point([0.3, 0.2], [0.4, 0.2]), 0.2 + 0.8j, 1e-6),
    ]
    for x, s, tol in samples:
        assert check_canonical_metric(x, s, tol=tol).passed


def test_canonical_metric_flat_m2_value(flat2):
    rep = check_canonical_metric(flat2.point([0, 0], [1, 0]), 2j, tol=1e-10)
    assert abs(rep.context["h_k"] - 16.0) < 1e-10


def test_monge_ampere(flat2, hyperbolic):
    e1 = models.Euclidean(1)
    rep = check_monge_ampere_fiber(e1.point([0.2], [0.7]), 0.5 + 0.8j,
                                   h=1e-3, tol=1e-9)
    assert rep.passed
    xh = hyperbolic.point([0.1, -0.2], [0.4, 0.3])
    rep = check_monge_ampere_fiber(xh, 1j, h=1e-2, tol=1e-3)
    assert rep.passed
    # zero-speed limit: both sides vanish
    x0 = hyperbolic.point([0.1, -0.2], [0.0, 0.0])
    rep0 = check_monge_ampere_fiber(x0, 1j, h=1e-2, tol=1e-9)
    assert rep0.passed


def test_monge_ampere_rejects_m3():
    e3 = models.Euclidean(3)
    with pytest.raises(ValueError):
        check_monge_ampere_fiber(e3.point([0, 0, 0], [1, 0, 0]), 1j)


def test_fibration(flat2, sphere):
    x = flat2.point([0.3, 0.1], [0.5, -0.2])
    assert check_fibration_holomorphy(x, 0.4 + 0.9j, h=1e-3, tol=1e-9).passed
    xs = sphere.point([0.2, -0.3], [0.6, 0.1])
    fine = check_fibration_holomorphy(xs, 0.3 + 0.8j, h=1e-3, tol=1e-4)
    coarse = check_fibration_holomorphy(xs, 0.3 + 0.8j, h=2e-3, tol=1e-3)
    assert fine.passed
    assert 3.5 < coarse.residual / fine.residual < 4.5
    # lower half plane behaves the same
    assert check_fibration_holomorphy(xs, 0.3 - 0.8j, h=1e-3, tol=1e-4).passed


def test_real_polarization_check(flat2, sphere):
    x = flat2.point([0.3, 0.1], [0.5, -0.2])
    assert check_real_polarization(x, 0.0, tol=1e-12).passed
    assert check_real_polarization(x, 1.0, tol=1e-10).passed
    xs = sphere.point([0.2, -0.1], [0.4, 0.2])
    assert check_real_polarization(xs, 0.7, tol=1e-8).passed


def test_siegel_check(torus):
    x = torus.point([0.3, 0.2], [0.4, 0.2])
    rep = check_siegel(x, 0.3 + 0.7j, tol=1e-8)
    assert rep.passed and rep.context["margin"] > 0
    rep = check_siegel(x, 0.3 - 0.7j, tol=1e-8)
    assert rep.passed and rep.context["margin"] > 0


def test_run_suite_small():
    reports = run_suite(models=[models.Euclidean(2),
                                models.ConstantCurvature(2, 1.0)],
                        n_samples=4, seed=11)
    assert reports and all(r.passed for r in reports)
    names = {r.name for r in reports}
    assert "pullbacks" in names and "siegel" in names


def test_run_suite_unknown_check():
    with pytest.raises(ValueError):
        run_suite(checks=["nonsense"], n_samples=1)


def test_run_suite_reports_runtime_errors_as_failures():
    # a declared analyticity strip too narrow for the sampled parameters
    # must surface as failed reports, not tracebacks
    cramped = models.SurfaceOfRevolution(models.torus_profile(3.0, strip=0.2))
    reports = run_suite(models=[cramped], checks=["siegel"], n_samples=2, seed=0)
    assert reports and all(not r.passed for r in reports)
    assert all("error" in r.context for r in reports)


def test_run_suite_forced_failure():
    reports = run_suite(models=[models.Euclidean(2)], checks=["kahler"],
                        n_samples=1, seed=0, tol_overrides={"kahler": 1e-20})
    assert any(not r.passed for r in reports)


def test_fibration_point_membership_via_transporter(hyperbolic):
    # membership in the total space can equivalently be probed by
    # transporting the point to the reference parameter i
    from geopol.adapted import act, domain_check
    from geopol.semigroup import solve_transporter
    from geopol.verify import FibrationPoint
    x = hyperbolic.point([0.1, 0.0], [0.6, 0.2])
    for s in [0.8j, 1.2 + 0.5j, 4.0j, -0.9j]:
        direct = FibrationPoint(s, x).member()
        moved = act(solve_transporter(1j, s), x)
        assert direct == domain_check(moved, 1j).inside


def test_equivariance_composes(sphere):
    g = GroupElement(0.2, 0.8)
    h = GroupElement(-0.1, 1.4)
    from geopol.semigroup import compose
    x = sphere.point([0.2, -0.1], [0.4, 0.2])
    r_g = check_equivariance(x, 1j, g, tol=1.0).residual
    r_h = check_equivariance(x, 1j, h, tol=1.0).residual
    r_gh = check_equivariance(x, 1j, compose(g, h), tol=1.0).residual
    assert r_gh <= r_g + r_h + 1e-8


def test_sweep_domain_rows(hyperbolic):
    x = hyperbolic.point([0.0, 0.0], [1.0, 0.0])
    ims = np.array([0.0, 1.0, 2.0])
    rows = list(sweep_domain(hyperbolic, [x], np.array([0.0]), ims))
    assert rows[0]["status"] == "real-polarization"
    assert rows[1]["inside"] and rows[1]["status"] == "ok"
    assert not rows[2]["inside"]
