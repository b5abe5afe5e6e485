import math

import numpy as np
from pytest import approx, mark, raises

from reebrigidity import config
from reebrigidity.dynamics import (
    detect_cover,
    floquet,
    integrate,
    integrate_variational,
    scan,
    scan_orbits,
    shoot_closed_orbit,
)
from reebrigidity.dynamics.flow import return_residual
from reebrigidity.exceptions import NoConvergence
from reebrigidity.geometry import ReebField, Sphere, Torus3
from reebrigidity.geometry.classes import HomotopyClass, Point
from reebrigidity.geometry.factors import ellipsoid_factor

Z1 = np.array([1.0, 0.0, 0.0, 0.0])


def test_hopf_flow_returns_after_pi():
    field = ReebField(Sphere(n=2))
    assert np.allclose(integrate(field, Z1, math.pi), Z1, atol=1e-8)
    assert np.allclose(integrate(field, Z1, 0.5 * math.pi), [-1.0, 0.0, 0.0, 0.0], atol=1e-8)
    assert return_residual(field, Z1, math.pi) < 1e-8

    p = integrate(field, Point.from_array("C^n", Z1), math.pi)
    assert isinstance(p, Point)
    assert integrate(field, Z1, 0) is not Z1


def test_variational_equation():
    field = ReebField(Sphere(n=2))
    end, fundamental = integrate_variational(field, Z1, math.pi)
    assert np.allclose(end, Z1, atol=1e-8)
    # the Hopf flow is linear, so the fundamental matrix at pi is the identity
    assert np.allclose(fundamental, np.eye(4), atol=1e-7)


def test_shoot_closed_orbit_on_the_sphere():
    field = ReebField(Sphere(n=2))
    orbit = shoot_closed_orbit(field, Z1, 3.0)
    assert orbit.period == approx(math.pi, rel=1e-8)
    assert orbit.residual < 1e-8
    assert orbit.homotopy_class.is_trivial
    assert orbit.simple
    assert orbit.floquet.nullity == 2
    assert orbit.floquet.classification == "morse-bott"

    assert floquet(orbit, field, family_dim=2).classification == "morse-bott"
    assert floquet(orbit, field, family_dim=4).classification == "degenerate"


def test_converged_orbit_is_flowed_again(monkeypatch):
    field = ReebField(Sphere(n=2))
    orbit = shoot_closed_orbit(field, Z1, 3.0)
    assert return_residual(field, orbit.point, orbit.period) < config.REINTEGRATION_TOL

    monkeypatch.setattr(config, "REINTEGRATION_TOL", 0.0)
    try:
        shoot_closed_orbit(field, Z1, 3.0)
    except NoConvergence as e:
        assert e.residual >= 0.0
    else:
        assert False, "NoConvergence not raised."


def test_detect_cover():
    field = ReebField(Sphere(n=2))
    assert detect_cover(field, Z1, 2.0 * math.pi) == 2
    assert detect_cover(field, Z1, math.pi) == 1


def test_shooting_gives_up():
    field = ReebField(Sphere(n=2))
    with raises(NoConvergence):
        shoot_closed_orbit(field, Z1, 1.0, max_iter=1)
    with raises(ValueError):
        shoot_closed_orbit(field, Z1, -1.0)


def test_torus_orbit_class():
    torus = Torus3(k=1)
    field = ReebField(torus)
    orbit = shoot_closed_orbit(field, [0.1, 0.2, 0.0], 0.9)
    assert orbit.period == approx(1.0, rel=1e-8)
    assert orbit.homotopy_class == HomotopyClass(components=(1, 0, 0))
    assert orbit.floquet.classification == "morse-bott"


@mark.slow
def test_scan_finds_both_ellipsoid_orbits():
    sphere = Sphere(n=2)
    field = ReebField(sphere, ellipsoid_factor((1.0, 1.2)))
    report = scan(field, HomotopyClass.trivial(), (2.5, 5.0), seed_grid=8)
    periods = [family.period for family in report.families]
    assert any(t == approx(math.pi, rel=1e-6) for t in periods)
    assert any(t == approx(1.44 * math.pi, rel=1e-6) for t in periods)
    assert report.coverage > 0

    families = scan_orbits(field, HomotopyClass.trivial(), (2.5, 5.0), seed_grid=8)
    assert [family.period for family in families] == approx(periods)
