import math

import numpy as np
from pytest import approx, fixture, mark, raises

from reebrigidity.certify import certify_fast
from reebrigidity.exceptions import ContactViolation, PlugConstructionError
from reebrigidity.plug import (
    PlugForm,
    analyse,
    box_nodes,
    bump,
    choose_parameters,
    delta_bound,
    gray_bounds,
    kernel_check,
    locate_orbit,
    make_spec,
    verify_contact,
)

EPS = 0.05
DELTA = 0.01


@fixture
def spec(coarse_grids):
    return make_spec(EPS, DELTA)


def test_bump():
    assert bump(0.0) == 1.0
    assert bump(1.0) == 0.0
    assert np.all(bump(np.array([-0.5, 0.5])) < 1.0)
    assert bump(0.3) == approx(bump(-0.3))


def test_box_nodes():
    nodes = box_nodes(EPS, 2.0, 10)
    assert len(nodes) == 13
    assert 0.0 in nodes
    assert EPS in nodes
    assert nodes[0] == -nodes[-1] == approx(-2.0 * EPS)


def test_twist_and_interpolation(spec):
    assert spec.X(EPS) == approx(EPS + EPS**2, rel=1e-12)
    assert spec.X_prime(EPS) == approx(0.0, abs=1e-12)
    assert spec.B(0.0, EPS) == approx(EPS + EPS**2, rel=1e-12)
    assert spec.T(0.0) == 1.0
    assert spec.T(EPS) == 0.0
    # the trap has unit slope on the inner rectangle
    assert spec.A_x(0.0, EPS) == approx(1.0)
    assert spec.A(3.0 * EPS, 0.0) == 0.0
    assert "A3" in spec.properties.checked


def test_construction_limits():
    with raises(PlugConstructionError):
        make_spec(0.25, DELTA)
    with raises(PlugConstructionError):
        make_spec(EPS, DELTA, dim=4)
    with raises(PlugConstructionError):
        choose_parameters(0.0, 0.33)


def test_contact_density(spec):
    form = PlugForm(spec=spec)
    t = np.linspace(-2.0 * EPS, 2.0 * EPS, 9)[:, None]
    x = np.linspace(-2.0 * EPS, 2.0 * EPS, 9)[None, :]
    assert np.allclose(form.density(t, x), form.flat_density(t, x))

    report = verify_contact(form)
    assert report.contact
    assert report.inner_holds
    assert report.inner_bound == approx(0.5 * DELTA * EPS)
    assert form.contact_verified
    assert DELTA < delta_bound(spec)


def test_zero_delta_is_not_contact(coarse_grids):
    form = PlugForm(spec=make_spec(EPS, 0.0))
    try:
        verify_contact(form)
    except ContactViolation as e:
        assert e.min_density <= 0.0
    else:
        assert False, "ContactViolation not raised."


def test_fast_orbit(spec):
    form = PlugForm(spec=spec)
    orbit = locate_orbit(form)
    assert orbit.period == approx(2.0 * math.pi * (EPS + EPS**2), abs=1e-10)
    assert orbit.period == approx(0.329867, abs=1e-6)
    assert orbit.residual < 1e-8
    assert form.orbit_verified
    assert kernel_check(form, samples=20) < 1e-8


def test_gray_bound(coarse_grids):
    report = analyse(EPS, DELTA)
    assert report.gray.bound == approx(math.exp(0.22))
    assert report.gray.bound == approx(1.24608, abs=1e-5)
    assert report.gray.grid_bound <= report.gray.bound
    assert report.gray.bar_holds
    assert report.gray.hat_holds
    assert report.period == report.orbit.period

    certificate = certify_fast(report, 0.25, 0.33)
    assert certificate.theorem == "Fast"
    assert certificate.valid, [str(entry) for entry in certificate.failures()]
    assert certificate.count == 1

    assert not certify_fast(report, 0.2, 0.33).valid
    assert not certify_fast(report, 0.25, 0.3).valid


def test_gray_bounds_on_the_grid(spec):
    gray = gray_bounds(spec)
    assert gray.rho_grid is None
    assert gray.sup_bar.value < 2.0 * DELTA
    assert gray.sup_hat.value < 4.0 * EPS
    assert gray.integral_bar <= gray.sup_bar.value
    assert gray.grid_bound <= gray.bound


def test_choose_parameters(coarse_grids):
    report = choose_parameters(0.25, 0.33)
    assert report.epsilon == 0.05
    assert report.delta == 0.01
    assert report.c1 == 0.25
    assert report.certificate.valid
    assert report.period < 0.33
    assert report.gray.bound < 1.25


@mark.slow
def test_five_dimensional_plug(coarse_grids):
    report = analyse(EPS, DELTA, dim=5)
    assert report.dimension == 5
    assert report.contact.rho_grid == 16
    assert report.period == approx(2.0 * math.pi * (EPS + EPS**2), abs=1e-10)
    assert report.gray.grid_bound <= report.gray.bound
