import math
from types import SimpleNamespace

import numpy as np
from pytest import approx, raises

from reebrigidity.constellation import build
from reebrigidity.exceptions import (
    BInSpectrum,
    CTooSmall,
    EmptyBWindow,
    HypothesisError,
    InfeasibleArea,
    ProfileError,
    SpectrumGapUnknown,
)
from reebrigidity.geometry import Ellipsoid, Sphere, Torus3
from reebrigidity.geometry.factors import ellipsoid_factor
from reebrigidity.profiles import (
    Profile,
    a_bar_closed_form,
    action_bracket,
    action_gap,
    action_gap_pair,
    check_c_large,
    check_finely_tuned,
    check_tuned,
    conformal_sandwich,
    cost_norm,
    delta_s,
    enumerate_negative,
    line_integral_action,
    linear_cost,
    make_profile,
    pullback_residual,
    tuned_hamiltonian,
)
from reebrigidity.spectrum import analytic_spectrum


def _torus_setting():
    model = Torus3(k=2)
    spec = analytic_spectrum(model, cap=5.0)
    return spec, build(model, "(1,0,0)", 1.0, spec)


def test_profile_values():
    profile = make_profile(0.1, 3.5, 10.0)
    assert profile.p > 0
    assert profile.h(10.0) == approx(31.16, abs=1e-9)
    assert profile.plateau == approx(31.17, abs=1e-9)
    assert profile.h(1.1) == approx(0.01, abs=1e-10)
    assert profile.h(0.5) == 0.0
    assert profile.h(20.0) == approx(profile.plateau)
    assert profile.h_prime(5.0) == 3.5
    assert profile.verify()

    # before the exponent is solved the plateau is the closed form value
    assert Profile(a=0.1, b=3.5, c=10.0).plateau == approx(31.17)


def test_profile_rejects_bad_parameters():
    try:
        make_profile(2.0, 1.0, 10.0)
    except InfeasibleArea as e:
        assert "a" in str(e)
    else:
        assert False, "InfeasibleArea not raised."

    with raises(ProfileError):
        make_profile(0.1, 3.5, 1.05)
    with raises(ProfileError):
        Profile(a=0.1, b=3.5, c=10.0).table


def test_ramp_inverse():
    profile = make_profile(0.2, 2.0, 5.0)
    for slope in (0.1, 1.0, 1.9):
        sigma = profile.ramp_inverse(slope)
        assert 1.0 < sigma < 1.2
        assert profile.h_prime(sigma) == approx(slope, rel=1e-8)
    with raises(ProfileError):
        profile.ramp_inverse(2.0)
    with raises(ProfileError):
        profile.ramp_inverse(0.0)


def test_tuned_hamiltonian():
    H = tuned_hamiltonian(0.1, 3.5, 10.0, kappa=0.5)
    assert H.threshold == approx(3.5 * math.exp(-0.5))
    assert H.support_end == approx(0.5 + math.log(10.1))
    assert H(0.0) == 0.0
    assert H(H.support_end + 1.0) == approx(H.profile.plateau)


def test_enumerate_negative():
    spec, _ = _torus_setting()
    H = tuned_hamiltonian(0.1, 1.5, 30.0)
    records = enumerate_negative(H, spec, "(1,0,0)")
    assert len(records) == 2
    for record in records:
        assert record.period == approx(1.0)
        assert record.slope_residual < 1e-8
        lo, hi = action_bracket(H, record)
        assert lo < record.action < hi
    # both circle families sit at the same level
    assert action_gap(records) == 0.0
    assert len(enumerate_negative(H, spec)) > len(records)


def test_enumerate_negative_errors():
    spec, _ = _torus_setting()
    with raises(SpectrumGapUnknown):
        enumerate_negative(tuned_hamiltonian(0.1, 1.5, 30.0), analytic_spectrum(Torus3(k=2), cap=1.2))
    with raises(BInSpectrum):
        enumerate_negative(tuned_hamiltonian(0.1, 2.0, 30.0), spec)
    with raises(CTooSmall):
        enumerate_negative(tuned_hamiltonian(0.1, 1.5, 10.0), spec)
    assert enumerate_negative(tuned_hamiltonian(0.1, 1.5, 10.0), spec, check_c=False)


def test_action_gaps():
    first = [SimpleNamespace(action=-1.0), SimpleNamespace(action=-1.5)]
    second = [SimpleNamespace(action=-1.2), SimpleNamespace(action=-1.0)]
    assert action_gap(first) == approx(0.5)
    assert action_gap_pair(first, second) == approx(0.2)
    assert action_gap_pair(first[:1], second[1:]) == 0.0
    assert delta_s(1.0, 1.0, 0.3) == approx(0.5)
    assert delta_s(1.0, 1.0, 0.8) == approx(0.2)


def test_check_tuned():
    _, constellation = _torus_setting()
    report = check_tuned(tuned_hamiltonian(0.1, 1.5, 10.0), constellation)
    assert report.holds
    assert report.values["b"] == 1.5

    report = check_tuned(tuned_hamiltonian(0.1, 1.5, 5.0), constellation)
    assert not report.holds
    assert [entry.name.split()[0] for entry in report.failures()] == ["(t3)"]


def test_linear_cost():
    H0 = tuned_hamiltonian(0.1, 1.5, 10.0)
    H1 = tuned_hamiltonian(0.1, 1.5, 10.0, kappa=0.2)
    # shifting to the right lowers H everywhere
    assert linear_cost(H0, H1) == approx(0.0, abs=1e-12)
    assert linear_cost(H1, H0) > 0


def test_pullback_shift():
    sphere = Sphere(n=2)
    factor = ellipsoid_factor((1.0, 1.2))
    assert pullback_residual(sphere, factor, "log") < 1e-8
    assert pullback_residual(sphere, factor, "literal") > 1e-2
    with raises(ValueError):
        pullback_residual(sphere, factor, "square")


def test_profile_is_monotone():
    profile = make_profile(0.1, 3.5, 10.0)
    s = np.linspace(0.0, 12.0, 2001)
    assert np.all(np.diff(profile.h(s)) >= 0.0)


def test_check_c_large():
    spec, _ = _torus_setting()
    # the largest period below b = 1.5 is sqrt(2), so c must exceed 1.8 / (1.5 - sqrt(2))
    assert check_c_large(tuned_hamiltonian(0.1, 1.5, 30.0), spec)
    assert not check_c_large(tuned_hamiltonian(0.1, 1.5, 10.0), spec)


def test_check_finely_tuned():
    spec, constellation = _torus_setting()
    report = check_finely_tuned(tuned_hamiltonian(0.1, 1.5, 30.0), spec, constellation)
    assert report.holds, [entry.name for entry in report.failures()]
    assert report.delta == 0.0
    assert report.delta_pair == 0.0
    assert report.delta_s == approx(0.5)
    # wider bends first break the upper bend bound on c
    assert report.a_bar == approx((30.0 * (1.5 - math.sqrt(2.0)) / 1.5 - 1.0) / 2.0, abs=1e-3)
    assert report.a_bar_proof == approx(0.5 * (math.sqrt(5.0) - 1.0))
    assert a_bar_closed_form(constellation) == report.a_bar_proof


def test_cost_norm():
    H0 = tuned_hamiltonian(0.1, 1.5, 10.0)
    H1 = tuned_hamiltonian(0.1, 1.5, 10.0, kappa=0.2)
    assert cost_norm(H0, H0) == 0.0
    assert cost_norm(H0, H1) > 0
    assert cost_norm(H0, H1) == approx(cost_norm(H1, H0))
    assert cost_norm(H1, H0) == approx(linear_cost(H1, H0))


def test_line_integral_action():
    spec, _ = _torus_setting()
    H = tuned_hamiltonian(0.1, 1.5, 30.0)
    for record in enumerate_negative(H, spec, "(1,0,0)"):
        action = line_integral_action(Torus3(k=2), record, profile=H.profile)
        assert action == approx(record.action, abs=1e-6)


def test_conformal_sandwich():
    sphere = Sphere(n=2)
    constellation = build(sphere, "e", math.pi, analytic_spectrum(sphere, cap=10.0))
    factor = ellipsoid_factor((1.0, 1.2))
    lam_spec = analytic_spectrum(Ellipsoid(weights=(1.0, 1.2)), cap=10.0)
    report = conformal_sandwich(sphere, factor, make_profile(0.1, 4.6, 30.0), constellation, lam_spec)
    assert [record.period for record in report.records] == approx([math.pi, 1.44 * math.pi])
    assert report.b_window == approx((1.44 * math.pi, 2.0 * math.pi), rel=1e-6)
    assert report.periods_in_window
    assert report.monotone
    assert report.pullback_log < 1e-8
    assert report.pullback_literal > 1e-2

    with raises(HypothesisError):
        conformal_sandwich(sphere, factor, make_profile(0.1, 4.0, 30.0), constellation, lam_spec)
    with raises(EmptyBWindow):
        conformal_sandwich(sphere, ellipsoid_factor((1.0, 1.45)), make_profile(0.1, 4.6, 30.0), constellation, lam_spec)
