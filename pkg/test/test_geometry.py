import math

import numpy as np
from pytest import approx, raises

from reebrigidity import config
from reebrigidity.exceptions import ChartError, PoleLocusError, SingularReebSystem
from reebrigidity.geometry import (
    CutS3,
    Ellipsoid,
    FlatTorusCosphere,
    ReebField,
    Sphere,
    Torus3,
    build_factor,
    build_model,
    conformal_distance,
    form_distance,
    kernel_residual,
    reeb_field,
)
from reebrigidity.geometry.calculus import contact_volume, exterior_derivative, reeb_of_conformal
from reebrigidity.geometry.classes import HomotopyClass
from reebrigidity.geometry.factors import (
    ConformalFactor,
    constant_factor,
    cos_bump_factor,
    ellipsoid_factor,
    expression_factor,
)


def test_sphere_standard_form():
    sphere = Sphere(n=2)
    z = np.array([1.0, 0.0, 0.0, 0.0])
    # v = (i, 0) at z = (1, 0)
    v = np.array([0.0, 1.0, 0.0, 0.0])
    assert sphere.contact_form(z) @ v == approx(0.5)
    assert np.allclose(sphere.reeb(z), [0.0, 2.0, 0.0, 0.0])
    assert sphere.label == "Sphere(2)"
    assert sphere.dim == 3


def test_reeb_field_rejects_bad_points():
    sphere = Sphere(n=2)
    with raises(ChartError):
        reeb_field(sphere, [2.0, 0.0, 0.0, 0.0])
    with raises(ChartError):
        reeb_field(sphere, Torus3(k=1).point([0.0, 0.0, 0.0]))
    assert np.allclose(reeb_field(sphere, sphere.point([0.0, 0.0, 1.0, 0.0])), [0.0, 0.0, 0.0, 2.0])


def test_ellipsoid_weights():
    with raises(ValueError):
        Ellipsoid(weights=(1.2, 1.0))
    with raises(ValueError):
        Ellipsoid(weights=(1.0,))

    families = Ellipsoid(weights=(1.0, 1.2)).analytic_families(cap=2.0 * math.pi + 0.1)
    periods = [family.period for family in families]
    assert periods == approx([math.pi, math.pi * 1.44, 2.0 * math.pi])
    assert families[0].family.label == "gamma_1"


def test_torus_analytic_families():
    torus = Torus3(k=2)
    families = torus.analytic_families(cap=1.0)
    # four primitive directions of length 1, each with k circle families
    assert len(families) == 8
    assert all(family.family.topology.betti_sum == 2 for family in families)
    in_class = [f for f in families if f.homotopy_class == HomotopyClass(components=(1, 0, 0))]
    assert len(in_class) == 2
    assert sorted(f.family.representative.coords[2] for f in in_class) == approx([0.0, math.pi])


def test_torus_class_of_displacement():
    torus = Torus3(k=1)
    assert torus.class_of([1.0000001, -2.0, 2.0 * math.pi]).components == (1, -2, 1)
    assert np.allclose(torus.reeb([0.0, 0.0, 0.5 * math.pi]), [0.0, 1.0, 0.0])


def test_cut_models():
    model = CutS3(k=1)
    assert model.rate == 1.25
    poles = [f for f in model.analytic_families(cap=2.0 * math.pi) if f.family.topology.kind == "point"]
    assert len(poles) == 2
    assert all(f.homotopy_class.is_trivial for f in model.analytic_families(cap=2.0 * math.pi))

    # a stencil across t = 0 has no chart to live in
    with raises(PoleLocusError):
        exterior_derivative(model.contact_form, [0.0, 0.0, 1e-7], h=1e-5, model=model)


def test_build_model():
    assert build_model("Torus3", k=2).label == "Torus3(2)"
    assert build_model("Ellipsoid", weights=[1, 2]).label == "Ellipsoid(1,2)"
    assert build_model("FlatTorusCosphere", n=2) == FlatTorusCosphere(n=2)
    with raises(ValueError):
        build_model("Cube")


def test_exterior_derivative():
    def form(x):
        # x dy on R^2
        return np.array([0.0, x[0]])

    for order in (2, 4):
        assert np.allclose(exterior_derivative(form, [0.3, -0.2], order=order), [[0.0, 1.0], [-1.0, 0.0]])
    with raises(ValueError):
        exterior_derivative(form, [0.0, 0.0], order=3)


def test_kernel_residual_of_closed_forms():
    torus = Torus3(k=2)
    factor = cos_bump_factor(torus, "x", 0.3)
    field = ReebField(torus, factor)
    assert field.is_analytic
    for x in ([0.1, 0.2, 0.3], [0.7, 0.4, 4.0]):
        value, kernel = kernel_residual(torus, field, x, factor)
        assert value < 1e-8
        assert kernel < 1e-6

    sphere = Sphere(n=2)
    factor = ellipsoid_factor((1.0, 1.2))
    field = ReebField(sphere, factor)
    x = sphere.normalize([0.6, 0.1, 0.3, -0.7])
    value, kernel = kernel_residual(sphere, field, x, factor)
    assert value < 1e-8
    assert kernel < 1e-6


def test_kernel_residual_of_solved_field():
    torus = Torus3(k=1)
    factor = cos_bump_factor(torus, "theta", 0.2)
    field = ReebField(torus, factor)
    assert not field.is_analytic
    value, kernel = kernel_residual(torus, field, [0.2, 0.5, 1.0], factor)
    assert value < 1e-6
    assert kernel < 1e-5


def test_constant_factor_rescales_reeb():
    sphere = Sphere(n=2)
    field = ReebField(sphere, constant_factor(2.0))
    z = np.array([1.0, 0.0, 0.0, 0.0])
    assert np.allclose(field(z), sphere.reeb(z) / 2.0)
    assert contact_volume(sphere, z) > 0


def test_factor_presets():
    torus = Torus3(k=2)
    factor = build_factor(torus, "cos-bump", coordinate="theta", amplitude=0.2)
    assert factor.symmetries == ("x", "y")
    extrema = factor.extrema(torus)
    assert extrema.min == approx(0.8, rel=1e-6)
    assert extrema.max == approx(1.2, rel=1e-6)
    assert extrema.ratio == approx(1.5, rel=1e-6)
    assert extrema.ratio_enclosed >= extrema.ratio

    distance, half_width = conformal_distance(torus, factor)
    assert distance == approx(math.log(1.5), rel=1e-6)
    assert half_width >= 0
    assert form_distance(torus, factor, factor) == approx(0.0, abs=1e-12)

    scaled = factor.scaled(2.0).extrema(torus)
    assert scaled.min == approx(1.6, rel=1e-6)
    assert scaled.ratio == approx(1.5, rel=1e-6)

    with raises(ValueError):
        build_factor(torus, "cos-bump", coordinate="theta", amplitude=1.0)
    with raises(ValueError):
        build_factor(torus, "ellipsoid", weights=(1.0, 1.2))
    with raises(ValueError):
        build_factor(torus, "cos-bump")


def test_expression_factor():
    torus = Torus3(k=1)
    factor = expression_factor(torus, "1 + 0.1*cos(x) - 0.1*sin(2*theta)")
    assert factor.symmetries == ("y",)
    assert float(factor(np.array([0.0, 0.3, 0.0]))) == approx(1.1)

    assert expression_factor(torus, "2").constant
    with raises(ValueError):
        expression_factor(torus, "1 + x^2")
    with raises(ValueError):
        expression_factor(torus, "1 + cos(z)")

    sphere = Sphere(n=2)
    assert float(expression_factor(sphere, "1 + x1^2")(np.array([0.5, 0.0, 0.0, 0.0]))) == approx(1.25)


def test_reeb_system_residual_is_an_error(monkeypatch):
    torus = Torus3(k=1)
    factor = cos_bump_factor(torus, "theta", 0.2)
    x = np.array([0.2, 0.5, 1.0])
    assert np.all(np.isfinite(reeb_of_conformal(torus, factor, x)))

    monkeypatch.setattr(config, "REEB_RESIDUAL_TOL", -1.0)
    try:
        reeb_of_conformal(torus, factor, x)
    except SingularReebSystem as e:
        assert e.residual is not None
        assert e.coords == approx((0.2, 0.5, 1.0))
        assert "residual" in str(e)
    else:
        assert False, "SingularReebSystem not raised."


def test_factors_survive_json():
    torus = Torus3(k=2)
    sphere = Sphere(n=2)
    cases = [
        (torus, cos_bump_factor(torus, "theta", 0.2, frequency=2), np.array([0.1, 0.4, 0.7])),
        (torus, expression_factor(torus, "1 + 0.1*cos(x) - 0.1*sin(2*theta)"), np.array([0.3, 0.2, 0.9])),
        (sphere, ellipsoid_factor((1.0, 1.3)), np.array([0.6, 0.0, 0.0, 0.8])),
        (sphere, constant_factor(2.5), np.array([1.0, 0.0, 0.0, 0.0])),
        (sphere, ellipsoid_factor((1.0, 1.3)).scaled(2.0), np.array([0.0, 0.6, 0.8, 0.0])),
    ]
    for model, factor, x in cases:
        loaded = ConformalFactor.model_validate_json(factor.model_dump_json())
        assert loaded.name == factor.name
        assert float(loaded(x)) == approx(float(factor(x)))
        assert loaded.extrema(model).ratio == approx(factor.extrema(model).ratio, rel=1e-6)


def test_composed_factors_do_not_reload():
    first = ellipsoid_factor((1.0, 1.3))
    ratio = first.ratio(constant_factor(2.0))
    x = np.array([0.6, 0.0, 0.0, 0.8])
    assert float(ratio(x)) == approx(float(first(x)) / 2.0)

    loaded = ConformalFactor.model_validate_json(ratio.model_dump_json())
    with raises(ValueError):
        loaded(x)
