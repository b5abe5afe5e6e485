import math

from pytest import approx, raises

from reebrigidity.exceptions import EmptyClassSpectrum
from reebrigidity.geometry import Ellipsoid, Sphere, Torus3
from reebrigidity.geometry.classes import HomotopyClass
from reebrigidity.spectrum import (
    SPECTRUM_PRESETS,
    analytic_spectrum,
    katok,
    load_spectrum,
    negative_curvature,
    t_min,
    t_min_alpha,
    t_plus,
    write_spectrum,
)

ALPHA = HomotopyClass(components=(1, 0, 0))


def test_sphere_spectrum():
    spec = analytic_spectrum(Sphere(n=3), cap=10.0)
    assert spec.provenance == "analytic"
    assert spec.periods() == approx([math.pi, 2.0 * math.pi, 3.0 * math.pi])
    assert [e.cover for e in spec.entries] == [1, 2, 3]
    assert spec.entries[0].family.topology.label == "projective(2)"
    assert spec.missing_primitives() == []
    assert t_min(spec) == approx(math.pi)

    with raises(ValueError):
        analytic_spectrum(Sphere(n=2), cap=0)


def test_torus_spectrum_by_class():
    spec = analytic_spectrum(Torus3(k=2), cap=2.5)
    assert t_min(spec) == approx(1.0)
    assert t_min_alpha(spec, ALPHA) == approx(1.0)
    assert t_min_alpha(spec, "(1,1,0)") == approx(math.sqrt(2.0))
    # covers of (1,0) lie in the classes (g,0,0)
    assert t_plus(spec, ALPHA, 1.0) == math.inf
    assert len(spec.of_class(ALPHA)) == 2
    assert len(spec.of_class("(2,0,0)")) == 2
    assert spec.count_below(1.5, ALPHA) == 2
    assert len(spec.families_between(1.0, 1.0, ALPHA)) == 2
    assert spec.contains(2.0, "(2,0,0)")
    assert not spec.contains(2.0, ALPHA)
    assert not spec.contains(1.5, ALPHA)
    assert spec.nearest_below(2.0, ALPHA) == approx(1.0)

    with raises(EmptyClassSpectrum):
        t_min_alpha(spec, "(3,0,0)")


def test_t_plus_beyond_cap(caplog):
    spec = analytic_spectrum(Torus3(k=1), cap=1.5)
    assert t_plus(spec, ALPHA, 1.0) == math.inf
    assert t_plus(spec, ALPHA, 2.0) == math.inf
    assert "lower bound only" in caplog.text


def test_scaled_spectrum():
    spec = analytic_spectrum(Ellipsoid(weights=(1.0, 1.2)), cap=5.0)
    scaled = spec.scaled(2.0)
    assert scaled.periods() == approx([2.0 * p for p in spec.periods()])
    assert scaled.cap == 10.0
    assert scaled.model.startswith("2*")


def test_resonant_weights_are_annotated():
    spec = analytic_spectrum(Ellipsoid(weights=(1.0, math.sqrt(2.0))), cap=7.0)
    assert any("resonant" in note for note in spec.notes)
    spec = analytic_spectrum(Ellipsoid(weights=(1.0, 1.0)), cap=4.0)
    assert spec.entries[0].family.topology.label == "projective(1)"


def test_external_presets():
    spec = negative_curvature(length=1.0, systole=0.5, cap=2.0)
    assert spec.provenance == "external"
    assert spec.periods("(1,0)") == approx([1.0, 2.0])
    assert t_min(spec) == approx(0.5)
    with raises(ValueError):
        negative_curvature(length=1.0, systole=2.0)

    spec = katok(0.1, 2, cap=7.0)
    assert spec.size == 4
    assert spec.periods() == approx([2.0 * math.pi * (0.9 + 0.2 * i / 3) for i in range(4)])
    with raises(ValueError):
        katok(1.5, 1)

    assert set(SPECTRUM_PRESETS) == {"negative-curvature", "katok"}


def test_spectrum_file(tmp_path):
    spec = analytic_spectrum(Torus3(k=1), cap=3.0)
    path = tmp_path / "torus.json"
    write_spectrum(spec, path)
    loaded = load_spectrum(path)
    assert loaded.periods(ALPHA) == approx(spec.periods(ALPHA))
    assert loaded.entries[0].family.representative == spec.entries[0].family.representative

    text = negative_curvature(cap=3.0).model_dump_json()
    assert load_spectrum(text).size == 3
