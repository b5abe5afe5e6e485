import math

from pytest import approx, raises

from reebrigidity.constellation import (
    build,
    check_rigid,
    distinctness_threshold,
    ellipsoid_t_plus_table,
    rank,
)
from reebrigidity.exceptions import SpectrumCapInsufficient
from reebrigidity.geometry import CutS2xS1, CutS3, FlatTorusCosphere, Sphere, Torus3
from reebrigidity.geometry.classes import HomotopyClass
from reebrigidity.spectrum import analytic_spectrum, katok, negative_curvature


def test_torus_constellation():
    model = Torus3(k=2)
    spec = analytic_spectrum(model, cap=5.0)
    constellation = build(model, "(1,0,0)", 1.0, spec)
    assert len(constellation.families) == 2
    assert constellation.rank == 4
    assert math.isinf(constellation.t_plus)
    assert constellation.rigid
    assert math.isinf(constellation.report.isolation_margin)
    assert constellation.report.sum_margin == approx(1.0)


def test_diagonal_torus_constellation():
    model = Torus3(k=2)
    constellation = build(model, "(1,1,0)", math.sqrt(2.0), analytic_spectrum(model, cap=5.0))
    assert len(constellation.families) == 2
    assert math.isinf(constellation.t_plus)
    assert constellation.rigid


def test_non_simple_constellation_is_not_rigid():
    model = Torus3(k=1)
    spec = analytic_spectrum(model, cap=5.0)
    constellation = build(model, "(2,0,0)", 2.0, spec)
    assert not constellation.report.simple
    assert not constellation.rigid
    assert constellation.report.below_sum


def test_sphere_constellation():
    model = Sphere(n=3)
    spec = analytic_spectrum(model, cap=10.0)
    constellation = build(model, HomotopyClass.trivial(), math.pi, spec)
    assert constellation.rank == 3
    assert constellation.rigid
    assert constellation.t_plus == approx(2.0 * math.pi)


def test_cut_s3_rank():
    model = CutS3(k=1)
    spec = analytic_spectrum(model, cap=13.0)
    constellation = build(model, "e", 2.0 * math.pi, spec)
    assert constellation.rank == 10
    assert constellation.rigid
    assert any("8k+1" in note for note in constellation.notes)


def test_cut_s2xs1_constellation():
    model = CutS2xS1(k=1)
    spec = analytic_spectrum(model, cap=13.0)
    constellation = build(model, "(1)", 2.0 * math.pi, spec)
    assert constellation.rank >= 1
    assert all(e.homotopy_class.components == (1,) for e in constellation.families)


def test_flat_torus_constellation():
    model = FlatTorusCosphere(n=2)
    spec = analytic_spectrum(model, cap=3.0)
    constellation = build(model, "(1,0)", 1.0, spec)
    assert constellation.rank == 4
    # (2,0) is another class, so nothing of class (1,0) lies above T
    assert math.isinf(constellation.t_plus)
    assert constellation.rigid


def test_cap_must_reach_the_period():
    model = Torus3(k=1)
    with raises(SpectrumCapInsufficient):
        build(model, "(1,0,0)", 1.0, analytic_spectrum(model, cap=1.5))


def test_external_constellation():
    spec = negative_curvature(length=1.0, systole=0.8, cap=3.0)
    constellation = build(None, "(1,0)", 1.0, spec)
    assert constellation.rank == 1
    assert constellation.t_min == approx(0.8)
    assert constellation.rigid

    spec = katok(0.1, 1, cap=7.0)
    constellation = build(None, "e", 2.0 * math.pi * 1.1, spec)
    assert constellation.rank == 2


def test_check_rigid_tolerance():
    model = Sphere(n=2)
    constellation = build(model, "e", math.pi, analytic_spectrum(model, cap=10.0))
    assert check_rigid(constellation).rigid
    assert not check_rigid(constellation, tol=4.0).rigid
    assert rank(constellation) == constellation.rank


def test_distinctness_threshold():
    assert distinctness_threshold("(1,0,0)", (1.0, 1.4), 1.0, 1.0).verdict == "always"
    assert distinctness_threshold("(2,0,0)", (1.0, 1.4), 2.0, 2.0).verdict == "always"
    result = distinctness_threshold("e", (1.0, 1.4), 10.0, 5.0, order=2)
    assert result.verdict == "threshold"
    assert result.threshold == approx((10.0 * 1.4 - 5.0 * 1.0) / 2)


def test_ellipsoid_t_plus_table():
    rows = ellipsoid_t_plus_table((1.0, 1.1, 1.3))
    assert [row.k for row in rows] == [1, 2, 3]
    assert [row.t_plus for row in rows] == approx([math.pi * 1.21, math.pi * 1.69, 2.0 * math.pi])
    assert all(row.rigid for row in rows)

    rows = ellipsoid_t_plus_table((1.0, 1.5))
    assert rows[-1].t_plus == approx(3.0 * math.pi)
    assert not rows[-1].rigid
