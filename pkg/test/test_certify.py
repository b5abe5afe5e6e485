import math

from pytest import approx, mark, raises

from reebrigidity.certify import (
    certify_katok,
    certify_persist,
    certify_prequantization,
    certify_sphere,
    cross_validate,
    factor_range,
)
from reebrigidity.exceptions import ConstellationNotRigid, HypothesisError, MissingBundleData
from reebrigidity.geometry import CutS2xS1, CutS3, FlatTorusCosphere, Sphere, Torus3
from reebrigidity.geometry.factors import cos_bump_factor, ellipsoid_factor


def test_sphere_certificate():
    sphere = Sphere(n=2)
    certificate = certify_sphere(sphere, ellipsoid_factor((1.0, 1.2)))
    assert certificate.theorem == "EL-sphere"
    assert certificate.valid
    assert certificate.count == 2
    assert certificate.window == approx((math.pi, 1.44 * math.pi), rel=1e-6)
    assert certificate.bound_model is sphere
    assert certificate.distinctness.verdict == "distinct-only"

    certificate = certify_sphere(sphere, (1.0, 2.5))
    assert not certificate.valid
    assert [entry.name for entry in certificate.failures()] == ["max(f)/min(f) < 2"]
    assert certificate.bound_factor is None

    with raises(HypothesisError):
        certify_sphere(Torus3(k=1), (1.0, 1.5))


def test_prequantization_certificate():
    certificate = certify_prequantization(2, None, (1.0, 1.5))
    assert certificate.valid
    assert certificate.count == 2
    assert certificate.window == approx((2.0 * math.pi, 3.0 * math.pi))
    assert certificate.distinctness.verdict == "geometric"

    certificate = certify_prequantization(4, 3, (1.0, 3.5), filled=True)
    assert certificate.valid
    assert certificate.count == 3
    assert certificate.distinctness.verdict == "conditional"
    assert certificate.distinctness.threshold == approx(2.0 * math.pi / 3.0 * 2.5)

    assert not certify_prequantization(4, 3, (1.0, 3.5)).valid

    for dim_q in (3, None, 0):
        try:
            certify_prequantization(dim_q, 1, (1.0, 1.5))
        except MissingBundleData as e:
            assert "even" in str(e)
        else:
            assert False, "MissingBundleData not raised."


def test_torus_persistence():
    torus = Torus3(k=2)
    factor = cos_bump_factor(torus, "theta", 0.2)
    certificate = certify_persist(torus, "(1,0,0)", 1.0, factor)
    assert certificate.theorem == "T3"
    assert certificate.valid, [str(entry) for entry in certificate.failures()]
    assert certificate.count == 4
    assert certificate.window == approx((0.8, 1.2), rel=1e-6)
    assert certificate.parameters["bound"] == approx(2.0)
    assert certificate.distinctness.verdict == "geometric"
    assert any("beyond the spectrum cap" in note for note in certificate.notes)

    statuses = {entry.name: entry.status for entry in certificate.ledger}
    assert statuses["T < T+"] == "verified"
    assert "lambda_0 admits an exact symplectic filling" not in statuses


def test_cut_sphere_persistence():
    certificate = certify_persist(CutS3(k=1), "e", 2.0 * math.pi, (1.0, 1.3))
    assert certificate.theorem == "S3"
    assert certificate.valid, [str(entry) for entry in certificate.failures()]
    assert certificate.count == 10
    assert certificate.parameters["bound"] == approx(math.sqrt(2.0))
    assert certificate.distinctness.threshold == approx(2.0 * math.pi * 0.3)

    assert not certify_persist(CutS3(k=1), "e", 2.0 * math.pi, (1.0, 1.5)).valid


def test_cut_s2xs1_persistence():
    certificate = certify_persist(CutS2xS1(k=2), "(1)", 2.0 * math.pi, (1.0, 1.01))
    assert certificate.theorem == "S2xS1"
    assert certificate.valid, [str(entry) for entry in certificate.failures()]
    assert certificate.count == 4
    assert certificate.distinctness.verdict == "geometric"


def test_flat_torus_persistence():
    for n, ratio, count in ((2, 1.2, 4), (3, 3.0, 8)):
        certificate = certify_persist(FlatTorusCosphere(n=n), "(1" + ",0" * (n - 1) + ")", 1.0, (1.0, ratio))
        assert certificate.theorem == "FlatTorus"
        assert certificate.valid, [str(entry) for entry in certificate.failures()]
        assert certificate.count == count

        statuses = {entry.name: entry.status for entry in certificate.ledger}
        assert statuses["members of the constellation are Morse-Bott"] == "verified"
        # T+ is infinite, so only the filled bound T+/T applies
        assert "max(f)/min(f) < T+/T" in statuses
        assert statuses["lambda_0 admits an exact symplectic filling"] == "assumed"
        assert math.isinf(certificate.parameters["bound"])


def test_persistence_needs_a_rigid_constellation():
    torus = Torus3(k=1)
    certificate = certify_persist(torus, "(2,0,0)", 2.0, (1.0, 1.1))
    assert not certificate.valid
    assert "constellation is simple" in [entry.name for entry in certificate.failures()]

    with raises(ConstellationNotRigid):
        certify_persist(torus, "(2,0,0)", 2.0, (1.0, 1.1), strict=True)


def test_katok_certificate():
    certificate = certify_katok(0.1, (1.0, 1.5), n=2)
    assert certificate.valid
    assert certificate.count == 4
    assert certificate.parameters["bound"] == approx(2.0 * 0.9 / 1.1)
    assert certificate.window == approx((2.0 * math.pi / 1.1, 2.0 * math.pi * 1.5 / 0.9))

    assert not certify_katok(0.1, (1.0, 1.7)).valid
    assert not certify_katok(0.6, (1.0, 1.0)).valid

    result = cross_validate(certificate)
    assert result.verdict == "unverified"
    assert result.required == 4


def test_factor_range():
    extrema = factor_range((1.0, 1.5))
    assert extrema.ratio == approx(1.5)
    assert factor_range(extrema) is extrema
    with raises(ValueError):
        factor_range((2.0, 1.0))
    with raises(ValueError):
        factor_range(ellipsoid_factor((1.0, 1.2)))


def test_certificate_without_live_factor_is_not_scanned():
    certificate = certify_sphere(Sphere(n=2), (1.0, 1.2))
    result = cross_validate(certificate)
    assert result.verdict == "unverified"
    assert result.note == "no model and factor bound"


@mark.slow
def test_sphere_cross_validation():
    certificate = certify_sphere(Sphere(n=2), ellipsoid_factor((1.0, 1.2)))
    result = cross_validate(certificate, seed_grid=8)
    assert result.required == 2
    assert result.verdict != "fail"
    if result.verdict == "pass":
        assert result.observed >= 2
    assert certificate.with_cross_validation(result).cross_validation == result
