from pytest import raises

from reebrigidity.exceptions import UnknownTopology
from reebrigidity.geometry.classes import FamilyTopology, HomotopyClass, Point


def test_parse_homotopy_class():
    assert HomotopyClass.parse("e").is_trivial
    assert HomotopyClass.parse("(1,0,0)").components == (1, 0, 0)
    assert HomotopyClass.parse("1, 0, 0") == HomotopyClass(components=(1, 0, 0))
    assert HomotopyClass.parse("3").components == (3,)

    try:
        HomotopyClass.parse("(1,x,0)")
    except ValueError as e:
        assert "Malformed homotopy class" in str(e)
    else:
        assert False, "ValueError not raised."


def test_trivial_classes_are_equal():
    assert HomotopyClass.trivial() == HomotopyClass(components=(0, 0, 0))
    assert hash(HomotopyClass.trivial()) == hash(HomotopyClass(components=(0, 0)))
    assert HomotopyClass(components=(0, 0, 0)).label == "e"
    assert HomotopyClass.trivial().order == 1
    assert not HomotopyClass.trivial().is_primitive


def test_group_arithmetic():
    alpha = HomotopyClass.parse("(2,4,0)")
    assert alpha.label == "(2,4,0)"
    assert alpha.gcd == 2
    assert alpha.is_infinite_order
    assert not alpha.is_primitive

    beta, k = alpha.primitive_root()
    assert beta.components == (1, 2, 0)
    assert k == 2
    assert beta.is_primitive
    assert beta.power(2) == alpha

    assert alpha.is_power_of(beta) == 2
    assert beta.is_power_of(alpha) is None
    assert HomotopyClass.parse("(3,5,0)").is_power_of(beta) is None
    assert HomotopyClass.parse("(1,2)").is_power_of(beta) is None


def test_family_topology():
    assert FamilyTopology.point().betti_sum == 1
    assert FamilyTopology.circle().betti_sum == 2
    assert FamilyTopology.torus(3).betti_sum == 8
    assert FamilyTopology.projective(2).betti_sum == 3
    assert FamilyTopology.projective(0) == FamilyTopology.point()

    assert FamilyTopology.parse("torus(2)") == FamilyTopology.torus(2)
    assert FamilyTopology.parse("circle").label == "circle"
    assert FamilyTopology.parse("projective(1)").label == "projective(1)"

    with raises(UnknownTopology):
        FamilyTopology.parse("klein")
    with raises(UnknownTopology):
        FamilyTopology.parse("torus")


def test_point():
    p = Point.from_array("S^3", [[1, 0], [0, 0]])
    assert p.coords == (1.0, 0.0, 0.0, 0.0)
    assert p.array.shape == (4,)
    assert str(p) == "S^3(1, 0, 0, 0)"
