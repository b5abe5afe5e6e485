from pytest import raises

from reebrigidity.exceptions import InflateError
from reebrigidity.properties import (
    ArrayProperty,
    BooleanProperty,
    FloatProperty,
    IntegerProperty,
    StringProperty,
    validator,
)


class Sample:
    __section__ = "sample"

    kind = StringProperty(choices=("Sphere", "Torus3"))
    label = StringProperty(key="name")
    count = IntegerProperty(default=3)
    ratio = FloatProperty()
    enabled = BooleanProperty()
    weights = ArrayProperty(FloatProperty())
    anything = ArrayProperty()


def test_validator_only_wraps_inflate():
    with raises(ValueError):

        @validator
        def deflate(self, value):
            return value


def test_string_property_w_choice():
    assert Sample.kind.inflate("Sphere") == "Sphere"
    assert Sample.kind.inflate(' "Torus3" ') == "Torus3"

    try:
        Sample.kind.inflate("Cube", line=7)
    except InflateError as e:
        assert "Invalid choice" in str(e)
        assert e.section == "sample"
        assert e.line == 7
    else:
        assert False, "InflateError not raised."


def test_key_and_owner():
    assert Sample.label.name == "label"
    assert Sample.label.get_key("label") == "name"
    assert Sample.count.get_key("count") == "count"
    assert Sample.label.owner == "sample"

    try:
        Sample.ratio.inflate("abc")
    except InflateError as e:
        assert e.field_name == "ratio"
    else:
        assert False, "InflateError not raised."


def test_required_and_default_are_exclusive():
    with raises(ValueError):
        IntegerProperty(required=True, default=1)


def test_default_value():
    assert Sample.count.default_value() == 3
    assert isinstance(FloatProperty(default=1).default_value(), float)
    assert StringProperty(default=lambda: "e").default_value() == "e"
    with raises(ValueError):
        Sample.ratio.default_value()


def test_numbers():
    assert Sample.count.inflate(" 12 ") == 12
    assert Sample.ratio.inflate("inf") == float("inf")
    assert Sample.ratio.inflate("1e-3") == 1e-3
    with raises(InflateError):
        Sample.count.inflate("1.5")


def test_boolean_property():
    for text in ("true", "Yes", "on", "1"):
        assert Sample.enabled.inflate(text) is True
    for text in ("false", "NO", "off", "0"):
        assert Sample.enabled.inflate(text) is False
    with raises(InflateError):
        Sample.enabled.inflate("maybe")


def test_array_property():
    assert Sample.weights.inflate("1, 1.2") == (1.0, 1.2)
    assert Sample.weights.inflate("(1 2 3)") == (1.0, 2.0, 3.0)
    assert Sample.anything.inflate("[a, b]") == ("a", "b")

    try:
        Sample.weights.inflate("1, x", line=2)
    except InflateError as e:
        # one error for the whole array, not one per item
        assert e.field_name == "weights"
        assert e.line == 2
    else:
        assert False, "InflateError not raised."


def test_illegal_array_property_base():
    with raises(TypeError):
        ArrayProperty(ArrayProperty())
    with raises(TypeError):
        ArrayProperty(float)
    with raises(ValueError):
        ArrayProperty(FloatProperty(required=True))
