from pytest import raises

from reebrigidity import (
    ChartError,
    InflateError,
    NoConvergence,
    PoleLocusError,
    ReebRigidityException,
    RequiredField,
    ScenarioError,
    SpectrumCapInsufficient,
    StepSizeUnderflow,
    UnknownPreset,
)
from reebrigidity.exceptions import __all__ as exported


def test_every_exception_is_exported():
    assert "ReebRigidityException" in exported
    assert "ScenarioError" in exported
    assert len(set(exported)) == len(exported)


def test_builtin_bases():
    # callers can catch by the builtin kind or by the package base class
    with raises(ValueError):
        raise PoleLocusError("T^2x[0,2pi]", (0.0, 0.0, 0.0), "stencil crosses a pole fibre")
    with raises(RuntimeError):
        raise StepSizeUnderflow("step size too small", time=1.5)
    with raises(ReebRigidityException):
        raise SpectrumCapInsufficient(10.0, 12.0)
    assert issubclass(PoleLocusError, ChartError)
    assert issubclass(RequiredField, ScenarioError)


def test_messages():
    e = ChartError("S^3", [1, 2, 3, 4], "off the sphere")
    assert e.coords == (1.0, 2.0, 3.0, 4.0)
    assert "off the sphere" in str(e) and "'S^3'" in str(e)

    assert "after 25 iterations" in str(NoConvergence(25, 1e-3))
    assert "at t=1.5" in str(StepSizeUnderflow("step size too small", time=1.5))

    e = InflateError("class", "scenario", "Malformed homotopy class", 3)
    assert str(e) == "Attempting to read field 'class' of section [scenario] (line 3): Malformed homotopy class"
    assert "(line" not in str(InflateError("grid", "tolerances", "must be positive"))

    assert str(RequiredField("command", "scenario")) == "field 'command' is required in section [scenario]"
    assert "'wobble'" in str(UnknownPreset("factor", "wobble"))
