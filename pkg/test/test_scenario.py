import json
import math
import textwrap
from pathlib import Path

from pytest import approx, raises

from reebrigidity.exceptions import InflateError, RequiredField, ScenarioError
from reebrigidity.scenario import (
    EXIT_INVALID,
    EXIT_PARSE,
    EXIT_VALID,
    load_scenario,
    parse_scenario,
    report_path,
    run,
    scenario_from_settings,
)

DATA = Path(__file__).parent / "data" / "scenarios"


def _parse(text, source=None):
    return parse_scenario(textwrap.dedent(text), source)


def test_parse_scenario():
    scenario = load_scenario(DATA / "torus_persist.scenario")
    assert scenario.command == "certify"
    assert scenario.name == "torus_persist"
    assert scenario.homotopy_class.components == (1, 0, 0)
    assert scenario.scenario.period == 1.0
    assert scenario.model.kind == "Torus3"
    assert scenario.model.k == 2
    assert scenario.factor.amplitude == 0.2
    assert scenario.factor.frequency == 1
    assert scenario.theorem.filled is False
    assert scenario.profile is None
    assert scenario.tolerances.cap is None

    settings = scenario.to_dict()
    assert settings["scenario"]["class"] == "(1,0,0)"
    assert "profile" not in settings


def test_array_and_boolean_values():
    scenario = _parse(
        """
        [scenario]
        command = certify   # inline comment

        [model]
        kind = Sphere
        n = 2

        [factor]
        preset = ellipsoid
        weights = (1, 1.2)

        [theorem]
        id = sphere
        cross_validate = yes
        """
    )
    assert scenario.factor.weights == (1.0, 1.2)
    assert scenario.theorem.cross_validate is True
    assert scenario.name == "certify"


def test_errors_carry_the_line():
    try:
        _parse(
            """
            [scenario]
            command = constellation
            period = fast
            """
        )
    except InflateError as e:
        assert e.field_name == "period"
        assert e.line == 4
        assert "(line 4)" in str(e)
    else:
        assert False, "InflateError not raised."

    for text, fragment in (
        ("[scenario]\ncommand = plug\n[orbits]\n", "line 3: unknown section"),
        ("[scenario]\ncommand plug\n", "line 2: expected"),
        ("command = plug\n", "line 1: setting outside"),
        ("[scenario]\ncommand = plug\n[scenario]\n", "line 3: section [scenario] appears twice"),
        ("[scenario]\ncommand = plug\ncommand = plug\n", "set twice"),
        ("[scenario]\ncommand = plug\ncolour = red\n", "unknown field"),
        ("[scenario]\ncommand = dance\n", "command"),
    ):
        with raises(ScenarioError) as info:
            parse_scenario(text)
        assert fragment in str(info.value)


def test_missing_sections_and_fields():
    with raises(RequiredField):
        parse_scenario("[model]\nkind = Sphere\n")
    with raises(ScenarioError, match=r"needs a \[theorem\] section"):
        parse_scenario("[scenario]\ncommand = certify\n")
    with raises(RequiredField):
        parse_scenario("[scenario]\ncommand = constellation\n[model]\nkind = Torus3\nk = 1\n")
    with raises(InflateError):
        parse_scenario("[scenario]\ncommand = plug\n[plug]\nc1 = 1\n[tolerances]\ncap = -1\n")
    with raises(InflateError):
        load_scenario(DATA / "malformed_class.scenario")


def test_scenario_from_settings():
    scenario = scenario_from_settings("spectrum", ["model.kind=Sphere", "model.n=2", "tolerances.cap=7"])
    assert scenario.model.n == 2
    assert report_path(scenario) is None

    for settings in (["model.kind"], ["kind=Sphere"], ["orbits.kind=Sphere"]):
        with raises(ScenarioError, match="argument 1"):
            scenario_from_settings("spectrum", settings)


def test_run_spectrum():
    scenario = scenario_from_settings("spectrum", ["model.kind=Sphere", "model.n=2", "tolerances.cap=7"])
    result = run(scenario)
    assert result.status == EXIT_VALID
    assert result.report.periods() == approx([math.pi, 2.0 * math.pi])

    scenario = scenario_from_settings(
        "spectrum", ["model.kind=Sphere", "model.n=2", "tolerances.cap=7", "factor.value=2"]
    )
    assert run(scenario).report.periods() == approx([2.0 * math.pi, 4.0 * math.pi])


def test_run_constellation():
    scenario = _parse(
        """
        [scenario]
        command = constellation
        class = (1,0,0)
        period = 1

        [model]
        kind = Torus3
        k = 2

        [tolerances]
        cap = 5
        """
    )
    result = run(scenario)
    assert result.status == EXIT_VALID
    assert result.report.rank == 4
    assert result.settings["model"]["k"] == 2


def test_run_profile():
    scenario = scenario_from_settings(
        "profile",
        [
            "scenario.class=(1,0,0)",
            "scenario.period=1",
            "model.kind=Torus3",
            "model.k=2",
            "tolerances.cap=5",
            "profile.a=0.1",
            "profile.b=1.5",
            "profile.c=30",
        ],
    )
    result = run(scenario)
    assert result.status == EXIT_VALID
    assert len(result.report.records) == 16
    assert result.report.threshold == 1.5
    assert result.report.tuned.holds


def test_run_reports_failures():
    result = run(load_scenario(DATA / "katok_pinched.scenario"))
    assert result.status == EXIT_INVALID
    assert not result.report.valid
    assert result.error is None

    scenario = scenario_from_settings(
        "profile",
        ["scenario.period=1", "model.kind=Sphere", "model.n=2", "profile.a=2", "profile.b=1", "profile.c=5"],
    )
    result = run(scenario)
    assert result.status == EXIT_INVALID
    assert result.error.startswith("InfeasibleArea")

    scenario = scenario_from_settings(
        "certify",
        ["theorem.id=prequantization", "theorem.dim_q=2", "factor.preset=ellipsoid", "factor.weights=1,1.2"],
    )
    result = run(scenario)
    assert result.status == EXIT_PARSE
    assert "needs a catalog model" in result.error


def test_run_plug(coarse_grids):
    scenario = scenario_from_settings("plug", ["plug.epsilon=0.05", "plug.delta=0.01"])
    result = run(scenario)
    assert result.status == EXIT_VALID
    assert result.report.period == approx(2.0 * math.pi * 0.0525, abs=1e-10)

    result = run(scenario_from_settings("plug", ["plug.c1=0.25"]))
    assert result.status == EXIT_PARSE
    assert "c2" in result.error


def test_report_path(tmp_path):
    scenario = load_scenario(DATA / "sphere_ellipsoid.scenario")
    assert report_path(scenario) == DATA / "sphere_ellipsoid.json"
    assert report_path(scenario, tmp_path) == tmp_path / "sphere_ellipsoid.json"

    scenario = parse_scenario("[scenario]\ncommand = plug\noutput = out/plug.json\n[plug]\n", source=tmp_path / "x")
    assert report_path(scenario) == tmp_path / "out" / "plug.json"


def test_result_is_written_as_json(tmp_path):
    scenario = scenario_from_settings("spectrum", ["model.kind=Sphere", "model.n=2", "tolerances.cap=7"])
    result = run(scenario)
    path = tmp_path / "sphere.json"
    result.write(path)
    data = json.loads(path.read_text())
    assert data["status"] == 0
    assert data["command"] == "spectrum"
    assert data["report"]["provenance"] == "analytic"
