"""
Scenario files: one declarative run per file.

A scenario is key-value text grouped under ``[section]`` headers::

    [scenario]
    command = certify
    class = (1,0,0)
    period = 1

    [model]
    kind = Torus3
    k = 2

    [factor]
    preset = cos-bump
    coordinate = theta
    amplitude = 0.2

    [theorem]
    id = persist

Each section is a class whose attributes are typed fields; reading a value
goes through the field's ``inflate``, so a bad value is reported with its key,
section and line number. :func:`run` executes a parsed scenario and returns a
:class:`ScenarioResult` whose ``status`` is the process exit code.
"""

import logging
import re
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict

from reebrigidity.certify import (
    certify_katok,
    certify_persist,
    certify_prequantization,
    certify_sphere,
    cross_validate,
)
from reebrigidity.constellation import build
from reebrigidity.exceptions import (
    InflateError,
    ReebRigidityException,
    RequiredField,
    ScenarioError,
    UnknownPreset,
)
from reebrigidity.geometry.classes import HomotopyClass
from reebrigidity.geometry.factors import FACTOR_PRESETS, build_factor
from reebrigidity.geometry.models import MODEL_KINDS, build_model
from reebrigidity.plug import analyse, choose_parameters
from reebrigidity.profiles import (
    FineTuningReport,
    NegativeOrbitRecord,
    SandwichReport,
    TuningReport,
    check_finely_tuned,
    check_tuned,
    conformal_sandwich,
    enumerate_negative,
    tuned_hamiltonian,
)
from reebrigidity.properties import (
    ArrayProperty,
    BooleanProperty,
    FloatProperty,
    IntegerProperty,
    Property,
    StringProperty,
)
from reebrigidity.spectrum import SPECTRUM_PRESETS, analytic_spectrum, load_spectrum, numeric_spectrum

logger = logging.getLogger(__name__)

COMMANDS = ("spectrum", "constellation", "certify", "profile", "plug")
THEOREMS = ("sphere", "prequantization", "persist", "katok")
EXIT_VALID, EXIT_INVALID, EXIT_PARSE = 0, 1, 2

_HEADER_RE = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_SETTING_RE = re.compile(r"^([A-Za-z_][\w-]*)\s*[=:]\s*(.*)$")


class Section:
    """
    Common methods for reading the fields of one scenario section.
    """

    __section__ = None

    def __init__(self, **kwargs):
        for name, prop in self.defined_properties().items():
            if kwargs.get(name) is not None:
                setattr(self, name, kwargs[name])
            elif prop.has_default:
                setattr(self, name, prop.default_value())
            else:
                setattr(self, name, None)

    @classmethod
    def defined_properties(cls):
        props = {}
        for baseclass in reversed(cls.__mro__):
            props.update((name, prop) for name, prop in vars(baseclass).items() if isinstance(prop, Property))
        return props

    @classmethod
    def inflate(cls, settings):
        """
        Build the section from raw ``{key: (text, line)}`` settings.

        :raises InflateError: for an unknown key or a value that does not parse
        :raises RequiredField: for a required field that is not set
        """
        props = cls.defined_properties()
        keys = {prop.get_key(name): name for name, prop in props.items()}
        for key, (_, line) in settings.items():
            if key not in keys:
                raise InflateError(key, cls.__section__, "unknown field", line)
        inflated = {}
        for name, prop in props.items():
            key = prop.get_key(name)
            if key in settings:
                text, line = settings[key]
                inflated[name] = prop.inflate(text, line)
            elif prop.required:
                raise RequiredField(key, cls.__section__)
        return cls(**inflated)

    def to_dict(self):
        return {prop.get_key(name): getattr(self, name) for name, prop in self.defined_properties().items()}


class ScenarioSection(Section):
    __section__ = "scenario"

    command = StringProperty(choices=COMMANDS, required=True)
    name = StringProperty()
    output = StringProperty(help_text="report path, relative to the scenario file")
    homotopy_class = StringProperty(key="class", default="e")
    period = FloatProperty()
    window = ArrayProperty(FloatProperty())


class ModelSection(Section):
    __section__ = "model"

    kind = StringProperty(choices=tuple(MODEL_KINDS) + tuple(SPECTRUM_PRESETS) + ("external",), required=True)
    n = IntegerProperty()
    k = IntegerProperty()
    weights = ArrayProperty(FloatProperty())
    spectrum = StringProperty(help_text="spectrum JSON for kind = external")
    length = FloatProperty(default=1.0)
    systole = FloatProperty()
    epsilon = FloatProperty()


class FactorSection(Section):
    __section__ = "factor"

    preset = StringProperty(choices=FACTOR_PRESETS + ("range",), default="constant")
    value = FloatProperty(default=1.0)
    weights = ArrayProperty(FloatProperty())
    coordinate = StringProperty()
    amplitude = FloatProperty(default=0.0)
    frequency = IntegerProperty(default=1)
    expression = StringProperty()
    range = ArrayProperty(FloatProperty(), help_text="min, max of f when no factor can be built")


class TheoremSection(Section):
    __section__ = "theorem"

    id = StringProperty(choices=THEOREMS, required=True)
    filled = BooleanProperty(default=False)
    dim_q = IntegerProperty()
    alpha_order = IntegerProperty(help_text="order of the fibre class; unset for infinite order")
    primitive = BooleanProperty(default=False)
    epsilon = FloatProperty()
    n = IntegerProperty(default=1)
    sample_orbits = BooleanProperty(default=False)
    cross_validate = BooleanProperty(default=False)


class ProfileSection(Section):
    __section__ = "profile"

    a = FloatProperty(required=True)
    b = FloatProperty(required=True)
    c = FloatProperty(required=True)
    kappa = FloatProperty(default=0.0)
    kappa1 = FloatProperty(help_text="shift of a second Hamiltonian for the pair inequalities")
    fine = BooleanProperty(default=False)
    sandwich = BooleanProperty(default=False)


class PlugSection(Section):
    __section__ = "plug"

    c1 = FloatProperty()
    c2 = FloatProperty()
    epsilon = FloatProperty()
    delta = FloatProperty()
    dimension = IntegerProperty(default=3)
    seed = IntegerProperty(default=0)


class TolerancesSection(Section):
    __section__ = "tolerances"

    orbit = FloatProperty()
    cap = FloatProperty()
    seed_grid = IntegerProperty()
    grid = IntegerProperty()


SECTIONS = {
    section.__section__: section
    for section in (
        ScenarioSection,
        ModelSection,
        FactorSection,
        TheoremSection,
        ProfileSection,
        PlugSection,
        TolerancesSection,
    )
}


class Scenario:
    """
    A parsed scenario. Sections absent from the file are ``None``, except
    ``factor`` and ``tolerances`` which fall back to their defaults.
    """

    def __init__(self, sections, source=None):
        self.source = source
        self.scenario = sections["scenario"]
        self.model = sections.get("model")
        self.factor = sections.get("factor") or FactorSection()
        self.theorem = sections.get("theorem")
        self.profile = sections.get("profile")
        self.plug = sections.get("plug")
        self.tolerances = sections.get("tolerances") or TolerancesSection()
        self.validate()

    @property
    def command(self):
        return self.scenario.command

    @property
    def name(self):
        if self.scenario.name:
            return self.scenario.name
        if self.source is not None:
            return Path(self.source).name.split(".")[0]
        return self.command

    @property
    def homotopy_class(self):
        try:
            return HomotopyClass.parse(self.scenario.homotopy_class)
        except ValueError as e:
            raise InflateError("class", "scenario", str(e)) from e

    def validate(self):
        needs = {
            "spectrum": ("model",),
            "constellation": ("model",),
            "certify": ("theorem",),
            "profile": ("model", "profile"),
            "plug": ("plug",),
        }[self.command]
        for section in needs:
            if getattr(self, section) is None:
                raise ScenarioError(f"command {self.command!r} needs a [{section}] section")
        if self.command in ("constellation", "profile") and self.scenario.period is None:
            raise RequiredField("period", "scenario")
        for key, value in self.tolerances.to_dict().items():
            if value is not None and value <= 0:
                raise InflateError(key, "tolerances", "must be positive")
        # resolve the class now so a malformed tuple is a parse error
        self.homotopy_class

    def to_dict(self):
        out = {}
        for name in SECTIONS:
            section = getattr(self, name)
            if section is not None:
                out[name] = section.to_dict()
        return out


def _strip_comment(line):
    for marker in ("#", ";"):
        index = line.find(marker)
        if index == 0 or (index > 0 and line[index - 1].isspace()):
            line = line[:index]
    return line.strip()


def parse_scenario(text, source=None):
    """
    Parse scenario text.

    :raises ScenarioError: on malformed lines, unknown sections or fields and
        values that do not parse
    """
    raw = {}
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(line)
        if not line:
            continue
        header = _HEADER_RE.match(line)
        if header:
            current = header.group(1).lower()
            if current not in SECTIONS:
                raise ScenarioError(f"line {number}: unknown section [{current}]")
            if current in raw:
                raise ScenarioError(f"line {number}: section [{current}] appears twice")
            raw[current] = {}
            continue
        setting = _SETTING_RE.match(line)
        if setting is None:
            raise ScenarioError(f"line {number}: expected 'key = value', got {line!r}")
        if current is None:
            raise ScenarioError(f"line {number}: setting outside of a section")
        key, value = setting.group(1), setting.group(2).strip()
        if key in raw[current]:
            raise InflateError(key, current, "set twice", number)
        raw[current][key] = (value, number)
    if "scenario" not in raw:
        raise RequiredField("command", "scenario")
    sections = {name: SECTIONS[name].inflate(settings) for name, settings in raw.items()}
    return Scenario(sections, source)


def load_scenario(path):
    path = Path(path)
    return parse_scenario(path.read_text(), source=path)


def scenario_from_settings(command, settings):
    """
    Build a scenario from ``section.key=value`` strings, as given on the
    command line.
    """
    raw = {"scenario": {"command": (command, None)}}
    for index, token in enumerate(settings, start=1):
        head, sep, value = token.partition("=")
        section, dot, key = head.strip().partition(".")
        if not sep or not dot:
            raise ScenarioError(f"argument {index}: expected section.key=value, got {token!r}")
        if section not in SECTIONS:
            raise ScenarioError(f"argument {index}: unknown section [{section}]")
        raw.setdefault(section, {})[key] = (value.strip(), None)
    sections = {name: SECTIONS[name].inflate(values) for name, values in raw.items()}
    return Scenario(sections)


class ProfileRunReport(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    a: float
    b: float
    c: float
    kappa: float
    threshold: float
    records: tuple[NegativeOrbitRecord, ...]
    tuned: Optional[TuningReport] = None
    fine: Optional[FineTuningReport] = None
    sandwich: Optional[SandwichReport] = None

    @property
    def holds(self):
        return all(report is None or report.holds for report in (self.tuned, self.fine))


class ScenarioResult(BaseModel):
    """
    :param status: 0 when every certificate is valid and no cross validation
        failed, 1 for invalid results or numeric failures, 2 for scenario
        errors
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    name: str
    command: str
    status: int
    settings: dict[str, dict[str, Any]] = {}
    report: Any = None
    error: Optional[str] = None

    def write(self, path):
        Path(path).write_text(self.model_dump_json(indent=2) + "\n")


def _built(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ReebRigidityException:
        raise
    except (TypeError, ValueError) as e:
        raise ScenarioError(str(e)) from e


def _model(scenario):
    """
    The catalog model and its reference spectrum; the model is ``None`` for
    spectrum presets and external spectra.
    """
    section, cap = scenario.model, scenario.tolerances.cap
    if section.kind in MODEL_KINDS:
        model = _built(build_model, section.kind, n=section.n, k=section.k, weights=section.weights)
        return model, _built(analytic_spectrum, model, cap)
    if section.kind == "negative-curvature":
        return None, _built(SPECTRUM_PRESETS[section.kind], section.length, section.systole, cap)
    if section.kind == "katok":
        return None, _built(SPECTRUM_PRESETS[section.kind], section.epsilon, section.n or 1, cap)
    if section.kind == "external":
        if not section.spectrum:
            raise RequiredField("spectrum", "model")
        path = Path(section.spectrum)
        if scenario.source is not None and not path.is_absolute():
            path = Path(scenario.source).parent / path
        return None, _built(load_spectrum, path)
    raise UnknownPreset("model", section.kind)


def _factor(scenario, model):
    """
    A live conformal factor, or a (min, max) pair when no model is at hand.
    """
    section = scenario.factor
    if section.preset == "range":
        if section.range is None or len(section.range) != 2:
            raise InflateError("range", "factor", "expected two values: min, max")
        return tuple(section.range)
    if model is None:
        if section.preset != "constant":
            raise ScenarioError(f"factor preset {section.preset!r} needs a catalog model")
        return (section.value, section.value)
    return _built(
        build_factor,
        model,
        section.preset,
        value=section.value,
        weights=section.weights,
        coordinate=section.coordinate,
        amplitude=section.amplitude,
        frequency=section.frequency,
        expression=section.expression,
    )


def _is_constant(factor):
    return isinstance(factor, tuple) or getattr(factor, "constant", False)


def _run_spectrum(scenario):
    model, spec = _model(scenario)
    factor = _factor(scenario, model)
    if model is None or _is_constant(factor):
        if isinstance(factor, tuple) and factor[0] != factor[1]:
            raise ScenarioError("a factor range only rescales a spectrum when min = max")
        scale = factor[0] if isinstance(factor, tuple) else factor.scale
        return spec if scale == 1.0 else spec.scaled(scale), EXIT_VALID
    window = scenario.scenario.window or (0.0, spec.cap)
    if len(window) != 2:
        raise InflateError("window", "scenario", "expected two values: lower, upper")
    tol = scenario.tolerances
    numeric = numeric_spectrum(model, factor, scenario.homotopy_class, window, tol.seed_grid, tol.orbit)
    return numeric, EXIT_VALID


def _run_constellation(scenario):
    model, spec = _model(scenario)
    constellation = build(model, scenario.homotopy_class, scenario.scenario.period, spec)
    return constellation, EXIT_VALID if constellation.rigid else EXIT_INVALID


def _certificate(scenario, filled):
    theorem = scenario.theorem
    filled = filled or theorem.filled
    if theorem.id == "katok":
        if theorem.epsilon is None:
            raise RequiredField("epsilon", "theorem")
        return certify_katok(theorem.epsilon, _factor(scenario, None), theorem.n)
    if theorem.id == "prequantization":
        model = None
        if scenario.model is not None:
            model, _ = _model(scenario)
        return certify_prequantization(
            theorem.dim_q,
            theorem.alpha_order,
            _factor(scenario, model),
            model=model,
            primitive=theorem.primitive,
            filled=filled,
        )
    if scenario.model is None:
        raise ScenarioError(f"theorem {theorem.id!r} needs a [model] section")
    model, spec = _model(scenario)
    factor = _factor(scenario, model)
    if theorem.id == "sphere":
        return certify_sphere(model, factor)
    if scenario.scenario.period is None:
        raise RequiredField("period", "scenario")
    return certify_persist(
        model,
        scenario.homotopy_class,
        scenario.scenario.period,
        factor,
        spec=spec,
        filled=filled,
        sample_orbits=theorem.sample_orbits,
    )


def _run_certify(scenario, filled=False):
    certificate = _certificate(scenario, filled)
    if scenario.theorem.cross_validate:
        tol = scenario.tolerances
        certificate = certificate.with_cross_validation(cross_validate(certificate, tol.seed_grid, tol.orbit))
    failed = certificate.cross_validation is not None and certificate.cross_validation.verdict == "fail"
    return certificate, EXIT_VALID if certificate.valid and not failed else EXIT_INVALID


def _run_profile(scenario):
    model, spec = _model(scenario)
    section, period = scenario.profile, scenario.scenario.period
    cls = scenario.homotopy_class
    H0 = _built(tuned_hamiltonian, section.a, section.b, section.c, section.kappa)
    H1 = None if section.kappa1 is None else _built(tuned_hamiltonian, section.a, section.b, section.c, section.kappa1)
    records = enumerate_negative(H0, spec)
    constellation = build(model, cls, period, spec)
    tuned = check_tuned(H0, constellation)
    fine = check_finely_tuned(H0, spec, constellation, H1) if section.fine else None
    sandwich = None
    if section.sandwich:
        factor = _factor(scenario, model)
        if model is None or isinstance(factor, tuple):
            raise ScenarioError("the sandwich needs a catalog model and a factor preset")
        tol = scenario.tolerances
        window = (0.5 * constellation.t_min_alpha, section.b)
        lam_spec = numeric_spectrum(model, factor, cls, window, tol.seed_grid, tol.orbit)
        sandwich = conformal_sandwich(model, factor, H0.profile, constellation, lam_spec, cls)
    report = ProfileRunReport(
        a=section.a,
        b=section.b,
        c=section.c,
        kappa=section.kappa,
        threshold=H0.threshold,
        records=tuple(records),
        tuned=tuned,
        fine=fine,
        sandwich=sandwich,
    )
    return report, EXIT_VALID if report.holds else EXIT_INVALID


def _run_plug(scenario):
    section, grid = scenario.plug, scenario.tolerances.grid
    if section.c1 is not None or section.c2 is not None:
        if section.c1 is None or section.c2 is None:
            raise RequiredField("c2" if section.c2 is None else "c1", "plug")
        report = choose_parameters(section.c1, section.c2, section.dimension, grid, section.seed)
        return report, EXIT_VALID if report.certificate.valid else EXIT_INVALID
    for key in ("epsilon", "delta"):
        if getattr(section, key) is None:
            raise RequiredField(key, "plug")
    report = _built(analyse, section.epsilon, section.delta, section.dimension, grid, section.seed)
    return report, EXIT_VALID


def run(scenario, filled=False):
    """
    Execute a scenario. Numeric failures are reported in the result with
    status 1; scenario errors found while building the model or factor give
    status 2.

    :param filled: use the exact filling bounds for the persistence and
        prequantization theorems
    """
    settings = scenario.to_dict()
    base = {"name": scenario.name, "command": scenario.command, "settings": settings}
    try:
        if scenario.command == "certify":
            report, status = _run_certify(scenario, filled)
        else:
            runner = {
                "spectrum": _run_spectrum,
                "constellation": _run_constellation,
                "profile": _run_profile,
                "plug": _run_plug,
            }[scenario.command]
            report, status = runner(scenario)
    except ScenarioError as e:
        logger.error("scenario %s: %s", scenario.name, e)
        return ScenarioResult(status=EXIT_PARSE, error=str(e), **base)
    except ReebRigidityException as e:
        logger.error("scenario %s failed: %s: %s", scenario.name, type(e).__name__, e)
        return ScenarioResult(status=EXIT_INVALID, error=f"{type(e).__name__}: {e}", **base)
    logger.info("scenario %s: %s finished with status %d", scenario.name, scenario.command, status)
    return ScenarioResult(status=status, report=report, **base)


def report_path(scenario, out=None):
    """
    Where the report of ``scenario`` goes: ``out`` (a directory) wins, then the
    scenario's own ``output``, then ``<name>.json`` next to the scenario file.
    """
    filename = f"{scenario.name}.json"
    if out is not None:
        return Path(out) / filename
    if scenario.scenario.output:
        path = Path(scenario.scenario.output)
        if scenario.source is not None and not path.is_absolute():
            path = Path(scenario.source).parent / path
        return path
    if scenario.source is not None:
        return Path(scenario.source).parent / filename
    return None
