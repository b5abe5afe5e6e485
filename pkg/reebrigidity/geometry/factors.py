"""
Positive conformal factors f on a model manifold and their certified extrema.

A factor is described by data (a preset or an expression) so it serializes
into reports; the evaluator is rebuilt from that data. Factors can also be
composed with :meth:`ConformalFactor.scaled`, :meth:`ConformalFactor.reciprocal`
and :meth:`ConformalFactor.ratio`.
"""

import itertools
import logging
import math
import re
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, PrivateAttr, computed_field
from scipy.optimize import minimize

from reebrigidity import config
from reebrigidity.exceptions import EnclosureTooWide, UnknownPreset
from reebrigidity.geometry.classes import Point
from reebrigidity.geometry.models import ChartAxis

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

FACTOR_PRESETS = ("constant", "ellipsoid", "cos-bump", "expression")


class ExpressionFactor(BaseModel):
    model_config = ConfigDict(frozen=True)

    coordinate: str
    kind: Literal["power", "cos", "sin"]
    order: int = 1


class ExpressionTerm(BaseModel):
    model_config = ConfigDict(frozen=True)

    coefficient: float
    factors: tuple[ExpressionFactor, ...] = ()


_FACTOR_RE = re.compile(
    r"^(?:(?P<trig>cos|sin)\((?:(?P<mode>\d+)\*)?(?P<angle>[A-Za-z_]\w*)\)"
    r"|(?P<name>[A-Za-z_]\w*)(?:\^(?P<power>\d+))?)$"
)
_NUMBER_RE = re.compile(r"^\d+(?:\.\d*)?(?:[eE][+-]?\d+)?$|^\.\d+(?:[eE][+-]?\d+)?$")


def _split_terms(text):
    """
    Split at top-level + and - signs, keeping the sign with its term.
    """
    terms, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start:
            if text[i - 1] in "eE" and i >= 2 and text[i - 2].isdigit():
                continue
            terms.append(text[start:i])
            start = i
    terms.append(text[start:])
    return [t for t in terms if t not in ("", "+")]


def parse_expression(text, model):
    """
    Parse a factor expression such as ``1 + 0.2*cos(2*theta) - 0.1*x1^2*sin(y)``.

    ``cos(m*c)`` and ``sin(m*c)`` are Fourier modes of a periodic coordinate c:
    the argument is ``2 pi m (c - lower) / period``, so ``cos(2*theta)`` means
    what it says when theta has period 2 pi. Monomials ``c^k`` are only allowed
    on non-periodic coordinates.

    :return: tuple of :class:`ExpressionTerm`
    """
    axes = {axis.name: axis for axis in model.chart.axes}
    compact = re.sub(r"\s+", "", str(text))
    if not compact:
        raise ValueError("empty factor expression")
    terms = []
    for raw in _split_terms(compact):
        sign = -1.0 if raw.startswith("-") else 1.0
        body = raw.lstrip("+-")
        coefficient = sign
        factors = []
        for token in _split_product(body):
            if _NUMBER_RE.match(token):
                coefficient *= float(token)
                continue
            match = _FACTOR_RE.match(token)
            if match is None:
                raise ValueError(f"cannot read factor term {token!r}")
            if match.group("trig"):
                name = match.group("angle")
                factor = ExpressionFactor(
                    coordinate=name, kind=match.group("trig"), order=int(match.group("mode") or 1)
                )
            else:
                name = match.group("name")
                factor = ExpressionFactor(coordinate=name, kind="power", order=int(match.group("power") or 1))
            if name not in axes:
                raise ValueError(f"unknown coordinate {name!r} for {model.label}")
            if factor.kind == "power" and axes[name].periodic:
                raise ValueError(f"monomial in periodic coordinate {name!r}; use cos/sin modes")
            if factor.kind != "power" and not axes[name].periodic:
                raise ValueError(f"{factor.kind} mode of non-periodic coordinate {name!r}")
            factors.append(factor)
        terms.append(ExpressionTerm(coefficient=coefficient, factors=tuple(factors)))
    return tuple(terms)


def _split_product(body):
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "*" and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    parts.append(body[start:])
    return parts


def _expression_shape(axes, terms):
    index = {axis.name: j for j, axis in enumerate(axes)}

    def shape(x):
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape[:-1])
        for term in terms:
            value = np.full(x.shape[:-1], term.coefficient)
            for factor in term.factors:
                j = index[factor.coordinate]
                c = x[..., j]
                if factor.kind == "power":
                    value = value * c**factor.order
                else:
                    angle = TWO_PI * factor.order * (c - axes[j].lower) / axes[j].period
                    value = value * (np.cos(angle) if factor.kind == "cos" else np.sin(angle))
            total = total + value
        return total

    return shape


def _ellipsoid_shape(weights):
    r2 = np.asarray(weights, dtype=float) ** 2

    def shape(x):
        x = np.asarray(x, dtype=float)
        return 1.0 / np.sum((x[..., 0::2] ** 2 + x[..., 1::2] ** 2) / r2, axis=-1)

    return shape


def _one(x):
    return np.ones(np.asarray(x).shape[:-1])


class ConformalFactor(BaseModel):
    """
    A positive function f rescaling the reference form to f * lambda_0.

    :param name: human readable description
    :param symmetries: symmetry tags of the chart the factor is independent of
    :param scale: constant multiplier applied on top of the shape function
    :param constant: the shape is identically 1
    :param weights: ellipsoid weights for the ``ellipsoid`` preset
    :param terms: parsed expression for ``expression`` and ``cos-bump``
    :param axes: chart axes the expression terms are evaluated against

    Factors built from a preset rebuild their shape on validation, so they
    survive a JSON round trip. Factors composed with :meth:`reciprocal` or
    :meth:`ratio` carry no such data and cannot be evaluated once reloaded.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    symmetries: tuple[str, ...] = ()
    scale: float = 1.0
    constant: bool = False
    weights: Optional[tuple[float, ...]] = None
    terms: Optional[tuple[ExpressionTerm, ...]] = None
    axes: Optional[tuple[ChartAxis, ...]] = None

    _shape = PrivateAttr(default=None)
    _extrema_cache = PrivateAttr(default_factory=dict)

    def __init__(self, shape=None, /, **data):
        super().__init__(**data)
        if shape is not None:
            self._shape = shape
        elif self._shape is None:
            self._shape = _one

    def model_post_init(self, __context):
        if self.constant:
            self._shape = _one
        elif self.weights is not None:
            self._shape = _ellipsoid_shape(self.weights)
        elif self.terms is not None and self.axes is not None:
            self._shape = _expression_shape(self.axes, self.terms)

    def shape_value(self, x):
        if self._shape is None:
            raise ValueError(f"factor {self.name!r} was composed from other factors and has no shape to rebuild")
        return self._shape(x)

    def __call__(self, x):
        return self.scale * self.shape_value(x)

    def is_symmetric_in(self, tag):
        return self.constant or tag in self.symmetries

    def effective_symmetries(self, model):
        """
        The symmetries shared by the model's Reeb flow and the factor.
        """
        if self.constant:
            return frozenset(model.symmetries)
        return frozenset(model.symmetries) & frozenset(self.symmetries)

    def gradient(self, x, h=None):
        h = config.FD_STEP if h is None else h
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        for j in range(x.size):
            e = np.zeros_like(x)
            e[j] = h
            out[j] = (self(x + e) - self(x - e)) / (2.0 * h)
        return out

    def scaled(self, c):
        if c <= 0:
            raise ValueError("conformal factors must stay positive")
        return self.model_copy(update={"scale": self.scale * c, "name": f"{c:g}*{self.name}"})

    def reciprocal(self):
        shape = self.shape_value
        return ConformalFactor(
            lambda x: 1.0 / shape(x),
            name=f"1/({self.name})",
            symmetries=self.symmetries,
            scale=1.0 / self.scale,
            constant=self.constant,
        )

    def ratio(self, other):
        """
        The factor f / g relating g * lambda_0 to f * lambda_0.
        """
        mine, theirs = self.shape_value, other.shape_value
        if self.constant:
            symmetries = other.symmetries
        elif other.constant:
            symmetries = self.symmetries
        else:
            symmetries = tuple(sorted(set(self.symmetries) & set(other.symmetries)))
        return ConformalFactor(
            lambda x: mine(x) / theirs(x),
            name=f"({self.name})/({other.name})",
            symmetries=symmetries,
            scale=self.scale / other.scale,
            constant=self.constant and other.constant,
        )

    def extrema(self, model, grid=None):
        grid = config.FACTOR_GRID if grid is None else grid
        key = (model.label, grid, config.FACTOR_GRID_BUDGET)
        if key not in self._extrema_cache:
            self._extrema_cache[key] = _shape_extrema(model, self, grid)
        return self._extrema_cache[key].model_copy(update={"scale": self.scale})


def constant_factor(value=1.0):
    return ConformalFactor(name="constant" if value == 1.0 else f"constant {value:g}", scale=value, constant=True)


def ellipsoid_factor(weights):
    """
    f(z) = 1 / sum |z_j|^2 / r_j^2 on the unit sphere, so f * lambda_0 is the
    pulled back form of the ellipsoid with radii ``weights``.
    """
    weights = tuple(float(r) for r in weights)
    if any(r <= 0 for r in weights):
        raise ValueError("ellipsoid weights must be positive")
    symmetries = ("phase", "unitary") if len(set(weights)) == 1 else ("phase",)
    return ConformalFactor(
        _ellipsoid_shape(weights),
        name="ellipsoid(" + ",".join(f"{r:g}" for r in weights) + ")",
        symmetries=symmetries,
        weights=weights,
    )


def _free_tags(model, used):
    tags = {axis.tag for axis in model.chart.axes if axis.tag}
    used_tags = {axis.tag for axis in model.chart.axes if axis.name in used}
    return tuple(sorted(tags - used_tags))


def expression_factor(model, expression, name=None):
    terms = parse_expression(expression, model) if isinstance(expression, str) else tuple(expression)
    used = {factor.coordinate for term in terms for factor in term.factors}
    if not used:
        return constant_factor(sum(term.coefficient for term in terms))
    return ConformalFactor(
        _expression_shape(model.chart.axes, terms),
        name=name or str(expression),
        symmetries=_free_tags(model, used),
        terms=terms,
        axes=tuple(model.chart.axes),
    )


def cos_bump_factor(model, coordinate, amplitude, frequency=1):
    """
    f = 1 + A cos(2 pi m c / L) along one periodic coordinate c of period L.
    """
    if not 0 <= amplitude < 1:
        raise ValueError("cos-bump amplitude must lie in [0, 1)")
    terms = (
        ExpressionTerm(coefficient=1.0),
        ExpressionTerm(
            coefficient=float(amplitude),
            factors=(ExpressionFactor(coordinate=coordinate, kind="cos", order=int(frequency)),),
        ),
    )
    return expression_factor(model, terms, name=f"cos-bump({coordinate}, {amplitude:g}, {frequency})")


def build_factor(
    model, preset="constant", value=1.0, weights=None, coordinate=None, amplitude=0.0, frequency=1, expression=None
):
    """
    Construct a factor from a scenario descriptor.

    :param preset: one of :data:`FACTOR_PRESETS`
    """
    if preset == "constant":
        return constant_factor(value)
    if preset == "ellipsoid":
        if weights is None or len(weights) != model.n or model.kind != "Sphere":
            raise ValueError("the ellipsoid preset needs one weight per complex coordinate of a Sphere")
        return ellipsoid_factor(weights)
    if preset == "cos-bump":
        if coordinate is None:
            raise ValueError("the cos-bump preset needs a coordinate")
        return cos_bump_factor(model, coordinate, amplitude, frequency)
    if preset == "expression":
        if not expression:
            raise ValueError("the expression preset needs an expression")
        return expression_factor(model, expression)
    raise UnknownPreset("factor", preset)


class FactorExtrema(BaseModel):
    """
    Grid extrema of a factor polished by L-BFGS-B, with an enclosure widened by
    a sampled Lipschitz bound. Shape values exclude ``scale``; the computed
    fields include it.
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    shape_min: float
    shape_max: float
    shape_min_lower: float
    shape_max_upper: float
    scale: float = 1.0
    argmin: Optional[Point] = None
    argmax: Optional[Point] = None
    grid: int = 0
    lipschitz: float = 0.0

    @computed_field
    @property
    def min(self) -> float:
        return self.scale * self.shape_min

    @computed_field
    @property
    def max(self) -> float:
        return self.scale * self.shape_max

    @computed_field
    @property
    def min_lower(self) -> float:
        return self.scale * self.shape_min_lower

    @computed_field
    @property
    def max_upper(self) -> float:
        return self.scale * self.shape_max_upper

    @computed_field
    @property
    def ratio(self) -> float:
        return self.shape_max / self.shape_min

    @computed_field
    @property
    def ratio_enclosed(self) -> float:
        if self.shape_min_lower <= 0:
            return math.inf
        return self.shape_max_upper / self.shape_min_lower

    @property
    def half_width(self):
        return math.log(self.ratio_enclosed) - math.log(self.ratio)


def _shape_extrema(model, factor, grid):
    axes = model.parameter_axes()
    anchors = np.array([axis.anchor for axis in axes])
    if factor.constant:
        p = model.point(model.from_parameters(anchors))
        return FactorExtrema(
            shape_min=1.0, shape_max=1.0, shape_min_lower=1.0, shape_max_upper=1.0, argmin=p, argmax=p
        )

    free = [j for j, axis in enumerate(axes) if not factor.is_symmetric_in(axis.tag)]
    d = len(free)
    per_axis = max(2, min(grid, int(config.FACTOR_GRID_BUDGET ** (1.0 / d)))) if d else 1
    grids = [axes[j].grid(per_axis) for j in free]
    logger.debug("extrema of %s on %s: %d free axes, %d nodes each", factor.name, model.label, d, per_axis)

    def to_point(free_values):
        params = anchors.copy()
        params[free] = free_values
        return model.from_parameters(params)

    nodes = np.array(list(itertools.product(*grids))) if d else np.zeros((1, 0))
    values = factor.shape_value(np.array([to_point(v) for v in nodes]))
    if not np.all(np.isfinite(values)) or values.min() <= 0:
        raise ValueError(f"conformal factor {factor.name} is not positive on {model.label}")

    steps = np.array([g[1] - g[0] for g in grids]) if d else np.zeros(0)
    lipschitz = 0.0
    if d:
        table = values.reshape([per_axis] * d)
        slopes = []
        for axis_index, j in enumerate(free):
            if axes[j].periodic:
                diff = np.roll(table, -1, axis=axis_index) - table
            else:
                diff = np.diff(table, axis=axis_index)
            slopes.append(np.abs(diff).max() / steps[axis_index])
        lipschitz = float(np.sqrt(np.sum(np.square(slopes))))
    half_width = lipschitz * 0.5 * float(np.sqrt(np.sum(steps**2)))

    i_min, i_max = int(np.argmin(values)), int(np.argmax(values))
    best_min, best_max = nodes[i_min], nodes[i_max]
    shape_min, shape_max = float(values[i_min]), float(values[i_max])
    if d:
        bounds = [(axes[j].lower, axes[j].upper) for j in free]
        for sign, start in ((1.0, best_min), (-1.0, best_max)):
            result = minimize(
                lambda v: sign * float(factor.shape_value(to_point(v))),
                start,
                method="L-BFGS-B",
                bounds=bounds,
            )
            value = sign * float(result.fun)
            if sign > 0 and value < shape_min:
                shape_min, best_min = value, result.x
            elif sign < 0 and value > shape_max:
                shape_max, best_max = value, result.x

    grid_min, grid_max = float(values.min()), float(values.max())
    return FactorExtrema(
        shape_min=shape_min,
        shape_max=shape_max,
        shape_min_lower=max(min(shape_min, grid_min - half_width), 0.0),
        shape_max_upper=max(shape_max, grid_max + half_width),
        argmin=model.point(to_point(best_min)),
        argmax=model.point(to_point(best_max)),
        grid=per_axis,
        lipschitz=lipschitz,
    )


def conformal_distance(model, factor, grid=None, margin=None):
    """
    ln(max f / min f), the distance between the rescaled and the reference form.

    :param margin: when given, the enclosure half width must stay below it
    :return: (distance, enclosure half width)
    """
    extrema = factor.extrema(model, grid)
    distance = math.log(extrema.ratio)
    half_width = extrema.half_width
    if margin is not None and half_width >= margin:
        raise EnclosureTooWide("conformal distance", half_width, margin)
    return distance, half_width


def form_distance(model, first, second, grid=None):
    """
    Distance between first * lambda_0 and second * lambda_0.
    """
    return conformal_distance(model, first.ratio(second), grid)[0]
