"""
The catalog of explicit contact manifolds.

Each model carries one chart, its reference contact form and Reeb field in
closed form, the integer arithmetic of its free homotopy classes, and the
analytic enumeration of its closed Reeb orbits.
"""

import itertools
import logging
import math
from fractions import Fraction
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator
from scipy.linalg import null_space

from reebrigidity.exceptions import ChartError, PoleLocusError
from reebrigidity.geometry.classes import FamilyTopology, HomotopyClass, Point
from reebrigidity.util import wrap

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class ChartAxis(BaseModel):
    name: str
    lower: float
    upper: float
    periodic: bool = False
    tag: str = ""

    @property
    def period(self):
        return self.upper - self.lower if self.periodic else 0.0


class Chart(BaseModel):
    id: str
    axes: list[ChartAxis]
    constraint: Optional[str] = None
    excluded: list[str] = []


class ParameterAxis(BaseModel):
    """
    One coordinate of the parameter box that sweeps a model, used for factor
    extrema and for scan seeds. Axes whose ``tag`` is a symmetry of the
    problem are frozen at ``anchor``.
    """

    name: str
    lower: float
    upper: float
    periodic: bool = False
    tag: str
    anchor: float = 0.0

    def grid(self, count):
        if count <= 1:
            return np.array([self.anchor])
        if self.periodic:
            return self.lower + (self.upper - self.lower) * np.arange(count) / count
        return np.linspace(self.lower, self.upper, count)


class FamilyDescriptor(BaseModel):
    """
    :param morse_bott_dim: dimension of the family of unparameterized orbits,
        i.e. the expected Floquet nullity; derived from ``topology`` when unset
    """

    model_config = ConfigDict(frozen=True)

    topology: FamilyTopology
    label: str
    representative: Optional[Point] = None
    morse_bott_dim: Optional[int] = None

    @property
    def nullity(self):
        if self.morse_bott_dim is not None:
            return self.morse_bott_dim
        if self.topology.kind == "projective":
            return 2 * self.topology.dim
        return self.topology.dim


class AnalyticFamily(BaseModel):
    period: float
    homotopy_class: HomotopyClass
    family: FamilyDescriptor
    cover: int = 1


def _hyperspherical(angles):
    """
    Unit vector in R^(d+1) from d hyperspherical angles.
    """
    angles = np.asarray(angles, dtype=float)
    out = np.ones(len(angles) + 1)
    for i, a in enumerate(angles):
        out[i] *= math.cos(a)
        out[i + 1 :] *= math.sin(a)
    return out


def _primitive_directions(radius):
    r = int(math.floor(radius))
    for m, n in itertools.product(range(-r, r + 1), repeat=2):
        if (m, n) != (0, 0) and math.gcd(abs(m), abs(n)) == 1 and math.hypot(m, n) <= radius:
            yield m, n


def _planar_conformal_reeb(model, factor, x, rate):
    """
    For f independent of the angle coordinate, the Reeb field of
    f (cos(r a) dx + sin(r a) dy) with r = rate is
    (cos/f, sin/f, (f_y cos - f_x sin) / (r f^2)).
    """
    x = np.asarray(x, dtype=float)
    h = 1e-6
    f = float(factor(x))
    grad = np.empty(2)
    for j in range(2):
        e = np.zeros(3)
        e[j] = h
        grad[j] = (float(factor(x + e)) - float(factor(x - e))) / (2.0 * h)
    c, s = math.cos(rate * x[2]), math.sin(rate * x[2])
    return np.array([c / f, s / f, (grad[1] * c - grad[0] * s) / (rate * f * f)])


class ModelManifold(BaseModel):
    """
    Base class of the catalog. Coordinates are the ambient chart coordinates;
    models that live on a constraint surface (the unit sphere, the unit
    cosphere) work in the ambient space and project with :meth:`normalize`.
    """

    model_config = ConfigDict(frozen=True)

    kind: str

    @property
    def n(self):
        raise NotImplementedError("Specialize n")

    @computed_field
    @property
    def dim(self) -> int:
        return 2 * self.n - 1

    @computed_field
    @property
    def label(self) -> str:
        return self.kind

    @property
    def chart(self) -> Chart:
        raise NotImplementedError("Specialize chart")

    @property
    def ambient_dim(self):
        return len(self.chart.axes)

    @property
    def coordinate_names(self):
        return [axis.name for axis in self.chart.axes]

    @property
    def periods(self):
        return np.array([axis.period for axis in self.chart.axes])

    @property
    def symmetries(self) -> frozenset:
        return frozenset()

    @property
    def constrained(self):
        return self.chart.constraint is not None

    def point(self, coords):
        return Point.from_array(self.chart.id, coords)

    def coords_of(self, p):
        """
        Accept a :class:`Point` or an array and return the coordinate array,
        checking the chart id of points.
        """
        if isinstance(p, Point):
            if p.chart != self.chart.id:
                raise ChartError(p.chart, p.coords, f"expected chart '{self.chart.id}'")
            return p.array
        return np.asarray(p, dtype=float)

    def contact_form(self, x):
        raise NotImplementedError("Specialize contact_form")

    def reeb(self, x):
        raise NotImplementedError("Specialize reeb")

    def tangent_frame(self, x):
        return np.eye(self.ambient_dim)

    def normalize(self, x):
        x = np.array(x, dtype=float)
        for j, axis in enumerate(self.chart.axes):
            if axis.periodic:
                x[j] = axis.lower + np.mod(x[j] - axis.lower, axis.period)
        return x

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.ambient_dim,) or not np.all(np.isfinite(x)):
            raise ChartError(self.chart.id, np.atleast_1d(x), "wrong shape or non-finite")
        for j, axis in enumerate(self.chart.axes):
            if not axis.periodic and not (axis.lower - 1e-12 <= x[j] <= axis.upper + 1e-12):
                raise ChartError(self.chart.id, x, f"{axis.name} outside [{axis.lower}, {axis.upper}]")
        return x

    def check_stencil(self, x, h):
        pass

    def chart_events(self):
        return []

    def wrap_difference(self, d):
        d = np.array(d, dtype=float)
        for j, axis in enumerate(self.chart.axes):
            if axis.periodic:
                d[j] = wrap(d[j], axis.period)
        return d

    def class_of(self, displacement) -> HomotopyClass:
        return HomotopyClass.trivial()

    def parameter_axes(self) -> list:
        raise NotImplementedError("Specialize parameter_axes")

    def seed_axes(self):
        return self.parameter_axes()

    def frozen_tags(self, symmetries):
        """
        Parameter tags that a flow with these symmetries does not need seeded.
        """
        return frozenset(symmetries)

    def from_parameters(self, params):
        raise NotImplementedError("Specialize from_parameters")

    def random_points(self, count, seed=0):
        rng = np.random.default_rng(seed)
        axes = self.parameter_axes()
        lo = np.array([a.lower for a in axes])
        hi = np.array([a.upper for a in axes])
        return np.array([self.from_parameters(rng.uniform(lo, hi)) for _ in range(count)])

    def family_topology(self, d, x=None) -> FamilyTopology:
        if d <= 0:
            return FamilyTopology.point()
        if d == 1:
            return FamilyTopology.circle()
        return FamilyTopology.torus(d)

    def reduce_image(self, points, symmetries):
        """
        Quotient orbit images by the coordinates the problem is symmetric in,
        embedding the remaining periodic coordinates as (cos, sin) pairs.
        """
        points = np.atleast_2d(points)
        columns = []
        for j, axis in enumerate(self.chart.axes):
            if axis.tag in symmetries:
                continue
            if axis.periodic:
                angle = TWO_PI * (points[:, j] - axis.lower) / axis.period
                columns.extend([np.cos(angle), np.sin(angle)])
            else:
                columns.append(points[:, j])
        if not columns:
            return np.zeros((points.shape[0], 0))
        return np.column_stack(columns)

    def analytic_families(self, cap) -> list:
        raise NotImplementedError("Specialize analytic_families")

    def has_conformal_reeb(self, factor):
        return False

    def conformal_reeb(self, factor, x):
        """
        Closed form Reeb field of factor * lambda_0 at x, or ``None`` when the
        model has none for this factor.
        """
        return None

    def resonances(self, cap) -> list:
        return []


class _UnitSphereModel(ModelManifold):
    """
    Interleaved real coordinates (x1, y1, ..., xn, yn) of C^n with
    z_j = x_j + i y_j, constrained to |z| = 1.
    """

    @property
    def chart(self):
        axes = []
        for j in range(1, self.n + 1):
            axes.append(ChartAxis(name=f"x{j}", lower=-1.0, upper=1.0))
            axes.append(ChartAxis(name=f"y{j}", lower=-1.0, upper=1.0))
        return Chart(id="C^n", axes=axes, constraint="|z| = 1")

    def normalize(self, x):
        x = np.asarray(x, dtype=float)
        return x / np.linalg.norm(x)

    def check_point(self, x):
        x = super().check_point(x)
        if abs(np.linalg.norm(x) - 1.0) > 1e-6:
            raise ChartError(self.chart.id, x, "point is off the unit sphere")
        return x

    def tangent_frame(self, x):
        return null_space(np.asarray(x, dtype=float)[None, :])

    def standard_form(self, x):
        """
        lambda_0 = 1/2 sum (x dy - y dx) as a covector.
        """
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        out[0::2] = -0.5 * x[1::2]
        out[1::2] = 0.5 * x[0::2]
        return out

    def parameter_axes(self):
        axes = [
            ParameterAxis(name=f"eta{j}", lower=0.0, upper=0.5 * math.pi, tag="amplitude")
            for j in range(1, self.n)
        ]
        axes += [
            ParameterAxis(name=f"phi{j}", lower=0.0, upper=TWO_PI, periodic=True, tag="phase")
            for j in range(1, self.n + 1)
        ]
        return axes

    def from_parameters(self, params):
        params = np.asarray(params, dtype=float)
        amplitudes = _hyperspherical(params[: self.n - 1])
        phases = params[self.n - 1 :]
        x = np.empty(2 * self.n)
        x[0::2] = amplitudes * np.cos(phases)
        x[1::2] = amplitudes * np.sin(phases)
        return x

    def random_points(self, count, seed=0):
        rng = np.random.default_rng(seed)
        raw = rng.normal(size=(count, 2 * self.n))
        return raw / np.linalg.norm(raw, axis=1)[:, None]

    def frozen_tags(self, symmetries):
        # the unitary group is transitive on the sphere
        if "unitary" in symmetries:
            return frozenset(symmetries) | {"amplitude", "phase"}
        return frozenset(symmetries)

    def family_topology(self, d, x=None):
        if d >= 2 and d % 2 == 0:
            return FamilyTopology.projective(d // 2)
        return super().family_topology(d, x)

    def reduce_image(self, points, symmetries):
        points = np.atleast_2d(points)
        if "unitary" in symmetries:
            return np.zeros((points.shape[0], 0))
        if "phase" in symmetries:
            return np.hypot(points[:, 0::2], points[:, 1::2])
        return points


class Sphere(_UnitSphereModel):
    """
    The round sphere S^(2n-1) with the standard form; every Reeb orbit is a
    Hopf circle of period pi.
    """

    kind: Literal["Sphere"] = "Sphere"
    n_: int = Field(alias="n", ge=2)

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @property
    def n(self):
        return self.n_

    @computed_field
    @property
    def label(self) -> str:
        return f"Sphere({self.n})"

    @property
    def symmetries(self):
        return frozenset({"unitary", "phase"})

    def contact_form(self, x):
        return self.standard_form(x)

    def reeb(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        out[0::2] = -2.0 * x[1::2]
        out[1::2] = 2.0 * x[0::2]
        return out

    def has_conformal_reeb(self, factor):
        return factor.weights is not None and len(factor.weights) == self.n

    def conformal_reeb(self, factor, x):
        # the ellipsoid factor turns lambda_0 into the ellipsoid form
        if not self.has_conformal_reeb(factor):
            return None
        x = np.asarray(x, dtype=float)
        speed = 2.0 / (np.asarray(factor.weights) ** 2 * factor.scale)
        out = np.empty_like(x)
        out[0::2] = -speed * x[1::2]
        out[1::2] = speed * x[0::2]
        return out

    def analytic_families(self, cap):
        e1 = np.zeros(2 * self.n)
        e1[0] = 1.0
        family = FamilyDescriptor(
            topology=FamilyTopology.projective(self.n - 1),
            label="hopf",
            representative=self.point(e1),
        )
        count = int(math.floor(cap / math.pi + 1e-12))
        return [
            AnalyticFamily(period=k * math.pi, homotopy_class=HomotopyClass.trivial(), family=family, cover=k)
            for k in range(1, count + 1)
        ]


class Ellipsoid(_UnitSphereModel):
    """
    The unit sphere with the form f_r * lambda_0, f_r = 1 / sum |z_j|^2 / r_j^2,
    which is the standard form of the ellipsoid E(r) pulled back radially.
    """

    kind: Literal["Ellipsoid"] = "Ellipsoid"
    weights: tuple[float, ...]

    @field_validator("weights")
    @classmethod
    def _check_weights(cls, value):
        if len(value) < 2:
            raise ValueError("an ellipsoid needs at least two weights")
        if any(r <= 0 for r in value):
            raise ValueError("ellipsoid weights must be positive")
        if any(b < a for a, b in zip(value, value[1:])):
            raise ValueError("ellipsoid weights must be sorted increasingly")
        return tuple(float(r) for r in value)

    @property
    def n(self):
        return len(self.weights)

    @computed_field
    @property
    def label(self) -> str:
        return "Ellipsoid(" + ",".join(f"{r:g}" for r in self.weights) + ")"

    @property
    def symmetries(self):
        if len(set(self.weights)) == 1:
            return frozenset({"unitary", "phase"})
        return frozenset({"phase"})

    def weight_factor(self, x):
        x = np.asarray(x, dtype=float)
        r2 = np.asarray(self.weights) ** 2
        return 1.0 / np.sum((x[0::2] ** 2 + x[1::2] ** 2) / r2)

    def contact_form(self, x):
        return self.weight_factor(x) * self.standard_form(x)

    def reeb(self, x):
        x = np.asarray(x, dtype=float)
        speed = 2.0 / np.asarray(self.weights) ** 2
        out = np.empty_like(x)
        out[0::2] = -speed * x[1::2]
        out[1::2] = speed * x[0::2]
        return out

    def weight_groups(self):
        groups = []
        for j, r in enumerate(self.weights):
            if groups and abs(self.weights[groups[-1][0]] - r) < 1e-12:
                groups[-1].append(j)
            else:
                groups.append([j])
        return groups

    def analytic_families(self, cap):
        out = []
        for group in self.weight_groups():
            r = self.weights[group[0]]
            base = math.pi * r * r
            e = np.zeros(2 * self.n)
            e[2 * group[0]] = 1.0
            family = FamilyDescriptor(
                topology=FamilyTopology.projective(len(group) - 1),
                label="gamma_" + ",".join(str(j + 1) for j in group),
                representative=self.point(e),
            )
            count = int(math.floor(cap / base + 1e-12))
            out.extend(
                AnalyticFamily(period=k * base, homotopy_class=HomotopyClass.trivial(), family=family, cover=k)
                for k in range(1, count + 1)
            )
        out.sort(key=lambda fam: (fam.period, fam.family.label))
        return out

    def resonances(self, cap):
        notes = []
        for i, j in itertools.combinations(range(self.n), 2):
            ratio = (self.weights[i] / self.weights[j]) ** 2
            frac = Fraction(ratio).limit_denominator(1000)
            if abs(float(frac) - ratio) > 1e-12:
                continue
            common = frac.denominator * math.pi * self.weights[i] ** 2
            if frac == 1:
                notes.append(
                    f"weights r{i + 1} = r{j + 1}: the planes merge into one projective family"
                )
            elif common <= cap:
                notes.append(
                    f"weights r{i + 1}, r{j + 1} are resonant: extra invariant tori close up at "
                    f"period {common:.12g}, not enumerated"
                )
        for note in notes:
            logger.warning("%s: %s", self.label, note)
        return notes


class Torus3(ModelManifold):
    """
    T^3 with lambda_k = cos(k theta) dx + sin(k theta) dy; x and y have period
    1 and theta has period 2 pi.
    """

    kind: Literal["Torus3"] = "Torus3"
    k: int = Field(ge=1)

    @property
    def n(self):
        return 2

    @computed_field
    @property
    def label(self) -> str:
        return f"Torus3({self.k})"

    @property
    def chart(self):
        return Chart(
            id="T^3",
            axes=[
                ChartAxis(name="x", lower=0.0, upper=1.0, periodic=True, tag="x"),
                ChartAxis(name="y", lower=0.0, upper=1.0, periodic=True, tag="y"),
                ChartAxis(name="theta", lower=0.0, upper=TWO_PI, periodic=True, tag="theta"),
            ],
        )

    @property
    def symmetries(self):
        return frozenset({"x", "y"})

    def contact_form(self, x):
        theta = self.k * np.asarray(x, dtype=float)[2]
        return np.array([math.cos(theta), math.sin(theta), 0.0])

    def reeb(self, x):
        return self.contact_form(x)

    def has_conformal_reeb(self, factor):
        return factor.is_symmetric_in("theta")

    def conformal_reeb(self, factor, x):
        if not self.has_conformal_reeb(factor):
            return None
        return _planar_conformal_reeb(self, factor, x, float(self.k))

    def class_of(self, displacement):
        d = np.asarray(displacement, dtype=float)
        return HomotopyClass(
            components=(int(round(d[0])), int(round(d[1])), int(round(d[2] / TWO_PI)))
        )

    def parameter_axes(self):
        return [
            ParameterAxis(name=axis.name, lower=axis.lower, upper=axis.upper, periodic=True, tag=axis.tag)
            for axis in self.chart.axes
        ]

    def from_parameters(self, params):
        return np.asarray(params, dtype=float).copy()

    def analytic_families(self, cap):
        out = []
        for m, n in _primitive_directions(cap):
            length = math.hypot(m, n)
            base_angle = math.atan2(n, m)
            for i in range(self.k):
                theta = math.fmod((base_angle + TWO_PI * i) / self.k, TWO_PI)
                if theta < 0:
                    theta += TWO_PI
                family = FamilyDescriptor(
                    topology=FamilyTopology.circle(),
                    label=f"({m},{n}) theta_{i}",
                    representative=self.point([0.0, 0.0, theta]),
                )
                g = 1
                while g * length <= cap + 1e-12:
                    out.append(
                        AnalyticFamily(
                            period=g * length,
                            homotopy_class=HomotopyClass(components=(g * m, g * n, 0)),
                            family=family,
                            cover=g,
                        )
                    )
                    g += 1
        return out


class _CutModel(ModelManifold):
    """
    The chart (x, y, t) of T^2 x [0, 2 pi] before the circles over t = 0 and
    t = 2 pi are collapsed. x and y have period 2 pi; the form is
    cos(s t) dx + sin(s t) dy away from the pole fibres.
    """

    k: int = Field(ge=1)

    @property
    def n(self):
        return 2

    @property
    def rate(self):
        raise NotImplementedError("Specialize rate")

    @property
    def chart(self):
        return Chart(
            id="T^2x[0,2pi]",
            axes=[
                ChartAxis(name="x", lower=0.0, upper=TWO_PI, periodic=True, tag="x"),
                ChartAxis(name="y", lower=0.0, upper=TWO_PI, periodic=True, tag="y"),
                ChartAxis(name="t", lower=0.0, upper=TWO_PI, tag="t"),
            ],
            excluded=["t = 0", "t = 2pi"],
        )

    @property
    def symmetries(self):
        return frozenset({"x", "y"})

    def is_pole(self, x, tol=1e-12):
        t = float(np.asarray(x, dtype=float)[2])
        return t < tol or abs(t - TWO_PI) < tol

    def contact_form(self, x):
        t = self.rate * np.asarray(x, dtype=float)[2]
        return np.array([math.cos(t), math.sin(t), 0.0])

    def reeb(self, x):
        return self.contact_form(x)

    def has_conformal_reeb(self, factor):
        return factor.is_symmetric_in("t")

    def conformal_reeb(self, factor, x):
        if not self.has_conformal_reeb(factor):
            return None
        return _planar_conformal_reeb(self, factor, x, self.rate)

    def check_stencil(self, x, h):
        t = float(np.asarray(x, dtype=float)[2])
        if t - h < 0.0 or t + h > TWO_PI:
            raise PoleLocusError(self.chart.id, x, "finite difference stencil crosses a pole fibre")

    def chart_events(self):
        def below(_, y):
            return y[2] + 1e-9

        def above(_, y):
            return TWO_PI + 1e-9 - y[2]

        below.terminal = True
        above.terminal = True
        return [below, above]

    def parameter_axes(self):
        return [
            ParameterAxis(name="x", lower=0.0, upper=TWO_PI, periodic=True, tag="x"),
            ParameterAxis(name="y", lower=0.0, upper=TWO_PI, periodic=True, tag="y"),
            ParameterAxis(name="t", lower=0.0, upper=TWO_PI, tag="t", anchor=math.pi),
        ]

    def seed_axes(self):
        axes = self.parameter_axes()
        margin = 1e-3
        axes[2] = ParameterAxis(name="t", lower=margin, upper=TWO_PI - margin, tag="t", anchor=math.pi)
        return axes

    def from_parameters(self, params):
        return np.asarray(params, dtype=float).copy()

    def random_points(self, count, seed=0):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(0.0, TWO_PI, size=(count, 3))
        pts[:, 2] = rng.uniform(0.1, TWO_PI - 0.1, size=count)
        return pts

    def family_topology(self, d, x=None):
        if x is not None and self.is_pole(x, tol=1e-9):
            return FamilyTopology.point()
        return super().family_topology(d, x)

    def direction_class(self, m, n, g):
        raise NotImplementedError("Specialize direction_class")

    def analytic_families(self, cap):
        out = []
        s = self.rate
        for m, n in _primitive_directions(cap / TWO_PI):
            length = TWO_PI * math.hypot(m, n)
            phase = math.atan2(n, m) % TWO_PI
            i = 0
            while (phase + TWO_PI * i) / s <= TWO_PI + 1e-12:
                t = min((phase + TWO_PI * i) / s, TWO_PI)
                pole = t < 1e-12 or abs(t - TWO_PI) < 1e-12
                family = FamilyDescriptor(
                    topology=FamilyTopology.point() if pole else FamilyTopology.circle(),
                    label=f"({m},{n}) t_{i}",
                    representative=self.point([0.0, 0.0, t]),
                )
                g = 1
                while g * length <= cap + 1e-12:
                    out.append(
                        AnalyticFamily(
                            period=g * length,
                            homotopy_class=self.direction_class(m, n, g),
                            family=family,
                            cover=g,
                        )
                    )
                    g += 1
                i += 1
        return out


class CutS2xS1(_CutModel):
    """
    R/Z x S^2 as the cut model with rate k; the y circle collapses at both
    poles so the class of a loop is its x winding.
    """

    kind: Literal["CutS2xS1"] = "CutS2xS1"

    @computed_field
    @property
    def label(self) -> str:
        return f"CutS2xS1({self.k})"

    @property
    def rate(self):
        return float(self.k)

    def class_of(self, displacement):
        return HomotopyClass(components=(int(round(float(displacement[0]) / TWO_PI)),))

    def direction_class(self, m, n, g):
        return HomotopyClass(components=(g * m,))


class CutS3(_CutModel):
    """
    S^3 as the cut model with rate k + 1/4; all classes are trivial.
    """

    kind: Literal["CutS3"] = "CutS3"

    @computed_field
    @property
    def label(self) -> str:
        return f"CutS3({self.k})"

    @property
    def rate(self):
        return self.k + 0.25

    def direction_class(self, m, n, g):
        return HomotopyClass.trivial()


class FlatTorusCosphere(ModelManifold):
    """
    The unit cosphere bundle of the flat torus T^n (q of period 1) with the
    tautological form p dq; the Reeb flow is the geodesic flow q' = p.
    """

    kind: Literal["FlatTorusCosphere"] = "FlatTorusCosphere"
    n_: int = Field(alias="n", ge=2)

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @property
    def n(self):
        return self.n_

    @computed_field
    @property
    def label(self) -> str:
        return f"FlatTorusCosphere({self.n})"

    @property
    def chart(self):
        axes = [
            ChartAxis(name=f"q{j}", lower=0.0, upper=1.0, periodic=True, tag="q")
            for j in range(1, self.n + 1)
        ]
        axes += [ChartAxis(name=f"p{j}", lower=-1.0, upper=1.0, tag="p") for j in range(1, self.n + 1)]
        return Chart(id="T^n x S^(n-1)", axes=axes, constraint="|p| = 1")

    @property
    def symmetries(self):
        return frozenset({"q"})

    def contact_form(self, x):
        x = np.asarray(x, dtype=float)
        return np.concatenate([x[self.n :], np.zeros(self.n)])

    def reeb(self, x):
        return self.contact_form(x)

    def normalize(self, x):
        x = super().normalize(x)
        x[self.n :] /= np.linalg.norm(x[self.n :])
        return x

    def check_point(self, x):
        x = super().check_point(x)
        if abs(np.linalg.norm(x[self.n :]) - 1.0) > 1e-6:
            raise ChartError(self.chart.id, x, "covector is off the unit cosphere")
        return x

    def tangent_frame(self, x):
        x = np.asarray(x, dtype=float)
        frame = np.zeros((2 * self.n, 2 * self.n - 1))
        frame[: self.n, : self.n] = np.eye(self.n)
        frame[self.n :, self.n :] = null_space(x[self.n :][None, :])
        return frame

    def class_of(self, displacement):
        d = np.asarray(displacement, dtype=float)[: self.n]
        return HomotopyClass(components=tuple(int(round(c)) for c in d))

    def parameter_axes(self):
        axes = [
            ParameterAxis(name=f"q{j}", lower=0.0, upper=1.0, periodic=True, tag="q")
            for j in range(1, self.n + 1)
        ]
        axes += [
            ParameterAxis(name=f"psi{j}", lower=0.0, upper=math.pi, tag="direction")
            for j in range(1, self.n - 1)
        ]
        axes.append(
            ParameterAxis(name=f"psi{self.n - 1}", lower=0.0, upper=TWO_PI, periodic=True, tag="direction")
        )
        return axes

    def from_parameters(self, params):
        params = np.asarray(params, dtype=float)
        return np.concatenate([params[: self.n], _hyperspherical(params[self.n :])])

    def family_topology(self, d, x=None):
        if d == self.n - 1:
            return FamilyTopology.torus(self.n)
        return super().family_topology(d, x)

    def analytic_families(self, cap):
        out = []
        r = int(math.floor(cap))
        for alpha in itertools.product(range(-r, r + 1), repeat=self.n):
            length = math.sqrt(sum(a * a for a in alpha))
            if length == 0 or length > cap + 1e-12:
                continue
            cls = HomotopyClass(components=alpha)
            family = FamilyDescriptor(
                topology=FamilyTopology.torus(self.n),
                label=f"alpha{cls.label}",
                morse_bott_dim=self.n - 1,
                representative=self.point(np.concatenate([np.zeros(self.n), np.asarray(alpha) / length])),
            )
            out.append(AnalyticFamily(period=length, homotopy_class=cls, family=family, cover=cls.gcd))
        return out


ModelDescriptor = Annotated[
    Union[Sphere, Ellipsoid, Torus3, CutS2xS1, CutS3, FlatTorusCosphere],
    Field(discriminator="kind"),
]

MODEL_KINDS = {
    "Sphere": Sphere,
    "Ellipsoid": Ellipsoid,
    "Torus3": Torus3,
    "CutS2xS1": CutS2xS1,
    "CutS3": CutS3,
    "FlatTorusCosphere": FlatTorusCosphere,
}


def build_model(kind, n=None, k=None, weights=None):
    """
    Construct a catalog model from a scenario descriptor.

    :param kind: one of :data:`MODEL_KINDS`
    :param n: complex dimension for ``Sphere`` and ``FlatTorusCosphere``
    :param k: twisting for ``Torus3`` and the cut models
    :param weights: radii for ``Ellipsoid``
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"Unknown model kind {kind!r}")
    if kind in ("Sphere", "FlatTorusCosphere"):
        return MODEL_KINDS[kind](n=n)
    if kind == "Ellipsoid":
        return Ellipsoid(weights=tuple(weights))
    return MODEL_KINDS[kind](k=k)
