"""
Candidate rigid constellations: every closed orbit of one class with period
between the minimal period of the class and T, together with the gap above T
and the rank the families contribute.
"""

import logging
import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, computed_field

from reebrigidity.exceptions import SpectrumCapInsufficient, UnknownTopology
from reebrigidity.geometry.classes import HomotopyClass
from reebrigidity.geometry.models import Ellipsoid
from reebrigidity.spectrum import SpectrumEntry, analytic_spectrum, t_min, t_min_alpha, t_plus

logger = logging.getLogger(__name__)

RIGIDITY_TOL = 1e-9


class RigidityReport(BaseModel):
    """
    The three conditions for a constellation to be rigid, each with the
    margin it holds by.
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    simple: bool
    non_simple: tuple[str, ...] = ()
    isolated: bool
    isolation_margin: float
    below_sum: bool
    sum_margin: float
    tol: float = RIGIDITY_TOL

    @computed_field
    @property
    def rigid(self) -> bool:
        return self.simple and self.isolated and self.below_sum


class RigidConstellation(BaseModel):
    """
    :param families: spectrum entries of class ``homotopy_class`` with period in
        [t_min_alpha, period]
    :param t_plus: next period of the class above ``period``; ``inf`` means none
        below ``cap``
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    model: str
    homotopy_class: HomotopyClass
    period: float
    families: tuple[SpectrumEntry, ...]
    t_min: float
    t_min_alpha: float
    t_plus: float
    cap: float
    rank: int = 0
    report: Optional[RigidityReport] = None
    notes: tuple[str, ...] = ()

    @computed_field
    @property
    def rigid(self) -> bool:
        return self.report is not None and self.report.rigid


class Distinctness(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: Literal["always", "threshold"]
    threshold: Optional[float] = None

    def __str__(self):
        if self.verdict == "always":
            return "always geometrically distinct"
        return f"distinct when no orbit has period <= {self.threshold:.9g}"


def rank(constellation):
    """
    Sum of the total Z/2 Betti numbers of the family parameter spaces.

    :raises UnknownTopology: for a family without a known topology
    """
    total = 0
    for entry in constellation.families:
        if entry.family.topology is None:
            raise UnknownTopology(None)
        total += entry.family.topology.betti_sum
    return total


def check_rigid(constellation, tol=None):
    """
    Simplicity of every member, a strict gap above T, and T below the sum of
    the two minimal periods. Failures are report entries, never exceptions.
    """
    tol = RIGIDITY_TOL if tol is None else tol
    non_simple = tuple(f"{e.family.label}@{e.period:.9g}" for e in constellation.families if e.cover != 1)
    isolation_margin = constellation.t_plus - constellation.period
    sum_margin = constellation.t_min_alpha + constellation.t_min - constellation.period
    return RigidityReport(
        simple=not non_simple,
        non_simple=non_simple,
        isolated=isolation_margin > tol,
        isolation_margin=isolation_margin,
        below_sum=sum_margin > tol,
        sum_margin=sum_margin,
        tol=tol,
    )


def _rank_notes(model, families):
    if model is None or model.kind != "CutS3":
        return []
    isolated = sum(1 for e in families if e.family.topology.kind == "point")
    circles = sum(1 for e in families if e.family.topology.kind == "circle")
    if isolated != 2 or circles != 4 * model.k:
        return []
    note = (
        f"{isolated} isolated orbits and {circles} circle families give rank {8 * model.k + 2}; "
        f"the rank 8k+1 = {8 * model.k + 1} quoted for this constellation disagrees"
    )
    logger.warning("%s: %s", model.label, note)
    return [note]


def build(model, cls, period, spec, tol=None):
    """
    Collect the constellation of class ``cls`` below ``period`` from a
    spectrum and evaluate its rank and rigidity.

    :param model: the catalog model, or ``None`` for external spectra
    :raises SpectrumCapInsufficient: when the spectrum stops before ``period``
        or before the sum of the minimal periods
    """
    cls = HomotopyClass.parse(cls) if isinstance(cls, str) else cls
    period = float(period)
    lowest = t_min(spec)
    lowest_alpha = t_min_alpha(spec, cls)
    required = max(period, lowest + lowest_alpha) if spec.provenance == "analytic" else period
    if spec.cap < required:
        raise SpectrumCapInsufficient(spec.cap, required)

    families = tuple(spec.families_between(lowest_alpha, period, cls))
    constellation = RigidConstellation(
        model=spec.model,
        homotopy_class=cls,
        period=period,
        families=families,
        t_min=lowest,
        t_min_alpha=lowest_alpha,
        t_plus=t_plus(spec, cls, period),
        cap=spec.cap,
        notes=tuple(_rank_notes(model, families)),
    )
    constellation = constellation.model_copy(
        update={"rank": rank(constellation), "report": check_rigid(constellation, tol)}
    )
    logger.info(
        "constellation of class %s at T=%.9g on %s: %d families, rank %d, rigid=%s",
        cls.label,
        period,
        spec.model,
        len(families),
        constellation.rank,
        constellation.rigid,
    )
    return constellation


def _factor_range(factor):
    if isinstance(factor, (tuple, list)):
        return float(factor[0]), float(factor[1])
    return float(factor.min), float(factor.max)


def distinctness_threshold(cls, factor, period, t_min_alpha_value, order=None):
    """
    Whether the orbits a certificate guarantees are geometrically distinct.

    :param factor: :class:`FactorExtrema` or a (min, max) pair
    :param order: the order of ``cls`` when it is not read off the class
        itself (external spectra)
    :return: ``always`` for primitive classes and classes of infinite order,
        else the threshold (T max f - T_min(alpha) min f) / |alpha|
    """
    cls = HomotopyClass.parse(cls) if isinstance(cls, str) else cls
    order = cls.order if order is None else order
    if cls.is_primitive or order is None:
        return Distinctness(verdict="always")
    low, high = _factor_range(factor)
    return Distinctness(verdict="threshold", threshold=(period * high - t_min_alpha_value * low) / order)


class TPlusRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    period: float
    t_plus: float
    rigid: bool


def ellipsoid_t_plus_table(weights):
    """
    For each k the constellation at T_k = pi r_k^2: its T+ is pi r_(k+1)^2 for
    k < n and 2 pi r_1^2 for k = n, and it is rigid as long as r_n < sqrt(2) r_1.
    """
    model = Ellipsoid(weights=tuple(weights))
    spec = analytic_spectrum(model, cap=2.0 * math.pi * max(model.weights) ** 2 + 1.0)
    rows = []
    for k, r in enumerate(model.weights, start=1):
        constellation = build(model, HomotopyClass.trivial(), math.pi * r * r, spec)
        rows.append(TPlusRow(k=k, period=constellation.period, t_plus=constellation.t_plus, rigid=constellation.rigid))
    return rows
