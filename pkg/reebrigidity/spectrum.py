"""
Period spectra of Reeb flows and their order statistics.

A :class:`PeriodSpectrum` is a finite, sorted list of closed orbit families
enumerated up to a cap. Catalog models produce theirs analytically, rescaled
forms go through an orbit scan, and anything else (Katok or negatively curved
metrics) is read from an external record in the same format.
"""

import logging
import math
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, computed_field, field_validator

from reebrigidity import config
from reebrigidity.dynamics.scan import scan
from reebrigidity.exceptions import EmptyClassSpectrum
from reebrigidity.geometry.calculus import ReebField
from reebrigidity.geometry.classes import FamilyTopology, HomotopyClass
from reebrigidity.geometry.models import FamilyDescriptor

logger = logging.getLogger(__name__)

# periods closer than this are the same element of the spectrum
PERIOD_EQ_TOL = 1e-9


def _above(candidate, value):
    return candidate > value + PERIOD_EQ_TOL * max(1.0, abs(value))


class SpectrumEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    period: float
    homotopy_class: HomotopyClass
    family: FamilyDescriptor
    cover: int = 1
    residual: Optional[float] = None
    classification: Optional[str] = None

    @property
    def primitive_period(self):
        return self.period / self.cover

    @property
    def simple(self):
        return self.cover == 1


class PeriodSpectrum(BaseModel):
    """
    :param model: label of the manifold (and factor) the spectrum belongs to
    :param provenance: ``analytic``, ``numeric`` or ``external``
    :param cap: largest period the enumeration is complete up to
    :param window: scanned period window of a numeric spectrum
    :param grid: seed grid of a numeric spectrum
    :param coverage: fraction of converged shots of a numeric spectrum
    :param notes: findings attached during enumeration (resonances, data source)
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    model: str
    entries: tuple[SpectrumEntry, ...] = ()
    provenance: Literal["analytic", "numeric", "external"]
    cap: float
    window: Optional[tuple[float, float]] = None
    grid: Optional[int] = None
    coverage: Optional[float] = None
    notes: tuple[str, ...] = ()

    @field_validator("entries")
    @classmethod
    def _sorted(cls, value):
        return tuple(sorted(value, key=lambda e: (e.period, e.homotopy_class.components, e.family.label)))

    @computed_field
    @property
    def size(self) -> int:
        return len(self.entries)

    def of_class(self, cls=None):
        if cls is None:
            return list(self.entries)
        cls = HomotopyClass.parse(cls) if isinstance(cls, str) else cls
        return [e for e in self.entries if e.homotopy_class == cls]

    def classes(self):
        return sorted({e.homotopy_class for e in self.entries}, key=lambda c: c.components)

    def periods(self, cls=None):
        """
        Distinct periods of the class (all classes when ``None``), ascending.
        """
        out = []
        for entry in self.of_class(cls):
            if not out or _above(entry.period, out[-1]):
                out.append(entry.period)
        return out

    def families_between(self, lower, upper, cls=None):
        slack = PERIOD_EQ_TOL * max(1.0, abs(upper))
        return [e for e in self.of_class(cls) if lower - slack <= e.period <= upper + slack]

    def count_below(self, threshold, cls=None):
        return sum(1 for e in self.of_class(cls) if e.period < threshold)

    def nearest_below(self, value, cls=None):
        below = [t for t in self.periods(cls) if t < value]
        return below[-1] if below else None

    def contains(self, value, cls=None, tol=None):
        tol = PERIOD_EQ_TOL * max(1.0, abs(value)) if tol is None else tol
        return any(abs(t - value) <= tol for t in self.periods(cls))

    def missing_primitives(self):
        """
        Entries with cover k > 1 whose primitive family is not listed.
        """
        missing = []
        for entry in self.entries:
            if entry.cover == 1:
                continue
            primitive = any(
                e.cover == 1
                and e.family.label == entry.family.label
                and abs(e.period - entry.primitive_period) <= 1e-9 * max(1.0, e.period)
                for e in self.entries
            )
            if not primitive:
                missing.append(entry)
        return missing

    def scaled(self, c):
        """
        The spectrum of c * lambda: every period multiplies by c.
        """
        window = None if self.window is None else (c * self.window[0], c * self.window[1])
        return self.model_copy(
            update={
                "model": f"{c:g}*{self.model}",
                "entries": tuple(e.model_copy(update={"period": c * e.period}) for e in self.entries),
                "cap": c * self.cap,
                "window": window,
            }
        )


def analytic_spectrum(model, cap=None):
    """
    Exact enumeration of the closed Reeb orbit families of a catalog model up
    to ``cap``. Resonant ellipsoid weights are kept and annotated.
    """
    cap = config.SPECTRUM_CAP if cap is None else float(cap)
    if cap <= 0:
        raise ValueError("spectrum cap must be positive")
    entries = [
        SpectrumEntry(period=fam.period, homotopy_class=fam.homotopy_class, family=fam.family, cover=fam.cover)
        for fam in model.analytic_families(cap)
    ]
    logger.debug("analytic spectrum of %s below %g: %d entries", model.label, cap, len(entries))
    return PeriodSpectrum(
        model=model.label,
        entries=tuple(entries),
        provenance="analytic",
        cap=cap,
        notes=tuple(model.resonances(cap)),
    )


def numeric_spectrum(model, factor, cls=None, window=(0.0, 1.0), seed_grid=None, tol=None):
    """
    The spectrum of ``factor * lambda_0`` in ``window`` from an orbit scan.

    :raises SeedingExhausted: propagated from the scan
    """
    field = ReebField(model, factor)
    if isinstance(cls, str):
        cls = HomotopyClass.parse(cls)
    report = scan(field, cls, window, seed_grid, tol)
    entries = []
    for family in report.families:
        head = family.representative
        entries.append(
            SpectrumEntry(
                period=family.period,
                homotopy_class=family.homotopy_class,
                family=FamilyDescriptor(
                    topology=family.topology,
                    label=family.label,
                    representative=head.point,
                    morse_bott_dim=family.dim,
                ),
                cover=head.cover,
                residual=max(orbit.residual for orbit in family.members),
                classification=None if head.floquet is None else head.floquet.classification,
            )
        )
    return PeriodSpectrum(
        model=field.label,
        entries=tuple(entries),
        provenance="numeric",
        cap=float(window[1]),
        window=(float(window[0]), float(window[1])),
        grid=seed_grid,
        coverage=report.coverage,
    )


def t_min(spec):
    """
    The smallest period of the spectrum over all classes.
    """
    periods = spec.periods()
    if not periods:
        raise EmptyClassSpectrum("any", spec.cap)
    return periods[0]


def t_min_alpha(spec, cls):
    cls = HomotopyClass.parse(cls) if isinstance(cls, str) else cls
    periods = spec.periods(cls)
    if not periods:
        raise EmptyClassSpectrum(cls.label, spec.cap)
    return periods[0]


def t_plus(spec, cls, period):
    """
    The smallest period of class ``cls`` strictly above ``period``.

    Returns ``math.inf`` when there is none below the cap. When the cap does
    not exceed ``period`` that answer only bounds the true value from below,
    which is logged.
    """
    cls = HomotopyClass.parse(cls) if isinstance(cls, str) else cls
    for candidate in spec.periods(cls):
        if _above(candidate, period):
            return candidate
    if spec.cap <= period:
        logger.warning(
            "T+ of class %s above %.9g is beyond the spectrum cap %.9g; +inf is a lower bound only",
            cls.label,
            period,
            spec.cap,
        )
    return math.inf


def cap_covers(spec, period):
    return spec.cap > period


def _external(model, entries, cap, notes):
    return PeriodSpectrum(model=model, entries=tuple(entries), provenance="external", cap=cap, notes=tuple(notes))


def negative_curvature(length=1.0, systole=None, cap=None):
    """
    The cogeodesic spectrum of a negatively curved metric as seen from one
    primitive class alpha = (1, 0): a unique closed geodesic of ``length`` in
    alpha and its iterates in alpha^k. ``systole`` adds the shortest closed
    geodesic of the metric in the class (0, 1).
    """
    cap = config.SPECTRUM_CAP if cap is None else float(cap)
    family = FamilyDescriptor(topology=FamilyTopology.point(), label="geodesic alpha")
    entries = [
        SpectrumEntry(period=k * length, homotopy_class=HomotopyClass(components=(k, 0)), family=family, cover=k)
        for k in range(1, int(math.floor(cap / length + 1e-12)) + 1)
    ]
    if systole is not None:
        if systole > length:
            raise ValueError("the systole cannot exceed the length of another closed geodesic")
        short = FamilyDescriptor(topology=FamilyTopology.point(), label="systole")
        entries.extend(
            SpectrumEntry(period=k * systole, homotopy_class=HomotopyClass(components=(0, k)), family=short, cover=k)
            for k in range(1, int(math.floor(cap / systole + 1e-12)) + 1)
        )
    return _external("negative-curvature", entries, cap, ["unique closed geodesic per primitive class"])


def katok(epsilon, n, cap=None):
    """
    The 2n prime closed geodesics of a Katok metric, lengths spread evenly over
    [1 - epsilon, 1 + epsilon] and scaled by 2 pi, with their iterates. All are
    listed in the trivial class.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    cap = config.SPECTRUM_CAP if cap is None else float(cap)
    count = 2 * n
    lengths = [1.0 - epsilon + 2.0 * epsilon * i / (count - 1) for i in range(count)]
    entries = []
    for i, length in enumerate(lengths):
        period = 2.0 * math.pi * length
        family = FamilyDescriptor(topology=FamilyTopology.point(), label=f"geodesic_{i + 1}")
        k = 1
        while k * period <= cap + 1e-12:
            entries.append(
                SpectrumEntry(period=k * period, homotopy_class=HomotopyClass.trivial(), family=family, cover=k)
            )
            k += 1
    return _external(f"katok({epsilon:g}, {n})", entries, cap, [f"{count} prime closed geodesics"])


SPECTRUM_PRESETS = {
    "negative-curvature": negative_curvature,
    "katok": katok,
}


def load_spectrum(source):
    """
    Read a spectrum report written by :meth:`PeriodSpectrum.model_dump_json`.

    :param source: a path or the JSON text itself
    """
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        source = Path(source).read_text()
    spec = PeriodSpectrum.model_validate_json(source)
    logger.info("loaded %s spectrum of %s with %d entries", spec.provenance, spec.model, spec.size)
    return spec


def write_spectrum(spec, path):
    Path(path).write_text(spec.model_dump_json(indent=2))
