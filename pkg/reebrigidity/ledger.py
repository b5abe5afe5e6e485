"""
Hypothesis ledgers and the certificates built from them.
"""

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, PrivateAttr, computed_field

THEOREMS = ("EL-sphere", "Prequantization", "Persist", "T3", "S2xS1", "S3", "FlatTorus", "Katok", "Fast")

Status = Literal["verified", "sampled", "assumed", "proved"]


class Inequality(BaseModel):
    """
    A strict inequality lhs < rhs with its margin. Boolean conditions leave
    ``lhs`` and ``rhs`` unset and carry ``satisfied`` instead.

    :param lhs_enclosed: worst case of ``lhs`` over its enclosure, when the
        left hand side is only known up to an enclosure
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    name: str
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    lhs_enclosed: Optional[float] = None
    satisfied: Optional[bool] = None

    @computed_field
    @property
    def margin(self) -> Optional[float]:
        if self.lhs is None or self.rhs is None:
            return None
        if math.isinf(self.rhs) and not math.isinf(self.lhs):
            return math.inf
        return self.rhs - self.lhs

    @computed_field
    @property
    def relative_margin(self) -> Optional[float]:
        if self.margin is None or self.rhs == 0 or math.isinf(self.rhs):
            return None
        return self.margin / abs(self.rhs)

    @property
    def enclosed_margin(self):
        if self.lhs_enclosed is None:
            return self.margin
        if self.rhs is None:
            return None
        return self.rhs - self.lhs_enclosed

    def _strict(self):
        if self.lhs is None or self.rhs is None:
            return bool(self.satisfied)
        enclosed = self.enclosed_margin
        return self.margin > 0 and enclosed is not None and enclosed > 0

    @computed_field
    @property
    def holds(self) -> bool:
        return self._strict()

    def __str__(self):
        if self.lhs is None:
            return f"{self.name}: {'holds' if self.holds else 'fails'}"
        return f"{self.name}: {self.lhs:.9g} < {self.rhs:.9g} (margin {self.margin:.3e})"


class LedgerEntry(Inequality):
    """
    One hypothesis of a theorem. ``assumed`` and ``proved`` entries are
    axioms of the certificate and hold by declaration.
    """

    status: Status = "verified"
    note: str = ""

    @computed_field
    @property
    def holds(self) -> bool:
        if self.status in ("assumed", "proved"):
            return True
        return self._strict()


def axiom(name, status="proved", note=""):
    return LedgerEntry(name=name, status=status, note=note)


class CertificateDistinctness(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: Literal["geometric", "distinct-only", "conditional"]
    threshold: Optional[float] = None

    @classmethod
    def from_constellation(cls, distinctness):
        if distinctness.verdict == "always":
            return cls(verdict="geometric")
        return cls(verdict="conditional", threshold=distinctness.threshold)


class CrossValidation(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: Literal["pass", "fail", "unverified"]
    required: int
    observed: int = 0
    families: int = 0
    nondegenerate: int = 0
    periods: tuple[float, ...] = ()
    coverage: Optional[float] = None
    note: str = ""


class Certificate(BaseModel):
    """
    :param theorem: one of :data:`THEOREMS`
    :param ledger: the hypotheses, each with its margin and status
    :param count: the number of closed orbits guaranteed when valid
    :param window: the period interval the orbits lie in
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    theorem: Literal["EL-sphere", "Prequantization", "Persist", "T3", "S2xS1", "S3", "FlatTorus", "Katok", "Fast"]
    model: str = ""
    factor: str = ""
    homotopy_class: str = "e"
    ledger: tuple[LedgerEntry, ...]
    count: int
    window: tuple[float, float]
    distinctness: CertificateDistinctness
    cross_validation: Optional[CrossValidation] = None
    parameters: dict[str, float] = {}
    notes: tuple[str, ...] = ()

    _model = PrivateAttr(default=None)
    _factor = PrivateAttr(default=None)

    @computed_field
    @property
    def valid(self) -> bool:
        return all(entry.holds for entry in self.ledger)

    def bind(self, model, factor):
        """
        Attach the live model and factor the certificate was computed for, so
        that it can be cross validated.
        """
        self._model = model
        self._factor = factor
        return self

    @property
    def bound_model(self):
        return self._model

    @property
    def bound_factor(self):
        return self._factor

    def failures(self):
        return [entry for entry in self.ledger if not entry.holds]

    def with_cross_validation(self, result):
        return self.model_copy(update={"cross_validation": result}).bind(self._model, self._factor)

    def summary(self):
        state = "valid" if self.valid else "invalid"
        lo, hi = self.window
        return f"{self.theorem} on {self.model}: {state}, N={self.count}, window [{lo:.9g}, {hi:.9g}]"
