import math
import re
from functools import reduce
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field

from reebrigidity.exceptions import UnknownTopology


class Point(BaseModel):
    """
    A point of a model manifold in the coordinates of one of its charts.
    """

    model_config = ConfigDict(frozen=True)

    chart: str
    coords: tuple[float, ...]

    @classmethod
    def from_array(cls, chart, array):
        return cls(chart=chart, coords=tuple(float(c) for c in np.asarray(array).ravel()))

    @property
    def array(self):
        return np.array(self.coords, dtype=float)

    def __str__(self):
        inner = ", ".join(f"{c:.6g}" for c in self.coords)
        return f"{self.chart}({inner})"


class HomotopyClass(BaseModel):
    """
    A free homotopy class of loops in a catalog manifold.

    Every catalog manifold has a free abelian (possibly trivial) group of
    classes, so a class is an integer vector and the empty vector is the
    trivial class ``e``. Group operations are exact integer arithmetic.
    """

    model_config = ConfigDict(frozen=True)

    components: tuple[int, ...] = ()

    @classmethod
    def trivial(cls):
        return cls(components=())

    @classmethod
    def parse(cls, text):
        """
        Read ``e``, ``(1,0,0)``, ``1,0,0`` or a single integer.
        """
        text = str(text).strip()
        if text in ("e", "()", ""):
            return cls.trivial()
        inner = text.strip("()[] ")
        parts = [p for p in re.split(r"[,\s]+", inner) if p]
        try:
            values = tuple(int(p) for p in parts)
        except ValueError as e:
            raise ValueError(f"Malformed homotopy class {text!r}") from e
        return cls(components=values)

    @computed_field
    @property
    def label(self) -> str:
        if self.is_trivial:
            return "e"
        return "(" + ",".join(str(c) for c in self.components) + ")"

    @property
    def is_trivial(self):
        return all(c == 0 for c in self.components)

    @property
    def gcd(self):
        return reduce(math.gcd, (abs(c) for c in self.components), 0)

    @property
    def order(self) -> Optional[int]:
        """
        1 for the trivial class, ``None`` (infinite) otherwise.
        """
        return 1 if self.is_trivial else None

    @property
    def is_infinite_order(self):
        return self.order is None

    @property
    def is_primitive(self):
        return not self.is_trivial and self.gcd == 1

    def power(self, k):
        return HomotopyClass(components=tuple(k * c for c in self.components))

    def primitive_root(self):
        """
        :return: the primitive class beta and the exponent k with beta^k = self
        """
        g = self.gcd
        if g == 0:
            return self, 1
        return HomotopyClass(components=tuple(c // g for c in self.components)), g

    def is_power_of(self, beta) -> Optional[int]:
        """
        :return: k with beta^k = self, or ``None``
        """
        if beta.is_trivial:
            return 1 if self.is_trivial else None
        if len(beta.components) != len(self.components):
            return None
        ratios = {
            c // b
            for c, b in zip(self.components, beta.components)
            if b != 0 and c % b == 0
        }
        if len(ratios) != 1:
            return None
        k = ratios.pop()
        return k if self == beta.power(k) else None

    def __eq__(self, other):
        if not isinstance(other, HomotopyClass):
            return NotImplemented
        if self.is_trivial and other.is_trivial:
            return True
        return self.components == other.components

    def __hash__(self):
        return hash(()) if self.is_trivial else hash(self.components)

    def __str__(self):
        return self.label


_TOPOLOGY_RE = re.compile(r"^(point|circle|torus|projective)(?:\((\d+)\))?$")


class FamilyTopology(BaseModel):
    """
    Topology of the parameter space of an orbit family after dividing out
    the reparameterization circle.

    ``dim`` is the torus dimension for ``torus`` and the complex dimension m of
    CP^m for ``projective``.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["point", "circle", "torus", "projective"]
    dim: int = 0

    @classmethod
    def point(cls):
        return cls(kind="point")

    @classmethod
    def circle(cls):
        return cls(kind="circle", dim=1)

    @classmethod
    def torus(cls, d):
        return cls(kind="torus", dim=d)

    @classmethod
    def projective(cls, m):
        if m == 0:
            return cls.point()
        return cls(kind="projective", dim=m)

    @classmethod
    def parse(cls, text):
        match = _TOPOLOGY_RE.match(str(text).strip())
        if match is None:
            raise UnknownTopology(text)
        kind, dim = match.group(1), match.group(2)
        if kind in ("torus", "projective") and dim is None:
            raise UnknownTopology(text)
        return cls(kind=kind, dim=int(dim) if dim else (1 if kind == "circle" else 0))

    @computed_field
    @property
    def label(self) -> str:
        if self.kind in ("torus", "projective"):
            return f"{self.kind}({self.dim})"
        return self.kind

    @property
    def betti_sum(self):
        """
        Total Z/2 Betti number, the contribution of one family to the rank of
        a constellation.
        """
        if self.kind == "point":
            return 1
        if self.kind == "circle":
            return 2
        if self.kind == "torus":
            return 2**self.dim
        if self.kind == "projective":
            return self.dim + 1
        raise UnknownTopology(self.kind)
