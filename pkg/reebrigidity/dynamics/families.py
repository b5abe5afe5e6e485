"""
Closed orbits, their Floquet data and the families they fall into.
"""

import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field
from scipy.linalg import svd

from reebrigidity import config
from reebrigidity.dynamics.flow import integrate_variational
from reebrigidity.exceptions import MonodromyConditioning
from reebrigidity.geometry.classes import FamilyTopology, HomotopyClass, Point

logger = logging.getLogger(__name__)


class FloquetData(BaseModel):
    """
    Spectrum of the linearized return map on the tangent space with the unit
    multiplier of the flow direction removed.

    ``multipliers`` holds (real, imaginary) pairs; ``nullity`` is the kernel
    dimension of (monodromy - identity) beyond the flow direction.
    """

    model_config = ConfigDict(frozen=True)

    multipliers: tuple[tuple[float, float], ...]
    nullity: int
    classification: Literal["nondegenerate", "morse-bott", "degenerate"]
    family_dim: Optional[int] = None
    determinant: float
    condition_number: float

    @property
    def complex_multipliers(self):
        return np.array([complex(re, im) for re, im in self.multipliers])


class ClosedOrbit(BaseModel):
    model_config = ConfigDict(frozen=True)

    point: Point
    period: float
    homotopy_class: HomotopyClass
    residual: float
    cover: int = 1
    floquet: Optional[FloquetData] = None
    family: Optional[str] = None

    @computed_field
    @property
    def simple(self) -> bool:
        return self.cover == 1

    @property
    def primitive_period(self):
        return self.period / self.cover


class OrbitFamily(BaseModel):
    """
    A family of closed orbits with a common period, up to the symmetry of the
    flow; ``dim`` is the dimension of its parameter space after dividing out
    reparameterization.
    """

    model_config = ConfigDict(frozen=True)

    period: float
    homotopy_class: HomotopyClass
    dim: int
    topology: FamilyTopology
    members: tuple[ClosedOrbit, ...]
    morse_bott: bool
    label: str = ""

    @property
    def representative(self):
        return self.members[0]

    @computed_field
    @property
    def simple(self) -> bool:
        return all(orbit.simple for orbit in self.members)


def _sorted_multipliers(values):
    return sorted(values, key=lambda z: (round(float(np.angle(z)), 9), round(abs(z), 9)))


def monodromy_floquet(model, x, monodromy, family_dim=None):
    """
    Floquet data from the ambient fundamental matrix at a periodic point x.
    """
    frame = model.tangent_frame(x)
    reduced = frame.T @ monodromy @ frame
    condition = float(np.linalg.cond(reduced))
    if not np.isfinite(condition) or condition > config.MONODROMY_COND_LIMIT:
        raise MonodromyConditioning(condition)

    eigenvalues = list(np.linalg.eigvals(reduced))
    flow_index = int(np.argmin([abs(z - 1.0) for z in eigenvalues]))
    eigenvalues.pop(flow_index)

    singular = svd(reduced - np.eye(reduced.shape[0]), compute_uv=False)
    nullity = max(int(np.sum(singular < config.SINGULAR_CUTOFF)) - 1, 0)
    if nullity == 0:
        classification = "nondegenerate"
    elif family_dim is None or nullity == family_dim:
        classification = "morse-bott"
    else:
        classification = "degenerate"
    return FloquetData(
        multipliers=tuple((float(z.real), float(z.imag)) for z in _sorted_multipliers(eigenvalues)),
        nullity=nullity,
        classification=classification,
        family_dim=nullity if family_dim is None and nullity else family_dim,
        determinant=float(np.linalg.det(reduced)),
        condition_number=condition,
    )


def floquet(orbit, field, family_dim=None, tol=None):
    """
    Integrate the variational equation once around the orbit and classify it.

    :param family_dim: the expected family dimension; when given, a nullity
        different from it classifies the orbit as degenerate
    """
    model = field.model
    x = model.coords_of(orbit.point)
    _, monodromy = integrate_variational(field, x, orbit.period, tol)
    return monodromy_floquet(model, x, monodromy, family_dim)
