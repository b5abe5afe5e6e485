"""
The bump functions of the fast orbit plug.

Everything lives in the flow box Q = [-2 eps, 2 eps]^2 with coordinates (t, x)
and, above dimension three, the radial coordinate rho = |z|^2 / 2 of the
transverse ball. The functions are

- ``A(t, x)``, the trap: supported in Q, with values in (-1, 0] and
  ``A_x == 1`` on the inner rectangle [-eps, eps] x [eps/2, 3 eps/2];
- ``T(t)``, an even bump supported in [-eps, eps] that reaches 1 only at 0;
- ``X(x)``, the twist: ``X >= x`` with ``X(eps) = eps + eps^2`` and a single
  critical point at eps;
- ``B(t, x) = (1 - T(t)) x + T(t) X(x)``;
- ``cut(rho)``, which is ``1 - rho`` near 0 and vanishes near eps^2 / 2.
"""

# pylint:disable=invalid-name

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, computed_field

from reebrigidity import config
from reebrigidity.exceptions import PlugConstructionError, PropertyVerificationFailure
from reebrigidity.hooks import hooks
from reebrigidity.util import gauss_legendre, smoothstep, smoothstep_integral, smoothstep_prime

logger = logging.getLogger(__name__)

EPSILON_LIMIT = 0.25
IDENTITY_TOL = 1e-10
EXACT_TOL = 1e-12


def _shaped(v):
    v = np.asarray(v, dtype=float)
    return v.shape, np.atleast_1d(v).astype(float)


def _restore(shape, values):
    if shape == ():
        return float(values[0])
    return values.reshape(shape)


def bump(v):
    """
    exp(1 - 1 / (1 - v^2)) on (-1, 1), zero elsewhere. Even, with the value 1
    at v = 0 only and a nondegenerate maximum there.
    """
    shape, flat = _shaped(v)
    out = np.zeros_like(flat)
    inside = np.abs(flat) < 1.0
    w = flat[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - w * w))
    return _restore(shape, out)


def bump_prime(v):
    shape, flat = _shaped(v)
    out = np.zeros_like(flat)
    inside = np.abs(flat) < 1.0
    w = flat[inside]
    q = 1.0 - w * w
    out[inside] = np.exp(1.0 - 1.0 / q) * (-2.0 * w / (q * q))
    return _restore(shape, out)


def bump_integral(v):
    """
    The integral of :func:`bump` from -1 to v.
    """
    v = np.clip(np.asarray(v, dtype=float), -1.0, 1.0)
    return gauss_legendre(bump, np.full_like(v, -1.0), v, panels=8, nodes=32)


def _sign(t):
    return np.sign(np.asarray(t, dtype=float))


class PlugSpec(BaseModel):
    """
    Parameters and bump functions of the plug in dimension ``dimension``.

    All evaluators take arrays and broadcast, so a grid scan passes
    ``t[:, None]`` and ``x[None, :]`` instead of a mesh.

    :param epsilon: size of the flow box, below 1/4
    :param delta: strength of the trap
    :param dimension: 2n - 1, odd and at least 3
    """

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(gt=0)
    delta: float = Field(ge=0)
    dimension: int = 3

    _constants = PrivateAttr(default=None)
    _properties = PrivateAttr(default=None)

    @computed_field
    @property
    def n(self) -> int:
        return (self.dimension + 1) // 2

    @property
    def rho_max(self):
        return 0.5 * self.epsilon**2

    @property
    def inner_rectangle(self):
        eps = self.epsilon
        return (-eps, eps), (0.5 * eps, 1.5 * eps)

    @property
    def box(self):
        return (-2.0 * self.epsilon, 2.0 * self.epsilon)

    def pre_build(self):
        if self.dimension < 3 or self.dimension % 2 == 0:
            raise PlugConstructionError(f"dimension must be odd and at least 3, not {self.dimension}")
        if self.epsilon >= EPSILON_LIMIT:
            raise PlugConstructionError(f"epsilon = {self.epsilon} must be below {EPSILON_LIMIT}")

    @hooks
    def build(self):
        """
        Fix the twist and cut-off constants so that X(eps) = eps + eps^2 and
        cut reaches zero exactly.
        """
        eps = self.epsilon
        full = float(bump_integral(1.0))
        half = float(bump_integral(0.0))
        # the spike at eps carries X' down to zero; each half has area eps^2 / 2
        spike = eps**2 / full
        left = 0.25 * eps
        left_amp = (eps**2 + spike * half) / (left * full)
        right = 0.5 * (0.5 * eps - spike)
        right_amp = (left_amp * left - spike) / right
        rho = self.rho_max
        plateau = 16.0 / (9.0 * rho) - 1.0 / 3.0
        self._constants = {
            "full": full,
            "spike": spike,
            "left": left,
            "left_amp": left_amp,
            "right": right,
            "right_centre": eps + spike + right,
            "right_amp": right_amp,
            "cut_plateau": plateau,
        }
        logger.debug(
            "plug eps=%g delta=%g dim=%d: spike width %.6g, twist amplitudes %.6g / %.6g, cut slope %.6g",
            eps,
            self.delta,
            self.dimension,
            spike,
            left_amp,
            right_amp,
            plateau,
        )
        return self

    def post_build(self):
        self._properties = verify_properties(self)

    @property
    def properties(self):
        """
        The :class:`PropertyReport` of the last build.
        """
        return self._properties

    @property
    def constants(self):
        if self._constants is None:
            raise PlugConstructionError("the plug has not been built")
        return self._constants

    # time profile of the trap: 1 on [-eps, eps], 0 outside (-2 eps, 2 eps)
    def _phi(self, t):
        eps = self.epsilon
        return smoothstep((2.0 * eps - np.abs(t)) / eps)

    def _phi_prime(self, t):
        eps = self.epsilon
        return -_sign(t) * smoothstep_prime((2.0 * eps - np.abs(t)) / eps) / eps

    # window in x: 1 on [-eps, 3 eps/2], 0 outside (-2 eps, 2 eps)
    def _window(self, x):
        eps = self.epsilon
        return smoothstep((x + 2.0 * eps) / eps) * smoothstep((2.0 * eps - x) / (0.5 * eps))

    def _window_prime(self, x):
        eps = self.epsilon
        u, v = (x + 2.0 * eps) / eps, (2.0 * eps - x) / (0.5 * eps)
        return smoothstep_prime(u) / eps * smoothstep(v) - smoothstep(u) * smoothstep_prime(v) / (0.5 * eps)

    def _psi(self, x):
        x = np.asarray(x, dtype=float)
        return self._window(x) * (x - 2.0 * self.epsilon)

    def _psi_prime(self, x):
        x = np.asarray(x, dtype=float)
        return self._window_prime(x) * (x - 2.0 * self.epsilon) + self._window(x)

    def A(self, t, x):
        return self._phi(t) * self._psi(x)

    def A_x(self, t, x):
        return self._phi(t) * self._psi_prime(x)

    def A_t(self, t, x):
        return self._phi_prime(t) * self._psi(x)

    def T(self, t):
        return bump(np.asarray(t, dtype=float) / self.epsilon)

    def T_prime(self, t):
        return bump_prime(np.asarray(t, dtype=float) / self.epsilon) / self.epsilon

    def _twist_arguments(self, x):
        eps, k = self.epsilon, self.constants
        x = np.asarray(x, dtype=float)
        v_left = (x - 0.75 * eps) / k["left"]
        v_spike = (x - eps) / k["spike"]
        v_right = (x - k["right_centre"]) / k["right"]
        return x, v_left, v_spike, v_right

    def _support(self, x):
        eps = self.epsilon
        return (x > 0.5 * eps) & (x < 1.5 * eps)

    def twist_excess(self, x):
        """
        X(x) - x.
        """
        k = self.constants
        x, vl, vs, vr = self._twist_arguments(x)
        value = (
            k["left_amp"] * k["left"] * bump_integral(vl)
            - k["spike"] * bump_integral(vs)
            - k["right_amp"] * k["right"] * bump_integral(vr)
        )
        return np.where(self._support(x), value, 0.0)

    def twist_excess_prime(self, x):
        k = self.constants
        x, vl, vs, vr = self._twist_arguments(x)
        return k["left_amp"] * bump(vl) - bump(vs) - k["right_amp"] * bump(vr)

    def twist_excess_second(self, x):
        k = self.constants
        x, vl, vs, vr = self._twist_arguments(x)
        return (
            k["left_amp"] * bump_prime(vl) / k["left"]
            - bump_prime(vs) / k["spike"]
            - k["right_amp"] * bump_prime(vr) / k["right"]
        )

    def X(self, x):
        return np.asarray(x, dtype=float) + self.twist_excess(x)

    def X_prime(self, x):
        return 1.0 + self.twist_excess_prime(x)

    def X_second(self, x):
        return self.twist_excess_second(x)

    def B(self, t, x):
        return np.asarray(x, dtype=float) + self.T(t) * self.twist_excess(x)

    def B_x(self, t, x):
        return 1.0 + self.T(t) * self.twist_excess_prime(x)

    def B_t(self, t, x):
        return self.T_prime(t) * self.twist_excess(x)

    def cut(self, rho):
        """
        Radial cut-off on [0, eps^2 / 2]: 1 - rho near 0, 0 on the last eighth,
        with slope between -4 / eps^2 and 0.
        """
        rho = np.asarray(rho, dtype=float)
        length, plateau = self.rho_max, self.constants["cut_plateau"]
        up, down = length / 8.0, length / 4.0
        value = (
            1.0
            - rho
            - (plateau - 1.0) * up * smoothstep_integral((rho - length / 8.0) / up)
            + plateau * down * smoothstep_integral((rho - 5.0 * length / 8.0) / down)
        )
        out = np.where(rho >= 7.0 * length / 8.0, 0.0, value)
        return float(out) if out.ndim == 0 else out

    def cut_prime(self, rho):
        rho = np.asarray(rho, dtype=float)
        length, plateau = self.rho_max, self.constants["cut_plateau"]
        up, down = length / 8.0, length / 4.0
        out = (
            -1.0
            - (plateau - 1.0) * smoothstep((rho - length / 8.0) / up)
            + plateau * smoothstep((rho - 5.0 * length / 8.0) / down)
        )
        out = np.where(rho >= 7.0 * length / 8.0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def _cut(self, rho):
        if self.dimension == 3 or rho is None:
            return 1.0, 0.0
        return self.cut(rho), self.cut_prime(rho)

    def A_hat(self, t, x, rho=None):
        c, _ = self._cut(rho)
        return c * self.A(t, x)

    def A_hat_x(self, t, x, rho=None):
        c, _ = self._cut(rho)
        return c * self.A_x(t, x)

    def A_hat_t(self, t, x, rho=None):
        c, _ = self._cut(rho)
        return c * self.A_t(t, x)

    def A_hat_rho(self, t, x, rho=None):
        _, dc = self._cut(rho)
        return dc * self.A(t, x)

    def B_hat(self, t, x, rho=None):
        c, _ = self._cut(rho)
        return np.asarray(x, dtype=float) + c * self.T(t) * self.twist_excess(x)

    def B_hat_x(self, t, x, rho=None):
        c, _ = self._cut(rho)
        return 1.0 + c * self.T(t) * self.twist_excess_prime(x)

    def B_hat_t(self, t, x, rho=None):
        c, _ = self._cut(rho)
        return c * self.T_prime(t) * self.twist_excess(x)

    def B_hat_rho(self, t, x, rho=None):
        _, dc = self._cut(rho)
        return dc * self.T(t) * self.twist_excess(x)

    def with_delta(self, delta):
        return make_spec(self.epsilon, delta, self.dimension)


def make_spec(epsilon, delta, dim=3):
    """
    Construct the plug bumps for (epsilon, delta) and verify every defining
    property on :data:`config.PROPERTY_SAMPLES` points.

    :raises PropertyVerificationFailure: when a property fails at a sample
    """
    return PlugSpec(epsilon=epsilon, delta=delta, dimension=dim).build()


class PropertyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    checked: tuple[str, ...]
    samples: int


def _fail(prop, mask, points, values):
    """
    Raise for the first sample where ``mask`` is set.
    """
    if not np.any(mask):
        return
    index = np.unravel_index(np.argmax(mask), mask.shape)
    point = tuple(float(np.broadcast_to(p, mask.shape)[index]) for p in points)
    raise PropertyVerificationFailure(prop, point, float(np.broadcast_to(values, mask.shape)[index]))


def box_nodes(epsilon, reach, count):
    """
    ``count + 1`` evenly spaced nodes on [-reach eps, reach eps], with count
    rounded up to a multiple of 4. The nodes are exactly symmetric and, for
    reach 2, contain 0 and eps exactly.
    """
    count = 4 * math.ceil(count / 4)
    k = np.arange(-(count // 2), count // 2 + 1, dtype=float)
    return epsilon * ((reach * k) / (count // 2))


def verify_properties(spec, samples=None):
    """
    Check the trap, time bump, twist, B and cut-off properties on a sample.

    Univariate functions are sampled at ``samples + 1`` evenly spaced points
    and A, B on a square grid of about ``samples`` points. Both grids contain
    t = 0 and x = eps as nodes. Strict positivity of a flat-ended bump is only
    checked where its value is representable, away from the edge of its support.
    """
    samples = config.PROPERTY_SAMPLES if samples is None else samples
    eps = spec.epsilon
    checked = []

    side = math.isqrt(samples)
    grid = box_nodes(eps, 2.0, side)
    t, x = grid[:, None], grid[None, :]
    wide = box_nodes(eps, 3.0, side)
    tw, xw = wide[:, None], wide[None, :]

    # trap
    value = spec.A(tw, xw)
    outside = (np.abs(tw) >= 2.0 * eps) | (np.abs(xw) >= 2.0 * eps)
    _fail("A1 support in Q", outside & (value != 0.0), (tw, xw), value)
    value = spec.A(t, x)
    _fail("A2 -1 < A <= 0", (value <= -1.0) | (value > 0.0), (t, x), value)
    (t0, t1), (x0, x1) = spec.inner_rectangle
    inner = (t >= t0) & (t <= t1) & (x >= x0) & (x <= x1)
    slope = spec.A_x(t, x)
    _fail("A3 A_x = 1 on the inner rectangle", inner & (np.abs(slope - 1.0) > IDENTITY_TOL), (t, x), slope)
    checked += ["A1", "A2", "A3"]

    # time bump
    line = box_nodes(eps, 2.0, samples)
    value = spec.T(line)
    _fail("T1 support [-eps, eps]", (np.abs(line) >= eps) & (value != 0.0), (line,), value)
    _fail("T1 positive inside", (np.abs(line) < 0.9 * eps) & (value <= 0.0), (line,), value)
    _fail("T1 values in [0, 1]", (value < 0.0) | (value > 1.0), (line,), value)
    mirrored = spec.T(-line)
    _fail("T2 even", value != mirrored, (line,), value - mirrored)
    _fail("T3 T = 1 only at 0", (line != 0.0) & (value >= 1.0), (line,), value)
    _fail("T3 T(0) = 1", (line == 0.0) & (value != 1.0), (line,), value)
    checked += ["T1", "T2", "T3"]

    # twist
    excess = spec.twist_excess(line)
    support = (line > 0.5 * eps) & (line < 1.5 * eps)
    interior = (line > 0.6 * eps) & (line < 1.4 * eps)
    _fail("X1 X >= x", excess < 0.0, (line,), excess)
    _fail("X1 X = x outside (eps/2, 3 eps/2)", ~support & (excess != 0.0), (line,), excess)
    _fail("X1 X > x inside", interior & (excess <= 0.0), (line,), excess)
    slope = spec.X_prime(line)
    centre = np.abs(line - eps) <= EXACT_TOL * eps
    _fail("X2 X' >= 0", slope < -EXACT_TOL, (line,), slope)
    _fail("X2 X' > 0 away from eps", ~centre & (slope <= 0.0), (line,), slope)
    at_eps = float(spec.X(eps))
    if abs(at_eps - (eps + eps**2)) > EXACT_TOL:
        raise PropertyVerificationFailure("X3 X(eps) = eps + eps^2", (eps,), at_eps)
    if abs(float(spec.X_prime(eps))) > EXACT_TOL:
        raise PropertyVerificationFailure("X2 X'(eps) = 0", (eps,), float(spec.X_prime(eps)))
    _fail("X4 X - x < 2 eps^2", excess >= 2.0 * eps**2, (line,), excess)
    checked += ["X1", "X2", "X3", "X4"]

    # B
    excess = spec.B(t, x) - x
    _fail("B2 0 <= B - x < 2 eps^2", (excess < 0.0) | (excess >= 2.0 * eps**2), (t, x), excess)
    bx, bt = spec.B_x(t, x), spec.B_t(t, x)
    critical = (t == 0.0) & (np.abs(x - eps) <= EXACT_TOL * eps)
    if not np.any(critical):
        raise PlugConstructionError("the property grid misses the critical point (0, eps)")
    _fail("B1 B_x > 0 away from (0, eps)", ~critical & (bx <= 0.0), (t, x), bx)
    gradient = np.hypot(bx, bt)
    _fail("B1 (0, eps) is critical", critical & (gradient > EXACT_TOL), (t, x), gradient)
    checked += ["B1", "B2"]

    # cut-off
    if spec.dimension > 3:
        length = spec.rho_max
        rho = np.linspace(0.0, length, samples + 1)
        value, slope = spec.cut(rho), spec.cut_prime(rho)
        _fail("c1 cut = 0 near eps^2/2", (rho >= 7.0 * length / 8.0) & (value != 0.0), (rho,), value)
        near_zero = rho <= length / 8.0
        _fail("c2 cut = 1 - rho near 0", near_zero & (np.abs(value - (1.0 - rho)) > EXACT_TOL), (rho,), value)
        _fail("c3 cut' <= 0", slope > 0.0, (rho,), slope)
        _fail("c3 cut' > -4/eps^2", slope <= -4.0 / eps**2, (rho,), slope)
        _fail("c values in [0, 1]", (value < -EXACT_TOL) | (value > 1.0), (rho,), value)
        checked += ["c1", "c2", "c3"]

    logger.debug("plug eps=%g: properties %s hold on %d samples", eps, ", ".join(checked), samples)
    return PropertyReport(checked=tuple(checked), samples=samples)
