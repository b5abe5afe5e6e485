"""
The plug contact form

    lambda = (1 - delta A^) dt + B^ d theta + kappa_0

on [-2 eps, 2 eps]^2 x R/2piZ x B(eps), with kappa_0 = 1/2 sum (q dp - p dq)
the Liouville form of the transverse ball (absent in dimension three, where
A^ = A and B^ = B). Its kernel field is

    K = B^_x d_t - B^_t d_x + delta A^_x d_theta + c (-p d_q + q d_p),
    c = delta (A^_rho B^_x - A^_x B^_rho),

and lambda(K) is the contact density: lambda ^ (d lambda)^(n-1) equals
(n-1)! lambda(K) times the coordinate volume.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field

from reebrigidity import config
from reebrigidity.dynamics.families import ClosedOrbit
from reebrigidity.exceptions import (
    ContactViolation,
    KernelResidualError,
    PlugConstructionError,
    PropertyVerificationFailure,
)
from reebrigidity.geometry.calculus import exterior_derivative
from reebrigidity.geometry.classes import HomotopyClass, Point
from reebrigidity.plug.bumps import EXACT_TOL, PlugSpec, box_nodes
from reebrigidity.util import gauss_legendre

logger = logging.getLogger(__name__)

PERIOD_TOL = 1e-10

# the theta circle of the flow box is the class the plug is inserted along
PLUG_CLASS = HomotopyClass(components=(1,))


class PlugForm(BaseModel):
    """
    :param spec: the bumps and parameters
    :param contact_verified: set by :func:`verify_contact`
    :param orbit_verified: set by :func:`locate_orbit`
    """

    model_config = ConfigDict(validate_assignment=True)

    spec: PlugSpec
    contact_verified: bool = False
    orbit_verified: bool = False
    min_density: Optional[float] = None

    @computed_field
    @property
    def dimension(self) -> int:
        return self.spec.dimension

    @property
    def epsilon(self):
        return self.spec.epsilon

    @property
    def delta(self):
        return self.spec.delta

    @property
    def orbit_period(self):
        """
        2 pi (eps + eps^2), the period the construction aims for.
        """
        return 2.0 * math.pi * (self.epsilon + self.epsilon**2)

    def _rho(self, rho):
        return None if self.dimension == 3 else rho

    def density_terms(self, t, x, rho=None):
        """
        The contact density as ``base + delta * slope``, with base = B^_x and

            slope = A^_x B^ - A^ B^_x - rho (A^_x B^_rho - A^_rho B^_x).
        """
        s, rho = self.spec, self._rho(rho)
        a, a_x = s.A_hat(t, x, rho), s.A_hat_x(t, x, rho)
        b, b_x = s.B_hat(t, x, rho), s.B_hat_x(t, x, rho)
        slope = a_x * b - a * b_x
        if rho is not None:
            slope = slope - rho * (a_x * s.B_hat_rho(t, x, rho) - s.A_hat_rho(t, x, rho) * b_x)
        return b_x, slope

    def density(self, t, x, rho=None):
        base, slope = self.density_terms(t, x, rho)
        return base + self.delta * slope

    def flat_density(self, t, x):
        """
        B_x (1 - delta A) + delta A_x B, the three dimensional density.
        """
        s = self.spec
        return s.B_x(t, x) * (1.0 - s.delta * s.A(t, x)) + s.delta * s.A_x(t, x) * s.B(t, x)

    def _split(self, points):
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dimension:
            raise PlugConstructionError(f"expected points of dimension {self.dimension}, got {points.shape[-1]}")
        t, x = points[..., 0], points[..., 1]
        z = points[..., 3:]
        rho = 0.5 * np.sum(z * z, axis=-1) if self.dimension > 3 else None
        return t, x, z, rho

    def covector(self, points):
        """
        lambda at ``points`` of shape (..., dimension), in the coordinates
        (t, x, theta, q_1, p_1, ..., q_(n-2), p_(n-2)).
        """
        t, x, z, rho = self._split(points)
        s = self.spec
        out = np.zeros(np.shape(points))
        out[..., 0] = 1.0 - s.delta * s.A_hat(t, x, rho)
        out[..., 2] = s.B_hat(t, x, rho)
        out[..., 3::2] = -0.5 * z[..., 1::2]
        out[..., 4::2] = 0.5 * z[..., 0::2]
        return out

    __call__ = covector

    def kernel(self, points):
        t, x, z, rho = self._split(points)
        s = self.spec
        b_x = s.B_hat_x(t, x, rho)
        a_x = s.A_hat_x(t, x, rho)
        out = np.zeros(np.shape(points))
        out[..., 0] = b_x
        out[..., 1] = -s.B_hat_t(t, x, rho)
        out[..., 2] = s.delta * a_x
        if rho is not None:
            c = np.asarray(s.delta * (s.A_hat_rho(t, x, rho) * b_x - a_x * s.B_hat_rho(t, x, rho)))
            out[..., 3::2] = -c[..., None] * z[..., 1::2]
            out[..., 4::2] = c[..., None] * z[..., 0::2]
        return out

    def orbit_point(self, theta=0.0):
        point = np.zeros(self.dimension)
        point[1] = self.epsilon
        point[2] = theta
        return point


class GridExtremum(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    point: tuple[float, ...]


class ContactReport(BaseModel):
    """
    Minima of the contact density over the verification grid.

    ``inner`` is taken over the inner rectangle (at rho = 0 above dimension
    three) and compared with delta eps / 2; ``outer`` is the minimum off that
    rectangle.
    """

    model_config = ConfigDict(frozen=True)

    minimum: GridExtremum
    inner: GridExtremum
    outer: GridExtremum
    inner_bound: float
    grid: int
    rho_grid: Optional[int] = None

    @computed_field
    @property
    def contact(self) -> bool:
        return self.minimum.value > 0.0

    @computed_field
    @property
    def inner_holds(self) -> bool:
        return self.inner.value > self.inner_bound


def _tiles(count):
    workers = max(config.SCAN_WORKERS, 1)
    size = max(1, math.ceil(count / (4 * workers)))
    return [slice(i, min(i + size, count)) for i in range(0, count, size)]


def scan_tiles(fn, count):
    """
    Evaluate ``fn(tile)`` on row tiles of a grid in a thread pool. Results
    come back in tile order, so reductions over them are deterministic.
    """
    tiles = _tiles(count)
    with ThreadPoolExecutor(max_workers=max(config.SCAN_WORKERS, 1)) as pool:
        return list(pool.map(fn, tiles))


def _extremum(values, mask, axes, reducer=np.argmin):
    """
    Extremum of ``values`` over ``mask`` with the point it is attained at.
    """
    if not np.any(mask):
        return None
    masked = np.where(mask, values, np.inf if reducer is np.argmin else -np.inf)
    index = np.unravel_index(reducer(masked), masked.shape)
    point = tuple(float(np.broadcast_to(axis, masked.shape)[index]) for axis in axes)
    return GridExtremum(value=float(masked[index]), point=point)


def _first(extrema, pick=min):
    extrema = [e for e in extrema if e is not None]
    return pick(extrema, key=lambda e: e.value) if extrema else None


def plug_grid(spec, grid=None, rho_grid=None):
    """
    The (t, x) nodes, and rho nodes above dimension three. The point (0, eps)
    is always a node.
    """
    grid = config.PLUG_GRID if grid is None else grid
    nodes = box_nodes(spec.epsilon, 2.0, grid)
    rho = None
    if spec.dimension > 3:
        rho_grid = config.PLUG_RHO_GRID if rho_grid is None else rho_grid
        rho = np.linspace(0.0, spec.rho_max, rho_grid + 1)
    return nodes, rho


def _axes(t, x, rho):
    if rho is None:
        return (t[:, None], x[None, :]), None
    return (t[:, None, None], x[None, :, None]), rho[None, None, :]


def verify_contact(form, grid=None, rho_grid=None):
    """
    Scan the contact density over the grid.

    :raises ContactViolation: when the grid minimum is not positive, or the
        inner rectangle minimum does not exceed delta eps / 2
    """
    spec = form.spec
    nodes, rho = plug_grid(spec, grid, rho_grid)
    (t0, t1), (x0, x1) = spec.inner_rectangle

    def tile(rows):
        (t, x), r = _axes(nodes[rows], nodes, rho)
        values = form.density(t, x, r)
        axes = (t, x) if r is None else (t, x, r)
        inner = (t >= t0) & (t <= t1) & (x >= x0) & (x <= x1)
        if r is not None:
            inner = inner & (r == 0.0)
        everywhere = np.ones(values.shape, dtype=bool)
        outer = ~((t >= t0) & (t <= t1) & (x >= x0) & (x <= x1))
        return (
            _extremum(values, everywhere, axes),
            _extremum(values, np.broadcast_to(inner, values.shape), axes),
            _extremum(values, np.broadcast_to(outer, values.shape), axes),
        )

    results = scan_tiles(tile, len(nodes))
    report = ContactReport(
        minimum=_first(r[0] for r in results),
        inner=_first(r[1] for r in results),
        outer=_first(r[2] for r in results),
        inner_bound=0.5 * spec.delta * spec.epsilon,
        grid=len(nodes) - 1,
        rho_grid=None if rho is None else len(rho) - 1,
    )
    logger.debug(
        "plug eps=%g delta=%g dim=%d: density minimum %.6e at %s, inner %.6e, outer %.6e",
        spec.epsilon,
        spec.delta,
        spec.dimension,
        report.minimum.value,
        report.minimum.point,
        report.inner.value,
        report.outer.value,
    )
    if not report.contact:
        raise ContactViolation(report.minimum.value, report.minimum.point)
    if not report.inner_holds:
        raise ContactViolation(
            report.inner.value, report.inner.point, msg="density on the inner rectangle at or below delta eps / 2"
        )
    form.contact_verified = True
    form.min_density = report.minimum.value
    return report


def delta_bound(spec, grid=None, rho_grid=None):
    """
    An admissible cap on delta.

    In dimension three this is 1 / |min(x A_x)| over the grid: off the inner
    rectangle the density is at least 1 + delta x A_x. Above dimension three
    the density is affine in delta, base + delta slope with base >= 0, and the
    cap is the exact grid value min(base / -slope) over the nodes with
    negative slope.
    """
    nodes, rho = plug_grid(spec, grid, rho_grid)
    if rho is None:
        t, x = nodes[:, None], nodes[None, :]
        lowest = float(np.min(x * spec.A_x(t, x)))
        if lowest >= 0.0:
            return math.inf
        return 1.0 / abs(lowest)

    form = PlugForm(spec=spec)

    def tile(rows):
        (t, x), r = _axes(nodes[rows], nodes, rho)
        base, slope = form.density_terms(t, x, r)
        negative = slope < 0.0
        if not np.any(negative):
            return math.inf
        return float(np.min(base[negative] / -slope[negative]))

    return min(scan_tiles(tile, len(nodes)))


def kernel_check(form, samples=None, seed=0, h=None):
    """
    max |d lambda(K, e_j)| over the coordinate frame at the orbit and at
    ``samples`` random points of the flow box, with d lambda from fourth order
    central differences.

    :raises KernelResidualError: when the residual exceeds ``config.KERNEL_TOL``
    """
    samples = config.KERNEL_SAMPLES if samples is None else samples
    h = config.PLUG_FD_STEP if h is None else h
    eps, dim = form.epsilon, form.dimension
    rng = np.random.default_rng(seed)
    points = np.zeros((samples, dim))
    points[:, 0:2] = rng.uniform(-2.0 * eps, 2.0 * eps, size=(samples, 2))
    points[:, 2] = rng.uniform(0.0, 2.0 * math.pi, size=samples)
    if dim > 3:
        direction = rng.normal(size=(samples, dim - 3))
        direction /= np.linalg.norm(direction, axis=1)[:, None]
        radius = eps * rng.uniform(size=samples) ** (1.0 / (dim - 3))
        points[:, 3:] = direction * radius[:, None]
    orbit = np.array([form.orbit_point(theta) for theta in np.linspace(0.0, 2.0 * math.pi, 4, endpoint=False)])
    points = np.vstack([orbit, points])

    worst, where = 0.0, points[0]
    for point in points:
        d = exterior_derivative(form.covector, point, h=h, order=4)
        residual = float(np.max(np.abs(form.kernel(point) @ d)))
        if residual > worst:
            worst, where = residual, point
    logger.debug("plug kernel residual %.3e at %s over %d points", worst, tuple(where), len(points))
    if worst > config.KERNEL_TOL:
        raise KernelResidualError(worst, where)
    return worst


def _uniqueness(form, grid=None, rho_grid=None):
    """
    The t-component B^_x of K is positive at every node but (0, eps, 0), so no
    other closed orbit stays in the flow box.
    """
    spec = form.spec
    nodes, rho = plug_grid(spec, grid, rho_grid)

    def tile(rows):
        (t, x), r = _axes(nodes[rows], nodes, rho)
        b_x = spec.B_hat_x(t, x, r)
        critical = (t == 0.0) & (np.abs(x - spec.epsilon) <= EXACT_TOL * spec.epsilon)
        if r is not None:
            critical = critical & (r == 0.0)
        axes = (t, x) if r is None else (t, x, r)
        return _extremum(b_x, np.broadcast_to(~critical, np.shape(b_x)), axes)

    lowest = _first(scan_tiles(tile, len(nodes)))
    if lowest.value <= 0.0:
        raise PropertyVerificationFailure("B1 K_t > 0 away from the orbit", lowest.point, lowest.value)
    return lowest


def locate_orbit(form, samples=None, seed=0, grid=None, rho_grid=None):
    """
    The fast orbit {t = 0, x = eps, z = 0} and its period.

    The point is checked to be critical for B^ with theta component delta A^_x
    of K, the period is the quadrature of lambda around the theta circle and
    must equal 2 pi (eps + eps^2), K is checked against d lambda at random
    points and K_t is checked positive elsewhere on the grid.

    :raises KernelResidualError: when K fails to annihilate d lambda
    :raises PlugConstructionError: when the point is not critical or the
        period is off
    """
    spec = form.spec
    eps = spec.epsilon
    rho = None if form.dimension == 3 else 0.0
    b_x, b_t = float(spec.B_hat_x(0.0, eps, rho)), float(spec.B_hat_t(0.0, eps, rho))
    if math.hypot(b_x, b_t) > EXACT_TOL:
        raise PlugConstructionError(f"(0, eps) is not critical for B: gradient ({b_x:.3e}, {b_t:.3e})")
    speed = spec.delta * float(spec.A_hat_x(0.0, eps, rho))
    if speed <= 0.0:
        raise PlugConstructionError(f"the kernel field does not turn along theta at (0, eps): {speed:.3e}")

    def loop(theta):
        points = np.zeros(np.shape(theta) + (form.dimension,))
        points[..., 1] = eps
        points[..., 2] = theta
        # the tangent of the loop is d_theta
        return form.covector(points)[..., 2]

    period = float(gauss_legendre(loop, np.array(0.0), np.array(2.0 * math.pi), panels=4, nodes=16))
    if abs(period - form.orbit_period) > PERIOD_TOL:
        raise PlugConstructionError(
            f"orbit period {period:.15g} differs from 2 pi (eps + eps^2) = {form.orbit_period:.15g}"
        )

    _uniqueness(form, grid, rho_grid)
    residual = kernel_check(form, samples, seed)
    form.orbit_verified = True
    logger.info("plug eps=%g delta=%g dim=%d: fast orbit of period %.12g", eps, spec.delta, form.dimension, period)
    return ClosedOrbit(
        point=Point.from_array("plug", form.orbit_point()),
        period=period,
        homotopy_class=PLUG_CLASS,
        residual=residual,
        family="fast orbit",
    )
