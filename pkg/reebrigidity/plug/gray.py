"""
Quantitative Gray stability for the plug, and the parameter choice that turns
the plug into a fast closed orbit for a prescribed pinching.

The plug form is reached from lambda_0 = dt + x d theta + kappa_0 in two
linear steps: first the dt coefficient (r_bar), then the d theta coefficient
(r_hat). For a path lambda_s with Reeb fields R_s, Gray's construction gives
psi^* lambda_1 = f lambda_0 with

    ln f <= integral over s of sup r_s,    r_s = (d lambda_s / ds)(R_s),

so sup r_bar < 2 delta and sup r_hat < 4 eps bound f by e^(2 delta + 4 eps).
The diffeomorphism itself is never integrated.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field
from scipy.integrate import trapezoid

from reebrigidity import config
from reebrigidity.certify import certify_fast
from reebrigidity.dynamics.families import ClosedOrbit
from reebrigidity.exceptions import (
    ContactViolation,
    GrayBoundViolation,
    KernelResidualError,
    PlugConstructionError,
    PropertyVerificationFailure,
)
from reebrigidity.ledger import Certificate
from reebrigidity.plug.bumps import EPSILON_LIMIT, PropertyReport, make_spec
from reebrigidity.plug.forms import (
    ContactReport,
    GridExtremum,
    PlugForm,
    _extremum,
    _first,
    delta_bound,
    locate_orbit,
    plug_grid,
    verify_contact,
)

logger = logging.getLogger(__name__)

NONNEGATIVE_TOL = 1e-15
SMALLEST_EPSILON = 1e-4


class GrayReport(BaseModel):
    """
    Grid suprema of the two Gray integrands and the bounds they certify.

    :param bound: e^(2 delta + 4 eps), the bound on max f
    :param grid_bound: e^(int sup r_bar + int sup r_hat) with the s integrals
        taken over the grid suprema; never larger than ``bound`` on an
        accepted plug
    """

    model_config = ConfigDict(frozen=True)

    epsilon: float
    delta: float
    sup_bar: GridExtremum
    sup_hat: GridExtremum
    min_bar: GridExtremum
    min_hat: GridExtremum
    integral_bar: float
    integral_hat: float
    grid: int
    s_grid: int
    rho_grid: Optional[int] = None

    @computed_field
    @property
    def bound(self) -> float:
        return math.exp(2.0 * self.delta + 4.0 * self.epsilon)

    @computed_field
    @property
    def grid_bound(self) -> float:
        return math.exp(self.integral_bar + self.integral_hat)

    @property
    def bar_holds(self):
        return self.min_bar.value >= -NONNEGATIVE_TOL and self.sup_bar.value < 2.0 * self.delta

    @property
    def hat_holds(self):
        return self.min_hat.value >= -NONNEGATIVE_TOL and self.sup_hat.value < 4.0 * self.epsilon


def _integrands(spec, t, x, rho):
    """
    s-independent pieces of the two integrands on the grid.
    """
    parts = {
        "x": x,
        "rho": 0.0 if rho is None else rho,
        "a": spec.A_hat(t, x, rho),
        "a_x": spec.A_hat_x(t, x, rho),
        "a_rho": 0.0 if rho is None else spec.A_hat_rho(t, x, rho),
        "b": spec.B_hat(t, x, rho),
        "b_x": spec.B_hat_x(t, x, rho),
        "b_rho": 0.0 if rho is None else spec.B_hat_rho(t, x, rho),
    }
    return parts


def _at(spec, parts, s):
    """
    r_bar and r_hat at one value of s, with the Reeb normalisations they
    divide by.
    """
    d = spec.delta
    x, rho, a, a_x, a_rho = parts["x"], parts["rho"], parts["a"], parts["a_x"], parts["a_rho"]
    b, b_x, b_rho = parts["b"], parts["b_x"], parts["b_rho"]
    bar_norm = 1.0 - s * d * a + s * d * x * a_x + s * d * rho * a_rho
    r_bar = -d * a / bar_norm
    bs, bs_x, bs_rho = x + s * (b - x), 1.0 + s * (b_x - 1.0), s * b_rho
    hat_norm = (1.0 - d * a) * bs_x + d * a_x * bs - rho * d * (a_x * bs_rho - a_rho * bs_x)
    r_hat = (b - x) * d * a_x / hat_norm
    return r_bar, bar_norm, r_hat, hat_norm


def gray_bounds(spec, grid=None, s_grid=None, rho_grid=None):
    """
    Suprema of r_bar and r_hat over an (s, t, x) grid, with rho added above
    dimension three.

    Above dimension three the default (t, x) grid is a quarter of
    ``config.PLUG_GRID`` per side.

    :raises GrayBoundViolation: when an integrand is negative or reaches
        2 delta (r_bar) or 4 eps (r_hat)
    :raises ContactViolation: when an interpolating form fails to be contact
    """
    if grid is None:
        grid = config.PLUG_GRID if spec.dimension == 3 else config.PLUG_GRID // 4
    s_grid = config.PLUG_S_GRID if s_grid is None else s_grid
    nodes, rho = plug_grid(spec, grid, rho_grid)
    if rho is None:
        t, x, r = nodes[:, None], nodes[None, :], None
        axes = (t, x)
    else:
        t, x, r = nodes[:, None, None], nodes[None, :, None], rho[None, None, :]
        axes = (t, x, r)
    parts = _integrands(spec, t, x, r)
    svalues = np.linspace(0.0, 1.0, s_grid + 1)

    def at(s):
        r_bar, bar_norm, r_hat, hat_norm = _at(spec, parts, s)
        shape = np.broadcast_shapes(np.shape(r_bar), np.shape(r_hat))
        everywhere = np.ones(shape, dtype=bool)
        full = (np.full(shape, s),) + axes
        norm = _first([_extremum(bar_norm, everywhere, full), _extremum(hat_norm, everywhere, full)])
        return (
            _extremum(r_bar, everywhere, full, np.argmax),
            _extremum(r_hat, everywhere, full, np.argmax),
            _extremum(r_bar, everywhere, full),
            _extremum(r_hat, everywhere, full),
            norm,
        )

    with ThreadPoolExecutor(max_workers=max(config.SCAN_WORKERS, 1)) as pool:
        results = list(pool.map(at, svalues))

    norm = _first(r[4] for r in results)
    if norm.value <= 0.0:
        raise ContactViolation(norm.value, norm.point, msg="an interpolating form is not contact")
    report = GrayReport(
        epsilon=spec.epsilon,
        delta=spec.delta,
        sup_bar=_first((r[0] for r in results), max),
        sup_hat=_first((r[1] for r in results), max),
        min_bar=_first(r[2] for r in results),
        min_hat=_first(r[3] for r in results),
        integral_bar=float(trapezoid([r[0].value for r in results], svalues)),
        integral_hat=float(trapezoid([r[1].value for r in results], svalues)),
        grid=len(nodes) - 1,
        s_grid=s_grid,
        rho_grid=None if rho is None else len(rho) - 1,
    )
    for name, extremum, bound in (
        ("r_bar", report.sup_bar, 2.0 * spec.delta),
        ("r_hat", report.sup_hat, 4.0 * spec.epsilon),
    ):
        if extremum.value >= bound:
            raise GrayBoundViolation(f"sup {name}", extremum.value, bound, extremum.point)
    for name, extremum in (("r_bar", report.min_bar), ("r_hat", report.min_hat)):
        if extremum.value < -NONNEGATIVE_TOL:
            raise GrayBoundViolation(f"min {name}", extremum.value, 0.0, extremum.point)
    logger.debug(
        "plug eps=%g delta=%g: sup r_bar %.6e, sup r_hat %.6e, grid bound %.9g, bound %.9g",
        spec.epsilon,
        spec.delta,
        report.sup_bar.value,
        report.sup_hat.value,
        report.grid_bound,
        report.bound,
    )
    return report


class PlugReport(BaseModel):
    """
    Everything verified about one plug, and the Fast certificate when the
    parameters were chosen for a target (c1, c2).
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    epsilon: float
    delta: float
    dimension: int
    delta_cap: float
    properties: PropertyReport
    contact: ContactReport
    orbit: ClosedOrbit
    gray: GrayReport
    c1: Optional[float] = None
    c2: Optional[float] = None
    certificate: Optional[Certificate] = None

    @computed_field
    @property
    def period(self) -> float:
        return self.orbit.period


def analyse(epsilon, delta, dim=3, grid=None, seed=0):
    """
    Build the plug for (epsilon, delta) and run every check on it.

    :raises PlugConstructionError: from whichever check fails first
    """
    spec = make_spec(epsilon, delta, dim)
    cap = delta_bound(spec, grid)
    if delta >= cap:
        logger.warning("plug eps=%g: delta=%g is not below the contact cap %.6g", epsilon, delta, cap)
    form = PlugForm(spec=spec)
    contact = verify_contact(form, grid)
    orbit = locate_orbit(form, seed=seed, grid=grid)
    gray = gray_bounds(spec, grid)
    return PlugReport(
        epsilon=epsilon,
        delta=delta,
        dimension=dim,
        delta_cap=cap,
        properties=spec.properties,
        contact=contact,
        orbit=orbit,
        gray=gray,
    )


def _ladder(upper):
    """
    1-2-5 values strictly below ``upper``, largest first, down to
    :data:`SMALLEST_EPSILON`.
    """
    exponent = math.floor(math.log10(upper))
    out = []
    while True:
        for m in (5.0, 2.0, 1.0):
            value = round(m * 10.0**exponent, 12)
            if value < SMALLEST_EPSILON:
                return out
            if value < upper:
                out.append(value)
        exponent -= 1


def _largest_below(upper):
    ladder = _ladder(upper) if 0 < upper < math.inf else []
    return ladder[0] if ladder else None


def choose_parameters(c1, c2, dim=3, grid=None, seed=0):
    """
    Pick (eps, delta) so that the plug has a closed orbit of period below c2
    and max f < 1 + c1, verify it, and certify the result.

    eps is the largest 1-2-5 value with 2 pi (eps + eps^2) < c2 and
    4 eps < ln(1 + c1); delta is the largest 1-2-5 value below both half the
    contact cap and (ln(1 + c1) - 4 eps) / 2. A plug that fails a check moves
    on to the next smaller eps.
    """
    if c1 <= 0 or c2 <= 0:
        raise PlugConstructionError(f"c1 and c2 must be positive, got {c1}, {c2}")
    budget = math.log1p(c1)
    failures = []
    for epsilon in _ladder(EPSILON_LIMIT):
        if 2.0 * math.pi * (epsilon + epsilon**2) >= c2 or 4.0 * epsilon >= budget:
            continue
        cap = delta_bound(make_spec(epsilon, 0.0, dim), grid)
        delta = _largest_below(min(0.5 * cap, 0.5 * (budget - 4.0 * epsilon)))
        if delta is None:
            continue
        try:
            report = analyse(epsilon, delta, dim, grid, seed)
        except (ContactViolation, GrayBoundViolation, KernelResidualError, PropertyVerificationFailure) as e:
            logger.warning("plug eps=%g delta=%g rejected: %s", epsilon, delta, e)
            failures.append(str(e))
            continue
        certificate = certify_fast(report, c1, c2)
        logger.info(
            "plug for c1=%g c2=%g: eps=%g delta=%g, period %.9g, bound %.9g",
            c1,
            c2,
            epsilon,
            delta,
            report.period,
            report.gray.bound,
        )
        return report.model_copy(update={"c1": float(c1), "c2": float(c2), "certificate": certificate})
    raise PlugConstructionError(f"no plug parameters found for c1={c1}, c2={c2}: {'; '.join(failures) or 'none tried'}")
