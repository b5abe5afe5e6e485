"""
Radial Hamiltonians on the symplectization of a model.

A profile h rises from 0 to slope b over [1, 1 + a] along a convex ramp, is
linear with slope b up to c and bends back to slope 0 over [c, c + a]. The
tuned Hamiltonian H(tau, p) = h(e^(tau - kappa)) has one negative action
orbit family for each Reeb family of period below b e^(-kappa), and the
actions, gaps and costs computed here are the numbers that decide whether two
such Hamiltonians may be compared.
"""

import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, computed_field
from scipy.optimize import brentq
from scipy.special import logit

from reebrigidity import config
from reebrigidity.dynamics.flow import solve
from reebrigidity.exceptions import (
    BInSpectrum,
    BisectionNotBracketing,
    CTooSmall,
    EmptyBWindow,
    HypothesisError,
    InfeasibleArea,
    ProfileError,
    SpectrumGapUnknown,
)
from reebrigidity.geometry.calculus import ReebField
from reebrigidity.geometry.classes import HomotopyClass, Point
from reebrigidity.hooks import hooks
from reebrigidity.ledger import Inequality
from reebrigidity.util import gauss_legendre, smoothstep, smoothstep_prime

logger = logging.getLogger(__name__)

# bracket of the ramp exponent, searched in log scale
EXPONENT_RANGE = (1e-3, 1e4)
RAMP_AREA_TOL = 1e-10
STRICT_LEVEL = 1e-12


def _ramp(u, p):
    """
    g_p(u) = S(u^p): increasing from 0 to 1 on [0, 1], flat to all orders at
    both ends.
    """
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    return smoothstep(u**p)


def _ramp_prime(u, p):
    u = np.asarray(u, dtype=float)
    flat = np.atleast_1d(u)
    out = np.zeros_like(flat)
    inside = (flat > 0.0) & (flat < 1.0)
    v = flat[inside]
    out[inside] = smoothstep_prime(v**p) * p * v ** (p - 1.0)
    if u.ndim == 0:
        return float(out[0])
    return out


def _cumulative(p):
    panels = config.PROFILE_QUADRATURE_PANELS
    edges = np.linspace(0.0, 1.0, panels + 1)
    pieces = gauss_legendre(
        lambda u: _ramp(u, p), edges[:-1], edges[1:], panels=1, nodes=config.PROFILE_QUADRATURE_NODES
    )
    return np.concatenate([[0.0], np.cumsum(pieces)])


def _smoothstep_inverse(y):
    """
    Closed form inverse of S on (0, 1): with L = logit(y), S(v) = y solves
    L v^2 + (2 - L) v - 1 = 0.
    """
    L = logit(np.asarray(y, dtype=float))
    root = np.sqrt(L * L + 4.0)
    d = np.where(L > 0, 4.0 / (root + np.abs(L)), root - L)
    return 2.0 / (d + 2.0)


def _split(s):
    s = np.asarray(s, dtype=float)
    return s.ndim == 0, np.atleast_1d(s)


def _join(scalar, out):
    return float(out[0]) if scalar else out


class Profile(BaseModel):
    """
    A profile function h in the class fixed by (a, b, c).

    :param a: width of the two bends, and h(1 + a) = a^2
    :param b: slope of the linear part
    :param c: start of the concave bend
    :param p: exponent of the convex ramp; solved by :meth:`build`
    """

    model_config = ConfigDict(validate_assignment=True)

    a: float = Field(gt=0)
    b: float = Field(gt=0)
    c: float = Field(gt=0)
    p: Optional[float] = None

    _table = PrivateAttr(default=None)

    def pre_build(self):
        if self.a >= self.b:
            raise InfeasibleArea(self.a, self.b)
        if self.c <= 1.0 + self.a:
            raise ProfileError(f"c = {self.c} must exceed 1 + a = {1.0 + self.a}")

    @hooks
    def build(self):
        """
        Solve the ramp exponent so that the ramp encloses area a^2, i.e. the
        integral of g_p over [0, 1] equals a / b.
        """
        target = self.a / self.b
        lower, upper = (math.log(x) for x in EXPONENT_RANGE)

        def excess(log_p):
            return _cumulative(math.exp(log_p))[-1] - target

        if excess(lower) * excess(upper) > 0:
            raise BisectionNotBracketing("ramp exponent", *EXPONENT_RANGE)
        log_p = brentq(excess, lower, upper, xtol=1e-15, rtol=4.5e-16, maxiter=200)
        self.p = math.exp(log_p)
        self._table = _cumulative(self.p)
        logger.debug("profile a=%g b=%g c=%g: ramp exponent %.12g", self.a, self.b, self.c, self.p)
        return self

    def post_build(self):
        self.verify()

    @property
    def table(self):
        if self._table is None:
            if self.p is None:
                raise ProfileError("the profile has not been built")
            self._table = _cumulative(self.p)
        return self._table

    def ramp_integral(self, u):
        """
        G(u), the integral of g_p over [0, u], from the cumulative panel table
        plus one Gauss-Legendre panel.
        """
        table = self.table
        panels = len(table) - 1
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        k = np.minimum(np.floor(u * panels).astype(int), panels - 1)
        start = k / panels
        partial = gauss_legendre(
            lambda v: _ramp(v, self.p), start, u, panels=1, nodes=config.PROFILE_QUADRATURE_NODES
        )
        return table[k] + partial

    @property
    def ramp_area(self):
        """
        h(1 + a) = a b G(1), equal to a^2 up to the exponent solve.
        """
        return self.a * self.b * float(self.table[-1])

    @computed_field
    @property
    def plateau(self) -> float:
        if self.p is None:
            return self.b * (self.c - 1.0 - self.a) + 2.0 * self.a**2
        return self.b * (self.c - 1.0 - self.a) + 2.0 * self.ramp_area

    def h(self, s):
        scalar, s = _split(s)
        a, b, c = self.a, self.b, self.c
        out = np.zeros_like(s)
        ramp = (s > 1.0) & (s < 1.0 + a)
        line = (s >= 1.0 + a) & (s <= c)
        bend = (s > c) & (s < c + a)
        top = s >= c + a
        area = self.ramp_area
        out[ramp] = a * b * self.ramp_integral((s[ramp] - 1.0) / a)
        out[line] = area + b * (s[line] - 1.0 - a)
        w = (s[bend] - c) / a
        out[bend] = area + b * (c - 1.0 - a) + a * b * (self.table[-1] - self.ramp_integral(1.0 - w))
        out[top] = self.plateau
        return _join(scalar, out)

    def h_prime(self, s):
        scalar, s = _split(s)
        a, b, c = self.a, self.b, self.c
        out = np.zeros_like(s)
        ramp = (s > 1.0) & (s < 1.0 + a)
        line = (s >= 1.0 + a) & (s <= c)
        bend = (s > c) & (s < c + a)
        out[ramp] = b * _ramp((s[ramp] - 1.0) / a, self.p)
        out[line] = b
        out[bend] = b * _ramp(1.0 - (s[bend] - c) / a, self.p)
        return _join(scalar, out)

    def h_second(self, s):
        scalar, s = _split(s)
        a, b, c = self.a, self.b, self.c
        out = np.zeros_like(s)
        ramp = (s > 1.0) & (s < 1.0 + a)
        bend = (s > c) & (s < c + a)
        out[ramp] = (b / a) * _ramp_prime((s[ramp] - 1.0) / a, self.p)
        out[bend] = -(b / a) * _ramp_prime(1.0 - (s[bend] - c) / a, self.p)
        return _join(scalar, out)

    def ramp_inverse(self, slope):
        """
        The level sigma in (1, 1 + a) with h'(sigma) = ``slope``.
        """
        slope = np.asarray(slope, dtype=float)
        if np.any(slope <= 0) or np.any(slope >= self.b):
            raise ProfileError(f"slope {slope} is outside the ramp range (0, {self.b})")
        v = _smoothstep_inverse(slope / self.b)
        sigma = 1.0 + self.a * v ** (1.0 / self.p)
        return float(sigma) if sigma.ndim == 0 else sigma

    def verify(self, samples=None):
        """
        Check the six defining properties on ``samples`` points each.

        Convexity on the ramp is checked as h'' >= 0 everywhere with h'' > 0
        wherever g_p is numerically strictly between 0 and 1; the ramp is flat
        to all orders at its ends, so h'' underflows there.

        :raises ProfileError: naming the first property that fails
        """
        samples = config.PROFILE_SAMPLES if samples is None else samples
        a, b, c = self.a, self.b, self.c
        interior = np.linspace(0.0, 1.0, samples + 2)[1:-1]

        below = np.linspace(-1.0, 1.0, samples)
        if np.any(self.h(below) != 0.0):
            raise ProfileError("profile property (h1) fails: h is not zero on s <= 1")

        ramp_values = _ramp(interior, self.p)
        strict = (ramp_values > STRICT_LEVEL) & (ramp_values < 1.0 - STRICT_LEVEL)
        convex = self.h_second(1.0 + a * interior)
        if np.any(convex < 0.0) or np.any(convex[strict] <= 0.0):
            raise ProfileError("profile property (h2) fails: h'' is not positive on (1, 1 + a)")

        residual = abs(self.h(1.0 + a) - a * a)
        if residual >= RAMP_AREA_TOL:
            raise ProfileError(f"profile property (h3) fails: |h(1 + a) - a^2| = {residual:.3e}")

        if np.any(self.h_prime(np.linspace(1.0 + a, c, samples)) != b):
            raise ProfileError("profile property (h4) fails: h' differs from b on [1 + a, c]")

        ramp_values = _ramp(1.0 - interior, self.p)
        strict = (ramp_values > STRICT_LEVEL) & (ramp_values < 1.0 - STRICT_LEVEL)
        concave = self.h_second(c + a * interior)
        if np.any(concave > 0.0) or np.any(concave[strict] >= 0.0):
            raise ProfileError("profile property (h5) fails: h'' is not negative on (c, c + a)")

        top = self.h(np.linspace(c + a, c + a + 2.0, samples))
        if np.any(np.abs(top - self.plateau) > 1e-12 * max(1.0, self.plateau)):
            raise ProfileError("profile property (h6) fails: h is not constant on s >= c + a")
        return True


def make_profile(a, b, c):
    """
    :raises InfeasibleArea: when a >= b
    :raises BisectionNotBracketing: when no ramp exponent reaches area a^2
    """
    profile = Profile(a=a, b=b, c=c)
    profile.build()
    return profile


class TunedHamiltonian(BaseModel):
    """
    H(tau, p) = h(e^(tau - kappa)); it vanishes for tau <= kappa and is
    constant for tau >= kappa + ln(c + a).
    """

    model_config = ConfigDict(frozen=True)

    profile: Profile
    kappa: float = Field(default=0.0, ge=0)

    @property
    def a(self):
        return self.profile.a

    @property
    def b(self):
        return self.profile.b

    @property
    def c(self):
        return self.profile.c

    @property
    def threshold(self):
        """
        b e^(-kappa): Reeb periods below this give negative action orbits.
        """
        return self.b * math.exp(-self.kappa)

    @property
    def support_end(self):
        return self.kappa + math.log(self.c + self.a)

    def __call__(self, tau, p=None):
        return self.profile.h(np.exp(np.asarray(tau, dtype=float) - self.kappa))

    def with_width(self, a):
        return TunedHamiltonian(profile=make_profile(a, self.b, self.c), kappa=self.kappa)


def tuned_hamiltonian(a, b, c, kappa=0.0):
    return TunedHamiltonian(profile=make_profile(a, b, c), kappa=kappa)


class NegativeOrbitRecord(BaseModel):
    """
    A negative action 1-periodic orbit x(t) = (tau, gamma(h'(sigma) e^(-kappa) t))
    of a radial Hamiltonian, indexed by its Reeb family gamma.

    :param level: e^tau = sigma e^kappa
    :param slope_residual: |h'(sigma) e^(-kappa) - period|
    """

    model_config = ConfigDict(frozen=True)

    label: str
    homotopy_class: HomotopyClass
    period: float
    cover: int = 1
    representative: Optional[Point] = None
    sigma: float
    level: float
    tau: float
    action: float
    slope_residual: float


def _nearest_period_below(spec, value):
    below = [t for t in spec.periods() if t < value]
    return below[-1] if below else None


def c_margin(H, spec):
    """
    c (b - T e^kappa) - b (2a + 1) for the largest period T with T e^kappa < b,
    which bounds the actions of the upper bend orbits from below.

    :raises SpectrumGapUnknown: when the spectrum stops before b e^(-kappa)
    """
    threshold = H.threshold
    if spec.cap <= threshold:
        raise SpectrumGapUnknown(threshold, spec.cap)
    nearest = _nearest_period_below(spec, threshold)
    scaled = 0.0 if nearest is None else nearest * math.exp(H.kappa)
    return H.c * (H.b - scaled) - H.b * (2.0 * H.a + 1.0)


def check_c_large(H, spec):
    return c_margin(H, spec) > 0


def _record(H, entry):
    profile = H.profile
    slope = entry.period * math.exp(H.kappa)
    sigma = profile.ramp_inverse(slope)
    level = sigma * math.exp(H.kappa)
    return NegativeOrbitRecord(
        label=entry.family.label,
        homotopy_class=entry.homotopy_class,
        period=entry.period,
        cover=entry.cover,
        representative=entry.family.representative,
        sigma=sigma,
        level=level,
        tau=math.log(level),
        action=-level * entry.period + float(profile.h(sigma)),
        slope_residual=abs(float(profile.h_prime(sigma)) * math.exp(-H.kappa) - entry.period),
    )


def enumerate_negative(H, spec, cls=None, check_c=True):
    """
    One record per spectrum entry with period below b e^(-kappa), in order of
    period; all classes unless ``cls`` is given.

    :raises SpectrumGapUnknown: when the spectrum stops before b e^(-kappa)
    :raises BInSpectrum: when b e^(-kappa) is itself a period
    :raises CTooSmall: when c does not keep the upper bend actions positive
    """
    threshold = H.threshold
    if spec.cap <= threshold:
        raise SpectrumGapUnknown(threshold, spec.cap)
    if spec.contains(threshold):
        raise BInSpectrum(threshold, min(spec.periods(), key=lambda t: abs(t - threshold)))
    if check_c:
        margin = c_margin(H, spec)
        if margin <= 0:
            raise CTooSmall(H.c, margin)
    entries = [e for e in spec.of_class(cls) if e.period < threshold]
    records = [_record(H, e) for e in entries]
    logger.debug("%d negative action orbits below %.9g", len(records), threshold)
    return records


def action_bracket(H, record):
    """
    (-e^kappa (1 + a) T, -e^kappa T + a^2), the open interval every negative
    action of period T lies in.
    """
    scale = math.exp(H.kappa)
    return -scale * (1.0 + H.a) * record.period, -scale * record.period + H.a**2


def _distinct(values, tol=1e-12):
    out = []
    for v in sorted(values):
        if not out or v - out[-1] > tol * max(1.0, abs(v)):
            out.append(v)
    return out


def action_gap(records):
    """
    The largest difference of two unequal actions, 0 without such a pair.
    """
    values = _distinct([r.action for r in records])
    if len(values) < 2:
        return 0.0
    return values[-1] - values[0]


def action_gap_pair(first, second, tol=1e-12):
    """
    The supremum of A(x0) - A(x1) over pairs with unequal actions, 0 without
    such a pair.
    """
    gaps = [
        x.action - y.action
        for x in first
        for y in second
        if abs(x.action - y.action) > tol * max(1.0, abs(x.action))
    ]
    return max(gaps) if gaps else 0.0


def delta_s(t_min_alpha_value, t_min_value, gap_pair):
    """
    The cost budget min{T_min(alpha) / 2, T_min - gap} for homotopies between
    two finely tuned Hamiltonians.
    """
    return min(0.5 * t_min_alpha_value, t_min_value - gap_pair)


class TuningReport(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    name: str
    entries: tuple[Inequality, ...]
    values: dict[str, float] = {}

    @computed_field
    @property
    def holds(self) -> bool:
        return all(entry.holds for entry in self.entries)

    def failures(self):
        return [entry for entry in self.entries if not entry.holds]


def check_tuned(H, constellation):
    """
    The three tuning conditions of H against a rigid constellation, each as an
    inequality with its margin.
    """
    T = constellation.period
    scale = math.exp(H.kappa)
    bound = min(constellation.t_plus / T, (constellation.t_min + constellation.t_min_alpha) / T)
    gap = H.b - T * scale
    entries = (
        Inequality(name="(t1) e^kappa < min{T+/T, (T_min + T_min(alpha))/T}", lhs=scale, rhs=bound),
        Inequality(name="(t2) T e^kappa < b", lhs=T * scale, rhs=H.b),
        Inequality(name="(t2) b < T+", lhs=H.b, rhs=constellation.t_plus),
        Inequality(name="(t3) 2b/(b - T e^kappa) < c", lhs=2.0 * H.b / gap if gap > 0 else math.inf, rhs=H.c),
    )
    return TuningReport(name="tuned", entries=entries, values={"kappa": H.kappa, "a": H.a, "b": H.b, "c": H.c})


class FineTuningReport(TuningReport):
    """
    :param a_bar: the bisected largest width for which the three fine tuning
        inequalities hold
    :param a_bar_proof: the smaller width the closed form bounds guarantee
    """

    a_bar: float
    a_bar_proof: float
    delta: float
    delta_pair: float
    delta_s: float


def _fine_inequalities(H0, H1, spec, constellation):
    cls = constellation.homotopy_class
    first = enumerate_negative(H0, spec, cls)
    second = first if H1 is None else enumerate_negative(H1, spec, cls)
    actions = [r.action for r in first] + ([] if H1 is None else [r.action for r in second])
    gap = action_gap(first)
    gap_pair = action_gap_pair(first, second)
    if actions:
        low = Inequality(name="max action < -T_min(alpha)/2", lhs=max(actions), rhs=-0.5 * constellation.t_min_alpha)
    else:
        low = Inequality(name="max action < -T_min(alpha)/2", satisfied=True)
    entries = [low, Inequality(name="Delta(H) < T_min", lhs=gap, rhs=constellation.t_min)]
    if H1 is not None:
        entries.append(Inequality(name="Delta(H) < T_min for H1", lhs=action_gap(second), rhs=constellation.t_min))
    entries.append(Inequality(name="Delta(H0, H1) < T_min", lhs=gap_pair, rhs=constellation.t_min))
    return entries, gap, gap_pair


def _holds_at(a, H0, H1, spec, constellation):
    try:
        first = H0.with_width(a)
        second = None if H1 is None else H1.with_width(a)
        entries, _, _ = _fine_inequalities(first, second, spec, constellation)
    except (ProfileError, CTooSmall, BInSpectrum, SpectrumGapUnknown) as e:
        logger.debug("width a=%.6g rejected: %s", a, e)
        return False
    return all(entry.holds for entry in entries)


def bisect_a_bar(H0, spec, constellation, H1=None, rel_tol=1e-4, max_iter=40):
    """
    The largest width a, shared by H0 and H1, for which the fine tuning
    inequalities hold. Returns 0 when they fail even for narrow bends.
    """
    Hs = [H0] if H1 is None else [H0, H1]
    upper = min(min(0.9 * H.b, 0.999 * (H.c - 1.0)) for H in Hs)
    lower = 1e-3 * upper
    if not _holds_at(lower, H0, H1, spec, constellation):
        return 0.0
    if _holds_at(upper, H0, H1, spec, constellation):
        return upper
    for _ in range(max_iter):
        if upper - lower <= rel_tol * upper:
            break
        middle = 0.5 * (lower + upper)
        if _holds_at(middle, H0, H1, spec, constellation):
            lower = middle
        else:
            upper = middle
    return lower


def a_bar_closed_form(constellation, kappa0=0.0, kappa1=None):
    """
    The width below which the action bounds -e^kappa (1 + a) T < A < -e^kappa T_min(alpha) + a^2
    force all three fine tuning inequalities.
    """
    kappa1 = kappa0 if kappa1 is None else kappa1
    T, t_min_value, t_alpha = constellation.period, constellation.t_min, constellation.t_min_alpha
    e0, e1 = math.exp(kappa0), math.exp(kappa1)
    terms = []
    radicand = e0 * t_alpha - 0.5 * t_alpha
    terms.append(math.sqrt(radicand) if radicand > 0 else 0.0)
    terms.append(max((t_min_value - e0 * (T - t_alpha)) / (e0 * T), 0.0))
    linear, constant = e1 * T, t_min_value + e0 * t_alpha - e1 * T
    if constant > 0:
        terms.append(0.5 * (-linear + math.sqrt(linear * linear + 4.0 * constant)))
    else:
        terms.append(0.0)
    return min(terms)


def check_finely_tuned(H0, spec, constellation, H1=None):
    """
    The fine tuning inequalities at the actual widths, the bisected and the
    closed form width thresholds, and the cost budget Delta_s.
    """
    entries, gap, gap_pair = _fine_inequalities(H0, H1, spec, constellation)
    a_bar = bisect_a_bar(H0, spec, constellation, H1)
    a_bar_proof = a_bar_closed_form(constellation, H0.kappa, None if H1 is None else H1.kappa)
    budget = delta_s(constellation.t_min_alpha, constellation.t_min, gap_pair)
    widest = H0.a if H1 is None else max(H0.a, H1.a)
    entries.append(Inequality(name="a < a_bar", lhs=widest, rhs=a_bar))
    entries.append(Inequality(name="Delta_s > 0", lhs=0.0, rhs=budget))
    logger.info("fine tuning: a_bar=%.6g (closed form %.6g), Delta_s=%.6g", a_bar, a_bar_proof, budget)
    return FineTuningReport(
        name="finely tuned",
        entries=tuple(entries),
        values={"kappa": H0.kappa, "a": H0.a, "b": H0.b, "c": H0.c},
        a_bar=a_bar,
        a_bar_proof=a_bar_proof,
        delta=gap,
        delta_pair=gap_pair,
        delta_s=budget,
    )


def _grid(H0, H1, model=None, taus=512, points=32):
    ends = [H.support_end for H in (H0, H1)]
    scales = [getattr(H, "max_factor", 1.0) for H in (H0, H1)]
    hi = max(ends) + math.log(max(scales)) + 0.5
    lo = min(getattr(H, "kappa", 0.0) for H in (H0, H1)) - 0.5
    tau = np.linspace(lo, hi, taus)
    if model is None:
        return tau, [None]
    return tau, list(model.random_points(points, seed=0))


def _difference(H0, H1, model=None):
    tau, ps = _grid(H0, H1, model)
    return np.concatenate([np.atleast_1d(H1(tau, p) - H0(tau, p)) for p in ps])


def linear_cost(H0, H1, model=None):
    """
    max (H1 - H0) over a (tau, p) grid: the cost of the linear homotopy from
    H0 to H1. It is not clipped at 0.
    """
    return float(np.max(_difference(H0, H1, model)))


def cost_norm(H0, H1, model=None):
    diff = _difference(H0, H1, model)
    return float(np.max(diff) - np.min(diff))


class ConformalHamiltonian:
    """
    G(tau, p) = h(e^tau / f(p)) on the symplectization of lambda_0, which is the
    Hamiltonian h(e^tau) of f * lambda_0 moved over by tau -> tau + ln f(p).
    """

    def __init__(self, model, factor, profile):
        self.model = model
        self.factor = factor
        self.profile = profile
        self.max_factor = factor.extrema(model).max
        self.kappa = 0.0

    @property
    def support_end(self):
        return math.log(self.profile.c + self.profile.a)

    def __call__(self, tau, p=None):
        if p is None:
            raise ValueError("G depends on the point of the manifold")
        return self.profile.h(np.exp(np.asarray(tau, dtype=float)) / float(self.factor(np.asarray(p))))

    def lift(self, record, p):
        """
        The symplectization coordinate of a record at the point p of its orbit.
        """
        return record.tau + math.log(float(self.factor(np.asarray(p))))


def _shift(factor, mode):
    if mode == "log":
        return lambda p: math.log(float(factor(p)))
    if mode == "literal":
        return lambda p: float(factor(p))
    raise ValueError(f"unknown shift {mode!r}")


def pullback_residual(model, factor, shift="log", samples=100, seed=0, h=1e-6):
    """
    The largest relative defect of Psi*(e^tau lambda_0) = e^tau f lambda_0 at
    random (tau, p, v), with Psi(tau, p) = (tau + s(p), p) differentiated by
    central differences.

    :param shift: ``log`` for s = ln f, ``literal`` for s = f
    """
    s = _shift(factor, shift)
    rng = np.random.default_rng(seed)
    points = model.random_points(samples, seed=seed)
    worst = 0.0
    for p in points:
        tau = rng.uniform(-1.0, 1.0)
        frame = model.tangent_frame(p)
        v = frame @ rng.normal(size=frame.shape[1])
        v_tau = rng.normal()

        def psi(t, q):
            return t + s(q), q

        plus = psi(tau + h * v_tau, p + h * v)
        minus = psi(tau - h * v_tau, p - h * v)
        push = (plus[1] - minus[1]) / (2.0 * h)
        image_tau, image_p = psi(tau, p)
        pulled = math.exp(image_tau) * float(model.contact_form(image_p) @ push)
        target = math.exp(tau) * float(factor(p)) * float(model.contact_form(p) @ v)
        scale = math.exp(tau) * float(factor(p)) * max(float(np.linalg.norm(v)), 1e-300)
        worst = max(worst, abs(pulled - target) / scale)
    logger.debug("pullback residual with %s shift: %.3e", shift, worst)
    return worst


class SandwichReport(BaseModel):
    """
    :param b_window: the open interval (T max f, min{T+, T_min + T_min(alpha)})
        the slope is chosen from
    :param period_window: [T_min(alpha), T max f], which every record's period
        must lie in
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    b: float
    b_window: tuple[float, float]
    period_window: tuple[float, float]
    records: tuple[NegativeOrbitRecord, ...]
    periods_in_window: bool
    monotone: bool
    pullback_log: float
    pullback_literal: float
    notes: tuple[str, ...] = ()


def conformal_sandwich(model, factor, profile, constellation, lam_spec, cls=None):
    """
    Enumerate the negative action orbits of G(tau, p) = h(e^tau / f(p)) from the
    spectrum of f * lambda_0 and check that G is squeezed between
    h(e^tau) and h(e^tau / max f).

    :param constellation: rigid constellation of lambda_0 at period T
    :param lam_spec: the spectrum of f * lambda_0
    :raises EmptyBWindow: when T max f >= min{T+, T_min + T_min(alpha)}
    """
    extrema = factor.extrema(model)
    if abs(extrema.min - 1.0) > 1e-6:
        raise HypothesisError(f"the sandwich needs min f = 1, got {extrema.min:.9g}")
    cls = constellation.homotopy_class if cls is None else cls
    cls = HomotopyClass.parse(cls) if isinstance(cls, str) else cls
    T = constellation.period
    lower = T * extrema.max
    upper = min(constellation.t_plus, constellation.t_min + constellation.t_min_alpha)
    if not lower < upper:
        raise EmptyBWindow(lower, upper)
    b = profile.b
    if not lower < b < upper:
        raise HypothesisError(f"b = {b:.9g} is outside the window ({lower:.9g}, {upper:.9g})")
    if lam_spec.contains(b, cls):
        raise BInSpectrum(b, min(lam_spec.periods(cls), key=lambda t: abs(t - b)))

    G = ConformalHamiltonian(model, factor, profile)
    H = TunedHamiltonian(profile=profile)
    records = tuple(_record(H, e) for e in lam_spec.of_class(cls) if e.period < b)

    slack = 1e-9 * max(1.0, lower)
    in_window = all(constellation.t_min_alpha - slack <= r.period <= lower + slack for r in records)

    H1 = TunedHamiltonian(profile=profile, kappa=math.log(extrema.max))
    tau, points = _grid(H, H1, model)
    monotone = True
    for p in points:
        top, middle, bottom = H(tau), G(tau, p), H1(tau)
        monotone &= bool(np.all(top >= middle - 1e-12) and np.all(middle >= bottom - 1e-12))

    notes = ["the symplectization shift is tau -> tau + ln f(p); the literal shift tau + f(p) is reported alongside"]
    report = SandwichReport(
        b=b,
        b_window=(lower, upper),
        period_window=(constellation.t_min_alpha, lower),
        records=records,
        periods_in_window=in_window,
        monotone=monotone,
        pullback_log=pullback_residual(model, factor, "log"),
        pullback_literal=pullback_residual(model, factor, "literal"),
        notes=tuple(notes),
    )
    logger.info("sandwich on %s: %d records, b window (%.6g, %.6g)", model.label, len(records), lower, upper)
    return report


def line_integral_action(model, record, factor=None, profile=None, panels=16, nodes=32, tol=None):
    """
    -e^tau times the integral of lambda over the Reeb orbit, plus the integral of
    H over one period, by quadrature along the integrated orbit of the
    record's representative.
    """
    if record.representative is None:
        raise ValueError(f"record {record.label} has no representative point")
    field = ReebField(model, factor)
    x0 = model.coords_of(record.representative)
    sol = solve(field, x0, record.period, tol, dense_output=True)

    def integrand(times):
        states = sol.sol(np.ravel(times)).T
        values = np.array([float(field.form(x) @ field(x)) for x in states])
        return values.reshape(np.shape(times))

    length = float(gauss_legendre(integrand, 0.0, record.period, panels=panels, nodes=nodes))
    hamiltonian = 0.0 if profile is None else float(profile.h(record.sigma))
    return -record.level * length + hamiltonian
