"""
Hypothesis checks for the persistence theorems.

Each ``certify_*`` function evaluates the hypotheses of one theorem on a
concrete model and conformal factor, records every inequality with its
margin in a ledger and returns a :class:`Certificate` with the orbit count and
period window the theorem guarantees. Failed hypotheses never raise: the
certificate comes back invalid. :func:`cross_validate` then counts the orbits
an actual scan finds in the window.
"""

import logging
import math

from reebrigidity import config
from reebrigidity.constellation import build, distinctness_threshold
from reebrigidity.dynamics.families import ClosedOrbit, floquet
from reebrigidity.exceptions import (
    ChartError,
    ConstellationNotRigid,
    HypothesisError,
    IntegrationError,
    MissingBundleData,
    MonodromyConditioning,
    SeedingExhausted,
    SingularReebSystem,
)
from reebrigidity.geometry.calculus import ReebField
from reebrigidity.geometry.classes import HomotopyClass
from reebrigidity.geometry.factors import FactorExtrema
from reebrigidity.ledger import Certificate, CertificateDistinctness, CrossValidation, LedgerEntry, axiom
from reebrigidity.spectrum import analytic_spectrum, numeric_spectrum

logger = logging.getLogger(__name__)

_NUMERIC_FAILURES = (ChartError, IntegrationError, SingularReebSystem, MonodromyConditioning)

_PERSIST_THEOREMS = {
    "Torus3": "T3",
    "CutS2xS1": "S2xS1",
    "CutS3": "S3",
    "FlatTorusCosphere": "FlatTorus",
}

# theorems whose orbits cannot be recomputed from a catalog model
_NOT_SCANNABLE = ("Prequantization", "Katok", "Fast")


def factor_range(factor, model=None):
    """
    Normalize a conformal factor, its extrema or a (min, max) pair to
    :class:`FactorExtrema`.
    """
    if isinstance(factor, FactorExtrema):
        return factor
    if isinstance(factor, (tuple, list)):
        low, high = float(factor[0]), float(factor[1])
        if not 0 < low <= high:
            raise ValueError(f"factor range must satisfy 0 < min <= max, got ({low}, {high})")
        return FactorExtrema(shape_min=low, shape_max=high, shape_min_lower=low, shape_max_upper=high)
    if model is None:
        raise ValueError("a model is needed to compute the extrema of a factor")
    return factor.extrema(model)


def _factor_name(factor):
    if isinstance(factor, (tuple, list)):
        return f"f in [{float(factor[0]):g}, {float(factor[1]):g}]"
    return getattr(factor, "name", "")


def _ratio_entry(name, extrema, bound):
    return LedgerEntry(name=name, lhs=extrema.ratio, rhs=bound, lhs_enclosed=extrema.ratio_enclosed)


def _bind(certificate, model, factor):
    if isinstance(factor, (tuple, list, FactorExtrema)):
        return certificate.bind(model, None)
    return certificate.bind(model, factor)


def certify_sphere(model, factor):
    """
    At least n orbits with period in [pi min f, pi max f] when
    max f / min f < 2 on the sphere S^(2n-1).
    """
    if model.kind != "Sphere":
        raise HypothesisError(f"the sphere certificate needs a round sphere, got {model.label}")
    extrema = factor_range(factor, model)
    ledger = (
        _ratio_entry("max(f)/min(f) < 2", extrema, 2.0),
        axiom("every form f lambda_0 with this pinching carries n orbits in the window"),
    )
    certificate = Certificate(
        theorem="EL-sphere",
        model=model.label,
        factor=_factor_name(factor),
        ledger=ledger,
        count=model.n,
        window=(math.pi * extrema.min, math.pi * extrema.max),
        distinctness=CertificateDistinctness(verdict="distinct-only"),
        parameters={"ratio": extrema.ratio, "ratio_enclosed": extrema.ratio_enclosed},
    )
    logger.info(certificate.summary())
    return _bind(certificate, model, factor)


def certify_prequantization(dim_q, alpha_order, factor, model=None, primitive=False, filled=False):
    """
    A prequantization form over (Q, omega) rescaled by f.

    :param dim_q: real dimension of the base Q
    :param alpha_order: order of the class of the fibre, ``None`` for infinite
    :param primitive: the fibre class is primitive
    :param filled: use the bound |alpha_f| + 1 of an exactly filled bundle
    :raises MissingBundleData: when the bundle data is absent or inconsistent
    """
    if dim_q is None or int(dim_q) != dim_q or dim_q <= 0 or dim_q % 2:
        raise MissingBundleData(f"the base dimension must be a positive even integer, got {dim_q!r}")
    if alpha_order is not None and (int(alpha_order) != alpha_order or alpha_order < 1):
        raise MissingBundleData(f"the order of the fibre class must be a positive integer, got {alpha_order!r}")
    extrema = factor_range(factor, model)
    if filled:
        bound = math.inf if alpha_order is None else alpha_order + 1.0
        ledger = [_ratio_entry("max(f)/min(f) < |alpha_f| + 1", extrema, bound)]
    else:
        ledger = [_ratio_entry("max(f)/min(f) < 2", extrema, 2.0)]
    ledger.append(
        axiom(
            "the Reeb flow of lambda_Q is the free circle action of period 2 pi",
            status="assumed",
            note="bundle data supplied by the caller",
        )
    )
    if filled:
        ledger.append(axiom("the bundle admits an exact symplectic filling", status="assumed"))

    if primitive or alpha_order is None:
        distinctness = CertificateDistinctness(verdict="geometric")
    else:
        threshold = 2.0 * math.pi / alpha_order * (extrema.max - extrema.min)
        distinctness = CertificateDistinctness(verdict="conditional", threshold=threshold)
    certificate = Certificate(
        theorem="Prequantization",
        model="" if model is None else model.label,
        factor=_factor_name(factor),
        ledger=tuple(ledger),
        count=dim_q // 2 + 1,
        window=(2.0 * math.pi * extrema.min, 2.0 * math.pi * extrema.max),
        distinctness=distinctness,
        parameters={"dim_q": float(dim_q), "alpha_order": math.inf if alpha_order is None else float(alpha_order)},
    )
    logger.info(certificate.summary())
    return _bind(certificate, model, factor)


def member_nondegeneracy(model, constellation, tol=None):
    """
    Floquet check of one representative per family against the dimension of
    its family. Falls back to an assumption when a representative is missing
    or the variational equation cannot be integrated there.
    """
    field = ReebField(model)
    classifications = []
    for entry in constellation.families:
        representative = entry.family.representative
        if representative is None:
            return axiom("members of the constellation are Morse-Bott", status="assumed", note="no representative")
        orbit = ClosedOrbit(
            point=representative, period=entry.period, homotopy_class=entry.homotopy_class, residual=0.0
        )
        try:
            data = floquet(orbit, field, family_dim=entry.family.nullity, tol=tol)
        except _NUMERIC_FAILURES as e:
            logger.debug("Floquet check of %s failed: %s", entry.family.label, e)
            return axiom("members of the constellation are Morse-Bott", status="assumed", note=str(e))
        classifications.append(data.classification)
    satisfied = all(c != "degenerate" for c in classifications)
    return LedgerEntry(
        name="members of the constellation are Morse-Bott",
        satisfied=satisfied,
        note=", ".join(classifications),
    )


def _window_nondegeneracy(model, factor, cls, window, seed_grid=None):
    name = "closed orbits of f lambda_0 in the window are nondegenerate"
    try:
        spec = numeric_spectrum(model, factor, cls, window, seed_grid)
    except SeedingExhausted as e:
        return axiom(name, status="assumed", note=str(e))
    degenerate = [e.family.label for e in spec.entries if e.classification == "degenerate"]
    return LedgerEntry(
        name=name,
        status="sampled",
        satisfied=not degenerate,
        note=f"{spec.size} families sampled" + (f", degenerate: {', '.join(degenerate)}" if degenerate else ""),
    )


def certify_persist(model, cls, period, factor, spec=None, filled=False, sample_orbits=False, strict=False):
    """
    Persistence of a rigid constellation of lambda_0 under f.

    :param spec: spectrum of lambda_0; the analytic spectrum of ``model`` when
        omitted
    :param filled: use the bound T+/T of an exactly filled manifold
    :param sample_orbits: scan f lambda_0 in the window and check the orbits
        found for nondegeneracy instead of assuming it
    :param strict: raise instead of recording a constellation that is not rigid
    :raises ConstellationNotRigid: with ``strict``, when the constellation is
        not rigid
    """
    cls = HomotopyClass.parse(cls) if isinstance(cls, str) else cls
    period = float(period)
    if spec is None:
        spec = analytic_spectrum(model, cap=max(config.SPECTRUM_CAP, 2.0 * period + 1.0))
    constellation = build(model, cls, period, spec)
    report = constellation.report
    if strict and not constellation.rigid:
        raise ConstellationNotRigid(f"constellation of class {cls.label} at T={period:.9g} is not rigid")

    theorem = _PERSIST_THEOREMS.get(getattr(model, "kind", ""), "Persist")
    if theorem == "FlatTorus":
        filled = True
    extrema = factor_range(factor, model)
    t_plus = constellation.t_plus
    notes = list(constellation.notes)
    if math.isinf(t_plus):
        notes.append(f"T+ is beyond the spectrum cap {spec.cap:.9g}")

    ledger = [
        LedgerEntry(name="constellation is simple", satisfied=report.simple, note=", ".join(report.non_simple)),
        LedgerEntry(name="T < T+", lhs=period, rhs=t_plus),
        LedgerEntry(name="T < T_min + T_min(alpha)", lhs=period, rhs=constellation.t_min + constellation.t_min_alpha),
    ]
    if model is not None and spec.provenance == "analytic":
        ledger.append(member_nondegeneracy(model, constellation))
    else:
        ledger.append(axiom("members of the constellation are Morse-Bott", status="assumed"))

    if filled:
        bound = t_plus / period
        ledger.append(_ratio_entry("max(f)/min(f) < T+/T", extrema, bound))
        ledger.append(axiom("lambda_0 admits an exact symplectic filling", status="assumed"))
    else:
        bound = min(t_plus / period, (constellation.t_min + constellation.t_min_alpha) / period)
        ledger.append(_ratio_entry("max(f)/min(f) < min{T+/T, (T_min + T_min(alpha))/T}", extrema, bound))

    window = (extrema.min * constellation.t_min_alpha, extrema.max * period)
    scannable = not isinstance(factor, (tuple, list, FactorExtrema)) and model is not None
    if sample_orbits and scannable:
        ledger.append(_window_nondegeneracy(model, factor, cls, window))
    else:
        ledger.append(axiom("closed orbits of f lambda_0 in the window are nondegenerate", status="assumed"))
    ledger.append(axiom("continuation maps between finely tuned Hamiltonians are isomorphisms"))

    distinctness = distinctness_threshold(cls, extrema, period, constellation.t_min_alpha)
    certificate = Certificate(
        theorem=theorem,
        model=spec.model,
        factor=_factor_name(factor),
        homotopy_class=cls.label,
        ledger=tuple(ledger),
        count=constellation.rank,
        window=window,
        distinctness=CertificateDistinctness.from_constellation(distinctness),
        parameters={
            "period": period,
            "t_min": constellation.t_min,
            "t_min_alpha": constellation.t_min_alpha,
            "t_plus": t_plus,
            "bound": bound,
            "ratio": extrema.ratio,
        },
        notes=tuple(notes),
    )
    logger.info(certificate.summary())
    return _bind(certificate, model, factor)


def certify_katok(epsilon, factor, n=1):
    """
    Hypersurfaces star-shaped around the cosphere bundle of a Katok metric with
    2n prime closed geodesics of lengths in [1 - epsilon, 1 + epsilon].

    :param factor: the range (min, max) of f_Sigma, or its extrema
    """
    extrema = factor_range(factor)
    bound = 2.0 * (1.0 - epsilon) / (1.0 + epsilon)
    ledger = (
        LedgerEntry(name="epsilon < 1/2", lhs=epsilon, rhs=0.5),
        _ratio_entry("max(f)/min(f) < 2(1 - epsilon)/(1 + epsilon)", extrema, bound),
        axiom("the prime geodesics of the Katok metric are nondegenerate", status="assumed"),
    )
    window = (2.0 * math.pi * extrema.min / (1.0 + epsilon), 2.0 * math.pi * extrema.max / (1.0 - epsilon))
    certificate = Certificate(
        theorem="Katok",
        model=f"katok({epsilon:g}, {n})",
        factor=_factor_name(factor),
        ledger=ledger,
        count=2 * n,
        window=window,
        distinctness=CertificateDistinctness(verdict="conditional", threshold=window[1] - window[0]),
        parameters={"epsilon": float(epsilon), "bound": bound},
    )
    logger.info(certificate.summary())
    return certificate


def certify_fast(report, c1, c2):
    """
    A fast closed orbit for a verified plug: f lambda_0 with min f = 1 and
    max f < 1 + c1 has a closed orbit in the plug class of period below c2.

    The exponent 2 delta + 4 eps is compared with ln(1 + c1), which is what
    gives max f < 1 + c1.

    :param report: a :class:`reebrigidity.plug.PlugReport`
    """
    eps, delta = report.epsilon, report.delta
    exponent = 2.0 * delta + 4.0 * eps
    gray, contact = report.gray, report.contact
    ledger = (
        LedgerEntry(name="period < c2", lhs=report.period, rhs=float(c2)),
        LedgerEntry(name="2 delta + 4 eps < ln(1 + c1)", lhs=exponent, rhs=math.log1p(c1)),
        LedgerEntry(name="max f < 1 + c1", lhs=gray.bound, rhs=1.0 + float(c1)),
        LedgerEntry(name="contact density > 0", lhs=0.0, rhs=contact.minimum.value, status="sampled"),
        LedgerEntry(
            name="inner density > delta eps / 2", lhs=contact.inner_bound, rhs=contact.inner.value, status="sampled"
        ),
        LedgerEntry(name="sup r_bar < 2 delta", lhs=gray.sup_bar.value, rhs=2.0 * delta, status="sampled"),
        LedgerEntry(name="sup r_hat < 4 eps", lhs=gray.sup_hat.value, rhs=4.0 * eps, status="sampled"),
        LedgerEntry(
            name="r_bar, r_hat >= 0 (min f = 1)", satisfied=gray.bar_holds and gray.hat_holds, status="sampled"
        ),
        LedgerEntry(
            name="kernel residual < tolerance", lhs=report.orbit.residual, rhs=config.KERNEL_TOL, status="sampled"
        ),
        axiom("a Legendrian knot in the class has a flow box where lambda_0 = dt + x d theta (+ kappa_0)"),
        axiom("Gray stability turns the integrand bounds into the bound on f"),
    )
    period = report.period
    certificate = Certificate(
        theorem="Fast",
        model=f"plug(dim {report.dimension})",
        factor=f"f <= e^{exponent:.6g}",
        homotopy_class=report.orbit.homotopy_class.label,
        ledger=ledger,
        count=1,
        window=(period, period),
        distinctness=CertificateDistinctness(verdict="geometric"),
        parameters={
            "c1": float(c1),
            "c2": float(c2),
            "epsilon": eps,
            "delta": delta,
            "bound": gray.bound,
            "grid_bound": gray.grid_bound,
            "period": period,
        },
        notes=("2 delta + 4 eps is kept below ln(1 + c1) so that e^(2 delta + 4 eps) < 1 + c1",),
    )
    logger.info(certificate.summary())
    return certificate


def cross_validate(certificate, seed_grid=None, tol=None):
    """
    Scan f lambda_0 over the certificate window and count the orbit families
    found, each weighted by the total Betti number of its parameter space.

    Scans that cover too little of their shots are ``unverified``, never
    ``fail``.
    """
    required = certificate.count
    if certificate.theorem in _NOT_SCANNABLE:
        return CrossValidation(verdict="unverified", required=required, note="orbits are not computable from data")
    model, factor = certificate.bound_model, certificate.bound_factor
    if model is None or factor is None:
        return CrossValidation(verdict="unverified", required=required, note="no model and factor bound")

    lo, hi = certificate.window
    window = (lo * (1.0 - 1e-6), hi * (1.0 + 1e-6))
    cls = HomotopyClass.parse(certificate.homotopy_class)
    try:
        spec = numeric_spectrum(model, factor, cls, window, seed_grid, tol)
    except SeedingExhausted as e:
        return CrossValidation(verdict="unverified", required=required, note=str(e))

    observed = sum(e.family.topology.betti_sum for e in spec.entries)
    nondegenerate = sum(1 for e in spec.entries if e.classification in ("nondegenerate", "morse-bott"))
    coverage = spec.coverage
    if coverage is None or coverage < config.COVERAGE_THRESHOLD:
        verdict, note = "unverified", f"scan coverage {coverage}"
    elif observed >= required:
        verdict, note = "pass", ""
    else:
        verdict, note = "fail", f"observed {observed} < {required}"
    result = CrossValidation(
        verdict=verdict,
        required=required,
        observed=observed,
        families=spec.size,
        nondegenerate=nondegenerate,
        periods=tuple(spec.periods()),
        coverage=coverage,
        note=note,
    )
    logger.info("cross validation of %s: %s (%d of %d)", certificate.theorem, verdict, observed, required)
    return result
