class ReebRigidityException(Exception):
    """
    A base class that identifies all exceptions raised by :mod:`reebrigidity`.
    """

    pass


class ChartError(ValueError, ReebRigidityException):
    """
    A point or tangent vector does not belong to the chart it was evaluated in.
    """

    def __init__(self, chart, coords, msg):
        self.chart = chart
        self.coords = tuple(float(c) for c in coords)
        self.msg = msg

    def __str__(self):
        return f"Point {self.coords} is not valid in chart '{self.chart}': {self.msg}"


class PoleLocusError(ChartError):
    """
    A query touched the exceptional fibres of a cut model without an analytic
    branch to answer it, e.g. a finite difference stencil that crosses t = 0 or
    t = 2*pi.
    """

    pass


class SingularReebSystem(ArithmeticError, ReebRigidityException):
    """
    The linear system defining the Reeb field of a rescaled form is singular.

    This signals either a non-contact input or a stencil that left the chart.
    """

    def __init__(self, coords, smallest_singular_value, residual=None):
        self.coords = tuple(float(c) for c in coords)
        self.smallest_singular_value = float(smallest_singular_value)
        self.residual = None if residual is None else float(residual)

    def __str__(self):
        if self.residual is not None:
            return f"Reeb system at {self.coords} has least squares residual {self.residual:.3e}"
        return (
            f"Reeb system at {self.coords} is singular "
            f"(smallest singular value {self.smallest_singular_value:.3e})"
        )


class EnclosureTooWide(ValueError, ReebRigidityException):
    def __init__(self, name, half_width, margin):
        self.name = name
        self.half_width = float(half_width)
        self.margin = float(margin)

    def __str__(self):
        return (
            f"Enclosure of '{self.name}' has half width {self.half_width:.3e} "
            f"which swallows the margin {self.margin:.3e}"
        )


class IntegrationError(RuntimeError, ReebRigidityException):
    def __init__(self, msg, time=None, coords=None):
        self.msg = msg
        self.time = time
        self.coords = None if coords is None else tuple(float(c) for c in coords)

    def __str__(self):
        where = f" at t={self.time:.6g}" if self.time is not None else ""
        return f"{self.msg}{where}"


class StepSizeUnderflow(IntegrationError):
    pass


class LeftChart(IntegrationError):
    pass


class ShootingError(RuntimeError, ReebRigidityException):
    pass


class NoConvergence(ShootingError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = float(residual)

    def __str__(self):
        return (
            f"Shooting did not converge after {self.iterations} iterations "
            f"(last residual {self.residual:.3e})"
        )


class DegenerateJacobian(ShootingError):
    """
    The shooting Jacobian has a kernel beyond the phase condition.

    A kernel of dimension d usually means the orbit sits in a Morse-Bott family
    of dimension d, so callers treat this as information rather than failure.
    """

    def __init__(self, nullity):
        self.nullity = nullity

    def __str__(self):
        return f"Shooting Jacobian has nullity {self.nullity}"


class MonodromyConditioning(ArithmeticError, ReebRigidityException):
    def __init__(self, condition_number):
        self.condition_number = float(condition_number)

    def __str__(self):
        return f"Monodromy matrix is ill conditioned (cond = {self.condition_number:.3e})"


class SeedingExhausted(RuntimeError, ReebRigidityException):
    def __init__(self, coverage):
        self.coverage = coverage

    def __str__(self):
        return f"Every shot failed to converge: {self.coverage}"


class EmptyClassSpectrum(ValueError, ReebRigidityException):
    def __init__(self, homotopy_class, cap):
        self.homotopy_class = homotopy_class
        self.cap = cap

    def __str__(self):
        return f"No period of class {self.homotopy_class} below cap {self.cap}"


class SpectrumCapInsufficient(ValueError, ReebRigidityException):
    def __init__(self, cap, required):
        self.cap = float(cap)
        self.required = float(required)

    def __str__(self):
        return f"Spectrum enumerated up to {self.cap:.6g} but {self.required:.6g} is required"


class UnknownTopology(ValueError, ReebRigidityException):
    def __init__(self, tag):
        self.tag = tag

    def __str__(self):
        return f"Unknown family topology tag {self.tag!r}"


class ProfileError(ValueError, ReebRigidityException):
    pass


class InfeasibleArea(ProfileError):
    def __init__(self, a, b):
        self.a = a
        self.b = b

    def __str__(self):
        return f"Ramp area a^2 cannot be reached with slope b: need a < b, got a={self.a}, b={self.b}"


class BisectionNotBracketing(ProfileError):
    def __init__(self, name, lower, upper):
        self.name = name
        self.lower = lower
        self.upper = upper

    def __str__(self):
        return f"Bisection for {self.name} is not bracketed by [{self.lower}, {self.upper}]"


class BInSpectrum(ValueError, ReebRigidityException):
    def __init__(self, threshold, period):
        self.threshold = float(threshold)
        self.period = float(period)

    def __str__(self):
        return f"b*exp(-kappa) = {self.threshold:.12g} lies on the period {self.period:.12g}"


class CTooSmall(ValueError, ReebRigidityException):
    def __init__(self, c, value):
        self.c = float(c)
        self.value = float(value)

    def __str__(self):
        return f"c = {self.c:.6g} does not keep upper bend actions positive (bound {self.value:.6g} <= 0)"


class SpectrumGapUnknown(ValueError, ReebRigidityException):
    def __init__(self, threshold, cap):
        self.threshold = float(threshold)
        self.cap = float(cap)

    def __str__(self):
        return f"Spectrum cap {self.cap:.6g} does not reach b*exp(-kappa) = {self.threshold:.6g}"


class EmptyBWindow(ValueError, ReebRigidityException):
    def __init__(self, lower, upper):
        self.lower = float(lower)
        self.upper = float(upper)

    def __str__(self):
        return f"The slope window ({self.lower:.6g}, {self.upper:.6g}) is empty; the pinching hypothesis fails"


class HypothesisError(ValueError, ReebRigidityException):
    def __init__(self, msg):
        self.message = msg

    def __str__(self):
        return self.message


class ConstellationNotRigid(HypothesisError):
    pass


class MissingBundleData(HypothesisError):
    pass


class PlugConstructionError(ValueError, ReebRigidityException):
    def __init__(self, msg):
        self.message = msg

    def __str__(self):
        return self.message


class PropertyVerificationFailure(PlugConstructionError):
    def __init__(self, prop, point, value=None):
        self.prop = prop
        self.point = tuple(float(c) for c in point)
        self.value = value

    def __str__(self):
        return f"Property '{self.prop}' fails at {self.point} (value {self.value})"


class ContactViolation(PlugConstructionError):
    def __init__(self, min_density, point, msg="nonpositive contact density"):
        self.min_density = float(min_density)
        self.point = tuple(float(c) for c in point)
        self.message = msg

    def __str__(self):
        return f"{self.message}: minimum {self.min_density:.6e} at {self.point}"


class KernelResidualError(PlugConstructionError):
    def __init__(self, residual, point):
        self.residual = float(residual)
        self.point = tuple(float(c) for c in point)

    def __str__(self):
        return f"Kernel field residual {self.residual:.3e} at {self.point}"


class GrayBoundViolation(PlugConstructionError):
    def __init__(self, name, value, bound, point):
        self.name = name
        self.value = float(value)
        self.bound = float(bound)
        self.point = tuple(float(c) for c in point)

    def __str__(self):
        return f"{self.name} = {self.value:.6e} breaks the bound {self.bound:.6e} at {self.point}"


class ScenarioError(ValueError, ReebRigidityException):
    def __init__(self, msg):
        self.message = msg

    def __str__(self):
        return self.message


class InflateError(ScenarioError):
    def __init__(self, key, section, msg, line=None):
        self.field_name = key
        self.section = section
        self.msg = msg
        self.line = line

    def __str__(self):
        where = f" (line {self.line})" if self.line is not None else ""
        return f"Attempting to read field '{self.field_name}' of section [{self.section}]{where}: {self.msg}"


class RequiredField(ScenarioError):
    def __init__(self, key, section):
        self.field_name = key
        self.section = section

    def __str__(self):
        return f"field '{self.field_name}' is required in section [{self.section}]"


class UnknownPreset(ScenarioError):
    def __init__(self, kind, name):
        self.kind = kind
        self.name = name

    def __str__(self):
        return f"Unknown {self.kind} preset {self.name!r}"


__all__ = (
    ReebRigidityException.__name__,
    ChartError.__name__,
    PoleLocusError.__name__,
    SingularReebSystem.__name__,
    EnclosureTooWide.__name__,
    IntegrationError.__name__,
    StepSizeUnderflow.__name__,
    LeftChart.__name__,
    ShootingError.__name__,
    NoConvergence.__name__,
    DegenerateJacobian.__name__,
    MonodromyConditioning.__name__,
    SeedingExhausted.__name__,
    EmptyClassSpectrum.__name__,
    SpectrumCapInsufficient.__name__,
    UnknownTopology.__name__,
    ProfileError.__name__,
    InfeasibleArea.__name__,
    BisectionNotBracketing.__name__,
    BInSpectrum.__name__,
    CTooSmall.__name__,
    SpectrumGapUnknown.__name__,
    EmptyBWindow.__name__,
    HypothesisError.__name__,
    ConstellationNotRigid.__name__,
    MissingBundleData.__name__,
    PlugConstructionError.__name__,
    PropertyVerificationFailure.__name__,
    ContactViolation.__name__,
    KernelResidualError.__name__,
    GrayBoundViolation.__name__,
    ScenarioError.__name__,
    InflateError.__name__,
    RequiredField.__name__,
    UnknownPreset.__name__,
)
