# pep8: noqa
from reebrigidity.certify import (
    certify_fast,
    certify_katok,
    certify_persist,
    certify_prequantization,
    certify_sphere,
    cross_validate,
    factor_range,
)
from reebrigidity.constellation import (
    RigidConstellation,
    RigidityReport,
    build,
    check_rigid,
    distinctness_threshold,
    ellipsoid_t_plus_table,
    rank,
)
from reebrigidity.dynamics import (
    ClosedOrbit,
    FloquetData,
    OrbitFamily,
    ScanReport,
    detect_cover,
    floquet,
    integrate,
    integrate_variational,
    scan,
    shoot_closed_orbit,
)
from reebrigidity.exceptions import *
from reebrigidity.geometry import (
    ConformalFactor,
    CutS2xS1,
    CutS3,
    Ellipsoid,
    FlatTorusCosphere,
    HomotopyClass,
    Point,
    ReebField,
    Sphere,
    Torus3,
    build_factor,
    build_model,
    conformal_distance,
    form_distance,
    kernel_residual,
    reeb_field,
)
from reebrigidity.ledger import Certificate, CrossValidation, LedgerEntry
from reebrigidity.plug import PlugForm, PlugReport, PlugSpec, analyse, choose_parameters, make_spec
from reebrigidity.profiles import (
    ConformalHamiltonian,
    Profile,
    TunedHamiltonian,
    action_gap,
    check_finely_tuned,
    check_tuned,
    conformal_sandwich,
    cost_norm,
    enumerate_negative,
    make_profile,
    tuned_hamiltonian,
)
from reebrigidity.properties import (
    ArrayProperty,
    BooleanProperty,
    FloatProperty,
    IntegerProperty,
    StringProperty,
)
from reebrigidity.scenario import Scenario, ScenarioResult, load_scenario, parse_scenario, run
from reebrigidity.spectrum import (
    PeriodSpectrum,
    SpectrumEntry,
    analytic_spectrum,
    katok,
    load_spectrum,
    negative_curvature,
    numeric_spectrum,
    t_min,
    t_min_alpha,
    t_plus,
)

from ._version import __version__

__author__ = "reebrigidity contributors"

__license__ = "MIT"
__package__ = "reebrigidity"
