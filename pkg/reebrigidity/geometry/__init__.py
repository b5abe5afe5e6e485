from reebrigidity.geometry.calculus import (
    ReebField,
    bordered_determinant,
    contact_eval,
    contact_volume,
    exterior_derivative,
    kernel_residual,
    reeb_of_conformal,
)
from reebrigidity.geometry.classes import FamilyTopology, HomotopyClass, Point
from reebrigidity.geometry.factors import (
    FACTOR_PRESETS,
    ConformalFactor,
    FactorExtrema,
    build_factor,
    conformal_distance,
    constant_factor,
    cos_bump_factor,
    ellipsoid_factor,
    expression_factor,
    form_distance,
    parse_expression,
)
from reebrigidity.geometry.models import (
    MODEL_KINDS,
    AnalyticFamily,
    Chart,
    ChartAxis,
    CutS2xS1,
    CutS3,
    Ellipsoid,
    FamilyDescriptor,
    FlatTorusCosphere,
    ModelDescriptor,
    ModelManifold,
    ParameterAxis,
    Sphere,
    Torus3,
    build_model,
)


def reeb_field(model, p):
    """
    The analytic Reeb vector of the model's reference form at ``p``. On the
    pole fibres of the cut models this is the analytic branch along the fibre.
    """
    return model.reeb(model.check_point(model.coords_of(p)))
