from reebrigidity.plug.bumps import PlugSpec, PropertyReport, box_nodes, bump, make_spec, verify_properties
from reebrigidity.plug.forms import (
    ContactReport,
    GridExtremum,
    PlugForm,
    delta_bound,
    kernel_check,
    locate_orbit,
    verify_contact,
)
from reebrigidity.plug.gray import GrayReport, PlugReport, analyse, choose_parameters, gray_bounds
