from reebrigidity.dynamics.families import ClosedOrbit, FloquetData, OrbitFamily, floquet, monodromy_floquet
from reebrigidity.dynamics.flow import field_jacobian, integrate, integrate_variational, return_residual
from reebrigidity.dynamics.scan import (
    ScanReport,
    cluster_orbits,
    orbit_image,
    recurrences,
    scan,
    scan_orbits,
    seed_points,
)
from reebrigidity.dynamics.shooting import detect_cover, shoot_closed_orbit
