import logging

import numpy as np
from scipy.integrate import solve_ivp

from reebrigidity import config
from reebrigidity.exceptions import LeftChart, StepSizeUnderflow
from reebrigidity.geometry.classes import Point

logger = logging.getLogger(__name__)


def _tolerance(tol):
    return config.INTEGRATOR_TOL if tol is None else tol


def solve(field, x0, t, tol=None, dense_output=False, t_eval=None):
    """
    Run RK45 on the Reeb field from x0 for time t without wrapping periodic
    coordinates, so the end state carries the winding of the trajectory.

    :raises StepSizeUnderflow: when the integrator gives up
    :raises LeftChart: when a cut model trajectory reaches a pole fibre
    """
    tol = _tolerance(tol)
    x0 = np.asarray(x0, dtype=float)
    events = field.model.chart_events() or None
    sol = solve_ivp(
        lambda _, y: field(y),
        (0.0, float(t)),
        x0,
        method="RK45",
        rtol=tol,
        atol=tol,
        dense_output=dense_output,
        events=events,
        t_eval=t_eval,
    )
    if sol.status == -1:
        raise StepSizeUnderflow(sol.message, time=float(sol.t[-1]), coords=sol.y[:, -1])
    if sol.status == 1:
        raise LeftChart("trajectory left the chart", time=float(sol.t[-1]), coords=sol.y[:, -1])
    return sol


def flow_unwrapped(field, x0, t, tol=None):
    x0 = np.asarray(x0, dtype=float)
    if t == 0:
        return x0.copy()
    return solve(field, x0, t, tol).y[:, -1]


def integrate(field, x0, t, tol=None):
    """
    The time-t flow of the Reeb field, with periodic coordinates wrapped and
    constrained models projected back onto their constraint surface.

    Accepts a :class:`Point` (and then returns one) or a coordinate array.
    """
    model = field.model
    if isinstance(x0, Point):
        coords = model.coords_of(x0)
        if t == 0:
            return x0
        return model.point(model.normalize(flow_unwrapped(field, coords, t, tol)))
    x0 = np.asarray(x0, dtype=float)
    if t == 0:
        return x0.copy()
    return model.normalize(flow_unwrapped(field, x0, t, tol))


def field_jacobian(field, x, h=None):
    """
    Central difference Jacobian of the field, column j = d field / d x_j.
    """
    h = config.FD_STEP if h is None else h
    x = np.asarray(x, dtype=float)
    field.model.check_stencil(x, h)
    columns = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        columns.append((np.asarray(field(x + e)) - np.asarray(field(x - e))) / (2.0 * h))
    return np.column_stack(columns)


def integrate_variational(field, x0, t, tol=None, h=None):
    """
    Integrate the state together with the fundamental matrix of the
    linearized flow.

    :return: (unwrapped end state, fundamental matrix at time t)
    """
    tol = _tolerance(tol)
    x0 = np.asarray(x0, dtype=float)
    size = x0.size

    def rhs(_, y):
        state = y[:size]
        fundamental = y[size:].reshape(size, size)
        return np.concatenate([field(state), (field_jacobian(field, state, h) @ fundamental).ravel()])

    y0 = np.concatenate([x0, np.eye(size).ravel()])
    if t == 0:
        return x0.copy(), np.eye(size)
    sol = solve_ivp(rhs, (0.0, float(t)), y0, method="RK45", rtol=tol, atol=tol)
    if sol.status == -1:
        raise StepSizeUnderflow(sol.message, time=float(sol.t[-1]), coords=sol.y[:size, -1])
    end = sol.y[:, -1]
    return end[:size], end[size:].reshape(size, size)


def return_residual(field, x0, t, tol=None):
    """
    Wrapped distance between x0 and its time-t image.
    """
    model = field.model
    end = flow_unwrapped(field, x0, t, tol)
    return float(np.linalg.norm(model.wrap_difference(end - np.asarray(x0, dtype=float))))
