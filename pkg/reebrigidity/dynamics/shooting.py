import logging

import numpy as np
from scipy.linalg import lstsq, svd

from reebrigidity import config
from reebrigidity.dynamics.families import ClosedOrbit, monodromy_floquet
from reebrigidity.dynamics.flow import flow_unwrapped, integrate_variational
from reebrigidity.exceptions import DegenerateJacobian, NoConvergence

logger = logging.getLogger(__name__)


def _residual(model, x, end):
    return model.wrap_difference(end - x)


def _step(model, x, frame, dc):
    return model.normalize(x + frame @ dc)


def detect_cover(field, x, period, tol=None):
    """
    The largest k <= MAX_DIVISOR such that x also returns at period / k.
    """
    model = field.model
    cover = 1
    for k in range(2, config.MAX_DIVISOR + 1):
        end = flow_unwrapped(field, x, period / k, tol)
        if np.linalg.norm(_residual(model, x, end)) < config.DIVISOR_TOL:
            cover = k
    return cover


def shoot_closed_orbit(field, x_guess, T_guess, tol=None, max_iter=None, strict=False, family_dim=None):
    """
    Newton shooting on (x, T) for Phi_T(x) = x.

    Corrections live in the tangent frame at the current point; the phase
    condition pins x to the hyperplane through the guess orthogonal to the
    field there. The least squares step is minimum norm, so Morse-Bott
    families (a kernel beyond the phase direction) do not stall the iteration.

    :param strict: raise :class:`DegenerateJacobian` when the converged
        Jacobian has a kernel
    :param family_dim: forwarded to the Floquet classification
    :raises NoConvergence: after ``max_iter`` iterations, or when the converged
        orbit does not close to ``config.REINTEGRATION_TOL`` when flowed again
    """
    model = field.model
    tol = config.SHOOTING_TOL if tol is None else tol
    max_iter = config.MAX_NEWTON_ITER if max_iter is None else max_iter
    x_anchor = model.normalize(model.coords_of(x_guess))
    r_anchor = np.asarray(field(x_anchor), dtype=float)
    x, period = x_anchor.copy(), float(T_guess)
    if period <= 0:
        raise ValueError("T_guess must be positive")

    norm = np.inf
    for iteration in range(1, max_iter + 1):
        end, monodromy = integrate_variational(field, x, period, tol)
        residual = _residual(model, x, end)
        norm = float(np.max(np.abs(residual)))
        logger.debug("shooting iteration %d: T=%.12g residual=%.3e", iteration, period, norm)
        frame = model.tangent_frame(x)
        jacobian = np.column_stack([(monodromy - np.eye(x.size)) @ frame, field(end)])
        phase = np.append(r_anchor @ frame, 0.0)
        system = np.vstack([jacobian, phase])
        if norm < config.ORBIT_TOL:
            break
        rhs = -np.append(residual, r_anchor @ model.wrap_difference(x - x_anchor))
        delta, *_ = lstsq(system, rhs)

        # backtrack until the return residual drops by a fixed fraction
        damping = 1.0
        for _ in range(8):
            x_try = _step(model, x, frame, damping * delta[:-1])
            t_try = period + damping * delta[-1]
            if t_try > 0:
                trial = float(np.max(np.abs(_residual(model, x_try, flow_unwrapped(field, x_try, t_try, tol)))))
                if trial < 0.7 * norm:
                    break
            damping *= 0.5
        x = _step(model, x, frame, damping * delta[:-1])
        period += damping * delta[-1]
        if period <= 0:
            raise NoConvergence(iteration, norm)
    else:
        raise NoConvergence(max_iter, norm)

    # the converged orbit must close again at twice the integrator accuracy
    check = float(np.max(np.abs(_residual(model, x, flow_unwrapped(field, x, period, 0.5 * tol)))))
    if check >= config.REINTEGRATION_TOL:
        raise NoConvergence(iteration, check)

    singular = svd(system, compute_uv=False)
    nullity = int(np.sum(singular < config.SINGULAR_CUTOFF * max(singular[0], 1.0)))
    if strict and nullity:
        raise DegenerateJacobian(nullity)

    cover = detect_cover(field, x, period, tol)
    point = model.point(model.normalize(x))
    return ClosedOrbit(
        point=point,
        period=period,
        homotopy_class=model.class_of(end - x),
        residual=norm,
        cover=cover,
        floquet=monodromy_floquet(model, x, monodromy, family_dim),
    )
