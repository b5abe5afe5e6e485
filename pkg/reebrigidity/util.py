from functools import lru_cache

import numpy as np
from scipy.special import expit, roots_legendre


def _inside(u):
    u = np.asarray(u, dtype=float)
    flat = np.atleast_1d(u)
    return u.shape, flat, (flat > 0.0) & (flat < 1.0)


def _restore(shape, values):
    if shape == ():
        return float(values[0])
    return values.reshape(shape)


def smoothstep(u):
    """
    The C-infinity step S with S = 0 on u <= 0, S = 1 on u >= 1, flat to all
    orders at both ends and S(1 - u) = 1 - S(u).

    Every bump, cut-off and ramp in the package is assembled from this function.
    """
    shape, flat, inside = _inside(u)
    out = np.where(flat >= 1.0, 1.0, 0.0)
    v = flat[inside]
    out[inside] = expit((2.0 * v - 1.0) / (v * (1.0 - v)))
    return _restore(shape, out)


def smoothstep_prime(u):
    shape, flat, inside = _inside(u)
    out = np.zeros_like(flat)
    v = flat[inside]
    s = expit((2.0 * v - 1.0) / (v * (1.0 - v)))
    out[inside] = s * (1.0 - s) * (1.0 / v**2 + 1.0 / (1.0 - v) ** 2)
    return _restore(shape, out)


@lru_cache(maxsize=8)
def _legendre(nodes):
    return roots_legendre(nodes)


def gauss_legendre(fn, lower, upper, panels=16, nodes=32):
    """
    Composite Gauss-Legendre quadrature of a vectorised ``fn`` over
    [lower, upper], with ``lower`` and ``upper`` arrays of equal shape.

    :return: array of integrals, one per interval
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    x, w = _legendre(nodes)
    edges = np.linspace(0.0, 1.0, panels + 1)
    # unit panel nodes in [0, 1], shape (panels * nodes,)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halves = 0.5 * (edges[1:] - edges[:-1])
    unit = (mids[:, None] + halves[:, None] * x[None, :]).ravel()
    weights = (halves[:, None] * w[None, :]).ravel()
    span = upper - lower
    points = lower[..., None] + span[..., None] * unit
    return span * np.sum(fn(points) * weights, axis=-1)


def smoothstep_integral(u):
    """
    Exact-to-quadrature value of the integral of S from 0 to u, clipped so that
    it grows linearly once u >= 1.
    """
    u = np.asarray(u, dtype=float)
    clipped = np.clip(u, 0.0, 1.0)
    inner = gauss_legendre(smoothstep, np.zeros_like(clipped), clipped, panels=4, nodes=32)
    return inner + np.maximum(u - 1.0, 0.0)


def wrap(delta, period):
    """
    Map a displacement along a periodic coordinate into [-period/2, period/2).
    """
    return np.mod(np.asarray(delta, dtype=float) + 0.5 * period, period) - 0.5 * period
