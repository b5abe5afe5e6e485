"""
Finite difference calculus for rescaled contact forms f * lambda_0.
"""

import logging

import numpy as np
from scipy.linalg import lstsq, svd

from reebrigidity import config
from reebrigidity.exceptions import SingularReebSystem

logger = logging.getLogger(__name__)

_STENCILS = {
    2: ((1.0, 1), (-1.0, -1)),
    4: ((8.0, 1), (-8.0, -1), (-1.0, 2), (1.0, -2)),
}
_DENOMINATORS = {2: 2.0, 4: 12.0}


def exterior_derivative(form, x, h=None, order=2, model=None):
    """
    The matrix D with d(alpha)(u, v) = u^T D v, D[i, j] = d_i alpha_j - d_j alpha_i,
    from central differences of the covector field ``form``.

    :param order: 2 or 4
    :param model: when given, the stencil is checked against the chart
    """
    if order not in _STENCILS:
        raise ValueError("order must be 2 or 4")
    h = config.FD_STEP if h is None else h
    x = np.asarray(x, dtype=float)
    if model is not None:
        model.check_stencil(x, h * (2 if order == 4 else 1))
    size = x.size
    grad = np.empty((size, size))
    for j in range(size):
        e = np.zeros(size)
        e[j] = h
        grad[j] = sum(w * np.asarray(form(x + m * e)) for w, m in _STENCILS[order]) / (_DENOMINATORS[order] * h)
    return grad - grad.T


def rescaled_form(model, factor):
    if factor is None:
        return model.contact_form
    return lambda x: factor(x) * model.contact_form(x)


def contact_eval(model, x, v, factor=None):
    """
    lambda(v) at x for lambda = f * lambda_0 (or lambda_0 when ``factor`` is None).
    """
    x = model.coords_of(x)
    model.check_point(x)
    return float(rescaled_form(model, factor)(x) @ np.asarray(v, dtype=float))


def reeb_system(model, factor, x, h=None, order=2):
    """
    Assemble the bordered system [alpha E; E^T D E] c = [1; 0] in the chart
    frame E at x.
    """
    form = rescaled_form(model, factor)
    frame = model.tangent_frame(x)
    alpha = form(x) @ frame
    dform = frame.T @ exterior_derivative(form, x, h, order, model) @ frame
    matrix = np.vstack([alpha[None, :], dform])
    rhs = np.zeros(matrix.shape[0])
    rhs[0] = 1.0
    return frame, matrix, rhs


def reeb_of_conformal(model, factor, x, h=None, order=2):
    """
    The Reeb field of f * lambda_0 at x, solved from its defining equations.

    :raises SingularReebSystem: when the system does not have full column rank
        or its least squares solution misses the equations by more than
        REEB_RESIDUAL_TOL
    """
    x = np.asarray(model.coords_of(x), dtype=float)
    frame, matrix, rhs = reeb_system(model, factor, x, h, order)
    singular = svd(matrix, compute_uv=False)
    if singular[-1] < config.SINGULAR_CUTOFF * max(singular[0], 1.0):
        raise SingularReebSystem(x, singular[-1])
    c, *_ = lstsq(matrix, rhs)
    residual = np.max(np.abs(matrix @ c - rhs))
    if residual > config.REEB_RESIDUAL_TOL:
        raise SingularReebSystem(x, singular[-1], residual=residual)
    return frame @ c


def kernel_residual(model, field, x, factor=None, h=None, order=2):
    """
    :return: (|lambda(R) - 1|, max_i |d lambda(R, e_i)|) over the chart frame
    """
    x = np.asarray(x, dtype=float)
    form = rescaled_form(model, factor)
    r = np.asarray(field(x), dtype=float)
    frame = model.tangent_frame(x)
    d = exterior_derivative(form, x, h, order, model)
    return abs(float(form(x) @ r) - 1.0), float(np.max(np.abs(r @ d @ frame)))


def bordered_determinant(model, x, factor=None, h=None):
    """
    det [[0, -(alpha E)^T], [alpha E, E^T D E]]; positive means contact at x.
    """
    x = np.asarray(x, dtype=float)
    form = rescaled_form(model, factor)
    frame = model.tangent_frame(x)
    alpha = form(x) @ frame
    dform = frame.T @ exterior_derivative(form, x, h, 2, model) @ frame
    size = alpha.size + 1
    bordered = np.zeros((size, size))
    bordered[0, 1:] = -alpha
    bordered[1:, 0] = alpha
    bordered[1:, 1:] = dform
    return float(np.linalg.det(bordered))


def contact_volume(model, x, factor=None, h=None):
    """
    |lambda ^ (d lambda)^(n-1)| on the orthonormal frame at x, up to the
    constant (n-1)!. The bordered matrix is antisymmetric of even size, so its
    determinant is the square of this Pfaffian.
    """
    return float(np.sqrt(max(bordered_determinant(model, x, factor, h), 0.0)))


class ReebField:
    """
    The Reeb vector field of f * lambda_0 as a callable on chart coordinates.

    Constant factors rescale the analytic field, models with a closed form for
    the given factor use it, and everything else goes through
    :func:`reeb_of_conformal`.
    """

    def __init__(self, model, factor=None, h=None, order=2):
        self.model = model
        self.factor = factor
        self.h = h
        self.order = order

    @property
    def label(self):
        if self.factor is None:
            return self.model.label
        return f"{self.factor.name} on {self.model.label}"

    @property
    def symmetries(self):
        if self.factor is None:
            return frozenset(self.model.symmetries)
        return self.factor.effective_symmetries(self.model)

    @property
    def is_analytic(self):
        return self.factor is None or self.factor.constant or self.model.has_conformal_reeb(self.factor)

    def form(self, x):
        return rescaled_form(self.model, self.factor)(x)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.factor is None:
            return self.model.reeb(x)
        if self.factor.constant:
            return self.model.reeb(x) / self.factor.scale
        closed = self.model.conformal_reeb(self.factor, x)
        if closed is not None:
            return closed
        return reeb_of_conformal(self.model, self.factor, x, self.h, self.order)

    def __repr__(self):
        return f"<ReebField {self.label}>"
