"""Conjugate gradients for the symmetric positive definite v-update system."""
import logging

import numpy as np

from polarlens.errors import SolverError
from polarlens.models.solver import CgResult

logger = logging.getLogger(__name__)


def _dot(a, b):
    return float(np.vdot(a, b).real)


def cg_solve(gram, rhs, x0=None, tol=1e-4, max_iters=100):
    """Solve gram(x) = rhs until ||gram(x) - rhs|| / ||rhs|| <= tol or max_iters.

    ``gram`` is any callable applying an SPD operator to an array shaped like rhs.
    """
    if not tol > 0:
        raise SolverError(f'CG tolerance must be positive, got {tol}')
    rhs_norm = np.sqrt(_dot(rhs, rhs))
    if rhs_norm == 0:
        return CgResult(np.zeros_like(rhs), 0, 0.0)

    x = np.zeros_like(rhs) if x0 is None else np.array(x0, dtype=np.float64, copy=True)
    r = rhs - gram(x) if x0 is not None else np.array(rhs, copy=True)
    rr = _dot(r, r)
    relative = np.sqrt(rr) / rhs_norm
    if relative <= tol:
        return CgResult(x, 0, relative)

    p = r.copy()
    iterations = 0
    for iterations in range(1, max_iters + 1):
        gp = gram(p)
        curvature = _dot(p, gp)
        if not curvature > 0:
            raise SolverError(f'CG direction with non-positive curvature {curvature:.3e}',
                              iteration=iterations)
        alpha = rr / curvature
        x += alpha * p
        r -= alpha * gp
        rr_next = _dot(r, r)
        relative = np.sqrt(rr_next) / rhs_norm
        if relative <= tol:
            break
        p *= rr_next / rr
        p += r
        rr = rr_next

    logger.debug('CG stopped after %d iterations, relative residual %.3e', iterations, relative)
    return CgResult(x, iterations, float(relative))
