"""Scaled ADMM for min (1 / 2 sigma_e^2) ||y - Ax||^2 + lambda TV_w(x) with x >= 0.

Each iteration:
    v = CG solve of (A^T A + rho I) v = A^T y + rho (z - u)
    z = prox_{(lambda / rho) TV_w}(v + u), then z = max(z, 0)
    u = u + v - z
The iterates start at zero and the returned estimate is z.
"""
import logging

import numpy as np

from polarlens.errors import DimensionError, SolverError
from polarlens.models.masks import MaskMaps
from polarlens.models.solver import AdmmState, SolverConfig
from polarlens.models.tensor import check_extents
from polarlens.utils.cg import cg_solve
from polarlens.utils.forward_model import ForwardOperator
from polarlens.utils.tv_prox import tv_prox

logger = logging.getLogger(__name__)

# data curvature below this fraction of rho leaves the iterate close to its prior
WEAK_DATA_RATIO = 0.05


def _check_finite(name, values, iteration):
    if not np.all(np.isfinite(values)):
        raise SolverError(f'non-finite values in {name}', iteration=iteration)


def admm_step(op, y, aty, state, cfg):
    """Advance ``state`` by one iteration in place and return it"""
    iteration = state.iteration + 1
    rhs = aty + cfg.rho * (state.z - state.u)
    x0 = state.v if cfg.warm_start_cg else None
    try:
        cg = cg_solve(lambda x: op.gram(x, cfg.rho), rhs, x0, cfg.cg_tol, cfg.cg_max_iters)
    except SolverError as exc:
        raise SolverError(f'ADMM iteration {iteration}: {exc}', iteration=iteration) from exc
    v = cg.x
    _check_finite('v', v, iteration)

    z = tv_prox(v + state.u, cfg.threshold, cfg.tv_weights, cfg.active_axes)
    if cfg.nonneg:
        np.maximum(z, 0.0, out=z)
    _check_finite('z', z, iteration)
    u = state.u + v - z

    state.v, state.z, state.u, state.iteration = v, z, u, iteration
    primal = np.linalg.norm(v - z)
    fidelity = np.linalg.norm(op.forward(v) - y)
    state.history.append(primal, fidelity, cg)
    logger.debug('iter %d: primal %.4e, fidelity %.4e, CG %d (res %.2e)',
                 iteration, primal, fidelity, cg.iterations, cg.residual)
    return state


def data_curvature(op, aty):
    """Rayleigh quotient of A^T A along A^T y; 0 for an empty measurement"""
    norm = np.vdot(aty, aty)
    if not norm > 0:
        return 0.0
    return float(np.vdot(*(op.forward(aty),) * 2) / norm)


def admm_reconstruct(op, y, cfg=None, callback=None):
    """Run ``cfg.admm_iters`` iterations; returns (z, history)"""
    cfg = cfg or SolverConfig()
    check_extents(y, op.sensor_shape, 'HWC')
    y = np.asarray(y, dtype=np.float64)
    aty = op.adjoint(y)
    state = AdmmState.zeros(op.scene_shape)
    state.history.data_curvature = data_curvature(op, aty)
    if state.history.data_curvature < WEAK_DATA_RATIO * cfg.rho:
        logger.warning('data curvature %.3g is small next to rho=%g; check the PSF and measurement scale',
                       state.history.data_curvature, cfg.rho)
    for _ in range(cfg.admm_iters):
        admm_step(op, y, aty, state, cfg)
        if cfg.nonneg and state.z.min() < 0:
            raise SolverError('projection left negative entries', iteration=state.iteration)
        if callback is not None:
            callback(state)
    history = state.history
    summary = history.summary()
    logger.info('ADMM finished %d iterations: primal %.4e, fidelity %.4e, mean CG %.1f',
                summary['iterations'], summary['final_primal_residual'], summary['final_data_fidelity'],
                summary['mean_cg_iterations'])
    return state.z, history


def reconstruct_no_mask_reference(psf, y_per_angle, cfg=None, workers=1):
    """Reconstruct each external-polarizer capture on its own and stack along P.

    ``y_per_angle`` is an (H, W, C, P) stack of single-polarization lensless
    measurements taken without the polarization mask.
    """
    cfg = cfg or SolverConfig.preset('no_mask')
    y_per_angle = np.asarray(y_per_angle, dtype=np.float64)
    if y_per_angle.ndim != 4:
        raise DimensionError(f'expected (H, W, C, P) per-angle stack, got shape {y_per_angle.shape}', axis='P')
    height, width, channels, angles = y_per_angle.shape
    op = ForwardOperator(psf, MaskMaps.uniform((height, width)), (height, width, channels, 1),
                         conv_mode=cfg.conv_mode, workers=workers)
    slices = []
    for p in range(angles):
        logger.info('no-mask reference: angle %d/%d', p + 1, angles)
        estimate, _ = admm_reconstruct(op, y_per_angle[:, :, :, p], cfg)
        slices.append(estimate[:, :, :, 0])
    return np.stack(slices, axis=3)
