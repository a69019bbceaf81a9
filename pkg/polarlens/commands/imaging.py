import logging

import click

from polarlens.commands.common import load_mask, load_psf, load_scene, run_options
from polarlens.errors import DimensionError
from polarlens.models.stokes import ORIENTATIONS
from polarlens.utils.admm import admm_reconstruct
from polarlens.utils.forward_model import ForwardOperator, add_measurement_noise, multiplex_measurements

logger = logging.getLogger(__name__)

imaging = click.Group('imaging', help='Forward simulation and reconstruction.')

RESIDUAL_FIELDS = ('iteration', 'primal_residual', 'data_fidelity', 'cg_iterations', 'cg_residual')


@imaging.command('simulate')
@run_options
def simulate(ctx):
    """Multiplexed sensor measurement of a scene through PSF and mask."""
    cfg = ctx.config
    scene = load_scene(ctx)
    psf = load_psf(ctx)
    mask = load_mask(ctx)
    op = ForwardOperator(psf, mask, scene.shape, conv_mode=cfg.solver.conv_mode, workers=ctx.workers)
    per_angle = op.convolve(scene)
    y = multiplex_measurements(per_angle, mask)
    y = add_measurement_noise(y, cfg.simulate.sensor_noise, cfg.simulate.noise_seed)
    ctx.write_tensor('measurement', y, 'HWC')
    ctx.write_preview('measurement', y, 'HWC')
    if cfg.simulate.per_angle:
        ctx.write_tensor('per_angle', per_angle, 'HWCP')
    logger.info('simulated %s measurement (sensor noise %g)', y.shape, cfg.simulate.sensor_noise)
    click.echo(ctx.path('measurement.plt1'))


@imaging.command('reconstruct')
@run_options
def reconstruct(ctx):
    """ADMM reconstruction of the polarization sub-images from one measurement."""
    cfg = ctx.config
    y = ctx.read_tensor('measurement', 'HWC')
    psf = load_psf(ctx)
    mask = load_mask(ctx)
    if mask.extent != y.shape[:2]:
        axis = 'H' if mask.extent[0] != y.shape[0] else 'W'
        raise DimensionError(f'mask extent {mask.extent} does not match measurement {y.shape[:2]}', axis=axis)
    scene_shape = y.shape + (mask.count,)
    op = ForwardOperator(psf, mask, scene_shape, conv_mode=cfg.solver.conv_mode, workers=ctx.workers)
    estimate, history = admm_reconstruct(op, y, cfg.solver)

    ctx.write_tensor('reconstruction', estimate, 'HWCP')
    rows = [dict(row, cg_iterations=cg, cg_residual=res)
            for row, cg, res in zip(history.rows(), history.cg_iterations, history.cg_residual)]
    ctx.write_csv('residuals', rows, RESIDUAL_FIELDS)
    ctx.manifest.note('solver', history.summary())
    for p in range(mask.count):
        label = f'I{int(ORIENTATIONS[p])}' if mask.count == len(ORIENTATIONS) else f'p{p}'
        ctx.write_preview(f'reconstruction_{label}', estimate, 'HWCP', polarization=p)
    click.echo(ctx.path('reconstruction.plt1'))
