import logging

import click
import numpy as np

from polarlens.commands.common import run_options
from polarlens.utils.metrics import evaluate_against_reference
from polarlens.utils.stokes import stokes_from_subimages

logger = logging.getLogger(__name__)

analysis = click.Group('analysis', help='Stokes maps and image-quality metrics.')

METRIC_FIELDS = ('scene_id', 'channel', 'psnr_db', 'ssim', 'reference', 'config_hash', 'seed')


@analysis.command('stokes')
@run_options
def stokes(ctx):
    """S0, S1, S2, DoLP and AoLP maps of a reconstruction or scene."""
    name = 'reconstruction' if ctx.config.paths.reconstruction else 'scene'
    x = ctx.read_tensor(name, 'HWCP')
    maps = stokes_from_subimages(x)
    for key, values in maps.items():
        ctx.write_tensor(key, values, 'HWC')
    ctx.write_preview('s0', maps.s0, 'HWC')
    ctx.write_preview('dolp', maps.dolp, 'HWC')
    ctx.write_preview('aolp', maps.aolp, 'HWC')
    logger.info('Stokes maps: mean DoLP %.3f, AoLP defined at %.1f%% of samples',
                float(maps.dolp.mean()), 100.0 * float(np.mean(maps.aolp_valid)))
    click.echo(ctx.output_dir)


@analysis.command('metrics')
@run_options
def metrics(ctx):
    """Per-polarization PSNR and SSIM against the ground truth and an optional reference."""
    estimate = ctx.read_tensor('reconstruction', 'HWCP')
    truth = ctx.read_tensor('scene', 'HWCP')
    keys = {'scene_id': ctx.config.scene.scene_id(), 'config_hash': ctx.config.solver.config_hash(),
            'seed': ctx.config.seed}
    rows = list(evaluate_against_reference(estimate, truth, 'ground-truth').rows(**keys))
    reference = ctx.read_tensor('reference', 'HWCP', required=False)
    if reference is not None:
        rows.extend(evaluate_against_reference(estimate, reference, 'no-mask').rows(**keys))
    ctx.write_csv('metrics', rows, METRIC_FIELDS)
    for row in rows:
        if row['channel'] == 'mean':
            click.echo(f"{row['reference']}: PSNR {row['psnr_db']} dB, SSIM {row['ssim']:.4f}")
