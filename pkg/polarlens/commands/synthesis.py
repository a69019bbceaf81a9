import logging

import click

from polarlens.commands.common import build_mask, load_psf, run_options
from polarlens.utils.psf import psf_scale_summary
from polarlens.utils.scenes import synthesize_scene

logger = logging.getLogger(__name__)

synthesis = click.Group('synthesis', help='Masks, PSFs and scenes.')


@synthesis.command('make-mask')
@run_options
def make_mask(ctx):
    """Write a striped polarization mask and its YAML sidecar."""
    mask = build_mask(ctx.config)
    ctx.write_tensor('mask', mask.maps, 'HWP')
    ctx.write_yaml('mask', mask.sidecar())
    for p, angle in enumerate(mask.geometry.orientation_cycle[:mask.count]):
        ctx.write_preview(f'mask_{int(angle)}', mask.maps, 'HWP', channel=p)
    click.echo(ctx.path('mask.plt1'))


@synthesis.command('make-psf')
@run_options
def make_psf(ctx):
    """Write a seeded sparse-impulse diffuser PSF."""
    psf = load_psf(ctx)
    ctx.write_tensor('psf', psf.kernels, 'HWC')
    ctx.write_yaml('psf', dict(psf_scale_summary(psf), n_impulses=ctx.config.psf.n_impulses,
                               seed=ctx.config.psf.seed))
    ctx.write_preview('psf', psf.kernels, 'HWC')
    click.echo(ctx.path('psf.plt1'))


@synthesis.command('make-scene')
@run_options
def make_scene(ctx):
    """Write a synthetic polarized scene."""
    spec = ctx.config.scene
    scene = synthesize_scene(spec)
    ctx.write_tensor('scene', scene, 'HWCP')
    for p, angle in enumerate((0, 45, 90, 135)):
        ctx.write_preview(f'scene_I{angle}', scene, 'HWCP', polarization=p)
    logger.info('scene %s: %s', spec.scene_id(), scene.shape)
    click.echo(ctx.path('scene.plt1'))
