import logging

import click

from polarlens.commands.common import load_psf, run_options
from polarlens.models.experiment import CSV_FIELDS
from polarlens.utils.diffraction import mask_gap_experiment
from polarlens.utils.experiments import REFERENCES, run_mismatch_sweep
from polarlens.utils.plotting import plot_profiles, plot_sweep

logger = logging.getLogger(__name__)

experiments = click.Group('experiments', help='Mismatch sweeps and the mask-gap diffraction study.')

SUMMARY_FIELDS = ('perturbation', 'reference', 'metric', 'param', 'mean', 'std', 'config_hash')
DIFFRACTION_FIELDS = ('case', 'z2', 'second_moment_x', 'second_moment_y', 'energy')


@experiments.command('mismatch-sweep')
@click.option('--progress/--no-progress', default=True, help='Show tqdm progress bars.')
@run_options
def mismatch_sweep(ctx, progress):
    """Reconstruction quality under blurred, noisy and interpolated masks."""
    cfg = ctx.config
    psf = load_psf(ctx)
    result = run_mismatch_sweep(cfg.sweep, psf, cfg.solver, cfg.geometry.to_geometry(),
                                workers=cfg.sweep_workers, fft_workers=ctx.workers, progress=progress)
    ctx.write_csv('sweep', result.rows, CSV_FIELDS)

    references = REFERENCES if cfg.sweep.with_reference else REFERENCES[:1]
    summary = []
    for family in cfg.sweep.families:
        for reference in references:
            for metric in ('psnr_db', 'ssim'):
                for param, mean, std in result.mean_curve(family, reference, metric):
                    summary.append({'perturbation': family, 'reference': reference, 'metric': metric,
                                    'param': param, 'mean': mean, 'std': std,
                                    'config_hash': result.config_hash})
                path = plot_sweep(result, family, metric, ctx.path(f'{family}_{metric}_{reference}.png'),
                                  reference)
                if path:
                    ctx.add_output(f'{family}_{metric}_{reference}.png', path)
    ctx.write_csv('summary', summary, SUMMARY_FIELDS)
    click.echo(ctx.path('sweep.csv'))


@experiments.command('diffract')
@run_options
def diffract(ctx):
    """Sensor-plane spreading caused by the mask-sensor gap."""
    gap = ctx.config.diffraction.to_gap_config()
    report = mask_gap_experiment(gap, workers=ctx.workers)
    ctx.write_tensor('intensity_with_grating', report.intensity_with, 'HW')
    ctx.write_tensor('intensity_without_grating', report.intensity_without, 'HW')
    ctx.write_preview('intensity_with_grating', report.intensity_with, 'HW')
    ctx.write_preview('intensity_without_grating', report.intensity_without, 'HW')
    path = plot_profiles({'without grating': report.profile_without, 'with grating': report.profile_with},
                         ctx.path('profiles.png'), gap.grid.pitch)
    ctx.add_output('profiles.png', path)
    ctx.write_csv('diffraction', report.rows(), DIFFRACTION_FIELDS)
    click.echo(f'second moment ratio (x): {report.spreading_ratio:.4f}')
