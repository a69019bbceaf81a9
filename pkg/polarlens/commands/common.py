"""Helpers shared by the command modules: run options, artifact I/O and the run context."""
import csv
import functools
import logging
import os

import click
import yaml

from polarlens.errors import ConfigError
from polarlens.forms.run_config import load_run_config
from polarlens.models.masks import MaskMaps, StripeGeometry
from polarlens.models.optics import PsfNormalization, PsfStack
from polarlens.models.tensor import Tensor
from polarlens.utils.forward_model import measure_psf_normalize
from polarlens.utils.manifest import RunManifest
from polarlens.utils.mask_synthesis import (blur_mask, interpolate_masks, make_ideal_mask,
                                            noise_mask, synthesize_measured_response)
from polarlens.utils.preview import export_preview
from polarlens.utils.psf import make_sparse_psf, psf_scale_summary
from polarlens.utils.scenes import synthesize_scene
from polarlens.utils.tensor_io import tensor_read, tensor_write

logger = logging.getLogger(__name__)


def run_options(func):
    """--config / --set / --preset / --output-dir, resolved into a RunContext"""
    @click.option('--config', 'config_path', type=click.Path(dir_okay=False),
                  help='YAML run config, or a manifest written by an earlier run.')
    @click.option('--set', 'overrides', multiple=True, metavar='KEY=VALUE',
                  help='Override one config key, e.g. solver.rho=10. Repeatable.')
    @click.option('--preset', type=click.Choice(['real', 'matched_sim', 'no_mask']),
                  help='Reconstruction parameter set.')
    @click.option('--output-dir', type=click.Path(file_okay=False), help='Directory for artifacts.')
    @click.pass_obj
    @functools.wraps(func)
    def wrapper(app_config, config_path, overrides, preset, output_dir, **kwargs):
        if output_dir:
            overrides = tuple(overrides) + (f'output_dir={output_dir}',)
        defaults = {'output_dir': app_config.OUTPUT_DIR, 'threads': app_config.THREADS,
                    'sweep_workers': app_config.SWEEP_WORKERS}
        run_config = _absolute_paths(load_run_config(config_path, overrides, preset, defaults))
        ctx = RunContext(func.__name__.replace('_', '-'), run_config, app_config)
        result = func(ctx, **kwargs)
        ctx.finish()
        return result
    return wrapper


def _absolute_paths(config):
    paths = {name: os.path.abspath(value) if value else value
             for name, value in config.paths.model_dump().items()}
    return config.model_copy(update={'output_dir': os.path.abspath(config.output_dir),
                                     'paths': type(config.paths)(**paths)})


class RunContext:
    """Output directory, manifest and artifact writers of one command run"""

    def __init__(self, command, config, app_config):
        self.command = command
        self.config = config
        self.app_config = app_config
        self.output_dir = os.path.abspath(config.output_dir)
        os.makedirs(self.output_dir, exist_ok=True)
        self.manifest = RunManifest(command, config.resolved(), config.seed)
        logger.info('%s: writing to %s', command, self.output_dir)

    @property
    def workers(self):
        return self.config.threads

    def path(self, name):
        return os.path.join(self.output_dir, name)

    def input_path(self, name, required=True):
        value = getattr(self.config.paths, name)
        if not value:
            if required:
                raise ConfigError(f'paths.{name} is required for {self.command}', field=f'paths.{name}')
            return None
        if not os.path.exists(value):
            raise ConfigError(f'paths.{name}: {value} does not exist', field=f'paths.{name}')
        self.manifest.add_input(name, value)
        return value

    def read_tensor(self, name, roles, required=True):
        path = self.input_path(name, required)
        return tensor_read(path, roles).to_array() if path else None

    def write_tensor(self, name, array, roles):
        path = self.path(f'{name}.plt1')
        tensor_write(Tensor(array, roles), path)
        self.manifest.add_output(name, path)
        return path

    def write_preview(self, name, array, roles, **selectors):
        if not self.config.preview.enabled:
            return None
        path = self.path(f'{name}.png')
        export_preview(Tensor(array, roles), path, self.config.preview.normalize, **selectors)
        self.manifest.add_output(f'{name}.png', path)
        return path

    def write_csv(self, name, rows, fields):
        path = self.path(f'{name}.csv')
        with open(path, 'w', newline='', encoding='utf-8') as handle:
            writer = csv.DictWriter(handle, fieldnames=list(fields), extrasaction='ignore')
            writer.writeheader()
            writer.writerows(rows)
        self.manifest.add_output(f'{name}.csv', path)
        return path

    def write_yaml(self, name, payload):
        path = self.path(f'{name}.yaml')
        with open(path, 'w', encoding='utf-8') as handle:
            yaml.safe_dump(payload, handle, sort_keys=True, default_flow_style=False)
        self.manifest.add_output(f'{name}.yaml', path)
        return path

    def add_output(self, name, path):
        self.manifest.add_output(name, path)

    def finish(self):
        self.manifest.write(self.path(self.app_config.MANIFEST_NAME))


def build_mask(config):
    """MaskMaps from the ``geometry`` and ``mask`` sections"""
    geometry = config.geometry.to_geometry()
    extent = config.mask_extent()
    form = config.mask
    if form.kind == 'measured' or form.interpolation_t is not None:
        mask = synthesize_measured_response(geometry, extent, form.extinction)
        if form.interpolation_t is not None:
            mask = interpolate_masks(mask, make_ideal_mask(extent, geometry), form.interpolation_t)
    else:
        mask = make_ideal_mask(extent, geometry)
    if form.blur_sigma > 0:
        mask = blur_mask(mask, form.blur_sigma)
    if form.noise_sigma > 0:
        mask = noise_mask(mask, form.noise_sigma, form.noise_seed)
    return mask


def load_mask(ctx):
    """Mask from paths.mask (with its sidecar when present) or synthesized from config"""
    path = ctx.input_path('mask', required=False)
    if path is None:
        return build_mask(ctx.config)
    maps = tensor_read(path, 'HWP').to_array()
    sidecar = os.path.splitext(path)[0] + '.yaml'
    if os.path.exists(sidecar):
        return MaskMaps(maps, *_read_mask_sidecar(sidecar))
    return MaskMaps(maps, 'measured-response', ctx.config.geometry.to_geometry())


def load_psf(ctx):
    """PSF from paths.psf or a synthetic sparse PSF; normalized per config and noted in the manifest"""
    form = ctx.config.psf
    path = ctx.input_path('psf', required=False)
    if path is None:
        psf = make_sparse_psf(ctx.config.psf_extent(), form.channels, form.n_impulses, form.seed,
                              normalize=form.normalization == 'unit-sum')
    else:
        psf = PsfStack(tensor_read(path).to_array(), PsfNormalization.RAW)
        if form.normalization == 'unit-sum':
            psf = measure_psf_normalize(psf)
    ctx.manifest.note('psf_scale', psf_scale_summary(psf))
    return psf


def load_scene(ctx):
    scene = ctx.read_tensor('scene', 'HWCP', required=False)
    return scene if scene is not None else synthesize_scene(ctx.config.scene)


def _read_mask_sidecar(path):
    """(provenance, geometry, descriptor) from the YAML written next to a mask"""
    with open(path, 'r', encoding='utf-8') as handle:
        meta = yaml.safe_load(handle) or {}
    if not isinstance(meta, dict):
        raise ConfigError(f'{path}: expected a mapping, got {type(meta).__name__}', field='paths.mask')
    try:
        geometry = StripeGeometry(**meta.get('geometry', {}))
    except TypeError as exc:
        raise ConfigError(f'{path}: bad geometry block: {exc}', field='paths.mask') from exc
    provenance = meta.get('provenance', 'measured-response')
    descriptor = {k: v for k, v in meta.items() if k not in ('provenance', 'geometry', 'extent', 'count')}
    return provenance, geometry, descriptor
