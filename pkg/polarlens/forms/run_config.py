"""Schema of the YAML run config shared by every command.

Resolution order: schema defaults, then the config file, then ``--preset``,
then each ``--set section.key=value`` flag in order.
"""
import copy
import os
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from polarlens.errors import ConfigError
from polarlens.models.experiment import SweepSpec
from polarlens.models.field import GratingSpec, GridSpec
from polarlens.models.masks import StripeGeometry
from polarlens.models.scene import SceneSpec
from polarlens.models.solver import SOLVER_PRESETS, SolverConfig
from polarlens.utils.diffraction import GapConfig

SEEDED_SECTIONS = {'scene': 'seed', 'psf': 'seed', 'mask': 'noise_seed', 'sweep': 'noise_seed'}


class _Form(BaseModel):
    model_config = ConfigDict(extra='forbid')


class PathsForm(_Form):
    scene: Optional[str] = None
    psf: Optional[str] = None
    mask: Optional[str] = None
    measurement: Optional[str] = None
    reconstruction: Optional[str] = None
    reference: Optional[str] = None


class GeometryForm(_Form):
    stripe_width: int = Field(256, ge=1)
    orientation_cycle: tuple[float, ...] = (0.0, 45.0, 90.0, 135.0)
    stripe_axis: Literal['vertical', 'horizontal'] = 'vertical'
    phase_offset: int = 0

    @field_validator('orientation_cycle')
    @classmethod
    def _distinct_angles(cls, value):
        if len(set(value)) != len(value):
            raise ValueError('orientation angles must be distinct')
        if any(not 0.0 <= angle < 180.0 for angle in value):
            raise ValueError('orientation angles must lie in [0, 180)')
        return value

    def to_geometry(self):
        return StripeGeometry(self.stripe_width, self.orientation_cycle, self.stripe_axis, self.phase_offset)


class MaskForm(_Form):
    kind: Literal['ideal', 'measured'] = 'ideal'
    height: Optional[int] = Field(None, ge=1)
    width: Optional[int] = Field(None, ge=1)
    extinction: float = Field(0.0, ge=0, lt=1)
    blur_sigma: float = Field(0.0, ge=0)
    noise_sigma: float = Field(0.0, ge=0)
    noise_seed: int = 0
    # blend the measured response toward the ideal stripes
    interpolation_t: Optional[float] = Field(None, ge=0, le=1)


class PsfForm(_Form):
    height: Optional[int] = Field(None, ge=1)
    width: Optional[int] = Field(None, ge=1)
    channels: int = Field(3, ge=1)
    n_impulses: int = Field(200, ge=1)
    seed: int = 0
    normalization: Literal['unit-sum', 'raw'] = 'raw'


class SimulateForm(_Form):
    sensor_noise: float = Field(0.0, ge=0)
    noise_seed: int = 0
    per_angle: bool = False


class PreviewForm(_Form):
    enabled: bool = True
    normalize: Literal['global', 'per-channel'] = 'global'


class DiffractionForm(_Form):
    """Mask-gap geometry; unset keys come from the desk or full-resolution block"""
    geometry: Literal['desk', 'full'] = 'desk'
    n: Optional[int] = None
    pitch: Optional[float] = Field(None, gt=0)
    wavelength: Optional[float] = Field(None, gt=0)
    focal_length: Optional[float] = Field(None, gt=0)
    pupil_ratio: Optional[float] = Field(None, gt=0)
    z2: Optional[float] = Field(None, ge=0)
    stripe_width: Optional[float] = Field(None, gt=0)
    amplitude_levels: Optional[tuple[float, ...]] = None
    offset: Optional[float] = None
    check_spreading: bool = True

    def to_gap_config(self):
        base = GapConfig.full() if self.geometry == 'full' else GapConfig.desk()
        grid = GridSpec(
            n=self.n if self.n is not None else base.grid.n,
            pitch=self.pitch if self.pitch is not None else base.grid.pitch,
            wavelength=self.wavelength if self.wavelength is not None else base.grid.wavelength,
        )
        grating = GratingSpec(
            stripe_width=self.stripe_width if self.stripe_width is not None else base.grating.stripe_width,
            amplitude_levels=self.amplitude_levels or base.grating.amplitude_levels,
            offset=self.offset if self.offset is not None else base.grating.offset,
        )
        return GapConfig(
            grid=grid,
            focal_length=self.focal_length if self.focal_length is not None else base.focal_length,
            pupil_ratio=self.pupil_ratio if self.pupil_ratio is not None else base.pupil_ratio,
            grating=grating,
            z2=self.z2 if self.z2 is not None else base.z2,
            check_spreading=self.check_spreading,
        )


class RunConfig(_Form):
    seed: int = 0
    output_dir: str = 'runs'
    threads: int = Field(1, ge=1)
    sweep_workers: int = Field(1, ge=1)
    preset: Optional[Literal['real', 'matched_sim', 'no_mask']] = None
    paths: PathsForm = Field(default_factory=PathsForm)
    geometry: GeometryForm = Field(default_factory=GeometryForm)
    mask: MaskForm = Field(default_factory=MaskForm)
    psf: PsfForm = Field(default_factory=PsfForm)
    scene: SceneSpec = Field(default_factory=SceneSpec)
    solver: SolverConfig = Field(default_factory=lambda: SolverConfig.preset('matched_sim'))
    simulate: SimulateForm = Field(default_factory=SimulateForm)
    preview: PreviewForm = Field(default_factory=PreviewForm)
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    diffraction: DiffractionForm = Field(default_factory=DiffractionForm)

    @model_validator(mode='before')
    @classmethod
    def _expand_preset_and_seed(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        solver = dict(data.get('solver') or {})
        if 'lam' in solver:
            solver['lambda'] = solver.pop('lam')
        preset = solver.pop('preset', None) or data.get('preset')
        if preset is not None:
            if preset not in SOLVER_PRESETS:
                raise ValueError(f'unknown solver preset {preset!r}; choose from {sorted(SOLVER_PRESETS)}')
            solver = {**SOLVER_PRESETS[preset], **solver}
            data['preset'] = preset
        elif not solver:
            solver = dict(SOLVER_PRESETS['matched_sim'])
        else:
            solver = {**SOLVER_PRESETS['matched_sim'], **solver}
        data['solver'] = solver

        seed = data.get('seed', 0)
        for section, key in SEEDED_SECTIONS.items():
            values = data.get(section)
            if values is None:
                data[section] = {key: seed}
            elif isinstance(values, dict) and key not in values:
                data[section] = {**values, key: seed}
        return data

    def mask_extent(self):
        height = self.mask.height or self.scene.height
        width = self.mask.width or self.scene.width
        return height, width

    def psf_extent(self):
        return self.psf.height or self.scene.height, self.psf.width or self.scene.width

    def resolved(self):
        """Plain dict of every resolved value, as echoed into manifests"""
        return self.model_dump(mode='json', by_alias=True)


def _parse_override(item):
    key, sep, raw = item.partition('=')
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f'override {item!r} is not of the form section.key=value', field=key or None)
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f'cannot parse value of {key}: {exc}', field=key) from exc
    return key.split('.'), value


def apply_overrides(data, overrides):
    data = copy.deepcopy(data)
    for item in overrides:
        path, value = _parse_override(item)
        node = data
        for part in path[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            if not isinstance(child, dict):
                raise ConfigError(f'{".".join(path)}: {part} is not a section', field='.'.join(path))
            node = child
        node[path[-1]] = value
    return data


def read_config_file(path):
    """Raw mapping from a run config or from a run manifest's ``config`` block"""
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            data = yaml.safe_load(handle) or {}
    except OSError as exc:
        raise ConfigError(f'cannot read config {path}: {exc.strerror}') from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f'config {path} is not valid YAML: {exc}') from exc
    if not isinstance(data, dict):
        raise ConfigError(f'config {path} must be a mapping')
    if 'manifest_version' in data:
        data = data.get('config') or {}
    return data


def _field_path(error):
    return '.'.join(str(part) for part in error['loc'] if part != '__root__') or None


def build_run_config(data, overrides=(), preset=None, defaults=None):
    """Validate raw data into a RunConfig; schema errors carry the dotted field path"""
    data = dict(data or {})
    for key, value in (defaults or {}).items():
        data.setdefault(key, value)
    if preset is not None:
        # the flag replaces any solver block from the file
        data['solver'] = {'preset': preset}
        data.pop('preset', None)
    data = apply_overrides(data, overrides)
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = _field_path(first)
        raise ConfigError(f'{field or "config"}: {first["msg"]}', field=field) from exc


def load_run_config(path=None, overrides=(), preset=None, defaults=None):
    data = read_config_file(path) if path else {}
    config = build_run_config(data, overrides, preset, defaults)
    if path:
        config_dir = os.path.dirname(os.path.abspath(path))
        config = _resolve_paths(config, config_dir)
    return config


def _resolve_paths(config, base):
    """Relative tensor paths are taken relative to the config file"""
    resolved = {}
    for name, value in config.paths.model_dump().items():
        if value and not os.path.isabs(value):
            candidate = os.path.join(base, value)
            resolved[name] = candidate if os.path.exists(candidate) else value
        else:
            resolved[name] = value
    return config.model_copy(update={'paths': PathsForm(**resolved)})
