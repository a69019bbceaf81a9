from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from polarlens.models.scene import SceneSpec

FAMILIES = ('blur', 'noise', 'interpolation')
Side = Literal['data', 'reconstruction']

# Mismatch protocol: blur and interpolation perturb the data-generation mask,
# noise perturbs only the reconstruction mask
DEFAULT_SIDES = {'blur': 'data', 'noise': 'reconstruction', 'interpolation': 'data'}

CSV_FIELDS = ('scene_id', 'perturbation', 'param', 'channel', 'psnr_db', 'ssim',
              'reference', 'config_hash', 'seed')


class SweepSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    families: tuple[Literal['blur', 'noise', 'interpolation'], ...] = FAMILIES
    blur_sigmas: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0, 3.0)
    noise_sigmas: tuple[float, ...] = (0.0, 0.01, 0.02, 0.05)
    interpolation_ts: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    scenes: tuple[SceneSpec, ...] = (
        SceneSpec(kind='two-source', seed=1),
        SceneSpec(kind='birefringent-screen', seed=2),
        SceneSpec(kind='piecewise-constant', seed=3),
    )
    sides: dict[str, Side] = Field(default_factory=lambda: dict(DEFAULT_SIDES))
    noise_seed: int = 0
    extinction: float = Field(0.0, ge=0, lt=1)
    with_reference: bool = True

    @model_validator(mode='after')
    def _matched_baselines(self):
        for name, values in (('blur_sigmas', self.blur_sigmas), ('noise_sigmas', self.noise_sigmas),
                             ('interpolation_ts', self.interpolation_ts)):
            if 0.0 not in values:
                raise ValueError(f'{name} must include the matched point 0')
            if any(v < 0 for v in values):
                raise ValueError(f'{name} must be nonnegative')
        if any(t > 1 for t in self.interpolation_ts):
            raise ValueError('interpolation_ts must lie in [0, 1]')
        unknown = set(self.sides) - set(FAMILIES)
        if unknown:
            raise ValueError(f'unknown perturbation families in sides: {sorted(unknown)}')
        if not self.scenes:
            raise ValueError('a sweep needs at least one scene')
        return self

    def levels(self, family):
        return {'blur': self.blur_sigmas, 'noise': self.noise_sigmas,
                'interpolation': self.interpolation_ts}[family]

    def side(self, family):
        return self.sides.get(family, DEFAULT_SIDES[family])


@dataclass
class MatchedResult:
    reconstruction: np.ndarray
    history: object
    report: object
    reference_report: object = None


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    config_hash: str = ''

    def series(self, family, reference='ground-truth', metric='psnr_db'):
        """{scene_id: [(param, value), ...]} of channel means, sorted by param"""
        out = {}
        for row in self.rows:
            if row['perturbation'] == family and row['reference'] == reference and row['channel'] == 'mean':
                out.setdefault(row['scene_id'], []).append((row['param'], row[metric]))
        return {scene: sorted(points) for scene, points in sorted(out.items())}

    def mean_curve(self, family, reference='ground-truth', metric='psnr_db'):
        """[(param, mean, std)] across scenes"""
        by_param = {}
        for points in self.series(family, reference, metric).values():
            for param, value in points:
                if value != 'identical':
                    by_param.setdefault(param, []).append(float(value))
        return [(param, float(np.mean(values)), float(np.std(values)))
                for param, values in sorted(by_param.items())]
