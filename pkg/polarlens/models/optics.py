from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from polarlens.errors import DimensionError


class ConvMode(str, Enum):
    CIRCULAR = 'circular'
    PAD_CROP = 'pad-crop'


class PsfNormalization(str, Enum):
    UNIT_SUM = 'unit-sum'
    RAW = 'raw'


@dataclass(frozen=True)
class PsfStack:
    """Per-color diffuser kernels stored as an (Hk, Wk, C) array.

    The kernel center (origin) sits at (Hk // 2, Wk // 2).
    """
    kernels: np.ndarray
    normalization: PsfNormalization = PsfNormalization.RAW
    scale_factors: tuple = field(default=())

    def __post_init__(self):
        kernels = np.array(self.kernels, dtype=np.float64, copy=True)
        if kernels.ndim == 2:
            kernels = kernels[:, :, None]
        if kernels.ndim != 3:
            raise DimensionError(f'PSF stack must be (Hk, Wk, C), got shape {kernels.shape}')
        if not np.all(np.isfinite(kernels)):
            raise ValueError('PSF contains non-finite values')
        if np.any(kernels < 0):
            raise ValueError('PSF entries must be nonnegative')
        normalization = PsfNormalization(self.normalization)
        if normalization is PsfNormalization.UNIT_SUM:
            sums = kernels.sum(axis=(0, 1))
            if np.any(np.abs(sums - 1.0) > 1e-12):
                raise ValueError(f'unit-sum PSF has channel sums {sums.tolist()}')
        kernels.flags.writeable = False
        object.__setattr__(self, 'kernels', kernels)
        object.__setattr__(self, 'normalization', normalization)
        object.__setattr__(self, 'scale_factors', tuple(float(s) for s in self.scale_factors))

    @property
    def shape(self):
        return self.kernels.shape[:2]

    @property
    def channels(self):
        return self.kernels.shape[2]

    @property
    def origin(self):
        rows, cols = self.shape
        return rows // 2, cols // 2

    @classmethod
    def delta(cls, size=1, channels=1):
        kernels = np.zeros((size, size, channels))
        kernels[size // 2, size // 2, :] = 1.0
        return cls(kernels, PsfNormalization.UNIT_SUM, (1.0,) * channels)
