from dataclasses import dataclass, replace
import math

import numpy as np

from polarlens.errors import DiffractionError


@dataclass(frozen=True)
class GridSpec:
    """Square N x N sampling grid; coordinates are (i - N/2) * pitch"""
    n: int = 1024
    pitch: float = 3e-6
    wavelength: float = 532e-9

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise DiffractionError(f'grid size must be a power of two >= 2, got {self.n}')
        if not self.pitch > 0 or not self.wavelength > 0:
            raise DiffractionError('pitch and wavelength must be positive')

    @property
    def length(self):
        return self.n * self.pitch

    @property
    def wavenumber(self):
        return 2.0 * math.pi / self.wavelength

    def coordinates(self):
        return (np.arange(self.n) - self.n // 2) * self.pitch

    def mesh(self):
        axis = self.coordinates()
        return np.meshgrid(axis, axis, indexing='xy')


@dataclass(frozen=True)
class ComplexField:
    """Complex amplitudes indexed [y, x] on a GridSpec"""
    values: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (self.grid.n, self.grid.n):
            raise DiffractionError(f'field shape {values.shape} does not match grid {self.grid.n}')
        if not np.all(np.isfinite(values)):
            raise DiffractionError('field contains non-finite values')
        object.__setattr__(self, 'values', values)

    @property
    def intensity(self):
        return np.abs(self.values) ** 2

    @property
    def energy(self):
        return float(self.intensity.sum() * self.grid.pitch ** 2)

    def with_values(self, values):
        return replace(self, values=values)


@dataclass(frozen=True)
class GratingSpec:
    """1D amplitude grating of vertical stripes; variation along x"""
    stripe_width: float = 880e-6
    amplitude_levels: tuple = (0.0, math.sqrt(0.5), 1.0, math.sqrt(0.5))
    offset: float = 0.0

    def __post_init__(self):
        levels = tuple(float(a) for a in self.amplitude_levels)
        if not levels or any(not 0.0 <= a <= 1.0 for a in levels):
            raise DiffractionError(f'amplitude levels must lie in [0, 1], got {levels}')
        if not self.stripe_width > 0:
            raise DiffractionError('stripe width must be positive')
        object.__setattr__(self, 'amplitude_levels', levels)

    @property
    def period(self):
        return self.stripe_width * len(self.amplitude_levels)
