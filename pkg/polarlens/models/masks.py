from dataclasses import dataclass, field, replace

import numpy as np

from polarlens.errors import MaskError

PROVENANCES = ('ideal-indicator', 'measured-response', 'perturbed', 'uniform')


@dataclass(frozen=True)
class StripeGeometry:
    """Periodic polarizer stripes; the prototype uses 256 px stripes."""
    stripe_width: int = 256
    orientation_cycle: tuple = (0.0, 45.0, 90.0, 135.0)
    stripe_axis: str = 'vertical'
    phase_offset: int = 0

    def __post_init__(self):
        cycle = tuple(float(angle) for angle in self.orientation_cycle)
        if not cycle:
            raise MaskError('orientation cycle is empty')
        if len(set(cycle)) != len(cycle):
            raise MaskError(f'orientation cycle has repeated angles {cycle}')
        if any(not 0.0 <= angle < 180.0 for angle in cycle):
            raise MaskError(f'orientations must lie in [0, 180), got {cycle}')
        if int(self.stripe_width) < 1:
            raise MaskError(f'stripe_width must be >= 1, got {self.stripe_width}')
        if self.stripe_axis not in ('vertical', 'horizontal'):
            raise MaskError(f"stripe_axis must be 'vertical' or 'horizontal', got {self.stripe_axis!r}")
        object.__setattr__(self, 'orientation_cycle', cycle)
        object.__setattr__(self, 'stripe_width', int(self.stripe_width))
        object.__setattr__(self, 'phase_offset', int(self.phase_offset))

    @property
    def period(self):
        return self.stripe_width * len(self.orientation_cycle)

    @property
    def blur_axis(self):
        """Array axis across the stripes: vertical stripes vary along width"""
        return 1 if self.stripe_axis == 'vertical' else 0

    def to_dict(self):
        return {
            'stripe_width': self.stripe_width,
            'orientation_cycle': list(self.orientation_cycle),
            'stripe_axis': self.stripe_axis,
            'phase_offset': self.phase_offset,
        }


@dataclass(frozen=True)
class MaskMaps:
    """P transmission maps in [0, 1] stored as an (H, W, P) array"""
    maps: np.ndarray
    provenance: str = 'ideal-indicator'
    geometry: StripeGeometry = field(default_factory=StripeGeometry)
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self):
        maps = np.array(self.maps, dtype=np.float64, copy=True)
        if maps.ndim == 2:
            maps = maps[:, :, None]
        if maps.ndim != 3:
            raise MaskError(f'mask maps must be (H, W, P), got shape {maps.shape}')
        if self.provenance not in PROVENANCES:
            raise MaskError(f'unknown provenance {self.provenance!r}')
        if not np.all(np.isfinite(maps)) or maps.min() < 0.0 or maps.max() > 1.0:
            raise MaskError('mask transmissions must lie in [0, 1]')
        maps.flags.writeable = False
        object.__setattr__(self, 'maps', maps)

    @property
    def extent(self):
        return self.maps.shape[:2]

    @property
    def count(self):
        return self.maps.shape[2]

    def derive(self, maps, provenance='perturbed', **descriptor):
        """New mask with the same geometry; descriptor entries accumulate"""
        merged = dict(self.descriptor)
        merged.update(descriptor)
        return replace(self, maps=maps, provenance=provenance, descriptor=merged)

    def sidecar(self):
        return {
            'provenance': self.provenance,
            'geometry': self.geometry.to_dict(),
            'extent': list(self.extent),
            'count': self.count,
            **self.descriptor,
        }

    @classmethod
    def uniform(cls, extent, count=1):
        return cls(np.ones(tuple(extent) + (count,)), provenance='uniform',
                   geometry=StripeGeometry(stripe_width=max(extent), orientation_cycle=(0.0,)))
