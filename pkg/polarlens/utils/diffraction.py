"""Scalar diffraction analysis of the gap between the polarization mask and the sensor.

A thin lens stands in for the diffuser and focuses a spherical wave onto the sensor.
The mask, modeled for one analyzer orientation as a 1D amplitude grating, sits z2
in front of the sensor. Free space is propagated with the angular spectrum
method; evanescent components are dropped.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy import fft

from polarlens.errors import DiffractionError
from polarlens.models.field import ComplexField, GratingSpec, GridSpec

logger = logging.getLogger(__name__)


def transfer_function(grid, z):
    freqs = fft.fftfreq(grid.n, d=grid.pitch)
    fx, fy = np.meshgrid(freqs, freqs, indexing='xy')
    argument = 1.0 - (grid.wavelength * fx) ** 2 - (grid.wavelength * fy) ** 2
    band = argument >= 0
    phase = grid.wavenumber * z * np.sqrt(np.where(band, argument, 0.0))
    return np.where(band, np.exp(1j * phase), 0.0)


def angular_spectrum_propagate(u, z, allow_backward=False, workers=1):
    """Propagate a field over distance z (meters)"""
    if z < 0 and not allow_backward:
        raise DiffractionError(f'propagation distance must be nonnegative, got {z}')
    if not np.all(np.isfinite(u.values)):
        raise DiffractionError('cannot propagate a non-finite field')
    spectrum = fft.fft2(u.values, workers=workers)
    spectrum *= transfer_function(u.grid, z)
    return u.with_values(fft.ifft2(spectrum, workers=workers))


def thin_lens_field(focal_length, pupil_radius, grid):
    """Unit amplitude inside a circular pupil times exp(-i k r^2 / 2f)"""
    half_extent = grid.n // 2 * grid.pitch
    if pupil_radius > half_extent:
        raise DiffractionError(f'pupil radius {pupil_radius:.4g} m exceeds grid half-extent {half_extent:.4g} m')
    x, y = grid.mesh()
    r2 = x ** 2 + y ** 2
    pupil = (r2 <= pupil_radius ** 2).astype(np.complex128)
    if math.isinf(focal_length):
        return ComplexField(pupil, grid)
    return ComplexField(pupil * np.exp(-1j * grid.wavenumber * r2 / (2.0 * focal_length)), grid)


def grating_transmission(grid, spec):
    """Amplitude transmission T(x) sampled on the grid's x axis"""
    x = grid.coordinates()
    index = np.floor((x - spec.offset) / spec.stripe_width).astype(np.int64) % len(spec.amplitude_levels)
    return np.asarray(spec.amplitude_levels)[index]


def apply_grating(u, spec):
    if spec.stripe_width < u.grid.pitch:
        raise DiffractionError(f'stripe width {spec.stripe_width:.3g} m below pixel pitch {u.grid.pitch:.3g} m')
    return u.with_values(u.values * grating_transmission(u.grid, spec)[None, :])


def second_moments(intensity, grid):
    """Second moments (x, y) of unit-sum intensity about its centroid, in m^2"""
    total = intensity.sum()
    if not total > 0:
        raise DiffractionError('intensity has no energy')
    weights = intensity / total
    axis = grid.coordinates()
    marginal_x = weights.sum(axis=0)
    marginal_y = weights.sum(axis=1)
    cx = float(np.dot(marginal_x, axis))
    cy = float(np.dot(marginal_y, axis))
    return float(np.dot(marginal_x, (axis - cx) ** 2)), float(np.dot(marginal_y, (axis - cy) ** 2))


@dataclass(frozen=True)
class GapConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    focal_length: float = 20e-3
    pupil_ratio: float = 0.1
    grating: GratingSpec = field(default_factory=GratingSpec)
    z2: float = 1.66e-3
    check_spreading: bool = True

    @property
    def pupil_radius(self):
        return self.pupil_ratio * self.grid.length

    @classmethod
    def full(cls):
        return cls(grid=GridSpec(n=4096, pitch=3e-6, wavelength=532e-9))

    @classmethod
    def desk(cls):
        return cls(grid=GridSpec(n=1024, pitch=3e-6, wavelength=532e-9))


@dataclass
class GapReport:
    z2: float
    intensity_with: np.ndarray
    intensity_without: np.ndarray
    profile_with: np.ndarray
    profile_without: np.ndarray
    moments_with: tuple
    moments_without: tuple
    energy_with: float
    energy_without: float

    @property
    def spreading_ratio(self):
        return self.moments_with[0] / self.moments_without[0]

    @property
    def spreads(self):
        return self.moments_with[0] > self.moments_without[0]

    def rows(self):
        for case, moments, energy in (('without-grating', self.moments_without, self.energy_without),
                                      ('with-grating', self.moments_with, self.energy_with)):
            yield {'case': case, 'z2': self.z2, 'second_moment_x': moments[0],
                   'second_moment_y': moments[1], 'energy': energy}


def _center_profile(intensity):
    row = intensity[intensity.shape[0] // 2]
    peak = row.max()
    return row / peak if peak > 0 else row


def mask_gap_experiment(cfg=None, workers=1):
    """Compare sensor-plane intensities with and without the grating z2 before the sensor"""
    cfg = cfg or GapConfig.desk()
    if not 0 <= cfg.z2 < cfg.focal_length:
        raise DiffractionError(f'z2 must lie in [0, f), got {cfg.z2} with f={cfg.focal_length}')
    z1 = cfg.focal_length - cfg.z2
    lens = thin_lens_field(cfg.focal_length, cfg.pupil_radius, cfg.grid)
    at_mask = angular_spectrum_propagate(lens, z1, workers=workers)
    with_grating = angular_spectrum_propagate(apply_grating(at_mask, cfg.grating), cfg.z2, workers=workers)
    without_grating = angular_spectrum_propagate(at_mask, cfg.z2, workers=workers)

    report = GapReport(
        z2=cfg.z2,
        intensity_with=with_grating.intensity,
        intensity_without=without_grating.intensity,
        profile_with=_center_profile(with_grating.intensity),
        profile_without=_center_profile(without_grating.intensity),
        moments_with=second_moments(with_grating.intensity, cfg.grid),
        moments_without=second_moments(without_grating.intensity, cfg.grid),
        energy_with=with_grating.energy,
        energy_without=without_grating.energy,
    )
    logger.info('z2=%.3g m: second moment x %.4e (grating) vs %.4e (none), ratio %.3f',
                cfg.z2, report.moments_with[0], report.moments_without[0], report.spreading_ratio)
    if cfg.check_spreading and cfg.z2 > 0 and not report.spreads:
        raise DiffractionError(
            f'no spreading perpendicular to the stripes at z2={cfg.z2:.3g} m '
            f'(second moment ratio {report.spreading_ratio:.4f})')
    return report
