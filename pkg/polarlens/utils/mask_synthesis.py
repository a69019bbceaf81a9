"""Striped polarization masks and the controlled perturbation families.

Ideal masks are binary stripe indicators (a partition of unity). Measured-response
masks emulate the calibration capture: a stripe oriented at phi, viewed through an
external polarizer at angle p, transmits (1 - eps) cos^2(p - phi) + eps / 2.
"""
import logging
import math

import numpy as np
from scipy import ndimage

from polarlens.errors import MaskError
from polarlens.models.masks import MaskMaps

logger = logging.getLogger(__name__)


def stripe_index(extent, geom):
    """Index into ``geom.orientation_cycle`` of the stripe covering each pixel"""
    height, width = extent
    along = np.arange(width if geom.stripe_axis == 'vertical' else height)
    index = np.floor_divide(along - geom.phase_offset, geom.stripe_width) % len(geom.orientation_cycle)
    if geom.stripe_axis == 'vertical':
        return np.broadcast_to(index[None, :], (height, width))
    return np.broadcast_to(index[:, None], (height, width))


def make_ideal_mask(extent, geom):
    index = stripe_index(extent, geom)
    maps = np.stack([(index == p).astype(np.float64) for p in range(len(geom.orientation_cycle))], axis=2)
    return MaskMaps(maps, provenance='ideal-indicator', geometry=geom)


def malus_transmission(analyzer_deg, stripe_deg, extinction):
    delta = np.deg2rad(np.asarray(analyzer_deg, dtype=np.float64) - np.asarray(stripe_deg, dtype=np.float64))
    return (1.0 - extinction) * np.cos(delta) ** 2 + extinction / 2.0


def synthesize_measured_response(geom, extent, extinction=0.0):
    """Sample the stripe pattern once per orientation in the cycle"""
    if not 0.0 <= extinction < 1.0:
        raise MaskError(f'extinction must lie in [0, 1), got {extinction}')
    cycle = np.asarray(geom.orientation_cycle)
    stripe_angle = cycle[stripe_index(extent, geom)]
    maps = np.stack([malus_transmission(analyzer, stripe_angle, extinction) for analyzer in cycle], axis=2)
    np.clip(maps, 0.0, 1.0, out=maps)
    return MaskMaps(maps, provenance='measured-response', geometry=geom,
                    descriptor={'extinction': float(extinction)})


def gaussian_kernel_1d(sigma):
    """Gaussian taps truncated at ceil(4 sigma), renormalized to unit sum"""
    radius = max(1, math.ceil(4.0 * sigma))
    taps = np.exp(-0.5 * (np.arange(-radius, radius + 1) / sigma) ** 2)
    return taps / taps.sum()


def blur_mask(mask, sigma):
    """1D Gaussian blur across the stripes with replicate borders"""
    if sigma < 0:
        raise MaskError(f'blur sigma must be nonnegative, got {sigma}')
    if sigma == 0:
        return mask.derive(mask.maps, blur_sigma=0.0)
    taps = gaussian_kernel_1d(sigma)
    blurred = ndimage.convolve1d(mask.maps, taps, axis=mask.geometry.blur_axis, mode='nearest')
    np.clip(blurred, 0.0, 1.0, out=blurred)
    return mask.derive(blurred, blur_sigma=float(sigma))


def noise_mask(mask, sigma, seed):
    """Additive i.i.d. Gaussian noise from a seeded PCG64 generator, clamped to [0, 1]"""
    if sigma < 0:
        raise MaskError(f'noise sigma must be nonnegative, got {sigma}')
    if sigma == 0:
        return mask.derive(mask.maps, noise_sigma=0.0, noise_seed=int(seed))
    rng = np.random.Generator(np.random.PCG64(seed))
    noisy = np.clip(mask.maps + rng.normal(0.0, sigma, size=mask.maps.shape), 0.0, 1.0)
    return mask.derive(noisy, noise_sigma=float(sigma), noise_seed=int(seed))


def normalize_maps(maps):
    """Per-map min-max scaling to [0, 1]; constant maps are only clipped"""
    out = np.empty_like(maps)
    for p in range(maps.shape[2]):
        plane = maps[:, :, p]
        lo, hi = plane.min(), plane.max()
        out[:, :, p] = (plane - lo) / (hi - lo) if hi > lo else np.clip(plane, 0.0, 1.0)
    return out


def interpolate_masks(measured, simulated, t):
    """(1 - t) normalized(measured) + t simulated"""
    if not 0.0 <= t <= 1.0:
        raise MaskError(f'interpolation t must lie in [0, 1], got {t}')
    if measured.maps.shape != simulated.maps.shape:
        raise MaskError(f'mask extents differ: {measured.maps.shape} vs {simulated.maps.shape}')
    normalized = normalize_maps(measured.maps)
    if t == 0:
        mixed = normalized
    elif t == 1:
        mixed = np.array(simulated.maps, copy=True)
    else:
        mixed = np.clip((1.0 - t) * normalized + t * simulated.maps, 0.0, 1.0)
    return measured.derive(mixed, interpolation_t=float(t))
