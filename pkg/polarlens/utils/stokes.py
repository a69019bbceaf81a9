"""Linear Stokes parameters from the 0/45/90/135 degree sub-images."""
import numpy as np

from polarlens.errors import DimensionError
from polarlens.models.stokes import StokesMaps

DOLP_FLOOR = 1e-12
AOLP_TOLERANCE = 1e-9


def stokes_from_subimages(x, floor=DOLP_FLOOR, tolerance=AOLP_TOLERANCE):
    """S0 = I0 + I90, S1 = I0 - I90, S2 = I45 - I135 per pixel and color"""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4 or x.shape[3] != 4:
        raise DimensionError(f'Stokes estimation needs P == 4 sub-images, got shape {x.shape}', axis='P')
    i0, i45, i90, i135 = (x[:, :, :, p] for p in range(4))
    s0 = i0 + i90
    s1 = i0 - i90
    s2 = i45 - i135
    linear = np.hypot(s1, s2)
    dolp = np.clip(linear / np.maximum(s0, floor), 0.0, 1.0)
    valid = linear > tolerance
    aolp = np.degrees(0.5 * np.arctan2(s2, s1))
    aolp = np.where(aolp >= 90.0, aolp - 180.0, aolp)
    aolp = np.where(valid, aolp, 0.0)
    return StokesMaps(s0, s1, s2, dolp, aolp, valid)


def subimages_from_stokes(s0, dolp, aolp_deg, orientations=(0.0, 45.0, 90.0, 135.0)):
    """I_theta = S0 / 2 (1 + DoLP cos 2(theta - psi)) stacked along a last P axis"""
    s0 = np.asarray(s0, dtype=np.float64)
    dolp = np.asarray(dolp, dtype=np.float64)
    if np.any(dolp < 0) or np.any(dolp > 1):
        raise ValueError('DoLP must lie in [0, 1]')
    psi = np.radians(aolp_deg)
    return np.stack([0.5 * s0 * (1.0 + dolp * np.cos(2.0 * (np.radians(theta) - psi)))
                     for theta in orientations], axis=-1)
