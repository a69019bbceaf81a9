"""8-bit PNG previews of tensors."""
import logging

import numpy as np
from PIL import Image

from polarlens.errors import DimensionError

logger = logging.getLogger(__name__)

NORMALIZE_POLICIES = ('global', 'per-channel')


def _scale(values):
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return np.full(values.shape, 0.5), (lo, hi)
    return (values - lo) / (hi - lo), (lo, hi)


def preview_array(tensor, normalize='global', polarization=None, channel=None):
    """Min-max scale a tensor to uint8 (H, W) or (H, W, 3) pixels.

    4D scenes need ``polarization``; ``channel`` selects one color plane.
    """
    if normalize not in NORMALIZE_POLICIES:
        raise ValueError(f'normalize must be one of {NORMALIZE_POLICIES}, got {normalize!r}')
    values = tensor.to_array()
    roles = tensor.roles or 'HWCP'[:values.ndim]
    if values.ndim == 4:
        if polarization is None:
            raise DimensionError('4D tensor needs a polarization slice selector', axis='P')
        values = values[:, :, :, polarization]
        roles = roles.replace('P', '')
    if channel is not None and values.ndim == 3:
        values = values[:, :, channel]
    if values.ndim == 3 and values.shape[2] > 3:
        raise DimensionError(f'preview supports at most 3 channels, got {values.shape[2]}', axis='C')
    if values.ndim not in (2, 3):
        raise DimensionError(f'cannot preview a {roles or values.ndim} tensor')

    if normalize == 'per-channel' and values.ndim == 3:
        planes, ranges = zip(*(_scale(values[:, :, c]) for c in range(values.shape[2])))
        scaled = np.stack(planes, axis=2)
    else:
        scaled, rng = _scale(values)
        ranges = (rng,)
    pixels = np.clip(np.round(scaled * 255.0), 0, 255).astype(np.uint8)
    if pixels.ndim == 3 and pixels.shape[2] == 1:
        pixels = pixels[:, :, 0]
    elif pixels.ndim == 3 and pixels.shape[2] == 2:
        pixels = np.concatenate([pixels, np.zeros_like(pixels[:, :, :1])], axis=2)
    return pixels, ranges


def export_preview(tensor, path, normalize='global', polarization=None, channel=None):
    """Write a lossless PNG preview and log the scaling ranges"""
    pixels, ranges = preview_array(tensor, normalize, polarization, channel)
    Image.fromarray(pixels).save(path, format='PNG')
    logger.info('preview %s scaled from %s', path,
                ', '.join(f'[{lo:.4g}, {hi:.4g}]' for lo, hi in ranges))
    return ranges
