"""Synthetic polarization scenes modeled on the front- and back-illuminated setups."""
import logging

import numpy as np

from polarlens.models.scene import SceneSpec
from polarlens.utils.stokes import subimages_from_stokes

logger = logging.getLogger(__name__)


def region_labels(rng, extent, count):
    """Label map of ``count`` overlapping rectangles and ellipses; 0 is background"""
    height, width = extent
    rows, cols = np.mgrid[0:height, 0:width]
    labels = np.zeros(extent, dtype=np.int64)
    for label in range(1, count + 1):
        cy, cx = rng.uniform(0.15, 0.85) * height, rng.uniform(0.15, 0.85) * width
        ry, rx = rng.uniform(0.08, 0.25) * height, rng.uniform(0.08, 0.25) * width
        if rng.random() < 0.5:
            inside = (np.abs(rows - cy) <= ry) & (np.abs(cols - cx) <= rx)
        else:
            inside = ((rows - cy) / ry) ** 2 + ((cols - cx) / rx) ** 2 <= 1.0
        labels[inside] = label
    return labels


def _piecewise_constant(spec, rng):
    shape = (spec.height, spec.width, spec.channels)
    labels = region_labels(rng, spec.extent, spec.regions)
    s0 = np.full(shape, spec.background)
    dolp = np.zeros(shape)
    aolp = np.zeros(shape)
    for label in range(1, spec.regions + 1):
        inside = labels == label
        s0[inside] = rng.uniform(0.3, 1.0, size=spec.channels)
        dolp[inside] = rng.uniform(0.0, 1.0)
        aolp[inside] = rng.uniform(-90.0, 90.0)
    return s0, dolp, aolp


def _two_source(spec, rng):
    """Objects lit by a polarized source from each side"""
    shape = (spec.height, spec.width, spec.channels)
    labels = region_labels(rng, spec.extent, spec.regions)
    s0 = np.full(shape, spec.background)
    for label in range(1, spec.regions + 1):
        s0[labels == label] = rng.uniform(0.4, 1.0, size=spec.channels)
    left = np.arange(spec.width) < spec.width // 2
    aolp = np.where(left[None, :, None], spec.source_angles[0], spec.source_angles[1])
    aolp = np.broadcast_to(aolp, shape).astype(np.float64)
    dolp = np.full(shape, spec.dolp)
    return s0, dolp, aolp


def _birefringent_screen(spec, rng):
    """Stressed film in front of a polarized backlight; rotation depends on color"""
    shape = (spec.height, spec.width, spec.channels)
    labels = region_labels(rng, spec.extent, spec.regions)
    film = labels > 0
    rows, cols = np.mgrid[0:spec.height, 0:spec.width]
    stress = np.zeros(spec.extent)
    for _ in range(4):
        cy, cx = rng.uniform(0, spec.height), rng.uniform(0, spec.width)
        width = rng.uniform(0.1, 0.3) * max(spec.extent)
        stress += rng.uniform(-1.0, 1.0) * np.exp(-((rows - cy) ** 2 + (cols - cx) ** 2) / (2 * width ** 2))
    dispersion = 1.0 + 0.3 * (np.arange(spec.channels) - (spec.channels - 1) / 2.0)
    rotation = 60.0 * stress[:, :, None] * dispersion[None, None, :]

    s0 = np.full(shape, 0.8)
    s0[film] *= 0.85
    aolp = np.full(shape, spec.screen_angle)
    aolp[film] += rotation[film]
    dolp = np.full(shape, spec.dolp)
    dolp[film] *= 0.8
    return s0, dolp, aolp


_BUILDERS = {
    'piecewise-constant': _piecewise_constant,
    'two-source': _two_source,
    'birefringent-screen': _birefringent_screen,
}


def synthesize_scene(spec=None):
    """(H, W, C, 4) sub-images I_0, I_45, I_90, I_135 for ``spec``"""
    spec = spec or SceneSpec()
    rng = np.random.default_rng(spec.seed)
    s0, dolp, aolp = _BUILDERS[spec.kind](spec, rng)
    scene = subimages_from_stokes(s0, dolp, aolp)
    logger.debug('scene %s: %s, mean S0 %.3f', spec.scene_id(), scene.shape, float(s0.mean()))
    return np.maximum(scene, 0.0)
