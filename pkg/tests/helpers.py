import numpy as np

from polarlens.models.masks import MaskMaps
from polarlens.models.optics import PsfStack


def random_instance(rng, height, width, channels, pols, conv_mode=None, kernel=3):
    """Random PSF, mask, scene and measurement for an (H, W, C, P) operator"""
    kernel = min(kernel, height, width)
    psf = PsfStack(rng.uniform(0.0, 1.0, size=(kernel, kernel, channels)))
    mask = MaskMaps(rng.uniform(0.0, 1.0, size=(height, width, pols)), provenance='perturbed')
    x = rng.normal(size=(height, width, channels, pols))
    y = rng.normal(size=(height, width, channels))
    return psf, mask, x, y
