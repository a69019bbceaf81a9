"""Synthetic diffuser PSFs: sparse impulses spread over the sensor."""
import numpy as np

from polarlens.models.optics import PsfNormalization, PsfStack
from polarlens.utils.forward_model import measure_psf_normalize


def make_sparse_psf(extent, channels=3, n_impulses=200, seed=0, normalize=False):
    """Impulses at shared uniform positions with per-channel uniform amplitudes.

    The raw stack reads like a point-source capture scaled to a unit peak, so
    each channel sums to about n_impulses / 2. ``normalize`` rescales every
    channel to unit sum instead.
    """
    height, width = extent
    if n_impulses < 1:
        raise ValueError(f'need at least one impulse, got {n_impulses}')
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, height, size=n_impulses)
    cols = rng.integers(0, width, size=n_impulses)
    amplitudes = rng.uniform(0.0, 1.0, size=(n_impulses, channels))
    kernels = np.zeros((height, width, channels))
    np.add.at(kernels, (rows, cols), amplitudes)
    psf = PsfStack(kernels, PsfNormalization.RAW)
    return measure_psf_normalize(psf) if normalize else psf


def psf_scale_summary(psf):
    """Per-channel sum and energy of the kernels, as recorded in run manifests"""
    return {
        'normalization': psf.normalization.value,
        'channel_sums': [float(s) for s in psf.kernels.sum(axis=(0, 1))],
        'channel_energy': [float(e) for e in (psf.kernels ** 2).sum(axis=(0, 1))],
        'scale_factors': list(psf.scale_factors),
    }
