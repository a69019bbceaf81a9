"""PSNR / SSIM evaluation of reconstructed polarization sub-images."""
import logging

import numpy as np
from skimage.metrics import mean_squared_error, peak_signal_noise_ratio, structural_similarity

from polarlens.errors import MetricError
from polarlens.models.stokes import IDENTICAL, MetricReport

logger = logging.getLogger(__name__)

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _same_shape(x, ref):
    if x.shape != ref.shape:
        raise MetricError(f'extent mismatch: {x.shape} vs reference {ref.shape}')


def psnr(x, ref, data_range):
    """10 log10(data_range^2 / MSE), or IDENTICAL when the MSE is zero"""
    x = np.asarray(x, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    _same_shape(x, ref)
    if not data_range > 0:
        raise MetricError(f'data_range must be positive, got {data_range}')
    if mean_squared_error(ref, x) == 0:
        return IDENTICAL
    return float(peak_signal_noise_ratio(ref, x, data_range=data_range))


def ssim(x, ref, data_range, window=SSIM_WINDOW, k1=SSIM_K1, k2=SSIM_K2):
    """Gaussian-window SSIM (sigma 1.5); (H, W, C) inputs are averaged over C"""
    x = np.asarray(x, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    _same_shape(x, ref)
    if window % 2 == 0:
        raise MetricError(f'SSIM window must be odd, got {window}')
    if min(x.shape[:2]) < window:
        raise MetricError(f'image {x.shape[:2]} smaller than SSIM window {window}')
    channel_axis = -1 if x.ndim == 3 else None
    return float(structural_similarity(
        x, ref, data_range=data_range, channel_axis=channel_axis,
        win_size=window, gaussian_weights=True, sigma=SSIM_SIGMA,
        use_sample_covariance=False, K1=k1, K2=k2))


def evaluate_against_reference(estimate, ref, reference='ground-truth'):
    """Per-polarization PSNR/SSIM after scaling both scenes by max(ref)"""
    estimate = np.asarray(estimate, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    _same_shape(estimate, ref)
    peak = float(ref.max())
    if not peak > 0:
        raise MetricError('reference scene is all zero')
    estimate = estimate / peak
    ref = ref / peak
    psnr_values, ssim_values = [], []
    for p in range(ref.shape[3]):
        psnr_values.append(psnr(estimate[:, :, :, p], ref[:, :, :, p], 1.0))
        ssim_values.append(ssim(estimate[:, :, :, p], ref[:, :, :, p], 1.0))
    report = MetricReport(psnr_values, ssim_values, data_range=1.0, reference=reference)
    logger.debug('metrics vs %s: PSNR %s, SSIM %.4f', reference, report.mean_psnr, report.mean_ssim)
    return report
