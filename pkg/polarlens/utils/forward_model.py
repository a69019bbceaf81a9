"""Polarization-multiplexed lensless forward model and its adjoint.

For every color channel c the sensor sees

    y_c = sum_p S_p * (x_{c,p} conv k_c)

where the convolution is 2D over (H, W). Convolutions run through real FFTs on
either the scene grid (circular) or a zero-padded 2H x 2W grid whose central
H x W window is kept (pad-crop). The adjoint correlates with the same kernels.
"""
import logging

import numpy as np
from scipy import fft

from polarlens.errors import DimensionError, SolverError
from polarlens.models.masks import MaskMaps
from polarlens.models.optics import ConvMode, PsfNormalization, PsfStack
from polarlens.models.tensor import check_extents

logger = logging.getLogger(__name__)


def embed_kernel(kernels, padded_shape, origin):
    """Place (Hk, Wk, C) kernels on the padded grid with ``origin`` moved to (0, 0)"""
    rows, cols = kernels.shape[:2]
    grid = np.zeros(tuple(padded_shape) + kernels.shape[2:])
    grid[:rows, :cols] = kernels
    return np.roll(grid, shift=(-origin[0], -origin[1]), axis=(0, 1))


class ForwardOperator:
    """Linear operator A mapping an (H, W, C, P) scene to an (H, W, C) measurement.

    Immutable after construction; safe to share between threads.
    """

    def __init__(self, psf, mask, scene_shape, conv_mode=ConvMode.PAD_CROP, workers=1):
        height, width, channels, pols = (int(n) for n in scene_shape)
        self.scene_shape = (height, width, channels, pols)
        self.conv_mode = ConvMode(conv_mode)
        self.workers = max(1, int(workers))
        self.psf = psf
        self.mask = mask

        if psf.channels != channels:
            raise DimensionError(f'PSF has {psf.channels} color channels, scene has {channels}', axis='C')
        if mask.extent[0] != height:
            raise DimensionError(f'mask height {mask.extent[0]} does not match sensor height {height}', axis='H')
        if mask.extent[1] != width:
            raise DimensionError(f'mask width {mask.extent[1]} does not match sensor width {width}', axis='W')
        if mask.count != pols:
            raise DimensionError(f'mask has {mask.count} maps, scene has {pols} polarizations', axis='P')

        if self.conv_mode is ConvMode.CIRCULAR:
            self.padded_shape = (height, width)
            self.offset = (0, 0)
        else:
            self.padded_shape = (2 * height, 2 * width)
            self.offset = (height // 2, width // 2)
        kernel_rows, kernel_cols = psf.shape
        if kernel_rows > self.padded_shape[0] or kernel_cols > self.padded_shape[1]:
            raise DimensionError(
                f'kernel {psf.shape} larger than padded scene {self.padded_shape}',
                axis='H' if kernel_rows > self.padded_shape[0] else 'W')

        embedded = embed_kernel(psf.kernels, self.padded_shape, psf.origin)
        otf = fft.rfft2(embedded, axes=(0, 1), workers=self.workers)
        otf.flags.writeable = False
        self._otf = otf
        self._maps = mask.maps

    @property
    def sensor_shape(self):
        return self.scene_shape[:3]

    def _pad(self, values):
        if self.conv_mode is ConvMode.CIRCULAR:
            return values
        rows, cols = self.scene_shape[:2]
        top, left = self.offset
        padded = np.zeros(self.padded_shape + values.shape[2:])
        padded[top:top + rows, left:left + cols] = values
        return padded

    def _crop(self, values):
        if self.conv_mode is ConvMode.CIRCULAR:
            return values
        rows, cols = self.scene_shape[:2]
        top, left = self.offset
        return np.ascontiguousarray(values[top:top + rows, left:left + cols])

    def _filter(self, values, otf):
        spectrum = fft.rfft2(self._pad(values), axes=(0, 1), workers=self.workers)
        spectrum *= otf[:, :, :, None]
        full = fft.irfft2(spectrum, s=self.padded_shape, axes=(0, 1), workers=self.workers)
        return self._crop(full)

    def convolve(self, x):
        """Per-(c, p) convolution with k_c, without mask modulation"""
        check_extents(x, self.scene_shape, 'HWCP')
        return self._filter(np.asarray(x, dtype=np.float64), self._otf)

    def correlate(self, r):
        """Adjoint of ``convolve``"""
        check_extents(r, self.scene_shape, 'HWCP')
        return self._filter(np.asarray(r, dtype=np.float64), np.conj(self._otf))

    def multiplex(self, per_angle):
        """Sum mask-modulated per-polarization images; p-ascending accumulation"""
        check_extents(per_angle, self.scene_shape, 'HWCP')
        return multiplex_measurements(per_angle, self._maps)

    def forward(self, x):
        return self.multiplex(self.convolve(x))

    def adjoint(self, y):
        check_extents(y, self.sensor_shape, 'HWC')
        spread = self._maps[:, :, None, :] * np.asarray(y, dtype=np.float64)[:, :, :, None]
        return self.correlate(spread)

    def gram(self, x, rho):
        if not rho > 0:
            raise SolverError(f'rho must be positive, got {rho}')
        return self.adjoint(self.forward(x)) + rho * x


def multiplex_measurements(per_angle, maps):
    """y_c = sum_p S_p * m_{c,p} for per-angle measurements m of shape (H, W, C, P)"""
    maps = maps.maps if isinstance(maps, MaskMaps) else np.asarray(maps)
    if per_angle.shape[:2] != maps.shape[:2]:
        raise DimensionError(f'measurement extent {per_angle.shape[:2]} does not match mask {maps.shape[:2]}',
                             axis='H' if per_angle.shape[0] != maps.shape[0] else 'W')
    if per_angle.shape[3] != maps.shape[2]:
        raise DimensionError(f'{per_angle.shape[3]} polarization measurements for {maps.shape[2]} mask maps',
                             axis='P')
    measurement = np.zeros(per_angle.shape[:3])
    for p in range(per_angle.shape[3]):
        measurement += maps[:, :, p, None] * per_angle[:, :, :, p]
    return measurement


def forward_apply(op, x):
    return op.forward(x)


def adjoint_apply(op, y):
    return op.adjoint(y)


def gram_apply(op, x, rho):
    return op.gram(x, rho)


def simulate_per_angle(op, x):
    """Single-polarization lensless captures taken without the mask"""
    return op.convolve(x)


def add_measurement_noise(y, sigma, seed):
    """Additive Gaussian sensor noise e in y = Ax + e"""
    if sigma < 0:
        raise ValueError(f'noise sigma must be nonnegative, got {sigma}')
    if sigma == 0:
        return np.array(y, dtype=np.float64, copy=True)
    rng = np.random.default_rng(seed)
    return y + rng.normal(0.0, sigma, size=y.shape)


def measure_psf_normalize(psf):
    """Scale each channel's kernel to unit sum; the divisors are recorded"""
    sums = psf.kernels.sum(axis=(0, 1))
    empty = [c for c, total in enumerate(sums) if not total > 0]
    if empty:
        raise ValueError(f'PSF channel(s) {empty} are all zero')
    kernels = psf.kernels / sums[None, None, :]
    logger.info('PSF normalized, channel scale factors %s', ', '.join(f'{s:.6g}' for s in sums))
    return PsfStack(kernels, PsfNormalization.UNIT_SUM, tuple(sums.tolist()))
