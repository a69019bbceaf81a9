"""Weighted anisotropic TV proximal step by Haar detail shrinkage.

Each active axis gets a single-level undecimated Haar pass: the signal is split
into neighbour pairs starting at offset 0 and at offset 1, detail coefficients
(a - b) / sqrt(2) are soft-thresholded by ``threshold * w_axis``, and the two
reconstructions are averaged. Samples left without a partner pass through.
Axes are processed one after the other in (H, W, C, P) order.
"""
import numpy as np

from polarlens.models.solver import TvWeights

AXIS_ORDER = (0, 1, 2, 3)
_SQRT2 = np.sqrt(2.0)


def soft_threshold(values, threshold):
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.0)


def haar_shrink_axis(x, axis, threshold, phase):
    """One Haar phase along ``axis``: pairs (phase, phase+1), (phase+2, phase+3), ..."""
    out = np.array(x, dtype=np.float64, copy=True)
    n = x.shape[axis]
    pairs = (n - phase) // 2
    if pairs <= 0 or threshold == 0:
        return out
    moved = np.moveaxis(out, axis, 0)
    stop = phase + 2 * pairs
    first = moved[phase:stop:2]
    second = moved[phase + 1:stop:2]
    approx = (first + second) / _SQRT2
    detail = soft_threshold((first - second) / _SQRT2, threshold)
    moved[phase:stop:2] = (approx + detail) / _SQRT2
    moved[phase + 1:stop:2] = (approx - detail) / _SQRT2
    return out


def haar_shrink_cycle_spin(x, axis, threshold):
    return 0.5 * (haar_shrink_axis(x, axis, threshold, 0) + haar_shrink_axis(x, axis, threshold, 1))


def tv_prox(x, threshold, weights=None, axes=AXIS_ORDER):
    """Approximate prox of threshold * TV_w on an (H, W, C, P) array"""
    if threshold < 0:
        raise ValueError(f'TV threshold must be nonnegative, got {threshold}')
    weights = weights or TvWeights()
    result = np.array(x, dtype=np.float64, copy=True)
    if threshold == 0:
        return result
    per_axis = weights.as_tuple()
    for axis in AXIS_ORDER:
        if axis not in axes or axis >= result.ndim or result.shape[axis] < 2:
            continue
        axis_threshold = threshold * per_axis[axis]
        if axis_threshold == 0:
            continue
        result = haar_shrink_cycle_spin(result, axis, axis_threshold)
    return result
