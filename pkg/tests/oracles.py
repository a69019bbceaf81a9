"""Brute-force references for the FFT operators and the ADMM solver."""
import numpy as np

from polarlens.models.optics import ConvMode


def direct_forward(x, kernels, maps, conv_mode=ConvMode.CIRCULAR):
    """Nested-loop y_c = sum_p S_p * (x_{c,p} conv k_c) with the kernel origin at (Hk//2, Wk//2)"""
    height, width, channels, pols = x.shape
    k_rows, k_cols = kernels.shape[:2]
    oy, ox = k_rows // 2, k_cols // 2
    y = np.zeros((height, width, channels))
    for c in range(channels):
        for p in range(pols):
            blurred = np.zeros((height, width))
            for i in range(height):
                for j in range(width):
                    total = 0.0
                    for a in range(k_rows):
                        for b in range(k_cols):
                            si, sj = i - (a - oy), j - (b - ox)
                            if conv_mode is ConvMode.CIRCULAR:
                                total += kernels[a, b, c] * x[si % height, sj % width, c, p]
                            elif 0 <= si < height and 0 <= sj < width:
                                total += kernels[a, b, c] * x[si, sj, c, p]
                    blurred[i, j] = total
            y[:, :, c] += maps[:, :, p] * blurred
    return y


def dense_matrix(op):
    """Explicit matrix of ``op.forward`` built column by column from unit vectors"""
    n_in = int(np.prod(op.scene_shape))
    n_out = int(np.prod(op.sensor_shape))
    matrix = np.zeros((n_out, n_in))
    for k in range(n_in):
        unit = np.zeros(n_in)
        unit[k] = 1.0
        matrix[:, k] = op.forward(unit.reshape(op.scene_shape)).ravel()
    return matrix


def dense_ridge(op, y, delta=1e-9):
    """argmin ||Mx - y||^2 + delta ||x||^2 by a dense solve"""
    matrix = dense_matrix(op)
    gram = matrix.T @ matrix + delta * np.eye(matrix.shape[1])
    return np.linalg.solve(gram, matrix.T @ y.ravel()).reshape(op.scene_shape)
