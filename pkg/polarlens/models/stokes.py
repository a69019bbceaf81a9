from dataclasses import dataclass, field

import numpy as np

IDENTICAL = 'identical'

ORIENTATIONS = (0.0, 45.0, 90.0, 135.0)


@dataclass(frozen=True)
class StokesMaps:
    """Linear Stokes parameters per pixel and color, each shaped (H, W, C).

    ``aolp`` is in degrees on [-90, 90) and only meaningful where ``aolp_valid``.
    """
    s0: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    dolp: np.ndarray
    aolp: np.ndarray
    aolp_valid: np.ndarray

    def items(self):
        return {
            's0': self.s0, 's1': self.s1, 's2': self.s2,
            'dolp': self.dolp, 'aolp': self.aolp,
            'aolp_valid': self.aolp_valid.astype(np.float64),
        }.items()


@dataclass
class MetricReport:
    psnr_db: list
    ssim: list
    data_range: float
    reference: str = 'ground-truth'
    normalization: str = 'joint max(ref)'
    channel_labels: list = field(default_factory=lambda: [f'I{int(a)}' for a in ORIENTATIONS])

    @property
    def mean_psnr(self):
        finite = [value for value in self.psnr_db if value != IDENTICAL]
        if not finite:
            return IDENTICAL
        return float(np.mean(finite))

    @property
    def mean_ssim(self):
        return float(np.mean(self.ssim))

    def rows(self, **keys):
        """CSV rows, one per channel plus a 'mean' row"""
        labels = self.channel_labels[:len(self.ssim)]
        if len(labels) < len(self.ssim):
            labels = [f'p{i}' for i in range(len(self.ssim))]
        for label, psnr_value, ssim_value in zip(labels, self.psnr_db, self.ssim):
            yield dict(keys, channel=label, psnr_db=psnr_value, ssim=ssim_value,
                       reference=self.reference)
        yield dict(keys, channel='mean', psnr_db=self.mean_psnr, ssim=self.mean_ssim,
                   reference=self.reference)
