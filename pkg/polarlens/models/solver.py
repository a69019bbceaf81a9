from dataclasses import dataclass, field
import hashlib
import json
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from polarlens.models.optics import ConvMode


class SolverConfig(BaseModel):
    """ADMM parameters; ``lambda`` is accepted as an alias of ``lam``."""
    model_config = ConfigDict(frozen=True, extra='forbid', populate_by_name=True)

    rho: float = Field(21.0, gt=0)
    lam: float = Field(5e-4, ge=0, alias='lambda')
    lambda_w: float = Field(5e-4, ge=0)
    admm_iters: int = Field(50, ge=1)
    cg_tol: float = Field(1e-4, gt=0)
    cg_max_iters: int = Field(100, ge=1)
    tv_dims: Literal['4d', '3d'] = '4d'
    noise_sigma: float = Field(1.0, gt=0)
    warm_start_cg: bool = True
    nonneg: bool = True
    conv_mode: ConvMode = ConvMode.PAD_CROP

    @property
    def effective_lambda(self):
        """lambda with the 1 / (2 sigma_e^2) data weight folded in"""
        return self.lam * self.noise_sigma ** 2

    @property
    def threshold(self):
        return self.effective_lambda / self.rho

    @property
    def tv_weights(self):
        return TvWeights.from_anisotropy(self.lambda_w)

    @property
    def active_axes(self):
        return (0, 1, 2, 3) if self.tv_dims == '4d' else (0, 1, 2)

    def config_hash(self):
        payload = json.dumps(self.model_dump(mode='json', by_alias=True), sort_keys=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]

    @classmethod
    def preset(cls, name, **overrides):
        if name not in SOLVER_PRESETS:
            raise KeyError(f'unknown solver preset {name!r}; choose from {sorted(SOLVER_PRESETS)}')
        values = dict(SOLVER_PRESETS[name])
        values.update(overrides)
        return cls(**values)


# Parameter sets for real data, matched/mismatch simulation and the no-mask reference
SOLVER_PRESETS = {
    'real': {'rho': 21.0, 'lambda': 5e-1, 'lambda_w': 5e-1, 'admm_iters': 50,
             'cg_tol': 1e-4, 'cg_max_iters': 100, 'tv_dims': '4d'},
    'matched_sim': {'rho': 21.0, 'lambda': 5e-4, 'lambda_w': 5e-4, 'admm_iters': 50,
                    'cg_tol': 1e-4, 'cg_max_iters': 100, 'tv_dims': '4d'},
    'no_mask': {'rho': 1.0, 'lambda': 5e-1, 'lambda_w': 5e-1, 'admm_iters': 50,
                'cg_tol': 1e-4, 'cg_max_iters': 100, 'tv_dims': '3d'},
}


@dataclass(frozen=True)
class TvWeights:
    """Per-axis TV weights in (H, W, C, P) order; fixed for a whole run"""
    height: float = 1.0
    width: float = 1.0
    color: float = 0.0
    polarization: float = 0.0

    def __post_init__(self):
        if min(self.as_tuple()) < 0:
            raise ValueError(f'TV weights must be nonnegative, got {self.as_tuple()}')

    @classmethod
    def from_anisotropy(cls, lambda_w):
        return cls(1.0, 1.0, lambda_w, lambda_w / 10.0)

    def as_tuple(self):
        return (self.height, self.width, self.color, self.polarization)


@dataclass
class CgResult:
    x: np.ndarray
    iterations: int
    residual: float


@dataclass
class AdmmHistory:
    primal_residual: list = field(default_factory=list)
    data_fidelity: list = field(default_factory=list)
    cg_iterations: list = field(default_factory=list)
    cg_residual: list = field(default_factory=list)
    data_curvature: float = 0.0

    def append(self, primal, fidelity, cg):
        self.primal_residual.append(float(primal))
        self.data_fidelity.append(float(fidelity))
        self.cg_iterations.append(int(cg.iterations))
        self.cg_residual.append(float(cg.residual))

    def summary(self):
        """Final residuals and mean CG effort of a run"""
        return {
            'iterations': len(self),
            'final_primal_residual': self.primal_residual[-1] if self else None,
            'final_data_fidelity': self.data_fidelity[-1] if self else None,
            'mean_cg_iterations': float(np.mean(self.cg_iterations)) if self else 0.0,
            'data_curvature': self.data_curvature,
        }

    def __len__(self):
        return len(self.primal_residual)

    def rows(self):
        for i, (primal, fidelity) in enumerate(zip(self.primal_residual, self.data_fidelity), start=1):
            yield {'iteration': i, 'primal_residual': primal, 'data_fidelity': fidelity}


@dataclass
class AdmmState:
    v: np.ndarray
    z: np.ndarray
    u: np.ndarray
    iteration: int = 0
    history: AdmmHistory = field(default_factory=AdmmHistory)

    @classmethod
    def zeros(cls, shape):
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(shape))
