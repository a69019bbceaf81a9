from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

SCENE_KINDS = ('two-source', 'birefringent-screen', 'piecewise-constant')


class SceneSpec(BaseModel):
    """Synthetic polarized scene description"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    kind: Literal['two-source', 'birefringent-screen', 'piecewise-constant'] = 'piecewise-constant'
    height: int = Field(128, ge=2)
    width: int = Field(128, ge=2)
    channels: int = Field(3, ge=1)
    seed: int = 0
    # two-source: illumination angles left / right
    source_angles: tuple[float, float] = (0.0, 90.0)
    # birefringent-screen: polarized backlight angle
    screen_angle: float = 135.0
    dolp: float = 1.0
    regions: int = Field(6, ge=1)
    background: float = Field(0.05, ge=0)

    @field_validator('dolp')
    @classmethod
    def _dolp_range(cls, value):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f'DoLP must lie in [0, 1], got {value}')
        return value

    @property
    def extent(self):
        return self.height, self.width

    def scene_id(self):
        return f'{self.kind}-s{self.seed}'
