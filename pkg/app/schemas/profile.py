import enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.utils.validators import is_finite

DEFAULT_RAMP_FRACTION = 0.01


class ProfileShape(str, enum.Enum):
    RECTANGULAR = "rectangular"
    SMOOTH_RAMP = "smooth"


class CouplingProfile(BaseModel):
    """Coupling window g(x): zero outside (x_i, x_f), plateau g inside.

    ``ramp`` is the width of each smooth ramp; left unset it defaults to L/100
    for the smooth shape and is forced to zero for the rectangular one.
    ``smoothness`` N picks the generalized smoothstep S_N (continuous up to the
    N-th derivative); N = 1 is the cubic smoothstep.
    """

    model_config = ConfigDict(frozen=True)

    x_i: float = 0.0
    x_f: float
    plateau: float = Field(..., gt=0)
    ramp: Optional[float] = Field(default=None, ge=0)
    shape: ProfileShape = ProfileShape.SMOOTH_RAMP
    smoothness: int = Field(default=4, ge=1, le=8)

    @model_validator(mode="before")
    @classmethod
    def _default_ramp(cls, data):
        if not isinstance(data, dict):
            return data
        shape = ProfileShape(data.get("shape", ProfileShape.SMOOTH_RAMP))
        if shape is ProfileShape.RECTANGULAR:
            data = {**data, "ramp": 0.0}
        elif data.get("ramp") is None and "x_f" in data:
            length = float(data["x_f"]) - float(data.get("x_i", 0.0))
            data = {**data, "ramp": DEFAULT_RAMP_FRACTION * length}
        return data

    @model_validator(mode="after")
    def _check_window(self) -> "CouplingProfile":
        if not is_finite(self.x_i, self.x_f, self.plateau):
            raise ValueError("profile parameters must be finite")
        if self.x_f <= self.x_i:
            raise ValueError("profile requires x_f > x_i")
        if self.ramp_width >= self.length / 4.0:
            raise ValueError(f"ramp {self.ramp_width} must be below L/4 = {self.length / 4.0}")
        return self

    @property
    def length(self) -> float:
        return self.x_f - self.x_i

    @property
    def ramp_width(self) -> float:
        return self.ramp or 0.0

    @property
    def is_rectangular(self) -> bool:
        return self.shape is ProfileShape.RECTANGULAR or self.ramp_width == 0.0
