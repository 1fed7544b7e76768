import enum
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from app.utils.validators import is_finite, is_power_of_two


class Representation(str, enum.Enum):
    POSITION = "position"
    MOMENTUM = "momentum"


class Grid1D(BaseModel):
    """Uniform periodic grid ``lo + k*spacing`` for k = 0..n-1 (``hi`` excluded)."""

    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    n: int = Field(..., ge=8)

    @model_validator(mode="after")
    def _check(self) -> "Grid1D":
        if not is_finite(self.lo, self.hi):
            raise ValueError("grid bounds must be finite")
        if self.hi <= self.lo:
            raise ValueError("grid requires hi > lo")
        if not is_power_of_two(self.n):
            raise ValueError(f"grid size {self.n} is not a power of two")
        return self

    @computed_field
    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / self.n

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def points(self) -> np.ndarray:
        return self.lo + self.spacing * np.arange(self.n)

    def momentum_grid(self) -> "Grid1D":
        """Reciprocal lattice p_k = (k - n/2) * 2*pi/length."""
        dp = 2.0 * math.pi / self.length
        half = self.n // 2
        return Grid1D(lo=-half * dp, hi=half * dp, n=self.n)

    @classmethod
    def centered(cls, center: float, half_width: float, n: int) -> "Grid1D":
        return cls(lo=center - half_width, hi=center + half_width, n=n)


class ComplexField(BaseModel):
    """Complex amplitudes sampled on a grid.

    Momentum fields keep the position grid they came from in ``conjugate``
    so the inverse transform can restore the original phase reference.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid1D
    amps: np.ndarray
    representation: Representation = Representation.POSITION
    conjugate: Optional[Grid1D] = None

    @field_validator("amps", mode="before")
    @classmethod
    def _as_complex(cls, value) -> np.ndarray:
        arr = np.array(value, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValueError("amplitudes must be one-dimensional")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_length(self) -> "ComplexField":
        if self.amps.shape[0] != self.grid.n:
            raise ValueError(f"{self.amps.shape[0]} amplitudes for a grid of {self.grid.n} points")
        return self

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    @property
    def norm(self) -> float:
        return float(np.sum(self.density) * self.grid.spacing)

    def with_amps(self, amps: np.ndarray) -> "ComplexField":
        return ComplexField(
            grid=self.grid,
            amps=amps,
            representation=self.representation,
            conjugate=self.conjugate,
        )


class GaussianPointerSpec(BaseModel):
    """Initial pointer state N exp(-(q-center)^2 / 2 sigma^2).

    ``phase_tilt`` is the momentum offset k of the state (factor exp(-i k q));
    ``chirp`` is the quadratic phase beta in exp(-i beta (q-center)^2).
    """

    model_config = ConfigDict(frozen=True)

    center: float = 0.0
    sigma: float = Field(..., gt=0)
    truncate_below: Optional[float] = None
    phase_tilt: float = 0.0
    chirp: float = 0.0

    @model_validator(mode="after")
    def _check_finite(self) -> "GaussianPointerSpec":
        if not is_finite(self.center, self.sigma, self.phase_tilt, self.chirp):
            raise ValueError("pointer parameters must be finite")
        return self


class MomentStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    std: float = Field(..., ge=0)

    @computed_field
    @property
    def width(self) -> float:
        """Width in the convention where a minimal Gaussian has dq * dp = 1."""
        return math.sqrt(2.0) * self.std
