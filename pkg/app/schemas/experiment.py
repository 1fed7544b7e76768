import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.config import NumericalTolerances
from app.core.exceptions import ConfigInvalidError
from app.schemas.params import ModelKind
from app.schemas.profile import ProfileShape
from app.schemas.records import Regime
from app.utils.validators import is_doubling_sequence, is_power_of_two


class GridSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    q_points: int = Field(8192, ge=8, description="Pointer grid size (power of two)")
    q_half_width: float = Field(16.0, ge=8.0, description="Pointer grid half width, in pointer sigmas")
    x_points: int = Field(2048, ge=8, description="Clock grid size for the residual column")
    x_padding: Optional[float] = Field(None, gt=0, description="g = 0 margin around the window; default L/5")
    exact_phases: bool = Field(False, description="Use the exact AR phase instead of the second-order one")
    check_residual: bool = Field(False, description="Add the oracle residual to every smooth-profile row")

    @model_validator(mode="after")
    def _check_sizes(self) -> "GridSection":
        for name in ("q_points", "x_points"):
            if not is_power_of_two(getattr(self, name)):
                raise ValueError(f"{name} must be a power of two")
        return self


class SweepRanges(BaseModel):
    """Parameter lists; runs are the cartesian product in field order."""

    model_config = ConfigDict(extra="forbid")

    e_total: List[float] = Field(..., min_length=1)
    e_box: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    x_i: float = 0.0
    length: List[float] = Field(default_factory=lambda: [1.0], min_length=1)
    plateau: List[float] = Field(..., min_length=1)
    sigma: List[float] = Field(default_factory=lambda: [1.0], min_length=1)
    center: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    ramp: Optional[List[float]] = Field(None, min_length=1)
    shape: List[ProfileShape] = Field(default_factory=lambda: [ProfileShape.SMOOTH_RAMP], min_length=1)
    smoothness: int = Field(4, ge=1, le=8)
    phase_tilt: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    chirp: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    band_center: Optional[List[float]] = Field(None, min_length=1, description="AR only; sets chirp = E* * int g^2")
    truncate_below: Optional[float] = Field(None, description="AR only; MP pointers are always cut at q = 0")

    @model_validator(mode="after")
    def _check_chirp(self) -> "SweepRanges":
        if self.band_center is not None and any(c != 0.0 for c in self.chirp):
            raise ValueError("give either chirp or band_center, not both")
        return self


class VerifySection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    models: List[ModelKind] = Field(default_factory=lambda: [ModelKind.AR, ModelKind.MP], min_length=1)
    pointer_values: List[float] = Field(default_factory=lambda: [0.6], min_length=1)
    resolutions: List[int] = Field(default_factory=lambda: [256, 512, 1024, 2048])
    padding: Optional[float] = Field(None, gt=0)
    second_order_probe: bool = Field(True, description="Also report the AR second-order amplitude (not gated)")

    @model_validator(mode="after")
    def _check_resolutions(self) -> "VerifySection":
        if len(self.resolutions) < 3:
            raise ValueError("verify needs at least 3 resolutions")
        if not is_doubling_sequence(self.resolutions) or not all(is_power_of_two(n) for n in self.resolutions):
            raise ValueError(f"resolutions {self.resolutions} must be powers of two, each doubling the last")
        return self


class Table1Section(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cases: List[int] = Field(default_factory=lambda: [1, 2, 7], min_length=1)
    shape: ProfileShape = ProfileShape.RECTANGULAR
    sigma: float = Field(1.0, gt=0)

    # Case 2: AR energy sweep
    ar_e_total: List[float] = Field(default_factory=lambda: [0.0, 10.0, 50.0, 100.0, 500.0], min_length=1)
    ar_length: float = Field(1.0, gt=0)
    ar_plateau: float = Field(0.1, gt=0)

    # Case 7: MP with L -> 0 at fixed L g dq
    mp_lengths: List[float] = Field(default_factory=lambda: [1.0, 0.1, 0.01, 0.001], min_length=1)
    mp_coupling_product: float = Field(10.0, gt=0, description="L * g * dq held fixed")
    mp_center: float = 10.0
    mp_e_total: float = 1.0


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: Optional[Path] = None


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: Optional[ModelKind] = None
    grid: GridSection = Field(default_factory=GridSection)
    sweep: Optional[SweepRanges] = None
    verify: VerifySection = Field(default_factory=VerifySection)
    table1: Table1Section = Field(default_factory=Table1Section)
    tolerances: NumericalTolerances = Field(default_factory=NumericalTolerances)
    output: OutputSection = Field(default_factory=OutputSection)

    @classmethod
    def from_toml(cls, path: Path) -> "ExperimentConfig":
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except OSError as e:
            raise ConfigInvalidError(f"cannot read config {path}: {e}")
        except tomllib.TOMLDecodeError as e:
            raise ConfigInvalidError(f"{path} is not valid TOML: {e}")
        try:
            return cls.model_validate(raw)
        except ValidationError as e:
            raise ConfigInvalidError(f"{path}: {e}")

    def require_sweep(self) -> SweepRanges:
        if self.sweep is None:
            raise ConfigInvalidError("this command needs a [sweep] section")
        return self.sweep

    def require_model(self) -> ModelKind:
        if self.model is None:
            raise ConfigInvalidError("this command needs a top-level model = \"ar\" | \"mp\"")
        return self.model


class RunRow(BaseModel):
    """One output row; field order is the CSV column order."""

    index: int
    model: ModelKind
    e_total: float
    e_box: float
    length: float
    plateau: float
    ramp: float
    shape: ProfileShape
    sigma: float
    center: float
    phase_tilt: float
    chirp: float
    shift: float
    dp: float
    de0: float
    predicted_shift: float
    predicted_dp: float
    predicted_de0: float
    product: float = Field(..., description="t_int * de0")
    regime: Optional[Regime] = None
    t_int: float
    inferred_energy: float
    mean_text: Optional[float] = None
    spread_text: Optional[float] = None
    product_spread: Optional[float] = None
    product_mean: Optional[float] = None
    residual: Optional[float] = None


class VerifyRow(BaseModel):
    model: ModelKind
    amplitude: str
    gated: bool
    passed: bool
    e_total: float
    e_box: float
    length: float
    plateau: float
    ramp: float
    shape: ProfileShape
    q: float
    resolutions: str
    residuals: str
    finest_residual: float
    fitted_order: float
    floor_limited: bool


class Table1Row(BaseModel):
    case: int
    status: str
    note: str
    run: Optional[RunRow] = None
