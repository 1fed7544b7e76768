import enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.params import ModelKind
from app.schemas.profile import CouplingProfile


class Regime(str, enum.Enum):
    NEAR_SATURATING = "near-saturating"
    DISPERSIVE = "dispersive"


class AmplitudeKind(str, enum.Enum):
    EXACT = "exact"
    SECOND_ORDER = "second-order"


class ARPrecision(BaseModel):
    model_config = ConfigDict(frozen=True)

    dp: float
    de0: float
    crossover: float
    product: float
    band_center: float = 0.0


class MeasurementRecord(BaseModel):
    """Outcome of one pointer read-out."""

    model_config = ConfigDict(frozen=True)

    model: ModelKind
    shift: float
    dp: float
    de0: float
    t_int: float
    coupling: float = Field(..., description="Effective L*g, the window integral of g")
    mean_before: float
    mean_after: float
    inferred_energy: float
    regime: Optional[Regime] = None


class TimeMap(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: ModelKind
    profile: CouplingProfile


class TExtStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean_text: float
    spread_text: float
    product_spread: float
    product_mean: float


class UncertaintyRow(BaseModel):
    index: int
    mean_text: float
    spread_text: float
    product_spread: float
    product_mean: float
    violates: bool


class UncertaintySummary(BaseModel):
    rows: List[UncertaintyRow]
    min_product_spread: float
    max_product_spread: float
    min_product_mean: float
    max_product_mean: float
    violations: List[int]


class ConvergenceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    resolutions: List[int]
    residuals: List[float]
    fitted_order: float
    floor_limited: bool = False
