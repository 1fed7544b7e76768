import enum

from pydantic import BaseModel, ConfigDict, ValidationInfo, model_validator

from app.core.config import tolerances
from app.schemas.grid import GaussianPointerSpec
from app.schemas.profile import CouplingProfile
from app.utils.validators import is_finite


class ModelKind(str, enum.Enum):
    AR = "ar"
    MP = "mp"


class ARParams(BaseModel):
    """Clock + box + pointer with the symmetrized von Neumann coupling (pointer centred at 0 by default)."""

    model_config = ConfigDict(frozen=True)

    e_total: float
    e_box: float = 0.0
    profile: CouplingProfile
    pointer: GaussianPointerSpec

    @model_validator(mode="after")
    def _check_energies(self) -> "ARParams":
        if not is_finite(self.e_total, self.e_box):
            raise ValueError("energies must be finite")
        return self

    @property
    def expansion_parameter(self) -> float:
        """g * sigma; the phase expansion needs it well below one."""
        return self.profile.plateau * self.pointer.sigma


class MPParams(BaseModel):
    """Clock + box + pointer with the 1/(1 + q g(x)) rescaled Hamiltonian.

    The pointer must live on q > 0: a hard cut at zero and a centre at least
    ``truncation_sigmas`` widths away keep 1 + q g(x) >= 1 everywhere on the
    support. Validate with ``context={"tolerances": ...}`` to check against an
    experiment's own thresholds instead of the defaults.
    """

    model_config = ConfigDict(frozen=True)

    e_total: float
    e_box: float = 0.0
    profile: CouplingProfile
    pointer: GaussianPointerSpec

    @model_validator(mode="after")
    def _check_support(self, info: ValidationInfo) -> "MPParams":
        tol = (info.context or {}).get("tolerances", tolerances)
        if not is_finite(self.e_total, self.e_box):
            raise ValueError("energies must be finite")
        if self.pointer.truncate_below != 0.0:
            raise ValueError("MP pointer must be truncated at q = 0")
        margin = tol.truncation_sigmas * self.pointer.sigma
        if self.pointer.center < margin:
            raise ValueError(
                f"MP pointer centre {self.pointer.center} must be at least "
                f"{tol.truncation_sigmas:g} sigma ({margin}) above zero"
            )
        return self
