from .grid import (
    Representation,
    Grid1D,
    ComplexField,
    GaussianPointerSpec,
    MomentStats
)
from .profile import (
    ProfileShape,
    CouplingProfile
)
from .params import (
    ModelKind,
    ARParams,
    MPParams
)
from .records import (
    Regime,
    AmplitudeKind,
    ARPrecision,
    MeasurementRecord,
    TimeMap,
    TExtStats,
    UncertaintyRow,
    UncertaintySummary,
    ConvergenceReport
)
from .experiment import (
    ExperimentConfig,
    RunRow,
    VerifyRow,
    Table1Row
)

__all__ = [
    "Representation",
    "Grid1D",
    "ComplexField",
    "GaussianPointerSpec",
    "MomentStats",
    "ProfileShape",
    "CouplingProfile",
    "ModelKind",
    "ARParams",
    "MPParams",
    "Regime",
    "AmplitudeKind",
    "ARPrecision",
    "MeasurementRecord",
    "TimeMap",
    "TExtStats",
    "UncertaintyRow",
    "UncertaintySummary",
    "ConvergenceReport",
    "ExperimentConfig",
    "RunRow",
    "VerifyRow",
    "Table1Row"
]
