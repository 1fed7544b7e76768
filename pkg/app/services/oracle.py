import logging
import math
from typing import Optional, Sequence, Union

import numpy as np

from app.core.config import NumericalTolerances, tolerances
from app.core.exceptions import ConfigInvalidError, InsufficientPaddingError, RepresentationError
from app.schemas.grid import ComplexField, Grid1D, Representation
from app.schemas.params import ARParams, ModelKind, MPParams
from app.schemas.records import AmplitudeKind, ConvergenceReport
from app.services.ar_model import ARModelService
from app.services.coupling import CouplingService
from app.services.mp_model import LEFT, SYMMETRIC, MPModelService
from app.utils.validators import is_doubling_sequence

logger = logging.getLogger(__name__)

ModelParams = Union[ARParams, MPParams]

# Rows of the direct Fourier sum evaluated per block.
_QUADRATURE_BLOCK = 256
DEFAULT_PADDING_FRACTION = 0.2


def _d4(f: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central first derivative at indices 2..n-3."""
    return (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)


class VerificationOracle:
    """Slow, independent checks of the model engine.

    Nothing here goes through the fast transform or the model-path
    derivative: the Hamiltonian uses a fixed five-point stencil and the
    momentum transform is a direct sum.
    """

    @staticmethod
    def padded_grid(params: ModelParams, n: int, padding: Optional[float] = None) -> Grid1D:
        """x grid spanning the coupling window plus ``padding`` of g = 0 on each side."""
        profile = params.profile
        if padding is None:
            padding = DEFAULT_PADDING_FRACTION * profile.length
        return Grid1D(lo=profile.x_i - padding, hi=profile.x_f + padding, n=n)

    @staticmethod
    def apply_hamiltonian(
        model: ModelKind,
        params: ModelParams,
        x_grid: Grid1D,
        psi: np.ndarray,
        q: float,
        ordering: str = SYMMETRIC,
    ) -> np.ndarray:
        """H psi on the interior points x_2 .. x_{n-3}."""
        h = x_grid.spacing
        g = CouplingService.eval(params.profile, x_grid.points)
        inner = slice(2, -2)
        e_box = params.e_box

        if model is ModelKind.AR:
            hc_psi = -1j * _d4(psi, h)
            hc_g_psi = -1j * _d4(g * psi, h)
            gi = g[inner]
            return hc_psi + e_box * psi[inner] + q * (0.5 * gi * hc_psi + 0.5 * hc_g_psi + gi * e_box * psi[inner])

        w = 1.0 / (1.0 + q * g)
        wi = w[inner]
        w_hc_psi = wi * (-1j * _d4(psi, h))
        if ordering == SYMMETRIC:
            kinetic = 0.5 * (w_hc_psi - 1j * _d4(w * psi, h))
        elif ordering == LEFT:
            kinetic = w_hc_psi
        else:
            raise ConfigInvalidError(f"unknown operator ordering {ordering!r}")
        return wi * e_box * psi[inner] + kinetic

    @staticmethod
    def sample_solution(
        model: ModelKind,
        params: ModelParams,
        x_grid: Grid1D,
        q: float,
        amplitude: AmplitudeKind = AmplitudeKind.EXACT,
    ) -> np.ndarray:
        x = x_grid.points
        if model is ModelKind.MP:
            if amplitude is not AmplitudeKind.EXACT:
                raise ConfigInvalidError("the MP model has no second-order amplitude")
            return np.asarray(MPModelService.mp_exact_amplitude(params, x, q))
        if amplitude is AmplitudeKind.EXACT:
            return np.asarray(ARModelService.ar_exact_amplitude(params, x, q))
        return np.asarray(ARModelService.ar_second_order_amplitude(params, x, q))

    @staticmethod
    def residual_norm(
        model: ModelKind,
        params: ModelParams,
        x_grid: Grid1D,
        q: float,
        amplitude: AmplitudeKind = AmplitudeKind.EXACT,
        ordering: str = SYMMETRIC,
    ) -> float:
        """||H psi - E0 psi|| / ||psi|| over the interior of ``x_grid``."""
        points = x_grid.points
        profile = params.profile
        if profile.x_i < points[2] or profile.x_f > points[-3]:
            raise InsufficientPaddingError(
                f"x grid [{x_grid.lo}, {x_grid.hi}) leaves no g = 0 margin around [{profile.x_i}, {profile.x_f}]"
            )

        psi = VerificationOracle.sample_solution(model, params, x_grid, q, amplitude)
        h_psi = VerificationOracle.apply_hamiltonian(model, params, x_grid, psi, q, ordering=ordering)
        defect = h_psi - params.e_total * psi[2:-2]
        return float(np.linalg.norm(defect) / np.linalg.norm(psi[2:-2]))

    @staticmethod
    def quadrature_transform(field: ComplexField) -> ComplexField:
        """Direct sum (2 pi)^(-1/2) * h * sum_j exp(+i p_k q_j) psi_j on the FFT lattice."""
        if field.representation is not Representation.POSITION:
            raise RepresentationError("quadrature_transform expects a position-representation field")

        grid = field.grid
        pgrid = grid.momentum_grid()
        q = grid.points
        p = pgrid.points
        amps = np.empty(pgrid.n, dtype=np.complex128)
        for start in range(0, pgrid.n, _QUADRATURE_BLOCK):
            block = p[start : start + _QUADRATURE_BLOCK]
            amps[start : start + block.shape[0]] = np.exp(1j * np.outer(block, q)) @ field.amps
        amps *= grid.spacing / math.sqrt(2.0 * math.pi)
        return ComplexField(grid=pgrid, amps=amps, representation=Representation.MOMENTUM, conjugate=grid)

    @staticmethod
    def convergence_study(
        model: ModelKind,
        params: ModelParams,
        resolutions: Sequence[int],
        q: float,
        amplitude: AmplitudeKind = AmplitudeKind.EXACT,
        padding: Optional[float] = None,
        tol: NumericalTolerances = tolerances,
    ) -> ConvergenceReport:
        resolutions = list(resolutions)
        if len(resolutions) < 3:
            raise ConfigInvalidError(f"a convergence study needs at least 3 resolutions, got {len(resolutions)}")
        if not is_doubling_sequence(resolutions):
            raise ConfigInvalidError(f"resolutions {resolutions} must double at each step")

        residuals = []
        spacings = []
        for n in resolutions:
            grid = VerificationOracle.padded_grid(params, n, padding)
            residuals.append(VerificationOracle.residual_norm(model, params, grid, q, amplitude))
            spacings.append(grid.spacing)
            logger.debug("%s n=%d residual=%.3e", model.value, n, residuals[-1])

        above = [i for i, r in enumerate(residuals) if r > tol.roundoff_floor]
        if len(above) < 2:
            order, floor_limited = 0.0, True
        else:
            slope, _ = np.polyfit(np.log([spacings[i] for i in above]), np.log([residuals[i] for i in above]), 1)
            order, floor_limited = float(slope), len(above) < len(resolutions)

        report = ConvergenceReport(
            resolutions=resolutions, residuals=residuals, fitted_order=order, floor_limited=floor_limited
        )
        logger.info("%s %s convergence: order %.2f", model.value, amplitude.value, order)
        return report
