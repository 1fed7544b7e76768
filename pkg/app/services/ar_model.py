import logging
import math
from typing import Optional

import numpy as np

from app.core.config import NumericalTolerances, tolerances
from app.core.exceptions import ConfigInvalidError
from app.schemas.grid import ComplexField, Grid1D
from app.schemas.params import ARParams, ModelKind
from app.schemas.records import ARPrecision, MeasurementRecord, Regime
from app.services.coupling import ArrayLike, CouplingService
from app.services.wavefunction import WavefunctionService

logger = logging.getLogger(__name__)


def _origin_offset(params: ARParams, phase_origin: Optional[float]) -> float:
    """Clock reading at x_i when the phase integrals start at ``phase_origin`` (<= x_i)."""
    if phase_origin is None:
        return 0.0
    if phase_origin > params.profile.x_i:
        raise ConfigInvalidError("phase origin must not lie after the start of the coupling window")
    return params.profile.x_i - phase_origin


def band_energy(params: ARParams) -> float:
    """Energy at which the (possibly chirped) pointer gives its best resolution."""
    return params.pointer.chirp / CouplingService.window_integral(params.profile, 2)


class ARModelService:
    """Symmetrized von Neumann coupling of the pointer to H_c + H_box.

    Pointer fields drop the global factor exp(i (E0 - E_box) x), which no
    pointer statistic can see.
    """

    @staticmethod
    def ar_exact_amplitude(
        params: ARParams, x: ArrayLike, q: float, phase_origin: Optional[float] = None
    ) -> ArrayLike:
        x_arr = np.asarray(x, dtype=float)
        CouplingService.check_path(params.profile, x_arr, q)
        g = CouplingService.eval(params.profile, x_arr)
        t_ext = CouplingService.integral_reciprocal(params.profile, q, x_arr) + _origin_offset(params, phase_origin)
        amp = (1.0 + g * q) ** -0.5 * np.exp(-1j * params.e_box * x_arr) * np.exp(1j * params.e_total * t_ext)
        return amp if np.ndim(amp) else complex(amp)

    @staticmethod
    def ar_second_order_amplitude(
        params: ARParams, x: ArrayLike, q: float, phase_origin: Optional[float] = None
    ) -> ArrayLike:
        x_arr = np.asarray(x, dtype=float)
        CouplingService.check_path(params.profile, x_arr, q)
        profile = params.profile
        g = CouplingService.eval(profile, x_arr)
        clock = (
            x_arr
            - profile.x_i
            - q * CouplingService.integral_power(profile, 1, x_arr)
            + q**2 * CouplingService.integral_power(profile, 2, x_arr)
            + _origin_offset(params, phase_origin)
        )
        amp = (1.0 + g * q) ** -0.5 * np.exp(-1j * params.e_box * x_arr) * np.exp(1j * params.e_total * clock)
        return amp if np.ndim(amp) else complex(amp)

    @staticmethod
    def ar_post_measurement_field(
        params: ARParams,
        qgrid: Grid1D,
        exact: bool = False,
        phase_origin: Optional[float] = None,
        tol: NumericalTolerances = tolerances,
    ) -> ComplexField:
        """Pointer field once x > x_f, with second-order (default) or exact phases.

        The exact phase is undefined where 1 + g q <= 0. Pointer values there
        are dropped when their total weight is below ``tol.norm``; otherwise the
        run fails with SingularCouplingError.
        """
        initial = WavefunctionService.make_gaussian(params.pointer, qgrid, tol)
        q = qgrid.points
        amps = initial.amps
        profile = params.profile
        E0 = params.e_total

        if exact:
            support = np.abs(amps) > 0.0
            singular = support & (1.0 + profile.plateau * q <= 0.0)
            if np.any(singular):
                weight = float(np.sum(initial.density[singular]) * qgrid.spacing)
                if weight > tol.norm:
                    CouplingService.check_path(profile, np.full(q.shape, profile.x_f), np.where(support, q, 0.0))
                logger.debug("dropping %d pointer values with 1 + g q <= 0 (weight %.3g)", singular.sum(), weight)
                support &= ~singular
                amps = np.where(support, amps, 0.0)
            phase = np.zeros_like(q)
            reciprocal = CouplingService.integral_reciprocal(profile, q[support], profile.x_f)
            phase[support] = E0 * (reciprocal - profile.length)
        else:
            I1 = CouplingService.window_integral(profile, 1)
            I2 = CouplingService.window_integral(profile, 2)
            phase = E0 * (-I1 * q + I2 * q**2)

        phase = phase + E0 * _origin_offset(params, phase_origin)
        return initial.with_amps(amps * np.exp(1j * phase))

    @staticmethod
    def ar_pointer_distribution(
        params: ARParams,
        qgrid: Grid1D,
        use_exact: bool = False,
        phase_origin: Optional[float] = None,
        tol: NumericalTolerances = tolerances,
    ) -> MeasurementRecord:
        if params.expansion_parameter >= tol.expansion_warn:
            logger.warning(
                "g*sigma = %.3g is outside the small-coupling range the second-order phase assumes",
                params.expansion_parameter,
            )

        initial = WavefunctionService.make_gaussian(params.pointer, qgrid, tol)
        final = ARModelService.ar_post_measurement_field(
            params, qgrid, exact=use_exact, phase_origin=phase_origin, tol=tol
        )
        before = WavefunctionService.moments(WavefunctionService.to_momentum(initial, tol), tol)
        after = WavefunctionService.moments(WavefunctionService.to_momentum(final, tol), tol)

        coupling = CouplingService.window_integral(params.profile, 1)
        shift = after.mean - before.mean
        record = MeasurementRecord(
            model=ModelKind.AR,
            shift=shift,
            dp=after.width,
            de0=after.width / coupling,
            t_int=params.profile.length,
            coupling=coupling,
            mean_before=before.mean,
            mean_after=after.mean,
            inferred_energy=shift / coupling,
            regime=ARModelService.ar_classify_regime(params),
        )
        logger.debug("AR read-out E0=%g: %s", params.e_total, record)
        return record

    @staticmethod
    def ar_predicted_precision(params: ARParams) -> ARPrecision:
        """Closed-form spread and precision; reduces to the textbook formula for an unchirped pointer."""
        I1 = CouplingService.window_integral(params.profile, 1)
        I2 = CouplingService.window_integral(params.profile, 2)
        sigma = params.pointer.sigma
        chirp = params.e_total * I2 - params.pointer.chirp
        dp = math.sqrt(1.0 + 4.0 * chirp**2 * sigma**4) / sigma
        de0 = dp / I1
        return ARPrecision(
            dp=dp,
            de0=de0,
            crossover=1.0 / (2.0 * I2 * sigma**2),
            product=params.profile.length * de0,
            band_center=band_energy(params),
        )

    @staticmethod
    def ar_classify_regime(params: ARParams) -> Regime:
        """Near-saturating strictly inside the band, dispersive on or beyond its edge."""
        precision = ARModelService.ar_predicted_precision(params)
        if abs(params.e_total - precision.band_center) < precision.crossover:
            return Regime.NEAR_SATURATING
        return Regime.DISPERSIVE

    @staticmethod
    def ar_apply_hamiltonian(
        params: ARParams,
        field_x: ComplexField,
        q: float,
        tol: NumericalTolerances = tolerances,
    ) -> ComplexField:
        """H psi for H = H_c + H_box + (g H_c / 2 + H_c g / 2 + g H_box) q with H_box -> E_box."""
        WavefunctionService.check_resolution(field_x, tol)
        psi = field_x.amps
        g = CouplingService.eval(params.profile, field_x.grid.points)
        hc_psi = -1j * WavefunctionService.derivative(field_x)
        hc_g_psi = -1j * WavefunctionService.derivative(field_x.with_amps(g * psi))
        h_psi = hc_psi + params.e_box * psi + q * (0.5 * g * hc_psi + 0.5 * hc_g_psi + g * params.e_box * psi)
        return field_x.with_amps(h_psi)

