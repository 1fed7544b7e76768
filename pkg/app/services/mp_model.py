import logging
from typing import Optional

import numpy as np

from app.core.config import NumericalTolerances, tolerances
from app.core.exceptions import ConfigInvalidError, SupportError
from app.schemas.grid import ComplexField, Grid1D
from app.schemas.params import ModelKind, MPParams
from app.schemas.records import MeasurementRecord
from app.services.coupling import ArrayLike, CouplingService
from app.services.wavefunction import WavefunctionService

logger = logging.getLogger(__name__)

SYMMETRIC = "symmetric"
LEFT = "left"


def _require_support(q: ArrayLike) -> None:
    if np.any(np.asarray(q) <= 0.0):
        raise SupportError("the rescaled model is only defined for pointer values q > 0")


def _origin_offset(params: MPParams, phase_origin: Optional[float]) -> float:
    if phase_origin is None:
        return 0.0
    if phase_origin > params.profile.x_i:
        raise ConfigInvalidError("phase origin must not lie after the start of the coupling window")
    return params.profile.x_i - phase_origin


class MPModelService:
    """H = H_box / (1 + q g) + (w H_c + H_c w) / 2 with w = 1 / (1 + q g).

    The read-out is exact: after the window the pointer only picks up the
    phase exp(i E0 q integral g), a rigid momentum translation.
    """

    @staticmethod
    def mp_exact_amplitude(
        params: MPParams, x: ArrayLike, q: float, phase_origin: Optional[float] = None
    ) -> ArrayLike:
        _require_support(q)
        profile = params.profile
        x_arr = np.asarray(x, dtype=float)
        g = CouplingService.eval(profile, x_arr)
        t_ext = x_arr - profile.x_i + q * CouplingService.integral_power(profile, 1, x_arr)
        t_ext = t_ext + _origin_offset(params, phase_origin)
        amp = np.sqrt(1.0 + g * q) * np.exp(-1j * params.e_box * x_arr) * np.exp(1j * params.e_total * t_ext)
        return amp if np.ndim(amp) else complex(amp)

    @staticmethod
    def mp_post_measurement_field(
        params: MPParams,
        qgrid: Grid1D,
        phase_origin: Optional[float] = None,
        tol: NumericalTolerances = tolerances,
    ) -> ComplexField:
        initial = WavefunctionService.make_gaussian(params.pointer, qgrid, tol)
        coupling = CouplingService.window_integral(params.profile, 1)
        phase = params.e_total * (coupling * qgrid.points + _origin_offset(params, phase_origin))
        return initial.with_amps(initial.amps * np.exp(1j * phase))

    @staticmethod
    def mp_measure(
        params: MPParams,
        qgrid: Grid1D,
        phase_origin: Optional[float] = None,
        tol: NumericalTolerances = tolerances,
    ) -> MeasurementRecord:
        initial = WavefunctionService.make_gaussian(params.pointer, qgrid, tol)
        final = MPModelService.mp_post_measurement_field(params, qgrid, phase_origin=phase_origin, tol=tol)
        before = WavefunctionService.moments(WavefunctionService.to_momentum(initial, tol), tol)
        after = WavefunctionService.moments(WavefunctionService.to_momentum(final, tol), tol)

        coupling = CouplingService.window_integral(params.profile, 1)
        shift = after.mean - before.mean
        expected = -params.e_total * coupling
        if abs(shift - expected) > 1e-8 * max(1.0, abs(expected)):
            logger.warning("MP shift %.12g departs from -E0*Lg = %.12g; pointer grid too coarse?", shift, expected)

        record = MeasurementRecord(
            model=ModelKind.MP,
            shift=shift,
            dp=after.width,
            de0=after.width / coupling,
            t_int=params.profile.length,
            coupling=coupling,
            mean_before=before.mean,
            mean_after=after.mean,
            inferred_energy=-shift / coupling,
        )
        logger.debug("MP read-out E0=%g: %s", params.e_total, record)
        return record

    @staticmethod
    def mp_apply_hamiltonian(
        params: MPParams,
        field_x: ComplexField,
        q: float,
        ordering: str = SYMMETRIC,
        tol: NumericalTolerances = tolerances,
    ) -> ComplexField:
        _require_support(q)
        WavefunctionService.check_resolution(field_x, tol)
        psi = field_x.amps
        w = 1.0 / (1.0 + q * CouplingService.eval(params.profile, field_x.grid.points))
        w_hc_psi = w * (-1j * WavefunctionService.derivative(field_x))
        if ordering == SYMMETRIC:
            hc_w_psi = -1j * WavefunctionService.derivative(field_x.with_amps(w * psi))
            kinetic = 0.5 * (w_hc_psi + hc_w_psi)
        elif ordering == LEFT:
            kinetic = w_hc_psi
        else:
            raise ConfigInvalidError(f"unknown operator ordering {ordering!r}")
        return field_x.with_amps(w * params.e_box * psi + kinetic)
