import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar, Union

from pydantic import ValidationError

from app.core.config import NumericalTolerances, tolerances
from app.core.exceptions import ConfigInvalidError
from app.schemas.experiment import ExperimentConfig, GridSection, RunRow, SweepRanges, Table1Row, VerifyRow
from app.schemas.grid import ComplexField, GaussianPointerSpec, Grid1D
from app.schemas.params import ARParams, ModelKind, MPParams
from app.schemas.profile import CouplingProfile
from app.schemas.records import AmplitudeKind, MeasurementRecord, TExtStats, UncertaintySummary
from app.services.ar_model import ARModelService
from app.services.coupling import CouplingService
from app.services.mp_model import MPModelService
from app.services.oracle import VerificationOracle
from app.services.time_analysis import TimeAnalysisService

logger = logging.getLogger(__name__)

ModelParams = Union[ARParams, MPParams]
T = TypeVar("T")
R = TypeVar("R")

TABLE1_CASES = range(1, 9)
TABLE1_NOT_COMPUTABLE = {3, 4, 5, 6, 8}


def _run_ordered(fn: Callable[[T], R], items: Sequence[T], jobs: int) -> List[R]:
    """Map over a bounded worker pool; results come back in input order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _fmt_list(values: Iterable[float]) -> str:
    return ";".join(repr(v) for v in values)


class SweepService:
    """Expands experiment configs into runs and executes them."""

    @staticmethod
    def build_params(
        model: ModelKind, sweep: SweepRanges, tol: NumericalTolerances = tolerances
    ) -> List[ModelParams]:
        """Every parameter tuple of the sweep, validated against ``tol`` before anything is computed."""
        chirps = sweep.band_center if sweep.band_center is not None else sweep.chirp
        ramps: List[Optional[float]] = list(sweep.ramp) if sweep.ramp is not None else [None]
        grid = itertools.product(
            sweep.e_total,
            sweep.e_box,
            sweep.length,
            sweep.plateau,
            sweep.sigma,
            sweep.center,
            ramps,
            sweep.shape,
            sweep.phase_tilt,
            chirps,
        )

        runs: List[ModelParams] = []
        for index, (e_total, e_box, length, plateau, sigma, center, ramp, shape, tilt, chirp) in enumerate(grid):
            try:
                profile = CouplingProfile(
                    x_i=sweep.x_i,
                    x_f=sweep.x_i + length,
                    plateau=plateau,
                    ramp=ramp,
                    shape=shape,
                    smoothness=sweep.smoothness,
                )
                if model is ModelKind.AR:
                    if sweep.band_center is not None:
                        chirp = chirp * CouplingService.window_integral(profile, 2)
                    pointer = GaussianPointerSpec(
                        center=center,
                        sigma=sigma,
                        truncate_below=sweep.truncate_below,
                        phase_tilt=tilt,
                        chirp=chirp,
                    )
                    cut = sweep.truncate_below
                    if cut is not None and center - cut < tol.truncation_sigmas * sigma:
                        raise ConfigInvalidError(
                            f"ar run {index} is invalid: truncate_below = {cut} is closer than "
                            f"{tol.truncation_sigmas:g} sigma to the centre {center}"
                        )
                    runs.append(ARParams(e_total=e_total, e_box=e_box, profile=profile, pointer=pointer))
                else:
                    if sweep.band_center is not None:
                        raise ConfigInvalidError("band_center only applies to the AR model")
                    pointer = GaussianPointerSpec(
                        center=center, sigma=sigma, truncate_below=0.0, phase_tilt=tilt, chirp=chirp
                    )
                    fields = {"e_total": e_total, "e_box": e_box, "profile": profile, "pointer": pointer}
                    runs.append(MPParams.model_validate(fields, context={"tolerances": tol}))
            except ValidationError as e:
                raise ConfigInvalidError(f"{model.value} run {index} is invalid: {e}")
        logger.info("%d %s runs validated", len(runs), model.value)
        return runs

    @staticmethod
    def pointer_grid(pointer: GaussianPointerSpec, grid: GridSection) -> Grid1D:
        return Grid1D.centered(pointer.center, grid.q_half_width * pointer.sigma, grid.q_points)

    @staticmethod
    def run_row(index: int, model: ModelKind, params: ModelParams, config: ExperimentConfig) -> RunRow:
        grid, tol = config.grid, config.tolerances
        qgrid = SweepService.pointer_grid(params.pointer, grid)
        pointer = params.pointer
        profile = params.profile
        I1 = CouplingService.window_integral(profile, 1)
        extra = {}

        if model is ModelKind.AR:
            record = ARModelService.ar_pointer_distribution(params, qgrid, use_exact=grid.exact_phases, tol=tol)
            precision = ARModelService.ar_predicted_precision(params)
            I2 = CouplingService.window_integral(profile, 2)
            predicted_shift = params.e_total * (I1 - 2.0 * I2 * pointer.center)
            predicted_dp, predicted_de0 = precision.dp, precision.de0
        else:
            record = MPModelService.mp_measure(params, qgrid, tol=tol)
            predicted_shift = -params.e_total * I1
            predicted_dp = math.sqrt(1.0 + 4.0 * pointer.chirp**2 * pointer.sigma**4) / pointer.sigma
            predicted_de0 = predicted_dp / I1
            stats = TimeAnalysisService.text_statistics(params, record, qgrid, tol)
            extra = stats.model_dump()

        if grid.check_residual and not profile.is_rectangular:
            xgrid = VerificationOracle.padded_grid(params, grid.x_points, grid.x_padding)
            extra["residual"] = VerificationOracle.residual_norm(model, params, xgrid, pointer.center + pointer.sigma)

        row = RunRow(
            index=index,
            model=model,
            e_total=params.e_total,
            e_box=params.e_box,
            length=profile.length,
            plateau=profile.plateau,
            ramp=profile.ramp_width,
            shape=profile.shape,
            sigma=pointer.sigma,
            center=pointer.center,
            phase_tilt=pointer.phase_tilt,
            chirp=pointer.chirp,
            shift=record.shift,
            dp=record.dp,
            de0=record.de0,
            predicted_shift=predicted_shift,
            predicted_dp=predicted_dp,
            predicted_de0=predicted_de0,
            product=record.t_int * record.de0,
            regime=record.regime,
            t_int=record.t_int,
            inferred_energy=record.inferred_energy,
            **extra,
        )
        logger.debug("row %d: %s", index, row)
        return row

    @staticmethod
    def run_rows(model: ModelKind, runs: Sequence[ModelParams], config: ExperimentConfig, jobs: int) -> List[RunRow]:
        work = list(enumerate(runs))
        return _run_ordered(lambda item: SweepService.run_row(item[0], model, item[1], config), work, jobs)

    @staticmethod
    def run_sweep(config: ExperimentConfig, jobs: int = 1) -> List[RunRow]:
        model = config.require_model()
        runs = SweepService.build_params(model, config.require_sweep(), config.tolerances)
        return SweepService.run_rows(model, runs, config, jobs)

    @staticmethod
    def regimes(config: ExperimentConfig, jobs: int = 1) -> List[RunRow]:
        """AR energy sweep across the crossover between the two precision regimes."""
        if config.require_model() is not ModelKind.AR:
            raise ConfigInvalidError("regimes is an AR sweep; set model = \"ar\"")
        return SweepService.run_sweep(config, jobs)

    @staticmethod
    def table1(config: ExperimentConfig, jobs: int = 1) -> List[Table1Row]:
        section = config.table1
        unknown = [c for c in section.cases if c not in TABLE1_CASES]
        if unknown:
            raise ConfigInvalidError(f"unknown Table 1 cases {unknown}; cases run from 1 to 8")

        rows: List[Table1Row] = []
        for case in section.cases:
            if case == 1:
                rows.append(
                    Table1Row(
                        case=1,
                        status="reference",
                        note="external observer: dT * dE >= 1 holds for every coupling strength; nothing to simulate",
                    )
                )
            elif case == 2:
                runs = SweepService._table1_ar_runs(config)
                note = "AR model: T * dE0 >= 1 everywhere; near-saturating only inside a finite energy band"
                rows.extend(
                    Table1Row(case=2, status="computed", note=note, run=run)
                    for run in SweepService.run_rows(ModelKind.AR, runs, config, jobs)
                )
            elif case == 7:
                runs = SweepService._table1_mp_runs(config)
                note = "MP model: dE0 fixed by L g dq while the internal duration L shrinks"
                rows.extend(
                    Table1Row(case=7, status="computed", note=note, run=run)
                    for run in SweepService.run_rows(ModelKind.MP, runs, config, jobs)
                )
            else:
                rows.append(
                    Table1Row(case=case, status="not-computable", note="relation left open (?) for this case")
                )
        return rows

    @staticmethod
    def _table1_ar_runs(config: ExperimentConfig) -> List[ModelParams]:
        section = config.table1
        sweep = SweepRanges(
            e_total=section.ar_e_total,
            length=[section.ar_length],
            plateau=[section.ar_plateau],
            sigma=[section.sigma],
            shape=[section.shape],
        )
        return SweepService.build_params(ModelKind.AR, sweep, config.tolerances)

    @staticmethod
    def _table1_mp_runs(config: ExperimentConfig) -> List[ModelParams]:
        section = config.table1
        runs: List[ModelParams] = []
        for length in section.mp_lengths:
            # dq in the width convention equals sigma for the Gaussian pointer
            plateau = section.mp_coupling_product / (length * section.sigma)
            sweep = SweepRanges(
                e_total=[section.mp_e_total],
                length=[length],
                plateau=[plateau],
                sigma=[section.sigma],
                center=[section.mp_center],
                shape=[section.shape],
            )
            runs.extend(SweepService.build_params(ModelKind.MP, sweep, config.tolerances))
        return runs

    @staticmethod
    def verify(config: ExperimentConfig, jobs: int = 1) -> List[VerifyRow]:
        """Eigen-residual convergence of the exact solutions; smooth profiles are gated."""
        section = config.verify
        sweep = config.require_sweep()
        cells: List[Tuple[ModelKind, ModelParams, float, AmplitudeKind]] = []
        for model in section.models:
            for params in SweepService.build_params(model, sweep, config.tolerances):
                for q in section.pointer_values:
                    cells.append((model, params, q, AmplitudeKind.EXACT))
                    if model is ModelKind.AR and section.second_order_probe:
                        cells.append((model, params, q, AmplitudeKind.SECOND_ORDER))

        tol = config.tolerances

        def run_cell(cell: Tuple[ModelKind, ModelParams, float, AmplitudeKind]) -> VerifyRow:
            model, params, q, amplitude = cell
            report = VerificationOracle.convergence_study(
                model, params, section.resolutions, q, amplitude, padding=section.padding, tol=tol
            )
            finest = report.residuals[-1]
            profile = params.profile
            gated = amplitude is AmplitudeKind.EXACT and not profile.is_rectangular
            if gated:
                in_range = tol.order_min <= report.fitted_order <= tol.order_max
                passed = finest < tol.residual_bound and (in_range or report.floor_limited)
            elif amplitude is AmplitudeKind.SECOND_ORDER:
                passed = report.fitted_order < 1.0
            else:
                passed = True
            return VerifyRow(
                model=model,
                amplitude=amplitude.value,
                gated=gated,
                passed=passed,
                e_total=params.e_total,
                e_box=params.e_box,
                length=profile.length,
                plateau=profile.plateau,
                ramp=profile.ramp_width,
                shape=profile.shape,
                q=q,
                resolutions=_fmt_list(report.resolutions),
                residuals=_fmt_list(report.residuals),
                finest_residual=finest,
                fitted_order=report.fitted_order,
                floor_limited=report.floor_limited,
            )

        return _run_ordered(run_cell, cells, jobs)

    @staticmethod
    def measure(config: ExperimentConfig) -> Tuple[MeasurementRecord, ComplexField]:
        """Single read-out; returns the record and the post-measurement pointer field."""
        model = config.require_model()
        runs = SweepService.build_params(model, config.require_sweep(), config.tolerances)
        if len(runs) != 1:
            raise ConfigInvalidError(f"measure runs a single parameter tuple, the sweep gives {len(runs)}")
        params = runs[0]
        qgrid = SweepService.pointer_grid(params.pointer, config.grid)
        tol = config.tolerances
        if model is ModelKind.AR:
            exact = config.grid.exact_phases
            record = ARModelService.ar_pointer_distribution(params, qgrid, use_exact=exact, tol=tol)
            field = ARModelService.ar_post_measurement_field(params, qgrid, exact=exact, tol=tol)
        else:
            record = MPModelService.mp_measure(params, qgrid, tol=tol)
            field = MPModelService.mp_post_measurement_field(params, qgrid, tol=tol)
        return record, field

    @staticmethod
    def text_stats(config: ExperimentConfig, jobs: int = 1) -> Tuple[List[TExtStats], UncertaintySummary]:
        if config.require_model() is not ModelKind.MP:
            raise ConfigInvalidError("external-time statistics are defined for model = \"mp\"")
        runs = SweepService.build_params(ModelKind.MP, config.require_sweep(), config.tolerances)
        tol = config.tolerances

        def run_one(params: MPParams) -> TExtStats:
            qgrid = SweepService.pointer_grid(params.pointer, config.grid)
            record = MPModelService.mp_measure(params, qgrid, tol=tol)
            return TimeAnalysisService.text_statistics(params, record, qgrid, tol)

        stats = _run_ordered(run_one, runs, jobs)
        return stats, TimeAnalysisService.uncertainty_report(stats, tol)
