import logging
import math
from typing import Sequence, Tuple

import numpy as np

from app.core.config import NumericalTolerances, tolerances
from app.core.exceptions import ConfigInvalidError
from app.schemas.grid import Grid1D
from app.schemas.params import ModelKind, MPParams
from app.schemas.records import MeasurementRecord, TExtStats, TimeMap, UncertaintyRow, UncertaintySummary
from app.services.coupling import ArrayLike, CouplingService
from app.services.wavefunction import WavefunctionService

logger = logging.getLogger(__name__)


class TimeAnalysisService:
    """Internal and external clock readings and the statistics of the external duration.

    Both clocks read zero at x_i.
    """

    @staticmethod
    def elapsed_times(time_map: TimeMap, x: ArrayLike, q: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
        """(t_int, t_ext) after the clock has advanced to x, for pointer value q."""
        profile = time_map.profile
        x_arr = np.asarray(x, dtype=float)
        t_int = x_arr - profile.x_i

        if time_map.model is ModelKind.AR:
            CouplingService.check_path(profile, x_arr, q)
            t_ext = CouplingService.integral_reciprocal(profile, q, x_arr)
        else:
            t_ext = t_int + np.asarray(q, dtype=float) * CouplingService.integral_power(profile, 1, x_arr)

        if np.ndim(t_ext) == 0:
            return float(t_int), float(t_ext)
        return np.broadcast_to(t_int, np.shape(t_ext)), np.asarray(t_ext)

    @staticmethod
    def text_statistics(
        params: MPParams,
        record: MeasurementRecord,
        qgrid: Grid1D,
        tol: NumericalTolerances = tolerances,
    ) -> TExtStats:
        """Mean and spread of the external duration T_ext(q) over |pointer(q)|^2."""
        coupling = CouplingService.window_integral(params.profile, 1)
        if record.model is not ModelKind.MP:
            raise ConfigInvalidError("external-time statistics need a record from the MP model")
        if not math.isclose(record.coupling, coupling, rel_tol=1e-12) or not math.isclose(
            record.t_int, params.profile.length, rel_tol=1e-12
        ):
            raise ConfigInvalidError("measurement record was produced with different parameters")

        pointer = WavefunctionService.make_gaussian(params.pointer, qgrid, tol)
        # the read-out translates the pointer rigidly, so its momentum spread and start are the pointer's own
        before = WavefunctionService.moments(WavefunctionService.to_momentum(pointer, tol), tol)
        if not math.isclose(record.dp, before.width, rel_tol=1e-6) or not math.isclose(
            record.mean_before, before.mean, rel_tol=1e-6, abs_tol=1e-6
        ):
            raise ConfigInvalidError(
                f"measurement record (dp = {record.dp:.6g}, p0 = {record.mean_before:.6g}) was produced from a "
                f"different pointer (dp = {before.width:.6g}, p0 = {before.mean:.6g})"
            )

        time_map = TimeMap(model=ModelKind.MP, profile=params.profile)
        _, durations = TimeAnalysisService.elapsed_times(time_map, params.profile.x_f, qgrid.points)

        weights = pointer.density * qgrid.spacing
        mean = float(np.sum(durations * weights))
        variance = float(np.sum((durations - mean) ** 2 * weights))
        spread = math.sqrt(2.0 * max(variance, 0.0))

        stats = TExtStats(
            mean_text=mean,
            spread_text=spread,
            product_spread=record.de0 * spread,
            product_mean=record.de0 * mean,
        )
        logger.debug("T_ext statistics: %s", stats)
        return stats

    @staticmethod
    def uncertainty_report(
        stats_list: Sequence[TExtStats], tol: NumericalTolerances = tolerances
    ) -> UncertaintySummary:
        if not stats_list:
            raise ConfigInvalidError("uncertainty report needs at least one run")

        floor = 1.0 - tol.product_violation
        rows = [
            UncertaintyRow(
                index=i,
                mean_text=s.mean_text,
                spread_text=s.spread_text,
                product_spread=s.product_spread,
                product_mean=s.product_mean,
                violates=s.product_spread < floor,
            )
            for i, s in enumerate(stats_list)
        ]
        violations = [row.index for row in rows if row.violates]
        if violations:
            logger.warning("runs %s fall below dE0 * dT_ext = %.3g", violations, floor)

        spreads = [row.product_spread for row in rows]
        means = [row.product_mean for row in rows]
        return UncertaintySummary(
            rows=rows,
            min_product_spread=min(spreads),
            max_product_spread=max(spreads),
            min_product_mean=min(means),
            max_product_mean=max(means),
            violations=violations,
        )
