import logging
import math
from typing import Optional

import numpy as np
from scipy import fft

from app.core.config import NumericalTolerances, tolerances
from app.core.exceptions import (
    AliasingError,
    DomainTooSmallError,
    GridMismatchError,
    GridTooCoarseError,
    NormalizationError,
    RepresentationError,
    TruncationMassError,
)
from app.schemas.grid import ComplexField, GaussianPointerSpec, Grid1D, MomentStats, Representation
from app.utils.validators import covers_interval

logger = logging.getLogger(__name__)

# Sixth-order central first-derivative weights for offsets -3..3.
_D6 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0


class WavefunctionService:
    """Pointer states and the position <-> momentum transform.

    Convention: psi~(p) = (2 pi)^(-1/2) * integral dq exp(+i p q) psi(q), so a
    factor exp(-i a q) moves the momentum distribution by +a.
    """

    @staticmethod
    def make_gaussian(
        spec: GaussianPointerSpec,
        grid: Grid1D,
        tol: NumericalTolerances = tolerances,
    ) -> ComplexField:
        """Normalized Gaussian pointer field, optionally cut below ``truncate_below``.

        A cut under the grid's lower edge removes nothing: the grid already
        spans ``grid_sigmas`` widths around the centre.
        """
        reach = tol.grid_sigmas * spec.sigma
        if not covers_interval(grid.lo, grid.hi, spec.center - reach, spec.center + reach):
            raise DomainTooSmallError(
                f"grid [{grid.lo}, {grid.hi}) does not cover centre +/- {tol.grid_sigmas:g} sigma "
                f"= [{spec.center - reach}, {spec.center + reach}]"
            )

        q = grid.points
        offset = q - spec.center
        amps = np.exp(-(offset**2) / (2.0 * spec.sigma**2)) * np.exp(
            -1j * (spec.phase_tilt * q + spec.chirp * offset**2)
        )

        if spec.truncate_below is not None:
            cut = spec.truncate_below
            if cut >= grid.hi:
                raise TruncationMassError(f"cut {cut} lies above the grid [{grid.lo}, {grid.hi})")
            if spec.center - cut < tol.truncation_sigmas * spec.sigma:
                raise TruncationMassError(
                    f"cut {cut} is closer than {tol.truncation_sigmas:g} sigma to the centre {spec.center}"
                )
            amps = np.where(q < cut, 0.0, amps)

        amps = amps / math.sqrt(np.sum(np.abs(amps) ** 2) * grid.spacing)
        return ComplexField(grid=grid, amps=amps)

    @staticmethod
    def to_momentum(field: ComplexField, tol: NumericalTolerances = tolerances) -> ComplexField:
        if field.representation is not Representation.POSITION:
            raise RepresentationError("to_momentum expects a position-representation field")

        grid = field.grid
        pgrid = grid.momentum_grid()
        p = pgrid.points
        sign = (-1.0) ** np.arange(grid.n)
        # sum_j exp(+i p_k q_j) psi_j = exp(i p_k lo) * n * ifft((-1)^j psi_j)_k
        amps = grid.spacing / math.sqrt(2.0 * math.pi) * np.exp(1j * p * grid.lo) * grid.n * fft.ifft(sign * field.amps)

        result = ComplexField(grid=pgrid, amps=amps, representation=Representation.MOMENTUM, conjugate=grid)
        WavefunctionService.check_band_limit(result, tol)
        return result

    @staticmethod
    def to_position(field: ComplexField) -> ComplexField:
        if field.representation is not Representation.MOMENTUM or field.conjugate is None:
            raise RepresentationError("to_position expects a momentum field produced by to_momentum")

        grid = field.conjugate
        p = field.grid.points
        sign = (-1.0) ** np.arange(grid.n)
        amps = field.grid.spacing / math.sqrt(2.0 * math.pi) * sign * fft.fft(np.exp(-1j * p * grid.lo) * field.amps)
        return ComplexField(grid=grid, amps=amps)

    @staticmethod
    def check_band_limit(field: ComplexField, tol: NumericalTolerances = tolerances) -> None:
        """Reject momentum fields whose content reaches the Nyquist edge."""
        p = field.grid.points
        edge = np.abs(p) > 0.9 * abs(field.grid.lo)
        total = np.sum(field.density)
        if total == 0.0:
            return
        fraction = float(np.sum(field.density[edge]) / total)
        if fraction > tol.aliasing:
            raise AliasingError(
                f"{fraction:.3e} of the momentum mass sits at the lattice edge; refine the pointer grid"
            )

    @staticmethod
    def moments(field: ComplexField, tol: NumericalTolerances = tolerances) -> MomentStats:
        norm = field.norm
        if abs(norm - 1.0) > tol.norm:
            raise NormalizationError(f"field norm {norm!r} differs from 1")
        x = field.grid.points
        weights = field.density * field.grid.spacing
        mean = float(np.sum(x * weights))
        variance = float(np.sum((x - mean) ** 2 * weights))
        return MomentStats(mean=mean, std=math.sqrt(max(variance, 0.0)))

    @staticmethod
    def central_moment(field: ComplexField, order: int, mean: Optional[float] = None) -> float:
        x = field.grid.points
        weights = field.density * field.grid.spacing
        if mean is None:
            mean = float(np.sum(x * weights))
        return float(np.sum((x - mean) ** order * weights))

    @staticmethod
    def overlap(a: ComplexField, b: ComplexField) -> complex:
        if a.representation is not b.representation:
            raise RepresentationError("overlap needs both fields in the same representation")
        if a.grid != b.grid:
            raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")
        return complex(np.sum(np.conj(a.amps) * b.amps) * a.grid.spacing)

    @staticmethod
    def check_resolution(field: ComplexField, tol: NumericalTolerances = tolerances) -> None:
        """Neighbouring samples must not differ in phase by more than ``max_phase_step``."""
        psi = field.amps
        both = (np.abs(psi[1:]) > 0) & (np.abs(psi[:-1]) > 0)
        if not np.any(both):
            return
        steps = np.abs(np.angle(psi[1:][both] / psi[:-1][both]))
        if steps.max() > tol.max_phase_step:
            raise GridTooCoarseError(
                f"phase advances {steps.max():.3g} rad per sample (limit {tol.max_phase_step}); refine the grid"
            )

    @staticmethod
    def derivative(field: ComplexField) -> np.ndarray:
        """d/dx of the samples: sixth-order central inside, second-order one-sided at the three edge points."""
        f = field.amps
        h = field.grid.spacing
        out = np.gradient(f, h, edge_order=2).astype(np.complex128)
        interior = np.zeros(f.shape[0] - 6, dtype=np.complex128)
        for k, weight in enumerate(_D6):
            if weight != 0.0:
                interior += weight * f[k : k + f.shape[0] - 6]
        out[3:-3] = interior / h
        return out
