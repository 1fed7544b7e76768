import math

import numpy as np
import pytest

from app.core.exceptions import (
    AliasingError,
    DomainTooSmallError,
    GridMismatchError,
    GridTooCoarseError,
    NormalizationError,
    RepresentationError,
    TruncationMassError,
)
from app.schemas import ComplexField, GaussianPointerSpec, Grid1D, Representation
from app.services.wavefunction import WavefunctionService


@pytest.fixture
def grid() -> Grid1D:
    return Grid1D(lo=-16.0, hi=16.0, n=1024)


def momentum_stats(field: ComplexField):
    return WavefunctionService.moments(WavefunctionService.to_momentum(field))


def test_gaussian_is_normalized(grid):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.5, center=1.0), grid)
    assert field.norm == pytest.approx(1.0, abs=1e-12)
    stats = WavefunctionService.moments(field)
    assert stats.mean == pytest.approx(1.0, abs=1e-12)
    # width of |psi|^2 is sigma itself
    assert stats.width == pytest.approx(1.5, rel=1e-10)


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
def test_minimal_gaussian_has_reciprocal_momentum_width(grid, sigma):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=sigma), grid)
    stats = momentum_stats(field)
    assert stats.mean == pytest.approx(0.0, abs=1e-10)
    assert stats.width == pytest.approx(1.0 / sigma, rel=1e-10)


@pytest.mark.parametrize("tilt", [3.0, -5.0])
def test_phase_tilt_is_the_momentum_offset(grid, tilt):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0, phase_tilt=tilt), grid)
    assert momentum_stats(field).mean == pytest.approx(tilt, abs=1e-10)


def test_plane_wave_factor_moves_momentum_to_minus_its_wavenumber(grid):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), grid)
    waved = field.with_amps(field.amps * np.exp(2j * grid.points))
    assert momentum_stats(waved).mean == pytest.approx(-2.0, abs=1e-10)


def test_chirp_widens_momentum_distribution(grid):
    beta, sigma = 0.5, 1.0
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=sigma, chirp=beta), grid)
    expected = math.sqrt(1.0 + 4.0 * beta**2 * sigma**4) / sigma
    assert momentum_stats(field).width == pytest.approx(expected, rel=1e-10)


def test_momentum_transform_preserves_norm(grid):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=0.7, phase_tilt=2.0, chirp=0.3), grid)
    assert WavefunctionService.to_momentum(field).norm == pytest.approx(1.0, abs=1e-12)


def test_inverse_transform_restores_position_field(grid):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0, center=-1.0, phase_tilt=1.5), grid)
    back = WavefunctionService.to_position(WavefunctionService.to_momentum(field))
    assert back.grid == grid
    np.testing.assert_allclose(back.amps, field.amps, atol=1e-13)


def test_momentum_field_remembers_its_position_grid(grid):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), grid)
    momentum = WavefunctionService.to_momentum(field)
    assert momentum.representation is Representation.MOMENTUM
    assert momentum.conjugate == grid
    assert momentum.grid.spacing == pytest.approx(2.0 * math.pi / grid.length)


def test_grid_must_cover_eight_sigma():
    with pytest.raises(DomainTooSmallError):
        WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), Grid1D(lo=-4.0, hi=4.0, n=256))


def test_truncated_gaussian_is_zero_below_cut_and_renormalized():
    grid = Grid1D(lo=-6.0, hi=26.0, n=4096)
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0, center=5.0, truncate_below=0.0), grid)
    assert np.all(field.amps[grid.points < 0.0] == 0.0)
    assert field.norm == pytest.approx(1.0, abs=1e-12)


def test_cut_too_close_to_centre_is_rejected(grid):
    with pytest.raises(TruncationMassError):
        WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0, truncate_below=-3.0), grid)


def test_cut_above_the_grid_is_rejected():
    grid = Grid1D(lo=-16.0, hi=16.0, n=1024)
    with pytest.raises(TruncationMassError):
        WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0, center=0.0, truncate_below=20.0), grid)


def test_cut_below_the_grid_removes_nothing(grid):
    cut = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0, truncate_below=-20.0), grid)
    plain = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), grid)
    np.testing.assert_array_equal(cut.amps, plain.amps)


def test_narrow_pointer_far_above_its_cut():
    # centre 20 sigma above q = 0; a 16-sigma grid starts at q = 2
    spec = GaussianPointerSpec(sigma=0.5, center=10.0, truncate_below=0.0)
    grid = Grid1D.centered(10.0, 8.0, 4096)
    field = WavefunctionService.make_gaussian(spec, grid)
    assert grid.lo > 0.0
    assert field.norm == pytest.approx(1.0, abs=1e-12)
    assert momentum_stats(field).width == pytest.approx(2.0, rel=1e-9)


def test_content_at_the_nyquist_edge_is_rejected():
    grid = Grid1D(lo=-16.0, hi=16.0, n=256)
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=0.05), grid)
    with pytest.raises(AliasingError):
        WavefunctionService.to_momentum(field)


def test_moments_require_a_normalized_field(grid):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), grid)
    with pytest.raises(NormalizationError):
        WavefunctionService.moments(field.with_amps(2.0 * field.amps))


def test_transforms_check_representation(grid):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), grid)
    with pytest.raises(RepresentationError):
        WavefunctionService.to_position(field)
    with pytest.raises(RepresentationError):
        WavefunctionService.to_momentum(WavefunctionService.to_momentum(field))


def test_overlap(grid):
    a = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), grid)
    b = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0, center=2.0), grid)
    assert WavefunctionService.overlap(a, a) == pytest.approx(1.0, abs=1e-12)
    # <a|b> for unit Gaussians separated by d is exp(-d^2 / 4 sigma^2)
    assert WavefunctionService.overlap(a, b).real == pytest.approx(math.exp(-1.0), rel=1e-10)

    other = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), Grid1D(lo=-16.0, hi=16.0, n=2048))
    with pytest.raises(GridMismatchError):
        WavefunctionService.overlap(a, other)
    with pytest.raises(RepresentationError):
        WavefunctionService.overlap(a, WavefunctionService.to_momentum(b))


def test_central_moments_of_a_gaussian(grid):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), grid)
    # |psi|^2 has variance 1/2
    assert WavefunctionService.central_moment(field, 2) == pytest.approx(0.5, rel=1e-10)
    assert WavefunctionService.central_moment(field, 3) == pytest.approx(0.0, abs=1e-12)
    assert WavefunctionService.central_moment(field, 4) == pytest.approx(0.75, rel=1e-10)


def test_derivative_is_accurate_on_smooth_samples():
    grid = Grid1D(lo=0.0, hi=2.0 * math.pi, n=512)
    field = ComplexField(grid=grid, amps=np.sin(grid.points))
    np.testing.assert_allclose(WavefunctionService.derivative(field).real, np.cos(grid.points), atol=1e-4)
    np.testing.assert_allclose(
        WavefunctionService.derivative(field)[3:-3].real, np.cos(grid.points[3:-3]), atol=1e-12
    )


def test_under_resolved_phase_is_rejected():
    grid = Grid1D(lo=0.0, hi=12.8, n=64)
    field = ComplexField(grid=grid, amps=np.exp(3j * grid.points))
    with pytest.raises(GridTooCoarseError):
        WavefunctionService.check_resolution(field)


def test_field_amplitudes_are_read_only(grid):
    field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), grid)
    with pytest.raises(ValueError):
        field.amps[0] = 1.0


def test_grid_size_must_be_power_of_two():
    with pytest.raises(ValueError):
        Grid1D(lo=0.0, hi=1.0, n=1000)
