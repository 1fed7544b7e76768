import numpy as np
import pytest

from app.core.exceptions import ConfigInvalidError, InsufficientPaddingError, RepresentationError
from app.schemas import AmplitudeKind, GaussianPointerSpec, Grid1D, ModelKind
from app.services.ar_model import ARModelService
from app.services.mp_model import LEFT
from app.services.oracle import VerificationOracle
from app.services.wavefunction import WavefunctionService
from tests.conftest import make_ar, make_mp, rect_profile, smooth_profile

RESOLUTIONS = [256, 512, 1024, 2048]


@pytest.fixture
def smooth_ar():
    return make_ar(e_total=1.0, e_box=0.5, profile=smooth_profile())


@pytest.fixture
def smooth_mp():
    return make_mp(e_total=1.0, e_box=0.5, profile=smooth_profile())


class TestQuadrature:
    @pytest.mark.parametrize(
        "spec",
        [
            GaussianPointerSpec(sigma=1.0),
            GaussianPointerSpec(sigma=0.7, center=1.0, phase_tilt=3.0),
            GaussianPointerSpec(sigma=1.2, chirp=0.4),
        ],
    )
    def test_agrees_with_the_fast_transform(self, spec):
        field = WavefunctionService.make_gaussian(spec, Grid1D(lo=-12.0, hi=12.0, n=256))
        fast = WavefunctionService.to_momentum(field)
        slow = VerificationOracle.quadrature_transform(field)
        assert slow.grid == fast.grid
        scale = np.abs(fast.amps).max()
        np.testing.assert_allclose(slow.amps, fast.amps, rtol=0.0, atol=1e-10 * scale)

    def test_minimal_gaussian_width(self):
        field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=2.0), Grid1D(lo=-20.0, hi=20.0, n=512))
        stats = WavefunctionService.moments(VerificationOracle.quadrature_transform(field))
        assert stats.width == pytest.approx(0.5, rel=1e-9)

    def test_von_neumann_read_out(self):
        params = make_ar(e_total=50.0)
        field = ARModelService.ar_post_measurement_field(params, Grid1D(lo=-8.0, hi=8.0, n=1024))
        stats = WavefunctionService.moments(VerificationOracle.quadrature_transform(field))
        predicted = ARModelService.ar_predicted_precision(params)
        assert stats.mean == pytest.approx(5.0, rel=0.01)
        assert stats.width == pytest.approx(predicted.dp, rel=0.01)

    def test_rejects_momentum_fields(self):
        field = WavefunctionService.make_gaussian(GaussianPointerSpec(sigma=1.0), Grid1D(lo=-12.0, hi=12.0, n=256))
        with pytest.raises(RepresentationError):
            VerificationOracle.quadrature_transform(WavefunctionService.to_momentum(field))


class TestResidual:
    def test_free_state(self):
        params = make_ar(e_total=1.0, e_box=0.5)
        grid = VerificationOracle.padded_grid(params, 256)
        assert VerificationOracle.residual_norm(ModelKind.AR, params, grid, 0.0) < 1e-10

    @pytest.mark.parametrize("model", [ModelKind.AR, ModelKind.MP])
    def test_exact_solutions(self, model, smooth_ar, smooth_mp):
        params = smooth_ar if model is ModelKind.AR else smooth_mp
        grid = VerificationOracle.padded_grid(params, 2048, padding=2.0)
        assert VerificationOracle.residual_norm(model, params, grid, 0.6) < 1e-6

    def test_second_order_solution_is_off(self, smooth_ar):
        grid = VerificationOracle.padded_grid(smooth_ar, 2048, padding=2.0)
        residual = VerificationOracle.residual_norm(
            ModelKind.AR, smooth_ar, grid, 0.6, amplitude=AmplitudeKind.SECOND_ORDER
        )
        assert residual > 1e-3

    def test_left_ordering_is_off(self, smooth_mp):
        grid = VerificationOracle.padded_grid(smooth_mp, 2048, padding=2.0)
        symmetric = VerificationOracle.residual_norm(ModelKind.MP, smooth_mp, grid, 0.6)
        left = VerificationOracle.residual_norm(ModelKind.MP, smooth_mp, grid, 0.6, ordering=LEFT)
        assert left > 1e3 * symmetric

    def test_window_must_have_a_margin(self, smooth_ar):
        grid = VerificationOracle.padded_grid(smooth_ar, 256, padding=0.0)
        with pytest.raises(InsufficientPaddingError):
            VerificationOracle.residual_norm(ModelKind.AR, smooth_ar, grid, 0.6)

    def test_mp_has_no_second_order_amplitude(self, smooth_mp):
        grid = VerificationOracle.padded_grid(smooth_mp, 256, padding=2.0)
        with pytest.raises(ConfigInvalidError):
            VerificationOracle.residual_norm(ModelKind.MP, smooth_mp, grid, 0.6, amplitude=AmplitudeKind.SECOND_ORDER)


class TestConvergence:
    @pytest.mark.parametrize("model", [ModelKind.AR, ModelKind.MP])
    def test_exact_solutions_converge_at_fourth_order(self, model, smooth_ar, smooth_mp):
        params = smooth_ar if model is ModelKind.AR else smooth_mp
        report = VerificationOracle.convergence_study(model, params, RESOLUTIONS, 0.6, padding=2.0)
        assert report.resolutions == RESOLUTIONS
        assert 3.5 <= report.fitted_order <= 4.5
        assert report.residuals[-1] < 1e-6
        assert all(a > b for a, b in zip(report.residuals, report.residuals[1:]))

    def test_second_order_amplitude_plateaus(self, smooth_ar):
        report = VerificationOracle.convergence_study(
            ModelKind.AR, smooth_ar, RESOLUTIONS, 0.6, amplitude=AmplitudeKind.SECOND_ORDER, padding=2.0
        )
        assert report.fitted_order < 1.0
        assert min(report.residuals) > 1e-3

    def test_discontinuous_window_does_not_converge(self):
        params = make_ar(e_total=1.0, e_box=0.5, profile=rect_profile(length=10.0, plateau=0.5))
        report = VerificationOracle.convergence_study(ModelKind.AR, params, RESOLUTIONS, 0.6, padding=2.0)
        assert report.fitted_order < 1.0

    @pytest.mark.parametrize("resolutions", [[256, 512], [256, 512, 2048], [512, 256, 128]])
    def test_resolution_ladder(self, smooth_ar, resolutions):
        with pytest.raises(ConfigInvalidError):
            VerificationOracle.convergence_study(ModelKind.AR, smooth_ar, resolutions, 0.6)

    def test_default_padding_is_a_fraction_of_the_window(self, smooth_ar):
        grid = VerificationOracle.padded_grid(smooth_ar, 256)
        assert grid.lo == pytest.approx(-2.0)
        assert grid.hi == pytest.approx(12.0)
