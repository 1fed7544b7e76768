from pathlib import Path

import pytest

from app.schemas import ARParams, CouplingProfile, GaussianPointerSpec, Grid1D, MPParams, ProfileShape

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def rect_profile(length: float = 1.0, plateau: float = 0.1, x_i: float = 0.0) -> CouplingProfile:
    return CouplingProfile(x_i=x_i, x_f=x_i + length, plateau=plateau, shape=ProfileShape.RECTANGULAR)


def smooth_profile(length: float = 10.0, plateau: float = 0.5, ramp: float = 2.0, smoothness: int = 4) -> CouplingProfile:
    return CouplingProfile(x_i=0.0, x_f=length, plateau=plateau, ramp=ramp, smoothness=smoothness)


def make_ar(e_total: float = 0.0, e_box: float = 0.0, profile=None, **pointer) -> ARParams:
    pointer.setdefault("sigma", 1.0)
    return ARParams(
        e_total=e_total,
        e_box=e_box,
        profile=profile if profile is not None else rect_profile(),
        pointer=GaussianPointerSpec(**pointer),
    )


def make_mp(e_total: float = 0.0, e_box: float = 0.0, profile=None, **pointer) -> MPParams:
    pointer.setdefault("sigma", 1.0)
    pointer.setdefault("center", 10.0)
    pointer.setdefault("truncate_below", 0.0)
    return MPParams(
        e_total=e_total,
        e_box=e_box,
        profile=profile if profile is not None else rect_profile(plateau=0.5),
        pointer=GaussianPointerSpec(**pointer),
    )


@pytest.fixture
def ar_qgrid() -> Grid1D:
    """Pointer grid for the AR energy sweep; wide enough in momentum for E0 = 500."""
    return Grid1D(lo=-16.0, hi=16.0, n=8192)


@pytest.fixture
def mp_qgrid() -> Grid1D:
    return Grid1D(lo=-6.0, hi=26.0, n=4096)


@pytest.fixture
def smooth_x_grid() -> Grid1D:
    """Clock grid with a g = 0 margin of 2 around the smooth window [0, 10]."""
    return Grid1D(lo=-2.0, hi=12.0, n=2048)


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR
