from functools import lru_cache
from typing import Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import quad_vec
from scipy.special import comb

from app.core.exceptions import SingularCouplingError, UnsupportedPowerError
from app.schemas.profile import CouplingProfile

ArrayLike = Union[float, np.ndarray]

SUPPORTED_POWERS = (1, 2, 3)


@lru_cache(maxsize=None)
def smoothstep(order: int) -> Polynomial:
    """Generalized smoothstep S_N on [0, 1]: S(0) = 0, S(1) = 1, first N derivatives zero at both ends."""
    coef = np.zeros(2 * order + 2)
    for k in range(order + 1):
        coef[order + 1 + k] = (-1) ** k * comb(order + k, k, exact=True) * comb(2 * order + 1, order - k, exact=True)
    return Polynomial(coef)


@lru_cache(maxsize=None)
def _power_antiderivative(order: int, n: int) -> Polynomial:
    """A(t) = integral_0^t S_N(u)^n du."""
    return (smoothstep(order) ** n).integ(lbnd=0.0)


class CouplingService:
    """The coupling window g(x) and the integrals of it that enter the phases.

    All integrals start at x_i; for x < x_i they are the (signed) integral from
    x_i back to x.
    """

    @staticmethod
    def eval(profile: CouplingProfile, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        g = profile.plateau
        inside = (x > profile.x_i) & (x < profile.x_f)
        if profile.is_rectangular:
            value = np.where(inside, g, 0.0)
        else:
            eps = profile.ramp_width
            S = smoothstep(profile.smoothness)
            t_up = np.clip((x - profile.x_i) / eps, 0.0, 1.0)
            t_down = np.clip((profile.x_f - x) / eps, 0.0, 1.0)
            value = np.where(inside, g * S(np.minimum(t_up, t_down)), 0.0)
        return value if value.ndim else float(value)

    @staticmethod
    def integral_power(profile: CouplingProfile, n: int, x: ArrayLike) -> ArrayLike:
        """integral_{x_i}^{x} g(x')^n dx', exact piecewise-polynomial."""
        if n not in SUPPORTED_POWERS:
            raise UnsupportedPowerError(f"power {n} not supported; use one of {SUPPORTED_POWERS}")
        x = np.asarray(x, dtype=float)
        gn = profile.plateau**n
        u = np.clip(x, profile.x_i, profile.x_f) - profile.x_i

        if profile.is_rectangular:
            value = gn * u
        else:
            eps = profile.ramp_width
            L = profile.length
            A = _power_antiderivative(profile.smoothness, n)
            ramp_total = A(1.0)
            up = eps * A(np.clip(u / eps, 0.0, 1.0))
            flat = np.clip(u - eps, 0.0, L - 2.0 * eps)
            down = eps * (ramp_total - A(np.clip((L - u) / eps, 0.0, 1.0)))
            down = np.where(u > L - eps, down, 0.0)
            value = gn * (up + flat + down)
        return value if value.ndim else float(value)

    @staticmethod
    def window_integral(profile: CouplingProfile, n: int) -> float:
        """integral of g^n over the whole window (L g^n for the rectangular shape)."""
        return float(CouplingService.integral_power(profile, n, profile.x_f))

    @staticmethod
    def check_path(profile: CouplingProfile, x: ArrayLike, q: ArrayLike) -> None:
        """1 + g q must stay positive on every coupling value met between x_i and x."""
        q = np.asarray(q, dtype=float)
        if not np.any(q < 0):
            return
        x = np.asarray(x, dtype=float)
        reached = np.where(
            x >= profile.x_i + profile.ramp_width,
            np.where(x > profile.x_i, profile.plateau, 0.0),
            CouplingService.eval(profile, x),
        )
        worst = float(np.min(1.0 + reached * q))
        if worst <= 0.0:
            raise SingularCouplingError(f"1 + g(x) q reaches {worst:.3g} along the clock path")

    @staticmethod
    def integral_reciprocal(profile: CouplingProfile, q: ArrayLike, x: ArrayLike) -> np.ndarray:
        """integral_{x_i}^{x} dx' / (1 + g(x') q), broadcast over q and x.

        Closed form off the ramps; the ramps go through scipy's adaptive
        vector quadrature. Callers guarantee 1 + g q > 0 on the path.
        """
        q, x = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(x, dtype=float))
        a = profile.plateau * q
        u = np.clip(x, profile.x_i, profile.x_f) - profile.x_i
        outside = np.minimum(x - profile.x_i, 0.0) + np.maximum(x - profile.x_f, 0.0)

        if profile.is_rectangular:
            return outside + u / (1.0 + a)

        eps = profile.ramp_width
        L = profile.length
        J_full = CouplingService._ramp_reciprocal(profile, a, np.ones_like(u))
        up = eps * CouplingService._ramp_reciprocal(profile, a, np.clip(u / eps, 0.0, 1.0))
        flat = np.clip(u - eps, 0.0, L - 2.0 * eps) / (1.0 + a)
        tail = np.clip((L - u) / eps, 0.0, 1.0)
        down = np.where(u > L - eps, eps * (J_full - CouplingService._ramp_reciprocal(profile, a, tail)), 0.0)
        return outside + up + flat + down

    @staticmethod
    def _ramp_reciprocal(profile: CouplingProfile, a: np.ndarray, t: np.ndarray) -> np.ndarray:
        """integral_0^t du / (1 + a S(u)) elementwise, via u = t s with s in [0, 1]."""
        S = smoothstep(profile.smoothness)
        shape = a.shape
        a_flat, t_flat = a.ravel(), t.ravel()

        def integrand(s: float) -> np.ndarray:
            return t_flat / (1.0 + a_flat * S(t_flat * s))

        value, _ = quad_vec(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, norm="max")
        return np.asarray(value).reshape(shape)
