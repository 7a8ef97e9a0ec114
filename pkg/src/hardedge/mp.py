"""Closed-form Marchenko-Pastur machinery for square sample covariance matrices.

Everything here is the aspect-ratio-one case: the limiting spectral law of
X*X for a square matrix X with iid entries of variance 1/N.  The law lives on
[0, 4] with density (1/2pi) sqrt((4-E)/E), which blows up like E^(-1/2) at the
hard edge E = 0.  The substitution E = 2 - 2 cos(t) maps [0, pi] onto the
support and turns the density into the bounded form (1 + cos t)/pi; both the
closed-form CDF and the quadrature helpers ride on that substitution so no
integral ever samples the singular endpoint.

The Stieltjes transform of the law is evaluated in the rationalised form

    -2 / (theta * (1 + sqrt(1 - 4/theta)))

which is algebraically identical to -1/2 + (1/2) sqrt(1 - 4/theta) but avoids
the large-|theta| cancellation of the naive form (sqrt(1-4/theta) - 1 loses
~|theta|/4 digits when computed by subtraction).  The principal square root
already has nonnegative real part; the sign flip below is a guard for
arguments that land exactly on the branch cut.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "SUPPORT_RIGHT",
    "SpectralPoint",
    "Window",
    "LawEval",
    "DeltaBoundsReport",
    "mp_density",
    "mp_cdf",
    "law_eval",
    "mp_window_mass",
    "mp_stieltjes",
    "fixed_point_residual",
    "check_delta_bounds",
    "density_quadrature",
    "stieltjes_quadrature",
    "mp_moment_quadrature",
]

SUPPORT_RIGHT = 4.0

# Default constant for the lower bound on the imaginary part inside the
# circle E^2 + eta^2 <= 4E.  The provable constant is 2^(-9/4) ~ 0.2102;
# 0.2 leaves margin for rounding.
IM_BOUND_CONSTANT = 0.2


@dataclass(frozen=True)
class SpectralPoint:
    """Spectral parameter theta = energy + i*eta in the open upper half plane."""

    energy: float
    eta: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.energy):
            raise ValueError(f"energy must be finite, got {self.energy}")
        if not (math.isfinite(self.eta) and self.eta > 0.0):
            raise ValueError(f"eta must be positive and finite, got {self.eta}")

    @property
    def theta(self) -> complex:
        return complex(self.energy, self.eta)

    def scale(self, size: int) -> float:
        """Resolution scale N*eta/sqrt(E) of this point at matrix size N."""
        return size * self.eta / math.sqrt(self.energy)


@dataclass(frozen=True)
class Window:
    """Energy window [energy, energy + eta]; eta doubles as the matching
    imaginary offset when the window is paired with a spectral point."""

    energy: float
    eta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.energy) and self.energy >= 0.0):
            raise ValueError(f"window left endpoint must be >= 0, got {self.energy}")
        if not (math.isfinite(self.eta) and self.eta > 0.0):
            raise ValueError(f"window width must be positive, got {self.eta}")

    @property
    def right(self) -> float:
        return self.energy + self.eta

    @property
    def point(self) -> SpectralPoint:
        """Spectral point E + i*eta sitting on the window's left endpoint."""
        return SpectralPoint(self.energy, self.eta)


@dataclass(frozen=True)
class LawEval:
    """Density and CDF of the limiting law at one energy."""

    energy: float
    density: float
    cdf: float


def mp_density(energy: float) -> float:
    """Limiting spectral density (1/2pi) sqrt((4-E)/E) on (0, 4], else 0.

    The hard-edge endpoint E = 0 returns 0 by convention even though the
    density diverges there; window masses remain finite and are the
    quantities the lab actually consumes.
    """
    if not math.isfinite(energy):
        raise ValueError(f"energy must be finite, got {energy}")
    if energy <= 0.0 or energy > SUPPORT_RIGHT:
        return 0.0
    return math.sqrt((SUPPORT_RIGHT - energy) / energy) / (2.0 * math.pi)


def mp_cdf(energy: float) -> float:
    """Closed-form CDF: (t + sin t)/pi with t = arccos(1 - E/2), clamped outside [0, 4]."""
    if not math.isfinite(energy):
        raise ValueError(f"energy must be finite, got {energy}")
    if energy <= 0.0:
        return 0.0
    if energy >= SUPPORT_RIGHT:
        return 1.0
    t = math.acos(1.0 - energy / 2.0)
    return (t + math.sin(t)) / math.pi


def law_eval(energy: float) -> LawEval:
    return LawEval(energy=energy, density=mp_density(energy), cdf=mp_cdf(energy))


def mp_window_mass(window: Window) -> float:
    """Law mass of [E, E+eta] as a CDF difference (exact additivity by construction)."""
    return mp_cdf(window.right) - mp_cdf(window.energy)


def mp_stieltjes(point: SpectralPoint) -> complex:
    """Stieltjes transform of the limiting law at theta = E + i*eta, eta > 0.

    Branch: principal root of 1 - 4/theta (nonnegative real part), flipped if
    a cut-edge evaluation returns a negative real part.  The result is
    verified to lie in the upper half plane before returning.
    """
    theta = point.theta
    root = cmath.sqrt(1.0 - 4.0 / theta)
    if root.real < 0.0:
        root = -root
    value = -2.0 / (theta * (1.0 + root))
    if not value.imag > 0.0:
        raise ArithmeticError(
            f"Stieltjes transform left the upper half plane at theta={theta}: {value}"
        )
    return value


def fixed_point_residual(delta: complex, point: SpectralPoint) -> float:
    """|theta*(delta+1) + 1/delta|: exactly 0 at the transform of the law.

    delta = -1 is the spurious fixed point of the defining equation written
    as theta*(delta+1)*delta = -1; there the residual is exactly 1.
    """
    if delta == 0:
        raise ValueError("delta must be nonzero")
    theta = point.theta
    return abs(theta * (delta + 1.0) + 1.0 / delta)


@dataclass(frozen=True)
class DeltaBoundsReport:
    """Deterministic envelope checks on the transform at one spectral point.

    margins are (bound satisfied) - (threshold), nonnegative iff the check
    holds.  The imaginary-part lower bound only applies inside the circle
    E^2 + eta^2 <= 4E; outside, im_ok/im_margin are None.
    """

    point: SpectralPoint
    modulus_ok: bool
    modulus_margin: float
    shifted_ok: bool
    shifted_margin: float
    inside_circle: bool
    im_ok: bool | None
    im_margin: float | None

    @property
    def all_ok(self) -> bool:
        return self.modulus_ok and self.shifted_ok and (self.im_ok is not False)


def check_delta_bounds(
    point: SpectralPoint, im_constant: float = IM_BOUND_CONSTANT
) -> DeltaBoundsReport:
    """Check |delta|^2 <= 1/E, |1+delta|^2 >= max(E/(E^2+eta^2), 1/4), and the
    in-circle lower bound Im delta >= c*(|E-4|^(1/2)+eta^(1/2))/(E^2+eta^2)^(1/4)."""
    energy, eta = point.energy, point.eta
    if energy <= 0.0:
        raise ValueError(f"bounds require E > 0, got {energy}")
    delta = mp_stieltjes(point)
    mod_sq = abs(delta) ** 2
    modulus_margin = 1.0 / energy - mod_sq
    shifted = abs(1.0 + delta) ** 2
    norm_sq = energy * energy + eta * eta
    shifted_floor = max(energy / norm_sq, 0.25)
    shifted_margin = shifted - shifted_floor
    inside = norm_sq <= 4.0 * energy
    if inside:
        floor = (
            im_constant
            * (math.sqrt(abs(energy - 4.0)) + math.sqrt(eta))
            / norm_sq**0.25
        )
        im_margin = delta.imag - floor
        im_ok = im_margin >= 0.0
    else:
        im_margin = None
        im_ok = None
    return DeltaBoundsReport(
        point=point,
        modulus_ok=modulus_margin >= 0.0,
        modulus_margin=modulus_margin,
        shifted_ok=shifted_margin >= 0.0,
        shifted_margin=shifted_margin,
        inside_circle=inside,
        im_ok=im_ok,
        im_margin=im_margin,
    )


def density_quadrature(
    f=None, lo: float = 0.0, hi: float = SUPPORT_RIGHT, **quad_kwargs
) -> float:
    """Adaptive quadrature of integral f(E) d(law)(E) over [lo, hi].

    Works in the substituted variable E = 2 - 2 cos t where the law's density
    is (1 + cos t)/pi, so the hard-edge singularity never enters.  f = None
    integrates the density itself.  This is the independent oracle the
    closed forms are tested against.
    """
    lo = min(max(lo, 0.0), SUPPORT_RIGHT)
    hi = min(max(hi, 0.0), SUPPORT_RIGHT)
    if hi <= lo:
        return 0.0
    t_lo = math.acos(1.0 - lo / 2.0)
    t_hi = math.acos(1.0 - hi / 2.0)

    if f is None:
        def g(t: float) -> float:
            return (1.0 + math.cos(t)) / math.pi
    else:
        def g(t: float) -> float:
            return f(2.0 - 2.0 * math.cos(t)) * (1.0 + math.cos(t)) / math.pi

    kwargs = {"limit": 200, "epsabs": 1e-13, "epsrel": 1e-13}
    kwargs.update(quad_kwargs)
    value, _ = integrate.quad(g, t_lo, t_hi, **kwargs)
    return value


def stieltjes_quadrature(point: SpectralPoint) -> complex:
    """Quadrature oracle for the transform: integral of d(law)(x) / (x - theta)."""
    theta = point.theta
    re = density_quadrature(lambda x: ((x - theta) ** -1).real)
    im = density_quadrature(lambda x: ((x - theta) ** -1).imag)
    return complex(re, im)


def mp_moment_quadrature(order: int) -> float:
    """k-th moment of the law by quadrature (1, 2, 5, 14, ... for k = 1, 2, 3, 4)."""
    if order < 0:
        raise ValueError(f"moment order must be >= 0, got {order}")
    return density_quadrature(lambda x: x**order)
