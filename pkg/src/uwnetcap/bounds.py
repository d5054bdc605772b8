"""Upper bounds on the transport capacity of an n-node network in a unit-area disk.

Every bound has the same outer form

    lambda n L <= C * W * n^((alpha-1)/alpha) * exp(-W0(C * 2 ln(a_min)/alpha * n^(-1/alpha)))

and the regimes differ only in the constant ``C`` (the narrowband ``Phi``,
its band-averaged version, or the wideband ``Theta``), the rate ``W`` and
the absorption ``a_min`` entering the exponential.  Distances are in km, so
the disk radius is ``1/sqrt(pi)`` and its diameter ``2/sqrt(pi)``.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .channel import absorption_linear
from .errors import DomainError
from .lambertw import lambert_w0
from .numerics import adaptive_simpson, golden_section
from .waterfill import Band, HZ_PER_KHZ

SQRT_PI = math.sqrt(math.pi)
DIAMETER = 2.0 / SQRT_PI


class BoundResult(NamedTuple):
    transport_bound: float
    per_pair_bound: float
    phi_or_theta: float
    lambert_arg: float


@dataclass(frozen=True)
class NarrowbandScenario:
    n: float
    alpha: float
    beta: float
    w_rate: float
    a_f: float

    def __post_init__(self):
        _check_common(self.n, self.alpha, self.beta)
        if not self.w_rate > 0:
            raise DomainError("rate W must be > 0")
        if not self.a_f >= 1.0:
            raise DomainError(f"absorption a(f) must be >= 1, got {self.a_f}")


@dataclass(frozen=True)
class MultiBandScenario:
    n: float
    alpha: float
    beta: float
    delta_w: float
    band_absorptions: Sequence[float]

    def __post_init__(self):
        _check_common(self.n, self.alpha, self.beta)
        if len(self.band_absorptions) == 0:
            raise DomainError("at least one band is required")
        if min(self.band_absorptions) < 1.0:
            raise DomainError("band absorptions must be >= 1")

    @property
    def w_rate(self):
        return len(self.band_absorptions) * self.delta_w


@dataclass(frozen=True)
class DirectScenario:
    alpha: float
    beta: float
    delta_w: float
    per_band: Sequence[tuple]  # (a(f_m), n_m)

    @property
    def n(self):
        return sum(n_m for _, n_m in self.per_band)


@dataclass(frozen=True)
class WidebandScenario:
    n: float
    alpha: float
    band: Band
    beta_of_f: Callable
    absorption: Callable = field(default=absorption_linear)

    def __post_init__(self):
        _check_common(self.n, self.alpha, 1.0)


def _check_common(n, alpha, beta):
    if not n >= 1:
        raise DomainError(f"node count must be >= 1, got {n}")
    if not alpha >= 1.0:
        raise DomainError(f"spreading factor must be >= 1, got {alpha}")
    if not beta > 0:
        raise DomainError(f"SINR threshold must be > 0, got {beta}")


def _scaling_law(const, w_rate, n, alpha, a_min):
    arg = const * 2.0 * math.log(a_min) / alpha * n ** (-1.0 / alpha)
    transport = const * w_rate * n ** ((alpha - 1.0) / alpha) * math.exp(-lambert_w0(arg))
    return BoundResult(transport, transport / n, const, arg)


def phi_constant(alpha, beta, mean_a_pow):
    """``2^(1/a)/sqrt(pi) * ((beta+1)/beta * mean_a_pow)^(1/a)``.

    ``mean_a_pow`` is ``a(f)^(2/sqrt(pi))`` for one band or its average over
    several bands.
    """
    return 2.0 ** (1.0 / alpha) / SQRT_PI * ((beta + 1.0) / beta * mean_a_pow) ** (1.0 / alpha)


def bound_fixed_narrowband(sc):
    """Bound for every node sharing one narrow band with absorption ``a_f``."""
    phi = phi_constant(sc.alpha, sc.beta, sc.a_f ** (2.0 / SQRT_PI))
    return _scaling_law(phi, sc.w_rate, sc.n, sc.alpha, sc.a_f)


def bound_multiband(sc):
    """Bound for multi-hop traffic spread over disjoint equal-rate bands."""
    a = np.asarray(sc.band_absorptions, dtype=float)
    phi = phi_constant(sc.alpha, sc.beta, float(np.mean(a ** (2.0 / SQRT_PI))))
    return _scaling_law(phi, sc.w_rate, sc.n, sc.alpha, float(a.min()))


def bound_direct_per_band(sc):
    """One single-hop bound per band, each with its own node count.

    Bands without transmitters get an all-zero result.
    """
    out = []
    for a_m, n_m in sc.per_band:
        if n_m < 0:
            raise DomainError("per-band node counts must be >= 0")
        if n_m == 0:
            out.append(BoundResult(0.0, 0.0, phi_constant(sc.alpha, sc.beta, a_m ** (2.0 / SQRT_PI)), 0.0))
            continue
        out.append(bound_fixed_narrowband(NarrowbandScenario(n_m, sc.alpha, sc.beta, sc.delta_w, a_m)))
    return out


def _vector_beta(beta_of_f, f):
    b = np.broadcast_to(np.asarray(beta_of_f(f), dtype=float), np.shape(f))
    if np.any(~(b > 0)):
        raise DomainError("beta(f) must be > 0 over the band")
    return b


def wideband_rate(band, beta_of_f):
    """Rate over the band, bps: the integral of ``log2(1 + beta(f))``."""
    integral = adaptive_simpson(lambda f: np.log2(1.0 + _vector_beta(beta_of_f, f)), band.f_min, band.f_max)
    return HZ_PER_KHZ * integral


def min_absorption(band, absorption=absorption_linear):
    """Smallest absorption over the band and where it occurs."""
    grid = np.linspace(band.f_min, band.f_max, 65)
    vals = np.broadcast_to(np.asarray(absorption(grid), dtype=float), grid.shape)
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    f_min, a_min = golden_section(lambda f: float(absorption(f)), lo, hi, rtol=1e-12)
    return f_min, a_min


def bound_wideband(sc):
    """Bound when every node uses a wide band with frequency-dependent SINR."""
    alpha = sc.alpha
    w_rate = wideband_rate(sc.band, sc.beta_of_f)

    def weighted(f):
        b = _vector_beta(sc.beta_of_f, f)
        a = np.broadcast_to(np.asarray(sc.absorption(f), dtype=float), np.shape(f))
        return (b + 1.0) / b * a ** (2.0 / SQRT_PI) * np.log2(1.0 + b)

    mean = HZ_PER_KHZ * adaptive_simpson(weighted, sc.band.f_min, sc.band.f_max) / w_rate
    theta = 2.0 ** (1.0 / alpha) / SQRT_PI * mean ** (1.0 / alpha)
    _, a_min = min_absorption(sc.band, sc.absorption)
    return _scaling_law(theta, w_rate, sc.n, alpha, a_min)


class CurveRow(NamedTuple):
    a_f: float
    n: float
    per_pair_bound: float
    transport_bound: float


def bound_curve(a_values, n_values, *, alpha=1.0, beta=2.0, w_rate=1.0):
    """Per-pair and transport bounds over a grid, ordered by ``(a_f, n)``."""
    if any(not n >= 1 for n in n_values):
        raise DomainError("node counts must be >= 1")
    rows = []
    for a_f in sorted(a_values):
        for n in sorted(n_values):
            r = bound_fixed_narrowband(NarrowbandScenario(n, alpha, beta, w_rate, a_f))
            rows.append(CurveRow(float(a_f), float(n), r.per_pair_bound, r.transport_bound))
    return rows
