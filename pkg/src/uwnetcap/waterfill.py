"""Single-link waterfilling against the ``A(l, f) N(f)`` floor.

For a water level ``K`` the optimal band is ``{f : A N < K}``, the signal
psd there is ``K - A N``, and

    capacity = int_band log2(K / (A N)) df      [bps]
    power    = int_band (K - A N) df            [uPa^2]

Frequencies are in kHz, so both integrals carry a factor ``HZ_PER_KHZ``.
The water level is handled through ``ln K`` internally because ``A N``
spans hundreds of decades over the frequency domain.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import channel
from .errors import DomainError, NumericalError
from .numerics import adaptive_simpson, bisect

HZ_PER_KHZ = 1000.0
LN2 = math.log(2.0)


class NarrowbandRegimeWarning(UserWarning):
    """The quadratic model of ``A N`` is off by more than 20% across the band."""


class Band(NamedTuple):
    f_min: float
    f_max: float

    @property
    def width(self):
        return self.f_max - self.f_min

    @property
    def center(self):
        return 0.5 * (self.f_min + self.f_max)

    def contains(self, f):
        return self.f_min <= f <= self.f_max


@dataclass(frozen=True)
class WaterfillSolution:
    distance: float
    ln_k_level: float
    bands: tuple
    power: float
    capacity: float
    narrowband: bool
    clipped: bool = False

    @property
    def k_level(self):
        return math.exp(self.ln_k_level)

    @property
    def bandwidth(self):
        return sum(b.width for b in self.bands)

    def to_dict(self):
        return {
            "distance_km": self.distance,
            "k_level": self.k_level,
            "ln_k_level": self.ln_k_level,
            "bands": [[b.f_min, b.f_max] for b in self.bands],
            "power": self.power,
            "capacity": self.capacity,
            "narrowband": self.narrowband,
            "clipped": self.clipped,
        }


class _Link:
    """Cached view of one link distance: grid scan and minimizer."""

    grid_points = 1024

    def __init__(self, l, params):
        if not l > 0:
            raise DomainError(f"distance must be > 0, got {l}")
        self.l = float(l)
        self.params = params
        self.center = channel.center_frequency_info(self.l, params)
        grid = np.geomspace(params.f_lo, params.f_hi, self.grid_points)
        # the minimizer must be on the grid or narrow bands around it are missed
        grid = np.unique(np.append(grid, self.center.f_c))
        self.grid = grid
        self.ln_grid = np.asarray(channel.ln_an_product(self.l, grid, params))
        self.ln_min = min(self.center.ln_an_min, float(self.ln_grid.min()))

    def ln_an(self, f):
        return channel.ln_an_product(self.l, f, self.params)

    def bands(self, ln_k):
        """Maximal intervals where ``ln A N < ln K``, edges found by bisection."""
        below = self.ln_grid < ln_k
        if not below.any():
            return ()
        idx = np.flatnonzero(below)
        # split the indices into runs of consecutive grid points
        breaks = np.flatnonzero(np.diff(idx) > 1)
        starts = np.concatenate([[idx[0]], idx[breaks + 1]])
        stops = np.concatenate([idx[breaks], [idx[-1]]])
        g = lambda f: self.ln_an(f) - ln_k
        out = []
        last = len(self.grid) - 1
        for i, j in zip(starts, stops):
            lo = self.params.f_lo if i == 0 else bisect(g, self.grid[i - 1], self.grid[i])
            hi = self.params.f_hi if j == last else bisect(g, self.grid[j], self.grid[j + 1])
            if hi > lo:
                out.append(Band(float(lo), float(hi)))
        return tuple(out)

    def is_clipped(self, bands):
        return any(b.f_min <= self.params.f_lo or b.f_max >= self.params.f_hi for b in bands)

    def capacity(self, ln_k, bands=None):
        if bands is None:
            bands = self.bands(ln_k)
        integrand = lambda f: np.maximum(ln_k - self.ln_an(f), 0.0) / LN2
        return HZ_PER_KHZ * sum(adaptive_simpson(integrand, b.f_min, b.f_max) for b in bands)

    def power(self, ln_k, bands=None):
        if bands is None:
            bands = self.bands(ln_k)
        k = math.exp(ln_k)
        integrand = lambda f: np.maximum(-np.expm1(self.ln_an(f) - ln_k), 0.0)
        return HZ_PER_KHZ * k * sum(adaptive_simpson(integrand, b.f_min, b.f_max) for b in bands)

    def solve(self, measure, target, rtol):
        """Find ``ln K`` where the increasing ``measure(ln K)`` equals ``target``.

        The excess ``t = ln K - ln min`` is bracketed starting from
        ``[0, 64 ln 2]``, doubling the upper end until the measure exceeds
        the target, then bisected.
        """
        lo, hi = 0.0, 64.0 * LN2
        while measure(self.ln_min + hi) < target:
            lo, hi = hi, 2.0 * hi
            if hi > 1e6:
                raise NumericalError("water level could not be bracketed")
        for _ in range(400):
            mid = 0.5 * (lo + hi)
            val = measure(self.ln_min + mid)
            if abs(val - target) <= rtol * target:
                return self.ln_min + mid
            if val < target:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * max(hi, 1e-300):
                return self.ln_min + mid
        raise NumericalError("water level bisection did not converge")

    def solution(self, ln_k):
        bands = self.bands(ln_k)
        power = self.power(ln_k, bands)
        capacity = self.capacity(ln_k, bands)
        return WaterfillSolution(
            distance=self.l,
            ln_k_level=ln_k,
            bands=bands,
            power=power,
            capacity=capacity,
            narrowband=self._narrowband(bands, power),
            clipped=self.is_clipped(bands),
        )

    def _narrowband(self, bands, power):
        if len(bands) != 1 or power <= 0 or self.center.at_boundary:
            return False
        try:
            curvature = channel.an_second_derivative(self.l, self.params)
        except NumericalError:
            return False
        approx = HZ_PER_KHZ * curvature * bands[0].width ** 3 / 12.0
        return abs(approx - power) <= 0.2 * power

    def zero(self):
        return WaterfillSolution(self.l, self.ln_min, (), 0.0, 0.0, narrowband=True, clipped=self.center.at_boundary)


def capacity_given_k(l, k_level, params):
    """Capacity (bps) and optimal bands for water level ``k_level``.

    A level at or below the minimum of ``A N`` gives zero capacity and no band.
    """
    link = _Link(l, params)
    ln_k = math.log(k_level) if k_level > 0 else -math.inf
    if ln_k <= link.ln_min:
        return 0.0, ()
    bands = link.bands(ln_k)
    return link.capacity(ln_k, bands), bands


def solve_for_capacity(l, target_c, params, *, rtol=1e-9):
    """Water level, band and power needed to carry ``target_c`` bps over ``l`` km."""
    if not target_c >= 0:
        raise DomainError(f"target capacity must be >= 0, got {target_c}")
    link = _Link(l, params)
    if target_c == 0:
        return link.zero()
    ln_k = link.solve(link.capacity, target_c, rtol)
    return link.solution(ln_k)


def solve_for_power(l, budget_p, params, *, rtol=1e-9):
    """Capacity-optimal allocation of a power budget over a link of ``l`` km."""
    if not budget_p >= 0:
        raise DomainError(f"power budget must be >= 0, got {budget_p}")
    link = _Link(l, params)
    if budget_p == 0:
        return link.zero()
    ln_k = link.solve(link.power, budget_p, rtol)
    return link.solution(ln_k)


def solve_for_bandwidth(l, delta_f, params, *, rtol=1e-12):
    """Waterfilling solution whose total band width equals ``delta_f`` kHz."""
    if not delta_f > 0:
        raise DomainError(f"bandwidth must be > 0, got {delta_f}")
    link = _Link(l, params)
    width = lambda ln_k: sum(b.width for b in link.bands(ln_k))
    if delta_f >= params.f_hi - params.f_lo:
        raise DomainError("bandwidth exceeds the frequency domain")
    ln_k = link.solve(width, delta_f, rtol)
    return link.solution(ln_k)


def narrowband_power(l, delta_f, params, *, max_error=0.2):
    """Low-power approximation ``Upsilon * delta_f^3 / 12`` of the transmit power.

    Warns with ``NarrowbandRegimeWarning`` when the quadratic model of
    ``A N`` at the band edges ``f_c +- delta_f/2`` is off by more than
    ``max_error`` relative to the quadratic rise.
    """
    if not delta_f > 0:
        raise DomainError(f"bandwidth must be > 0, got {delta_f}")
    info = channel.center_frequency_info(l, params)
    curvature = channel.an_second_derivative(l, params)
    half = 0.5 * delta_f
    rise_model = 0.5 * curvature * half * half
    for f in (info.f_c - half, info.f_c + half):
        if f <= 0:
            rise = math.inf
        else:
            rise = math.exp(channel.ln_an_product(l, f, params)) - info.an_min
        if abs(rise - rise_model) > max_error * rise_model:
            warnings.warn(
                f"delta_f={delta_f} kHz is outside the narrowband regime at l={l} km",
                NarrowbandRegimeWarning,
                stacklevel=2,
            )
            break
    return HZ_PER_KHZ * curvature * delta_f**3 / 12.0
