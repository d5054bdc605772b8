"""Underwater acoustic channel: absorption, ambient noise and path loss.

Units throughout: frequency in kHz, distance in km, absorption in dB/km (or
its linear per-km factor), noise psd in dB re uPa^2/Hz (or linear uPa^2/Hz).

The product ``A(l, f) N(f)`` spans hundreds of decades over the default band
(``a(f)^l`` alone reaches 10^500 at 200 kHz and 100 km), so every search in
this package works on its natural logarithm, ``ln_an_product``.  The linear
``an_product`` saturates to ``inf`` where the value exceeds the float range.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NumericalError
from .numerics import golden_section

LN10 = math.log(10.0)


@dataclass(frozen=True)
class ChannelParams:
    """Physical environment of a link.

    Attributes
    ----------
    alpha : float
        Spreading factor (1 cylindrical, 2 spherical).  Values in
        ``[1, 2]`` are the physically usual range; anything ``>= 1`` is
        accepted, see ``alpha_in_usual_range``.
    shipping : float
        Shipping activity in ``[0, 1]``.
    wind : float
        Wind speed in m/s.
    l_ref : float
        Reference distance in km.
    f_lo, f_hi : float
        Frequency interval, kHz, searched for optimal bands.
    """

    alpha: float = 1.5
    shipping: float = 0.5
    wind: float = 0.0
    l_ref: float = 0.001
    f_lo: float = 0.1
    f_hi: float = 200.0

    def __post_init__(self):
        if not self.alpha >= 1.0:
            raise DomainError(f"spreading factor must be >= 1, got {self.alpha}")
        if not 0.0 <= self.shipping <= 1.0:
            raise DomainError(f"shipping activity must lie in [0, 1], got {self.shipping}")
        if not self.wind >= 0.0:
            raise DomainError(f"wind speed must be >= 0, got {self.wind}")
        if not self.l_ref > 0.0:
            raise DomainError(f"reference distance must be > 0, got {self.l_ref}")
        if not 0.0 < self.f_lo < self.f_hi:
            raise DomainError(f"need 0 < f_lo < f_hi, got [{self.f_lo}, {self.f_hi}]")

    @property
    def alpha_in_usual_range(self):
        return 1.0 <= self.alpha <= 2.0

    @property
    def f_domain(self):
        return (self.f_lo, self.f_hi)


def _positive(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} must be > 0")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def absorption_db_per_km(f):
    """Thorp absorption in dB/km for frequency ``f`` in kHz."""
    f = _positive(f, "frequency")
    f2 = f * f
    return _out(0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003)


def absorption_linear(f):
    """Per-km absorption factor ``a(f) = 10^(a_dB/10)``; always >= 1."""
    with np.errstate(over="ignore"):
        return _out(10.0 ** (np.asarray(absorption_db_per_km(f)) / 10.0))


def noise_components_db(f, params):
    """Turbulence, shipping, wind and thermal noise psd in dB re uPa^2/Hz.

    Returns a dict of arrays (or floats) keyed by component name.
    """
    f = _positive(f, "frequency")
    lf = np.log10(f)
    comps = {
        "turbulence": 17.0 - 30.0 * lf,
        "shipping": 40.0 + 20.0 * (params.shipping - 0.5) + 26.0 * lf - 60.0 * np.log10(f + 0.03),
        "wind": 50.0 + 7.5 * math.sqrt(params.wind) + 20.0 * lf - 40.0 * np.log10(f + 0.4),
        "thermal": -15.0 + 20.0 * lf,
    }
    return {k: _out(v) for k, v in comps.items()}


def ln_noise_psd(f, params):
    comps = noise_components_db(f, params)
    stacked = np.stack([np.asarray(v) * (LN10 / 10.0) for v in comps.values()])
    return _out(np.logaddexp.reduce(stacked, axis=0))


def noise_psd(f, params):
    """Total ambient noise psd, linear uPa^2/Hz (sum of the four components)."""
    return _out(np.exp(np.asarray(ln_noise_psd(f, params))))


def noise_psd_db(f, params):
    return _out(np.asarray(ln_noise_psd(f, params)) * (10.0 / LN10))


def ln_attenuation(l, f, params):
    l = _positive(l, "distance")
    a_db = np.asarray(absorption_db_per_km(f))
    return _out(params.alpha * np.log(l / params.l_ref) + l * a_db * (LN10 / 10.0))


def attenuation(l, f, params):
    """Path loss ``(l/l_ref)^alpha * a(f)^l``; ``inf`` beyond float range."""
    with np.errstate(over="ignore"):
        return _out(np.exp(np.asarray(ln_attenuation(l, f, params))))


def ln_an_product(l, f, params):
    """Natural log of ``A(l, f) N(f)``."""
    return _out(np.asarray(ln_attenuation(l, f, params)) + np.asarray(ln_noise_psd(f, params)))


def an_product(l, f, params):
    with np.errstate(over="ignore"):
        return _out(np.exp(np.asarray(ln_an_product(l, f, params))))


class CenterFrequency(NamedTuple):
    f_c: float
    ln_an_min: float
    at_boundary: bool

    @property
    def an_min(self):
        return math.exp(self.ln_an_min)


def center_frequency_info(l, params, *, grid_points=256, rtol=1e-6):
    """Locate the minimizer of ``A(l, f) N(f)`` over the frequency domain.

    A log-spaced scan picks the best grid cell, then golden-section search
    refines inside the two neighbouring cells.  ``at_boundary`` is set when
    the minimizer sits on ``f_lo`` or ``f_hi``: the true optimum is then
    outside the domain and any band built around it gets clipped.
    """
    l = float(_positive(l, "distance"))
    f_lo, f_hi = params.f_domain
    grid = np.geomspace(f_lo, f_hi, grid_points)
    values = np.asarray(ln_an_product(l, grid, params))
    i = int(np.argmin(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_points - 1)]
    f_c, v = golden_section(lambda f: ln_an_product(l, f, params), lo, hi, rtol=rtol * 0.1)
    at_boundary = f_c <= f_lo * (1 + rtol) or f_c >= f_hi * (1 - rtol)
    return CenterFrequency(float(f_c), float(v), bool(at_boundary))


def optimal_center_frequency(l, params):
    """Frequency (kHz) minimizing ``A(l, f) N(f)`` for link distance ``l`` km."""
    return center_frequency_info(l, params).f_c


def an_second_derivative(l, params, *, h0=None, max_halvings=30):
    """Curvature of ``A(l, f) N(f)`` in f at the optimal center frequency.

    Central differences with the step halved until two successive estimates
    agree to 4 significant digits; the last pair is Richardson-extrapolated.
    Units: linear psd per kHz^2.
    """
    info = center_frequency_info(l, params)
    if info.at_boundary:
        raise NumericalError(f"minimizer at domain boundary for l={l}; curvature undefined")
    f_c = info.f_c
    ln_min = info.ln_an_min
    # relative form: d2/df2 exp(g) = exp(g) * g'' at a stationary point, but
    # differencing exp(g - g_min) keeps the full derivative without overflow
    def rel(f):
        return math.exp(ln_an_product(l, f, params) - ln_min)

    h = h0 if h0 is not None else 0.05 * f_c
    center = rel(f_c)
    prev = None
    for _ in range(max_halvings):
        est = (rel(f_c + h) - 2.0 * center + rel(f_c - h)) / (h * h)
        if prev is not None and abs(est - prev) <= 0.5e-4 * abs(est):
            if est <= 0:
                break
            # Richardson step: the central difference error is O(h^2)
            return (est + (est - prev) / 3.0) * math.exp(ln_min)
        prev = est
        h *= 0.5
    if prev is not None and prev <= 0:
        raise NumericalError(f"non-positive curvature at f_c for l={l}")
    raise NumericalError(f"curvature estimate did not settle for l={l}")
