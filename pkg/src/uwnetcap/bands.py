"""Distance-to-band mapping for low-power links.

The system band is cut into equal non-overlapping bands; a link of length
``l`` is assigned the band holding its optimal center frequency ``f_c(l)``.
Long links land in low bands, short links in high ones, and links in
different bands do not interfere.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .channel import optimal_center_frequency
from .errors import DomainError, OutOfPlanError
from .waterfill import Band


class BandClampWarning(UserWarning):
    """A center frequency fell outside the plan and was clamped to an edge band."""


@dataclass(frozen=True)
class BandPlan:
    bands: tuple
    delta_f: float

    @property
    def f_lo(self):
        return self.bands[0].f_min

    @property
    def f_hi(self):
        return self.bands[-1].f_max

    def __len__(self):
        return len(self.bands)

    def centers(self):
        return [b.center for b in self.bands]

    def index_of(self, f):
        """Index of the band holding ``f``: half-open ``[f_min, f_max)``, top band closed."""
        if not self.f_lo <= f <= self.f_hi:
            raise OutOfPlanError(f"{f} kHz is outside the plan [{self.f_lo}, {self.f_hi}]")
        if f == self.f_hi:
            return len(self.bands) - 1
        edges = [b.f_min for b in self.bands]
        return int(np.searchsorted(edges, f, side="right")) - 1

    def to_dict(self):
        return {"f_lo": self.f_lo, "f_hi": self.f_hi, "delta_f": self.delta_f}


def make_plan(f_lo, f_hi, delta_f):
    """Split ``[f_lo, f_hi]`` kHz into contiguous bands of width ``delta_f``.

    The last band takes the remainder when the width does not divide the
    interval.
    """
    if not (0 <= f_lo < f_hi):
        raise DomainError(f"need 0 <= f_lo < f_hi, got [{f_lo}, {f_hi}]")
    span = f_hi - f_lo
    if not 0 < delta_f <= span:
        raise DomainError(f"need 0 < delta_f <= {span}, got {delta_f}")
    # tolerate rounding in span/delta_f, e.g. 0.3/0.1 = 2.9999999999999996
    count = math.ceil(span / delta_f - 1e-9)
    edges = [f_lo + i * delta_f for i in range(count)] + [f_hi]
    return BandPlan(tuple(Band(a, b) for a, b in zip(edges[:-1], edges[1:])), float(delta_f))


def assign_band(l, plan, params, *, clamp=False):
    """Index of the band containing ``f_c(l)`` for a link of ``l`` km.

    With ``clamp=True`` a center frequency outside the plan maps to the
    nearest edge band and a ``BandClampWarning`` is issued; otherwise it
    raises ``OutOfPlanError``.
    """
    return band_of_frequency(optimal_center_frequency(l, params), plan, clamp=clamp)


def band_of_frequency(f_c, plan, *, clamp=False):
    if clamp and not plan.f_lo <= f_c <= plan.f_hi:
        warnings.warn(f"f_c={f_c} kHz outside plan, clamped", BandClampWarning, stacklevel=3)
        return 0 if f_c < plan.f_lo else len(plan) - 1
    return plan.index_of(f_c)


def band_counts(distances, plan, params, *, clamp=False):
    """Number of links assigned to each band of ``plan``."""
    counts = [0] * len(plan)
    for l in distances:
        counts[assign_band(l, plan, params, clamp=clamp)] += 1
    return counts
