"""Capacity scaling bounds and channel models for underwater acoustic networks."""

from .bands import BandPlan, assign_band, band_counts, make_plan
from .bounds import (
    BoundResult,
    DirectScenario,
    MultiBandScenario,
    NarrowbandScenario,
    WidebandScenario,
    bound_curve,
    bound_direct_per_band,
    bound_fixed_narrowband,
    bound_multiband,
    bound_wideband,
)
from .channel import (
    ChannelParams,
    absorption_db_per_km,
    absorption_linear,
    an_product,
    an_second_derivative,
    attenuation,
    noise_psd,
    optimal_center_frequency,
)
from .errors import DerivationViolation, DomainError, NumericalError, OutOfPlanError
from .lambertw import lambert_w0
from .waterfill import (
    Band,
    WaterfillSolution,
    capacity_given_k,
    narrowband_power,
    solve_for_capacity,
    solve_for_power,
)

__version__ = "0.1.0"
