"""Principal branch of the Lambert W function on the non-negative reals."""

import math

from .errors import DomainError, NumericalError


def lambert_w0(x, *, rtol=1e-15, maxiter=50):
    """Return ``w >= 0`` with ``w * exp(w) = x`` for ``x >= 0``.

    Halley iteration from a series seed (``x <= e``) or the asymptotic seed
    ``ln x - ln ln x`` (``x > e``).  Converges in a handful of steps to near
    machine precision.
    """
    x = float(x)
    if not x >= 0.0:
        raise DomainError(f"lambert_w0 is only defined here for x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    if x <= math.e:
        # W(x) = x - x^2 + 1.5 x^3 - ... is only good near zero; the
        # rational blend below keeps the seed inside (0, 1] on [0, e]
        w = x / (1.0 + x) if x > 0.25 else x * (1.0 - x + 1.5 * x * x)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    for _ in range(maxiter):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= rtol * abs(w):
            return w
    raise NumericalError(f"Halley iteration for W0({x}) did not converge")
