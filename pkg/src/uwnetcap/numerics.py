"""Small root-finding, minimization and quadrature routines.

Everything here works on plain callables.  ``adaptive_simpson`` expects a
vectorized integrand (numpy array in, array out) so that each refinement
level costs a single call.
"""

import math

import numpy as np

from .errors import NumericalError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(func, lo, hi, *, xtol=0.0, rtol=4e-16, maxiter=200):
    """Find a sign change of ``func`` on ``[lo, hi]`` by bisection.

    Iterates until the bracket is narrower than ``xtol + rtol*|x|`` or can no
    longer be split in floating point.  Returns the midpoint of the final
    bracket.
    """
    f_lo = func(lo)
    f_hi = func(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise NumericalError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if hi - lo <= xtol + rtol * abs(mid):
            break
        f_mid = func(mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section(func, lo, hi, *, rtol=1e-6, maxiter=200):
    """Minimize a unimodal ``func`` on ``[lo, hi]``.

    Stops once the bracket width falls below ``rtol`` times the current
    abscissa.  Returns ``(x_min, f_min)``.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(maxiter):
        if b - a <= rtol * 0.5 * abs(a + b):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = func(d)
    # include the bracket ends: the minimum may sit on a domain boundary
    cand = [(fc, c), (fd, d), (func(a), a), (func(b), b)]
    f_best, x_best = min(cand)
    return x_best, f_best


def adaptive_simpson(func, a, b, *, rtol=1e-9, atol=0.0, max_levels=50):
    """Integrate a vectorized ``func`` over ``[a, b]`` with adaptive Simpson.

    All intervals still in need of refinement are processed together, one
    level at a time.  An interval is accepted when the Richardson difference
    between its one- and two-panel Simpson estimates is below its share
    (proportional to its width) of the global tolerance
    ``max(atol, rtol*|I|)``.  The accepted estimates carry the usual
    ``(S2 - S1)/15`` correction.
    """
    if b == a:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    width = b - a

    # seed with 8 panels so that features narrower than the interval are seen
    edges = np.linspace(a, b, 9)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    f_lo, f_mid, f_hi = func(lo), func(mid), func(hi)
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)

    total = 0.0
    for _ in range(max_levels):
        q1 = 0.5 * (lo + mid)
        q3 = 0.5 * (mid + hi)
        f_q1, f_q3 = func(q1), func(q3)
        h = (hi - lo) / 12.0
        left = h * (f_lo + 4.0 * f_q1 + f_mid)
        right = h * (f_mid + 4.0 * f_q3 + f_hi)
        refined = left + right
        err = (refined - whole) / 15.0

        estimate = total + float(np.sum(refined + err))
        tol = max(atol, rtol * abs(estimate))
        share = tol * (hi - lo) / width
        done = np.abs(err) <= share
        total += float(np.sum((refined + err)[done]))
        keep = ~done
        if not keep.any():
            return sign * total

        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        q1, q3 = q1[keep], q3[keep]
        f_lo, f_mid, f_hi = f_lo[keep], f_mid[keep], f_hi[keep]
        f_q1, f_q3 = f_q1[keep], f_q3[keep]
        left, right = left[keep], right[keep]
        # split each remaining interval into its two halves
        lo, mid, hi = np.concatenate([lo, mid]), np.concatenate([q1, q3]), np.concatenate([mid, hi])
        f_lo, f_mid, f_hi = (
            np.concatenate([f_lo, f_mid]),
            np.concatenate([f_q1, f_q3]),
            np.concatenate([f_mid, f_hi]),
        )
        whole = np.concatenate([left, right])
    raise NumericalError("adaptive Simpson did not converge")
