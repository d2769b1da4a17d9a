"""Zeroth-order Bessel function of the first kind.

Used for the fading autocorrelation coefficient J0(2*pi*f_d*tau); in practice
the argument is near zero (slow pedestrian Doppler), but the implementation
holds |error| <= 1e-10 over |x| <= 50.
"""

from __future__ import annotations

import math

# Power series below this, Hankel asymptotic expansion above. The series
# loses ~x digits of cancellation and the asymptotic series bottoms out
# around exp(-2x); 12 balances both at ~1e-12 worst case.
_SWITCH = 12.0


def _j0_series(x: float) -> float:
    # J0(x) = sum_m (-1)^m (x^2/4)^m / (m!)^2
    q = x * x / 4.0
    term = 1.0
    total = 1.0
    for m in range(1, 200):
        term *= -q / (m * m)
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            break
    return total


def _j0_asymptotic(x: float) -> float:
    # Hankel expansion: J0(x) = sqrt(2/(pi x)) [P(x) cos(x - pi/4) - Q(x) sin(x - pi/4)]
    # with P, Q asymptotic series in 1/(8x); summed until terms stop shrinking.
    z = 8.0 * x
    p, q = 1.0, 0.0
    term = 1.0
    k = 0
    while True:
        # |a_k| = |a_{k-1}| * (2k-1)^2 / (8x k); odd k feeds Q, even k feeds P,
        # with signs -,-,+,+,-,-,... (the i^k cycle of the Hankel series)
        k += 1
        new = term * (2 * k - 1) ** 2 / (z * k)
        if abs(new) >= abs(term) or k > 60:
            break
        term = new
        sign = -1.0 if ((k + 1) // 2) % 2 == 1 else 1.0
        if k % 2 == 1:
            q += sign * term
        else:
            p += sign * term
        if abs(term) < 1e-17:
            break
    chi = x - math.pi / 4.0
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_j0(x: float) -> float:
    """J0(x) with absolute error <= 1e-10 on |x| <= 50."""
    if not math.isfinite(x):
        raise ValueError(f"bessel_j0 requires finite x, got {x}")
    ax = abs(x)
    if ax < _SWITCH:
        return _j0_series(ax)
    return _j0_asymptotic(ax)
