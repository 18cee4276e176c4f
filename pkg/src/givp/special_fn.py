"""Integer-order Bessel functions of the first kind, J_n(x), for real x.

Two evaluation routes share the public entry points:

* the ascending power series, used for small arguments;
* Miller's downward recurrence normalized by ``J_0 + 2 * sum J_2k = 1``,
  used once the series would lose digits to cancellation.

:func:`bessel_j_oracle` is a separate, slow route: the same ascending series
summed in 50-digit arithmetic with mpmath. Tests compare the two.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

from .errors import ContractViolation, RangeError

__all__ = [
    "SERIES_LIMIT",
    "MAX_ORDER",
    "bessel_j",
    "bessel_j_orders",
    "bessel_j_oracle",
]

# Series is used for |x| <= SERIES_LIMIT; above it the downward recurrence.
SERIES_LIMIT = 8.0
# Soft ceiling on the order accepted by the controller configuration.
MAX_ORDER = 64

_ORACLE_DPS = 50
_RESCALE = 1e250


def _check_order(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ContractViolation(f"Bessel order must be a non-negative integer, got {n!r}")
    return int(n)


def _check_arg(x) -> float:
    try:
        x = float(x)
    except (TypeError, ValueError) as exc:
        raise ContractViolation(f"Bessel argument must be real, got {x!r}") from exc
    if not math.isfinite(x):
        raise ContractViolation(f"Bessel argument must be finite, got {x!r}")
    return x


def _series(n: int, x: float) -> float:
    """Ascending series for x >= 0 in double precision."""
    half = 0.5 * x
    term = 1.0
    for k in range(1, n + 1):
        term *= half / k
    if term == 0.0:
        return 0.0
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (n + k))
        total += term
        if abs(term) <= 1e-17 * abs(total) and k * (n + k) > half * half:
            return total


def _series_orders(n_max: int, x: float) -> list[float]:
    """J_0..J_{n_max} at 0 < x <= SERIES_LIMIT.

    Seeds J_{n_max+1}, J_{n_max} from the series and recurs downward, which
    is stable for the minimal solution. Falls back to one series per order
    when the seeds are too close to underflow.
    """
    upper = _series(n_max + 1, x)
    out = [0.0] * (n_max + 2)
    out[n_max + 1] = upper
    out[n_max] = _series(n_max, x)
    if max(abs(upper), abs(out[n_max])) < 1e-250:
        return [_series(k, x) for k in range(n_max + 1)]
    two_over_x = 2.0 / x
    for k in range(n_max, 0, -1):
        out[k - 1] = k * two_over_x * out[k] - out[k + 1]
    return out[:-1]


def _miller(n_max: int, x: float) -> list[float]:
    """J_0..J_{n_max} at x > 0 by normalized downward recurrence."""
    top = max(n_max, int(x))
    start = top + 20 + int(4.0 * math.sqrt(top))
    start += start % 2
    out = [0.0] * (n_max + 1)
    j_next, j_cur = 0.0, 1e-30
    norm = 0.0
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        j_prev = k * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds the unnormalized J_{k-1}
        if k - 1 <= n_max:
            out[k - 1] = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        if abs(j_cur) > _RESCALE:
            j_cur /= _RESCALE
            j_next /= _RESCALE
            norm /= _RESCALE
            for i in range(k - 1, n_max + 1):
                out[i] /= _RESCALE
    norm += j_cur
    return [v / norm for v in out]


def bessel_j(n: int, x: float) -> float:
    """J_n(x) for integer ``n >= 0`` and finite real ``x``.

    Parity ``J_n(-x) = (-1)^n J_n(x)`` is applied exactly, so only the
    non-negative half-line is evaluated.
    """
    n = _check_order(n)
    x = _check_arg(x)
    ax = abs(x)
    if ax == 0.0:
        return 1.0 if n == 0 else 0.0
    if ax <= SERIES_LIMIT:
        value = _series(n, ax)
    else:
        value = _miller(n, ax)[n]
    return -value if (x < 0 and n % 2) else value


def bessel_j_orders(n_max: int, x: float) -> np.ndarray:
    """Array ``[J_0(x), ..., J_{n_max}(x)]``; one recurrence serves all orders."""
    n_max = _check_order(n_max)
    x = _check_arg(x)
    ax = abs(x)
    if ax == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    if ax <= SERIES_LIMIT:
        out = np.array(_series_orders(n_max, ax))
    else:
        out = np.array(_miller(n_max, ax))
    if x < 0:
        out[1::2] = -out[1::2]
    return out


def bessel_j_oracle(n: int, x: float, terms: int) -> float:
    """Partial sum of the first ``terms`` terms of the ascending series.

    Accumulates term ratios in 50-digit precision, so no factorial is ever
    formed. Slow; intended as a reference value for tests.
    """
    n = _check_order(n)
    x = _check_arg(x)
    if isinstance(terms, bool) or int(terms) != terms or terms < 1:
        raise ContractViolation(f"terms must be a positive integer, got {terms!r}")
    with mpmath.workdps(_ORACLE_DPS):
        half = mpmath.mpf(x) / 2
        term = mpmath.mpf(1)
        for k in range(1, n + 1):
            term = term * half / k
        total = term
        q = -half * half
        for k in range(1, int(terms)):
            term = term * q / (k * (n + k))
            total += term
        if not mpmath.isfinite(total):
            raise RangeError(f"oracle series overflowed for n={n}, x={x}")
        value = float(total)
    if not math.isfinite(value):
        raise RangeError(f"oracle value for n={n}, x={x} is outside the float range")
    return value
