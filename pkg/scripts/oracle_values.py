"""Compute the reference numbers frozen into the test suite.

Each value comes from a route that shares no code with the package's
fast path: mpmath Bessel functions, exact rational arithmetic, adaptive
quadrature of the closed-form heading, and a 1-D sweep over theta.

    python scripts/oracle_values.py
"""

import math
from fractions import Fraction

import mpmath
from scipy.integrate import quad

mpmath.mp.dps = 40


def bessel_values():
    for n, x in [(1, 1.0), (1, 0.5), (0, 1.0), (5, 2.0), (10, 20.0)]:
        print(f"J_{n}({x}) = {float(mpmath.besselj(n, x))!r}")


def rk4_linear_step():
    # RK4 on x' = -x from x = 1 with h = 1/10 reduces to the degree-4 Taylor polynomial
    h = Fraction(1, 10)
    value = 1 - h + h**2 / 2 - h**3 / 6 + h**4 / 24
    print(f"RK4 step of x'=-x, h=0.1: {value} = {float(value)!r}")


def u1(theta, N=5, a=-1.0, C=None):
    C = C or [1.0] * N
    return sum((2 * i + 1) * a * C[i - 1] * float(mpmath.besselj(i, theta)) * theta ** (i + 1)
               for i in range(1, N + 1))


def remapped_displacement(t_end=10.0, a=-1.0):
    """(x, y) motion from (3, 4, 0) once theta(0) is remapped to 2*pi.

    theta(t) = 2*pi*exp(a t) exactly, so x and y are plain integrals.
    """
    theta = lambda t: 2 * math.pi * math.exp(a * t)
    opts = dict(limit=400, epsabs=1e-12, epsrel=1e-13)
    dx, _ = quad(lambda t: math.cos(theta(t)) * u1(theta(t)), 0.0, t_end, **opts)
    dy, _ = quad(lambda t: math.sin(theta(t)) * u1(theta(t)), 0.0, t_end, **opts)
    print(f"remapped run: x(10) = {3 + dx!r}, y(10) = {4 + dy!r}, displacement = {math.hypot(dx, dy)!r}")


def direction_spread(radius=0.5, a=-1.0, n=4001):
    """The closed-loop field depends on theta only, so its direction spread over
    the ball equals the spread over theta in [-radius, radius]."""
    def direction(th):
        u = u1(th)
        v = [math.cos(th) * u, math.sin(th) * u, a * th]
        norm = math.sqrt(sum(c * c for c in v))
        return [c / norm for c in v]

    thetas = [-radius + 2 * radius * k / (n - 1) for k in range(n)]
    dirs = [direction(t) for t in thetas if t != 0.0]
    best = 0.0
    for i, d in enumerate(dirs[: len(dirs) // 2]):
        e = dirs[len(dirs) - 1 - i]  # mirror point -theta
        diff = math.sqrt(sum((p - q) ** 2 for p, q in zip(d, e)))
        summ = math.sqrt(sum((p + q) ** 2 for p, q in zip(d, e)))
        best = max(best, 2 * math.atan2(diff, summ))
    print(f"closed-loop direction spread over |theta| <= {radius}: {best!r} rad")


if __name__ == "__main__":
    bessel_values()
    rk4_linear_step()
    remapped_displacement()
    direction_spread()
