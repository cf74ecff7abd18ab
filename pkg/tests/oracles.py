"""Independent reference computations used by the tests.

Nothing here imports the package's cubic or marker code.
"""

import math

import mpmath
import numpy as np


def positive_root_count(p, q, n=4000):
    """Count positive roots of R^3 + pR + q by dense sampling plus bisection.

    A geometric grid over (0, R_big] finds sign changes; where none show up,
    the lowest grid value is refined by golden-section search so a shallow
    dip below zero is not missed.
    """
    f = lambda x: x**3 + p * x + q
    r_big = 1.0 + max(abs(p), abs(q))
    grid = np.geomspace(r_big * 1e-9, r_big, n)
    vals = f(grid)
    roots = []
    for i in np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:])):
        lo, hi = grid[i], grid[i + 1]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if np.sign(f(mid)) == np.sign(f(lo)):
                lo = mid
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    if roots:
        return len(roots), roots
    k = int(np.argmin(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, n - 1)]
    g = (math.sqrt(5) - 1) / 2
    for _ in range(200):
        c, d = b - g * (b - a), a + g * (b - a)
        if f(c) < f(d):
            b = d
        else:
            a = c
    if f(0.5 * (a + b)) < 0:
        return 2, []
    return 0, []


def cubic_roots_mp(p, q, dps=40):
    """All roots of R^3 + pR + q in extended precision."""
    with mpmath.workdps(dps):
        return mpmath.polyroots([1, 0, mpmath.mpf(p), mpmath.mpf(q)], maxsteps=200, extraprec=200)


def grid_argmin(fn, lo, hi, n):
    xs = np.linspace(lo, hi, n)
    return xs[int(np.argmin(fn(xs)))], xs[1] - xs[0]


def time_between(params, r_a, r_b, dps=30):
    """t(r_b) - t(r_a) along an expanding solution, by quadrature of dR/sqrt(f)."""
    a, b, g, d = (mpmath.mpf(x) for x in (params.alpha, params.beta, params.gamma, params.delta))
    with mpmath.workdps(dps):
        f = lambda R: a / R + d / R**2 + b * R**2 - g
        return float(mpmath.quad(lambda R: 1 / mpmath.sqrt(f(R)), [r_a, r_b]))


def random_case_iiii(rng, n, margin=1.01):
    """(alpha, beta, gamma) with gamma = 1 and 27 alpha^2 beta > margin * 4 gamma^3."""
    out = []
    while len(out) < n:
        a, b = np.exp(rng.uniform(-3, 3, 2))
        if 27 * a * a * b > margin * 4.0:
            out.append((float(a), float(b), 1.0))
    return out


def random_case_iii(rng, n, margin=1.01):
    """gamma = +1 triples with 27 alpha^2 beta < 4 gamma^3 / margin."""
    out = []
    while len(out) < n:
        a, b = np.exp(rng.uniform(-4, 2, 2))
        g = float(np.exp(rng.uniform(-1, 1)))
        if 27 * a * a * b * margin < 4.0 * g**3:
            out.append((float(a), float(b), g))
    return out
