"""Adaptive Simpson quadrature for the kernel identity checks.

Deliberately small: the integrands this package needs to verify (tilted
gamma kernels and discounted tails) are smooth on [0, T] with explicitly
boundable exponential tails, so classic recursive Simpson with Richardson
acceptance is enough and keeps the package dependency-free.
"""

from __future__ import annotations

import math
from typing import Callable

__all__ = ["adaptive_simpson", "gamma_tail_bound", "truncation_point"]

_MAX_DEPTH = 48
_SEED_PANELS = 16  # initial uniform split so a narrow interior hump cannot hide


def _simpson_recurse(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    half = 0.5 * tol
    return _simpson_recurse(f, a, fa, m, fm, lm, flm, left, half, depth - 1) + _simpson_recurse(
        f, m, fm, b, fb, rm, frm, right, half, depth - 1
    )


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, abs_tol: float) -> float:
    """Integrate f over [a, b] to roughly ``abs_tol`` absolute accuracy.

    The interval is first cut into ``_SEED_PANELS`` uniform panels, each
    refined adaptively with its share of the tolerance; without the seed
    split a peak between the three opening Simpson points would be
    accepted as zero.
    """
    if not b >= a:
        raise ValueError(f"empty interval [{a}, {b}]")
    if abs_tol <= 0:
        raise ValueError("abs_tol must be positive")
    if a == b:
        return 0.0
    edges = [a + (b - a) * i / _SEED_PANELS for i in range(_SEED_PANELS + 1)]
    panel_tol = abs_tol / _SEED_PANELS
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = 0.5 * (lo + hi)
        f_lo, f_m, f_hi = f(lo), f(m), f(hi)
        whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_m + f_hi)
        total += _simpson_recurse(f, lo, f_lo, hi, f_hi, m, f_m, whole, panel_tol, _MAX_DEPTH)
    return total


def gamma_tail_bound(m: int, beta: float, t: float) -> float:
    """Exact value of the tail integral of s^m e^(-beta s) ds over [t, inf).

    Equals (m! / beta^(m+1)) e^(-beta t) sum_{j<=m} (beta t)^j / j!, the
    standard finite sum for integer m >= 0; used to pick safe truncation
    points for integrands dominated by gamma-type kernels.
    """
    if m < 0 or beta <= 0 or t < 0:
        raise ValueError("need m >= 0, beta > 0, t >= 0")
    bt = beta * t
    # sum_{j<=m} (bt)^j / j! in log space against the e^(-bt) weight
    total = 0.0
    log_term = -bt  # j = 0: e^(-bt)
    for j in range(m + 1):
        if j > 0:
            log_term += math.log(bt) - math.log(j) if bt > 0 else -math.inf
        total += math.exp(log_term)
    log_front = math.lgamma(m + 1) - (m + 1) * math.log(beta)
    return math.exp(log_front) * total


def truncation_point(m: int, beta: float, scale: float, tail_tol: float, t0: float = 1.0) -> float:
    """Smallest doubling of t0 with scale * tail(s^m e^(-beta s); [T, inf)) < tail_tol."""
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    t = max(t0, 1e-6)
    for _ in range(200):
        if scale * gamma_tail_bound(m, beta, t) < tail_tol:
            return t
        t *= 2.0
    raise ArithmeticError("no truncation point found; integrand tail does not decay as assumed")
