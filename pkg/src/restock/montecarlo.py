"""Seeded Monte Carlo estimation of the horizon value and the perpetuity.

Each path alternates rounds of two ingredients, both built from exact
Gamma(k, mu) cycle draws (sums of k inverse-transform exponentials):

* a renewal *clock* S_1 < S_2 < ... deciding how many replacements fall
  inside the horizon (S_n <= t), and
* a running *discount product* D_n = prod_{m<=n} e^(-r_eff X'_m) priced
  from an independent replication of the cycle sequence.

Keeping the clock and the discounting independent makes the estimator
unbiased for the function the analytic methods compute,

    E[sum_n theta*D_n*1{S_n <= t}] = theta * sum_n q^n F*n(t),

mirroring the independence structure of the perpetuity identity
V = e^(-rX) (theta + V).  (Discounting with the clock's own increments
estimates a strictly larger function at finite horizons -- see the
perpetuity-equation checker for the t = inf case where both coincide.)

Determinism: every uniform block is drawn from a Philox counter-based
stream keyed by (seed, stream domain, round index), and arrays are
reduced in fixed path order, so results are bit-reproducible from
(seed, n_paths, params, t / tail_tol) on any machine and unaffected by
how the work would be scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from restock.valuation import ModelParams, effective

__all__ = ["MCEstimate", "simulate_wk", "simulate_vk", "verify_perpetuity_equation"]

DEFAULT_TAIL_TOL = 1e-12

# Stream domains; each (seed, domain, round) triple is an independent
# Philox substream, so the clock never shares uniforms with the pricing.
_WK_CLOCK = 0
_WK_PRICE = 1
_VK_PRICE = 2
_PERP_X = 3
_PERP_V = 4

# log-products of more uniforms than this are chunked to dodge underflow
_PROD_CHUNK = 48


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean with its standard error and full reproduction recipe.

    ``stderr`` is the sample standard deviation over sqrt(n_paths); the
    estimate is bit-reproducible from (seed, n_paths) and the call's
    parameters.  ``truncation_bias_bound`` is set on perpetuity runs only:
    the stopped tail is worth D_stop * v in expectation, hence at most
    tail_tol * |v|.
    """

    mean: float
    stderr: float
    n_paths: int
    seed: int
    truncation_bias_bound: float | None = None


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must fit an unsigned 64-bit integer, got {seed}")
    return int(seed)


def _stream(seed: int, domain: int, round_index: int) -> np.random.Generator:
    key = np.array([seed, (domain << 56) | round_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _log_cycle_products(seed: int, domain: int, round_index: int, n: int, k: int) -> np.ndarray:
    """ln prod_{j<k}(1 - U_j) per path: -mu * (one gamma cycle draw).

    The k-fold product replaces k logarithms with one; chunking every
    _PROD_CHUNK columns keeps the partial products above the underflow
    threshold for any k.
    """
    u = _stream(seed, domain, round_index).random((n, k))
    np.subtract(1.0, u, out=u)
    if k <= _PROD_CHUNK:
        return np.log(u.prod(axis=1))
    out = np.zeros(n)
    for lo in range(0, k, _PROD_CHUNK):
        out += np.log(u[:, lo : lo + _PROD_CHUNK].prod(axis=1))
    return out


def _estimate(samples: np.ndarray, seed: int, bias_bound: float | None = None) -> MCEstimate:
    n = samples.size
    mean = float(samples.mean())
    stderr = float(samples.std(ddof=1) / math.sqrt(n))
    return MCEstimate(mean=mean, stderr=stderr, n_paths=n, seed=seed, truncation_bias_bound=bias_bound)


def simulate_wk(params: ModelParams, t: float, n_paths: int, seed: int) -> MCEstimate:
    """Estimate the horizon-t value from n_paths simulated payment streams.

    Per round, every live path draws one clock cycle and one independent
    pricing cycle; a payment theta * D_n accrues while the clock stays
    within the horizon, and paths whose clock has passed t are retired.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if not (isinstance(n_paths, (int, np.integer)) and n_paths >= 2):
        raise ValueError(f"n_paths must be an integer >= 2, got {n_paths!r}")
    seed = _check_seed(seed)
    eff = effective(params)
    k, mu = params.k, params.mu
    n_paths = int(n_paths)

    clock = np.zeros(n_paths)
    log_discount = np.zeros(n_paths)
    payout = np.zeros(n_paths)
    alive = np.arange(n_paths)
    round_index = 0
    while alive.size:
        round_index += 1
        log_prod_clock = _log_cycle_products(seed, _WK_CLOCK, round_index, alive.size, k)
        log_prod_price = _log_cycle_products(seed, _WK_PRICE, round_index, alive.size, k)
        clock[alive] -= log_prod_clock / mu
        log_discount[alive] += (eff.r_eff / mu) * log_prod_price
        inside = clock[alive] <= t
        payers = alive[inside]
        payout[payers] += eff.theta * np.exp(log_discount[payers])
        alive = payers
    return _estimate(payout, seed)


def _perpetuity_samples(
    params: ModelParams, n_paths: int, seed: int, tail_tol: float, domain: int
) -> np.ndarray:
    """Per-path discounted payment totals, truncated at discount < tail_tol."""
    eff = effective(params)
    k, mu = params.k, params.mu
    log_tail = math.log(tail_tol)
    log_discount = np.zeros(n_paths)
    payout = np.zeros(n_paths)
    alive = np.arange(n_paths)
    round_index = 0
    while alive.size:
        round_index += 1
        log_prod = _log_cycle_products(seed, domain, round_index, alive.size, k)
        log_discount[alive] += (eff.r_eff / mu) * log_prod
        payout[alive] += eff.theta * np.exp(log_discount[alive])
        alive = alive[log_discount[alive] >= log_tail]
    return payout


def simulate_vk(
    params: ModelParams, n_paths: int, seed: int, tail_tol: float = DEFAULT_TAIL_TOL
) -> MCEstimate:
    """Estimate the perpetual value; paths stop when their discount factor
    falls below tail_tol.

    The payment at the stopping replacement is still collected, so the
    untallied remainder is D_stop times an independent perpetuity and the
    estimate is biased low by at most tail_tol * |v| (reported, not
    corrected).
    """
    if not (isinstance(n_paths, (int, np.integer)) and n_paths >= 2):
        raise ValueError(f"n_paths must be an integer >= 2, got {n_paths!r}")
    if not 0 < tail_tol < 1:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol}")
    seed = _check_seed(seed)
    eff = effective(params)
    samples = _perpetuity_samples(params, int(n_paths), seed, tail_tol, _VK_PRICE)
    return _estimate(samples, seed, bias_bound=tail_tol * abs(eff.v))


def verify_perpetuity_equation(
    params: ModelParams, n_paths: int, seed: int, tail_tol: float = DEFAULT_TAIL_TOL
) -> tuple[MCEstimate, MCEstimate]:
    """Estimate both sides of V = e^(-r_eff X) (theta + V) with independent draws.

    The left side is the plain perpetuity estimate; the right side prices
    theta plus a *fresh* perpetuity sample behind one fresh cycle draw,
    all from dedicated substreams.  The two means agree within sampling
    error iff the simulated perpetuity satisfies its defining identity.
    """
    if not (isinstance(n_paths, (int, np.integer)) and n_paths >= 2):
        raise ValueError(f"n_paths must be an integer >= 2, got {n_paths!r}")
    if not 0 < tail_tol < 1:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol}")
    seed = _check_seed(seed)
    eff = effective(params)
    k, mu = params.k, params.mu
    n_paths = int(n_paths)

    lhs = simulate_vk(params, n_paths, seed, tail_tol)
    log_prod = _log_cycle_products(seed, _PERP_X, 1, n_paths, k)
    x = -log_prod / mu
    fresh_v = _perpetuity_samples(params, n_paths, seed, tail_tol, _PERP_V)
    rhs_samples = np.exp(-eff.r_eff * x) * (eff.theta + fresh_v)
    rhs = _estimate(rhs_samples, seed)
    return lhs, rhs
