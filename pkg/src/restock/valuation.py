"""Closed forms, convolution series, asymptotics, and the optimal stock size.

The per-cycle discount factor of a Gamma(k, mu) cycle under effective
rate r is q = phi^k(r) = alpha^(-k) with alpha = r/mu + 1.  Replacement n
then contributes theta * q^n * F*n(t) to the expected present value at
horizon t, giving

    w(t)   = theta * sum_{n>=1} q^n F*n(t),
    w(inf) = v = theta * q / (1 - q) = theta / (alpha^k - 1),

and the exponentially tilted kernel e^(rho s) q f(s) -- with the tilt
rho = r*mu/(r+mu) that restores unit kernel mass -- yields the large-t
approximation w(t) ~= v - (theta*mu/(k*r)) e^(-rho t).

Cost growth at rate ``growth`` < r is handled by valuing everything at
the effective rate r - growth; all operations route through
:func:`effective` so the equivalence is exact at the bit level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from restock.distributions import GammaLaw, convolution_cdf, gamma_cdf, gamma_pdf
from restock.quadrature import adaptive_simpson, truncation_point

__all__ = [
    "FixedCost",
    "LinearCost",
    "ModelParams",
    "EffectiveParams",
    "ValueCurve",
    "effective",
    "perpetual_value",
    "series_value",
    "residual_value",
    "tail_weight",
    "asymptotic_value",
    "exact_k1_value",
    "optimal_stock",
    "tilted_kernel_moments",
]

DEFAULT_SERIES_TOL = 1e-9
DEFAULT_KMAX = 10**6


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


@dataclass(frozen=True)
class FixedCost:
    """A flat payment ``theta`` per replacement (currency)."""

    theta: float

    def __post_init__(self) -> None:
        if not _finite(self.theta):
            raise ValueError(f"theta must be a finite real, got {self.theta!r}")


@dataclass(frozen=True)
class LinearCost:
    """Replacement payoff b*k - a: fixed cost ``a`` per restocking operation,
    unit margin ``b`` per item."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (_finite(self.a) and self.a >= 0):
            raise ValueError(f"fixed cost a must be a nonnegative real, got {self.a!r}")
        if not (_finite(self.b) and self.b > 0):
            raise ValueError(f"unit margin b must be a positive real, got {self.b!r}")


Cost = FixedCost | LinearCost


@dataclass(frozen=True)
class ModelParams:
    """User-facing model parameters.

    k: stock size (units, integer >= 1)
    mu: demand intensity (items per unit time)
    r: discount interest rate (per unit time)
    cost: FixedCost(theta) or LinearCost(a, b)
    growth: cost inflation rate (per unit time), must stay below r

    ``growth < r`` and, for linear costs, ``b > a/k`` are enforced where
    the derived quantities are computed (:func:`effective`), so the error
    surfaces with the operation that needs them.
    """

    k: int
    mu: float
    r: float
    cost: Cost
    growth: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.k, (int, np.integer)) or isinstance(self.k, bool):
            raise TypeError(f"k must be an integer, got {self.k!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not (_finite(self.mu) and self.mu > 0):
            raise ValueError(f"mu must be a finite positive real, got {self.mu!r}")
        if not (_finite(self.r) and self.r > 0):
            raise ValueError(f"r must be a finite positive real, got {self.r!r}")
        if not isinstance(self.cost, (FixedCost, LinearCost)):
            raise TypeError(f"cost must be FixedCost or LinearCost, got {self.cost!r}")
        if not (_finite(self.growth) and self.growth >= 0):
            raise ValueError(f"growth must be a finite nonnegative real, got {self.growth!r}")

    @property
    def law(self) -> GammaLaw:
        return GammaLaw(shape=self.k, rate=self.mu)


@dataclass(frozen=True)
class EffectiveParams:
    """Quantities derived from ModelParams that every method consumes.

    theta: payment per replacement (currency)
    r_eff: effective discount rate r - growth
    alpha: r_eff/mu + 1
    phi_k: per-cycle discount factor alpha^(-k), in (0, 1)
    rho:   tilt rate r_eff*mu/(r_eff+mu) = r_eff/alpha restoring unit
           kernel mass; governs the exponential approach of w(t) to v
    mu0:   mean of the tilted kernel, k*(r_eff+mu)/mu^2 (time units)
    v:     perpetual value theta*phi_k/(1-phi_k) (currency)
    """

    theta: float
    r_eff: float
    alpha: float
    phi_k: float
    rho: float
    mu0: float
    v: float


@dataclass(frozen=True)
class ValueCurve:
    """Horizon grid with values produced by one method."""

    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    method: str = "series"

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.ndim != 1 or times.shape != values.shape:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if times.size and (np.any(times < 0) or np.any(np.diff(times) <= 0)):
            raise ValueError("times must be nonnegative and strictly ascending")


def effective(params: ModelParams) -> EffectiveParams:
    """Resolve the cost specification and derive all method inputs.

    Raises if growth >= r (the perpetuity diverges) or if a linear cost
    yields a non-positive payoff b*k - a.
    """
    r_eff = params.r - params.growth
    if r_eff <= 0:
        raise ValueError(
            f"perpetual value divergent under cost growth: growth={params.growth} >= r={params.r}"
        )
    if isinstance(params.cost, FixedCost):
        theta = params.cost.theta
    else:
        theta = params.cost.b * params.k - params.cost.a
        if theta <= 0:
            raise ValueError(
                f"non-positive replacement payoff: b*k = {params.cost.b * params.k} <= a = {params.cost.a}"
            )
    ratio = r_eff / params.mu
    alpha = ratio + 1.0
    log_alpha = math.log1p(ratio)
    phi_k = math.exp(-params.k * log_alpha)
    # alpha^k - 1 via expm1 keeps v accurate when r_eff/mu is tiny
    v = theta / math.expm1(params.k * log_alpha)
    rho = r_eff * params.mu / (r_eff + params.mu)
    mu0 = params.k * (r_eff + params.mu) / params.mu**2
    return EffectiveParams(theta=theta, r_eff=r_eff, alpha=alpha, phi_k=phi_k, rho=rho, mu0=mu0, v=v)


def perpetual_value(params: ModelParams) -> float:
    """Expected present value of the replacement payments over an infinite horizon."""
    return effective(params).v


def series_value(params: ModelParams, t: float, tol: float = DEFAULT_SERIES_TOL) -> float:
    """w(t) by the convolution series, truncated under the geometric tail bound.

    Summation stops after N terms once |theta| * q^(N+1) / (1 - q) < tol,
    which bounds the discarded tail because every F*n(t) is at most 1; the
    result is therefore within ``tol`` of the full series.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    eff = effective(params)
    if t == 0.0:
        return 0.0
    law = params.law
    q = eff.phi_k
    tail_scale = abs(eff.theta) / (1.0 - q)
    total = 0.0
    q_pow = 1.0
    n = 0
    while True:
        n += 1
        q_pow *= q
        total += q_pow * convolution_cdf(n, t, law)
        if tail_scale * q_pow * q < tol:
            break
    return eff.theta * total


def residual_value(params: ModelParams, t: float, tol: float = DEFAULT_SERIES_TOL) -> float:
    """Remaining value v - w(t) still to accrue after horizon t."""
    return effective(params).v - series_value(params, t, tol)


def tail_weight(params: ModelParams, t: float) -> float:
    """Forcing term v * (1 - F(t)) of the tilted residual equation."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return effective(params).v * (1.0 - gamma_cdf(t, params.law))


def asymptotic_value(params: ModelParams, t: float) -> float:
    """Key-renewal approximation v - (theta*mu/(k*r_eff)) e^(-rho t).

    The coefficient is the tilted-tail integral divided by the tilted
    kernel mean, theta*mu/(k*r_eff).  Deliberately not clamped: the raw
    approximation goes negative for small t, and callers should see that.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    eff = effective(params)
    coeff = eff.theta * params.mu / (params.k * eff.r_eff)
    return eff.v - coeff * math.exp(-eff.rho * t)


def exact_k1_value(params: ModelParams, t: float) -> float:
    """Closed form (theta*mu/r_eff)(1 - e^(-rho t)) for a single-unit stock.

    For k = 1 the asymptotic expression is exact; any other k is a misuse.
    """
    if params.k != 1:
        raise ValueError(f"closed form only holds for k = 1, got k = {params.k}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    eff = effective(params)
    return -(eff.theta * params.mu / eff.r_eff) * math.expm1(-eff.rho * t)


def optimal_stock(
    a: float,
    b: float,
    mu: float,
    r: float,
    k_max: int | None = None,
    growth: float = 0.0,
) -> tuple[int, float]:
    """Stock size maximising the perpetual value under linear costs.

    Scans v_k = (b*k - a) / (alpha^k - 1) upward from the first k with
    positive payoff.  The envelope b*k / (alpha^k - 1) is strictly
    decreasing in k, so the scan stops with a proof of optimality as soon
    as the envelope falls below the incumbent; ``k_max`` (default 10^6)
    caps the search domain.  Ties break toward the smaller k.

    Returns (k*, v*); raises if no k <= k_max has b*k > a.
    """
    if not (_finite(a) and a >= 0):
        raise ValueError(f"fixed cost a must be a nonnegative real, got {a!r}")
    if not (_finite(b) and b > 0):
        raise ValueError(f"unit margin b must be a positive real, got {b!r}")
    if not (_finite(mu) and mu > 0):
        raise ValueError(f"mu must be a finite positive real, got {mu!r}")
    if not (_finite(r) and r > 0):
        raise ValueError(f"r must be a finite positive real, got {r!r}")
    if not (_finite(growth) and 0 <= growth < r):
        raise ValueError(f"growth must satisfy 0 <= growth < r, got {growth!r}")
    cap = DEFAULT_KMAX if k_max is None else int(k_max)
    if cap < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max!r}")
    log_alpha = math.log1p((r - growth) / mu)

    first = max(1, math.floor(a / b) + 1)
    while first <= cap and b * first <= a:  # float guard at the feasibility edge
        first += 1
    best_k, best_v = None, -math.inf
    for k in range(first, cap + 1):
        denom = math.expm1(k * log_alpha)
        if best_k is not None and b * k / denom < best_v:
            break
        value = (b * k - a) / denom
        if value > best_v:
            best_k, best_v = k, value
    if best_k is None:
        raise ValueError(f"no stock size up to k_max={cap} has positive payoff b*k - a")
    return best_k, best_v


def tilted_kernel_moments(params: ModelParams, abs_tol: float = 1e-10) -> tuple[float, float]:
    """Quadrature of the tilted kernel's mass and mean.

    Integrates e^(rho s) q f(s) and s e^(rho s) q f(s) over [0, T] with T
    chosen so the exactly-boundable gamma tails fall below abs_tol/100.
    The closed forms say mass = 1 and mean = k*(r_eff+mu)/mu^2; this is
    the independent numerical check guarding both.
    """
    eff = effective(params)
    law = params.law
    k, mu = params.k, params.mu
    beta = mu - eff.rho  # tilted kernel decays like s^(k-1) e^(-beta s); beta > 0
    scale = eff.phi_k * math.exp(k * math.log(mu) - math.lgamma(k))
    tail_tol = abs_tol / 100.0
    t_mass = truncation_point(k - 1, beta, scale, tail_tol, t0=law.mean)
    t_mean = truncation_point(k, beta, scale, tail_tol, t0=law.mean)

    def tilted(s: float) -> float:
        return math.exp(eff.rho * s) * eff.phi_k * gamma_pdf(s, law)

    mass = adaptive_simpson(tilted, 0.0, t_mass, abs_tol)
    mean = adaptive_simpson(lambda s: s * tilted(s), 0.0, t_mean, abs_tol)
    return mass, mean
