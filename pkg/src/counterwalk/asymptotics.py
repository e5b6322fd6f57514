"""Closed-form limit constants, series identities, and the stable exponent.

All rational-input operations return exact `Fraction` values; the only
floating point lives in the truncated series evaluators and the stable
characteristic exponent.  Beta values are always computed through the
rising-factorial product, never through gamma-function floats, so the
identity checks in the test suite can demand exact equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .eulerian import delta_moment, odd_count_pmf
from .recursive_tree import Tree, enumerate_increasing_trees, parity_profile

Number = Union[int, float, Fraction]


def _frac(x: Number, name: str) -> Fraction:
    try:
        return Fraction(x)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"{name} must be a rational number") from exc


def _check_closed01(p: Fraction) -> None:
    if not 0 <= p <= 1:
        raise ValueError("innovation probability must lie in [0, 1]")


def _check_open01(p: Fraction, allow_one: bool = False) -> None:
    if allow_one:
        if not 0 < p <= 1:
            raise ValueError("innovation probability must lie in (0, 1]")
    elif not 0 < p < 1:
        raise ValueError("innovation probability must lie strictly in (0, 1)")


def rho_of(p: Number) -> Fraction:
    """The reinforcement exponent ``1 / (1 - p)``."""
    p = _frac(p, "p")
    if p >= 1:
        raise ValueError("rho is finite only for p < 1")
    return 1 / (1 - p)


def rising_factorial(x: Number, k: int) -> Fraction:
    """``x (x+1) ... (x+k-1)`` with the empty product equal to 1."""
    if k < 0:
        raise ValueError("order must be >= 0")
    x = _frac(x, "x")
    if x <= 0:
        raise ValueError("base must be > 0")
    out = Fraction(1)
    for j in range(k):
        out *= x + j
    return out


def beta_of_k(k: int, p: Number) -> Fraction:
    """``B(k, 1 + rho)`` as an exact rational: ``(k-1)! / prod(rho + j)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p = _frac(p, "p")
    _check_open01(p)
    rho = rho_of(p)
    denom = Fraction(1)
    for j in range(1, k + 1):
        denom *= rho + j
    return Fraction(math.factorial(k - 1)) / denom


def velocity(p: Number, m1: Number) -> Fraction:
    """Asymptotic speed ``p * m1 / (2 - p)`` of the counterbalanced walk."""
    p = _frac(p, "p")
    _check_closed01(p)
    return p * _frac(m1, "m1") / (2 - p)


def clt_variance(p: Number, m1: Number, m2: Number) -> Fraction:
    """Variance ``(m2 - (p m1 / (2-p))^2) / (3 - 2p)`` of the Gaussian limit
    of the centered, sqrt(n)-scaled walk.  Defined for ``p`` in (0, 1]; the
    no-innovation regime has a different (non-Gaussian) limit and is
    rejected."""
    p = _frac(p, "p")
    _check_open01(p, allow_one=True)
    m1, m2 = _frac(m1, "m1"), _frac(m2, "m2")
    if m2 < m1 * m1:
        raise ValueError("m2 must be >= m1^2")
    drift = p * m1 / (2 - p)
    return (m2 - drift * drift) / (3 - 2 * p)


def nu1_clt_variance(p: Number) -> Fraction:
    """Variance ``(2p^3 - 8p^2 + 6p) / ((3-2p)(2-p)^2)`` of the Gaussian
    fluctuations of the singleton-tree count."""
    p = _frac(p, "p")
    _check_open01(p, allow_one=True)
    return (2 * p**3 - 8 * p**2 + 6 * p) / ((3 - 2 * p) * (2 - p) ** 2)


def yule_simon_pmf(k: int, p: Number) -> Fraction:
    """Yule-Simon mass ``rho * B(k, 1 + rho)`` with ``rho = 1/(1-p)``: the
    limit frequency (relative to the innovation count) of trees of size
    ``k`` in the genealogical forest."""
    p = _frac(p, "p")
    _check_open01(p)
    return rho_of(p) * beta_of_k(k, p)


def sigma_sq_k(k: int, p: Number, m1: Number, m2: Number) -> Fraction:
    """Component variances of the occurrence-count decomposition:
    size-1 trees carry the drift correction, size-2 trees contribute
    nothing, and size ``k >= 3`` contributes ``k p m2 B(k,1+rho)/(3(1-p))``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p = _frac(p, "p")
    _check_open01(p)
    m1, m2 = _frac(m1, "m1"), _frac(m2, "m2")
    if k == 1:
        return p * m2 / (2 - p) - p**2 * m1**2 / ((3 - 2 * p) * (2 - p) ** 2)
    if k == 2:
        return Fraction(0)
    return k * p * m2 * beta_of_k(k, p) / (3 * (1 - p))


def exact_mean(n: int, p: Number, m1: Number) -> Fraction:
    """Exact mean of the walk at horizon ``n``.

    Solves the one-step mean recursion
    ``E(n+1) = p m1 + (1 - (1-p)/n) E(n)``, ``E(1) = m1`` in closed
    product form (identical value, no quadratic blow-up of gcd work), so
    horizons in the tens of thousands stay cheap.
    """
    if n < 1:
        raise ValueError("horizon must be >= 1")
    p = _frac(p, "p")
    _check_closed01(p)
    m1 = _frac(m1, "m1")
    a, b = p.numerator, p.denominator
    num = 1
    den = 1
    for j in range(1, n):
        num *= (j - 1) * b + a
        den *= j * b
    correction = 2 * (1 - p) * m1 / (2 - p) * Fraction(num, den)
    return velocity(p, m1) * n + correction


def tree_freq_limit(tau: Tree, p: Number) -> Fraction:
    """Limit of ``nu_tau(n) / n`` for a fixed increasing tree shape:
    ``p / ((1-p) (1+rho)^(rising |tau|))``."""
    p = _frac(p, "p")
    _check_open01(p)
    return p / ((1 - p) * rising_factorial(1 + rho_of(p), tau.size))


@dataclass(frozen=True)
class StableSpec:
    """A stable limit law via its characteristic exponent.

    ``phi(theta) = |theta|**alpha * phi_plus`` for positive ``theta`` (and
    ``phi_minus`` on the negative side; defaults to the symmetric case).
    ``a_n = n**(1/alpha)`` is the matching scaling sequence.
    """

    alpha: float
    phi_plus: float
    phi_minus: float | None = None

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 2:
            raise ValueError("alpha must lie in (0, 2)")

    def phi(self, theta: float) -> float:
        if theta == 0:
            return 0.0
        scale = self.phi_plus if theta > 0 else (
            self.phi_minus if self.phi_minus is not None else self.phi_plus
        )
        return abs(theta) ** self.alpha * scale

    def a_n(self, n: int) -> float:
        return n ** (1.0 / self.alpha)


def stable_check_exponent(
    theta: float, p: Number, spec: StableSpec, kmax: int = 50
) -> tuple[float, float]:
    """Truncated characteristic exponent of the counterbalanced stable limit.

    Sums, over tree sizes ``k <= kmax``, the expected exponent of
    ``theta * (k - 2 * Odd)`` under the exact parity law of size ``k``,
    weighted by ``(p/(1-p)) B(k, 1+rho)``.  Returns the partial sum and a
    tail estimate from the ``k**(-rho)`` decay of the shell terms.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    p = _frac(p, "p")
    _check_open01(p)
    rho = float(rho_of(p))
    prefac = float(p / (1 - p))

    total = 0.0
    recent: list[float] = []
    b = 1.0 / (1.0 + rho)  # B(1, 1+rho), then recursively B(k+1) = B(k) * k/(k+1+rho)
    for k in range(1, kmax + 1):
        pmf = odd_count_pmf(k)
        mean_phi = sum(
            float(prob) * spec.phi((k - 2 * ell) * theta) for ell, prob in pmf.items()
        )
        shell = prefac * b * mean_phi
        total += shell
        recent.append(abs(shell))
        if len(recent) > 5:
            recent.pop(0)
        b *= k / (k + 1.0 + rho)

    scaled = max(
        (s * (k_ / kmax) ** rho for s, k_ in zip(recent, range(kmax - len(recent) + 1, kmax + 1))),
        default=0.0,
    )
    tail = scaled * kmax / (rho - 1.0)
    return total, tail


def yule_simon_series(p: Number, kmax: int = 10_000) -> dict[str, float]:
    """Float partial sums of the Yule-Simon mass and mean with tail
    estimates; the exact limits are 1 and ``1/p``."""
    p = _frac(p, "p")
    _check_open01(p)
    rho = float(rho_of(p))
    b = 1.0 / (1.0 + rho)
    mass = 0.0
    mean = 0.0
    last_mass = last_mean = 0.0
    for k in range(1, kmax + 1):
        last_mass = rho * b
        last_mean = k * rho * b
        mass += last_mass
        mean += last_mean
        b *= k / (k + 1.0 + rho)
    # terms decay like k**-(1+rho) (mass) and k**-rho (mean)
    return {
        "mass": mass,
        "mean": mean,
        "mass_tail": last_mass * kmax / rho,
        "mean_tail": last_mean * kmax / (rho - 1.0),
    }


def sigma_sq_series(p: Number, m1: Number, m2: Number, kmax: int = 10_000) -> dict[str, float]:
    """Float check data for the two variance-decomposition identities.

    ``sigma_total`` is ``sigma_1^2 + sum_{k<=kmax} sigma_k^2`` and should
    match `clt_variance`; ``closing_lhs`` is ``p m2/(2-p) + sum sigma_k^2``
    and should match ``m2 / (3 - 2p)``.
    """
    p = _frac(p, "p")
    _check_open01(p)
    m1f, m2f = float(_frac(m1, "m1")), float(_frac(m2, "m2"))
    rho = float(rho_of(p))
    pf = float(p)
    coef = pf * m2f / (3.0 * (1.0 - pf))
    b = 1.0 / (1.0 + rho)  # B(1)
    b *= 1.0 / (2.0 + rho)  # B(2)
    tail_sum = 0.0
    last = 0.0
    for k in range(3, kmax + 1):
        b *= (k - 1.0) / (k + rho)  # B(k) from B(k-1)
        last = coef * k * b
        tail_sum += last
    sigma1 = float(sigma_sq_k(1, p, m1, m2))
    tail_est = last * kmax / (rho - 1.0)
    return {
        "sigma_total": sigma1 + tail_sum,
        "clt_variance": float(clt_variance(p, m1, m2)),
        "closing_lhs": pf * m2f / (2.0 - pf) + tail_sum,
        "closing_rhs": m2f / (3.0 - 2.0 * pf),
        "tail": tail_est,
    }


@dataclass(frozen=True)
class ShapeWeightedSum:
    """Exact evaluation of the size-plus-parity weighted shape series
    ``sum_tau (|tau| + delta(tau)^2) / (1+rho)^(rising |tau|)``.

    ``truncated`` enumerates every shape up to ``size_cap`` vertices;
    ``tail`` closes the remainder with the exact second parity moments
    (``k/3`` for all sizes above the cap); their sum is the exact value
    of the series.  Candidate closed forms are reported side by side and
    deliberately not asserted anywhere.
    """

    p: Fraction
    size_cap: int
    truncated: Fraction
    tail: Fraction
    total: Fraction
    candidate_simple: Fraction     # 4p / (3 (1-p))
    candidate_grouped: Fraction    # (4/3)(1-p)/p + (2/3)(1-p)/(3-2p)


def shape_weighted_sum(p: Number, size_cap: int = 9) -> ShapeWeightedSum:
    p = _frac(p, "p")
    _check_open01(p)
    if size_cap < 3:
        raise ValueError("size_cap must be >= 3")
    rho = rho_of(p)
    truncated = Fraction(0)
    k_beta_partial = Fraction(0)
    for k in range(1, size_cap + 1):
        rise = rising_factorial(1 + rho, k)
        shell = Fraction(0)
        for tau in enumerate_increasing_trees(k, cap=size_cap):
            _, _, delta = parity_profile(tau)
            shell += k + delta * delta
        truncated += shell / rise
        k_beta_partial += k * beta_of_k(k, p)
    # above the cap the second parity moment is exactly k/3, so the
    # remainder collapses to (4/3) * (remaining mean mass)
    tail = Fraction(4, 3) * ((1 - p) / p - k_beta_partial)
    total = truncated + tail
    candidate_simple = 4 * p / (3 * (1 - p))
    candidate_grouped = Fraction(4, 3) * (1 - p) / p + Fraction(2, 3) * (1 - p) / (3 - 2 * p)
    return ShapeWeightedSum(p, size_cap, truncated, tail, total, candidate_simple, candidate_grouped)


def delta_sq_rate(p: Number) -> Fraction:
    """Limit of ``E(sum_j delta(tree_j)^2) / n`` using the exact small-size
    parity moments: ``(p/(1-p)) sum_k B(k,1+rho) E(delta_k^2)``."""
    p = _frac(p, "p")
    _check_open01(p)
    b1 = beta_of_k(1, p)
    b2 = beta_of_k(2, p)
    series = Fraction(2, 3) * (b1 - b2) + (1 - p) / (3 * p)
    return p / (1 - p) * series


@dataclass(frozen=True)
class LimitConstants:
    """All closed-form constants for one ``(p, mu)`` pair.

    Fields that need a finite second moment or ``p`` strictly inside
    (0, 1) are ``None`` when unavailable.
    """

    p: Fraction
    m1: Fraction | None
    m2: Fraction | None
    velocity: Fraction | None
    clt_variance: Fraction | None
    nu1_variance: Fraction
    rho: Fraction | None
    sigma_sq: dict[int, Fraction] | None
    yule_simon: dict[int, Fraction] | None


def limit_constants(p: Number, m1: Number | None, m2: Number | None, kmax: int = 8) -> LimitConstants:
    """Evaluate every available constant; ``p`` must lie in (0, 1]."""
    p = _frac(p, "p")
    _check_open01(p, allow_one=True)
    m1 = None if m1 is None else _frac(m1, "m1")
    m2 = None if m2 is None else _frac(m2, "m2")
    vel = None if m1 is None else velocity(p, m1)
    clt = None if (m1 is None or m2 is None) else clt_variance(p, m1, m2)
    inside = p < 1
    rho = rho_of(p) if inside else None
    sigma = None
    if inside and m1 is not None and m2 is not None:
        sigma = {k: sigma_sq_k(k, p, m1, m2) for k in range(1, kmax + 1)}
    ys = {k: yule_simon_pmf(k, p) for k in range(1, kmax + 1)} if inside else None
    return LimitConstants(p, m1, m2, vel, clt, nu1_clt_variance(p), rho, sigma, ys)
