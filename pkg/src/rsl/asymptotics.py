"""Depth-width scaling laws for the RNN and LRU signal energies.

Three regimes, with ``c = depth / sqrt(n)``:

* subcritical (``depth = o(sqrt n)``): ``Q -> 1`` and ``S ~ t + 1``;
* critical (``depth ~ c sqrt n``): ``Q -> q(c) = (2/c^2) sinh(c^2/2)`` and
  ``S ~ sqrt(n) * int_0^c q``;
* supercritical sublinear (``sqrt n << depth << n``):
  ``Q ~ n / ((k+1)(k+2)) * exp(n psi(k/n))`` with
  ``psi(x) = (1+x) log(1+x) - x``, and ``S ~ Q / log(1 + t/n)``.

Below ``n^(2/3)`` the exponent ``n psi(k/n)`` may be replaced by ``k^2/(2n)``
(the mesoscopic window).  Supercritical laws are returned as natural logs.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy import integrate

from .curves import CurveRow, EnergyCurve
from .exact_formulas import Model

__all__ = [
    "Regime",
    "RegimeProfile",
    "asymptotic_curve",
    "classify_regime",
    "critical_profile_q",
    "critical_profile_s",
    "mesoscopic_q_log",
    "mesoscopic_s_log",
    "psi",
    "supercritical_q_log",
    "supercritical_s_log",
    "supercritical_s_log_simplified",
]

Q_SERIES_MAX_C2 = 1.0
S_SERIES_MAX_C = 3.0


class BeyondSublinearError(ValueError):
    """depth >= n lies outside every analyzed regime."""


def psi(x: float) -> float:
    """(1 + x) log(1 + x) - x, accurate for small x."""
    if x < 0:
        raise ValueError("psi is defined here for x >= 0")
    if x < 1e-3:
        # alternating series x^2/2 - x^3/6 + x^4/12 - ...
        total, term, m = 0.0, x * x, 2
        while True:
            contrib = term / (m * (m - 1))
            total += contrib if m % 2 == 0 else -contrib
            if contrib <= 1e-18 * total:
                return total
            term *= x
            m += 1
    return (1.0 + x) * math.log1p(x) - x


def critical_profile_q(c: float) -> float:
    """(2 / c^2) sinh(c^2 / 2), continuously extended by 1 at c = 0."""
    if c < 0:
        raise ValueError("c must be >= 0")
    c2 = c * c
    if c2 < Q_SERIES_MAX_C2:
        # sum_m (c^2/2)^{2m} / (2m+1)!
        u2 = (c2 / 2.0) ** 2
        total, term, m = 1.0, 1.0, 0
        while term > 1e-17 * total:
            m += 1
            term *= u2 / ((2 * m) * (2 * m + 1))
            total += term
        return total
    try:
        return 2.0 / c2 * math.sinh(c2 / 2.0)
    except OverflowError:
        return math.inf


def _profile_s_series(c: float) -> float:
    # term-by-term integral of the q-series: c^{4m+1} / ((4m+1) 4^m (2m+1)!)
    total = c
    coef = 1.0  # 1 / (4^m (2m+1)!)
    m = 0
    while True:
        m += 1
        coef /= 4.0 * (2 * m) * (2 * m + 1)
        term = coef * c ** (4 * m + 1) / (4 * m + 1)
        total += term
        if term < 1e-15 * total:
            return total


def critical_profile_s(c: float) -> float:
    """int_0^c q(x) dx; multiply by sqrt(n) for the LRU energy."""
    if c < 0:
        raise ValueError("c must be >= 0")
    if c == 0:
        return 0.0
    if c <= S_SERIES_MAX_C:
        return _profile_s_series(c)
    head = _profile_s_series(S_SERIES_MAX_C)
    tail, _ = integrate.quad(critical_profile_q, S_SERIES_MAX_C, c,
                             epsabs=1e-12, epsrel=1e-13, limit=200)
    return head + tail


def supercritical_q_log(n: int, k: int) -> float:
    """log of n / ((k+1)(k+2)) * exp(n psi(k/n))."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    return math.log(n) - math.log((k + 1) * (k + 2)) + n * psi(k / n)


def supercritical_s_log(n: int, t: int) -> float:
    """log of Q_asymptotic(n, t) / log(1 + t/n)."""
    if n < 1 or t < 1:
        raise ValueError("need n >= 1 and t >= 1")
    return supercritical_q_log(n, t) - math.log(math.log1p(t / n))


def supercritical_s_log_simplified(n: int, t: int) -> float:
    """log of n^2 / t^3 * exp(n psi(t/n))."""
    if n < 1 or t < 1:
        raise ValueError("need n >= 1 and t >= 1")
    return 2.0 * math.log(n) - 3.0 * math.log(t) + n * psi(t / n)


def mesoscopic_q_log(n: int, k: int) -> float:
    """log of n / k^2 * exp(k^2 / (2n))."""
    return math.log(n) - 2.0 * math.log(k) + k * k / (2.0 * n)


def mesoscopic_s_log(n: int, t: int) -> float:
    """log of n^2 / t^3 * exp(t^2 / (2n))."""
    return 2.0 * math.log(n) - 3.0 * math.log(t) + t * t / (2.0 * n)


class Regime(str, enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL_SUBLINEAR = "supercritical_sublinear"


@dataclass(frozen=True)
class RegimeProfile:
    regime: Regime
    scaling_parameter: float
    mesoscopic: bool = False
    c_low: float = 0.1
    c_high: float = 10.0


def classify_regime(n: int, depth: int, c_low: float = 0.1, c_high: float = 10.0) -> RegimeProfile:
    """Place ``(n, depth)`` by ``c = depth / sqrt(n)``.

    Subcritical below ``c_low``, critical on ``[c_low, c_high)``, supercritical
    from ``c_high`` up to ``depth < n``.  Supercritical points with
    ``depth <= n^(2/3)`` are also marked mesoscopic.
    """
    if not 0 < c_low < c_high:
        raise ValueError("need 0 < c_low < c_high")
    if n < 1 or depth < 0:
        raise ValueError("need n >= 1 and depth >= 0")
    if depth >= n:
        raise BeyondSublinearError(
            f"depth {depth} >= n {n}: beyond the sublinear range, no law applies")
    c = depth / math.sqrt(n)
    if depth * depth < c_low * c_low * n:
        return RegimeProfile(Regime.SUBCRITICAL, c, False, c_low, c_high)
    if depth * depth < c_high * c_high * n:
        return RegimeProfile(Regime.CRITICAL, c, False, c_low, c_high)
    meso = depth ** 3 <= n * n
    return RegimeProfile(Regime.SUPERCRITICAL_SUBLINEAR, c, meso, c_low, c_high)


def _law_log(profile: RegimeProfile, n: int, depth: int, model: Model) -> float:
    if profile.regime is Regime.SUBCRITICAL:
        return 0.0 if model is Model.RNN else math.log(depth + 1)
    if profile.regime is Regime.CRITICAL:
        c = profile.scaling_parameter
        if model is Model.RNN:
            return math.log(critical_profile_q(c))
        return 0.5 * math.log(n) + math.log(critical_profile_s(c))
    if model is Model.RNN:
        return supercritical_q_log(n, depth)
    return supercritical_s_log(n, depth)


def asymptotic_curve(n: int, depths, model: Model = Model.RNN,
                     c_low: float = 0.1, c_high: float = 10.0) -> EnergyCurve:
    """The applicable regime law at each depth (``depth = 0`` uses the exact value 1)."""
    model = Model(model)
    rows = []
    for d in depths:
        profile = classify_regime(n, d, c_low, c_high)
        log_value = 0.0 if d == 0 else _law_log(profile, n, d, model)
        flags = (profile.regime.value,) + (("mesoscopic",) if profile.mesoscopic else ())
        rows.append(CurveRow(d, math.exp(log_value) if log_value < 709.0 else math.inf,
                             log_value, flags=flags))
    return EnergyCurve(n=n, model=model.value, source="asymptotic", rows=rows,
                       meta={"c_low": c_low, "c_high": c_high})
