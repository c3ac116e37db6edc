"""Exact finite-width signal energies of linear recurrences.

With ``W`` drawn i.i.d. proper complex Gaussian with variance ``1/n`` and
whitened inputs, the RNN energy after ``k`` steps is

    Q(n, k) = (F+_{k+2}(n) - F-_{k+2}(n)) / (n^{k+1} (k+1) (k+2))

with rising/falling factorials ``F+``/``F-``, and the LRU energy is the prefix
sum ``S(n, t) = sum_{k<=t} Q(n, k)``.

Every energy is returned as an :class:`EnergyValue`.  ``Mode.RATIONAL``
evaluates the factorial formula in exact integer arithmetic;
``Mode.LOGFLOAT`` evaluates the log of the product form

    Q(n, k) = n / ((k+1)(k+2)) * (prod_j (1 + j/n) - prod_j (1 - j/n))

without overflow and without the cancellation between the two products
when ``k*k << n``.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .curves import CurveRow, EnergyCurve

__all__ = [
    "BudgetError",
    "CovarianceSpec",
    "EnergyQuery",
    "EnergyValue",
    "Mode",
    "Model",
    "energy_curve",
    "falling_factorial",
    "log_fraction",
    "q_exact",
    "q_log_sequence",
    "rising_factorial",
    "s_exact",
    "s_general_cov",
]

DEFAULT_MAX_BIGNUM_K = 10_000


class BudgetError(ValueError):
    """Exact evaluation was refused because it exceeds the bignum budget."""


class Mode(str, enum.Enum):
    RATIONAL = "rational"
    LOGFLOAT = "logfloat"


class Model(str, enum.Enum):
    RNN = "rnn"
    LRU = "lru"


def max_bignum_k() -> int:
    """Largest depth accepted by ``Mode.RATIONAL`` (env ``RSL_MAX_BIGNUM_K``)."""
    return int(os.environ.get("RSL_MAX_BIGNUM_K", DEFAULT_MAX_BIGNUM_K))


def log_fraction(x: Fraction) -> float:
    """Natural log of a positive rational, accurate for huge numerators/denominators.

    The ratio is first scaled by a power of two into [1, 2) so that a single
    float conversion carries full precision.
    """
    if x <= 0:
        raise ValueError("log of a non-positive rational")
    num, den = x.numerator, x.denominator
    shift = num.bit_length() - den.bit_length()
    if shift >= 0:
        den <<= shift
    else:
        num <<= -shift
    if num < den:
        num <<= 1
        shift -= 1
    return math.log(num / den) + shift * math.log(2.0)


@dataclass(frozen=True)
class EnergyValue:
    """A strictly positive signal energy (or the exact zero sentinel).

    ``log_value`` is the primary representation; ``value`` is ``exp(log_value)``
    and may be ``inf`` when it does not fit in a double.  ``rational`` is set
    only by ``Mode.RATIONAL``.
    """

    log_value: float
    value: float
    mode: Mode
    rational: Fraction | None = None

    def __post_init__(self):
        if math.isnan(self.log_value):
            raise ValueError("log_value must not be NaN")

    @classmethod
    def from_fraction(cls, x: Fraction) -> "EnergyValue":
        if x == 0:
            return cls(-math.inf, 0.0, Mode.RATIONAL, x)
        try:
            value = float(x)
        except OverflowError:
            value = math.inf
        return cls(log_fraction(x), value, Mode.RATIONAL, x)

    @classmethod
    def from_log(cls, log_value: float) -> "EnergyValue":
        if log_value == -math.inf:
            return cls(log_value, 0.0, Mode.LOGFLOAT)
        value = math.exp(log_value) if log_value < 709.78 else math.inf
        return cls(float(log_value), value, Mode.LOGFLOAT)


@dataclass(frozen=True)
class EnergyQuery:
    """Width ``n`` and recurrent depth (``k`` for the RNN, ``t`` for the LRU)."""

    n: int
    depth: int

    def __post_init__(self):
        _check_query(self.n, self.depth)


@dataclass(frozen=True)
class CovarianceSpec:
    """Normalized input traces ``tr(Sigma^{(s)}) / n`` for ``s = 0..t``."""

    normalized_traces: tuple

    def __init__(self, normalized_traces: Iterable):
        traces = tuple(normalized_traces)
        if not traces:
            raise ValueError("covariance sequence must be nonempty")
        if any(tr < 0 for tr in traces):
            raise ValueError("normalized traces must be nonnegative")
        object.__setattr__(self, "normalized_traces", traces)

    @property
    def t(self) -> int:
        return len(self.normalized_traces) - 1


def _check_query(n, depth):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"width must be an integer >= 1, got {n!r}")
    if not isinstance(depth, (int, np.integer)) or depth < 0:
        raise ValueError(f"depth must be an integer >= 0, got {depth!r}")


def _check_budget(k):
    cap = max_bignum_k()
    if k > cap:
        raise BudgetError(
            f"depth {k} exceeds the exact-arithmetic budget {cap}; use Mode.LOGFLOAT "
            "or raise RSL_MAX_BIGNUM_K")


def rising_factorial(x: int, p: int) -> int:
    """x (x+1) ... (x+p-1), exactly; 1 for p = 0."""
    return math.prod(range(x, x + p))


def falling_factorial(x: int, p: int) -> int:
    """x (x-1) ... (x-p+1), exactly; 0 whenever p > x."""
    return math.prod(range(x, x - p, -1))


# ---------------------------------------------------------------------------
# Q and S for whole depth ranges
# ---------------------------------------------------------------------------


def _q_fractions(n: int, k_max: int) -> list[Fraction]:
    """Exact Q(n, k) for k = 0..k_max using running factorial products."""
    out = []
    rise = n * (n + 1)
    fall = n * (n - 1)
    for k in range(k_max + 1):
        out.append(Fraction(rise - fall, n ** (k + 1) * (k + 1) * (k + 2)))
        rise *= n + k + 2
        fall *= n - k - 2
    return out


def q_log_sequence(n: int, k_max: int) -> np.ndarray:
    """log Q(n, k) for k = 0..k_max in double precision.

    Uses log-products of the product form; when ``k + 1 < n`` the difference
    of the two products is taken as ``P- * expm1(log P+ - log P-)`` so that
    nothing cancels, otherwise ``P-`` is exactly zero.
    """
    _check_query(n, k_max)
    plus, minus, diff = kernels.log_product_prefix(n, k_max + 2)
    ks = np.arange(k_max + 1)
    log_pref = math.log(n) - np.log((ks + 1.0) * (ks + 2.0))
    out = np.empty(k_max + 1)
    inside = ks + 1 < n
    idx = ks[inside] + 1
    out[inside] = minus[idx] + np.log(np.expm1(diff[idx]))
    out[~inside] = plus[ks[~inside] + 1]
    return out + log_pref


def _log_cumsum_exp(logs: Sequence[float]) -> list[float]:
    """Prefix values of log(sum exp(logs)), accumulated in order.

    The running sum is kept as ``exp(shift) * scaled`` and the shift moves up
    whenever a larger term arrives, so nothing overflows and the relative
    error grows only linearly in the number of terms.
    """
    shift, scaled = -math.inf, 0.0
    out = []
    for x in logs:
        if x > shift:
            scaled = scaled * math.exp(shift - x) + 1.0 if scaled else 1.0
            shift = x
        elif x != -math.inf:
            scaled += math.exp(x - shift)
        out.append(shift + math.log(scaled) if scaled else -math.inf)
    return out


def _logsumexp_running(logs: Sequence[float]) -> float:
    prefix = _log_cumsum_exp(logs)
    return prefix[-1] if prefix else -math.inf


def q_exact(n: int, k: int, mode: Mode = Mode.RATIONAL) -> EnergyValue:
    """RNN signal energy Q(n, k)."""
    _check_query(n, k)
    mode = Mode(mode)
    if mode is Mode.RATIONAL:
        _check_budget(k)
        num = rising_factorial(n, k + 2) - falling_factorial(n, k + 2)
        return EnergyValue.from_fraction(Fraction(num, n ** (k + 1) * (k + 1) * (k + 2)))
    return EnergyValue.from_log(float(q_log_sequence(n, k)[-1]))


def s_exact(n: int, t: int, mode: Mode = Mode.RATIONAL) -> EnergyValue:
    """LRU signal energy S(n, t) = sum of Q(n, k) over k <= t."""
    _check_query(n, t)
    mode = Mode(mode)
    if mode is Mode.RATIONAL:
        _check_budget(t)
        return EnergyValue.from_fraction(sum(_q_fractions(n, t), Fraction(0)))
    return EnergyValue.from_log(_logsumexp_running(q_log_sequence(n, t)))


def s_general_cov(n: int, cov: CovarianceSpec | Sequence, mode: Mode = Mode.RATIONAL) -> EnergyValue:
    """LRU energy for per-step input covariances with the given normalized traces.

    ``S = sum_k traces[t-k] * Q(n, k)``; reduces to :func:`s_exact` when every
    trace is one.  All-zero traces give the zero sentinel (``log_value = -inf``).
    """
    if not isinstance(cov, CovarianceSpec):
        cov = CovarianceSpec(cov)
    traces = cov.normalized_traces
    t = cov.t
    _check_query(n, t)
    mode = Mode(mode)
    if mode is Mode.RATIONAL:
        _check_budget(t)
        qs = _q_fractions(n, t)
        total = sum((Fraction(traces[t - k]) * qs[k] for k in range(t + 1)), Fraction(0))
        return EnergyValue.from_fraction(total)
    logq = q_log_sequence(n, t)
    terms = [math.log(traces[t - k]) + logq[k] if traces[t - k] > 0 else -math.inf
             for k in range(t + 1)]
    return EnergyValue.from_log(_logsumexp_running(terms))


def energy_curve(n: int, depths: range | Sequence[int], model: Model = Model.RNN,
                 mode: Mode = Mode.RATIONAL) -> EnergyCurve:
    """Exact Q (RNN) or S (LRU) for each depth of an inclusive range."""
    depths = list(depths)
    if not depths:
        raise ValueError("depth range must be nonempty")
    if any(b <= a for a, b in zip(depths, depths[1:])):
        raise ValueError("depths must be strictly increasing")
    model, mode = Model(model), Mode(mode)
    top = depths[-1]
    _check_query(n, top)
    _check_query(n, depths[0])
    rows = []
    if mode is Mode.RATIONAL:
        _check_budget(top)
        qs = _q_fractions(n, top)
        if model is Model.LRU:
            acc, vals = Fraction(0), []
            for q in qs:
                acc += q
                vals.append(acc)
        else:
            vals = qs
        for d in depths:
            ev = EnergyValue.from_fraction(vals[d])
            rows.append(CurveRow(d, ev.value, ev.log_value, exact=str(vals[d])))
    else:
        logq = q_log_sequence(n, top)
        if model is Model.LRU:
            logs = _log_cumsum_exp(logq)
        else:
            logs = list(logq)
        for d in depths:
            ev = EnergyValue.from_log(float(logs[d]))
            rows.append(CurveRow(d, ev.value, ev.log_value))
    return EnergyCurve(n=n, model=model.value, source="exact", rows=rows,
                       meta={"mode": mode.value})
