"""Brute-force permutation machinery behind the trace moment.

The normalized trace moment ``E[tr((W^k)^* W^k)] / n`` of a complex Ginibre
matrix with entry variance ``1/n`` is a sum over the Wick pairings
``sigma in S_k`` of ``n^{-r(sigma)}``, where the defect
``r = k + 1 - F(sigma)`` comes from the number ``F`` of index classes left
free by the pairing's Kronecker constraints.  This module recomputes that sum
by enumeration, with ``F`` obtained either by merging the index constraints
directly or as the cycle count of the commutator
``tau^{-1} sigma~^{-1} tau sigma~`` (``tau = (0 1 ... k)``, ``sigma~`` the
extension of ``sigma`` fixing 0).  None of it uses the closed form, so it can
serve as an oracle for :mod:`rsl.exact_formulas`.

Permutations in the public API are 1-based one-line tuples:
``sigma[i-1] = sigma(i)``.  Products compose right to left.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels

__all__ = [
    "BudgetError",
    "CyclePolynomial",
    "WickPermutation",
    "all_permutations",
    "commutator_free_counts",
    "cycle_count_distribution",
    "defect_histogram",
    "direct_free_counts",
    "free_index_count_commutator",
    "free_index_count_direct",
    "full_cycles",
    "hultman_polynomial",
    "trace_moment_oracle",
    "uniform_cycle_bijection_check",
]

DEFAULT_MAX_K = 8
DEFAULT_MAX_M = 7


class BudgetError(ValueError):
    """Enumeration refused because it exceeds the configured budget."""


def _budget(default: int) -> int:
    env = os.environ.get("RSL_MAX_K")
    return int(env) if env else default


def _check_budget(value: int, budget: int | None, default: int, what: str) -> None:
    cap = _budget(default) if budget is None else budget
    if value > cap:
        raise BudgetError(f"{what}={value} exceeds the enumeration budget {cap}")


def _validate_sigma(sigma: Sequence[int]) -> np.ndarray:
    arr = np.asarray(sigma, dtype=np.int64)
    k = arr.size
    if arr.ndim != 1 or k < 1:
        raise ValueError("sigma must be a nonempty one-line permutation")
    if sorted(arr.tolist()) != list(range(1, k + 1)):
        raise ValueError(f"{tuple(sigma)} is not a bijection on {{1..{k}}}")
    return arr - 1


def all_permutations(k: int) -> np.ndarray:
    """All of S_k as a ``(k!, k)`` array of 0-based one-line permutations."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.permutations(range(k))), dtype=np.int64)


# ---------------------------------------------------------------------------
# free-index counts
# ---------------------------------------------------------------------------


def _constraint_edges(perms: np.ndarray) -> np.ndarray:
    """Kronecker identifications of each pairing, as symbol pairs.

    Symbols: ``a_i -> i`` for ``i = 0..k`` and ``b_j -> k + j`` for
    ``j = 1..k-1``; ``b_0`` and ``b_k`` are aliases of ``a_0`` and ``a_k``.
    Pairing ``r`` (1-based) imposes ``a_{r-1} = b_{sigma(r)-1}`` and
    ``a_r = b_{sigma(r)}``.
    """
    m, k = perms.shape
    b_symbol = np.array([0] + [k + j for j in range(1, k)] + [k], dtype=np.int64)
    sig = perms + 1
    r = np.arange(1, k + 1)
    first = np.stack([np.broadcast_to(r - 1, (m, k)), b_symbol[sig - 1]], axis=-1)
    second = np.stack([np.broadcast_to(r, (m, k)), b_symbol[sig]], axis=-1)
    return np.concatenate([first, second], axis=1)


def direct_free_counts(perms: np.ndarray) -> np.ndarray:
    """F(sigma) for every row of ``perms`` by union-find over the 2k symbols."""
    perms = np.asarray(perms, dtype=np.int64)
    k = perms.shape[1]
    return kernels.class_counts(_constraint_edges(perms), 2 * k)


def commutator_free_counts(perms: np.ndarray) -> np.ndarray:
    """F(sigma) for every row of ``perms`` as cycles of [tau^-1, sigma~^-1]."""
    perms = np.asarray(perms, dtype=np.int64)
    m, k = perms.shape
    ext = np.concatenate([np.zeros((m, 1), dtype=np.int64), perms + 1], axis=1)
    ext_inv = np.empty_like(ext)
    rows = np.arange(m)[:, None]
    ext_inv[rows, ext] = np.arange(k + 1)
    tau = (np.arange(k + 1) + 1) % (k + 1)
    tau_inv = (np.arange(k + 1) - 1) % (k + 1)
    comm = tau_inv[ext_inv[rows, tau[ext]]]
    return kernels.cycle_counts(comm)


def free_index_count_direct(sigma: Sequence[int]) -> int:
    perm = _validate_sigma(sigma)
    return int(direct_free_counts(perm[None, :])[0])


def free_index_count_commutator(sigma: Sequence[int]) -> int:
    perm = _validate_sigma(sigma)
    return int(commutator_free_counts(perm[None, :])[0])


@dataclass(frozen=True)
class WickPermutation:
    """A pairing sigma in S_k together with its free-index count and defect."""

    sigma: tuple[int, ...]
    free_indices: int
    defect: int

    @classmethod
    def from_sigma(cls, sigma: Sequence[int]) -> "WickPermutation":
        f = free_index_count_commutator(sigma)
        return cls(tuple(int(s) for s in sigma), f, len(sigma) + 1 - f)


# ---------------------------------------------------------------------------
# trace moment
# ---------------------------------------------------------------------------


def defect_histogram(k: int, budget: int | None = None) -> dict[int, int]:
    """Number of sigma in S_k with each defect r(sigma)."""
    _check_budget(k, budget, DEFAULT_MAX_K, "k")
    if k == 0:
        return {0: 1}
    f = commutator_free_counts(all_permutations(k))
    r, counts = np.unique(k + 1 - f, return_counts=True)
    return {int(a): int(b) for a, b in zip(r, counts)}


def trace_moment_oracle(n: int, k: int, budget: int | None = None) -> Fraction:
    """Exact ``E[tr((W^k)^* W^k)] / n`` as ``sum_sigma n^{-r(sigma)}``.

    ``k = 0`` gives 1 (``tr(I)/n``).
    """
    if n < 1:
        raise ValueError("width must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    hist = defect_histogram(k, budget)
    return sum((Fraction(c, n ** r) for r, c in hist.items()), Fraction(0))


# ---------------------------------------------------------------------------
# cycle counts of tau^{-1} c over full cycles c
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CyclePolynomial:
    """Multiplicity of each cycle count; equivalently ``sum_c mult[c] t^c``."""

    coeffs: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(c): int(m) for c, m in self.coeffs.items() if m}
        if any(m < 0 for m in clean.values()):
            raise ValueError("multiplicities must be nonnegative")
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def total(self) -> int:
        return sum(self.coeffs.values())

    def __call__(self, t):
        return sum(m * t ** c for c, m in self.coeffs.items())

    def parities(self) -> set[int]:
        return {c % 2 for c in self.coeffs}


def full_cycles(size: int) -> np.ndarray:
    """Every ``size``-cycle on {0..size-1}, one per ordering of 1..size-1.

    The cycle ``(0 p_1 ... p_{size-1})`` is returned in one-line form.
    """
    orders = all_permutations(size - 1) + 1
    m = orders.shape[0]
    seq = np.concatenate([np.zeros((m, 1), dtype=np.int64), orders], axis=1)
    out = np.empty_like(seq)
    rows = np.arange(m)[:, None]
    out[rows, seq] = np.roll(seq, -1, axis=1)
    return out


def cycle_count_distribution(M: int, budget: int | None = None) -> CyclePolynomial:
    """Tally of the cycle count of ``tau^{-1} c`` over all (M+1)-cycles c."""
    if M < 1:
        raise ValueError("M must be >= 1")
    _check_budget(M, budget, DEFAULT_MAX_M, "M")
    cycles = full_cycles(M + 1)
    tau_inv = (np.arange(M + 1) - 1) % (M + 1)
    counts = kernels.cycle_counts(tau_inv[cycles])
    c, mult = np.unique(counts, return_counts=True)
    return CyclePolynomial({int(a): int(b) for a, b in zip(c, mult)})


def _poly_mul_linear(poly: list[int], shift: int) -> list[int]:
    """Multiply an integer polynomial (ascending coefficients) by (t + shift)."""
    out = [0] * (len(poly) + 1)
    for i, a in enumerate(poly):
        out[i + 1] += a
        out[i] += shift * a
    return out


def hultman_polynomial(M: int) -> CyclePolynomial:
    """Expand ``M! (F+_{M+2}(t) - F-_{M+2}(t)) / (M+2)!`` into integer coefficients."""
    if M < 1:
        raise ValueError("M must be >= 1")
    rise, fall = [1], [1]
    for j in range(M + 2):
        rise = _poly_mul_linear(rise, j)
        fall = _poly_mul_linear(fall, -j)
    scale = (M + 1) * (M + 2)
    coeffs = {}
    for c, (a, b) in enumerate(zip(rise, fall)):
        q, rem = divmod(a - b, scale)
        if rem:
            raise ArithmeticError(f"coefficient of t^{c} is not integral")
        coeffs[c] = q
    return CyclePolynomial(coeffs)


def uniform_cycle_bijection_check(k: int, budget: int | None = None) -> bool:
    """Check that pi -> pi^{-1} tau pi maps {pi : pi(0) = 0} onto the (k+1)-cycles."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _check_budget(k, budget, DEFAULT_MAX_M, "k")
    stab = np.concatenate(
        [np.zeros((math.factorial(k), 1), dtype=np.int64), all_permutations(k) + 1], axis=1)
    m = stab.shape[0]
    rows = np.arange(m)[:, None]
    inv = np.empty_like(stab)
    inv[rows, stab] = np.arange(k + 1)
    tau = (np.arange(k + 1) + 1) % (k + 1)
    images = inv[rows, tau[stab]]
    if not np.all(kernels.cycle_counts(images) == 1):
        return False
    image_set = {tuple(row) for row in images.tolist()}
    cycle_set = {tuple(row) for row in full_cycles(k + 1).tolist()}
    return len(image_set) == m == math.factorial(k) and image_set == cycle_set
