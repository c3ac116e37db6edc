"""Cross-checks between the closed forms and the permutation oracle."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import combinatorial_oracle as co
from .exact_formulas import _q_fractions, log_fraction, q_log_sequence


@dataclass
class Check:
    name: str
    passed: bool
    count: int
    detail: str = ""
    seconds: float = 0.0


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def permutation_witnesses(self) -> int:
        return self.checks[0].count if self.checks else 0

    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def render(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = f"[{status}] {c.name}: {c.count} checked ({c.seconds:.2f}s)"
            if c.detail:
                line += f" - {c.detail}"
            lines.append(line)
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def _one_based(row) -> tuple[int, ...]:
    return tuple(int(v) + 1 for v in row)


def run_verification(max_k: int = 7, max_n: int = 6, max_m: int = 7,
                     sweep_n: int = 200, sweep_k: int = 400,
                     inject_fault: bool = False) -> VerificationReport:
    """Run every equivalence check and collect a report.

    With ``inject_fault`` the free-index count of one permutation of ``S_max_k``
    is shifted by one before any comparison; the suite must then fail.
    """
    report = VerificationReport()

    # 1. direct constraint merging vs commutator cycle count
    start = time.perf_counter()
    free = {}
    witnesses, failure = 0, ""
    for k in range(1, max_k + 1):
        perms = co.all_permutations(k)
        direct = co.direct_free_counts(perms)
        comm = co.commutator_free_counts(perms).copy()
        if inject_fault and k == max_k:
            comm[-1] += 1
        free[k] = (perms, comm)
        witnesses += len(perms)
        bad = np.flatnonzero(direct != comm)
        if bad.size and not failure:
            i = bad[0]
            failure = (f"sigma={_one_based(perms[i])} k={k}: direct F={direct[i]} "
                       f"commutator F={comm[i]}")
    report.checks.append(Check("free-index count, direct vs commutator", not failure,
                               witnesses, failure, time.perf_counter() - start))

    # 2. defect bounds and a unique defect-0 pairing
    start = time.perf_counter()
    failure = ""
    for k, (perms, comm) in free.items():
        r = k + 1 - comm
        if (r.min() < 0 or r.max() > k or np.count_nonzero(r == 0) != 1) and not failure:
            i = int(np.flatnonzero((r < 0) | (r > k))[0]) if ((r < 0) | (r > k)).any() else 0
            failure = f"k={k}: defect range [{r.min()}, {r.max()}], sigma={_one_based(perms[i])}"
        if r[0] != 0 and not failure:
            failure = f"k={k}: identity has defect {r[0]}"
    report.checks.append(Check("defect bounds and unique identity", not failure,
                               len(free), failure, time.perf_counter() - start))

    # 3. oracle sum vs closed form
    start = time.perf_counter()
    failure, count = "", 0
    for k in range(0, max_k + 1):
        if k == 0:
            hist = {0: 1}
        else:
            perms, comm = free[k]
            r_vals, counts = np.unique(k + 1 - comm, return_counts=True)
            hist = dict(zip(r_vals.tolist(), counts.tolist()))
        for n in range(1, max_n + 1):
            oracle = sum((Fraction(c, n ** r) for r, c in hist.items()), Fraction(0))
            closed = _q_fractions(n, k)[k]
            count += 1
            if oracle != closed and not failure:
                witness = ""
                if k and inject_fault and k == max_k:
                    witness = f" sigma={_one_based(free[k][0][-1])}"
                failure = f"n={n} k={k}{witness}: oracle {oracle} != closed form {closed}"
    report.checks.append(Check("trace moment oracle vs closed form", not failure, count,
                               failure, time.perf_counter() - start))

    # 4. cycle-count distribution vs Hultman polynomial, plus parity observation
    start = time.perf_counter()
    failure, parities = "", set()
    for M in range(1, max_m + 1):
        dist = co.cycle_count_distribution(M, budget=max_m)
        poly = co.hultman_polynomial(M)
        if dist != poly and not failure:
            failure = f"M={M}: enumerated {dist.coeffs} != formula {poly.coeffs}"
        if dist.total() != math.factorial(M) and not failure:
            failure = f"M={M}: {dist.total()} cycles, expected {math.factorial(M)}"
        parities.add(all(c % 2 == (M + 1) % 2 for c in dist.coeffs))
    note = failure or ("cycle counts all share the parity of M+1" if parities == {True}
                       else "mixed cycle-count parities observed")
    report.checks.append(Check("cycle distribution vs Hultman polynomial", not failure,
                               max_m, note, time.perf_counter() - start))

    # 5. conjugation bijection onto full cycles
    start = time.perf_counter()
    bad = [k for k in range(1, max_m + 1) if not co.uniform_cycle_bijection_check(k, budget=max_m)]
    report.checks.append(Check("stabilizer conjugation is a bijection onto full cycles",
                               not bad, max_m, f"fails at k={bad[0]}" if bad else "",
                               time.perf_counter() - start))

    # 6. LogFloat vs Rational
    start = time.perf_counter()
    worst, where = 0.0, None
    for n in range(1, sweep_n + 1):
        exact = _q_fractions(n, sweep_k)
        logs = q_log_sequence(n, sweep_k)
        for k in range(sweep_k + 1):
            err = abs(math.expm1(logs[k] - log_fraction(exact[k])))
            if err > worst:
                worst, where = err, (n, k)
    ok = worst <= 1e-12
    detail = f"max relative error {worst:.3g} at (n, k)={where}"
    report.checks.append(Check("LogFloat vs Rational agreement (<= 1e-12)", ok,
                               sweep_n * (sweep_k + 1), detail, time.perf_counter() - start))
    return report
