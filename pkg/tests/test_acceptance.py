"""Acceptance criteria, one test per criterion.

Each test records its verdict through the ``record`` fixture; the terminal
summary prints one PASS/FAIL line per criterion after the run.  Run alone with

    pytest tests/test_acceptance.py -v
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from rsl import combinatorial_oracle as co
from rsl.asymptotics import (
    critical_profile_q,
    critical_profile_s,
    supercritical_q_log,
    supercritical_s_log,
)
from rsl.cli import main
from rsl.exact_formulas import Mode, Model, _q_fractions, log_fraction, q_exact, q_log_sequence, s_exact
from rsl.monte_carlo import Field, McConfig, real_vs_complex_reports, simulate_energies

pytestmark = pytest.mark.acceptance

# one-sided 95% level for "strictly greater beyond noise"
BEYOND_NOISE_Z = 1.645


def test_01_oracle_equivalence(record):
    start = time.perf_counter()
    mismatches = [(n, k) for n in range(1, 7) for k in range(8)
                  if co.trace_moment_oracle(n, k) != q_exact(n, k).rational]
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 10
    record(1, "oracle sum equals closed form, n<=6, k<=7", ok,
           f"{48 - len(mismatches)}/48 exact, {elapsed:.2f}s")
    assert not mismatches, mismatches
    assert elapsed < 10


def test_02_commutator_identity(record):
    start = time.perf_counter()
    checked, bad = 0, []
    for k in range(1, 8):
        perms = co.all_permutations(k)
        direct = co.direct_free_counts(perms)
        comm = co.commutator_free_counts(perms)
        checked += len(perms)
        bad += [tuple(perms[i] + 1) for i in np.flatnonzero(direct != comm)]
    elapsed = time.perf_counter() - start
    record(2, "direct free-index count equals commutator cycle count, k<=7",
           not bad and elapsed < 10, f"{checked} permutations, {elapsed:.2f}s")
    assert not bad, bad[:5]
    assert elapsed < 10


def test_03_hultman(record):
    start = time.perf_counter()
    bad = [M for M in range(1, 8) if co.cycle_count_distribution(M) != co.hultman_polynomial(M)]
    elapsed = time.perf_counter() - start
    record(3, "cycle-count distribution equals Hultman polynomial, M<=7",
           not bad and elapsed < 30, f"{elapsed:.2f}s")
    assert not bad
    assert elapsed < 30


def test_04_mode_agreement(record):
    start = time.perf_counter()
    worst = 0.0
    for n in range(1, 201):
        exact = _q_fractions(n, 400)
        logs = q_log_sequence(n, 400)
        for k in range(401):
            worst = max(worst, abs(math.expm1(logs[k] - log_fraction(exact[k]))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 60
    record(4, "LogFloat vs Rational within 1e-12, n<=200, k<=400", ok,
           f"max rel err {worst:.2e}, {elapsed:.1f}s")
    assert worst <= 1e-12
    assert elapsed < 60


def test_05_spot_values(record):
    failures = []
    for n in (1, 2, 3, 10, 64, 1000):
        if not q_exact(n, 0).rational == q_exact(n, 1).rational == 1:
            failures.append(("Q0/Q1", n))
        if q_exact(n, 2).rational != 1 + Fraction(1, n * n):
            failures.append(("Q2", n))
    failures += [("Q1k", k) for k in range(13) if q_exact(1, k).rational != math.factorial(k)]
    record(5, "closed-form spot values", not failures, str(failures) if failures else "")
    assert not failures


def test_06_subcritical(record):
    start = time.perf_counter()
    dq, ds = [], []
    for n in (10**2, 10**3, 10**4, 10**5):
        k = math.floor(n**0.4)
        dq.append(abs(q_exact(n, k, Mode.LOGFLOAT).value - 1))
        ds.append(abs(s_exact(n, k, Mode.LOGFLOAT).value / (k + 1) - 1))
    elapsed = time.perf_counter() - start
    mono = all(b < a for a, b in zip(dq, dq[1:])) and all(b < a for a, b in zip(ds, ds[1:]))
    ok = dq[-1] <= 0.01 and ds[-1] <= 0.01 and mono and elapsed < 10
    record(6, "subcritical Q->1 and S~t+1", ok,
           f"|Q-1|={dq[-1]:.1e}, |S/(t+1)-1|={ds[-1]:.1e}, monotone={mono}, {elapsed:.2f}s")
    assert ok, (dq, ds)


def test_07_critical(record):
    start = time.perf_counter()
    n = 10**4
    errs = {}
    for c in (0.5, 1.0, 2.0):
        k = math.floor(c * math.sqrt(n))
        eq = abs(q_exact(n, k, Mode.LOGFLOAT).value / critical_profile_q(c) - 1)
        es = abs(s_exact(n, k, Mode.LOGFLOAT).value / (math.sqrt(n) * critical_profile_s(c)) - 1)
        errs[c] = (eq, es)
    q1, s1 = critical_profile_q(1.0), critical_profile_s(1.0)
    refs_ok = abs(q1 - 1.0421906) <= 1e-6 and abs(s1 - 1.0083912) <= 1e-6
    elapsed = time.perf_counter() - start
    worst = max(max(v) for v in errs.values())
    ok = worst <= 0.1 and refs_ok and elapsed < 30
    record(7, "critical profiles at n=1e4, c in {0.5,1,2}", ok,
           f"worst rel dev {worst:.1e}, q(1)={q1:.7f}, int q={s1:.7f}, {elapsed:.2f}s")
    assert worst <= 0.1, errs
    assert refs_ok
    assert elapsed < 30


def test_08_supercritical(record):
    start = time.perf_counter()
    n, d = 10**6, 10**4
    gap_q = q_exact(n, d, Mode.LOGFLOAT).log_value - supercritical_q_log(n, d)
    gap_s = s_exact(n, d, Mode.LOGFLOAT).log_value - supercritical_s_log(n, d)
    elapsed = time.perf_counter() - start
    ok = abs(gap_q) <= 0.05 and abs(gap_s) <= 0.1 and elapsed < 60
    record(8, "supercritical log-gaps at n=1e6, depth=1e4", ok,
           f"Q gap {gap_q:+.4f}, S gap {gap_s:+.4f}, {elapsed:.2f}s")
    assert ok


def test_09_monte_carlo(record):
    start = time.perf_counter()
    hits = total = 0
    for n in (32, 64):
        top = math.floor(4 * math.sqrt(n))
        for model in (Model.RNN, Model.LRU):
            est = simulate_energies(McConfig(n, top, 10**4, 1, Field.COMPLEX, model))
            exact = q_exact if model is Model.RNN else s_exact
            for e in est:
                ref = exact(n, e.depth, Mode.LOGFLOAT).value
                hits += abs(e.mean - ref) <= 5 * e.stderr
                total += 1
    elapsed = time.perf_counter() - start
    frac = hits / total
    ok = frac >= 0.95 and elapsed < 900
    record(9, "Monte Carlo vs exact, complex, n in {32,64}, depth<=4 sqrt n", ok,
           f"{hits}/{total} rows within 5 stderr, {elapsed:.1f}s")
    assert ok


def test_10_real_lower_bound(record):
    start = time.perf_counter()
    lines, ok = [], True
    for model in (Model.RNN, Model.LRU):
        reports = real_vs_complex_reports(64, [8, 16, 24], 10**4, 1, model)
        ok &= all(r.passed for r in reports)
        ok &= reports[-1].gap_in_stderr > BEYOND_NOISE_Z
        lines.append(f"{model.value}: " + ", ".join(f"{r.gap_in_stderr:+.2f}" for r in reports))
    elapsed = time.perf_counter() - start
    ok &= elapsed < 900
    record(10, "real-weight energy >= complex, n=64", ok,
           "; ".join(lines) + f" stderr gaps, {elapsed:.1f}s")
    assert ok


def test_11_determinism(record, tmp_path):
    outputs = []
    for workers in (1, 8):
        path = tmp_path / f"w{workers}.csv"
        code = main(["simulate", "--n", "16", "--t-max", "12", "--samples", "2000",
                     "--seed", "123", "--workers", str(workers), "--output", str(path)])
        assert code == 0
        outputs.append(path.read_bytes())
    same = outputs[0] == outputs[1]
    record(11, "simulate output byte-identical for 1 and 8 workers", same,
           f"{len(outputs[0])} bytes")
    assert same


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
