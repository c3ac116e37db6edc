from rsl.verify import run_verification


def test_default_suite_passes():
    report = run_verification(sweep_n=40, sweep_k=80)
    assert report.passed
    assert report.permutation_witnesses == 5913  # 1! + ... + 7!
    assert report.render().endswith("overall: PASS\n")


def test_small_budget_witness_count():
    report = run_verification(max_k=3, max_n=3, max_m=3, sweep_n=4, sweep_k=4)
    assert report.passed and report.permutation_witnesses == 9


def test_fault_is_caught_with_witness():
    report = run_verification(max_k=5, max_m=4, sweep_n=3, sweep_k=3, inject_fault=True)
    assert not report.passed
    bad = report.first_failure()
    assert "sigma=(5, 4, 3, 2, 1)" in bad.detail and "k=5" in bad.detail
