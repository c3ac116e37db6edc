import json
import subprocess
import sys

import pytest

from rsl.cli import main
from rsl.curves import EnergyCurve, read_table


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestExact:
    def test_rational_csv(self, capsys):
        code, out, _ = run(capsys, "exact", "--n", "4", "--depths", "0..4")
        assert code == 0
        curve = EnergyCurve.from_csv(out)
        assert [r.exact for r in curve.rows] == ["1", "1", "17/16", "21/16", "63/32"]
        assert curve.meta["mode"] == "rational"

    def test_logfloat_json(self, capsys):
        code, out, _ = run(capsys, "exact", "--n", "64", "--depths", "2..5", "--model", "lru",
                           "--mode", "logfloat", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["model"] == "lru" and [r["depth"] for r in doc["rows"]] == [2, 3, 4, 5]

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "q.csv"
        code, out, _ = run(capsys, "exact", "--n", "3", "--depths", "0..2", "--output", str(target))
        assert code == 0 and out == ""
        assert target.read_text().startswith("# tool=rsl")

    def test_budget_exit(self, capsys, monkeypatch):
        monkeypatch.setenv("RSL_MAX_BIGNUM_K", "10")
        code, out, err = run(capsys, "exact", "--n", "4", "--depths", "0..20")
        assert code == 3 and out == "" and "budget" in err

    @pytest.mark.parametrize("bad", [["--depths", "5..2"], ["--depths", "x"], ["--n", "0"]])
    def test_usage_errors(self, capsys, bad):
        argv = ["exact", "--n", "4", "--depths", "0..2"] + bad
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2

    def test_seed_is_recorded(self, capsys):
        code, out, _ = run(capsys, "exact", "--n", "4", "--depths", "0..3", "--seed", "1")
        assert code == 0 and EnergyCurve.from_csv(out).meta["seed"] == 1


class TestSimulate:
    def test_requires_seed(self, capsys):
        code, out, err = run(capsys, "simulate", "--n", "4", "--t-max", "2", "--samples", "10")
        assert code == 2 and "seed" in err

    def test_workers_byte_identical(self, tmp_path, capsys):
        paths = []
        for w in (1, 3):
            p = tmp_path / f"w{w}.csv"
            assert main(["simulate", "--n", "6", "--t-max", "5", "--samples", "300",
                         "--seed", "9", "--workers", str(w), "--output", str(p)]) == 0
            paths.append(p)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_custom_traces(self, capsys):
        code, out, _ = run(capsys, "simulate", "--n", "4", "--t-max", "2", "--samples", "20",
                           "--seed", "1", "--model", "lru", "--traces", "1,0.5,2")
        assert code == 0
        assert EnergyCurve.from_csv(out).meta["input_model"] == "custom"

    def test_resource_guard(self, capsys, monkeypatch):
        monkeypatch.setenv("RSL_MAX_MC_WORK", "10")
        code, _, err = run(capsys, "simulate", "--n", "4", "--t-max", "2", "--samples", "20",
                           "--seed", "1")
        assert code == 3 and "RSL_MAX_MC_WORK" in err


class TestVerify:
    def test_small_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "--max-k", "3", "--max-m", "3",
                           "--sweep-n", "5", "--sweep-k", "5")
        assert code == 0
        assert "9 checked" in out and out.strip().endswith("overall: PASS")

    def test_injected_fault(self, capsys):
        code, out, err = run(capsys, "verify", "--max-k", "4", "--max-m", "3",
                             "--sweep-n", "3", "--sweep-k", "3", "--inject-fault")
        assert code == 1
        assert "sigma=(4, 3, 2, 1)" in err and "k=4" in err


class TestFigure:
    def test_scaling_laws(self, tmp_path, capsys):
        code, _, err = run(capsys, "figure", "scaling_laws", "--n", "50,200",
                           "--output-dir", str(tmp_path))
        assert code == 0
        meta, rows = read_table((tmp_path / "scaling_laws_n200.csv").read_text())
        assert meta["figure"] == "scaling_laws"
        assert int(rows[-1]["depth"]) == round(200 ** (2 / 3))
        assert rows[0]["regime"] == "subcritical"

    def test_mc_complex(self, tmp_path, capsys):
        code, _, _ = run(capsys, "figure", "mc_complex", "--n", "9", "--samples", "50",
                         "--seed", "4", "--c-grid", "0,1,2", "--output-dir", str(tmp_path))
        assert code == 0
        for model in ("rnn", "lru"):
            meta, rows = read_table((tmp_path / f"mc_complex_{model}_n9.csv").read_text())
            assert meta["seed"] == "4" and [r["depth"] for r in rows] == ["0", "3", "6"]

    def test_mc_real_single_model(self, tmp_path, capsys):
        code, _, _ = run(capsys, "figure", "mc_real", "--n", "9", "--samples", "20",
                         "--seed", "4", "--model", "rnn", "--c-grid", "1",
                         "--output-dir", str(tmp_path))
        assert code == 0
        meta, rows = read_table((tmp_path / "mc_real_rnn_n9.csv").read_text())
        assert "complex_exact" in rows[0]
        assert not (tmp_path / "mc_real_lru_n9.csv").exists()

    def test_mc_needs_seed(self, tmp_path, capsys):
        code, _, _ = run(capsys, "figure", "mc_real", "--n", "9", "--output-dir", str(tmp_path))
        assert code == 2

    def test_unknown_figure(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["figure", "nope", "--n", "4"])
        assert exc.value.code == 2


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "rsl.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("rsl ")
