"""Command line front end.

    rsl exact    --n 64 --depths 0..32 --model rnn --mode rational
    rsl simulate --n 64 --t-max 32 --samples 10000 --seed 7 --field complex
    rsl verify   [--max-k 7]
    rsl figure   {scaling_laws,mc_complex,mc_real} --n 32,64 --seed 1 --output-dir out/

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 budget or
resource guard.  Data goes to stdout or ``--output``; diagnostics go to
stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .asymptotics import (
    classify_regime,
    critical_profile_q,
    critical_profile_s,
    mesoscopic_q_log,
    mesoscopic_s_log,
    supercritical_q_log,
    supercritical_s_log,
)
from .combinatorial_oracle import BudgetError as EnumerationBudgetError
from .curves import read_table, write_table
from .exact_formulas import BudgetError, CovarianceSpec, Mode, Model, energy_curve, q_log_sequence
from .monte_carlo import (
    Field,
    InputModel,
    McConfig,
    ResourceError,
    estimates_to_curve,
    simulate_energies,
)
from .verify import run_verification

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
FIGURES = ("scaling_laws", "mc_complex", "mc_real")


class UsageError(Exception):
    pass


def parse_depths(text: str) -> range:
    a, sep, b = text.partition("..")
    try:
        lo, hi = (int(a), int(b)) if sep else (int(a), int(a))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"empty or negative depth range {text!r}")
    return range(lo, hi + 1)


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(output).write_text(text)


def _require_seed(args) -> int:
    if args.seed is None:
        raise UsageError(f"'{args.command}' is stochastic and needs an explicit --seed")
    return args.seed


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_exact(args) -> int:
    curve = energy_curve(args.n, args.depths, Model(args.model), Mode(args.mode))
    if args.seed is not None:
        curve.meta["seed"] = args.seed
    _emit(curve.to_csv() if args.format == "csv" else curve.to_json(), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    seed = _require_seed(args)
    covariance = None
    input_model = InputModel(args.input_model)
    if args.traces is not None:
        covariance = CovarianceSpec(args.traces)
        input_model = InputModel.CUSTOM
    cfg = McConfig(args.n, args.t_max, args.samples, seed, Field(args.field),
                   Model(args.model), input_model, covariance)
    curve = estimates_to_curve(cfg, simulate_energies(cfg, args.workers))
    flagged = sum(1 for r in curve.rows if any(f.startswith("nonfinite") for f in r.flags))
    if flagged:
        print(f"warning: {flagged} rows contain non-finite samples", file=sys.stderr)
    _emit(curve.to_csv() if args.format == "csv" else curve.to_json(), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_verification(max_k=args.max_k, max_n=args.max_n, max_m=args.max_m,
                              sweep_n=args.sweep_n, sweep_k=args.sweep_k,
                              inject_fault=args.inject_fault)
    _emit(report.render(), args.output)
    if not report.passed:
        bad = report.first_failure()
        print(f"verification failed: {bad.name}: {bad.detail}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _table_out(args, stem: str, columns, rows, meta) -> Path:
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        path = out_dir / f"{stem}.json"
        doc = {"tool": "rsl", "version": __version__, **meta, "columns": columns, "rows": rows}
        path.write_text(json.dumps(doc, indent=1) + "\n")
    else:
        path = out_dir / f"{stem}.csv"
        path.write_text(write_table(columns, rows, meta))
    print(f"wrote {path}", file=sys.stderr)
    return path


def _nan_if_none(x):
    return math.nan if x is None else x


def _figure_scaling_laws(args) -> None:
    for n in args.n:
        top = args.max_depth if args.max_depth is not None else min(n - 1, round(n ** (2 / 3)))
        if top >= n:
            raise UsageError("--max-depth must stay below n")
        q_logs = q_log_sequence(n, top)
        s_logs = energy_curve(n, range(top + 1), Model.LRU, Mode.LOGFLOAT)
        rows = []
        for d in range(top + 1):
            c = d / math.sqrt(n)
            regime = classify_regime(n, d)
            rows.append([
                d, c, regime.regime.value + ("+mesoscopic" if regime.mesoscopic else ""),
                float(q_logs[d]), s_logs.rows[d].log_value,
                0.0, math.log(d + 1),
                math.log(critical_profile_q(c)),
                0.5 * math.log(n) + math.log(critical_profile_s(c)) if d else math.nan,
                _nan_if_none(supercritical_q_log(n, d) if d else None),
                _nan_if_none(supercritical_s_log(n, d) if d else None),
                _nan_if_none(mesoscopic_q_log(n, d) if d else None),
                _nan_if_none(mesoscopic_s_log(n, d) if d else None),
            ])
        columns = ["depth", "c", "regime", "q_exact_log", "s_exact_log",
                   "q_subcritical_log", "s_subcritical_log",
                   "q_critical_log", "s_critical_log",
                   "q_supercritical_log", "s_supercritical_log",
                   "q_mesoscopic_log", "s_mesoscopic_log"]
        meta = {"figure": "scaling_laws", "n": n, "source": "exact+asymptotic",
                "mode": "logfloat"}
        _table_out(args, f"scaling_laws_n{n}", columns, rows, meta)


def _profile(model: Model, n: int, c: float) -> float:
    if model is Model.RNN:
        return critical_profile_q(c)
    return math.sqrt(n) * critical_profile_s(c)


def _figure_mc(args, field: Field) -> None:
    seed = _require_seed(args)
    models = [Model.RNN, Model.LRU] if args.model == "both" else [Model(args.model)]
    for n in args.n:
        grid = sorted(args.c_grid)
        depths = sorted({round(c * math.sqrt(n)) for c in grid})
        top = depths[-1]
        for model in models:
            cfg = McConfig(n, top, args.samples, seed, field, model)
            est = simulate_energies(cfg, args.workers)
            exact = energy_curve(n, range(top + 1), model, Mode.LOGFLOAT)
            rows = []
            for c in grid:
                d = round(c * math.sqrt(n))
                e = est[d]
                rows.append([c, d, e.mean, e.stderr, _profile(model, n, c),
                             exact.rows[d].value, ";".join(e.flags)])
            exact_col = "exact" if field is Field.COMPLEX else "complex_exact"
            columns = ["c", "depth", "mc_mean", "mc_stderr", "profile", exact_col, "flags"]
            meta = {"figure": f"mc_{field.value}", "n": n, "model": model.value,
                    "source": "mc", "seed": seed, "field": field.value,
                    "samples": args.samples}
            _table_out(args, f"mc_{field.value}_{model.value}_n{n}", columns, rows, meta)


def cmd_figure(args) -> int:
    if args.figure == "scaling_laws":
        _figure_scaling_laws(args)
    elif args.figure == "mc_complex":
        _figure_mc(args, Field.COMPLEX)
    else:
        _figure_mc(args, Field.REAL)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        value = -1
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=nonneg_int, default=None,
                        help="64-bit seed; required by stochastic commands")

    parser = argparse.ArgumentParser(prog="rsl", description=__doc__.splitlines()[0],
                                     parents=[common])
    parser.add_argument("--version", action="version", version=f"rsl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", parents=[common], help="exact Q (rnn) or S (lru) curve")
    p.add_argument("--n", type=positive_int, required=True)
    p.add_argument("--depths", type=parse_depths, required=True, help="inclusive range a..b")
    p.add_argument("--model", choices=[m.value for m in Model], default="rnn")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="rational")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo energy curve")
    p.add_argument("--n", type=positive_int, required=True)
    p.add_argument("--t-max", type=nonneg_int, required=True)
    p.add_argument("--samples", type=positive_int, default=10_000)
    p.add_argument("--field", choices=[f.value for f in Field], default="complex")
    p.add_argument("--model", choices=[m.value for m in Model], default="rnn")
    p.add_argument("--input-model", choices=["whitened", "constant"], default="whitened")
    p.add_argument("--traces", type=parse_float_list, default=None,
                   help="custom normalized input traces tr(Sigma_s)/n for s=0..t-max")
    p.add_argument("--workers", type=positive_int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="oracle equivalence suite")
    p.add_argument("--max-k", type=positive_int, default=7,
                   help="largest permutation size for the S_k enumerations")
    p.add_argument("--max-n", type=positive_int, default=6)
    p.add_argument("--max-m", type=positive_int, default=7,
                   help="largest M for the cycle-count distribution")
    p.add_argument("--sweep-n", type=positive_int, default=200)
    p.add_argument("--sweep-k", type=nonneg_int, default=400)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("figure", parents=[common], help="data behind a figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--n", type=parse_int_list, required=True, help="comma-separated widths")
    p.add_argument("--samples", type=positive_int, default=10_000)
    p.add_argument("--c-grid", type=parse_float_list,
                   default=[0.25 * i for i in range(13)], help="comma-separated c values")
    p.add_argument("--model", choices=["rnn", "lru", "both"], default="both")
    p.add_argument("--max-depth", type=nonneg_int, default=None)
    p.add_argument("--workers", type=positive_int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output-dir", default=".")
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BudgetError, EnumerationBudgetError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
