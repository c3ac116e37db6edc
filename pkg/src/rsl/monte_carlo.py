"""Monte Carlo estimates of the RNN and LRU signal energies.

Each sample draws its own weight matrix and input sequence from a Philox
stream keyed by ``(seed, sample_index)``, so the result of a run depends only
on the configuration and never on how samples are spread over workers.
Samples are processed in fixed-size chunks; per-chunk moments are merged in
chunk order.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .curves import CurveRow, EnergyCurve
from .exact_formulas import CovarianceSpec, Model

__all__ = [
    "CHUNK",
    "Field",
    "InputModel",
    "McConfig",
    "McEstimate",
    "RealComplexReport",
    "ResourceError",
    "estimates_to_curve",
    "real_vs_complex_check",
    "real_vs_complex_reports",
    "sample_energies",
    "sample_rng",
    "sample_weight_matrix",
    "simulate_energies",
]

CHUNK = 128
DEFAULT_MAX_WORK = 5 * 10**9


class ResourceError(ValueError):
    """The requested run exceeds the Monte Carlo work guard."""


class Field(str, enum.Enum):
    COMPLEX = "complex"
    REAL = "real"


class InputModel(str, enum.Enum):
    WHITENED_IID = "whitened"
    CONSTANT_VECTOR = "constant"
    CUSTOM = "custom"


@dataclass(frozen=True)
class McConfig:
    n: int
    t_max: int
    samples: int
    seed: int
    field: Field = Field.COMPLEX
    model: Model = Model.RNN
    input_model: InputModel = InputModel.WHITENED_IID
    covariance: CovarianceSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "field", Field(self.field))
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "input_model", InputModel(self.input_model))
        if self.n < 1 or self.t_max < 0 or self.samples < 1:
            raise ValueError("need n >= 1, t_max >= 0 and samples >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.input_model is InputModel.CUSTOM:
            if self.covariance is None or self.covariance.t < self.t_max:
                raise ValueError("custom inputs need t_max + 1 normalized traces")


@dataclass(frozen=True)
class McEstimate:
    depth: int
    mean: float
    stderr: float
    samples: int
    nonfinite: int = 0
    flags: tuple[str, ...] = field(default=())


def max_work() -> int:
    return int(os.environ.get("RSL_MAX_MC_WORK", DEFAULT_MAX_WORK))


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one sample."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_weight_matrix(n: int, field: Field | str, rng: np.random.Generator) -> np.ndarray:
    """Glorot-scaled Gaussian matrix.

    Complex entries have independent real and imaginary parts of variance
    ``1/(2n)`` (so ``E|W_ij|^2 = 1/n`` and ``E W_ij^2 = 0``); real entries have
    variance ``1/n``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if Field(field) is Field.COMPLEX:
        scale = math.sqrt(0.5 / n)
        re = rng.standard_normal((n, n))
        im = rng.standard_normal((n, n))
        return (re + 1j * im) * scale
    return rng.standard_normal((n, n)) * math.sqrt(1.0 / n)


def _draw_inputs(cfg: McConfig, rng: np.random.Generator) -> np.ndarray:
    steps = cfg.t_max + 1 if cfg.model is Model.LRU else 1
    if cfg.input_model is InputModel.CONSTANT_VECTOR:
        return np.broadcast_to(rng.standard_normal(cfg.n), (steps, cfg.n))
    x = rng.standard_normal((steps, cfg.n))
    if cfg.input_model is InputModel.CUSTOM:
        scale = np.sqrt(np.asarray(cfg.covariance.normalized_traces[:steps], dtype=float))
        x *= scale[:, None]
    return x


def sample_energies(cfg: McConfig, start: int, stop: int) -> np.ndarray:
    """Per-sample energies ``|h^{(t)}|^2 / n`` for samples ``start..stop-1``."""
    count = stop - start
    dtype = np.complex128 if cfg.field is Field.COMPLEX else np.float64
    steps = cfg.t_max + 1 if cfg.model is Model.LRU else 1
    W = np.empty((count, cfg.n, cfg.n), dtype=dtype)
    X = np.empty((count, steps, cfg.n))
    for i in range(count):
        rng = sample_rng(cfg.seed, start + i)
        W[i] = sample_weight_matrix(cfg.n, cfg.field, rng)
        X[i] = _draw_inputs(cfg, rng)
    return kernels.recurrence_energies(W, X, cfg.t_max, cfg.model is Model.LRU)


def _chunk_moments(cfg: McConfig, chunk: int):
    start = chunk * CHUNK
    stop = min(cfg.samples, start + CHUNK)
    energies = sample_energies(cfg, start, stop)
    finite = np.isfinite(energies)
    count = finite.sum(axis=0)
    safe = np.where(finite, energies, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(count > 0, safe.sum(axis=0) / np.maximum(count, 1), 0.0)
        m2 = np.where(finite, (safe - mean) ** 2, 0.0).sum(axis=0)
    return count, mean, m2


def _merge(acc, part):
    """Chan et al. pairwise combination of (count, mean, M2)."""
    if acc is None:
        return part
    na, ma, sa = acc
    nb, mb, sb = part
    n = na + nb
    with np.errstate(invalid="ignore", divide="ignore"):
        delta = mb - ma
        frac = np.where(n > 0, nb / np.maximum(n, 1), 0.0)
        mean = ma + delta * frac
        m2 = sa + sb + np.where(n > 0, delta**2 * na * frac, 0.0)
    return n, mean, m2


def simulate_energies(cfg: McConfig, workers: int = 1) -> list[McEstimate]:
    """Mean and standard error of the signal energy at every depth 0..t_max."""
    work = cfg.n * (cfg.t_max + 1) * cfg.samples
    if work > max_work():
        raise ResourceError(
            f"n*(t_max+1)*samples = {work} exceeds the guard {max_work()} (RSL_MAX_MC_WORK)")
    n_chunks = -(-cfg.samples // CHUNK)
    acc = None
    if workers <= 1:
        for c in range(n_chunks):
            acc = _merge(acc, _chunk_moments(cfg, c))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(lambda c: _chunk_moments(cfg, c), range(n_chunks)):
                acc = _merge(acc, part)
    count, mean, m2 = acc
    large_depth = 2.0 * math.sqrt(cfg.n)
    out = []
    for d in range(cfg.t_max + 1):
        c = int(count[d])
        flags = []
        nonfinite = cfg.samples - c
        if nonfinite:
            flags.append(f"nonfinite={nonfinite}")
        if c > 1:
            stderr = math.sqrt(float(m2[d]) / (c - 1)) / math.sqrt(c)
        else:
            stderr = 0.0
            flags.append("no_spread")
        if d > large_depth:
            flags.append("large_depth")
        out.append(McEstimate(d, float(mean[d]), stderr, c, nonfinite, tuple(flags)))
    return out


def estimates_to_curve(cfg: McConfig, estimates: list[McEstimate]) -> EnergyCurve:
    rows = []
    for e in estimates:
        log_value = math.log(e.mean) if e.mean > 0 else -math.inf
        rows.append(CurveRow(e.depth, e.mean, log_value, e.stderr, e.flags))
    meta = {"seed": cfg.seed, "field": cfg.field.value, "samples": cfg.samples,
            "input_model": cfg.input_model.value, "t_max": cfg.t_max}
    return EnergyCurve(n=cfg.n, model=cfg.model.value, source="mc", rows=rows, meta=meta)


@dataclass(frozen=True)
class RealComplexReport:
    depth: int
    real_mean: float
    real_stderr: float
    complex_mean: float
    complex_stderr: float
    gap_in_stderr: float

    @property
    def passed(self) -> bool:
        """One-sided check ``real >= complex`` at three combined standard errors."""
        return self.gap_in_stderr >= -3.0


def real_vs_complex_reports(n: int, depths, samples: int, seed: int,
                            model: Model = Model.RNN,
                            input_model: InputModel = InputModel.WHITENED_IID,
                            workers: int = 1) -> list[RealComplexReport]:
    """Compare real- and complex-weight energies at several depths.

    One simulation per field runs to the largest depth; the gap at each depth
    is expressed in units of the combined standard error.
    """
    depths = sorted(depths)
    if InputModel(input_model) is InputModel.CUSTOM:
        raise ValueError("the lower bound needs nonnegative cross-time correlations")
    runs = {}
    for fld in (Field.REAL, Field.COMPLEX):
        cfg = McConfig(n, depths[-1], samples, seed, fld, model, input_model)
        runs[fld] = simulate_energies(cfg, workers)
    out = []
    for d in depths:
        re, co = runs[Field.REAL][d], runs[Field.COMPLEX][d]
        combined = math.hypot(re.stderr, co.stderr)
        gap = re.mean - co.mean
        if combined > 0:
            gap_se = gap / combined
        else:
            gap_se = 0.0 if gap == 0 else math.copysign(math.inf, gap)
        out.append(RealComplexReport(d, re.mean, re.stderr, co.mean, co.stderr, gap_se))
    return out


def real_vs_complex_check(n: int, depth: int, samples: int, seed: int,
                          model: Model = Model.RNN,
                          input_model: InputModel = InputModel.WHITENED_IID,
                          workers: int = 1) -> RealComplexReport:
    """Compare real- and complex-weight energies at one depth."""
    return real_vs_complex_reports(n, [depth], samples, seed, model, input_model, workers)[0]
