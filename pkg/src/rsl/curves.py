"""Energy curves and their self-describing CSV/JSON files.

CSV layout::

    # tool=rsl
    # version=0.1.0
    # n=64
    # model=rnn
    # source=exact
    # ...more key=value metadata...
    depth,value,log_value,stderr,flags,exact
    0,1,0,,,1
    ...

Floats are written with 17 significant digits so that parsing a file gives
back the in-memory curve bit for bit.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

from . import __version__

SOURCES = ("exact", "mc", "asymptotic")
MODELS = ("rnn", "lru")
COLUMNS = ("depth", "value", "log_value", "stderr", "flags", "exact")


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _parse_scalar(text: str) -> Any:
    """Header values: int if it parses, then float, else the raw string."""
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


@dataclass(frozen=True)
class CurveRow:
    depth: int
    value: float
    log_value: float
    stderr: float | None = None
    flags: tuple[str, ...] = ()
    exact: str | None = None


@dataclass
class EnergyCurve:
    """Energies at increasing depths for one width, model and source."""

    n: int
    model: str
    source: str
    rows: list[CurveRow]
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        depths = [r.depth for r in self.rows]
        if any(b <= a for a, b in zip(depths, depths[1:])):
            raise ValueError("rows must be sorted strictly by depth")
        for r in self.rows:
            if (r.stderr is not None) != (self.source == "mc"):
                raise ValueError("stderr must be present exactly for mc rows")
            if self.source != "mc" and not math.isfinite(r.log_value):
                raise ValueError(f"non-finite log_value at depth {r.depth}")

    @property
    def depths(self) -> list[int]:
        return [r.depth for r in self.rows]

    @property
    def values(self) -> list[float]:
        return [r.value for r in self.rows]

    def header(self) -> dict[str, Any]:
        head = {"tool": "rsl", "version": __version__, "n": self.n,
                "model": self.model, "source": self.source}
        head.update(self.meta)
        return head

    # -- CSV ---------------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, val in self.header().items():
            buf.write(f"# {key}={val}\n")
        with_exact = any(r.exact is not None for r in self.rows)
        cols = COLUMNS if with_exact else COLUMNS[:-1]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for r in self.rows:
            line = [r.depth, fmt_float(r.value), fmt_float(r.log_value),
                    "" if r.stderr is None else fmt_float(r.stderr), ";".join(r.flags)]
            if with_exact:
                line.append(r.exact or "")
            writer.writerow(line)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "EnergyCurve":
        meta: dict[str, Any] = {}
        body = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key] = _parse_scalar(val)
            elif line.strip():
                body.append(line)
        reader = csv.DictReader(body)
        rows = []
        for rec in reader:
            rows.append(CurveRow(
                depth=int(rec["depth"]),
                value=float(rec["value"]),
                log_value=float(rec["log_value"]),
                stderr=float(rec["stderr"]) if rec["stderr"] else None,
                flags=tuple(f for f in rec["flags"].split(";") if f),
                exact=rec.get("exact") or None,
            ))
        n = int(meta.pop("n"))
        model = str(meta.pop("model"))
        source = str(meta.pop("source"))
        meta.pop("tool", None)
        meta.pop("version", None)
        return cls(n=n, model=model, source=source, rows=rows, meta=meta)

    # -- JSON --------------------------------------------------------------

    def to_json(self) -> str:
        doc = dict(self.header())
        doc["rows"] = [
            {"depth": r.depth, "value": r.value, "log_value": r.log_value,
             "stderr": r.stderr, "flags": list(r.flags), "exact": r.exact}
            for r in self.rows
        ]
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EnergyCurve":
        doc = json.loads(text)
        rows = [CurveRow(depth=r["depth"], value=r["value"], log_value=r["log_value"],
                         stderr=r["stderr"], flags=tuple(r["flags"]), exact=r["exact"])
                for r in doc.pop("rows")]
        n, model, source = doc.pop("n"), doc.pop("model"), doc.pop("source")
        doc.pop("tool", None)
        doc.pop("version", None)
        return cls(n=n, model=model, source=source, rows=rows, meta=doc)


def write_table(columns: list[str], rows: list[list[Any]], meta: dict[str, Any]) -> str:
    """CSV with the same ``# key=value`` header, for figure data tables."""
    buf = io.StringIO()
    head = {"tool": "rsl", "version": __version__}
    head.update(meta)
    for key, val in head.items():
        buf.write(f"# {key}={val}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_float(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def read_table(text: str) -> tuple[dict[str, str], list[dict[str, str]]]:
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        elif line.strip():
            body.append(line)
    return meta, list(csv.DictReader(body))
