"""Experiment reports: deterministic object-notation and comma-separated outputs."""
from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .. import __version__
from ..geometry.io import dumps, write_atomic

RNG_ALGORITHM = "numpy.random.PCG64"


def provenance(seed: int | None = None, **extra) -> dict:
    out = {"tool": "wslicelab", "version": __version__, "rng": RNG_ALGORITHM}
    if seed is not None:
        out["seed"] = seed
    out.update(extra)
    return out


def param_hash(params: dict) -> str:
    return hashlib.sha256(dumps(params).encode()).hexdigest()[:12]


@dataclass
class ExperimentReport:
    scenario: str
    parameters: dict
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    columns: tuple = ()

    def to_dict(self) -> dict[str, Any]:
        return {"scenario": self.scenario, "parameters": self.parameters, "rows": self.rows,
                "summary": self.summary, "provenance": self.provenance}

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"

    def to_csv(self) -> str:
        cols = list(self.columns) or sorted({k for r in self.rows for k in r
                                             if not isinstance(r[k], (dict, list))})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow(["" if r.get(c) is None else
                        (format(r[c], ".17g") if isinstance(r[c], float) else r[c]) for c in cols])
        return buf.getvalue()

    @property
    def stem(self) -> str:
        return f"{self.scenario}_{param_hash(self.parameters)}"

    def write(self, outdir: str | Path, formats=("report", "table")) -> list[Path]:
        outdir = Path(outdir)
        paths = []
        if "report" in formats:
            paths.append(write_atomic(outdir / f"{self.stem}.json", self.to_json()))
        if "table" in formats and self.rows:
            paths.append(write_atomic(outdir / f"{self.stem}.csv", self.to_csv()))
        return paths
