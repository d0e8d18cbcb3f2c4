"""Text interchange for domains: object notation with 17-significant-digit floats."""
from __future__ import annotations

import json
import math
import os
import tempfile
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from .domain import PlanarDomain
from .primitives import Polygon, Polyline


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    s = format(x, ".17g")
    return s


def dumps(obj: Any, indent: int = 1, _level: int = 0) -> str:
    """Deterministic JSON with sorted keys and 17 significant digits per float."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, Enum):
        obj = obj.value
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        obj = int(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def domain_to_dict(domain: PlanarDomain) -> dict:
    return {
        "outer": [[list(p) for p in poly.vertices] for poly in domain.outer],
        "holes": [[list(p) for p in poly.vertices] for poly in domain.holes],
        "slits": [[list(p) for p in s.vertices] for s in domain.slits],
        "landmarks": domain.landmarks,
    }


def domain_from_dict(d: dict) -> PlanarDomain:
    def pts(seq):
        return [(float(x), float(y)) for x, y in seq]

    return PlanarDomain(tuple(Polygon(pts(p)) for p in d["outer"]),
                        tuple(Polygon(pts(p)) for p in d.get("holes", [])),
                        tuple(Polyline(pts(s)) for s in d.get("slits", [])),
                        d.get("landmarks", {}) or {})


def domain_dumps(domain: PlanarDomain) -> str:
    return dumps(domain_to_dict(domain)) + "\n"


def domain_loads(text: str) -> PlanarDomain:
    return domain_from_dict(json.loads(text))


def save_domain(domain: PlanarDomain, path: str | Path) -> Path:
    return write_atomic(path, domain_dumps(domain))


def load_domain(path: str | Path) -> PlanarDomain:
    return domain_loads(Path(path).read_text())
