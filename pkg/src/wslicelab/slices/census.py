"""Dyadic bucketing of slice diameters."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .regions import WsliceDataset


@dataclass(frozen=True)
class CensusRow:
    i: int
    m_i: int
    sum_contribution: float


def dyadic_census(ds: WsliceDataset, base_scale: float) -> list[CensusRow]:
    """Bucket slices by d_S in (2^{i-1} base, 2^i base]; sum d_S^alpha per bucket."""
    if not base_scale > 0:
        raise ValueError("base_scale must be positive")
    buckets: dict[int, list[float]] = {}
    for s in ds.slices:
        ratio = s.d_S / base_scale
        i = math.ceil(math.log2(ratio) - 1e-12)
        buckets.setdefault(i, []).append(s.d_S)
    return [CensusRow(i, len(v), sum(d ** ds.alpha for d in v)) for i, v in sorted(buckets.items())]


def census_aggregate(rows: list[CensusRow], base_scale: float, alpha: float) -> float:
    """Sum over classes of m_i (2^i base)^alpha: the class-rounded upper bound of the sum."""
    return sum(r.m_i * (2.0 ** r.i * base_scale) ** alpha for r in rows)
