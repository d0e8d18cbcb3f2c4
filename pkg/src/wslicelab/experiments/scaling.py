"""Closed-form corridor scales L_{j,alpha} = R_j / r_j^(1-alpha) in log space."""
from __future__ import annotations

import math

from dataclasses import asdict, dataclass

from ..errors import SpecInvalid
from ..geometry.decorations import (DecoratedSquareSpec, Family, RModifier, allowable_violations,
                                    modifier_log2)
from .report import ExperimentReport, provenance


def log2_L(j: int, alpha: float, p: float, q: float, r_modifier=RModifier.NONE) -> float:
    """log2 of 2^{-jp} / r_j^{1-alpha} with r_j = 2^{-jq} (times j or divided by j)."""
    if j < 1:
        raise ValueError("j must be >= 1")
    log2_r = -j * q + modifier_log2(r_modifier, j)
    return -j * p - (1.0 - alpha) * log2_r


def exact_L(j: int, alpha: float, p: float, q: float, r_modifier=RModifier.NONE) -> float:
    return 2.0 ** log2_L(j, alpha, p, q, r_modifier)


def related_exponents(family, alpha0: float, p: float, q: float) -> tuple[float, float]:
    """(p', q') from (p, q) under the family's relation."""
    family = Family(family)
    if family in (Family.THM43_THINSHORT, Family.EX45):
        return p + 1 - alpha0, q + 1
    if family is Family.THM43_FATLONG:
        return p - 1 + alpha0, q - 1
    raise SpecInvalid(f"no single-layer relation for family {family.value}")


@dataclass(frozen=True)
class ScalingRow:
    j: int
    alpha: float
    L: float
    L_prime: float
    log2_ratio_over_j: float
    d_alpha_upper: float | None = None
    d_alpha_grid: float | None = None
    sigma_alpha: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


CLOSED_FORMS = {
    Family.THM43_THINSHORT: "(1/j) log2(L/L') = alpha - alpha0",
    Family.THM43_FATLONG: "(1/j) log2(L/L') = alpha0 - alpha",
    Family.EX45: "(1/j) log2(L/L') = alpha - alpha0 - (1-alpha) m log2(j)/j, m = +1 (TIMES_J), -1 (DIV_J)",
}


def closed_form_ratio(family, j: int, alpha: float, alpha0: float, r_modifier=RModifier.NONE) -> float:
    """(1/j) log2(L/L') simplified by hand for each single-layer family."""
    family = Family(family)
    if family is Family.THM43_FATLONG:
        base = alpha0 - alpha
    elif family in (Family.THM43_THINSHORT, Family.EX45):
        base = alpha - alpha0
    else:
        raise SpecInvalid(f"no closed form for family {family.value}")
    return base - (1 - alpha) * modifier_log2(r_modifier, j) / j


def scaling_row(j: int, alpha: float, p: float, q: float, pp: float, qp: float,
                r_modifier=RModifier.NONE) -> ScalingRow:
    lL = log2_L(j, alpha, p, q, r_modifier)
    lLp = log2_L(j, alpha, pp, qp)
    return ScalingRow(j, alpha, _pow2(lL), _pow2(lLp), (lL - lLp) / j)


def _pow2(x: float) -> float:
    """2**x, saturating to inf or 0 outside the double range instead of raising."""
    try:
        return 2.0 ** x
    except OverflowError:
        return math.inf


def scaling_table(alpha0: float, p: float, q: float, alphas, js, family=Family.THM43_THINSHORT,
                  grid_policy: str = "none", r_modifier=None) -> ExperimentReport:
    """Exact L, L' and the identity column; grid measurements for j <= 3 when asked.

    grid_policy: "none" (exact columns only) or "auto" (adds the obstruction-pair
    d_alpha and right-slice sigma for j <= 3).
    """
    family = Family(family)
    pp, qp = related_exponents(family, alpha0, p, q)
    problems = allowable_violations(p, q, pp, qp)
    if problems:
        raise SpecInvalid("quadruple not allowable: " + "; ".join(problems))
    mod = RModifier(r_modifier) if r_modifier is not None else (
        RModifier.TIMES_J if family is Family.EX45 else RModifier.NONE)
    rows = []
    measured = {}
    if grid_policy == "auto":
        from .thm43 import obstruction_measurements
        for j in js:
            if j <= 3:
                measured[j] = {m["alpha"]: m for m in
                               obstruction_measurements(_spec_for(family, alpha0, p, q, j, mod),
                                                        j, list(alphas))["rows"]}
    for j in js:
        for a in alphas:
            row = scaling_row(j, a, p, q, pp, qp, mod)
            m = measured.get(j, {}).get(a)
            if m:
                row = ScalingRow(row.j, row.alpha, row.L, row.L_prime, row.log2_ratio_over_j,
                                 m["midline_bound"], m["d_alpha_grid"], m["sigma_alpha"])
            rows.append(row.to_dict())
    params = {"alpha0": alpha0, "p": p, "q": q, "p_prime": pp, "q_prime": qp,
              "alphas": list(alphas), "js": list(js), "family": family.value,
              "r_modifier": mod.value, "grid_policy": grid_policy}
    worst = max(abs(r["log2_ratio_over_j"] - closed_form_ratio(family, r["j"], r["alpha"], alpha0, mod))
                for r in rows) if rows else 0.0
    summary = {"identity_max_abs_error": worst,
               "identity": CLOSED_FORMS[family]}
    cols = ("j", "alpha", "L", "L_prime", "log2_ratio_over_j", "d_alpha_upper", "d_alpha_grid",
            "sigma_alpha")
    return ExperimentReport("scaling", params, rows, summary, provenance(), cols)


def _spec_for(family, alpha0, p, q, j, mod) -> DecoratedSquareSpec:
    family = Family(family)
    if family is Family.THM43_FATLONG:
        return DecoratedSquareSpec.ex44(alpha0, p, q, j, j)
    if family is Family.EX45:
        return DecoratedSquareSpec.ex45(alpha0, p, q, j, j, r_modifier=mod)
    return DecoratedSquareSpec.thm43(alpha0, p, q, j, j)
