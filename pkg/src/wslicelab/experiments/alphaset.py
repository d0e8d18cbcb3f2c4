"""Exponent-level alpha-set predictions and the union/intersection spec combinators."""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from ..errors import SpecInvalid
from ..geometry.decorations import DecoratedSquareSpec, Family, RModifier
from .report import ExperimentReport, provenance
from .scaling import log2_L

ZERO_TOL = 1e-12
CONSISTENT = "wslice-consistent"
OBSTRUCTED = "obstructed"


class CombineMode(str, Enum):
    UNION = "UNION"
    INTERSECTION = "INTERSECTION"


@dataclass(frozen=True)
class RecipeClass:
    """Exponents shared by every decoration drawn from one donor."""
    p: float
    q: float
    layers: tuple
    r_modifier: RModifier

    def slope(self, i: int, alpha: float) -> float:
        """Per-unit-j growth of log2(L / L_i), exact up to rounding."""
        pi, qi = self.layers[i]
        return (pi - self.p) - (1 - alpha) * (qi - self.q)

    def log_coefficient(self, alpha: float) -> float:
        """Coefficient of log2(j) in log2(L / L_i) from the r-modifier."""
        m = {RModifier.NONE: 0.0, RModifier.TIMES_J: 1.0, RModifier.DIV_J: -1.0}[self.r_modifier]
        return -(1 - alpha) * m

    def layer_verdict(self, i: int, alpha: float) -> int:
        """+1 when L/L_i -> infinity, 0 when bounded, -1 when it tends to 0."""
        s = self.slope(i, alpha)
        if abs(s) > ZERO_TOL:
            return 1 if s > 0 else -1
        c = self.log_coefficient(alpha)
        if abs(c) > ZERO_TOL:
            return 1 if c > 0 else -1
        return 0

    def obstructed(self, alpha: float) -> bool:
        """The diagonal term outgrows every layer's sum (no constructible dataset keeps up)."""
        return all(self.layer_verdict(i, alpha) > 0 for i in range(len(self.layers)))

    def exponent(self, alpha: float) -> float:
        """(1/j) log2(d-dominant / sigma-dominant) in the limit: min over layers of the slope."""
        return min(self.slope(i, alpha) for i in range(len(self.layers)))

    def exponent_at(self, j: int, alpha: float) -> float:
        lL = log2_L(j, alpha, self.p, self.q, self.r_modifier)
        return min(lL - log2_L(j, alpha, pi, qi) for pi, qi in self.layers) / j

    def breakpoints(self) -> list[float]:
        out = []
        for pi, qi in self.layers:
            if abs(qi - self.q) > ZERO_TOL:
                a = 1 - (pi - self.p) / (qi - self.q)
                if 0 <= a < 1:
                    out.append(a)
        return out


def recipe_classes(spec: DecoratedSquareSpec) -> list[RecipeClass]:
    if spec.family is Family.EX32 and not spec.donors:
        raise SpecInvalid("EX32 has no exponent recipe")
    donors = _flat_donors(spec) if spec.donors else [spec]
    out = []
    for d in donors:
        if d.family is Family.EX32:
            raise SpecInvalid("EX32 donors have no exponent recipe")
        rc = RecipeClass(d.p, d.q, tuple(d.layer_exponents), d.r_modifier)
        if rc not in out:
            out.append(rc)
    return out


def classify(spec_or_classes, alpha: float) -> str:
    classes = (recipe_classes(spec_or_classes) if isinstance(spec_or_classes, DecoratedSquareSpec)
               else spec_or_classes)
    return OBSTRUCTED if any(c.obstructed(alpha) for c in classes) else CONSISTENT


def predicted_set(classes: list[RecipeClass]) -> list[tuple[float, float, bool, bool]]:
    """Consistent alpha values in [0,1) as (lo, hi, lo_closed, hi_closed) intervals."""
    pts = sorted({0.0, *[b for c in classes for b in c.breakpoints()]})
    pieces = []   # (lo, hi, lo_closed, hi_closed, consistent)
    for k, a in enumerate(pts):
        pieces.append((a, a, True, True, classify(classes, a) == CONSISTENT))
        hi = pts[k + 1] if k + 1 < len(pts) else 1.0
        mid = 0.5 * (a + hi)
        pieces.append((a, hi, False, False, classify(classes, mid) == CONSISTENT))
    out: list[list] = []
    for lo, hi, lc, hc, ok in pieces:
        if not ok:
            continue
        if out and out[-1][1] == lo and (out[-1][3] or lc):
            out[-1][1], out[-1][3] = hi, hc
        else:
            out.append([lo, hi, lc, hc])
    return [tuple(iv) for iv in out]


def format_set(intervals) -> str:
    if not intervals:
        return "empty"
    parts = []
    for lo, hi, lc, hc in intervals:
        if lo == hi:
            parts.append(f"{{{lo:g}}}")
        else:
            parts.append(f"{'[' if lc else '('}{lo:g}, {hi:g}{']' if hc else ')'}")
    return " u ".join(parts)


def in_set(intervals, alpha: float) -> bool:
    for lo, hi, lc, hc in intervals:
        if (lo < alpha or (lc and alpha == lo)) and (alpha < hi or (hc and alpha == hi)):
            return True
    return False


def alpha_set_probe(spec: DecoratedSquareSpec, alphas, js=(), numeric: bool = False) -> ExperimentReport:
    """Classify each alpha from exact exponents and predict the alpha-set.

    With numeric=True and a single recipe class, adds grid rows for j <= 3 at the
    obstruction pair (minutes of work for j = 3).
    """
    classes = recipe_classes(spec)
    rows = []
    for a in alphas:
        per_class = []
        for c in classes:
            per_class.append({
                "slopes": [c.slope(i, a) for i in range(len(c.layers))],
                "log_coefficient": c.log_coefficient(a),
                "exponent": c.exponent(a),
                "exponent_at_j": {str(j): c.exponent_at(j, a) for j in js},
                "obstructed": c.obstructed(a)})
        rows.append({"alpha": a, "classification": classify(classes, a), "classes": per_class})
    iv = predicted_set(classes)
    summary = {"predicted_set": format_set(iv), "intervals": [list(t) for t in iv],
               "n_recipe_classes": len(classes),
               "evidence_tier": "exact exponents of the corridor scales"}
    if numeric and len(classes) == 1 and not spec.donors:
        from .thm43 import obstruction_measurements
        num = []
        for j in js:
            if j <= 3:
                single = replace(spec, j_min=j, j_max=j, a=None)
                num.extend(obstruction_measurements(single, j, list(alphas))["rows"])
        summary["numeric"] = [{k: v for k, v in r.items() if k != "midline_routes"} for r in num]
    params = {"spec": spec.to_dict(), "alphas": list(alphas), "js": list(js), "numeric": numeric}
    cols = ("alpha", "classification")
    return ExperimentReport("alpha-set", params, rows, summary, provenance(), cols)


def ex45_trajectories(alpha0: float, p: float = 3.0, q: float = 6.0, js=range(2, 13)) -> ExperimentReport:
    """L/L' and L'/L at alpha = alpha0 under both r-modifiers, j by j."""
    pp, qp = p + 1 - alpha0, q + 1
    rows = []
    for j in js:
        row = {"j": j}
        for mod in (RModifier.TIMES_J, RModifier.DIV_J):
            lr = log2_L(j, alpha0, p, q, mod) - log2_L(j, alpha0, pp, qp)
            row[f"L_over_Lp_{mod.value}"] = 2.0 ** lr
            row[f"Lp_over_L_{mod.value}"] = 2.0 ** -lr
        rows.append(row)
    trend = {}
    for mod in (RModifier.TIMES_J, RModifier.DIV_J):
        cls = RecipeClass(p, q, ((pp, qp),), mod)
        trend[mod.value] = {"L_over_Lp_limit": {1: "infinity", 0: "bounded", -1: "zero"}
                            [cls.layer_verdict(0, alpha0)],
                            "predicted_set": format_set(predicted_set([cls]))}
    params = {"alpha0": alpha0, "p": p, "q": q, "js": list(js)}
    return ExperimentReport("ex45", params, rows, {"trend": trend}, provenance())


# ---------------------------------------------------------------------------
# combinators


def _flat_donors(spec: DecoratedSquareSpec) -> list[DecoratedSquareSpec]:
    if not spec.donors:
        return [spec]
    return [d for donor in spec.donors for d in _flat_donors(donor)]


def _merge_layers(specs) -> tuple:
    by_q: dict[float, tuple] = {}
    for s in specs:
        for pi, qi in s.layer_exponents:
            key = round(qi, 12)
            if key in by_q and abs(by_q[key][0] - pi) > ZERO_TOL:
                raise SpecInvalid(f"layer widths not strictly nested: two layers with q_i = {qi:g}")
            by_q[key] = (pi, qi)
    # thinnest layer sits next to the diagonal
    return tuple(by_q[k] for k in sorted(by_q, reverse=True))


def combine_specs(mode, specs) -> DecoratedSquareSpec:
    mode = CombineMode(mode)
    specs = list(specs)
    if not specs:
        raise SpecInvalid("combine needs at least one spec")
    if len(specs) == 1:
        return specs[0]
    j_min = min(s.j_min for s in specs)
    j_max = max(s.j_max for s in specs)
    if mode is CombineMode.INTERSECTION:
        donors = tuple(d for s in specs for d in _flat_donors(s))
        return DecoratedSquareSpec(Family.CUSTOM, j_min, j_max, donors=donors)
    for s in specs:
        if s.donors or s.family is Family.EX32:
            raise SpecInvalid("UNION merges exponent families without donors")
    base = specs[0]
    for s in specs[1:]:
        if (abs(s.p - base.p) > ZERO_TOL or abs(s.q - base.q) > ZERO_TOL
                or s.r_modifier is not base.r_modifier):
            raise SpecInvalid("UNION needs a shared diagonal (p, q, r-modifier)")
    layers = _merge_layers(specs)
    if all(tuple(s.layer_exponents) == layers for s in specs):
        return base
    return DecoratedSquareSpec(Family.CUSTOM, j_min, j_max, p=base.p, q=base.q,
                               layer_exponents=layers, r_modifier=base.r_modifier)


def sets_agree(iv_a, iv_b, alphas) -> bool:
    return all(in_set(iv_a, x) == in_set(iv_b, x) for x in alphas)


def probe_points(classes: list[RecipeClass], n: int = 101) -> list[float]:
    """Uniform points plus every breakpoint and its neighbours, for set comparisons."""
    pts = {k / (n - 1) * (1 - 1e-9) for k in range(n)}
    for c in classes:
        for b in c.breakpoints():
            pts.update({b, max(0.0, b - 1e-6), min(1 - 1e-9, b + 1e-6)})
    return sorted(pts)
