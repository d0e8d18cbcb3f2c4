"""Corridor decorations attached to the right side of the unit square.

A decoration is described by a piecewise linear *profile*: for every x1 in
[1, x_end] three vertical offsets above the attachment height a,

    inner  - the slit L (0) or the upper edge of the omitted diamond,
    U      - the U-shaped slit, one corridor width above inner,
    outer  - the outer wall, two corridor widths above inner.

The lower half is the mirror image across y = a.  Horizontal layers have
offsets (0, w, 2w); the diagonal part climbs at 45 degrees to the diamond's
apex and back.  Where parts of different widths meet, the wider part carries
a pinch of horizontal extent max(w_left, w_right) next to the junction, in
which the U and outer offsets interpolate linearly between the two parts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from ..errors import DomainInvalid, NoSuchCorridor, NoSuchDecoration, SpecInvalid
from .domain import PlanarDomain
from .primitives import Polygon, Polyline

UNDERFLOW = 1e-300


class Family(str, Enum):
    EX32 = "EX32"
    THM43_THINSHORT = "THM43_THINSHORT"
    THM43_FATLONG = "THM43_FATLONG"
    EX45 = "EX45"
    EX46 = "EX46"
    CUSTOM = "CUSTOM"


class RModifier(str, Enum):
    NONE = "NONE"
    TIMES_J = "TIMES_J"
    DIV_J = "DIV_J"


def modifier_log2(mod: RModifier | str, j: int) -> float:
    mod = RModifier(mod)
    if mod is RModifier.TIMES_J:
        return math.log2(j)
    if mod is RModifier.DIV_J:
        return -math.log2(j)
    return 0.0


@dataclass(frozen=True)
class AllowableQuadruple:
    p: float
    q: float
    p_prime: float
    q_prime: float

    def __post_init__(self):
        problems = allowable_violations(self.p, self.q, self.p_prime, self.q_prime)
        if problems:
            raise SpecInvalid("quadruple not allowable: " + "; ".join(problems))


def allowable_violations(p: float, q: float, pp: float, qp: float, tol: float = 1e-12) -> list[str]:
    out = []
    if not (0 < p <= q - 2 + tol):
        out.append(f"need 0 < p <= q-2 (p={p}, q={q})")
    if not (0 < pp <= qp - 2 + tol):
        out.append(f"need 0 < p' <= q'-2 (p'={pp}, q'={qp})")
    if not p >= 2 - tol:
        out.append(f"need p >= 2 (p={p})")
    if not qp >= 2 - tol:
        out.append(f"need q' >= 2 (q'={qp})")
    return out


@dataclass(frozen=True)
class DecorationSpec:
    """Numeric dimensions of one decoration.

    `layers` lists the rectangular layers on each side of the diagonal part as
    (length, width) pairs, innermost (adjacent to the diagonal) first.  For
    EX32 the single layer has the diagonal's own dimensions.
    """

    family: Family
    j: int
    a_j: float
    R_j: float
    r_j: float
    layers: tuple[tuple[float, float], ...]
    scale_j: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "layers", tuple((float(L), float(w)) for L, w in self.layers))
        vals = [self.R_j, self.r_j] + [v for lw in self.layers for v in lw]
        if not all(math.isfinite(v) for v in vals + [self.a_j]):
            raise SpecInvalid(f"decoration {self.j}: non-finite dimension")
        if min(vals) < UNDERFLOW:
            raise SpecInvalid(f"decoration {self.j}: a dimension underflows double precision (< 1e-300)")
        if not self.layers:
            raise SpecInvalid(f"decoration {self.j}: needs at least one rectangular layer")
        if self.R_j / self.r_j < 4 * (1 - 1e-12):
            raise SpecInvalid(f"decoration {self.j}: need 4 <= R_j/r_j, got {self.R_j / self.r_j:g}")
        for L, w in self.layers:
            if L / w < 4 * (1 - 1e-12):
                raise SpecInvalid(f"decoration {self.j}: layer needs length/width >= 4, got {L / w:g}")
        half = self.outer_width * 2
        if not (0 < self.a_j - half and self.a_j + half < 1):
            raise SpecInvalid(f"decoration {self.j}: a_j +- outermost half-width leaves (0,1)")

    @property
    def outer_width(self) -> float:
        return self.layers[-1][1]

    @property
    def R_j_prime(self) -> float | None:
        return None if self.family is Family.EX32 else self.layers[0][0]

    @property
    def r_j_prime(self) -> float | None:
        return None if self.family is Family.EX32 else self.layers[0][1]

    @property
    def R_j_dprime(self) -> float | None:
        return self.layers[1][0] if len(self.layers) > 1 else None

    @property
    def r_j_dprime(self) -> float | None:
        return self.layers[1][1] if len(self.layers) > 1 else None

    def with_a(self, a: float) -> "DecorationSpec":
        return replace(self, a_j=a)


# ---------------------------------------------------------------------------
# profile construction


@dataclass
class _Part:
    kind: str          # "layer" or "diag"
    side: str          # "left", "center", "right"
    index: int         # layer index (innermost 0); -1 for the diagonal
    x0: float
    x1: float
    width: float
    pinch: tuple[float, float] | None = None
    pinch_other: list = field(default_factory=list)


def _unpinched(part: _Part, x: float, R: float, xj1: float, xj2: float) -> tuple[float, float, float]:
    if part.kind == "layer":
        w = part.width
        return 0.0, w, 2 * w
    d = (x - xj1) if x <= xj1 + R else (xj2 - x)
    r = part.width
    return d, d + r, d + 2 * r


def decoration_layout(dec: DecorationSpec) -> dict:
    """Compute parts, pinches and the breakpoint profile table of a decoration."""
    R, r = dec.R_j, dec.r_j
    k = len(dec.layers)
    parts: list[_Part] = []
    x = 1.0
    for i in range(k - 1, -1, -1):
        L, w = dec.layers[i]
        parts.append(_Part("layer", "left", i, x, x + L, w))
        x = x + L
    xj1 = x
    xj2 = xj1 + 2 * R
    parts.append(_Part("diag", "center", -1, xj1, xj2, r))
    x = xj2
    for i in range(k):
        L, w = dec.layers[i]
        parts.append(_Part("layer", "right", i, x, x + L, w))
        x = x + L
    x_end = x

    pinches = []  # (x0, x1, part_pos, neighbour_pos, junction_x)
    for pos in range(len(parts) - 1):
        P, Q = parts[pos], parts[pos + 1]
        X = P.x1
        if P.width > Q.width:
            pinches.append((X - P.width, X, pos, pos + 1, X))
        elif Q.width > P.width:
            pinches.append((X, X + Q.width, pos + 1, pos, X))

    # Non-degeneracy: pinches inside their parts, not overlapping each other or
    # the outer end margins, and not crossing the diamond apex.
    for x0, x1, pos, _, _ in pinches:
        part = parts[pos]
        if x0 < part.x0 - 1e-15 or x1 > part.x1 + 1e-15:
            raise SpecInvalid(f"decoration {dec.j}: pinch region exceeds its part")
        if part.kind == "diag" and not (x1 <= xj1 + R or x0 >= xj1 + R):
            raise SpecInvalid(f"decoration {dec.j}: pinch crosses the diamond apex")
    by_part: dict[int, list] = {}
    for pin in pinches:
        by_part.setdefault(pin[2], []).append(pin)
    for pos, pins in by_part.items():
        spans = sorted((a, b) for a, b, *_ in pins)
        for (a0, b0), (a1, b1) in zip(spans, spans[1:]):
            if a1 < b0:
                raise SpecInvalid(f"decoration {dec.j}: overlapping pinch regions")

    def profile_at(xv: float, pos: int) -> tuple[float, float, float]:
        part = parts[pos]
        base = _unpinched(part, xv, R, xj1, xj2)
        for x0, x1, ppos, npos, X in pinches:
            if ppos != pos or not (x0 <= xv <= x1):
                continue
            nb = _unpinched(parts[npos], X, R, xj1, xj2)
            if X == x1:   # pinch at the right end of its part
                far = _unpinched(part, x0, R, xj1, xj2)
                t = (xv - x0) / (x1 - x0)
                return base[0], far[1] + t * (nb[1] - far[1]), far[2] + t * (nb[2] - far[2])
            far = _unpinched(part, x1, R, xj1, xj2)
            t = (x1 - xv) / (x1 - x0)
            return base[0], far[1] + t * (nb[1] - far[1]), far[2] + t * (nb[2] - far[2])
        return base

    bps = {p.x0 for p in parts} | {parts[-1].x1, xj1 + R}
    for x0, x1, *_ in pinches:
        bps |= {x0, x1}
    xs = sorted(bps)
    table = []
    for xv in xs:
        pos = max(i for i, p in enumerate(parts) if p.x0 <= xv) if xv < x_end else len(parts) - 1
        table.append(profile_at(xv, pos))
    prof = np.array(table)
    for (inn, u, out) in table:
        if not (u > inn and out > u):
            raise SpecInvalid(f"decoration {dec.j}: corridor width collapses in a pinch")

    return {
        "parts": [dict(kind=p.kind, side=p.side, index=p.index, x0=p.x0, x1=p.x1, width=p.width)
                  for p in parts],
        "pinches": [dict(x0=a, x1=b, part=pos, junction=X) for a, b, pos, _, X in pinches],
        "x_end": x_end,
        "diag": [xj1, xj2],
        "profile": {"x": list(xs), "inner": prof[:, 0].tolist(),
                    "U": prof[:, 1].tolist(), "outer": prof[:, 2].tolist()},
    }


def profile_offsets(lay: dict, xv) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate (inner, U, outer) offsets at x1 values (piecewise linear interpolation)."""
    pr = lay["profile"]
    xs = np.asarray(pr["x"])
    xv = np.asarray(xv, dtype=float)
    return (np.interp(xv, xs, pr["inner"]), np.interp(xv, xs, pr["U"]),
            np.interp(xv, xs, pr["outer"]))


def _sample_xs(lay: dict, x0: float, x1: float) -> list[float]:
    inner_bps = [x for x in lay["profile"]["x"] if x0 < x < x1]
    return [x0] + inner_bps + [x1]


def _slice_ranges(dec: DecorationSpec, lay: dict) -> dict:
    """x1-ranges and strip counts for the four slice kinds."""
    parts = lay["parts"]
    pinch_by_part: dict[int, list] = {}
    for pin in lay["pinches"]:
        pinch_by_part.setdefault(pin["part"], []).append(pin)
    r_out = dec.outer_width
    k = len(dec.layers)

    def margin(pos: int, at_left: bool) -> float:
        part = parts[pos]
        nb = pos - 1 if at_left else pos + 1
        X = part["x0"] if at_left else part["x1"]
        for pin in pinch_by_part.get(pos, []):
            if pin["junction"] == X:
                return pin["x1"] - pin["x0"]
        if parts[nb]["width"] != part["width"]:
            return part["width"]
        return 0.0

    left, right = [], []
    for pos, part in enumerate(parts):
        if part["kind"] != "layer":
            continue
        L, w = dec.layers[part["index"]]
        n = int(math.floor(L / w * (1 + 1e-12)))
        if part["side"] == "left":
            m0 = 2 * r_out if pos == 0 else margin(pos, True)
            m1 = margin(pos, False)
            left.append([part["x0"] + m0, part["x1"] - m1, n])
        else:
            m0 = margin(pos, True)
            m1 = r_out if pos == len(parts) - 1 else margin(pos, False)
            right.append([part["x0"] + m0, part["x1"] - m1, n])
    for x0, x1, n in left + right:
        if not x1 > x0:
            raise SpecInvalid(f"decoration {dec.j}: empty slice range in a layer")
    n_diag = int(math.floor(dec.R_j / dec.r_j * (1 + 1e-12)))
    xj1, xj2 = lay["diag"]
    assert k >= 1
    return {"LEFT": left, "UPPER": [[xj1, xj2, 2 * n_diag]],
            "LOWER": [[xj1, xj2, 2 * n_diag]], "RIGHT": right}


def decoration_geometry(dec: DecorationSpec) -> dict:
    """Full closed-form geometry and landmarks of one decoration (JSON-ready)."""
    lay = decoration_layout(dec)
    a, R = dec.a_j, dec.R_j
    r_out = dec.outer_width
    xj1, xj2 = lay["diag"]
    x_end = lay["x_end"]
    xs = lay["profile"]["x"]
    outer = lay["profile"]["outer"]

    lower = [[x, a - o] for x, o in zip(xs, outer)]
    upper = [[x, a + o] for x, o in zip(xs, outer)][::-1]

    diamond = [[xj1, a], [xj1 + R, a - R], [xj2, a], [xj1 + R, a + R]]

    u0, u1 = 1.0 + r_out, x_end - r_out
    uxs = _sample_xs(lay, u0, u1)
    _, U, _ = profile_offsets(lay, uxs)
    u_lower = [[float(x), float(a - u)] for x, u in zip(uxs, U)][::-1]
    u_upper = [[float(x), float(a + u)] for x, u in zip(uxs, U)]
    u_slit = u_lower + u_upper

    l_slits = [[[1.0 + 2 * r_out, a], [xj1, a]], [[xj2, a], [x_end, a]]]

    midlines = {}
    for c in (1, 2, 3, 4):
        start = 1.0 if c in (1, 4) else 1.0 + 1.5 * r_out
        mxs = _sample_xs(lay, start, x_end - 0.5 * r_out)
        inn, U, out = profile_offsets(lay, mxs)
        off = (U + out) / 2 if c in (1, 4) else (inn + U) / 2
        sign = 1 if c in (3, 4) else -1
        midlines[str(c)] = [[float(x), float(a + sign * o)] for x, o in zip(mxs, off)]

    half = max(outer)
    return {
        "j": dec.j,
        "scale_j": dec.scale_j if dec.scale_j is not None else dec.j,
        "family": dec.family.value,
        "a": a, "R": R, "r": dec.r_j,
        "layers": [list(lw) for lw in dec.layers],
        "x_end": x_end,
        "diag": [xj1, xj2],
        "parts": lay["parts"],
        "pinches": lay["pinches"],
        "profile": lay["profile"],
        "bbox": [1.0, a - half, x_end, a + half],
        "boundary_lower": lower,
        "boundary_upper": upper,
        "diamond": diamond,
        "u_slit": u_slit,
        "l_slits": l_slits,
        "slit_endpoints": {"U": [u_slit[0], u_slit[-1]],
                           "L": [l_slits[0][0], l_slits[0][1], l_slits[1][0], l_slits[1][1]]},
        "midlines": midlines,
        "slice_ranges": _slice_ranges(dec, lay),
    }


# ---------------------------------------------------------------------------
# decorated squares


@dataclass(frozen=True)
class DecoratedSquareSpec:
    """Recipe for the unit square with a sequence of decorations j_min..j_max.

    Exponent families use R_j = 2^{-jp}, r_j = 2^{-jq} (times the r-modifier),
    and layer i dimensions 2^{-j p_i}, 2^{-j q_i}.  EX32 uses
    R_j = 4^{-j-1}, r_j = 8^{-j-1} unless explicit values are given.
    """

    family: Family
    j_min: int
    j_max: int
    p: float | None = None
    q: float | None = None
    layer_exponents: tuple[tuple[float, float], ...] = ()
    alpha0: float | None = None
    alpha1: float | None = None
    r_modifier: RModifier = RModifier.NONE
    a: tuple[float, ...] | None = None
    R_values: tuple[float, ...] | None = None
    r_values: tuple[float, ...] | None = None
    donors: tuple["DecoratedSquareSpec", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "r_modifier", RModifier(self.r_modifier))
        object.__setattr__(self, "layer_exponents",
                           tuple((float(a), float(b)) for a, b in self.layer_exponents))
        for name in ("a", "R_values", "r_values"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(float(t) for t in v))
        object.__setattr__(self, "donors", tuple(self.donors))
        if self.j_min < 1 or self.j_max < self.j_min:
            raise SpecInvalid(f"bad j range {self.j_min}..{self.j_max}")
        n = self.j_max - self.j_min + 1
        for name in ("a", "R_values", "r_values"):
            v = getattr(self, name)
            if v is not None and len(v) != n:
                raise SpecInvalid(f"{name} must list one value per j")
        for al in (self.alpha0, self.alpha1):
            if al is not None and not (0 <= al < 1):
                raise SpecInvalid("alpha0/alpha1 must lie in [0,1)")
        if not self.donors and self.family is not Family.EX32:
            if self.p is None or self.q is None or not self.layer_exponents:
                raise SpecInvalid("exponent families need p, q and layer exponents")
            for pi, qi in self.layer_exponents:
                problems = allowable_violations(self.p, self.q, pi, qi)
                if problems:
                    raise SpecInvalid("quadruple not allowable: " + "; ".join(problems))

    # --- factories ------------------------------------------------------------
    @classmethod
    def ex32(cls, j_min: int = 1, j_max: int = 3, a=None, R_values=None, r_values=None):
        return cls(Family.EX32, j_min, j_max, a=a, R_values=R_values, r_values=r_values)

    @classmethod
    def thm43(cls, alpha0: float, p: float = 3.0, q: float = 6.0, j_min: int = 2, j_max: int = 3,
              r_modifier=RModifier.NONE, a=None, family=Family.THM43_THINSHORT):
        return cls(family, j_min, j_max, p=p, q=q,
                   layer_exponents=((p + 1 - alpha0, q + 1),), alpha0=alpha0,
                   r_modifier=r_modifier, a=a)

    @classmethod
    def ex44(cls, alpha0: float, p: float = 3.0, q: float = 6.0, j_min: int = 2, j_max: int = 3, a=None):
        return cls(Family.THM43_FATLONG, j_min, j_max, p=p, q=q,
                   layer_exponents=((p - 1 + alpha0, q - 1),), alpha0=alpha0, a=a)

    @classmethod
    def ex45(cls, alpha0: float, p: float = 3.0, q: float = 6.0, j_min: int = 2, j_max: int = 3,
             r_modifier=RModifier.TIMES_J, a=None):
        return cls.thm43(alpha0, p, q, j_min, j_max, r_modifier=r_modifier, a=a, family=Family.EX45)

    @classmethod
    def ex46(cls, alpha0: float, alpha1: float, p: float = 3.0, q: float = 6.0,
             j_min: int = 2, j_max: int = 3, a=None):
        if not alpha0 < alpha1:
            raise SpecInvalid("EX46 needs alpha0 < alpha1")
        return cls(Family.EX46, j_min, j_max, p=p, q=q,
                   layer_exponents=((p + 1 - alpha0, q + 1), (p - 1 + alpha1, q - 1)),
                   alpha0=alpha0, alpha1=alpha1, a=a)

    @property
    def quadruple(self) -> AllowableQuadruple | None:
        if self.family is Family.EX32 or not self.layer_exponents:
            return None
        pp, qp = self.layer_exponents[0]
        return AllowableQuadruple(self.p, self.q, pp, qp)

    # --- expansion --------------------------------------------------------------
    def recipes(self) -> list[dict]:
        """Per-decoration exponent recipe: label j, scale index and exponents."""
        out = []
        for idx, j in enumerate(range(self.j_min, self.j_max + 1)):
            if self.donors:
                donor = self.donors[idx % len(self.donors)]
                sj = donor.j_min + idx // len(self.donors)
                sub = [rc for rc in donor._own_recipes([sj])][0]
                sub = dict(sub, j=j)
                out.append(sub)
            else:
                out.extend(self._own_recipes([j]))
        return out

    def _own_recipes(self, js: Sequence[int]) -> list[dict]:
        return [{"j": j, "scale_j": j, "family": self.family.value, "p": self.p, "q": self.q,
                 "layers": [list(t) for t in self.layer_exponents],
                 "r_modifier": self.r_modifier.value} for j in js]

    def decorations(self) -> list[DecorationSpec]:
        decs = []
        for idx, rc in enumerate(self.recipes()):
            j, sj = rc["j"], rc["scale_j"]
            a = self.a[idx] if self.a is not None else 2.0 ** (-j)
            fam = Family(rc["family"])
            if fam is Family.EX32 and self.family is Family.EX32 and not self.donors:
                R = self.R_values[idx] if self.R_values is not None else 4.0 ** (-j - 1)
                r = self.r_values[idx] if self.r_values is not None else 8.0 ** (-j - 1)
                decs.append(DecorationSpec(fam, j, a, R, r, ((R, r),), scale_j=sj))
                continue
            if fam is Family.EX32:
                R, r = 4.0 ** (-sj - 1), 8.0 ** (-sj - 1)
                decs.append(DecorationSpec(fam, j, a, R, r, ((R, r),), scale_j=sj))
                continue
            R = 2.0 ** (-sj * rc["p"])
            r = 2.0 ** (-sj * rc["q"] + modifier_log2(rc["r_modifier"], sj))
            layers = tuple((2.0 ** (-sj * pi), 2.0 ** (-sj * qi)) for pi, qi in rc["layers"])
            decs.append(DecorationSpec(fam, j, a, R, r, layers, scale_j=sj))
        return decs

    def to_dict(self) -> dict:
        return {
            "family": self.family.value, "j_min": self.j_min, "j_max": self.j_max,
            "p": self.p, "q": self.q,
            "layer_exponents": [list(t) for t in self.layer_exponents],
            "alpha0": self.alpha0, "alpha1": self.alpha1,
            "r_modifier": self.r_modifier.value,
            "a": list(self.a) if self.a is not None else None,
            "R_values": list(self.R_values) if self.R_values is not None else None,
            "r_values": list(self.r_values) if self.r_values is not None else None,
            "donors": [d.to_dict() for d in self.donors],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecoratedSquareSpec":
        d = dict(d)
        d["donors"] = tuple(cls.from_dict(x) for x in d.get("donors", []))
        d["layer_exponents"] = tuple(tuple(t) for t in d.get("layer_exponents", []))
        for k in ("a", "R_values", "r_values"):
            if d.get(k) is not None:
                d[k] = tuple(d[k])
        return cls(**d)


def _check_disjoint(geoms: list[dict]) -> None:
    ordered = sorted(geoms, key=lambda g: g["a"])
    for lo, hi in zip(ordered, ordered[1:]):
        gap = hi["bbox"][1] - lo["bbox"][3]
        need = max(4 * lo["layers"][-1][1], 4 * hi["layers"][-1][1])
        if gap < need:
            raise SpecInvalid(
                f"decorations {lo['j']} and {hi['j']} overlap or sit closer than the outermost width")


def assemble_outer(geoms: list[dict]) -> list[list[float]]:
    """The square plus all decorations as one counterclockwise vertex ring."""
    ring = [[0.0, 0.0], [1.0, 0.0]]
    for g in sorted(geoms, key=lambda g: g["a"]):
        ring.extend(g["boundary_lower"])
        ring.extend(g["boundary_upper"])
    ring.extend([[1.0, 1.0], [0.0, 1.0]])
    return ring


def decorated_square(decs: Sequence[DecorationSpec], spec_echo: dict | None = None) -> PlanarDomain:
    geoms = [decoration_geometry(d) for d in decs]
    _check_disjoint(geoms)
    try:
        outer = Polygon(assemble_outer(geoms))
        holes = tuple(Polygon(g["diamond"]) for g in geoms)
        slits = []
        for g in geoms:
            slits.append(Polyline(g["u_slit"]))
            slits.extend(Polyline(s) for s in g["l_slits"])
        landmarks = {"decorations": sorted(geoms, key=lambda g: g["j"])}
        if spec_echo is not None:
            landmarks["spec"] = spec_echo
        return PlanarDomain((outer,), holes, tuple(slits), landmarks)
    except DomainInvalid as exc:
        raise SpecInvalid(f"decoration geometry invalid: {exc}") from exc


def build_domain(spec: DecoratedSquareSpec) -> PlanarDomain:
    return decorated_square(spec.decorations(), spec.to_dict())


def require_decoration(domain: PlanarDomain, j: int) -> dict:
    d = domain.decoration(j)
    if d is None:
        raise NoSuchDecoration(f"no decoration with j={j}")
    return d


def corridor_midline(domain: PlanarDomain, j: int, corridor: int) -> Polyline:
    d = domain.decoration(j)
    if d is None or str(corridor) not in d["midlines"]:
        raise NoSuchCorridor(f"no corridor {corridor} in decoration {j}")
    return Polyline(d["midlines"][str(corridor)], check=False)


def classify_corridor(geom: dict, pt) -> int | None:
    """Corridor (1..4) of a point in the decoration's x1-range, None outside it."""
    x, y = float(pt[0]), float(pt[1])
    if not (1.0 < x < geom["x_end"]):
        return None
    dy = y - geom["a"]
    _, U, out = (float(v[0]) for v in profile_offsets(geom, [x]))
    if abs(dy) >= out:
        return None
    r_out = geom["layers"][-1][1]
    if x < 1.0 + r_out and abs(dy) <= U:
        return 4 if dy >= 0 else 1
    if dy >= 0:
        return 4 if dy > U else 3
    return 1 if -dy > U else 2
