"""EX32 sweeps: seeded pairs, corridor datasets, bisection for a uniform C, witnesses."""
from __future__ import annotations

import math

import numpy as np

from ..geometry.decorations import DecoratedSquareSpec, build_domain, classify_corridor
from ..metrics.grid import decoration_grid
from ..metrics.paths import d_alpha, with_endpoints
from ..slices.conditions import measure_dataset, measure_wsplus, smallest_passing_C
from ..slices.corridors import admissible_for_pair
from ..slices.witness import slice_failure_witness
from .report import ExperimentReport, provenance

TRIVIAL_K = 20.0


def iter_pairs(domain, j: int, seed: int, max_draws: int = 1_000_000, batch: int = 4096):
    """Rejection sampler over the decoration box: contained points with delta >= r_j/4.

    Yields (x, y, draws_so_far); draws are consumed in fixed batches, so the
    sequence depends only on (seed, j).
    """
    g = domain.decoration(j)
    x0, y0, x1, y1 = g["bbox"]
    rng = np.random.Generator(np.random.PCG64([seed, j]))
    draws = 0
    while draws < max_draws:
        pts = rng.uniform([x0, y0], [x1, y1], size=(batch, 2, 2))
        flat = pts.reshape(-1, 2)
        ok = domain.contains_many(flat)
        ok[ok] = domain.raw_distance(flat[ok]) >= g["r"] / 4
        ok = ok.reshape(batch, 2).all(axis=1)
        for i in range(batch):
            draws += 1
            if ok[i]:
                yield tuple(map(float, pts[i, 0])), tuple(map(float, pts[i, 1])), draws


def sample_pairs(domain, j: int, n_pairs: int, seed: int, max_draws: int = 1_000_000):
    out, draws = [], 0
    for x, y, draws in iter_pairs(domain, j, seed, max_draws):
        if len(out) >= n_pairs:
            break
        out.append((x, y))
    return out, draws


def _all_pass(measures, C: float) -> bool:
    return all(m.passes(C) for m in measures)


def run_example32(j_list=(2, 3), C: float = 10.0, n_pairs: int = 50, seed: int = 0,
                  n_samples: int = 200, witness_C: float | None = None,
                  witness_grid: str = "auto", max_pairs_drawn: int | None = None) -> ExperimentReport:
    """Positive and negative direction of EX32 for each decoration index in j_list.

    n_pairs counts nontrivial pairs (grid k > 20); trivially satisfied pairs are
    recorded but do not count. max_pairs_drawn caps the accepted pairs overall.
    """
    j_list = sorted(set(int(j) for j in j_list))
    spec = DecoratedSquareSpec.ex32(min(j_list), max(j_list))
    dom = build_domain(spec)
    witness_C = C if witness_C is None else witness_C
    cap = max_pairs_drawn if max_pairs_drawn is not None else 20 * n_pairs + 20
    rows, summary = [], {}
    for j in j_list:
        per_j: dict = {"j": j}
        if n_pairs > 0:
            grid = decoration_grid(dom, j)
            g = dom.decoration(j)
            dms, wsp, measured, trivial, accepted, draws = [], [], [], 0, 0, 0
            for x, y, draws in iter_pairs(dom, j, seed):
                if len(dms) >= n_pairs or accepted >= cap:
                    break
                accepted += 1
                est = d_alpha(grid, x, y, 0.0)
                if est.value <= TRIVIAL_K:
                    trivial += 1
                    rows.append({"j": j, "x": list(x), "y": list(y), "k": est.value,
                                 "status": "trivially satisfied"})
                    continue
                ds = admissible_for_pair(dom, j, x, y, C, 0.0)
                dm = measure_dataset(grid, ds, est.value)
                path = with_endpoints(grid, est, x, y)
                wm = measure_wsplus(grid, ds, path, C1=0.25, n_samples=n_samples,
                                    seed=seed + len(dms))
                dms.append(dm)
                wsp.append(wm)
                measured.append({"j": j, "x": list(x), "y": list(y), "k": est.value,
                                 "status": "measured",
                                 "corridors": sorted((classify_corridor(g, x), classify_corridor(g, y))),
                                 "n_slices": len(ds.slices), "sigma": dm.sigma,
                                 "smallest_C_ws123": smallest_passing_C(dm.passes)})
            c_star = smallest_passing_C(lambda c: _all_pass(dms, c)) if dms else None
            c_eval = c_star if c_star is not None else 64.0
            ws45 = [_ws45(w.report(c_eval)) for w in wsp]
            ws1p = [w.report(c_eval).all_pass("WS-1+") for w in wsp]
            at_C = [dm.passes(C) for dm in dms]
            per_j.update({
                "grid": grid.summary(), "pairs_accepted": accepted, "draws": draws,
                "nontrivial_pairs": len(dms), "trivial_pairs": trivial,
                "fraction_passing_at_C": (sum(at_C) / len(at_C)) if at_C else None,
                "smallest_uniform_C": c_star,
                "ws45_pass_at_uniform_C": all(ws45) if ws45 else None,
                "ws45_pass_fraction": (sum(ws45) / len(ws45)) if ws45 else None,
                "ws1plus_approx_pass_fraction": (sum(ws1p) / len(ws1p)) if ws1p else None,
                "efficiency_pass_fraction": (sum(w.efficiency["ok"] for w in wsp) / len(wsp))
                if wsp else None,
            })
            for row, a, b in zip(measured, ws45, ws1p):
                row["ws45_at_uniform_C"] = a
                row["ws1plus_at_uniform_C"] = b
            rows.extend(measured)
        wit = slice_failure_witness(dom, j, witness_C, grid_policy=witness_grid)
        per_j["witness"] = {"verdict": wit.context["verdict"], "impossible": wit.context["impossible"],
                            "C": witness_C, "entries": wit.to_dict()["entries"]}
        summary[str(j)] = per_j
    params = {"j_list": j_list, "C": C, "n_pairs": n_pairs, "seed": seed, "n_samples": n_samples,
              "witness_C": witness_C, "witness_grid": witness_grid}
    prov = provenance(seed, h_policy="dyadic, largest power of two <= part width / 8",
                      tolerances={"ws1_slack": "2h", "bisection": "C in [1, 64], 50 halvings"},
                      evidence_tier="named corridor families on a discrete grid")
    cols = ("j", "status", "k", "n_slices", "sigma", "smallest_C_ws123", "ws45_at_uniform_C",
            "ws1plus_at_uniform_C")
    return ExperimentReport("ex32", params, rows, summary, prov, cols)


def _ws45(rep) -> bool:
    return all(e.passed for e in rep.entries if e.condition in ("WS-4", "WS-5"))


def witness_growth(j_values=(2, 3, 4), C: float = 10.0) -> dict:
    """Grid k(u, y) for consecutive decorations, with the witness verdicts."""
    spec = DecoratedSquareSpec.ex32(min(j_values), max(j_values))
    dom = build_domain(spec)
    out = {}
    for j in j_values:
        rep = slice_failure_witness(dom, j, C, grid_policy="always")
        k = rep.select("k(u,{y,z})")[0].measured
        d = rep.select("delta(u)")[0].measured
        out[j] = {"k_u_y": k["k_u_y"], "delta_u": d["delta_u"], "r": d["r"],
                  "impossible": rep.context["impossible"],
                  "delta_error": abs(d["delta_u"] - d["r"] / (2 * math.sqrt(2)))}
    return out
