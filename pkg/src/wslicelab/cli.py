"""Command-line frontend: domains, metric queries, condition checks and experiment scenarios."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import WsliceError
from .experiments.report import ExperimentReport, param_hash, provenance
from .geometry.io import domain_dumps, dumps, load_domain, write_atomic

OUTDIR_ENV = "WSLICELAB_OUTDIR"
FORMATS = ("report", "table", "figure")
PLAIN_DIVISOR = 100   # default spacing on domains without decorations


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# value parsers


def parse_range(text: str) -> list[int]:
    """'2..12' -> [2, ..., 12]; '2,3,5' -> [2, 3, 5]."""
    text = str(text).strip()
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def parse_floats(text: str) -> list[float]:
    return [float(t) for t in str(text).split(",") if t.strip()]


def parse_point(text: str) -> tuple[float, float]:
    parts = str(text).split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}")
    return float(parts[0]), float(parts[1])


def parse_window(text: str) -> tuple[float, float, float, float]:
    v = parse_floats(text)
    if len(v) != 4 or v[2] <= v[0] or v[3] <= v[1]:
        raise argparse.ArgumentTypeError(f"expected x0,y0,x1,y1 but got {text!r}")
    return tuple(v)


def parse_formats(text: str) -> tuple[str, ...]:
    v = tuple(t.strip() for t in str(text).split(",") if t.strip())
    bad = [t for t in v if t not in FORMATS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format {bad[0]!r}")
    return v


# ---------------------------------------------------------------------------
# config


@dataclass
class CliConfig:
    subcommand: str
    params: dict
    outdir: Path
    formats: tuple = FORMATS
    extra: dict = field(default_factory=dict)

    def provenance(self) -> dict:
        return provenance(self.params.get("seed"), command=self.subcommand,
                          parameters={k: v for k, v in self.params.items()
                                      if k not in ("func", "config")})


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="object-notation file of flag values (flags override it)")
    p.add_argument("--outdir", help=f"output directory (default ${OUTDIR_ENV} or .)")
    p.add_argument("--formats", type=parse_formats, default=FORMATS,
                   help="comma list of report,table,figure")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1, help="worker cap (runs are sequential)")


def _spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=["ex32", "thm43", "ex44", "ex45", "ex46"], default="ex32")
    p.add_argument("--jmin", type=int)
    p.add_argument("--jmax", type=int)
    p.add_argument("--alpha0", type=float, default=0.5)
    p.add_argument("--alpha1", type=float)
    p.add_argument("--p", type=float, default=3.0)
    p.add_argument("--q", type=float, default=6.0)
    p.add_argument("--r-modifier", choices=["NONE", "TIMES_J", "DIV_J"])
    p.add_argument("--spec", help="spec file (overrides the family flags)")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="wslice", description="wslice domain laboratory")
    top.add_argument("--version", action="version", version=f"wslicelab {__version__}")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("gen-domain", help="build a decorated square and write it out")
    _common(g)
    _spec_flags(g)
    g.set_defaults(func=cmd_gen_domain)

    d = sub.add_parser("dist", help="grid estimate of d_alpha between two points")
    _common(d)
    d.add_argument("--domain", required=True)
    d.add_argument("--x", type=parse_point, required=True)
    d.add_argument("--y", type=parse_point, required=True)
    d.add_argument("--alpha", type=float, default=0.0)
    d.add_argument("--h", type=float, help="grid spacing (default: narrowest corridor width / 8, else short side / 100)")
    d.add_argument("--window", type=parse_window, help="x0,y0,x1,y1 grid window")
    d.set_defaults(func=cmd_dist)

    for name, func in (("check-wslice", cmd_check_wslice), ("check-slice", cmd_check_slice)):
        c = sub.add_parser(name, help="check a dataset file against the conditions")
        _common(c)
        c.add_argument("--domain", required=True)
        c.add_argument("--dataset", required=True)
        c.add_argument("--h", type=float)
        c.add_argument("--window", type=parse_window)
        c.add_argument("--C", type=float, help="override the dataset's C")
        if name == "check-slice":
            c.add_argument("--path", required=True, help="polyline file: list of [x, y]")
            c.add_argument("--C1", type=float)
        c.set_defaults(func=func)

    e = sub.add_parser("experiment", help="run a scenario")
    esub = e.add_subparsers(dest="scenario", parser_class=_Parser)
    for name in ("ex32", "thm43", "ex44", "ex45", "ex46", "scaling", "alpha-set", "combine"):
        s = esub.add_parser(name)
        _common(s)
        s.set_defaults(func=cmd_experiment)
        if name == "ex32":
            s.add_argument("--js", type=parse_range, default=[2, 3])
            s.add_argument("--C", type=float, default=10.0)
            s.add_argument("--n-pairs", type=int, default=50)
            s.add_argument("--n-samples", type=int, default=200)
        if name in ("thm43", "ex44", "ex45", "ex46", "scaling", "alpha-set"):
            s.add_argument("--alpha0", type=float, default=0.5)
            s.add_argument("--p", type=float, default=3.0)
            s.add_argument("--q", type=float, default=6.0)
            s.add_argument("--alphas", type=parse_floats, default=[0.25, 0.5, 0.75])
        if name in ("thm43", "ex44"):
            s.add_argument("--js", type=parse_range, default=[2, 3])
            s.add_argument("--no-toy", action="store_true")
        if name in ("ex45", "scaling", "alpha-set", "ex46"):
            s.add_argument("--js", type=parse_range, default=list(range(2, 13)))
        if name == "ex46":
            s.add_argument("--alpha1", type=float, default=0.7)
        if name == "scaling":
            s.add_argument("--family", choices=["thm43", "ex44", "ex45"], default="thm43")
            s.add_argument("--grid-policy", choices=["none", "auto"], default="none")
        if name == "alpha-set":
            _spec_flags_alpha(s)
        if name == "combine":
            s.add_argument("--mode", choices=["UNION", "INTERSECTION"], required=True)
            s.add_argument("--specs", required=True, help="comma list of spec files")
            s.add_argument("--alphas", type=parse_floats,
                           default=[i / 20 for i in range(20)])
    return top


def _spec_flags_alpha(p) -> None:
    p.add_argument("--family", choices=["thm43", "ex44", "ex45", "ex46"], default="thm43")
    p.add_argument("--alpha1", type=float)
    p.add_argument("--r-modifier", choices=["NONE", "TIMES_J", "DIV_J"])
    p.add_argument("--spec", help="spec file (overrides the family flags)")
    p.add_argument("--numeric", action="store_true", help="grid confirmation rows for j <= 3")


# ---------------------------------------------------------------------------
# helpers


def _spec_from_args(a):
    from .geometry.decorations import DecoratedSquareSpec, RModifier
    if getattr(a, "spec", None):
        return DecoratedSquareSpec.from_dict(json.loads(Path(a.spec).read_text()))
    fam = a.family
    jmin = getattr(a, "jmin", None) or (1 if fam == "ex32" else 2)
    jmax = getattr(a, "jmax", None) or max(jmin, 3)
    mod = getattr(a, "r_modifier", None)
    if fam == "ex32":
        return DecoratedSquareSpec.ex32(jmin, jmax)
    if fam == "thm43":
        return DecoratedSquareSpec.thm43(a.alpha0, a.p, a.q, jmin, jmax,
                                         r_modifier=RModifier(mod or "NONE"))
    if fam == "ex44":
        return DecoratedSquareSpec.ex44(a.alpha0, a.p, a.q, jmin, jmax)
    if fam == "ex45":
        return DecoratedSquareSpec.ex45(a.alpha0, a.p, a.q, jmin, jmax,
                                        r_modifier=RModifier(mod or "TIMES_J"))
    alpha1 = a.alpha1 if a.alpha1 is not None else 0.7
    return DecoratedSquareSpec.ex46(a.alpha0, alpha1, a.p, a.q, jmin, jmax)


def _grid_for(domain, pts, h=None, window=None):
    """Decoration multigrid when all points share a decoration, else a uniform grid."""
    from .geometry.decorations import classify_corridor
    from .metrics.grid import build_grid, decoration_grid, dyadic_spacing, narrowest_width_in
    decs = domain.landmarks.get("decorations", []) if domain.landmarks else []
    if h is None and window is None:
        for g in decs:
            if all(classify_corridor(g, p) is not None for p in pts):
                return decoration_grid(domain, g["j"])
    window = window or domain.bounds
    if h is None:
        w = narrowest_width_in(domain, window)
        if w is None:
            x0, y0, x1, y1 = window
            h = min(x1 - x0, y1 - y0) / PLAIN_DIVISOR
        else:
            h = dyadic_spacing(w)
    return build_grid(domain, window, h)


def _emit(cfg: CliConfig, stem: str, payload: dict, svg: str | None = None) -> list[Path]:
    paths = []
    if "report" in cfg.formats:
        paths.append(write_atomic(cfg.outdir / f"{stem}.json", dumps(payload) + "\n"))
    if svg is not None and "figure" in cfg.formats:
        paths.append(write_atomic(cfg.outdir / f"{stem}.svg", svg))
    return paths


def _stem(cfg: CliConfig, scenario: str) -> str:
    return f"{scenario}_{param_hash(cfg.provenance()['parameters'])}"


# ---------------------------------------------------------------------------
# commands


def cmd_gen_domain(cfg: CliConfig, a) -> int:
    from .geometry.decorations import build_domain
    from .svg import domain_figure
    spec = _spec_from_args(a)
    dom = build_domain(spec)
    stem = f"domain_{param_hash(spec.to_dict())}"
    out = [write_atomic(cfg.outdir / f"{stem}.json", domain_dumps(dom))]
    if "figure" in cfg.formats:
        out.append(write_atomic(cfg.outdir / f"{stem}.svg", domain_figure(dom, title=stem)))
    for p in out:
        print(p)
    return 0


def cmd_dist(cfg: CliConfig, a) -> int:
    from .metrics.paths import d_alpha
    from .svg import domain_figure
    dom = load_domain(a.domain)
    grid = _grid_for(dom, [a.x, a.y], a.h, a.window)
    est = d_alpha(grid, a.x, a.y, a.alpha)
    payload = {"estimate": est.to_dict(), "grid": grid.summary(), "provenance": cfg.provenance()}
    stem = _stem(cfg, "dist")
    svg = domain_figure(dom, window=grid.windows[0] if len(grid.windows) == 1 else None,
                        paths=[est.polyline], points={"x": a.x, "y": a.y}, title=stem)
    for p in _emit(cfg, stem, payload, svg):
        print(p)
    print(f"d_alpha = {est.value:.10g}")
    return 0


def _load_dataset(a):
    from .slices.regions import load_dataset
    dom = load_domain(a.domain)
    ds = load_dataset(dom, a.dataset)
    if a.C is not None:
        ds = ds.with_C(a.C)
    return dom, ds


def cmd_check_wslice(cfg: CliConfig, a) -> int:
    from .metrics.paths import d_alpha
    from .slices.conditions import evaluate_dataset
    dom, ds = _load_dataset(a)
    grid = _grid_for(dom, [ds.x, ds.y], a.h, a.window)
    est = d_alpha(grid, ds.x, ds.y, ds.alpha)
    rep = evaluate_dataset(grid, ds, est.value)
    return _finish_check(cfg, "check-wslice", rep)


def cmd_check_slice(cfg: CliConfig, a) -> int:
    from .geometry.primitives import path_polyline
    from .slices.conditions import check_slice_condition
    dom, ds = _load_dataset(a)
    path = path_polyline(json.loads(Path(a.path).read_text()))
    grid = _grid_for(dom, [ds.x, ds.y], a.h, a.window)
    rep = check_slice_condition(grid, ds, path, ds.C, a.C1)
    return _finish_check(cfg, "check-slice", rep)


def _finish_check(cfg: CliConfig, scenario: str, rep) -> int:
    payload = {"report": rep.to_dict(), "provenance": cfg.provenance()}
    for p in _emit(cfg, _stem(cfg, scenario), payload):
        print(p)
    print(f"overall: {'pass' if rep.passed else 'fail'}")
    return 0 if rep.passed else 1


def cmd_experiment(cfg: CliConfig, a) -> int:
    from . import experiments as ex
    from .geometry.decorations import DecoratedSquareSpec, Family
    s = a.scenario
    ok = True
    if s == "ex32":
        rep = ex.run_example32(a.js, a.C, a.n_pairs, a.seed, n_samples=a.n_samples)
        for v in rep.summary.values():
            if v.get("nontrivial_pairs"):
                ok &= v["smallest_uniform_C"] is not None and bool(v["ws45_pass_at_uniform_C"])
    elif s in ("thm43", "ex44"):
        rep = ex.thm43_obstruction(a.alpha0, a.p, a.q, a.js, a.alphas, family=s, toy=not a.no_toy)
        ok = all(r["bracketing"] for r in rep.rows)
        ok &= all(c["ok"] for v in rep.summary["per_j"].values() for c in v["crossing_sanity"])
        toy = rep.summary.get("toy_exhaustion")
        if toy is not None:
            ok &= (not toy["obstruction"]["passes"] and toy["sanity_near_pair"]["passes"]
                   and toy["sanity_large_C"]["passes"])
    elif s == "ex45":
        rep = ex.ex45_trajectories(a.alpha0, a.p, a.q, a.js)
    elif s == "ex46":
        spec = DecoratedSquareSpec.ex46(a.alpha0, a.alpha1, a.p, a.q)
        rep = ex.alpha_set_probe(spec, a.alphas, a.js)
        rep.scenario = "ex46"
    elif s == "scaling":
        fam = {"thm43": Family.THM43_THINSHORT, "ex44": Family.THM43_FATLONG,
               "ex45": Family.EX45}[a.family]
        rep = ex.scaling_table(a.alpha0, a.p, a.q, a.alphas, a.js, fam, a.grid_policy)
        ok = rep.summary["identity_max_abs_error"] <= 1e-12
    elif s == "alpha-set":
        if a.spec is None:
            a.jmin = a.jmax = None
        spec = _spec_from_args(a)
        rep = ex.alpha_set_probe(spec, a.alphas, a.js, numeric=a.numeric)
    else:  # combine
        specs = [DecoratedSquareSpec.from_dict(json.loads(Path(f).read_text()))
                 for f in a.specs.split(",") if f.strip()]
        combined = ex.combine_specs(a.mode, specs)
        probe = ex.alpha_set_probe(combined, a.alphas)
        rep = ExperimentReport("combine", {"mode": a.mode, "specs": [sp.to_dict() for sp in specs],
                                           "alphas": list(a.alphas)},
                               probe.rows, {"combined_spec": combined.to_dict(),
                                            "predicted_set": probe.summary["predicted_set"]},
                               columns=("alpha", "classification"))
    rep.provenance = {**rep.provenance, **cfg.provenance()}
    formats = tuple(f for f in cfg.formats if f != "figure")
    paths = rep.write(cfg.outdir, formats)
    if "figure" in cfg.formats:
        svg = _scenario_figure(s, a, rep.stem)
        if svg is not None:
            paths.append(write_atomic(cfg.outdir / f"{rep.stem}.svg", svg))
    for p in paths:
        print(p)
    print(f"scenario {rep.scenario}: {'complete' if ok else 'failed'}")
    return 0 if ok else 1


def _scenario_figure(scenario: str, a, title: str) -> str | None:
    """Domain, corridor midlines and the scenario's base points for the first decoration."""
    from .experiments.thm43 import midline_routes, obstruction_pair
    from .geometry.decorations import DecoratedSquareSpec, build_domain
    from .slices.witness import avoiding_route, witness_points
    from .svg import domain_figure
    if scenario not in ("ex32", "thm43", "ex44"):
        return None
    js = sorted(set(a.js))
    if scenario == "ex32":
        dom = build_domain(DecoratedSquareSpec.ex32(js[0], js[-1]))
        g = dom.decoration(js[0])
        points, paths = witness_points(g), [avoiding_route(g)]
    elif scenario in ("thm43", "ex44"):
        make = DecoratedSquareSpec.thm43 if scenario == "thm43" else DecoratedSquareSpec.ex44
        dom = build_domain(make(a.alpha0, a.p, a.q, js[0], js[-1]))
        g = dom.decoration(js[0])
        y, z = obstruction_pair(g)
        points, paths = {"y": y, "z": z}, list(midline_routes(g, y, z).values())
    x0, y0, x1, y1 = g["bbox"]
    pad = 0.1 * (x1 - x0)
    return domain_figure(dom, window=(x0 - pad, y0 - pad, x1 + pad, y1 + pad),
                         paths=paths, points=points, title=title)


# ---------------------------------------------------------------------------
# entry


def _config_defaults(parser: argparse.ArgumentParser, path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("--config: expected an object of flag values")
    actions = {act.dest: act for act in parser._actions}
    out = {}
    for key, val in data.items():
        dest = key.replace("-", "_")
        if dest not in actions or dest in ("help", "config"):
            raise UsageError(f"--config: unknown flag {key!r}")
        act = actions[dest]
        if act.type is not None and isinstance(val, str):
            val = act.type(val)
        out[dest] = val
    return out


def _config_path(argv: list[str]) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise UsageError("argument --config: expected one argument")
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _leaf_parser(top: argparse.ArgumentParser, argv: list[str]) -> argparse.ArgumentParser:
    parser = top
    for tok in argv:
        sub = next((act for act in parser._actions
                    if isinstance(act, argparse._SubParsersAction)), None)
        if sub is None:
            break
        if tok in sub.choices:
            parser = sub.choices[tok]
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    top = build_parser()
    try:
        config = _config_path(argv)
        if config:
            leaf = _leaf_parser(top, argv)
            values = _config_defaults(leaf, config)
            for act in leaf._actions:
                if act.dest in values:
                    act.required = False
            leaf.set_defaults(**values)
        a = top.parse_args(argv)
        if getattr(a, "func", None) is None:
            raise UsageError("missing subcommand")
        if a.threads < 1:
            raise UsageError("argument --threads: must be >= 1")
    except UsageError as exc:
        print(f"wslice: usage error: {exc}", file=sys.stderr)
        return 2
    except argparse.ArgumentTypeError as exc:
        print(f"wslice: usage error: {exc}", file=sys.stderr)
        return 2
    outdir = Path(a.outdir or os.environ.get(OUTDIR_ENV) or ".")
    params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(a).items()
              if k not in ("func",)}
    cfg = CliConfig(a.command if a.command != "experiment" else f"experiment {a.scenario}",
                    params, outdir, tuple(a.formats))
    np.seterr(all="ignore")
    try:
        return a.func(cfg, a)
    except (WsliceError, ValueError) as exc:
        print(f"wslice: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"wslice: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
