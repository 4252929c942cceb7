"""Command-line entry point.

Exit status: 0 when every verdict was computed, 2 when some record is
Inconclusive, 1 on bad input or an internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import pipeline as pl
from .equilibria import rh_solve
from .errors import ViscoEvansError
from .model import ModelVariant, W0, hess_potential
from .svg import image_curve_svg, portrait_svg, profile_svg

log = logging.getLogger("viscoevans")

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


def _jsonable(x):
    if isinstance(x, float):
        return x + 0.0 if math.isfinite(x) else str(x)
    if isinstance(x, (np.floating,)):
        return _jsonable(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def _emit(obj, fh=None) -> None:
    print(json.dumps(_jsonable(obj), sort_keys=False), file=fh or sys.stdout, flush=True)


def _gather_config(args, grid_keys=()) -> dict:
    cfg: dict[str, str] = {}
    if getattr(args, "config", None):
        cfg.update(pl.parse_config_text(Path(args.config).read_text(encoding="utf-8")))
    for name in ("model", "alpha", "alpha1", "alpha2", "alpha3", "s", "connect", "target",
                 "evans_model", "out", "manifest"):
        v = getattr(args, name, None)
        if v is not None:
            cfg[name] = str(v)
    for item in getattr(args, "set", None) or []:
        k, sep, v = item.partition("=")
        if not sep:
            raise ViscoEvansError(f"--set expects key=value, got {item!r}")
        cfg[k.strip().lower().replace("-", "_")] = v.strip()
    return cfg


# ------------------------------------------------------------------ single

def _single_outputs(res: pl.RunResult, idx: int, args) -> None:
    if args.profile_csv and res.grid is not None:
        path = Path(args.profile_csv)
        if idx:
            path = path.with_name(f"{path.stem}_{idx}{path.suffix}")
        res.grid.to_csv(path)
    if args.svg_dir:
        d = Path(args.svg_dir)
        d.mkdir(parents=True, exist_ok=True)
        if res.grid is not None:
            (d / f"profile_{idx}.svg").write_text(profile_svg(res.grid, "profile"), encoding="utf-8")
        if res.report is not None:
            (d / f"evans_{idx}.svg").write_text(image_curve_svg(res.report.values, "Evans image"),
                                                encoding="utf-8")
    if args.json_dir and res.report is not None:
        d = Path(args.json_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"contour_{idx}.json").write_text(json.dumps(_jsonable(pl.record_json(res)), indent=2) + "\n",
                                               encoding="utf-8")


def cmd_single(args) -> int:
    cfg_text = _gather_config(args)
    model = ModelVariant.from_name(cfg_text.get("model", "shear2d"))
    alpha = None
    try:
        alpha = pl._alpha_of(model, cfg_text)
    except ViscoEvansError:
        if not cfg_text.get("connect"):
            raise
    if alpha is not None and pl._bool(cfg_text.get("require_hyperbolic", "true")):
        why = pl.alpha_filter(model, alpha)
        if why is not None:
            _emit({"status": "filtered", "model": model.tag, "alpha": list(alpha), "reason": why})
            return EXIT_OK
    cfg = pl.build_run_config(cfg_text)
    results, filtered = pl.run_single(cfg)
    for f in filtered:
        _emit({"status": "filtered", "model": cfg.model.tag, "left": list(f.left),
               "right": list(f.right), "reason": f.reason})
    for i, res in enumerate(results):
        rec = res.record
        line = pl.record_json(res)
        line.update(status="computed", a_plus=[rec.ap1, rec.ap2, rec.ap3], shock_class=rec.shock_class,
                    reason=res.reason, seed=None if res.seed is None else list(res.seed),
                    seconds=rec.seconds)
        _emit(line)
        _single_outputs(res, i, args)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            pl.records_to_csv([r.record for r in results], fh)
    if not results and not filtered:
        _emit({"status": "empty", "model": cfg.model.tag, "reason": "no connection matches the target"})
    return EXIT_INCONCLUSIVE if any(r.record.inconclusive for r in results) else EXIT_OK


# ------------------------------------------------------------------ sweep

def cmd_sweep(args) -> int:
    cfg = _gather_config(args)
    out = cfg.pop("out", None) or "sweep.csv"
    manifest = cfg.pop("manifest", None)
    jobs = int(cfg.pop("jobs", args.jobs or 1))
    if args.jobs:
        jobs = args.jobs
    cfg.pop("svg_dir", None)
    spec = pl.build_sweep_spec(cfg)
    t0 = time.perf_counter()
    summary = pl.run_sweep(spec, out, manifest, jobs=jobs)
    _emit({"status": "done", "out": str(out), "cases": summary.cases_total, "run": summary.cases_run,
           "resumed_skip": summary.cases_skipped, "rows": summary.rows,
           "inconclusive": summary.inconclusive, "filtered": len(summary.filtered),
           "evaluations": summary.evaluations, "seconds": time.perf_counter() - t0})
    return summary.exit_code


# ------------------------------------------------------------------ figures and harnesses

def cmd_portrait(args) -> int:
    from .profile import PhiPotential, phase_portrait

    model = ModelVariant.from_name(args.model)
    alpha = np.array(pl._floats(args.alpha))
    sigma = args.sigma if args.sigma is not None else float(args.s) ** 2
    P = PhiPotential(alpha, sigma, W0, model)
    window = tuple(pl._floats(args.window)) if args.window else (
        (-2.5, 2.5, -2.5, 2.5) if model is ModelVariant.SHEAR2D else (-1.5, 1.5, -0.5, 2.0))
    por = phase_portrait(P, window, seeds=args.seeds)
    Path(args.out).write_text(portrait_svg(por, f"{model.tag} sigma={sigma:g}"), encoding="utf-8")
    _emit({"status": "done", "out": args.out, "trajectories": len(por.trajectories),
           "equilibria": [{"a": e.a, "type": e.morse.value} for e in por.equilibria]})
    return EXIT_OK


def cmd_dispersion(args) -> int:
    from .profile import dispersion_relation

    ks = [v for part in args.k.split(",") for v in pl.parse_range(part)]
    res = dispersion_relation(args.a3, ks)
    _emit({"a3_plus": args.a3, "growth_rate": res.growth_rate, "max_residual": res.max_residual,
           "small_k_rate": res.small_k_rate, "predicted_rate": res.predicted_rate,
           "k": res.k, "roots": [[[r.real, r.imag] for r in row] for row in res.roots]})
    return EXIT_OK


def cmd_ucsearch(args) -> int:
    from .profile import undercompressive_search

    grid = [(a, s) for a in pl.parse_range(args.alpha1) for s in pl.parse_range(args.s)]
    rep = undercompressive_search(grid)
    _emit({"parameters": rep.n_parameters, "pairs": rep.n_pairs,
           "undercompressive": len(rep.candidates), "connections": len(rep.connections),
           "closest_miss": min((c.miss_distance for c in rep.candidates
                                if c.status != "not_saddle_saddle"), default=None)})
    for c in rep.connections:
        _emit({"alpha1": c.alpha, "s": c.s, "a_minus": c.a_minus, "a_plus": c.a_plus,
               "miss": c.miss_distance})
    return EXIT_OK


def _selftest_checks():
    from .evans import BACKEND, EvansFunction, EvansSystem
    from .equilibria import shock_type
    from .profile import compute_profile, dispersion_relation

    eig = np.sort(np.linalg.eigvalsh(hess_potential(np.array([0.0, 0.0, 1.0]), W0,
                                                    ModelVariant.COMPRESSIBLE3D)))
    yield "hessian at rest", float(np.max(np.abs(eig - [1, 1, 2]))) <= 1e-12

    roots = np.sort([p[0] for p in rh_solve(np.array([1.0, 0.0]), 1.8547 ** 2, ModelVariant.SHEAR2D).points])
    yield "shear RH roots", bool(np.allclose(roots, [-1.8, 0.8, 1.0], atol=1e-3))

    d = dispersion_relation(0.3, [1e-3, 5e-3, 1e-2])
    yield "dispersion residual", d.max_residual <= 1e-12

    pts = rh_solve(np.array([1.0, 0.0]), 1.8547 ** 2, ModelVariant.SHEAR2D).points
    ap = min(pts, key=lambda p: abs(p[0] - 0.8))
    cand = shock_type(np.array([1.0, 0.0]), ap, 1.8547, W0, ModelVariant.SHEAR2D)
    E = EvansFunction(EvansSystem(ModelVariant.SHEAR2D, compute_profile(cand)))
    lam = 0.7 + 1.3j
    a, b = E(lam), E(lam.conjugate())
    yield f"Evans conjugate symmetry ({BACKEND} kernels)", abs(a - b.conjugate()) <= 1e-8 * abs(a)


def cmd_selftest(args) -> int:
    ok = True
    for name, passed in _selftest_checks():
        print(f"{'PASS' if passed else 'FAIL'} {name}", flush=True)
        ok &= bool(passed)
    return EXIT_OK if ok else EXIT_ERROR


# ------------------------------------------------------------------ parser

def _add_case_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value file")
    p.add_argument("--model", help="shear2d, shear1d, comp3d, comp2d, comp1d or transverse")
    p.add_argument("--alpha", help="left state components, comma separated")
    for k in ("alpha1", "alpha2", "alpha3"):
        p.add_argument(f"--{k}")
    p.add_argument("--s", help="shock speed")
    p.add_argument("--target", help="lax, oc, fourpoint or connect")
    p.add_argument("--evans-model", dest="evans_model", help="variant used for the Evans system")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")


class _Parser(argparse.ArgumentParser):
    # usage errors are bad input (1); status 2 is reserved for Inconclusive
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="viscoevans", description="Viscous shock profiles and Evans-function stability")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("single", help="one parameter point")
    _add_case_options(p)
    p.add_argument("--connect", help="left:right endstates, e.g. 1,0:0.8,0 (';' separates pairs)")
    p.add_argument("--csv", help="write records as CSV")
    p.add_argument("--json-dir", help="write one contour JSON per record")
    p.add_argument("--svg-dir", help="write profile and Evans image SVGs")
    p.add_argument("--profile-csv", help="write the profile grid (suffixed per record)")
    p.set_defaults(func=cmd_single)

    p = sub.add_parser("sweep", help="grid of parameter points (start:step:stop ranges)")
    _add_case_options(p)
    p.add_argument("--out", help="CSV output (default sweep.csv)")
    p.add_argument("--manifest", help="completed-case manifest (default <out>.manifest)")
    p.add_argument("--jobs", type=int, default=0, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("portrait", help="phase-portrait SVG")
    p.add_argument("--model", default="shear2d")
    p.add_argument("--alpha", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--s", type=float)
    g.add_argument("--sigma", type=float)
    p.add_argument("--window", help="x0,x1,y0,y1")
    p.add_argument("--seeds", type=int, default=64)
    p.add_argument("--out", default="portrait.svg")
    p.set_defaults(func=cmd_portrait)

    p = sub.add_parser("dispersion", help="roots of the linearised dispersion relation")
    p.add_argument("--a3", type=float, required=True)
    p.add_argument("--k", default="0.001:0.001:0.01", help="values or start:step:stop ranges")
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("ucsearch", help="search for undercompressive shear connections")
    p.add_argument("--alpha1", default="0.2:0.2:5")
    p.add_argument("--s", default="0.2:0.2:7")
    p.set_defaults(func=cmd_ucsearch)

    p = sub.add_parser("selftest", help="quick consistency checks")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ViscoEvansError as e:
        _emit({"status": "error", "error": type(e).__name__, "reason": str(e)}, sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as e:
        _emit({"status": "error", "error": type(e).__name__, "reason": str(e)}, sys.stderr)
        return EXIT_ERROR
    except Exception as e:  # noqa: BLE001
        log.exception("internal error")
        _emit({"status": "error", "error": type(e).__name__, "reason": str(e)}, sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
