"""Single runs and parameter sweeps: RH states -> profile -> contour -> verdict."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .contour import ContourReport, ContourSpec, Verdict, VerdictKind, choose_radius, verdict, winding_number
from .equilibria import ShockCandidate, ShockClass, classify_equilibrium, rh_solve, shock_type
from .errors import ContractViolation, ViscoEvansError
from .evans import EvansFunction, EvansSystem
from .model import ElasticPotential, ModelVariant, ViscosityKind, W0, a3_index, characteristics, embed
from .profile import ProfileGrid, ProfileOptions, overcompressive_seeds, compute_profile

log = logging.getLogger(__name__)

__all__ = [
    "Target",
    "RunConfig",
    "RunRecord",
    "RunResult",
    "Filtered",
    "Connection",
    "CSV_HEADER",
    "parse_config_text",
    "parse_range",
    "build_run_config",
    "alpha_filter",
    "build_sweep_spec",
    "SweepSpec",
    "SweepSummary",
    "enumerate_connections",
    "run_connection",
    "run_single",
    "run_sweep",
    "records_to_csv",
    "read_csv_records",
    "record_json",
]

CSV_HEADER = ("model,alpha1,alpha2,alpha3,s,ap1,ap2,ap3,shock_class,R,n_points,"
              "max_rel_step,L,winding,verdict,seconds").split(",")
GRID_KEYS = ("alpha1", "alpha2", "alpha3", "s")
SNAP_TOL = 1e-3


class Target(enum.Enum):
    CONNECT = "connect"
    ALL_LAX = "lax"
    OVERCOMPRESSIVE = "oc"
    FOUR_POINT = "fourpoint"

    @classmethod
    def from_name(cls, name: str) -> "Target":
        key = name.strip().lower().replace("_", "").replace("-", "")
        table = {"connect": cls.CONNECT, "lax": cls.ALL_LAX, "alllaxpairs": cls.ALL_LAX,
                 "oc": cls.OVERCOMPRESSIVE, "overcompressive": cls.OVERCOMPRESSIVE,
                 "overcompressivefamily": cls.OVERCOMPRESSIVE, "fourpoint": cls.FOUR_POINT,
                 "fourpointconfigurations": cls.FOUR_POINT}
        try:
            return table[key]
        except KeyError:
            raise ContractViolation(f"unknown target {name!r}") from None


@dataclass(frozen=True)
class RunConfig:
    model: ModelVariant
    alpha: tuple
    s: float
    target: Target = Target.ALL_LAX
    connect: tuple = ()
    evans_model: ModelVariant | None = None
    pot: ElasticPotential = W0
    n_interior: int = 5
    R_start: float = 2.0
    R_max: float = 1024.0
    fit_tol: float = 0.2
    n_init: int = 20
    min_modulus: float = 1e-4
    max_step_change: float = 0.2
    profile_tol: float = 1e-3
    require_hyperbolic: bool = True
    require_feasible: bool = True

    @property
    def strain_variant(self) -> ModelVariant:
        return ModelVariant.COMPRESSIBLE2D if self.model is ModelVariant.TRANSVERSE else self.model

    @property
    def evans_variant(self) -> ModelVariant:
        return self.evans_model or self.model

    @property
    def sigma(self) -> float:
        return self.s * self.s

    def key(self) -> str:
        a = ",".join(f"{x:.17g}" for x in self.alpha)
        return f"{self.model.tag}|{a}|{self.s:.17g}|{self.target.value}|{self.evans_variant.tag}"


# ------------------------------------------------------------------ config text

def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment; later keys win."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ContractViolation(f"config line {n}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip().lower().replace("-", "_")] = v.strip()
    return out


def parse_range(text: str) -> list[float]:
    """``start:step:stop`` (stop included when hit within 1e-12) or a single number."""
    parts = [p.strip() for p in str(text).split(":")]
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ContractViolation(f"bad range {text!r}; use start:step:stop")
    start, step, stop = map(float, parts)
    if step <= 0:
        raise ContractViolation("range step must be positive")
    vals = []
    i = 0
    while True:
        v = start + i * step
        if v > stop + 1e-12:
            break
        vals.append(stop if abs(v - stop) <= 1e-12 else round(v, 12))
        i += 1
    return vals


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in str(text).replace(" ", "").split(",") if x != "")


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ContractViolation(f"not a boolean: {text!r}")


_COMPONENTS = {
    ModelVariant.SHEAR2D: ("alpha1", "alpha2"),
    ModelVariant.SHEAR1D: ("alpha1",),
    ModelVariant.COMPRESSIBLE3D: ("alpha1", "alpha2", "alpha3"),
    ModelVariant.COMPRESSIBLE2D: ("alpha2", "alpha3"),
    ModelVariant.TRANSVERSE: ("alpha2", "alpha3"),
    ModelVariant.COMPRESSIBLE1D: ("alpha3",),
}

_KNOWN = {"model", "alpha", "alpha1", "alpha2", "alpha3", "s", "target", "connect", "evans_model",
          "mu1", "mu2", "mu3", "c_offset", "c2", "c3", "viscosity", "n_interior", "r_start", "r_max",
          "fit_tol", "n_init", "min_modulus", "max_step_change", "profile_tol", "require_hyperbolic",
          "require_feasible", "out", "manifest", "jobs", "svg_dir"}


def _potential(cfg: dict) -> ElasticPotential:
    if "c2" in cfg or "c3" in cfg:
        return ElasticPotential.from_genform(float(cfg.get("c2", 0)), float(cfg.get("c3", 0)),
                                             float(cfg.get("c_offset", 0.25)))
    return ElasticPotential(float(cfg.get("mu1", 1.0)), float(cfg.get("mu2", 0.0)),
                            float(cfg.get("mu3", 0.0)), float(cfg.get("c_offset", 0.25)))


def _alpha_of(model: ModelVariant, cfg: dict, values: dict | None = None) -> tuple:
    names = _COMPONENTS[model]
    values = values or {}
    if "alpha" in cfg and not any(n in values for n in names):
        a = _floats(cfg["alpha"])
        if len(a) != len(names):
            raise ContractViolation(f"{model.tag} needs {len(names)} alpha components, got {len(a)}")
        return a
    out = []
    for n in names:
        if n in values:
            out.append(float(values[n]))
        elif n in cfg:
            out.append(float(cfg[n]))
        elif n == "alpha2" and model is ModelVariant.SHEAR2D:
            out.append(0.0)
        else:
            raise ContractViolation(f"missing {n} for {model.tag}")
    return tuple(out)


def _connect_pairs(text: str) -> tuple:
    pairs = []
    for chunk in str(text).split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        left, sep, right = chunk.partition(":")
        if not sep:
            raise ContractViolation("connect pairs look like 1,0:0.8,0")
        pairs.append((_floats(left), _floats(right)))
    return tuple(pairs)


def build_run_config(cfg: dict, values: dict | None = None) -> RunConfig:
    unknown = set(cfg) - _KNOWN
    if unknown:
        raise ContractViolation(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        kind = ViscosityKind(cfg.get("viscosity", "Z2").upper())
    except ValueError:
        raise ContractViolation(f"unknown viscosity {cfg.get('viscosity')!r}") from None
    if kind is not ViscosityKind.Z2:
        raise ContractViolation("profiles and Evans systems are implemented for the Z2 viscosity only")
    model = ModelVariant.from_name(cfg.get("model", "shear2d"))
    values = values or {}
    s = float(values["s"]) if "s" in values else float(cfg["s"]) if "s" in cfg else None
    if s is None:
        raise ContractViolation("missing shock speed s")
    connect = _connect_pairs(cfg["connect"]) if cfg.get("connect") else ()
    target = Target.from_name(cfg["target"]) if "target" in cfg else (
        Target.CONNECT if connect else Target.ALL_LAX)
    if target is Target.CONNECT and not connect:
        raise ContractViolation("target=connect needs connect pairs")
    if connect and "alpha" not in cfg and not any(k in cfg or k in values for k in _COMPONENTS[model]):
        alpha = connect[0][0]
    else:
        alpha = _alpha_of(model, cfg, values)
    em = cfg.get("evans_model")
    return RunConfig(
        model=model, alpha=tuple(alpha), s=s, target=target, connect=connect,
        evans_model=ModelVariant.from_name(em) if em else None, pot=_potential(cfg),
        n_interior=int(cfg.get("n_interior", 5)), R_start=float(cfg.get("r_start", 2.0)),
        R_max=float(cfg.get("r_max", 1024.0)), fit_tol=float(cfg.get("fit_tol", 0.2)),
        n_init=int(cfg.get("n_init", 20)), min_modulus=float(cfg.get("min_modulus", 1e-4)),
        max_step_change=float(cfg.get("max_step_change", 0.2)),
        profile_tol=float(cfg.get("profile_tol", 1e-3)),
        require_hyperbolic=_bool(cfg.get("require_hyperbolic", "true")),
        require_feasible=_bool(cfg.get("require_feasible", "true")),
    )


# ------------------------------------------------------------------ records

@dataclass(frozen=True)
class RunRecord:
    """One CSV row: a single connection and its contour verdict."""

    model: str
    alpha1: float
    alpha2: float
    alpha3: float
    s: float
    ap1: float
    ap2: float
    ap3: float
    shock_class: str
    R: float | None
    n_points: int | None
    max_rel_step: float | None
    L: float | None
    winding: int | None
    verdict: str
    seconds: float

    @property
    def inconclusive(self) -> bool:
        return self.verdict.startswith("Inconclusive")

    def as_row(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return f"{v + 0.0:.17g}"
            return str(v)
        return [fmt(getattr(self, f.name)) for f in dataclasses.fields(self)]

    @classmethod
    def from_row(cls, row: dict) -> "RunRecord":
        def opt(conv, v):
            return None if v == "" else conv(v)
        return cls(row["model"], float(row["alpha1"]), float(row["alpha2"]), float(row["alpha3"]),
                   float(row["s"]), float(row["ap1"]), float(row["ap2"]), float(row["ap3"]),
                   row["shock_class"], opt(float, row["R"]), opt(int, row["n_points"]),
                   opt(float, row["max_rel_step"]), opt(float, row["L"]), opt(int, row["winding"]),
                   row["verdict"], float(row["seconds"]))


def records_to_csv(records, fh, header: bool = True) -> None:
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.as_row())


def read_csv_records(path_or_text) -> list[RunRecord]:
    src = path_or_text
    is_path = isinstance(src, Path) or (isinstance(src, str) and "\n" not in src and Path(src).is_file())
    text = Path(src).read_text(encoding="utf-8") if is_path else str(src)
    rd = csv.DictReader(io.StringIO(text))
    if rd.fieldnames != CSV_HEADER:
        raise ContractViolation("unexpected CSV header")
    return [RunRecord.from_row(r) for r in rd]


@dataclass(frozen=True)
class Filtered:
    left: tuple
    right: tuple
    reason: str


@dataclass(frozen=True)
class Connection:
    cand: ShockCandidate
    seed: tuple | None = None


@dataclass(eq=False)
class RunResult:
    record: RunRecord
    cand: ShockCandidate
    grid: ProfileGrid | None = None
    report: ContourReport | None = None
    evaluations: int = 0
    reason: str = ""
    seed: tuple | None = None


def record_json(res: RunResult | RunRecord) -> dict:
    """Contour summary mirroring the table columns."""
    rec = res.record if isinstance(res, RunResult) else res
    a = [rec.alpha1, rec.alpha2, rec.alpha3]
    return {"model": rec.model, "alpha": a, "s": rec.s, "R": rec.R, "n_points": rec.n_points,
            "max_rel_step": rec.max_rel_step, "L": rec.L, "winding": rec.winding,
            "verdict": rec.verdict}


# ------------------------------------------------------------------ enumeration

def _state_filter(info, cfg: RunConfig) -> str | None:
    if cfg.require_feasible and not info.feasible:
        return "infeasible endstate (a3 <= 0)"
    if cfg.require_hyperbolic and not info.hyperbolic_endstate:
        return "endstate not strictly hyperbolic"
    return None


def alpha_filter(model: ModelVariant, alpha, pot: ElasticPotential = W0) -> str | None:
    """Reason to skip every connection out of ``alpha``; needs no shock speed."""
    strain = ModelVariant.COMPRESSIBLE2D if model is ModelVariant.TRANSVERSE else model
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    k = a3_index(strain)
    if k is not None and a[k] <= 0:
        return "infeasible endstate (a3 <= 0)"
    ch = characteristics(a, pot, strain)
    if not ch.strictly_hyperbolic:
        m = ", ".join(f"{x:.6g}" for x in np.sort(ch.m))
        return f"endstate not strictly hyperbolic (characteristic values {m})"
    return None


def _snap(point, states, what: str) -> np.ndarray:
    p = np.asarray(point, dtype=float)
    best = min(states, key=lambda q: np.linalg.norm(q - p))
    if np.linalg.norm(best - p) > SNAP_TOL * (1.0 + np.linalg.norm(p)):
        raise ContractViolation(f"{what} {tuple(p)} is not a Rankine-Hugoniot state for this speed")
    return best


def enumerate_connections(cfg: RunConfig) -> tuple[list[Connection], list[Filtered]]:
    """Candidate connections selected by ``cfg.target``, plus filtered pairs with reasons."""
    strain = cfg.strain_variant
    alpha = np.asarray(cfg.alpha, dtype=float)
    if alpha.size != strain.strain_dim:
        raise ContractViolation(f"{cfg.model.tag} needs {strain.strain_dim} alpha components")
    sol = rh_solve(alpha, cfg.sigma, strain)
    if sol.degenerate or sol.ring is not None:
        raise ContractViolation("Rankine-Hugoniot set is degenerate (continuum of states)")
    states = sol.points
    infos = [classify_equilibrium(p, alpha, cfg.sigma, cfg.pot, strain) for p in states]
    reasons = [_state_filter(i, cfg) for i in infos]

    def idx(p):
        return int(np.argmin([np.linalg.norm(q - p) for q in states]))

    conns, filtered = [], []

    def consider(i, j, seed=None):
        why = reasons[i] or reasons[j]
        if why:
            filtered.append(Filtered(tuple(states[i]), tuple(states[j]), why))
            return None
        c = shock_type(states[i], states[j], cfg.s, cfg.pot, cfg.model)
        return c

    if cfg.target is Target.CONNECT:
        for left, right in cfg.connect:
            i = idx(_snap(left, states, "left state"))
            j = idx(_snap(right, states, "right state"))
            if i == j:
                raise ContractViolation("connect endstates coincide")
            c = consider(i, j)
            if c is None:
                continue
            if c.shock_class is ShockClass.OVERCOMPRESSIVE:
                conns += [Connection(c, tuple(float(x) for x in sd))
                          for sd in overcompressive_seeds(c, cfg.n_interior, cfg.pot)]
            else:
                conns.append(Connection(c))
        return conns, filtered

    want_lax = cfg.target in (Target.ALL_LAX, Target.FOUR_POINT)
    want_oc = cfg.target in (Target.OVERCOMPRESSIVE, Target.FOUR_POINT)
    for i in range(len(states)):
        for j in range(len(states)):
            if i == j:
                continue
            c = consider(i, j)
            if c is None:
                continue
            if want_lax and c.shock_class is ShockClass.LAX:
                conns.append(Connection(c))
            elif want_oc and c.shock_class is ShockClass.OVERCOMPRESSIVE:
                try:
                    seeds = overcompressive_seeds(c, cfg.n_interior, cfg.pot)
                except ViscoEvansError as e:
                    filtered.append(Filtered(tuple(states[i]), tuple(states[j]), str(e)))
                    continue
                conns += [Connection(c, tuple(float(x) for x in sd)) for sd in seeds]
    return conns, filtered


# ------------------------------------------------------------------ one connection

def _make_record(cfg: RunConfig, cand: ShockCandidate, seconds: float, grid=None, report=None,
                 R=None, verdict_text: str = "") -> RunRecord:
    strain = cfg.strain_variant
    a = embed(cand.alpha, strain)
    b = embed(cand.a_plus, strain)
    return RunRecord(
        cfg.model.tag, float(a[0]), float(a[1]), float(a[2]), float(cfg.s),
        float(b[0]), float(b[1]), float(b[2]), cand.shock_class.value,
        None if R is None else float(R),
        None if report is None or report.winding is None else int(report.n_points),
        None if report is None or report.winding is None else float(report.max_rel_step),
        None if grid is None else float(grid.L),
        None if report is None else report.winding,
        verdict_text, float(seconds))


def run_connection(conn: Connection, cfg: RunConfig) -> RunResult:
    """Profile, radius selection, winding number and verdict for one connection."""
    t0 = time.perf_counter()
    cand = conn.cand
    grid = report = None
    R = None
    evals = 0
    if cand.shock_class is ShockClass.DEGENERATE:
        v = Verdict(VerdictKind.INCONCLUSIVE, None, "degenerate shock")
        rec = _make_record(cfg, cand, time.perf_counter() - t0, verdict_text=str(v))
        return RunResult(rec, cand, reason=v.reason, seed=conn.seed)
    try:
        opts = ProfileOptions(tol=cfg.profile_tol, seed=conn.seed)
        grid = compute_profile(cand, cfg.pot, opts)
        sys = EvansSystem(cfg.evans_variant, grid, cfg.pot)
        E = EvansFunction(sys)
        rc = choose_radius(E, R_start=cfg.R_start, tol=cfg.fit_tol, R_max=cfg.R_max)
        if not rc.ok:
            evals = E.evaluations
            v = Verdict(VerdictKind.INCONCLUSIVE, None, f"radius above {cfg.R_max:g} not certified")
        else:
            R = rc.R
            spec = ContourSpec(R=R, n_init=cfg.n_init, max_step_change=cfg.max_step_change,
                               min_modulus=cfg.min_modulus)
            report = winding_number(E, spec)
            report.fit = rc.fit
            second = None
            if cand.shock_class is ShockClass.UNDERCOMPRESSIVE and report.winding is not None:
                second = winding_number(E, dataclasses.replace(spec, min_modulus=10 * spec.min_modulus))
            v = verdict(report, cand, second)
            evals = E.evaluations
    except ViscoEvansError as e:
        v = Verdict(VerdictKind.INCONCLUSIVE, None, f"{type(e).__name__}: {e}".replace("\n", " "))
    rec = _make_record(cfg, cand, time.perf_counter() - t0, grid, report, R, str(v))
    return RunResult(rec, cand, grid, report, evals, v.reason, conn.seed)


def run_single(cfg: RunConfig) -> tuple[list[RunResult], list[Filtered]]:
    conns, filtered = enumerate_connections(cfg)
    for f in filtered:
        log.info("skipped %s -> %s: %s", f.left, f.right, f.reason)
    return [run_connection(c, cfg) for c in conns], filtered


# ------------------------------------------------------------------ sweeps

@dataclass(frozen=True)
class SweepSpec:
    base: dict
    axes: tuple  # ((name, values), ...) in enumeration order

    def cases(self) -> list[RunConfig]:
        names = [n for n, _ in self.axes]
        grids = [v for _, v in self.axes]
        out = []
        if any(len(g) == 0 for g in grids):
            return out
        for combo in _product(grids):
            out.append(build_run_config(self.base, dict(zip(names, combo))))
        return out


def _product(grids):
    if not grids:
        yield ()
        return
    for v in grids[0]:
        for rest in _product(grids[1:]):
            yield (v,) + rest


def build_sweep_spec(cfg: dict) -> SweepSpec:
    base = {k: v for k, v in cfg.items() if k not in GRID_KEYS or ":" not in v}
    axes = tuple((k, parse_range(cfg[k])) for k in GRID_KEYS if k in cfg and ":" in cfg[k])
    return SweepSpec(base, axes)


@dataclass
class SweepSummary:
    cases_total: int = 0
    cases_run: int = 0
    cases_skipped: int = 0
    rows: int = 0
    inconclusive: int = 0
    evaluations: int = 0
    filtered: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 2 if self.inconclusive else 0


def _run_case(cfg: RunConfig):
    try:
        results, filtered = run_single(cfg)
    except ViscoEvansError as e:
        return cfg.key(), [], [Filtered(tuple(cfg.alpha), (), f"{type(e).__name__}: {e}")], 0
    return (cfg.key(), [r.record for r in results], filtered,
            sum(r.evaluations for r in results))


def _read_manifest(path: Path) -> set[str]:
    if not path.exists():
        return set()
    return {line.split("\t", 1)[0] for line in path.read_text(encoding="utf-8").splitlines() if line}


def run_sweep(spec: SweepSpec, out_path, manifest_path=None, jobs: int = 1) -> SweepSummary:
    """Run every grid case, appending CSV rows; cases listed in the manifest are skipped."""
    out_path = Path(out_path)
    manifest_path = Path(manifest_path) if manifest_path else out_path.with_name(out_path.name + ".manifest")
    done = _read_manifest(manifest_path)
    resume = bool(done) and out_path.exists()
    if not resume:
        done = set()
        manifest_path.write_text("", encoding="utf-8")
    cases = spec.cases()
    todo = [c for c in cases if c.key() not in done]
    summary = SweepSummary(cases_total=len(cases), cases_skipped=len(cases) - len(todo))
    with open(out_path, "a" if resume else "w", encoding="utf-8", newline="") as fh, \
            open(manifest_path, "a", encoding="utf-8") as man:
        if not resume:
            records_to_csv([], fh, header=True)
            fh.flush()
        if jobs > 1 and len(todo) > 1:
            pool = ProcessPoolExecutor(max_workers=jobs)
            stream = pool.map(_run_case, todo)
        else:
            pool = None
            stream = map(_run_case, todo)
        try:
            for key, records, filtered, evals in stream:
                records_to_csv(records, fh, header=False)
                fh.flush()
                os.fsync(fh.fileno())
                man.write(f"{key}\t{len(records)}\n")
                man.flush()
                summary.cases_run += 1
                summary.rows += len(records)
                summary.inconclusive += sum(r.inconclusive for r in records)
                summary.evaluations += evals
                summary.filtered += [(key, f) for f in filtered]
                for f in filtered:
                    log.info("%s: skipped %s -> %s: %s", key, f.left, f.right, f.reason)
        finally:
            if pool is not None:
                pool.shutdown()
    return summary
