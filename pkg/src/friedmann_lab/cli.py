"""``friedmann-lab`` command-line interface.

Scenario files are flat ``key = value`` text with ``#`` comments.  Every key is
also a flag (``--alpha``, ``--G``, ``--lambda``, ``--r-start`` ...); flags win
over the file.  Reports are JSON (or ``key,value`` CSV); ``evolve`` writes its
samples as CSV with header ``t,R,Rdot,H``.

Exit codes: 0 ok, 2 invalid parameters, 3 degenerate discriminant,
4 wrong regime, 5 forbidden start, 6 integration failure.
"""

from __future__ import annotations

import argparse
import ast
import json
import logging
import math
import operator
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cubic, dynamics, markers
from .errors import DegenerateDiscriminant, FriedmannError, InvalidParameter
from .params import PhysicalParams, ReducedParams, reduce

log = logging.getLogger("friedmann_lab")

REDUCED_KEYS = ("alpha", "beta", "gamma")
PHYSICAL_KEYS = ("G", "c", "lambda", "mass")
_FLOAT_KEYS = (
    *REDUCED_KEYS, *PHYSICAL_KEYS, "delta", "h_min", "r_start", "t_span", "rel_tol",
    "abs_tol", "max_step", "r_stop", "r_floor", "x_min", "x_max", "y_min", "y_max",
)
_INT_KEYS = ("epsilon", "precision", "x_n", "y_n", "jobs")
_BOOL_KEYS = ("radiation",)
_STR_KEYS = ("direction", "format", "out", "x_param", "y_param", "method")
SWEEP_AXES = (*REDUCED_KEYS, *PHYSICAL_KEYS)


# ---------------------------------------------------------------- scenario


def read_scenario_file(path: str | os.PathLike) -> dict:
    """Parse ``key = value`` lines; later duplicates override earlier ones."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameter(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _convert(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in _FLOAT_KEYS:
            return _parse_float(value)
        if key in _INT_KEYS:
            return int(value)
    except ValueError:
        raise InvalidParameter(f"{key}: cannot parse {value!r}") from None
    if key in _BOOL_KEYS:
        low = value.lower()
        if low not in ("true", "false", "yes", "no", "1", "0"):
            raise InvalidParameter(f"{key}: expected a boolean, got {value!r}")
        return low in ("true", "yes", "1")
    if key in _STR_KEYS:
        return value
    raise InvalidParameter(f"unknown scenario key {key!r}")


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def _parse_float(text: str) -> float:
    """Float literal or simple arithmetic in numbers and ``pi`` (``2/3``, ``pi/2``, ``2*pi^2``)."""
    try:
        return float(text)
    except ValueError:
        pass

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(text)

    try:
        return ev(ast.parse(text.replace("^", "**"), mode="eval"))
    except (SyntaxError, ZeroDivisionError, OverflowError):
        raise ValueError(text) from None


@dataclass
class ScenarioConfig:
    """Merged scenario: exactly one of ``reduced`` / ``physical`` is set."""

    reduced: ReducedParams | None = None
    physical: PhysicalParams | None = None
    delta: float = 0.0
    radiation: bool = False
    integration: dict = field(default_factory=dict)
    format: str = "json"
    precision: int = 17
    out: str | None = None

    @classmethod
    def from_mapping(cls, values: dict) -> "ScenarioConfig":
        v = {k: _convert(k, x) for k, x in values.items() if x is not None}
        has_reduced = any(k in v for k in REDUCED_KEYS)
        has_physical = any(k in v for k in PHYSICAL_KEYS)
        if has_reduced and has_physical:
            raise InvalidParameter("give either reduced (alpha, beta, gamma) or physical (G, c, lambda, mass) parameters, not both")
        if not (has_reduced or has_physical):
            raise InvalidParameter("no parameters: give alpha/beta/gamma or G/c/lambda/mass")
        delta = float(v.get("delta", 0.0))
        radiation = bool(v.get("radiation", False))
        if delta != 0 and not radiation:
            raise InvalidParameter("delta given without --radiation")
        if radiation and delta < 0:
            raise InvalidParameter(f"delta must be >= 0, got {delta!r}")
        cfg = cls(delta=delta if radiation else 0.0, radiation=radiation)
        if has_reduced:
            missing = [k for k in REDUCED_KEYS if k not in v]
            if missing:
                raise InvalidParameter(f"missing reduced parameters: {', '.join(missing)}")
            gamma = v["gamma"]
            eps = v.get("epsilon", (gamma > 0) - (gamma < 0))
            cfg.reduced = ReducedParams(v["alpha"], v["beta"], gamma, eps, cfg.delta)
        else:
            missing = [k for k in PHYSICAL_KEYS if k not in v] + ([] if "epsilon" in v else ["epsilon"])
            if missing:
                raise InvalidParameter(f"missing physical parameters: {', '.join(missing)}")
            cfg.physical = PhysicalParams(v["G"], v["c"], v["lambda"], v["mass"], v["epsilon"])
        for key in ("r_start", "t_span", "direction", "rel_tol", "abs_tol", "max_step", "r_stop", "r_floor", "method"):
            if key in v:
                cfg.integration[key] = v[key]
        cfg.format = v.get("format", "json")
        if cfg.format not in ("json", "csv"):
            raise InvalidParameter(f"format must be json or csv, got {cfg.format!r}")
        cfg.precision = v.get("precision", 17)
        if not 1 <= cfg.precision <= 17:
            raise InvalidParameter(f"precision must be in 1..17, got {cfg.precision!r}")
        cfg.out = v.get("out")
        return cfg

    def params(self) -> ReducedParams:
        if self.reduced is not None:
            return self.reduced
        r = reduce(self.physical)
        return ReducedParams(r.alpha, r.beta, r.gamma, r.epsilon, self.delta)

    def integration_config(self) -> dynamics.IntegrationConfig:
        missing = [k for k in ("r_start", "t_span") if k not in self.integration]
        if missing:
            raise InvalidParameter(f"evolve needs {', '.join(missing)}")
        return dynamics.IntegrationConfig(**self.integration)


# ---------------------------------------------------------------- output


class Formatter:
    def __init__(self, precision: int = 17):
        self.precision = precision

    def num(self, x):
        """Round to ``precision`` significant digits; non-finite values become None."""
        if x is None:
            return None
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{self.precision}g}")

    def text(self, x) -> str:
        v = self.num(x)
        return "" if v is None else repr(v)

    def tree(self, obj):
        if isinstance(obj, dict):
            return {k: self.tree(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self.tree(v) for v in obj]
        if isinstance(obj, (float, np.floating)):
            return self.num(obj)
        if isinstance(obj, np.integer):
            return int(obj)
        return obj


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def render_report(report: dict, fmt: str, formatter: Formatter) -> str:
    tree = formatter.tree(report)
    if fmt == "json":
        return json.dumps(tree, indent=2) + "\n"
    lines = ["key,value"]
    for k, v in _flatten(tree):
        lines.append(f"{k},{'' if v is None else (repr(v) if isinstance(v, float) else v)}")
    return "\n".join(lines) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- reports


def _roots_report(roots) -> dict:
    if isinstance(roots, cubic.OneRealPlusPair):
        return {"variant": roots.variant, "r0": roots.r0, "x0": roots.x0, "y0": roots.y0}
    if isinstance(roots, cubic.ThreeReal):
        return {"variant": roots.variant, "r0neg": roots.r0neg, "r1": roots.r1, "r2": roots.r2, "phi": roots.phi}
    return {"variant": "degenerate"}


def classify_report(params: ReducedParams) -> tuple[dict, int]:
    matter = params.matter_only()
    regime = cubic.classify(matter)
    p, q, D = cubic.coefficients(matter)
    report = {
        "command": "classify",
        "regime": regime.tag.value,
        "alpha": params.alpha,
        "beta": params.beta,
        "gamma": params.gamma,
        "epsilon": params.epsilon,
        "delta": params.delta,
        "p": p,
        "q": q,
        "D": D,
        "roots": _roots_report(regime.analysis.roots if regime.analysis else cubic.Degenerate()),
        "admissible_regions": [[lo, hi] for lo, hi in regime.admissible_regions],
        "forbidden_interval": list(regime.forbidden_interval) if regime.forbidden_interval else None,
    }
    code = 3 if regime.tag is cubic.RegimeTag.DEGENERATE else 0
    return report, code


def markers_report(scenario: ScenarioConfig) -> dict:
    params = scenario.params()
    matter = params.matter_only()
    p, q, D = cubic.coefficients(matter)
    if matter.epsilon == 1 and cubic.is_degenerate(matter):
        raise DegenerateDiscriminant(D, p, q, cubic.degeneracy_tolerance(p, q))
    m = markers.marker_set(matter)
    report = {
        "command": "markers",
        "regime": cubic.RegimeTag.CASE_IIii.value,
        "R_w": m.R_w,
        "R_min": m.R_min,
        "R_wH": m.R_wH,
        "H_min_sq": m.H_min_sq,
        "H_min": math.sqrt(m.H_min_sq),
        "H_w_sq": m.H_w_sq,
        "H_inf": m.H_inf,
        "speed_bound": m.speed_bound,
        "H_w_vs_H_inf": markers.h_at_R_turning_vs_asymptote(matter),
    }
    if scenario.physical is not None:
        phys = scenario.physical
        report["physical"] = {
            "Lambda": phys.Lambda,
            "Lambda_min": markers.lambda_lower_bound(phys),
            "R_min": markers.r_min_physical(phys),
            "H_min": math.sqrt(m.H_min_sq),
            "density_at_R_min": phys.M / (2.0 * math.pi**2 * markers.r_min_physical(phys) ** 3),
        }
    if scenario.radiation:
        report["radiation"] = {"delta": params.delta, "R_min_rad": markers.radiation_corrected_rmin(params)}
    return report


def evolve(scenario: ScenarioConfig):
    params = scenario.params()
    traj = dynamics.integrate(params, scenario.integration_config())
    regime = cubic.classify(params.matter_only()).tag.value if params.delta == 0 else None
    report = {
        "command": "evolve",
        "regime": regime,
        "n_samples": int(len(traj.t)),
        "t_end": traj.t_end,
        "R_end": float(traj.R[-1]),
        "max_energy_residual": float(traj.energy_residual().max()),
        "events": [{"kind": e.kind.value, "t": e.t, "R": e.R, "H": e.H} for e in traj.events],
    }
    return traj, report


def trajectory_csv(traj: dynamics.Trajectory, formatter: Formatter) -> str:
    lines = ["t,R,Rdot,H"]
    fmt = formatter.text
    for t, R, V, H in zip(traj.t, traj.R, traj.Rdot, traj.H):
        lines.append(f"{fmt(t)},{fmt(R)},{fmt(V)},{fmt(H)}")
    return "\n".join(lines) + "\n"


def invert_report(h_min: float, G: float, c: float, mass: float) -> dict:
    return {
        "command": "invert",
        "h_min": h_min,
        "Lambda": markers.lambda_from_hmin(h_min, G, c, mass),
        "Lambda_min": markers.lambda_bound(G, c, mass),
    }


def _sweep_point(task):
    base, xname, x, yname, y = task
    values = dict(base)
    values[xname] = x
    values[yname] = y
    params = ScenarioConfig.from_mapping(values).params().matter_only()
    regime = cubic.classify(params)
    return regime.tag.value, regime.D


def sweep(base: dict, xname: str, xs, yname: str, ys, jobs: int = 1) -> list[dict]:
    """Classify every grid point; records ordered by (iy, ix)."""
    for name in (xname, yname):
        if name not in SWEEP_AXES:
            raise InvalidParameter(f"cannot sweep {name!r}; choose from {', '.join(SWEEP_AXES)}")
    if xname == yname:
        raise InvalidParameter("sweep axes must differ")
    tasks = [(base, xname, float(x), yname, float(y)) for y in ys for x in xs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks, chunksize=64))
    else:
        results = [_sweep_point(t) for t in tasks]
    records = []
    for k, (tag, D) in enumerate(results):
        iy, ix = divmod(k, len(xs))
        records.append({"ix": ix, "iy": iy, xname: tasks[k][2], yname: tasks[k][4], "regime": tag, "D": D})
    return records


def sweep_csv(records: list[dict], xname: str, yname: str, formatter: Formatter) -> str:
    lines = [f"ix,iy,{xname},{yname},regime,D"]
    fmt = formatter.text
    for r in records:
        lines.append(f"{r['ix']},{r['iy']},{fmt(r[xname])},{fmt(r[yname])},{r['regime']},{fmt(r['D'])}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- argparse


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="scenario file (key = value lines)")
    g = sp.add_argument_group("reduced parameters")
    for key in ("alpha", "beta", "gamma"):
        g.add_argument(f"--{key}", dest=key, type=str)
    g.add_argument("--epsilon", type=str)
    g.add_argument("--delta", type=str, help="radiation coefficient (needs --radiation)")
    g.add_argument("--radiation", action="store_const", const="true", default=None)
    ph = sp.add_argument_group("physical parameters")
    ph.add_argument("--G", dest="G", type=str)
    ph.add_argument("--c", dest="c", type=str)
    ph.add_argument("--lambda", dest="lambda", type=str)
    ph.add_argument("--mass", type=str)
    o = sp.add_argument_group("output")
    o.add_argument("--format", choices=("json", "csv"))
    o.add_argument("--out")
    o.add_argument("--precision", type=str)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="friedmann-lab", description="Friedmann-equation regimes, markers and trajectories.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("classify", "regime, cubic roots, admissible regions"), ("markers", "closed-form markers (case II(ii))")):
        _add_common(sub.add_parser(name, help=help_))
    ev = sub.add_parser("evolve", help="integrate R(t) and report events")
    _add_common(ev)
    for key in ("r-start", "t-span", "rel-tol", "abs-tol", "max-step", "r-stop", "r-floor"):
        ev.add_argument(f"--{key}", dest=key.replace("-", "_"), type=str)
    ev.add_argument("--direction", choices=("expanding", "contracting"))
    ev.add_argument("--method")
    inv = sub.add_parser("invert", help="cosmological constant from H_min and mass")
    _add_common(inv)
    inv.add_argument("--h-min", dest="h_min", type=str)
    sw = sub.add_parser("sweep", help="classify a 2-D parameter grid")
    _add_common(sw)
    for axis in ("x", "y"):
        sw.add_argument(f"--{axis}-param", dest=f"{axis}_param", choices=SWEEP_AXES)
        sw.add_argument(f"--{axis}-min", dest=f"{axis}_min", type=str)
        sw.add_argument(f"--{axis}-max", dest=f"{axis}_max", type=str)
        sw.add_argument(f"--{axis}-n", dest=f"{axis}_n", type=str)
    sw.add_argument("--jobs", type=str)
    return parser


def _merged(args: argparse.Namespace) -> dict:
    values: dict = {}
    if args.config:
        try:
            values.update(read_scenario_file(args.config))
        except OSError as exc:
            raise InvalidParameter(f"cannot read {args.config}: {exc}") from None
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        values[key] = value
    return values


def _pop(values: dict, *keys):
    return {k: _convert(k, values.pop(k)) for k in keys if k in values}


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    values = _merged(args)
    command = args.command

    if command == "invert":
        v = {k: _convert(k, x) for k, x in values.items()}
        missing = [k for k in ("h_min", "G", "c", "mass") if k not in v]
        if missing:
            raise InvalidParameter(f"invert needs {', '.join(missing)}")
        fmt = Formatter(v.get("precision", 17))
        report = invert_report(v["h_min"], v["G"], v["c"], v["mass"])
        _emit(render_report(report, v.get("format", "json"), fmt), v.get("out"))
        return 0

    if command == "sweep":
        grid = _pop(values, "x_param", "x_min", "x_max", "x_n", "y_param", "y_min", "y_max", "y_n", "jobs")
        missing = [k for k in ("x_param", "x_min", "x_max", "x_n", "y_param", "y_min", "y_max", "y_n") if k not in grid]
        if missing:
            raise InvalidParameter(f"sweep needs {', '.join(missing)}")
        if grid["x_n"] < 1 or grid["y_n"] < 1:
            raise InvalidParameter("grid sizes must be >= 1")
        out_opts = _pop(values, "format", "out", "precision")
        xs = np.linspace(grid["x_min"], grid["x_max"], grid["x_n"])
        ys = np.linspace(grid["y_min"], grid["y_max"], grid["y_n"])
        records = sweep(values, grid["x_param"], xs, grid["y_param"], ys, grid.get("jobs", 1))
        fmt = Formatter(out_opts.get("precision", 17))
        if out_opts.get("format", "csv") == "json":
            text = json.dumps(fmt.tree(records), indent=2) + "\n"
        else:
            text = sweep_csv(records, grid["x_param"], grid["y_param"], fmt)
        _emit(text, out_opts.get("out"))
        return 0

    scenario = ScenarioConfig.from_mapping(values)
    fmt = Formatter(scenario.precision)
    if command == "classify":
        report, code = classify_report(scenario.params())
        _emit(render_report(report, scenario.format, fmt), scenario.out)
        return code
    if command == "markers":
        _emit(render_report(markers_report(scenario), scenario.format, fmt), scenario.out)
        return 0
    if command == "evolve":
        traj, report = evolve(scenario)
        report_text = render_report(report, "json", fmt)
        if scenario.out:
            out = Path(scenario.out)
            out.write_text(trajectory_csv(traj, fmt))
            report["samples"] = str(out)
            report_text = render_report(report, "json", fmt)
            out.with_suffix(".events.json").write_text(report_text)
            sys.stdout.write(report_text)
        else:
            sys.stdout.write(trajectory_csv(traj, fmt))
            sys.stderr.write(report_text)
        return 0
    raise AssertionError(command)


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("FRIEDMANN_LAB_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(argv)
    except FriedmannError as exc:
        print(f"friedmann-lab: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
