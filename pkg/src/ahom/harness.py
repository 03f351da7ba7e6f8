"""Command-line front end: run experiments from a JSON config, write one CSV
trace per algorithm plus a summary, check analytic derivatives against
finite differences, and print the diagnostic bound constants.

    ahom run experiment.json --out-dir out/
    ahom check-derivatives logistic --synthetic 20 5 3
    ahom bounds experiment.json
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .baselines import BaselineConfig, arc_run, gd_run, tr_run
from .data_ingest import load_libsvm, synthetic_dataset, to_logistic_problem
from .driver import AhomConfig, ahom_run, theoretical_bounds
from .errors import AhomError, ParameterError
from .problems import (finite_difference_oracle, make_coercive, make_logistic, make_monkey,
                       make_quadratic)
from .third_order import critical_measures

PROBLEMS = ("monkey", "coercive", "logistic", "quadratic")
ALGORITHMS = ("gd", "arc", "tr", "ahom")
TRACE_HEADER = ("iter", "wall_time_s", "f", "chi1", "chi2", "chi3", "sigma", "kappa", "rho",
                "phi", "delta", "step_kind", "step_norm")
SUMMARY_HEADER = ("algorithm", "status", "iterations", "f", "grad_norm", "lambda_min", "chi3")
DERIV_TOL = 1e-4


class ConfigError(AhomError):
    """Configuration that cannot be run; the CLI turns it into exit status 2."""


@dataclass
class ProblemSpec:
    name: str
    dataset_path: str | None = None
    alpha: float = 1e-5
    synthetic: tuple | None = None   # (m, d, seed)
    dim: int = 2                     # quadratic only

    def __post_init__(self):
        if self.name not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.name!r}; expected one of {', '.join(PROBLEMS)}")
        if self.name == "logistic" and self.dataset_path is None and self.synthetic is None:
            raise ConfigError("logistic problem needs dataset_path or synthetic")
        if self.synthetic is not None:
            if len(self.synthetic) != 3:
                raise ConfigError("synthetic must be [m, d, seed]")
            self.synthetic = tuple(int(v) for v in self.synthetic)


@dataclass
class ExperimentConfig:
    problem: ProblemSpec
    algorithms: list
    init: object = "default"        # "default" | "zero" | [x...] | {"random_seed": s, "scale": r}
    eps1: float = 1e-6
    eps2: float = 1e-6
    eps3: float = 1e-6
    max_iters: int = 5000
    max_time_s: float = math.inf
    subsolver_mode: str = "krylov"
    seed: int = 0
    ahom: dict = field(default_factory=dict)   # extra AhomConfig fields (beta, kappa0, ...)

    def __post_init__(self):
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}; expected one of {', '.join(ALGORITHMS)}")
        if self.subsolver_mode not in ("exact", "krylov"):
            raise ConfigError(f"unknown subsolver mode {self.subsolver_mode!r}")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        prob = d.pop("problem", None)
        if isinstance(prob, str):
            prob = {"name": prob}
        if not isinstance(prob, dict) or "name" not in prob:
            raise ConfigError("config needs a problem with a name")
        known = set(cls.__dataclass_fields__) - {"problem"}
        extra = set(d) - known - {"budget", "tolerances"}
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        d.update(d.pop("budget", {}))
        d.update(d.pop("tolerances", {}))
        if d.get("max_time_s") is None:
            d.pop("max_time_s", None)
        try:
            return cls(problem=ProblemSpec(**prob), **d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path):
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            return cls.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def build_oracle(spec):
    if spec.name == "monkey":
        return make_monkey()
    if spec.name == "coercive":
        return make_coercive()
    if spec.name == "quadratic":
        return make_quadratic(spec.dim)
    if spec.dataset_path is not None:
        path = Path(spec.dataset_path)
        if not path.is_file():
            raise ConfigError(f"dataset file not found: {path}")
        ds = load_libsvm(path)
        name = path.stem
    else:
        ds = synthetic_dataset(*spec.synthetic)
        name = "synthetic-{}x{}-s{}".format(*spec.synthetic)
    return make_logistic(to_logistic_problem(ds, spec.alpha, name))


def initial_point(cfg, oracle):
    init, n = cfg.init, oracle.dim
    if init == "default":
        return np.array(oracle.meta.default_init, dtype=np.float64)
    if init == "zero":
        return np.zeros(n)
    if isinstance(init, dict):
        if "random_seed" not in init:
            raise ConfigError("random init needs random_seed")
        rng = np.random.default_rng(int(init["random_seed"]))
        return float(init.get("scale", 1.0)) * rng.standard_normal(n)
    if isinstance(init, (list, tuple)):
        x = np.asarray(init, dtype=np.float64)
        if x.shape != (n,):
            raise ConfigError(f"init has length {x.size}, problem dimension is {n}")
        return x
    raise ConfigError(f"unrecognised init {init!r}")


def ahom_config(cfg):
    try:
        return AhomConfig(eps1=cfg.eps1, eps2=cfg.eps2, eps3=cfg.eps3, max_iters=cfg.max_iters,
                          max_time_s=cfg.max_time_s, subsolver_mode=cfg.subsolver_mode,
                          seed=cfg.seed, **cfg.ahom)
    except TypeError as exc:
        raise ConfigError(f"bad ahom options: {exc}") from None


def baseline_config(cfg):
    return BaselineConfig(eps1=cfg.eps1, eps2=cfg.eps2, max_iters=cfg.max_iters,
                          max_time_s=cfg.max_time_s, subsolver_mode=cfg.subsolver_mode,
                          seed=cfg.seed)


def run_algorithm(name, oracle, x0, cfg):
    if name == "ahom":
        return ahom_run(oracle, x0, ahom_config(cfg))
    bc = baseline_config(cfg)
    return {"gd": gd_run, "arc": arc_run, "tr": tr_run}[name](oracle, x0, bc)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def write_trace(path, trace):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in trace:
            w.writerow([_cell(getattr(r, col)) for col in TRACE_HEADER])


def read_trace(path):
    """Parse a trace CSV back into a list of dicts (empty cells become None)."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        rd = csv.DictReader(fh)
        if tuple(rd.fieldnames or ()) != TRACE_HEADER:
            raise ParameterError(f"{path}: unexpected trace header {rd.fieldnames}")
        for row in rd:
            out = {}
            for k, v in row.items():
                if k == "step_kind":
                    out[k] = v
                elif k == "iter":
                    out[k] = int(v)
                else:
                    out[k] = None if v == "" else float(v)
            rows.append(out)
    return rows


def summarize(name, result, oracle, cfg):
    """Final f and the three measures, recomputed at the returned point."""
    kappa = result.kappa if name == "ahom" and math.isfinite(result.kappa) else ahom_config(cfg).kappa0
    x = result.x
    row = {"algorithm": name, "status": result.status, "iterations": len(result.trace)}
    if not np.all(np.isfinite(x)):
        row.update(f=math.nan, grad_norm=math.nan, lambda_min=math.nan, chi3=math.nan)
        return row
    with np.errstate(over="ignore", invalid="ignore"):
        f = oracle.value(x)
        try:
            cm = critical_measures(oracle, x, ahom_config(cfg).beta, kappa)
            row.update(grad_norm=cm.chi1, lambda_min=cm.lambda_min, chi3=cm.chi3)
        except (AhomError, np.linalg.LinAlgError, ValueError):
            row.update(grad_norm=math.nan, lambda_min=math.nan, chi3=math.nan)
    row["f"] = f
    return row


def write_summary(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for r in rows:
            w.writerow([_cell(r[c]) for c in SUMMARY_HEADER])


def run_experiment(cfg, out_dir):
    """Run every algorithm in ``cfg`` and write ``<alg>.csv`` and
    ``summary.csv`` to ``out_dir``. Returns the summary rows."""
    oracle = build_oracle(cfg.problem)
    x0 = initial_point(cfg, oracle)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for name in cfg.algorithms:
        res = run_algorithm(name, oracle, x0.copy(), cfg)
        write_trace(out_dir / f"{name}.csv", res.trace)
        rows.append(summarize(name, res, oracle, cfg))
    write_summary(out_dir / "summary.csv", rows)
    return rows


def _rel_err(a, f):
    a = np.asarray(a, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    return float(np.max(np.abs(a - f)) / max(1.0, float(np.max(np.abs(a)))))


def check_derivatives(oracle, points=20, seed=0, scale=1.0, h=1e-5):
    """Max relative error of gradient, Hessian and third derivative against
    central differences of the next-lower order, over seeded random points."""
    fd = finite_difference_oracle(oracle, h)
    rng = np.random.default_rng(seed)
    errs = {"gradient": 0.0, "hessian": 0.0, "third": 0.0}
    for _ in range(points):
        x = scale * rng.standard_normal(oracle.dim)
        errs["gradient"] = max(errs["gradient"], _rel_err(oracle.gradient(x), fd.gradient(x)))
        errs["hessian"] = max(errs["hessian"], _rel_err(oracle.hessian(x), fd.hessian(x)))
        errs["third"] = max(errs["third"], _rel_err(oracle.third(x).data, fd.third(x).data))
    return errs


def _fmt_bound(v):
    return "unknown" if v is None else f"{v:.6g}"


def _parser():
    p = argparse.ArgumentParser(prog="ahom", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
        sp.add_argument("--mode", choices=("exact", "krylov"), default=None,
                        help="cubic subproblem solver")

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--out-dir", default=None, help="output directory (default: ./ahom_out)")
    common(r)

    c = sub.add_parser("check-derivatives", help="compare analytic and finite-difference derivatives")
    c.add_argument("problem")
    c.add_argument("--dataset", default=None, help="LIBSVM file for logistic")
    c.add_argument("--synthetic", nargs=3, type=int, metavar=("M", "D", "SEED"), default=None)
    c.add_argument("--alpha", type=float, default=1e-5)
    c.add_argument("--dim", type=int, default=2, help="quadratic dimension")
    c.add_argument("--points", type=int, default=20)
    c.add_argument("--out-dir", default=None, help="also write derivatives.json here")
    common(c)

    b = sub.add_parser("bounds", help="print the theoretical constants for a config")
    b.add_argument("config")
    b.add_argument("--out-dir", default=None)
    common(b)
    return p


def _apply_overrides(cfg, args):
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.mode is not None:
        cfg = replace(cfg, subsolver_mode=args.mode)
    return cfg


def _cmd_run(args):
    cfg = _apply_overrides(ExperimentConfig.load(args.config), args)
    out = Path(args.out_dir or "ahom_out")
    rows = run_experiment(cfg, out)
    print(",".join(SUMMARY_HEADER))
    for r in rows:
        print(",".join(_cell(r[c]) for c in SUMMARY_HEADER))
    print(f"wrote {len(rows)} trace(s) and summary.csv to {out}")
    return 0


def _cmd_check(args):
    spec = ProblemSpec(args.problem, args.dataset, args.alpha,
                       tuple(args.synthetic) if args.synthetic else None, args.dim)
    oracle = build_oracle(spec)
    errs = check_derivatives(oracle, args.points, 0 if args.seed is None else args.seed)
    bad = False
    for order, e in errs.items():
        flag = "ok" if e <= DERIV_TOL else "FAIL"
        bad |= e > DERIV_TOL
        print(f"{order:9s} {e:.3e} {flag}")
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        (Path(args.out_dir) / "derivatives.json").write_text(json.dumps(errs, indent=2) + "\n")
    return 1 if bad else 0


def _cmd_bounds(args):
    cfg = _apply_overrides(ExperimentConfig.load(args.config), args)
    oracle = build_oracle(cfg.problem)
    x0 = initial_point(cfg, oracle)
    b = theoretical_bounds(ahom_config(cfg), oracle.meta, f0=oracle.value(x0))
    for k, v in asdict(b).items():
        print(f"{k:15s} {_fmt_bound(v)}")
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        (Path(args.out_dir) / "bounds.json").write_text(json.dumps(asdict(b), indent=2) + "\n")
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    handler = {"run": _cmd_run, "check-derivatives": _cmd_check, "bounds": _cmd_bounds}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"ahom: error: {exc}", file=sys.stderr)
        return 2
    except AhomError as exc:
        print(f"ahom: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
