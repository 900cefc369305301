"""Command line: render planes, classify parameters, run diagnostics.

Exit status 0 on success, 2 for configuration errors, 3 when a numerical
routine fails.  Reports are JSON and list every numeric default used.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import classify, mapcore, scan, symbolic
from .inverse import InverseBranchError
from .ppm import IoFailure, write_ppm
from .selftest import run_selftest

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

COMMANDS = ("dynplane", "paramplane", "classify", "cantor", "selftest")
DEFAULT_RES = 512
DEFAULT_WINDOWS = {"dynplane": "-3,-3,3,3", "paramplane": "-2,-2,2,2"}
NEEDS_LAMBDA = ("dynplane", "classify", "cantor")

NUMERIC_ERRORS = (
    ArithmeticError,
    InverseBranchError,
    symbolic.NotCantorRegime,
    symbolic.InadmissibleWord,
    symbolic.LeftSymbolDomain,
    symbolic.ProbeUnavailable,
    scan.SeedUndetermined,
)


class ConfigError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """'a+bi', 'a-bi', 'bi' or 'a'; no spaces."""
    s = text.strip()
    if not s or any(ch.isspace() for ch in s):
        raise ConfigError(f"bad complex number {text!r}")
    if s[-1] in "iI":
        s = s[:-1] + "j"
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"bad complex number {text!r}") from None


def parse_window(text: str) -> tuple[float, float, float, float]:
    try:
        xmin, ymin, xmax, ymax = (float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"window must be xmin,ymin,xmax,ymax, got {text!r}") from None
    if not (xmin < xmax and ymin < ymax):
        raise ConfigError(f"empty window {text!r}")
    return xmin, ymin, xmax, ymax


def _pair(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


@dataclass
class RunConfig:
    command: str
    lam: complex | None = None
    window: tuple[float, float, float, float] | None = None
    res: int = DEFAULT_RES
    budget: int = classify.DEFAULT_BUDGET
    depth: int = 12
    kappa: float = symbolic.DEFAULT_KAPPA
    samples: int = 100
    seed: int = 0
    output_path: str | None = None
    format: str = "ppm"
    shade: bool = True

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command in NEEDS_LAMBDA and self.lam is None:
            raise ConfigError(f"{self.command} needs --lambda")
        if self.lam is not None and self.lam == 0:
            raise ConfigError("lambda must be nonzero")
        if not self.kappa > 1:
            raise ConfigError(f"kappa must exceed 1, got {self.kappa}")
        if self.res < 1:
            raise ConfigError("resolution must be >= 1")
        if self.depth < 1 or self.samples < 1:
            raise ConfigError("depth and samples must be >= 1")
        if self.format not in ("ppm", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.command in ("dynplane", "paramplane") and not self.output_path:
            raise ConfigError(f"{self.command} needs --out")
        if self.command in ("classify", "cantor") and self.format != "json":
            raise ConfigError(f"{self.command} only writes json")

    def grid_spec(self) -> scan.GridSpec:
        xmin, ymin, xmax, ymax = self.window or parse_window(DEFAULT_WINDOWS[self.command])
        rows = max(1, round(self.res * (ymax - ymin) / (xmax - xmin)))
        return scan.GridSpec.from_bounds(xmin, ymin, xmax, ymax, self.res, rows)


def numeric_defaults() -> dict:
    """Every tolerance and default the computations rely on."""
    return {
        "budget": classify.DEFAULT_BUDGET,
        "resolution": DEFAULT_RES,
        "kappa": symbolic.DEFAULT_KAPPA,
        "depth": 12,
        "sample_words": 100,
        "pole_epsilon": mapcore.POLE_EPSILON,
        "pole_error_factor": mapcore.POLE_ERROR_FACTOR,
        "pole_tol_cap": mapcore.POLE_TOL_CAP,
        "overflow_threshold": mapcore.OVERFLOW_THRESHOLD,
        "convergence_tol": mapcore.CONVERGENCE_TOL,
        "convergence_run": mapcore.CONVERGENCE_RUN,
        "cycle_tol": classify.CYCLE_TOL,
        "p_max": classify.P_MAX,
        "origin_tol": classify.ORIGIN_TOL,
        "origin_run": classify.ORIGIN_RUN,
        "newton_tol": classify.NEWTON_TOL,
        "multiplier_kind_tol": classify.KIND_TOL,
        "cycle_match_tol": scan.CYCLE_MATCH_TOL,
        "tile_rows": scan.TILE_ROWS,
        "coding_boundary_snap": symbolic.CODING_OFFSET,
        "coding_axis_tol": symbolic.CODING_AXIS_TOL,
    }


def _config_block(cfg: RunConfig) -> dict:
    out = {"command": cfg.command, "budget": cfg.budget, "format": cfg.format}
    if cfg.lam is not None:
        out["lambda"] = _pair(cfg.lam)
    if cfg.command in ("dynplane", "paramplane"):
        out["grid"] = cfg.grid_spec().to_dict()
        out["workers"] = scan.worker_count()
        out["shade"] = cfg.shade
        out["output_path"] = cfg.output_path
    if cfg.command == "cantor":
        out.update(depth=cfg.depth, kappa=cfg.kappa, samples=cfg.samples, seed=cfg.seed)
    return out


def _emit(report: dict, path: str | None, out):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoFailure(f"cannot write {path}: {exc}") from exc
    else:
        out.write(text)


def _write_grid(cfg: RunConfig, grid: scan.ClassifiedGrid):
    if cfg.format == "ppm":
        write_ppm(grid, None, cfg.output_path, shade=cfg.shade)
        return
    try:
        with open(cfg.output_path, "w") as fh:
            fh.write(grid.to_json())
    except OSError as exc:
        raise IoFailure(f"cannot write {cfg.output_path}: {exc}") from exc


def _class_counts(grid: scan.ClassifiedGrid) -> dict:
    ids, counts = np.unique(grid.class_ids, return_counts=True)
    return {str(int(i)): int(c) for i, c in zip(ids, counts)}


def cmd_dynplane(cfg: RunConfig, out) -> dict:
    grid = scan.scan_dynamical(cfg.lam, cfg.grid_spec(), cfg.budget)
    _write_grid(cfg, grid)
    return {
        "scan": grid.meta,
        "class_counts": _class_counts(grid),
        "immediate_basin": scan.immediate_basin_evidence(grid, cfg.lam),
    }


def cmd_paramplane(cfg: RunConfig, out) -> dict:
    grid = scan.scan_parameter(cfg.grid_spec(), cfg.budget)
    _write_grid(cfg, grid)
    return {"scan": grid.meta, "class_counts": _class_counts(grid)}


def cmd_classify(cfg: RunConfig, out) -> dict:
    pc = classify.classify_parameter(cfg.lam, cfg.budget)
    orb = pc.singular_orbit
    report = {
        "verdict": pc.verdict.value,
        "period": pc.period,
        "singular_orbit": {
            "seed": _pair(orb.seed),
            "fate": orb.fate.value,
            "steps_used": orb.steps_used,
            "stop_step": orb.stop_step,
            "last": _pair(orb.last),
        },
        "cycle": None,
    }
    if pc.cycle is not None:
        c = pc.cycle
        report["cycle"] = {
            "period": c.period,
            "kind": c.kind.value,
            "multiplier": _pair(c.multiplier),
            "multiplier_modulus": abs(c.multiplier),
            "points": [_pair(z) for z in c.points],
        }
    return report


def cmd_cantor(cfg: RunConfig, out) -> dict:
    rep = symbolic.cantor_diagnostics(cfg.lam, cfg.samples, cfg.depth, cfg.kappa, cfg.seed)
    return rep.to_dict()


def cmd_selftest(cfg: RunConfig, out) -> dict:
    ok = run_selftest(write=lambda line: print(line, file=sys.stderr))
    if not ok:
        raise SelftestFailed("one or more invariant suites failed")
    return {"selftest": "pass"}


class SelftestFailed(ArithmeticError):
    pass


HANDLERS = {
    "dynplane": cmd_dynplane,
    "paramplane": cmd_paramplane,
    "classify": cmd_classify,
    "cantor": cmd_cantor,
    "selftest": cmd_selftest,
}


def run(cfg: RunConfig, out=None, err=None) -> int:
    """Execute one command; returns the exit status."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        cfg.validate()
        scan.worker_count()  # a bad THREADS value is a configuration error
        body = HANDLERS[cfg.command](cfg, out)
        report = {"config": _config_block(cfg), "defaults": numeric_defaults(), "result": body}
        # images go to --out, so the report goes to stdout
        report_path = cfg.output_path if cfg.command in ("classify", "cantor") else None
        _emit(report, report_path, out)
    except NUMERIC_ERRORS as exc:
        print(f"tanfamily: numeric failure: {exc}", file=err)
        return EXIT_NUMERIC
    except (ValueError, IoFailure) as exc:
        print(f"tanfamily: configuration error: {exc}", file=err)
        return EXIT_CONFIG
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tanfamily", description="Dynamics of lam*tan(z^2).")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, lam=False, window=False, fmt="ppm"):
        if lam:
            p.add_argument("--lambda", dest="lam", type=parse_complex, required=True,
                           help="parameter as a+bi (no spaces)")
        if window:
            p.add_argument("--window", type=parse_window, default=None, help="xmin,ymin,xmax,ymax")
            p.add_argument("--res", type=int, default=DEFAULT_RES, help="pixels across")
            p.add_argument("--flat", action="store_true", help="colour by class only, no step shading")
        p.add_argument("--budget", type=int, default=classify.DEFAULT_BUDGET)
        p.add_argument("--out", dest="output_path", default=None)
        p.add_argument("--format", choices=("ppm", "json"), default=fmt)

    common(sub.add_parser("dynplane", help="basins of a fixed parameter"), lam=True, window=True)
    common(sub.add_parser("paramplane", help="verdicts over the parameter plane"), window=True)
    common(sub.add_parser("classify", help="classify one parameter"), lam=True, fmt="json")
    p = sub.add_parser("cantor", help="symbolic-dynamics diagnostics")
    common(p, lam=True, fmt="json")
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--kappa", type=float, default=symbolic.DEFAULT_KAPPA)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    sub.add_parser("selftest", help="run the invariant suites")
    return ap


def _glue_values(argv: list[str]) -> list[str]:
    # values such as -3,-3,3,3 or -0.7+0.5i would otherwise look like flags
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--window", "--lambda") and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        lam=getattr(ns, "lam", None),
        window=getattr(ns, "window", None),
        res=getattr(ns, "res", DEFAULT_RES),
        budget=getattr(ns, "budget", classify.DEFAULT_BUDGET),
        depth=getattr(ns, "depth", 12),
        kappa=getattr(ns, "kappa", symbolic.DEFAULT_KAPPA),
        samples=getattr(ns, "samples", 100),
        seed=getattr(ns, "seed", 0),
        output_path=getattr(ns, "output_path", None),
        format=getattr(ns, "format", "json"),
        shade=not getattr(ns, "flat", False),
    )


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(_glue_values(argv))
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
