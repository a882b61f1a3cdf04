"""Command line interface: ``tailgof {test,benchmark,simulate,reproduce}``.

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 numerical error,
5 benchmark mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .datagen import GENERATORS, GeneratorSpec
from .errors import ConfigError, DataError, TailGofError
from .families import FAMILY_IDS, TailCopulaFamily
from .pipeline import run_test
from .stats import BenchmarkTable, wiener_benchmark
from .study import MODELS, run_study
from .transform import GridSpec

log = logging.getLogger("tailgof")

GRID_FLAGS = {"delta": "delta", "tau": "tau", "T": "T", "grid_cells": "eval_cells",
              "integ_cells": "integ_cells_per_axis"}


def _add_grid_flags(p):
    p.add_argument("--delta", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--grid-cells", type=int, help="evaluation cells per axis on [delta, tau]")
    p.add_argument("--integ-cells", type=int, help="integration cells per axis on [delta, T]")


def _load_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "config", "func"):
            cfg[key] = value
    return cfg


def _grid_from(cfg: dict) -> GridSpec:
    grid_cfg = dict(cfg.get("grid", {}))
    for flag, field_name in GRID_FLAGS.items():
        if flag in cfg:
            grid_cfg[field_name] = cfg[flag]
    try:
        return GridSpec(**grid_cfg)
    except TypeError as exc:
        raise ConfigError(f"bad grid configuration: {exc}") from exc


def _family_from(cfg: dict) -> TailCopulaFamily:
    fam = cfg.get("family", "fixed_logistic_half")
    if isinstance(fam, dict):
        fid, theta = fam["family"], fam.get("theta", [])
    else:
        fid, theta = fam, cfg.get("theta", [])
    if fid not in FAMILY_IDS:
        raise ConfigError(f"unknown family {fid!r}")
    if fid != "fixed_logistic_half" and not theta:
        theta = [0.5]  # placeholder; re-estimated
    return TailCopulaFamily(fid, tuple(theta))


def read_sample(path) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read sample {path}: {exc}") from exc
    if data.shape[1] != 2 or not np.all(np.isfinite(data)):
        raise DataError(f"{path}: expected two finite numeric columns")
    return data


def write_sample(path, sample) -> None:
    np.savetxt(path, sample, delimiter=",", header="x,y", comments="", fmt="%.17g")


def _table_for(cfg: dict, grid: GridSpec) -> BenchmarkTable:
    path = cfg.get("benchmark")
    if path and os.path.exists(path):
        table = BenchmarkTable.load(path, T=grid.T)
        table.check_grid(grid)
        return table
    if cfg.get("require_benchmark"):
        raise ConfigError(f"benchmark table {path} not found")
    log.info("simulating %d Wiener sheet paths", cfg.get("paths", 10_000))
    table = wiener_benchmark(grid, cfg.get("paths", 10_000), cfg.get("seed", 0), cfg.get("workers", 1))
    if path:
        table.save(path)
    return table


def cmd_test(cfg: dict) -> int:
    grid = _grid_from(cfg)
    if "input" not in cfg:
        raise ConfigError("--input is required")
    cfg.setdefault("require_benchmark", True)
    table = _table_for(cfg, grid) if cfg.get("benchmark") else None
    sample = read_sample(cfg["input"])
    report = run_test(sample, _family_from(cfg), k=cfg.get("k", 250), grid=grid, table=table,
                      max_k_fraction=cfg.get("max_k_fraction", 0.5))
    out = report.to_dict()
    text = json.dumps(out, indent=2, sort_keys=True)
    if cfg.get("report"):
        with open(cfg["report"], "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if cfg.get("field_csv"):
        report.field.to_csv(cfg["field_csv"])
    return 0


def cmd_benchmark(cfg: dict) -> int:
    grid = _grid_from(cfg)
    if "out" not in cfg:
        raise ConfigError("--out is required")
    table = wiener_benchmark(grid, cfg.get("paths", 10_000), cfg.get("seed", 0), cfg.get("workers", 1))
    table.save(cfg["out"])
    return 0


def cmd_simulate(cfg: dict) -> int:
    params = {}
    for item in cfg.get("param", []):
        key, _, value = item.partition("=")
        try:
            params[key] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad --param {item!r}; expected KEY=NUMBER") from exc
    spec = GeneratorSpec(cfg["generator"], params)
    out_dir = cfg.get("out_dir", ".")
    os.makedirs(out_dir, exist_ok=True)
    seed = cfg.get("seed", 0)
    for i in range(cfg.get("replications", 1)):
        sample = spec.sample(cfg.get("n", 1500), np.random.SeedSequence([seed, i]))
        write_sample(os.path.join(out_dir, f"{spec.kind}_{i:04d}.csv"), sample)
    return 0


def cmd_reproduce(cfg: dict) -> int:
    grid = _grid_from(cfg)
    out_dir = cfg.get("out_dir", ".")
    os.makedirs(out_dir, exist_ok=True)
    cfg.setdefault("benchmark", os.path.join(out_dir, "benchmark.csv"))
    table = _table_for(cfg, grid)
    study = run_study(cfg["model"], cfg["mode"], table, seed=cfg.get("seed", 0),
                      replications=cfg.get("replications"), n=cfg.get("n", 1500), k=cfg.get("k", 250),
                      grid=grid, workers=cfg.get("workers", 1))
    study.write(out_dir)
    for name in ("kappa", "omega2", "a2"):
        print(f"model {study.model} {study.mode} {name}: "
              f"{study.rejections(name)}/{len(study.replications)} rejected at 5%")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailgof", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="fit and test one bivariate sample")
    p.add_argument("--config")
    p.add_argument("--input")
    p.add_argument("--family", choices=FAMILY_IDS)
    p.add_argument("--theta", type=float, nargs="*")
    p.add_argument("--k", type=int)
    p.add_argument("--max-k-fraction", type=float)
    p.add_argument("--benchmark")
    p.add_argument("--report")
    p.add_argument("--field-csv")
    _add_grid_flags(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("benchmark", help="simulate Wiener sheets and write the benchmark table")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    _add_grid_flags(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("simulate", help="write seeded samples as CSV")
    p.add_argument("--config")
    p.add_argument("--generator", choices=GENERATORS, required=True)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--n", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="run the simulation study for one model")
    p.add_argument("--config")
    p.add_argument("--model", type=int, choices=sorted(MODELS), required=True)
    p.add_argument("--mode", choices=("null", "alt"), required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--benchmark")
    p.add_argument("--paths", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out-dir")
    _add_grid_flags(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load_config(args)
        return args.func(cfg)
    except TailGofError as exc:
        print(f"tailgof: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
