"""Command-line interface.

Commands:
  gen      write a synthetic dataset as CSV plus a sidecar meta JSON
  solve    run one solver on a dataset, one JSON report per seed
  compare  benchmark algorithms over a grid of (r, seed) cells
  metrics  evaluate diagnostics for a saved basis checkpoint

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure.  Effective parameter values (command line over config
file over built-in defaults) are echoed into every report.  All files are
written atomically (temp file in place, then rename).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import arpgda as arpgda_mod
from . import data as data_mod
from .baselines import RSGParams, solve_rsg
from .exceptions import (
    DataError,
    DegenerateProblemError,
    DiagnosticUnavailableError,
    DimensionError,
    NumericalError,
)
from .problem import (
    GroupedDataset,
    dist_to_subgradient,
    group_objectives,
    min_objective,
)
from .stiefel import load_point, orthonormality_error, save_point, validate_stiefel

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

DEFAULT_C_GRID = (1e-3, 1e-2, 1e-1, 1.0, 1e1)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract here reserves 2 for data
    errors, so usage problems are rethrown and mapped to exit 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# small helpers


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def _atomic_write_json(path: Path, obj: Any) -> None:
    _atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _parse_int_list(text: str, what: str) -> list[int]:
    """Accept '1,2,5', '1:4' (inclusive), or '1:10:3' (with step)."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                lo, hi, step = parts[0], parts[1], 1
            elif len(parts) == 3:
                lo, hi, step = parts
            else:
                raise ValueError
            if step < 1 or hi < lo:
                raise ValueError
            return list(range(lo, hi + 1, step))
        return [int(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise _UsageError(f"cannot parse {what} list {text!r}") from None


def _parse_float_list(text: str, what: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise _UsageError(f"cannot parse {what} list {text!r}") from None


def _parse_sizes(text: str) -> tuple[int, ...]:
    """'750x4' means four groups of 750; '10|20|30' lists sizes explicitly."""
    try:
        if "x" in text:
            size, count = text.split("x")
            return (int(size),) * int(count)
        return tuple(int(p) for p in text.split("|") if p != "")
    except ValueError:
        raise _UsageError(f"cannot parse group sizes {text!r}") from None


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path) as handle:
            cfg = json.load(handle)
    except FileNotFoundError:
        raise _UsageError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise _UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise _UsageError(f"config file {path} must hold a JSON object")
    return cfg


def _pick(cli_value: Any, cfg: dict[str, Any], key: str, fallback: Any) -> Any:
    if cli_value is not None:
        return cli_value
    if key in cfg:
        return cfg[key]
    return fallback


# ---------------------------------------------------------------------------
# dataset plumbing


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="dataset CSV path")
    p.add_argument("--group-col", default="group", help="group column name (default: group)")
    p.add_argument(
        "--gen",
        help="inline generator spec, e.g. gaussian:d=200,n=200,seed=7 "
        "or blocks:d=23,sizes=750x4,seed=1",
    )
    p.add_argument("--normalize", action="store_true", help="scale each sample to unit norm")
    p.add_argument("--center", action="store_true", help="center each sample to zero mean")
    p.add_argument(
        "--standardize",
        action="store_true",
        help="standardize each feature across the dataset before per-sample transforms",
    )
    p.add_argument(
        "--min-norm-threshold",
        type=float,
        default=None,
        help="drop samples with norm below this (default: 1e-6 of the largest norm)",
    )


def _dataset_from_gen_spec(spec: str) -> tuple[GroupedDataset, dict[str, Any]]:
    kind, _, body = spec.partition(":")
    kv: dict[str, str] = {}
    if body:
        for item in body.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise _UsageError(f"bad generator spec item {item!r} in {spec!r}")
            kv[key.strip()] = value.strip()
    try:
        if kind == "gaussian":
            d = int(kv.pop("d"))
            n = int(kv.pop("n"))
            seed = int(kv.pop("seed", "0"))
            extra = kv
            if extra:
                raise _UsageError(f"unknown gaussian keys {sorted(extra)} in {spec!r}")
            return data_mod.gen_synthetic_gaussian(d, n, seed), {
                "generator": "gaussian",
                "seed": seed,
            }
        if kind == "blocks":
            d = int(kv.pop("d"))
            sizes = _parse_sizes(kv.pop("sizes"))
            seed = int(kv.pop("seed", "0"))
            scales = None
            if "scales" in kv:
                scales = [float(s) for s in kv.pop("scales").split("|")]
            if kv:
                raise _UsageError(f"unknown blocks keys {sorted(kv)} in {spec!r}")
            return data_mod.gen_synthetic_blocks(d, sizes, seed, scales), {
                "generator": "blocks",
                "seed": seed,
            }
    except KeyError as exc:
        raise _UsageError(f"generator spec {spec!r} is missing key {exc}") from None
    except ValueError as exc:
        raise _UsageError(f"bad value in generator spec {spec!r}: {exc}") from None
    raise _UsageError(f"unknown generator kind {kind!r} (use gaussian or blocks)")


def _resolve_dataset(args: argparse.Namespace) -> tuple[GroupedDataset, data_mod.DatasetMeta]:
    if (args.data is None) == (args.gen is None):
        raise _UsageError("provide exactly one dataset source: --data or --gen")
    provenance: dict[str, Any] = {}
    if args.data is not None:
        if not os.path.exists(args.data):
            raise DataError(f"dataset file not found: {args.data}")
        dataset = data_mod.load_csv_grouped(args.data, args.group_col)
        provenance["source"] = str(args.data)
    else:
        dataset, provenance = _dataset_from_gen_spec(args.gen)
    threshold = args.min_norm_threshold
    if threshold is None:
        threshold = 1e-6 * float(dataset.sample_norms().max())
    dataset = data_mod.preprocess(
        dataset,
        normalize=args.normalize,
        center=args.center,
        min_norm_threshold=threshold,
        standardize_features=args.standardize,
    )
    meta = data_mod.describe(
        dataset,
        normalized=args.normalize,
        centered=args.center,
        min_norm_threshold=threshold,
        **provenance,
    )
    return dataset, meta


# ---------------------------------------------------------------------------
# solver plumbing


def _arpgda_params(
    data: GroupedDataset,
    r: int,
    seed: int,
    args: argparse.Namespace,
    cfg: dict[str, Any],
) -> arpgda_mod.ARPGDAParams:
    base = arpgda_mod.recommended_params(data, r)
    check = _pick(args.check_inequalities, cfg, "check_inequalities", True)
    return arpgda_mod.ARPGDAParams(
        epsilon=float(_pick(args.eps, cfg, "eps", base.epsilon)),
        mu=float(_pick(args.mu, cfg, "mu", base.mu)),
        rho=float(_pick(args.rho, cfg, "rho", base.rho)),
        theta=float(_pick(args.theta, cfg, "theta", base.theta)),
        max_iters=int(_pick(args.max_iters, cfg, "max_iters", 100_000)),
        seed=seed,
        check_inequalities=bool(check),
        trace_stride=int(_pick(args.trace_stride, cfg, "trace_stride", 1)),
        tol_orth=float(_pick(args.tol_orth, cfg, "tol_orth", 1e-8)),
    )


def _rsg_params(
    seed: int,
    args: argparse.Namespace,
    cfg: dict[str, Any],
    *,
    reference_phi: float | None,
) -> RSGParams:
    c = _pick(args.c, cfg, "c", None)
    if c is None:
        raise _UsageError("rsg needs --c (or 'c' in the config file)")
    return RSGParams(
        c=float(c),
        max_iters=int(_pick(args.max_iters, cfg, "max_iters", 100_000)),
        seed=seed,
        reference_phi=reference_phi,
        trace_stride=int(_pick(args.trace_stride, cfg, "trace_stride", 100)),
        record_dist=bool(args.record_dist),
        tol_orth=float(_pick(args.tol_orth, cfg, "tol_orth", 1e-8)),
    )


def _report_path(out: str, algorithm: str, r: int, seed: int, n_runs: int) -> Path:
    out_path = Path(out)
    if out_path.suffix == ".json":
        if n_runs > 1:
            raise _UsageError("--out must be a directory when running several seeds")
        out_path.parent.mkdir(parents=True, exist_ok=True)
        return out_path
    out_path.mkdir(parents=True, exist_ok=True)
    return out_path / f"report_{algorithm}_r{r}_seed{seed}.json"


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args: argparse.Namespace) -> int:
    seed = args.seed
    if args.kind == "gaussian":
        if args.n is None or args.d is None:
            raise _UsageError("gen gaussian needs --d and --n")
        dataset = data_mod.gen_synthetic_gaussian(args.d, args.n, seed)
        generator = "gaussian"
    else:
        if args.sizes is None or args.d is None:
            raise _UsageError("gen blocks needs --d and --sizes")
        scales = None
        if args.scales is not None:
            scales = _parse_float_list(args.scales, "scales")
        dataset = data_mod.gen_synthetic_blocks(args.d, _parse_sizes(args.sizes), seed, scales)
        generator = "blocks"
    out = Path(args.out if args.out is not None else f"{args.kind}.csv")
    if not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write_text(out, data_mod.dataset_csv_text(dataset))
    meta = data_mod.describe(dataset, generator=generator, seed=seed)
    meta_path = out.with_suffix(".meta.json")
    _atomic_write_json(meta_path, meta.to_dict())
    print(f"wrote {dataset.num_samples} samples in {dataset.num_groups} groups to {out} (+ {meta_path.name})")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    dataset, meta = _resolve_dataset(args)
    if args.r is None:
        raise _UsageError("solve needs --r")
    r = int(args.r)
    if not 1 <= r <= dataset.d:
        raise _UsageError(f"--r must lie in [1, {dataset.d}], got {r}")
    seeds = _parse_int_list(args.seed, "--seed")
    if not seeds:
        raise _UsageError("--seed must name at least one seed")
    for seed in seeds:
        if args.algorithm == "arpgda":
            params = _arpgda_params(dataset, r, seed, args, cfg)
            result = arpgda_mod.solve_arpgda(dataset, r, params)
            params_dict = asdict(params)
        else:
            params = _rsg_params(seed, args, cfg, reference_phi=args.ref_phi)
            result = solve_rsg(dataset, r, params)
            params_dict = asdict(params)
        report = result.to_report(params_dict, meta.to_dict())
        path = _report_path(args.out, args.algorithm, r, seed, len(seeds))
        _atomic_write_json(path, report)
        if args.save_u is not None:
            u_dir = Path(args.save_u)
            u_dir.mkdir(parents=True, exist_ok=True)
            save_point(result.U, u_dir / f"u_{args.algorithm}_r{r}_seed{seed}.csv")
        if result.violations:
            print(
                f"warning: {len(result.violations)} inequality violation(s) recorded",
                file=sys.stderr,
            )
        stat = "-" if result.stationarity is None else f"{result.stationarity:.6g}"
        print(
            f"{args.algorithm} r={r} seed={seed} converged={result.converged} "
            f"iterations={result.iterations} phi={result.phi:.6g} E={stat} "
            f"time_ms={result.time_ms:.1f} -> {path}"
        )
    return EXIT_OK


def _run_compare_cell(payload: dict[str, Any]) -> dict[str, Any]:
    """One (r, seed) cell: ARPGDA first, then the best-c RSG run referenced
    to ARPGDA's final value.  Top-level so process pools can pickle it."""
    dataset = GroupedDataset(
        payload["X"], tuple(payload["group_sizes"]), name=payload["name"]
    )
    r = payload["r"]
    seed = payload["seed"]
    algs = payload["algs"]
    cell: dict[str, Any] = {"r": r, "seed": seed}

    arpgda_result = None
    if "arpgda" in algs:
        params = arpgda_mod.ARPGDAParams(**payload["arpgda_params"], seed=seed)
        arpgda_result = arpgda_mod.solve_arpgda(dataset, r, params)
        cell["arpgda"] = {
            "phi": arpgda_result.phi,
            "iterations": arpgda_result.iterations,
            "converged": arpgda_result.converged,
            "time_ms": arpgda_result.time_ms,
            "stationarity": arpgda_result.stationarity,
            "violations": len(arpgda_result.violations),
        }
    if "rsg" in algs:
        reference = arpgda_result.phi if arpgda_result is not None else None
        best = None
        best_c = None
        for c in payload["c_grid"]:
            run = solve_rsg(
                dataset,
                r,
                RSGParams(
                    c=c,
                    max_iters=payload["rsg_max_iters"],
                    seed=seed,
                    reference_phi=reference,
                    trace_stride=payload["rsg_max_iters"] or 1,
                ),
            )
            if best is None or run.phi > best.phi:
                best, best_c = run, c
        cell["rsg"] = {
            "phi": best.phi,
            "iterations": best.iterations,
            "converged": best.converged,
            "time_ms": best.time_ms,
            "c": best_c,
        }
        if arpgda_result is not None:
            target = (1.0 - 1e-4) * best.phi
            reached = None
            for rec in arpgda_result.trace:
                if rec.phi >= target:
                    reached = rec.k
                    break
            cell["arpgda_iters_to_rsg_phi"] = reached
            cell["arpgda_dominates"] = reached is not None and reached < best.iterations
    return cell


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    dataset, meta = _resolve_dataset(args)
    r_list = _parse_int_list(str(_pick(args.r, cfg, "r", "1,2,5,10")), "--r")
    for r in r_list:
        if not 1 <= r <= dataset.d:
            raise _UsageError(f"--r values must lie in [1, {dataset.d}], got {r}")
    n_seeds = int(_pick(args.seeds, cfg, "seeds", 10))
    if n_seeds < 1:
        raise _UsageError("--seeds must be at least 1")
    algs = [a.strip() for a in str(_pick(args.algs, cfg, "algs", "arpgda,rsg")).split(",") if a.strip()]
    for alg in algs:
        if alg not in ("arpgda", "rsg"):
            raise _UsageError(f"unknown algorithm {alg!r} (use arpgda and/or rsg)")
    c_grid = (
        _parse_float_list(str(_pick(args.c_grid, cfg, "c_grid", None)), "--c-grid")
        if _pick(args.c_grid, cfg, "c_grid", None) is not None
        else list(DEFAULT_C_GRID)
    )
    jobs = int(_pick(args.jobs, cfg, "jobs", 1))
    max_iters = int(_pick(args.max_iters, cfg, "max_iters", 100_000))

    payloads = []
    for r in r_list:
        base = _arpgda_params(dataset, r, 0, args, cfg)
        arpgda_params = asdict(base)
        arpgda_params.pop("seed")
        arpgda_params["max_iters"] = max_iters
        for seed in range(n_seeds):
            payloads.append(
                {
                    "X": dataset.X,
                    "group_sizes": dataset.group_sizes,
                    "name": dataset.name,
                    "r": r,
                    "seed": seed,
                    "algs": algs,
                    "arpgda_params": arpgda_params,
                    "c_grid": c_grid,
                    "rsg_max_iters": max_iters,
                }
            )

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_run_compare_cell, payloads))
    else:
        cells = [_run_compare_cell(p) for p in payloads]

    out_dir = Path(args.out if args.out is not None else ".")
    cells_dir = out_dir / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)
    for cell in cells:
        _atomic_write_json(cells_dir / f"cell_r{cell['r']}_seed{cell['seed']}.json", cell)

    rows = []
    for cell in cells:
        best_phi = max(cell[a]["phi"] for a in algs)
        for alg in algs:
            entry = cell[alg]
            ratio = entry["phi"] / best_phi if best_phi > 0 else math.nan
            rows.append(
                {
                    "algorithm": alg,
                    "r": cell["r"],
                    "seed": cell["seed"],
                    "phi": entry["phi"],
                    "phi_ratio": ratio,
                    "time_ms": entry["time_ms"],
                    "iterations": entry["iterations"],
                }
            )
    rows.sort(key=lambda row: (row["algorithm"], row["r"], row["seed"]))

    table_path = out_dir / "compare.csv"
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["algorithm", "r", "seed", "phi", "phi_ratio", "time_ms", "iterations"])
    for row in rows:
        writer.writerow(
            [
                row["algorithm"],
                row["r"],
                row["seed"],
                repr(float(row["phi"])),
                repr(float(row["phi_ratio"])),
                repr(float(row["time_ms"])),
                row["iterations"],
            ]
        )
    _atomic_write_text(table_path, buffer.getvalue())

    aggregates: dict[str, dict[str, Any]] = {}
    for alg in algs:
        for r in r_list:
            phis = [c[alg]["phi"] for c in cells if c["r"] == r]
            times = [c[alg]["time_ms"] for c in cells if c["r"] == r]
            iters = [c[alg]["iterations"] for c in cells if c["r"] == r]
            converged = sum(bool(c[alg]["converged"]) for c in cells if c["r"] == r)
            aggregates[f"{alg}_r{r}"] = {
                "algorithm": alg,
                "r": r,
                "mean_phi": float(np.mean(phis)),
                "mean_time_ms": float(np.mean(times)),
                "mean_iterations": float(np.mean(iters)),
                "n_converged": int(converged),
                "n_cells": len(phis),
            }
    summary = {
        "dataset_meta": meta.to_dict(),
        "r_values": r_list,
        "n_seeds": n_seeds,
        "algorithms": algs,
        "c_grid": c_grid,
        "max_iters": max_iters,
        "cells": cells,
        "aggregates": aggregates,
    }
    _atomic_write_json(out_dir / "compare_summary.json", summary)

    for key in sorted(aggregates):
        agg = aggregates[key]
        print(
            f"{agg['algorithm']} r={agg['r']}: mean phi {agg['mean_phi']:.6g}, "
            f"mean iterations {agg['mean_iterations']:.0f}, "
            f"converged {agg['n_converged']}/{agg['n_cells']}"
        )
    print(f"table -> {table_path}")
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    dataset, meta = _resolve_dataset(args)
    if not os.path.exists(args.checkpoint):
        raise DataError(f"checkpoint file not found: {args.checkpoint}")
    U = load_point(args.checkpoint)
    if U.shape[0] != dataset.d:
        raise DataError(
            f"checkpoint has {U.shape[0]} rows but the dataset has d={dataset.d}"
        )
    tol = args.tol_orth if args.tol_orth is not None else 1e-8
    validate_stiefel(U, tol)
    values = group_objectives(dataset, U)
    out: dict[str, Any] = {
        "dataset_meta": meta.to_dict(),
        "r": int(U.shape[1]),
        "phi": min_objective(dataset, U),
        "group_objectives": [float(v) for v in values],
        "orth_error": orthonormality_error(U),
        "dist_subgrad": dist_to_subgradient(dataset, U, rel_threshold=args.rel_threshold),
    }
    text = json.dumps(out, indent=2, sort_keys=True)
    if args.out is not None:
        _atomic_write_text(Path(args.out), text + "\n")
        print(f"metrics -> {args.out}")
    else:
        print(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser assembly


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairpca", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p_gen = sub.add_parser("gen", help="write a synthetic dataset")
    p_gen.add_argument("kind", choices=["gaussian", "blocks"])
    p_gen.add_argument("--d", type=int, help="ambient dimension")
    p_gen.add_argument("--n", type=int, help="number of singleton groups (gaussian)")
    p_gen.add_argument("--sizes", help="block sizes, e.g. 750x4 or 10|20|30 (blocks)")
    p_gen.add_argument("--scales", help="per-group scales, e.g. 1,1,0 (blocks)")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("-o", "--out", help="output CSV path (default: <kind>.csv)")
    p_gen.set_defaults(func=cmd_gen)

    common_solver = argparse.ArgumentParser(add_help=False)
    common_solver.add_argument("--eps", type=float, default=None, help="target stationarity")
    common_solver.add_argument("--rho", type=float, default=None)
    common_solver.add_argument("--theta", type=float, default=None)
    common_solver.add_argument("--mu", type=float, default=None)
    common_solver.add_argument("--max-iters", type=int, default=None)
    common_solver.add_argument("--tol-orth", type=float, default=None)
    common_solver.add_argument("--trace-stride", type=int, default=None)
    common_solver.add_argument(
        "--check-inequalities",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="record per-iteration inequality checks (default: on)",
    )
    common_solver.add_argument("--config", help="JSON config file (flags win over it)")

    p_solve = sub.add_parser(
        "solve", parents=[common_solver], help="run one solver, one report per seed"
    )
    p_solve.add_argument("algorithm", choices=["arpgda", "rsg"])
    _add_dataset_args(p_solve)
    p_solve.add_argument("--r", type=int, help="number of basis columns")
    p_solve.add_argument("--seed", default="0", help="seed or comma list, e.g. 0,1,2")
    p_solve.add_argument("--c", type=float, default=None, help="rsg stepsize scale")
    p_solve.add_argument("--ref-phi", type=float, default=None, help="rsg stopping reference")
    p_solve.add_argument(
        "--record-dist", action="store_true", help="record dist_subgrad in rsg trace rows"
    )
    p_solve.add_argument("--out", default=".", help="report directory (or single .json path)")
    p_solve.add_argument("--save-u", default=None, help="directory for final basis CSVs")
    p_solve.set_defaults(func=cmd_solve)

    p_cmp = sub.add_parser(
        "compare", parents=[common_solver], help="benchmark algorithms over (r, seed) cells"
    )
    _add_dataset_args(p_cmp)
    p_cmp.add_argument("--r", default=None, help="r list, e.g. 1,2,5,10 or 1:10")
    p_cmp.add_argument("--seeds", type=int, default=None, help="number of seeds (0..k-1)")
    p_cmp.add_argument("--algs", default=None, help="comma list from {arpgda, rsg}")
    p_cmp.add_argument("--c-grid", default=None, help="rsg stepsize sweep, comma list")
    p_cmp.add_argument("--jobs", type=int, default=None, help="parallel cell workers")
    p_cmp.add_argument("--record-dist", action="store_true", help=argparse.SUPPRESS)
    p_cmp.add_argument("--out", default=".", help="output directory")
    p_cmp.set_defaults(func=cmd_compare)

    p_met = sub.add_parser("metrics", help="diagnostics for a saved basis checkpoint")
    _add_dataset_args(p_met)
    p_met.add_argument("--checkpoint", required=True, help="basis CSV written by solve --save-u")
    p_met.add_argument("--rel-threshold", type=float, default=0.1)
    p_met.add_argument("--tol-orth", type=float, default=None)
    p_met.add_argument("--out", default=None, help="write JSON here instead of stdout")
    p_met.set_defaults(func=cmd_metrics)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DegenerateProblemError, DiagnosticUnavailableError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
