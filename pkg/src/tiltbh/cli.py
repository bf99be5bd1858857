"""Command-line entry point. Composes the library; computes no physics itself.

Exit codes: 0 success (including sweeps with failed cells, which are
reported), 2 configuration problem, 3 solver failure, 4 cache integrity
failure.
"""

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .basis import BasisTable, dimension
from .errors import CapacityError, IntegrityError, SolverError
from .eigensolve import (DENSE_CAP_DEFAULT, V0_SEED_DEFAULT, full_spectrum,
                         interior_pairs, load_spectrum, save_spectrum)
from .hamiltonian import ModelParams, assemble
from .statistics import (bin_by_energy, gfd_stats, goe_bin_masses,
                         goe_d1_prediction, inner_fraction, kl_divergence,
                         sample_goe_gfd, sample_goe_matrix, spacing_ratios)
from .sweep import (SweepGrid, companion_axis, run_e0_grid,
                    run_energy_resolved, run_scaling, run_width, _fmt,
                    _write_csv, write_e0_csv, write_integrated_csv,
                    write_map_csv, write_scaling_csv, write_trajectory_csv,
                    write_windows_csv, write_windows_normalized_csv)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INTEGRITY = 4
WORKERS_ENV = "TILTBH_WORKERS"


class ConfigError(ValueError):
    """Malformed flags or sweep configuration."""


# -- diag ---------------------------------------------------------------

def cmd_diag(args) -> int:
    params = ModelParams(args.L, args.N, args.J, args.U, args.F)
    table = BasisTable(args.L, args.N)
    t0 = time.perf_counter()
    matrix = assemble(params, table)
    if args.interior is not None:
        spectrum = interior_pairs(matrix, args.interior, args.k,
                                  seed=args.seed, dense_cap=args.dense_cap)
    else:
        spectrum = full_spectrum(matrix, want_vectors=args.vectors,
                                 dense_cap=args.dense_cap)
    wall = time.perf_counter() - t0
    solver_info = {"seed": args.seed, "dense_cap": args.dense_cap}
    save_spectrum(args.out, spectrum, params, solver_info)
    print(f"D = {table.dim}")
    print(f"E_min = {_fmt(spectrum.energies[0])}")
    print(f"E_max = {_fmt(spectrum.energies[-1])}")
    print(f"wall_s = {wall:.3f}")
    print(f"wrote {args.out} ({spectrum.kind}, {spectrum.count} levels, "
          f"vectors={'yes' if spectrum.vectors is not None else 'no'})")
    return EXIT_OK


# -- stats --------------------------------------------------------------

def _write_stats_csv(path, params, n_levels, stats):
    _write_csv(path, ("L", "N", "J", "U", "F", "n_levels", "mean_r", "kl",
                      "dropped"),
               [(params.L, params.N, params.J, params.U, params.F, n_levels,
                 stats.mean_r, stats.kl_to_goe, stats.degenerate_dropped)])


def _write_hist_csv(path, stats, kl_mode):
    edges = np.linspace(0.0, 1.0, stats.histogram.shape[0] + 1)
    masses = goe_bin_masses(stats.histogram.shape[0], kl_mode)
    rows = [(edges[i], edges[i + 1], stats.histogram[i], masses[i])
            for i in range(stats.histogram.shape[0])]
    _write_csv(path, ("bin_left", "bin_right", "p", "q_goe"), rows)


def _write_gfd_csv(path, gstats):
    rows = [(q, gstats.mean[q], gstats.variance[q], gstats.n_states)
            for q in gstats.q_values]
    _write_csv(path, ("q", "mean_dq", "var_dq", "n_states"), rows)


def cmd_stats(args) -> int:
    spectrum, params = load_spectrum(args.cache)
    prefix = args.out_prefix
    q_values = tuple(_parse_q(q) for q in args.q)

    if args.bins is not None:
        binning = bin_by_energy(spectrum, n_bins=args.bins, q_values=(1.0,),
                                kl_mode=args.kl_mode)
        rows = []
        for center, s in zip(binning.centers, binning.per_bin):
            if s.empty:
                nan = float("nan")
                rows.append((center, s.count, nan, nan, nan, nan))
            else:
                d1m = s.gfd.mean[1.0] if s.gfd else float("nan")
                d1v = s.gfd.variance[1.0] if s.gfd else float("nan")
                rows.append((center, s.count, s.ratio.mean_r,
                             s.ratio.kl_to_goe, d1m, d1v))
        _write_csv(prefix + "_bins.csv",
                   ("eps_center", "count", "mean_r", "kl", "mean_d1",
                    "var_d1"), rows)
        print(f"wrote {prefix}_bins.csv ({args.bins} bins)")
        return EXIT_OK

    if args.window_around is not None:
        dist = np.abs(spectrum.energies - args.window_around)
        picked = np.sort(np.argsort(dist, kind="stable")[: args.k])
        energies = spectrum.energies[picked]
        vectors = (spectrum.vectors[:, picked]
                   if spectrum.vectors is not None else None)
    else:
        energies = inner_fraction(spectrum.energies, args.inner)
        drop = (spectrum.count - energies.shape[0]) // 2
        vectors = (spectrum.vectors[:, drop: drop + energies.shape[0]]
                   if spectrum.vectors is not None else None)

    stats = spacing_ratios(energies, kl_mode=args.kl_mode)
    _write_stats_csv(prefix + "_stats.csv", params, energies.shape[0], stats)
    _write_hist_csv(prefix + "_hist.csv", stats, args.kl_mode)
    made = ["_stats.csv", "_hist.csv"]
    if vectors is not None:
        gstats = gfd_stats(vectors, q_values, dim=spectrum.dim)
        _write_gfd_csv(prefix + "_gfd.csv", gstats)
        made.append("_gfd.csv")
    print(f"n_levels = {energies.shape[0]}")
    print(f"mean_r = {_fmt(stats.mean_r)}")
    print(f"kl = {_fmt(stats.kl_to_goe)}")
    print(f"wrote {', '.join(prefix + m for m in made)}")
    return EXIT_OK


# -- goe ----------------------------------------------------------------

def cmd_goe(args) -> int:
    if args.dim < 100:
        raise ConfigError(f"need --dim >= 100, got {args.dim}")
    t0 = time.perf_counter()
    pooled = []
    for i in range(args.realizations):
        w = np.linalg.eigvalsh(sample_goe_matrix(args.dim, args.seed + i))
        pooled.append(spacing_ratios(w).ratios)
    ratios = np.concatenate(pooled)
    counts, _ = np.histogram(ratios, bins=25, range=(0.0, 1.0))
    pmf = counts / ratios.size
    mean_r = float(ratios.mean())
    kl = kl_divergence(pmf, mode=args.kl_mode)

    mc = sample_goe_gfd(args.dim, args.vector_samples,
                        (1.0, 2.0, math.inf), seed=args.seed)
    d1_mean, d1_var = goe_d1_prediction(args.dim)
    nan = float("nan")
    rows = [
        ("mean_r", mean_r, 0.5307),
        ("kl", kl, 0.0),
        ("mean_d1", float(mc[1.0].mean()), d1_mean),
        ("var_d1", float(mc[1.0].var(ddof=1)), d1_var),
        ("mean_d2", float(mc[2.0].mean()), nan),
        ("var_d2", float(mc[2.0].var(ddof=1)), nan),
        ("mean_dinf", float(mc[math.inf].mean()), nan),
        ("var_dinf", float(mc[math.inf].var(ddof=1)), nan),
    ]
    tmp = args.out + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write("quantity,value,reference\n")
        for name, value, ref in rows:
            fh.write(f"{name},{_fmt(value)},{_fmt(ref)}\n")
    os.replace(tmp, args.out)
    print(f"mean_r = {mean_r:.6f} (reference 0.5307)")
    print(f"kl = {kl:.6f}")
    print(f"mean_d1 = {mc[1.0].mean():.6f} (prediction {d1_mean:.6f})")
    print(f"wall_s = {time.perf_counter() - t0:.3f}")
    print(f"wrote {args.out}")
    return EXIT_OK


# -- sweep --------------------------------------------------------------

def _parse_q(q):
    if isinstance(q, str):
        if q.lower() in ("inf", "infinity"):
            return math.inf
        return float(q)
    return float(q)


def _need(cfg: dict, key: str, kinds, what: str):
    if key not in cfg:
        raise ConfigError(f"config is missing {key!r} ({what})")
    value = cfg[key]
    if not isinstance(value, kinds):
        raise ConfigError(f"config {key!r} must be {what}, got {value!r}")
    return value


def _grid_values(cfg: dict, key: str) -> np.ndarray:
    spec = _need(cfg, key, dict, "a grid specification")
    if "values" in spec:
        values = np.asarray(spec["values"], dtype=np.float64)
    else:
        lo = _need(spec, "lo", (int, float), "a number")
        hi = _need(spec, "hi", (int, float), "a number")
        n = _need(spec, "n", int, "an integer")
        if spec.get("log", True):
            if not 0 < lo < hi:
                raise ConfigError(f"log grid needs 0 < lo < hi, got [{lo}, {hi}]")
            values = np.geomspace(lo, hi, n)
        else:
            values = np.linspace(lo, hi, n)
    if values.ndim != 1 or values.shape[0] < 1 or np.any(np.diff(values) <= 0):
        raise ConfigError(f"grid {key!r} must be strictly increasing")
    return values


def _fixed_list(cfg: dict, axis: str):
    fixed = _need(cfg, "fixed", dict, "a mapping of the companion ratio")
    want = companion_axis(axis)
    if set(fixed) != {want}:
        raise ConfigError(f"'fixed' must contain exactly {want!r} for axis {axis!r}")
    value = fixed[want]
    return [float(v) for v in value] if isinstance(value, list) else [float(value)]


def _slug(value: float) -> str:
    return format(value, "g").replace(".", "p").replace("-", "m")


def run_sweep_config(cfg: dict, out_dir: str, workers: int,
                     blas_threads: int) -> dict:
    """Execute one campaign config; returns a report with outputs and failures."""
    campaign = _need(cfg, "campaign", str, "one of energy_resolved, e0_grid, "
                                           "scaling, width")
    os.makedirs(out_dir, exist_ok=True)
    outputs, failed = [], []
    seeds = {"solver_seed": int(cfg.get("seed", V0_SEED_DEFAULT))}
    common = dict(
        degeneracy_floor=float(cfg.get("degeneracy_floor", 1e-12)),
        kl_mode=cfg.get("kl_mode", "quadrature"),
        dense_cap=int(cfg.get("dense_cap", DENSE_CAP_DEFAULT)),
        workers=workers, blas_threads=blas_threads, out_dir=out_dir,
    )

    if campaign == "energy_resolved":
        L = _need(cfg, "L", int, "an integer")
        N = _need(cfg, "N", int, "an integer")
        axis = _need(cfg, "axis", str, "a ratio axis")
        values = _grid_values(cfg, "grid")
        for s, fixed in enumerate(_fixed_list(cfg, axis)):
            grid = SweepGrid(axis, values, fixed, L, N)
            run_energy_resolved(grid, n_bins=int(cfg.get("n_bins", 100)),
                                fraction=float(cfg.get("fraction", 0.8)),
                                stem=f"eres{s:02d}", **common)
            records = [grid.per_point[i] for i in range(grid.n_points)]
            tag = _slug(fixed)
            for name, writer, arg in (
                (f"map_{tag}.csv", write_map_csv, grid),
                (f"integrated_{tag}.csv", write_integrated_csv, records),
                (f"trajectory_{tag}.csv", write_trajectory_csv, grid),
            ):
                writer(os.path.join(out_dir, name), arg)
                outputs.append(name)
            failed += [(r["grid_value"], fixed, r["error"])
                       for r in records if r["failed"]]

    elif campaign == "e0_grid":
        result = run_e0_grid(
            _grid_values(cfg, "u_over_j"), _grid_values(cfg, "f_over_j"),
            _need(cfg, "L", int, "an integer"), _need(cfg, "N", int, "an integer"),
            k=int(cfg.get("k", 200)), seed=seeds["solver_seed"], **common)
        write_e0_csv(os.path.join(out_dir, "e0_grid.csv"), result)
        outputs.append("e0_grid.csv")
        failed += [(c["u_over_j"], c["f_over_j"], c["error"])
                   for c in result["cells"] if c["failed"]]

    elif campaign == "scaling":
        common.pop("degeneracy_floor")
        common.pop("kl_mode")
        region = _need(cfg, "region", list, "[lo, hi]")
        q_values = tuple(_parse_q(q) for q in cfg.get("q_values", [1, 2, "inf"]))
        seeds["goe_seed"] = int(cfg.get("goe_seed", 20250817))
        rows = run_scaling(
            _need(cfg, "sizes", list, "a list of L = N sizes"),
            _need(cfg, "vary_axis", str, "a ratio axis"),
            float(_need(cfg, "fixed_value", (int, float), "a number")),
            (float(region[0]), float(region[1])),
            region_points=int(cfg.get("region_points", 1)),
            k=int(cfg.get("k", 200)), q_values=q_values,
            goe_samples=int(cfg.get("goe_samples", 2000)),
            goe_seed=seeds["goe_seed"], seed=seeds["solver_seed"], **common)
        write_scaling_csv(os.path.join(out_dir, "scaling.csv"), rows)
        outputs.append("scaling.csv")

    elif campaign == "width":
        L = _need(cfg, "L", int, "an integer")
        N = _need(cfg, "N", int, "an integer")
        axis = cfg.get("axis", "J/U")
        fixed_values = [float(v) for v in
                        _need(cfg, "fixed_values", list, "companion-ratio values")]
        result = run_width(fixed_values, _grid_values(cfg, "grid"), L, N,
                           axis=axis, tolerance=float(cfg.get("tolerance", 0.01)),
                           fraction=float(cfg.get("fraction", 0.8)), **common)
        write_windows_csv(os.path.join(out_dir, "windows.csv"),
                          result["fixed_values"], result["windows"])
        write_windows_normalized_csv(os.path.join(out_dir, "windows_normalized.csv"),
                                     result["fixed_values"], result["windows"])
        outputs += ["windows.csv", "windows_normalized.csv"]
        for fixed, records in zip(result["fixed_values"], result["slices"]):
            name = f"integrated_{_slug(fixed)}.csv"
            write_integrated_csv(os.path.join(out_dir, name), records)
            outputs.append(name)
            failed += [(r["grid_value"], fixed, r["error"])
                       for r in records if r["failed"]]

    else:
        raise ConfigError(f"unknown campaign {campaign!r}")

    return {"outputs": outputs, "failed_cells": failed, "seeds": seeds}


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _resolve_config(path: str) -> str:
    if os.path.exists(path):
        return path
    bundled = os.path.join(os.path.dirname(__file__), "configs",
                           os.path.basename(path))
    if os.path.exists(bundled):
        return bundled
    raise ConfigError(f"config not found: {path} (also tried bundled "
                      f"{os.path.basename(path)})")


def cmd_sweep(args) -> int:
    try:
        with open(_resolve_config(args.config)) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")

    out_dir = args.out_dir or cfg.get("out_dir")
    if not out_dir:
        raise ConfigError("no output directory: set 'out_dir' in the config "
                          "or pass --out-dir")
    workers = args.workers or cfg.get("workers") \
        or int(os.environ.get(WORKERS_ENV, "1"))
    workers = max(1, int(workers))
    blas_threads = max(1, int(cfg.get("blas_threads", 1)))

    t0 = time.perf_counter()
    report = run_sweep_config(cfg, out_dir, workers, blas_threads)
    wall = time.perf_counter() - t0

    manifest = {
        "format": "tiltbh-manifest",
        "version": __version__,
        "campaign": cfg["campaign"],
        "config": cfg,
        "workers": workers,
        "blas_threads": blas_threads,
        "seeds": report["seeds"],
        "timings": {"total_s": wall},
        "failed_cells": [list(f) for f in report["failed_cells"]],
        "outputs": [
            {"path": name,
             "bytes": os.path.getsize(os.path.join(out_dir, name)),
             "sha256": _sha256_file(os.path.join(out_dir, name))}
            for name in report["outputs"]
        ],
    }
    tmp = os.path.join(out_dir, "manifest.json.tmp")
    with open(tmp, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, os.path.join(out_dir, "manifest.json"))

    print(f"campaign {cfg['campaign']}: {len(report['outputs'])} outputs "
          f"in {out_dir} ({wall:.1f}s)")
    if report["failed_cells"]:
        print(f"failed cells: {len(report['failed_cells'])}", file=sys.stderr)
        for cell in report["failed_cells"][:20]:
            print(f"  {cell}", file=sys.stderr)
    return EXIT_OK


# -- parser -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiltbh",
        description="Exact diagonalization and quantum-chaos statistics "
                    "for the tilted Bose-Hubbard chain.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diag", help="diagonalize one parameter set into a cache")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--J", type=float, required=True)
    p.add_argument("--U", type=float, required=True)
    p.add_argument("--F", type=float, required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--full", action="store_true",
                      help="full spectrum (dense)")
    mode.add_argument("--interior", type=float, metavar="TARGET",
                      help="k eigenpairs nearest TARGET")
    p.add_argument("--k", type=int, default=200,
                   help="interior pair count (default 200)")
    p.add_argument("--vectors", action="store_true",
                   help="keep eigenvectors with --full")
    p.add_argument("--dense-cap", type=int, default=DENSE_CAP_DEFAULT)
    p.add_argument("--seed", type=int, default=V0_SEED_DEFAULT)
    p.add_argument("--out", required=True, help="cache file to write")
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("stats", help="statistics from a spectrum cache")
    p.add_argument("--cache", required=True)
    p.add_argument("--out-prefix", required=True)
    sel = p.add_mutually_exclusive_group()
    sel.add_argument("--inner", type=float, default=0.8,
                     help="inner spectral fraction (default 0.8)")
    sel.add_argument("--bins", type=int,
                     help="energy-resolved mode with this many bins")
    sel.add_argument("--window-around", type=float, metavar="E",
                     help="select the k levels nearest E")
    p.add_argument("--k", type=int, default=200,
                   help="level count for --window-around")
    p.add_argument("--q", nargs="+", default=["1", "2", "inf"],
                   help="fractal-dimension exponents (default: 1 2 inf)")
    p.add_argument("--kl-mode", choices=("quadrature", "midpoint"),
                   default="quadrature")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sweep", help="run a campaign from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", help="override the config's output directory")
    p.add_argument("--workers", type=int,
                   help=f"worker processes (default: config, then "
                        f"${WORKERS_ENV}, then 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("goe", help="ensemble reference values by sampling")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--realizations", type=int, default=20)
    p.add_argument("--vector-samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=20250817)
    p.add_argument("--kl-mode", choices=("quadrature", "midpoint"),
                   default="quadrature")
    p.add_argument("--out", required=True, help="reference CSV to write")
    p.set_defaults(func=cmd_goe)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CapacityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY


if __name__ == "__main__":
    sys.exit(main())
