"""Parameter-grid campaigns: energy-resolved maps, chaotic-window
extraction, the E = 0 interior grid, and the dimension-scaling study.

Every campaign walks a grid of coupling ratios with the denominator
coupling pinned to exactly 1, computes statistics per point through the
library modules, and returns JSON-friendly per-point records. Grid cells
are independent; a worker pool can execute them concurrently, and a cell
that fails in the solver is recorded as failed without disturbing its
neighbours. Passing `out_dir` makes a campaign resumable: finished cells
are persisted as JSON files and picked up instead of recomputed.
"""

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisTable, dimension
from .errors import CapacityError, SolverError
from .eigensolve import (DENSE_CAP_DEFAULT, V0_SEED_DEFAULT, extremal_energies,
                         full_spectrum, interior_pairs)
from .hamiltonian import ModelParams, assemble, diagonal_energy
from .statistics import (DEGENERACY_FLOOR_DEFAULT, MEAN_R_NUMERIC, bin_by_energy,
                         gfd_stats, goe_d1_prediction, inner_fraction,
                         sample_goe_gfd, spacing_ratios)

# ratio axis -> (varied coupling, unit coupling); the companion ratio shares
# the denominator, e.g. sweeping J/U fixes F through F/U
_AXES = {
    "J/U": ("J", "U"),
    "F/U": ("F", "U"),
    "F/J": ("F", "J"),
    "U/J": ("U", "J"),
}


def companion_axis(axis: str) -> str:
    num, den = _AXES[axis]
    other = ({"J", "U", "F"} - {num, den}).pop()
    return f"{other}/{den}"


def _params_from_ratios(axis: str, value: float, fixed: float,
                        L: int, N: int) -> ModelParams:
    num, den = _AXES[axis]
    other = companion_axis(axis).split("/")[0]
    couplings = {den: 1.0, num: float(value), other: float(fixed)}
    return ModelParams(L, N, couplings["J"], couplings["U"], couplings["F"])


@dataclass(frozen=True)
class SweepGrid:
    """One sweep axis: which ratio varies, over which values, what is held.

    The denominator coupling of `axis` is set to exactly 1 in every
    generated parameter set; `fixed` is the value of the companion ratio
    (same denominator). Campaign results land in `per_point`, keyed by
    grid index.
    """

    axis: str
    values: np.ndarray
    fixed: float
    L: int
    N: int
    per_point: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {sorted(_AXES)}, got {self.axis!r}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] < 1:
            raise ValueError("values must be a non-empty vector")
        if np.any(np.diff(values) <= 0):
            raise ValueError("grid values must be strictly increasing")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def unit(self) -> str:
        return _AXES[self.axis][1]

    @property
    def fixed_axis(self) -> str:
        return companion_axis(self.axis)

    @property
    def n_points(self) -> int:
        return int(self.values.shape[0])

    def params_for(self, i: int) -> ModelParams:
        return _params_from_ratios(self.axis, self.values[i], self.fixed,
                                   self.L, self.N)

    @classmethod
    def log_spaced(cls, axis: str, lo: float, hi: float, n: int,
                   fixed: float, L: int, N: int) -> "SweepGrid":
        """Grid of n points equally spaced in log scale on [lo, hi]."""
        if not 0 < lo < hi:
            raise ValueError(f"need 0 < lo < hi for a log grid, got [{lo}, {hi}]")
        return cls(axis, np.geomspace(lo, hi, n), fixed, L, N)


@dataclass(frozen=True)
class ChaoticWindow:
    """Longest contiguous grid run whose <r> sits within tolerance of GOE."""

    lower: float
    upper: float
    width_log: float
    width_linear: float
    tolerance: float
    n_certified: int = 0

    @property
    def empty(self) -> bool:
        return self.n_certified == 0


def chaotic_window(values, mean_rs, tolerance: float,
                   reference: float = MEAN_R_NUMERIC) -> ChaoticWindow:
    """Certify grid points by |<r> - ref|/ref <= tolerance and find the
    longest contiguous certified run (the first one on a tie).

    Points with NaN <r> (failed cells) are never certified. An empty
    window carries NaN bounds.
    """
    values = np.asarray(values, dtype=np.float64)
    mr = np.asarray(mean_rs, dtype=np.float64)
    if values.shape != mr.shape:
        raise ValueError("values and mean_rs must align")
    with np.errstate(invalid="ignore"):
        ok = np.abs(mr - reference) / reference <= tolerance
    ok &= np.isfinite(mr)

    best_start, best_len = -1, 0
    i = 0
    n = ok.shape[0]
    while i < n:
        if ok[i]:
            j = i
            while j < n and ok[j]:
                j += 1
            if j - i > best_len:
                best_start, best_len = i, j - i
            i = j
        else:
            i += 1
    if best_len == 0:
        nan = float("nan")
        return ChaoticWindow(nan, nan, nan, nan, tolerance, 0)
    lower = float(values[best_start])
    upper = float(values[best_start + best_len - 1])
    width_log = math.log10(upper / lower) if lower > 0 else float("nan")
    return ChaoticWindow(lower, upper, width_log, upper - lower,
                         tolerance, best_len)


@dataclass(frozen=True)
class HomogeneousProbe:
    """Reference-state markers: the unit-filling Fock state has energy 0
    and local-density-of-states width sigma = 2J sqrt(N-1)."""

    energy: float
    sigma: float
    epsilon_of_zero: float
    k_states: int


def homogeneous_identity(matrix, table: BasisTable) -> tuple:
    """(<H>, <H^2> - <H>^2) in the unit-filling state, via the matrix action."""
    if table.N != table.L:
        raise ValueError("homogeneous state needs unit filling N = L")
    i0 = table.rank(np.ones(table.L, dtype=np.int64))
    e0 = np.zeros(table.dim)
    e0[i0] = 1.0
    hv = matrix.apply(e0)
    h_mean = float(hv[i0])
    h_var = float(hv @ hv) - h_mean * h_mean
    return h_mean, h_var


def homogeneous_probe(params: ModelParams, matrix=None, table=None,
                      k_states: int = 0) -> HomogeneousProbe:
    """Locate the unit-filling state inside the rescaled spectrum."""
    if params.N != params.L:
        raise ValueError(
            f"homogeneous probe needs unit filling, got N={params.N}, L={params.L}"
        )
    if table is None:
        table = BasisTable(params.L, params.N)
    if matrix is None:
        matrix = assemble(params, table)
    energy = diagonal_energy(np.ones(params.L, dtype=np.int64), params)
    sigma = 2.0 * params.J * math.sqrt(params.N - 1)
    e_min, e_max = extremal_energies(matrix)
    eps0 = float(np.clip((energy - e_min) / (e_max - e_min), 0.0, 1.0))
    return HomogeneousProbe(energy, sigma, eps0, k_states)


# -- worker-pool plumbing ---------------------------------------------------

_BLAS_LIMIT_HOLD = None


def _limit_worker_threads(n: int):
    # keep the controller alive for the worker's lifetime, else limits revert
    global _BLAS_LIMIT_HOLD
    from threadpoolctl import threadpool_limits

    _BLAS_LIMIT_HOLD = threadpool_limits(limits=n)


def _cell_file(out_dir, stem: str, index: int) -> str:
    return os.path.join(out_dir, "cells", f"{stem}_{index:05d}.json")


def _load_cell(path: str, key: dict):
    try:
        with open(path) as fh:
            record = json.load(fh)
    except (FileNotFoundError, json.JSONDecodeError):
        return None
    return record if record.get("key") == key else None


def _store_cell(path: str, record: dict):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(record, fh, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _resumable(worker, tasks, keys, workers, blas_threads, out_dir, stem):
    """Run cells through the pool, reusing any persisted finished cells.

    Each fresh cell is persisted the moment it completes, so an interrupted
    campaign loses at most the cells that were in flight.
    """
    results = [None] * len(tasks)
    todo = []
    for i, (task, key) in enumerate(zip(tasks, keys)):
        if out_dir is not None:
            cached = _load_cell(_cell_file(out_dir, stem, i), key)
            if cached is not None:
                results[i] = cached
                continue
        todo.append((i, task))

    def finish(i, record):
        record["key"] = keys[i]
        if out_dir is not None:
            _store_cell(_cell_file(out_dir, stem, i), record)
        results[i] = record

    if workers <= 1:
        for i, task in todo:
            finish(i, worker(task))
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_limit_worker_threads,
            initargs=(blas_threads,),
        ) as pool:
            futures = {pool.submit(worker, task): i for i, task in todo}
            for future in as_completed(futures):
                finish(futures[future], future.result())
    return results


# -- energy-resolved campaign ----------------------------------------------

def _energy_resolved_point(task: dict) -> dict:
    L, N = task["L"], task["N"]
    params = _params_from_ratios(task["axis"], task["value"], task["fixed"], L, N)
    record = {
        "index": task["index"], "grid_value": task["value"],
        "J": params.J, "U": params.U, "F": params.F,
        "dim": dimension(L, N), "failed": False, "error": None,
    }
    try:
        table = BasisTable(L, N)
        matrix = assemble(params, table)
        spectrum = full_spectrum(matrix, want_vectors=True,
                                 dense_cap=task["dense_cap"])
        binning = bin_by_energy(spectrum, n_bins=task["n_bins"],
                                q_values=(1.0,),
                                degeneracy_floor=task["floor"],
                                kl_mode=task["kl_mode"])
        inner = inner_fraction(spectrum.energies, task["fraction"])
        stats = spacing_ratios(inner, task["floor"], task["kl_mode"])

        centers, counts, dev_r, mean_d1, var_d1 = [], [], [], [], []
        for center, summary in zip(binning.centers, binning.per_bin):
            centers.append(float(center))
            counts.append(summary.count)
            if summary.empty:
                dev_r.append(float("nan"))
                mean_d1.append(float("nan"))
                var_d1.append(float("nan"))
            else:
                dev_r.append(abs(summary.ratio.mean_r - MEAN_R_NUMERIC))
                mean_d1.append(summary.gfd.mean[1.0])
                var_d1.append(summary.gfd.variance[1.0])
        record.update(
            mean_r=stats.mean_r, kl=stats.kl_to_goe,
            dropped=stats.degenerate_dropped, n_inner=int(inner.shape[0]),
            bins={"center": centers, "count": counts, "dev_r": dev_r,
                  "mean_d1": mean_d1, "var_d1": var_d1},
        )
        if N == L:
            h_mean, h_var = homogeneous_identity(matrix, table)
            sigma = 2.0 * params.J * math.sqrt(N - 1)
            e_min = float(spectrum.energies[0])
            e_max = float(spectrum.energies[-1])
            width = e_max - e_min
            record["probe"] = {
                "sigma": sigma,
                "eps_zero": float(np.clip((0.0 - e_min) / width, 0.0, 1.0)),
                "eps_minus": float(np.clip((-sigma - e_min) / width, 0.0, 1.0)),
                "eps_plus": float(np.clip((sigma - e_min) / width, 0.0, 1.0)),
                "h_mean": h_mean,
                "h_var": h_var,
                "h_var_expected": 4.0 * params.J ** 2 * (N - 1),
            }
        else:
            record["probe"] = None
    except (SolverError, CapacityError) as exc:
        record["failed"] = True
        record["error"] = f"{type(exc).__name__}: {exc}"
    return record


def run_energy_resolved(grid: SweepGrid, n_bins: int = 100,
                        fraction: float = 0.8,
                        degeneracy_floor: float = DEGENERACY_FLOOR_DEFAULT,
                        kl_mode: str = "quadrature",
                        dense_cap: int = DENSE_CAP_DEFAULT,
                        workers: int = 1, blas_threads: int = 1,
                        out_dir=None, stem: str = "eres") -> SweepGrid:
    """Full spectrum with eigenvectors at every grid point.

    Per point: per-epsilon-bin |<r> - r_GOE|, mean and variance of D_1,
    the inner-fraction <r> and KL divergence, and (at unit filling) the
    homogeneous-state markers epsilon(0), epsilon(+-sigma) plus the
    matvec-checked <H> and <H^2> identities. Results are stored in
    grid.per_point[index].
    """
    base = {"axis": grid.axis, "fixed": grid.fixed, "L": grid.L, "N": grid.N,
            "n_bins": n_bins, "fraction": fraction, "floor": degeneracy_floor,
            "kl_mode": kl_mode, "dense_cap": dense_cap}
    tasks, keys = [], []
    for i, value in enumerate(grid.values):
        tasks.append({**base, "index": i, "value": float(value)})
        keys.append({"campaign": "energy_resolved", "axis": grid.axis,
                     "value": float(value), "fixed": grid.fixed,
                     "L": grid.L, "N": grid.N, "n_bins": n_bins,
                     "fraction": fraction})
    records = _resumable(_energy_resolved_point, tasks, keys, workers,
                         blas_threads, out_dir, stem)
    for record in records:
        grid.per_point[record["index"]] = record
    return grid


# -- width campaign ----------------------------------------------------------

def _width_point(task: dict) -> dict:
    L, N = task["L"], task["N"]
    params = _params_from_ratios(task["axis"], task["value"], task["fixed"], L, N)
    record = {"index": task["index"], "grid_value": task["value"],
              "fixed": task["fixed"], "failed": False, "error": None}
    try:
        table = BasisTable(L, N)
        matrix = assemble(params, table)
        spectrum = full_spectrum(matrix, want_vectors=False,
                                 dense_cap=task["dense_cap"])
        inner = inner_fraction(spectrum.energies, task["fraction"])
        stats = spacing_ratios(inner, task["floor"], task["kl_mode"])
        record.update(mean_r=stats.mean_r, kl=stats.kl_to_goe,
                      dropped=stats.degenerate_dropped)
    except (SolverError, CapacityError) as exc:
        record["failed"] = True
        record["error"] = f"{type(exc).__name__}: {exc}"
        record.update(mean_r=float("nan"), kl=float("nan"), dropped=0)
    return record


def run_width(fixed_values, axis_values, L: int, N: int,
              axis: str = "J/U", tolerance: float = 0.01,
              fraction: float = 0.8,
              degeneracy_floor: float = DEGENERACY_FLOOR_DEFAULT,
              kl_mode: str = "quadrature", dense_cap: int = DENSE_CAP_DEFAULT,
              workers: int = 1, blas_threads: int = 1, out_dir=None) -> dict:
    """Chaotic-window widths as a function of the companion ratio.

    For each value of the companion ratio (e.g. F/U), sweeps `axis`
    (e.g. J/U) with eigenvalue-only spectra, certifies points against the
    GOE <r>, and extracts the maximal window. Returns slices (per-point
    records per fixed value) and the per-fixed-value ChaoticWindow.
    """
    axis_values = np.asarray(axis_values, dtype=np.float64)
    slices, windows = [], []
    for s, fixed in enumerate(fixed_values):
        base = {"axis": axis, "fixed": float(fixed), "L": L, "N": N,
                "fraction": fraction, "floor": degeneracy_floor,
                "kl_mode": kl_mode, "dense_cap": dense_cap}
        tasks, keys = [], []
        for i, value in enumerate(axis_values):
            tasks.append({**base, "index": i, "value": float(value)})
            keys.append({"campaign": "width", "axis": axis,
                         "value": float(value), "fixed": float(fixed),
                         "L": L, "N": N, "fraction": fraction})
        records = _resumable(_width_point, tasks, keys, workers,
                             blas_threads, out_dir, f"width{s:02d}")
        mean_rs = [r["mean_r"] for r in records]
        windows.append(chaotic_window(axis_values, mean_rs, tolerance))
        slices.append(records)
    return {"axis": axis, "axis_values": axis_values,
            "fixed_values": [float(v) for v in fixed_values],
            "tolerance": tolerance, "slices": slices, "windows": windows}


# -- E = 0 interior grid -----------------------------------------------------

def _e0_cell(task: dict) -> dict:
    L, N, k = task["L"], task["N"], task["k"]
    u, f = task["u_over_j"], task["f_over_j"]
    record = {"index": task["index"], "u_over_j": u, "f_over_j": f,
              "failed": False, "error": None}
    try:
        params = ModelParams(L, N, 1.0, u, f)
        table = BasisTable(L, N)
        matrix = assemble(params, table)
        spectrum = interior_pairs(matrix, 0.0, k, seed=task["seed"],
                                  dense_cap=task["dense_cap"])
        stats = spacing_ratios(spectrum.energies, task["floor"], task["kl_mode"])
        gstats = gfd_stats(spectrum.vectors, (1.0,), dim=spectrum.dim)
        record.update(mean_r=stats.mean_r, kl=stats.kl_to_goe,
                      dropped=stats.degenerate_dropped,
                      mean_d1=gstats.mean[1.0], var_d1=gstats.variance[1.0])
    except (SolverError, CapacityError) as exc:
        record["failed"] = True
        record["error"] = f"{type(exc).__name__}: {exc}"
        record.update(mean_r=float("nan"), kl=float("nan"), dropped=0,
                      mean_d1=float("nan"), var_d1=float("nan"))
    return record


def run_e0_grid(u_over_j_values, f_over_j_values, L: int, N: int,
                k: int = 200, degeneracy_floor: float = DEGENERACY_FLOOR_DEFAULT,
                kl_mode: str = "quadrature", dense_cap: int = DENSE_CAP_DEFAULT,
                seed: int = V0_SEED_DEFAULT, workers: int = 1,
                blas_threads: int = 1, out_dir=None) -> dict:
    """(U/J, F/J) grid of interior statistics around E = 0 at J = 1.

    Each cell takes the k eigenpairs nearest zero and reports their <r>,
    KL, and D_1 mean/variance. Cells are row-major with U/J outermost.
    """
    u_values = np.asarray(u_over_j_values, dtype=np.float64)
    f_values = np.asarray(f_over_j_values, dtype=np.float64)
    tasks, keys = [], []
    index = 0
    for u in u_values:
        for f in f_values:
            tasks.append({"index": index, "u_over_j": float(u),
                          "f_over_j": float(f), "L": L, "N": N, "k": k,
                          "floor": degeneracy_floor, "kl_mode": kl_mode,
                          "dense_cap": dense_cap, "seed": seed})
            keys.append({"campaign": "e0_grid", "u_over_j": float(u),
                         "f_over_j": float(f), "L": L, "N": N, "k": k})
            index += 1
    cells = _resumable(_e0_cell, tasks, keys, workers, blas_threads,
                       out_dir, "e0")
    return {"u_over_j": u_values, "f_over_j": f_values, "k": k,
            "L": L, "N": N, "cells": cells}


# -- scaling campaign ---------------------------------------------------------

def _scaling_point(task: dict) -> dict:
    L = task["L"]
    params = _params_from_ratios(task["vary_axis"], task["value"],
                                 task["fixed_value"], L, L)
    table = BasisTable(L, L)
    matrix = assemble(params, table)
    spectrum = interior_pairs(matrix, 0.0, task["k"], seed=task["seed"],
                              dense_cap=task["dense_cap"])
    gstats = gfd_stats(spectrum.vectors, tuple(task["q_values"]),
                       dim=spectrum.dim)
    return {"index": task["index"], "L": L, "value": task["value"],
            "per_state": {repr(q): gstats.per_state[q].tolist()
                          for q in gstats.q_values}}


def run_scaling(sizes, vary_axis: str, fixed_value: float, region,
                region_points: int = 1, k: int = 200,
                q_values=(1.0, 2.0, math.inf), goe_samples: int = 2000,
                goe_seed: int = 20250817, seed: int = V0_SEED_DEFAULT,
                dense_cap: int = DENSE_CAP_DEFAULT, workers: int = 1,
                blas_threads: int = 1, out_dir=None) -> list:
    """Fractal-dimension scaling with Hilbert-space dimension at unit filling.

    For each size L = N, pools the per-state D_q of the k eigenpairs
    nearest E = 0 across `region_points` grid points of `vary_axis` inside
    `region` (the deep-chaotic subinterval, an explicit input), then pairs
    the sample mean/variance with ensemble references: the closed form for
    q = 1 and seeded Monte-Carlo vectors for other q. Returns one row per
    (L, q): dicts with L, dim, q, mean_dq, var_dq, goe_mean, goe_var.

    Solver failures propagate; a scaling study with a hole in it is not
    meaningful.
    """
    sizes = [int(s) for s in sizes]
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    lo, hi = float(region[0]), float(region[1])
    if not 0 < lo <= hi:
        raise ValueError(f"region must satisfy 0 < lo <= hi, got [{lo}, {hi}]")
    if region_points < 1:
        raise ValueError("region_points must be >= 1")
    values = (np.geomspace(lo, hi, region_points) if region_points > 1
              else np.array([lo]))
    qs = tuple(float(q) for q in q_values)

    rows = []
    for L in sizes:
        dim = dimension(L, L)
        tasks, keys = [], []
        for i, value in enumerate(values):
            tasks.append({"index": i, "L": L, "vary_axis": vary_axis,
                          "value": float(value), "fixed_value": fixed_value,
                          "k": k, "q_values": qs, "seed": seed,
                          "dense_cap": dense_cap})
            keys.append({"campaign": "scaling", "L": L, "vary_axis": vary_axis,
                         "value": float(value), "fixed_value": fixed_value,
                         "k": k, "q": [repr(q) for q in qs]})
        records = _resumable(_scaling_point, tasks, keys, workers,
                             blas_threads, out_dir, f"scal{L:02d}")
        pooled = {q: np.concatenate([np.asarray(r["per_state"][repr(q)])
                                     for r in records]) for q in qs}
        goe_mc = None
        for q in qs:
            samples = pooled[q]
            if q == 1.0:
                goe_mean, goe_var = goe_d1_prediction(dim)
            else:
                if goe_mc is None:
                    mc_qs = tuple(q2 for q2 in qs if q2 != 1.0)
                    goe_mc = sample_goe_gfd(dim, goe_samples, mc_qs,
                                            seed=goe_seed)
                goe_mean = float(goe_mc[q].mean())
                goe_var = float(goe_mc[q].var(ddof=1))
            rows.append({"L": L, "dim": dim, "q": q,
                         "mean_dq": float(samples.mean()),
                         "var_dq": float(samples.var(ddof=1)),
                         "goe_mean": goe_mean, "goe_var": goe_var})
    return rows


# -- CSV emission -------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    tmp = str(path) + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    os.replace(tmp, path)


def write_map_csv(path, grid: SweepGrid):
    """Energy-resolved map rows: (grid_value, eps_bin_center, dev_r,
    mean_d1, var_d1), empty bins as NaN."""
    rows = []
    for i in range(grid.n_points):
        record = grid.per_point[i]
        if record["failed"]:
            continue
        b = record["bins"]
        for c, dr, m1, v1 in zip(b["center"], b["dev_r"], b["mean_d1"],
                                 b["var_d1"]):
            rows.append((record["grid_value"], c, dr, m1, v1))
    _write_csv(path, ("grid_value", "eps_bin_center", "dev_r", "mean_d1",
                      "var_d1"), rows)


def write_integrated_csv(path, records):
    """Energy-integrated rows: (grid_value, mean_r, kl)."""
    rows = [(r["grid_value"], r["mean_r"], r["kl"])
            for r in records if not r["failed"]]
    _write_csv(path, ("grid_value", "mean_r", "kl"), rows)


def write_trajectory_csv(path, grid: SweepGrid):
    """Homogeneous-state trajectory: (grid_value, sigma, eps_zero,
    eps_minus, eps_plus)."""
    rows = []
    for i in range(grid.n_points):
        record = grid.per_point[i]
        if record["failed"] or record.get("probe") is None:
            continue
        p = record["probe"]
        rows.append((record["grid_value"], p["sigma"], p["eps_zero"],
                     p["eps_minus"], p["eps_plus"]))
    _write_csv(path, ("grid_value", "sigma", "eps_zero", "eps_minus",
                      "eps_plus"), rows)


def write_windows_csv(path, fixed_values, windows):
    """Window rows: (fixed_ratio, lower, upper, width_log, width_linear,
    tolerance)."""
    rows = [(f, w.lower, w.upper, w.width_log, w.width_linear, w.tolerance)
            for f, w in zip(fixed_values, windows)]
    _write_csv(path, ("fixed_ratio", "lower", "upper", "width_log",
                      "width_linear", "tolerance"), rows)


def write_windows_normalized_csv(path, fixed_values, windows):
    """Log-width of each window normalized by the first window's log-width."""
    base = windows[0].width_log if windows else float("nan")
    rows = [(f, w.width_log / base if base and math.isfinite(base) else float("nan"))
            for f, w in zip(fixed_values, windows)]
    _write_csv(path, ("fixed_ratio", "w_over_w0_log"), rows)


def write_e0_csv(path, result: dict):
    """E = 0 grid rows: (u_over_j, f_over_j, mean_r, mean_d1, var_d1)."""
    rows = [(c["u_over_j"], c["f_over_j"], c["mean_r"], c["mean_d1"],
             c["var_d1"]) for c in result["cells"]]
    _write_csv(path, ("u_over_j", "f_over_j", "mean_r", "mean_d1", "var_d1"),
               rows)


def write_scaling_csv(path, rows):
    """Scaling rows: (L, dim, q, mean_dq, var_dq, goe_mean, goe_var)."""
    table = [(r["L"], r["dim"], r["q"], r["mean_dq"], r["var_dq"],
              r["goe_mean"], r["goe_var"]) for r in rows]
    _write_csv(path, ("L", "dim", "q", "mean_dq", "var_dq", "goe_mean",
                      "goe_var"), table)
