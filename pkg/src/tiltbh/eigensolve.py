"""Dense and iterative eigensolvers plus the binary spectrum cache.

Three routes into the spectrum:

* ``full_spectrum``: densify and diagonalize, guarded by a dimension cap.
* ``interior_pairs``: the k eigenpairs nearest a target energy via
  shift-invert Lanczos, with a dense fallback when k is not small
  against the dimension.
* ``extremal_energies``: just the spectral endpoints, iteratively.

Every vector-returning route fixes eigenvector signs canonically (largest
component positive) so repeated runs produce identical bytes. Spectra can
be stored to a binary cache with a JSON sidecar carrying a checksum.
"""

import hashlib
import json
import math
import os
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, IntegrityError, SolverError
from .hamiltonian import ModelParams, SparseSymmetric

DENSE_CAP_DEFAULT = 50_000
RESIDUAL_TOL_DEFAULT = 1e-10
V0_SEED_DEFAULT = 1905

# interior solves pad the request so trimming to the k nearest survives a
# nudged shift; 8 extra pairs is far beyond any nudge displacement
_PAD = 8
_FULL_CHECK_CAP = 8192
_SPOT_COLUMNS = 128


@dataclass
class Spectrum:
    """Eigenvalues, optional eigenvectors, and how they were obtained.

    `vectors` has one column per energy, aligned by index. `kind` is
    "full", "interior", or "extremal"; interior spectra also carry the
    `target` they were aimed at. `residual_tol` is the largest verified
    relative residual (NaN when no vectors were available to check).
    """

    energies: np.ndarray
    vectors: np.ndarray | None
    kind: str
    dim: int
    target: float | None = None
    residual_tol: float = float("nan")
    notes: tuple = ()

    @property
    def count(self) -> int:
        return int(self.energies.shape[0])

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=np.float64)
        if self.energies.ndim != 1:
            raise ValueError("energies must be a vector")
        if np.any(np.diff(self.energies) < 0):
            raise ValueError("energies must be sorted ascending")
        if self.vectors is not None and self.vectors.shape != (self.dim, self.count):
            raise ValueError(
                f"vectors shape {self.vectors.shape} != ({self.dim}, {self.count})"
            )


def _canonical_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each vector's largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors *= signs
    return vectors


def _residual_scale(matrix: SparseSymmetric) -> float:
    return max(1.0, matrix.one_norm_estimate())


def verify_residuals(matrix: SparseSymmetric, energies, vectors,
                     chunk: int = 64) -> float:
    """Largest relative residual ‖Hv − Ev‖₂ / max(1, ‖H‖₁) over all pairs.

    Recomputed from the matrix action alone, independent of whichever
    solver produced the pairs.
    """
    scale = _residual_scale(matrix)
    energies = np.asarray(energies, dtype=np.float64)
    worst = 0.0
    for start in range(0, energies.shape[0], chunk):
        stop = min(start + chunk, energies.shape[0])
        block = vectors[:, start:stop]
        resid = matrix.apply(block) - block * energies[start:stop]
        worst = max(worst, float(np.linalg.norm(resid, axis=0).max()))
    return worst / scale


def full_spectrum(matrix: SparseSymmetric, want_vectors: bool = True,
                  dense_cap: int = DENSE_CAP_DEFAULT) -> Spectrum:
    """All eigenvalues (and optionally eigenvectors) by dense diagonalization.

    Refuses dimensions above `dense_cap`; use interior_pairs for a window
    of a larger spectrum instead.
    """
    if matrix.dim > dense_cap:
        raise CapacityError(
            f"dim={matrix.dim} exceeds the dense cap {dense_cap}; "
            "use interior_pairs for a spectral window instead"
        )
    dense = matrix.dense()
    if want_vectors:
        energies, vectors = sla.eigh(dense, check_finite=False, overwrite_a=True)
        vectors = _canonical_signs(vectors)
        notes = ()
        if matrix.dim <= _FULL_CHECK_CAP:
            achieved = verify_residuals(matrix, energies, vectors)
        else:
            cols = np.unique(np.linspace(0, matrix.dim - 1, _SPOT_COLUMNS).astype(int))
            achieved = verify_residuals(matrix, energies[cols], vectors[:, cols])
            notes = (f"residuals spot-checked on {cols.size} of {matrix.dim} vectors",)
        return Spectrum(energies, vectors, "full", matrix.dim,
                        residual_tol=achieved, notes=notes)
    energies = sla.eigh(dense, eigvals_only=True, check_finite=False,
                        overwrite_a=True)
    return Spectrum(energies, None, "full", matrix.dim,
                    notes=("eigenvalues only; residuals not checkable",))


def _interior_dense(matrix: SparseSymmetric, target: float, k: int,
                    dense_cap: int) -> tuple:
    if matrix.dim > dense_cap:
        raise CapacityError(
            f"dense fallback needed for k={k} at dim={matrix.dim}, above the "
            f"cap {dense_cap}; reduce k"
        )
    dense = matrix.dense()
    energies, vectors = sla.eigh(dense, check_finite=False, overwrite_a=True)
    return energies, vectors


def _interior_arpack(matrix: SparseSymmetric, target: float, k_req: int,
                     seed: int, budget: int):
    """Shift-invert solve returning k_req pairs nearest the (nudged) shift."""
    dim = matrix.dim
    A = matrix.full_csr()
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    ncv = min(dim, max(2 * k_req + 1, 20))
    maxiter = max(2, math.ceil(budget * k_req / max(1, ncv - k_req)))
    # nudge ladder for shifts that make H - sigma*I exactly singular
    base = max(1.0, abs(target))
    trial_shifts = [target] + [target + s * base
                               for s in (1e-10, -1e-10, 1e-8, -1e-8, 1e-6, -1e-6)]
    last_singular = None
    for sigma in trial_shifts:
        try:
            energies, vectors = spla.eigsh(
                A, k=k_req, sigma=sigma, which="LM", mode="normal",
                v0=v0, ncv=ncv, maxiter=maxiter, tol=0,
            )
        except spla.ArpackNoConvergence as exc:
            raise SolverError(
                f"shift-invert converged only {len(exc.eigenvalues)} of "
                f"{k_req} pairs within {maxiter} restarts",
                n_converged=len(exc.eigenvalues),
            ) from exc
        except RuntimeError as exc:
            if "singular" in str(exc).lower():
                last_singular = exc
                continue
            raise SolverError(f"shift-invert failed: {exc}") from exc
        note = () if sigma == target else (
            f"shift nudged from {target!r} to {sigma!r} after a singular "
            "factorization",
        )
        return energies, vectors, note
    raise SolverError(
        "factorization of H - sigma*I stayed singular through all nudges; "
        f"try a target shifted away from {target!r}"
    ) from last_singular


def interior_pairs(matrix: SparseSymmetric, target: float, k: int,
                   tol: float = RESIDUAL_TOL_DEFAULT,
                   seed: int = V0_SEED_DEFAULT, budget: int = 50,
                   dense_cap: int = DENSE_CAP_DEFAULT) -> Spectrum:
    """The k eigenpairs nearest `target`, energies ascending, vectors included.

    Uses shift-invert Lanczos with a sparse LU of H - target*I; a dense
    solve stands in when k is a large fraction of the dimension or the
    matrix is tiny. `budget` is the iteration allowance in matrix-solve
    equivalents per requested pair.
    """
    dim = matrix.dim
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    if k > dim:
        raise ValueError(f"k={k} exceeds dim={dim}")
    notes = ()
    if dim < 64 or k > dim // 2:
        energies_all, vectors_all = _interior_dense(matrix, target, k, dense_cap)
    else:
        k_req = min(k + _PAD, dim - 1)
        energies_all, vectors_all, notes = _interior_arpack(
            matrix, target, k_req, seed, budget
        )
        order = np.argsort(energies_all, kind="stable")
        energies_all = energies_all[order]
        vectors_all = vectors_all[:, order]

    dist = np.abs(energies_all - target)
    nearest = np.argsort(dist, kind="stable")
    picked = np.sort(nearest[:k])
    if energies_all.shape[0] > k:
        d_in, d_out = dist[nearest[k - 1]], dist[nearest[k]]
        if math.isclose(d_in, d_out, rel_tol=1e-12, abs_tol=1e-12):
            notes = notes + (
                f"distance tie at the window edge: |E-target| = {d_in!r} for "
                "both the last kept and first dropped pair",
            )
    energies = energies_all[picked]
    vectors = _canonical_signs(np.ascontiguousarray(vectors_all[:, picked]))

    achieved = verify_residuals(matrix, energies, vectors)
    if achieved > tol:
        raise SolverError(
            f"residual check failed: {achieved:.3e} > {tol:.3e} relative",
            n_converged=0,
        )
    return Spectrum(energies, vectors, "interior", dim, target=float(target),
                    residual_tol=achieved, notes=notes)


def extremal_energies(matrix: SparseSymmetric,
                      tol: float = RESIDUAL_TOL_DEFAULT,
                      seed: int = V0_SEED_DEFAULT) -> tuple:
    """(E_min, E_max) computed iteratively; no dense copy above tiny sizes."""
    dim = matrix.dim
    if dim < 64:
        energies = sla.eigh(matrix.dense(), eigvals_only=True, check_finite=False)
        return float(energies[0]), float(energies[-1])
    A = matrix.full_csr()
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    out = []
    for which in ("SA", "LA"):
        try:
            energies, vectors = spla.eigsh(
                A, k=1, which=which, v0=v0, ncv=min(dim, 96), tol=0
            )
        except spla.ArpackNoConvergence as exc:
            raise SolverError(
                f"extremal ({which}) did not converge",
                n_converged=len(exc.eigenvalues),
            ) from exc
        achieved = verify_residuals(matrix, energies, vectors)
        if achieved > tol:
            raise SolverError(
                f"extremal ({which}) residual {achieved:.3e} exceeds {tol:.3e}"
            )
        out.append(float(energies[0]))
    e_min, e_max = out
    if e_min > e_max:
        raise SolverError(f"extremal solve inconsistent: {e_min} > {e_max}")
    return e_min, e_max


# -- spectrum cache ------------------------------------------------------
#
# Layout, all little-endian:
#   bytes 0..7    magic "BHSPEC1\0"
#   header        L, N int64; J, U, F float64; kind uint8; has_vectors uint8;
#                 count int64; dim int64; target float64 (NaN if none);
#                 residual_tol float64
#   payload       count float64 energies, then (if has_vectors) count rows of
#                 dim float64, one eigenvector per row
# A JSON sidecar at <path>.json repeats the metadata and carries a SHA-256
# of the binary file; loading verifies it unless told not to.

_MAGIC = b"BHSPEC1\0"
_HEADER = struct.Struct("<qqdddBBqqdd")
_KIND_CODE = {"full": 0, "interior": 1, "extremal": 2}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}


def sidecar_path(path) -> str:
    return str(path) + ".json"


def save_spectrum(path, spectrum: Spectrum, params: ModelParams,
                  solver_info: dict | None = None) -> dict:
    """Write the binary cache and its JSON sidecar; returns the sidecar dict."""
    if spectrum.kind not in _KIND_CODE:
        raise ValueError(f"unknown spectrum kind {spectrum.kind!r}")
    target = float("nan") if spectrum.target is None else float(spectrum.target)
    header = _HEADER.pack(
        params.L, params.N, params.J, params.U, params.F,
        _KIND_CODE[spectrum.kind], 1 if spectrum.vectors is not None else 0,
        spectrum.count, spectrum.dim, target, float(spectrum.residual_tol),
    )
    blob = bytearray()
    blob += _MAGIC
    blob += header
    blob += spectrum.energies.astype("<f8").tobytes()
    if spectrum.vectors is not None:
        blob += np.ascontiguousarray(spectrum.vectors.T, dtype="<f8").tobytes()
    blob = bytes(blob)

    tmp = str(path) + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(blob)
    os.replace(tmp, path)

    meta = {
        "format": "BHSPEC1",
        "L": params.L, "N": params.N,
        "J": params.J, "U": params.U, "F": params.F,
        "kind": spectrum.kind,
        "count": spectrum.count,
        "dim": spectrum.dim,
        "has_vectors": spectrum.vectors is not None,
        "target": None if spectrum.target is None else float(spectrum.target),
        "residual_tol": None if math.isnan(spectrum.residual_tol)
                        else float(spectrum.residual_tol),
        "notes": list(spectrum.notes),
        "solver": solver_info or {},
        "byte_length": len(blob),
        "sha256": hashlib.sha256(blob).hexdigest(),
    }
    tmp = sidecar_path(path) + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, sidecar_path(path))
    return meta


def load_spectrum(path, verify: bool = True):
    """Read a cache file back into (Spectrum, ModelParams).

    With `verify` (default) the sidecar must exist, its checksum must match
    the binary bytes, and its metadata must agree with the binary header;
    any mismatch raises IntegrityError.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(_MAGIC)] != _MAGIC:
        raise IntegrityError(f"{path}: bad magic bytes, not a spectrum cache")
    try:
        (L, N, J, U, F, kind_code, has_vectors, count, dim, target,
         residual_tol) = _HEADER.unpack_from(blob, len(_MAGIC))
    except struct.error as exc:
        raise IntegrityError(f"{path}: truncated header") from exc
    if kind_code not in _CODE_KIND:
        raise IntegrityError(f"{path}: unknown kind code {kind_code}")
    offset = len(_MAGIC) + _HEADER.size
    expect = offset + 8 * count + (8 * count * dim if has_vectors else 0)
    if len(blob) != expect:
        raise IntegrityError(
            f"{path}: payload length {len(blob)} != expected {expect}"
        )
    meta = None
    if verify:
        try:
            with open(sidecar_path(path)) as fh:
                meta = json.load(fh)
        except FileNotFoundError as exc:
            raise IntegrityError(f"{path}: sidecar missing") from exc
        except json.JSONDecodeError as exc:
            raise IntegrityError(f"{path}: sidecar is not valid JSON") from exc
        if meta.get("sha256") != hashlib.sha256(blob).hexdigest():
            raise IntegrityError(f"{path}: checksum mismatch against sidecar")
        claimed = (meta.get("L"), meta.get("N"), meta.get("J"), meta.get("U"),
                   meta.get("F"), meta.get("kind"), meta.get("count"),
                   meta.get("dim"))
        actual = (L, N, J, U, F, _CODE_KIND[kind_code], count, dim)
        if claimed != actual:
            raise IntegrityError(
                f"{path}: sidecar metadata {claimed} != header {actual}"
            )

    energies = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
    offset += 8 * count
    vectors = None
    if has_vectors:
        flat = np.frombuffer(blob, dtype="<f8", count=count * dim, offset=offset)
        vectors = flat.reshape(count, dim).T.copy()
    notes = tuple(meta.get("notes", ())) if meta else ()
    spectrum = Spectrum(
        energies.copy(), vectors, _CODE_KIND[kind_code], dim,
        target=None if math.isnan(target) else target,
        residual_tol=residual_tol, notes=notes,
    )
    params = ModelParams(L, N, J, U, F)
    return spectrum, params
