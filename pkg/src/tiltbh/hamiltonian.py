"""Sparse assembly of the tilted Bose-Hubbard Hamiltonian in the Fock basis.

H = -J sum_j (b+_j b_{j+1} + h.c.) + (U/2) sum_j n_j (n_j - 1)
    + F sum_j (j - (L+1)/2) n_j

with hard-wall boundaries (no bond between site L and site 1) and the tilt
antisymmetric about the lattice centre. Only the strict upper triangle of
the hopping term is stored; the diagonal is kept separately. A hop moves
one boson from site j to j+1 with amplitude -J*sqrt(n_j*(n_{j+1}+1)); the
reverse hop is the implied symmetric partner.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import BasisTable
from .errors import ParityMixingWarning


@dataclass(frozen=True)
class ModelParams:
    """One Hamiltonian instance: sites, bosons, and coupling strengths."""

    L: int
    N: int
    J: float
    U: float
    F: float

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"need L >= 2 for the hopping term, got L={self.L}")
        if self.N < 0:
            raise ValueError(f"negative particle number N={self.N}")
        for name in ("J", "U", "F"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name}={value} must be finite and non-negative")


def site_offsets(L: int) -> np.ndarray:
    """Tilt offsets j - (L+1)/2 for j = 1..L; they sum to zero exactly."""
    return np.arange(1, L + 1, dtype=np.float64) - (L + 1) / 2.0


def diagonal_energy(state, params: ModelParams) -> float:
    """Interaction plus tilt energy of a single occupation vector."""
    occ = np.asarray(state, dtype=np.float64)
    if occ.shape != (params.L,):
        raise ValueError(f"state has shape {occ.shape}, expected ({params.L},)")
    if np.any(occ < 0) or occ.sum() != params.N:
        raise ValueError("state violates the (L, N) occupation invariants")
    interaction = 0.5 * params.U * np.sum(occ * (occ - 1.0))
    tilt = params.F * np.dot(site_offsets(params.L), occ)
    return float(interaction + tilt)


class SparseSymmetric:
    """Real symmetric sparse matrix stored as diagonal + strict upper triangle.

    `rows`, `cols`, `vals` hold the upper-triangle entries (rows < cols);
    the symmetric partners are implied. Immutable after construction and
    safe for concurrent reads.
    """

    def __init__(self, diag: np.ndarray, rows: np.ndarray, cols: np.ndarray,
                 vals: np.ndarray):
        self.dim = int(diag.shape[0])
        self.diag = np.ascontiguousarray(diag, dtype=np.float64)
        self.rows = np.ascontiguousarray(rows, dtype=np.int32)
        self.cols = np.ascontiguousarray(cols, dtype=np.int32)
        self.vals = np.ascontiguousarray(vals, dtype=np.float64)
        for arr in (self.diag, self.rows, self.cols, self.vals):
            arr.setflags(write=False)
        self._upper = None
        self._full = None

    @property
    def nnz_offdiag(self) -> int:
        return self.vals.shape[0]

    def upper_csr(self) -> sp.csr_matrix:
        """Strict upper triangle as CSR (cached)."""
        if self._upper is None:
            self._upper = sp.coo_matrix(
                (self.vals, (self.rows, self.cols)), shape=(self.dim, self.dim)
            ).tocsr()
        return self._upper

    def full_csr(self) -> sp.csr_matrix:
        """Full symmetric matrix as CSR (cached), for factorizing solvers."""
        if self._full is None:
            upper = self.upper_csr()
            self._full = upper + upper.T + sp.diags(self.diag)
            self._full = self._full.tocsr()
        return self._full

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Matrix-vector product H @ v expanding both symmetric halves.

        The traversal order (diagonal, upper, lower) is fixed, so repeated
        calls on identical inputs are bit-reproducible.
        """
        v = np.asarray(vector, dtype=np.float64)
        if v.shape[0] != self.dim:
            raise ValueError(f"vector length {v.shape[0]} != dim {self.dim}")
        upper = self.upper_csr()
        out = self.diag * v.T
        out = out.T + upper @ v + upper.T @ v
        return out

    def dense(self) -> np.ndarray:
        """Dense float64 copy (both triangles)."""
        out = np.zeros((self.dim, self.dim), dtype=np.float64)
        out[self.rows, self.cols] = self.vals
        out += out.T
        out[np.diag_indices(self.dim)] = self.diag
        return out

    def one_norm_estimate(self) -> float:
        """Exact 1-norm (max absolute column sum) of the full matrix."""
        col_sums = np.abs(self.diag).copy()
        np.add.at(col_sums, self.cols, np.abs(self.vals))
        np.add.at(col_sums, self.rows, np.abs(self.vals))
        return float(col_sums.max()) if self.dim else 0.0

    def trace(self) -> float:
        return float(self.diag.sum())

    def dump_coo(self, path):
        """Diagnostic-only text dump: one `row col value` line per stored entry."""
        with open(path, "w") as fh:
            for i in range(self.dim):
                fh.write(f"{i} {i} {self.diag[i]:.17g}\n")
            for r, c, v in zip(self.rows, self.cols, self.vals):
                fh.write(f"{r} {c} {v:.17g}\n")


def diagonal_energies(table: BasisTable, params: ModelParams) -> np.ndarray:
    """Diagonal (interaction + tilt) energies for every basis state."""
    occ = table.occupations().astype(np.float64, copy=False)
    diag = 0.5 * params.U * np.sum(occ * (occ - 1.0), axis=1)
    diag += params.F * (occ @ site_offsets(params.L))
    return diag


def assemble(params: ModelParams, table: BasisTable) -> SparseSymmetric:
    """Build the Hamiltonian matrix of one parameter set over a basis table.

    Hop targets are located without per-state rank queries: moving a boson
    from site j to j+1 changes the combinatorial rank by a single binomial
    difference that depends only on the occupations at slot j, which lets
    the whole triangle be produced with vectorized lookups.
    """
    if (params.L, params.N) != (table.L, table.N):
        raise ValueError(
            f"params ({params.L},{params.N}) do not match table ({table.L},{table.N})"
        )
    if params.F == 0.0:
        warnings.warn(
            "F = 0 restores parity symmetry; pooled level statistics will mix "
            "the two parity sectors",
            ParityMixingWarning,
            stacklevel=2,
        )

    diag = diagonal_energies(table, params)
    dim, L = table.dim, table.L
    if dim > np.iinfo(np.int32).max:
        from .errors import CapacityError

        raise CapacityError(f"dim={dim} exceeds 32-bit entry indexing for assembly")

    if params.J == 0.0:
        empty = np.empty(0)
        return SparseSymmetric(diag, empty, empty, empty)

    occ = table.occupations()
    counts_pad = table._counts_pad
    # remaining[i, j] = bosons left to place at slot j and beyond
    csum = np.cumsum(occ, axis=1, dtype=np.int64)
    all_rows, all_cols, all_vals = [], [], []
    indices = np.arange(dim, dtype=np.int64)
    for j in range(L - 1):
        n_j = occ[:, j].astype(np.int64)
        hop = n_j > 0
        if not np.any(hop):
            continue
        remaining = table.N - (csum[:, j - 1] if j > 0 else 0)
        gap = (remaining - n_j)[hop]  # >= 0
        # rank shift of the hopped state: one binomial difference at slot j
        delta = counts_pad[L - j, gap + 1] - counts_pad[L - j, gap]
        rows = indices[hop]
        amp = -params.J * np.sqrt(
            n_j[hop].astype(np.float64) * (occ[hop, j + 1].astype(np.float64) + 1.0)
        )
        all_rows.append(rows)
        all_cols.append(rows + delta)
        all_vals.append(amp)

    if all_rows:
        rows = np.concatenate(all_rows)
        cols = np.concatenate(all_cols)
        vals = np.concatenate(all_vals)
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
    else:
        rows = cols = vals = np.empty(0)
    return SparseSymmetric(diag, rows, cols, vals)
