"""Fock basis of N bosons on L sites: enumeration, ranking, unranking.

States are occupation vectors (n_1, ..., n_L) with n_j >= 0 and sum N.
The fixed total order is descending lexicographic on (n_1, ..., n_L), so
(N, 0, ..., 0) has index 0 and (0, ..., 0, N) has index dim - 1. Ranking
uses closed-form prefix sums of binomial counts, O(L) per query, instead
of a hash map over the full basis.
"""

import hashlib
import math

import numpy as np

from .errors import CapacityError

_INDEX_MAX = 2**63 - 1


def dimension(L: int, N: int) -> int:
    """Hilbert-space dimension C(N + L - 1, N) for N bosons on L sites.

    Computed exactly with integer arithmetic; raises CapacityError if the
    result does not fit a signed 64-bit index.
    """
    if L < 1:
        raise ValueError(f"need at least one site, got L={L}")
    if N < 0:
        raise ValueError(f"negative particle number N={N}")
    dim = math.comb(N + L - 1, N)
    if dim > _INDEX_MAX:
        raise CapacityError(
            f"basis dimension C({N + L - 1},{N}) = {dim} exceeds 64-bit index range"
        )
    return dim


def _occupation_dtype(N: int):
    if N <= np.iinfo(np.int8).max:
        return np.int8
    if N <= np.iinfo(np.int16).max:
        return np.int16
    return np.int64


class BasisTable:
    """Immutable rank/unrank table for the (L, N) Fock basis.

    Attributes
    ----------
    L, N : int
        Site and particle count.
    dim : int
        Number of basis states, C(N + L - 1, N).

    The table is safe to share across threads or worker processes after
    construction.
    """

    def __init__(self, L: int, N: int):
        self.L = int(L)
        self.N = int(N)
        self.dim = dimension(self.L, self.N)
        # counts_pad[l, n + 1] = number of states of n bosons on l sites,
        # counts_pad[l, 0] = 0 (acts as the n = -1 entry for prefix sums).
        pad = np.zeros((self.L + 1, self.N + 2), dtype=np.int64)
        for l in range(1, self.L + 1):
            for n in range(self.N + 1):
                c = math.comb(n + l - 1, n)
                if c > _INDEX_MAX:
                    raise CapacityError(
                        f"binomial table entry C({n + l - 1},{n}) overflows 64-bit"
                    )
                pad[l, n + 1] = c
        self._counts_pad = pad
        self._occupations = None

    # -- scalar queries -------------------------------------------------

    def _nstates(self, l: int, n: int) -> int:
        """Number of Fock states of n bosons on l sites (0 for n < 0)."""
        return int(self._counts_pad[l, n + 1]) if n >= -1 else 0

    def rank(self, state) -> int:
        """Index of an occupation vector in the descending-lex ordering."""
        occ = np.asarray(state)
        if occ.shape != (self.L,):
            raise ValueError(f"state has length {occ.shape}, expected ({self.L},)")
        if np.any(occ < 0):
            raise ValueError("negative occupation number")
        if int(occ.sum()) != self.N:
            raise ValueError(
                f"occupations sum to {int(occ.sum())}, expected N={self.N}"
            )
        r = 0
        remaining = self.N
        for j in range(self.L - 1):
            n_j = int(occ[j])
            # states whose value at slot j exceeds n_j come first
            r += self._nstates(self.L - j, remaining - n_j - 1)
            remaining -= n_j
        return r

    def unrank(self, index: int) -> np.ndarray:
        """Occupation vector at a given index (inverse of rank)."""
        i = int(index)
        if not 0 <= i < self.dim:
            raise ValueError(f"index {i} outside [0, {self.dim})")
        occ = np.zeros(self.L, dtype=np.int64)
        remaining = self.N
        for j in range(self.L - 1):
            for v in range(remaining, -1, -1):
                block = self._nstates(self.L - j - 1, remaining - v)
                if i < block:
                    occ[j] = v
                    remaining -= v
                    break
                i -= block
        occ[self.L - 1] = remaining
        return occ

    # -- bulk enumeration -----------------------------------------------

    def occupations(self) -> np.ndarray:
        """All basis states as a (dim, L) integer array in index order.

        Built once and cached; the array is read-only.
        """
        if self._occupations is None:
            self._occupations = self._enumerate()
            self._occupations.setflags(write=False)
        return self._occupations

    def _enumerate(self) -> np.ndarray:
        dtype = _occupation_dtype(self.N)
        # blocks[n] = all states of n bosons on the current number of sites
        blocks = {n: np.full((1, 1), n, dtype=dtype) for n in range(self.N + 1)}
        for l in range(2, self.L + 1):
            wanted = range(self.N + 1) if l < self.L else (self.N,)
            new = {}
            for n in wanted:
                parts = []
                for v in range(n, -1, -1):
                    tail = blocks[n - v]
                    head = np.full((tail.shape[0], 1), v, dtype=dtype)
                    parts.append(np.hstack((head, tail)))
                new[n] = np.vstack(parts)
            blocks = new
        out = blocks[self.N]
        assert out.shape == (self.dim, self.L)
        return out

    def ordering_hash(self) -> str:
        """SHA-256 over the serialized enumeration; stable across runs."""
        h = hashlib.sha256()
        h.update(f"fock:{self.L}:{self.N}:".encode())
        occ = self.occupations()
        for start in range(0, occ.shape[0], 1 << 16):
            h.update(np.ascontiguousarray(occ[start : start + (1 << 16)], dtype=np.int64).tobytes())
        return h.hexdigest()

    def __repr__(self):
        return f"BasisTable(L={self.L}, N={self.N}, dim={self.dim})"
