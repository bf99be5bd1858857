"""Independent oracles used across the test modules.

Everything here is built from first principles (itertools enumeration,
plain loops) so the package's vectorized implementations are checked
against code that shares none of their machinery.
"""

import itertools
import math

import numpy as np


def enumerate_states(L, N):
    """All occupation tuples summing to N, descending lexicographic."""
    states = [s for s in itertools.product(range(N + 1), repeat=L)
              if sum(s) == N]
    states.sort(reverse=True)
    return states


def brute_hamiltonian(L, N, J, U, F):
    """Dense Hamiltonian assembled state by state from the definition."""
    states = enumerate_states(L, N)
    index = {s: i for i, s in enumerate(states)}
    offsets = [j - (L + 1) / 2.0 for j in range(1, L + 1)]
    dim = len(states)
    H = np.zeros((dim, dim))
    for s, occ in enumerate(states):
        H[s, s] = sum(0.5 * U * n * (n - 1) + F * o * n
                      for n, o in zip(occ, offsets))
        for j in range(L - 1):
            if occ[j] == 0:
                continue
            hopped = list(occ)
            hopped[j] -= 1
            hopped[j + 1] += 1
            t = index[tuple(hopped)]
            amp = -J * math.sqrt(occ[j] * (occ[j + 1] + 1))
            H[s, t] += amp
            H[t, s] += amp
    return H, states


def ratio_loop(energies, floor):
    """Loop-built spacing ratios; returns (ratios, dropped)."""
    s = np.diff(np.sort(np.asarray(energies, dtype=float)))
    ratios, dropped = [], 0
    for a, b in zip(s[:-1], s[1:]):
        lo = min(a, b)
        if lo < floor or lo <= 0.0:
            dropped += 1
            continue
        ratios.append(lo / max(a, b))
    return np.array(ratios), dropped


def d1_loop(column, dim):
    """Shannon fractal dimension of one vector, plain loop."""
    total = 0.0
    for c in column:
        p = float(c) * float(c)
        if p > 0.0:
            total -= p * math.log(p)
    return total / math.log(dim)


def dq_loop(column, q, dim):
    """Renyi fractal dimension for finite q != 1, plain loop."""
    p = np.asarray(column, dtype=float) ** 2
    return -math.log(float(np.sum(p ** q))) / ((q - 1) * math.log(dim))
