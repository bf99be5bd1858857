"""Spectral and eigenvector statistics: spacing ratios, KL divergence
against the orthogonal-ensemble law, rescaled energies, energy-bin
aggregation, generalized fractal dimensions, and reference values.

No spectral unfolding happens anywhere in this module. The ratio statistic
r_n = min(s_{n+1}/s_n, s_n/s_{n+1}) is used precisely because it compares
consecutive spacings locally and needs no unfolding procedure.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import xlogy

# folded-ratio references for the orthogonal ensemble and the Poisson limit
MEAN_R_ANALYTIC = 4.0 - 2.0 * math.sqrt(3.0)  # from the 3x3 surmise density
MEAN_R_NUMERIC = 0.5307                       # large-matrix benchmark value
POISSON_MEAN_R = 2.0 * math.log(2.0) - 1.0
EULER_GAMMA = 0.5772156649015328606

RATIO_BINS = 25
RATIO_BIN_WIDTH = 0.04
DEGENERACY_FLOOR_DEFAULT = 1e-12


def goe_r_density(r):
    """Surmise density (27/4)(r + r^2)/(1 + r + r^2)^{5/2} on r in [0, 1].

    Normalized to unit mass on [0, 1] for the folded ratio min(s'/s, s/s').
    Accepts scalars or arrays.
    """
    r = np.asarray(r, dtype=np.float64)
    out = 6.75 * (r + r * r) / (1.0 + r + r * r) ** 2.5
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=16)
def goe_bin_masses(n_bins: int = RATIO_BINS, mode: str = "quadrature") -> np.ndarray:
    """Reference probability mass of each uniform ratio bin on [0, 1].

    "quadrature" integrates the density over each bin to 1e-10 or better;
    "midpoint" multiplies the midpoint density by the bin width, matching
    the cruder discretization some analyses use.
    """
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    if mode == "quadrature":
        masses = np.array([
            quad(goe_r_density, edges[i], edges[i + 1], epsabs=1e-12, epsrel=1e-12)[0]
            for i in range(n_bins)
        ])
    elif mode == "midpoint":
        mid = 0.5 * (edges[:-1] + edges[1:])
        masses = goe_r_density(mid) * np.diff(edges)
    else:
        raise ValueError(f"unknown reference mode {mode!r}")
    masses.setflags(write=False)
    return masses


def kl_divergence(hist, mode: str = "quadrature", reference=None) -> float:
    """Discrete KL divergence sum p_i ln(p_i / q_i) of a ratio histogram.

    `hist` is a probability mass function over uniform bins on [0, 1];
    the reference masses default to the orthogonal-ensemble law binned
    the same way. Empty bins contribute zero.
    """
    p = np.asarray(hist, dtype=np.float64)
    q = np.asarray(reference if reference is not None
                   else goe_bin_masses(p.shape[0], mode))
    if p.shape != q.shape:
        raise ValueError(f"histogram {p.shape} and reference {q.shape} differ")
    pos = p > 0
    return float(np.sum(p[pos] * (np.log(p[pos]) - np.log(q[pos]))))


@dataclass(frozen=True)
class RatioStats:
    """Consecutive-spacing ratios and their summary statistics.

    `histogram` is the 25-bin probability mass function over [0, 1] with
    bin width 0.04; `degenerate_dropped` counts ratio pairs discarded
    because one of their spacings fell below the degeneracy floor.
    """

    ratios: np.ndarray
    mean_r: float
    histogram: np.ndarray
    kl_to_goe: float
    degenerate_dropped: int

    @property
    def n_ratios(self) -> int:
        return int(self.ratios.shape[0])


def spacing_ratios(energies, degeneracy_floor: float = DEGENERACY_FLOOR_DEFAULT,
                   kl_mode: str = "quadrature") -> RatioStats:
    """Ratio statistics r_n = min(s_{n+1}/s_n, s_n/s_{n+1}) of a sorted spectrum.

    Spacings below degeneracy_floor times the mean spacing make the ratio
    ill-defined; both ratios touching such a spacing are dropped and
    counted. Requires at least 3 levels.
    """
    e = np.asarray(energies, dtype=np.float64)
    if e.ndim != 1 or e.shape[0] < 3:
        raise ValueError(f"need a vector of at least 3 levels, got shape {e.shape}")
    s = np.diff(e)
    if np.any(s < 0):
        raise ValueError("energies must be sorted ascending")
    floor = degeneracy_floor * float(s.mean())
    lo = np.minimum(s[:-1], s[1:])
    hi = np.maximum(s[:-1], s[1:])
    keep = (lo >= floor) & (lo > 0)
    ratios = lo[keep] / hi[keep]
    dropped = int(np.count_nonzero(~keep))
    counts, _ = np.histogram(ratios, bins=RATIO_BINS, range=(0.0, 1.0))
    if ratios.size:
        pmf = counts / ratios.size
        mean_r = float(ratios.mean())
        kl = kl_divergence(pmf, mode=kl_mode)
    else:
        pmf = counts.astype(np.float64)
        mean_r = float("nan")
        kl = float("nan")
    pmf.setflags(write=False)
    ratios.setflags(write=False)
    return RatioStats(ratios, mean_r, pmf, kl, dropped)


def rescaled_energy(E, e_min: float, e_max: float):
    """Map energies to epsilon = (E - E_min)/(E_max - E_min) in [0, 1].

    Values outside the range by at most 1e-12 (in epsilon units) are
    clamped; beyond that the input is rejected. A spectrum whose width is
    degenerate at the scale of its endpoints cannot be rescaled.
    """
    width = e_max - e_min
    if not width > 1e-12 * max(1.0, abs(e_min), abs(e_max)):
        raise ValueError(f"spectrum width {width!r} too small to rescale")
    eps = (np.asarray(E, dtype=np.float64) - e_min) / width
    if np.any(eps < -1e-12) or np.any(eps > 1.0 + 1e-12):
        raise ValueError("energy outside [E_min, E_max] beyond slack")
    eps = np.clip(eps, 0.0, 1.0)
    return float(eps) if eps.ndim == 0 else eps


def inner_fraction(energies, fraction: float = 0.8) -> np.ndarray:
    """Central part of a sorted spectrum, dropping the two tails.

    Drops floor((1 - fraction)/2 * count) levels from each end; fraction 1
    is the identity.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    e = np.asarray(energies)
    # the 1e-9 guard keeps float round-off (e.g. 0.2/2*10 = 0.99999...) from
    # flooring one level short of the intended count
    drop = int(math.floor((1.0 - fraction) / 2.0 * e.shape[0] + 1e-9))
    out = e[drop: e.shape[0] - drop]
    if out.size == 0:
        raise ValueError("selection left no levels")
    return out


# -- generalized fractal dimensions ---------------------------------------

def _check_intensities(p: np.ndarray):
    if np.any(p < 0):
        raise ValueError("negative intensity")
    sums = p.sum(axis=0)
    if np.any(np.abs(sums - 1.0) > 1e-10):
        worst = float(np.abs(sums - 1.0).max())
        raise ValueError(f"intensities deviate from unit sum by {worst:.3e}")


def _gfd_columns(p: np.ndarray, q: float, log_dim: float) -> np.ndarray:
    """D_q for each column of a (dim, n) intensity block, no input checks."""
    if q == 1.0:
        val = -xlogy(p, p).sum(axis=0) / log_dim
    elif math.isinf(q):
        val = -np.log(p.max(axis=0)) / log_dim
    else:
        val = -np.log((p ** q).sum(axis=0)) / ((q - 1.0) * log_dim)
    if q >= 1.0:
        # analytically in [0, 1]; shave off float round-off at the edges
        val = np.clip(val, 0.0, 1.0)
    return val


def gfd(intensities, q: float, dim: int) -> float:
    """Generalized fractal dimension of one normalized intensity vector.

    q = 1 uses the Shannon-entropy limit with 0 ln 0 := 0; q = inf uses the
    maximum intensity alone; other q use the direct Renyi form. `dim` sets
    the ln(D) normalization and is usually the basis dimension.
    """
    if dim < 2:
        raise ValueError(f"need dim >= 2, got {dim}")
    p = np.asarray(intensities, dtype=np.float64).reshape(-1, 1)
    _check_intensities(p)
    return float(_gfd_columns(p, float(q), math.log(dim))[0])


@dataclass(frozen=True)
class GfdStats:
    """Per-state fractal dimensions and their mean/variance, per exponent q.

    Keys of the dicts are the q values (math.inf for the max-intensity
    limit). `basis_dim` is the D used inside the logarithms.
    """

    q_values: tuple
    per_state: dict
    mean: dict
    variance: dict
    basis_dim: int

    @property
    def n_states(self) -> int:
        q0 = self.q_values[0]
        return int(self.per_state[q0].shape[0])


def gfd_stats(vectors: np.ndarray, q_values=(1.0, 2.0, math.inf),
              dim: int | None = None, chunk: int = 256,
              check: bool = True) -> GfdStats:
    """GfdStats over eigenvector columns.

    `dim` defaults to the vector length; pass the full basis dimension
    explicitly when the columns live in a larger space.
    """
    if vectors.ndim != 2:
        raise ValueError("vectors must be a (dim, n_states) matrix")
    basis_dim = int(vectors.shape[0] if dim is None else dim)
    if basis_dim < 2:
        raise ValueError(f"need dim >= 2, got {basis_dim}")
    qs = tuple(float(q) for q in q_values)
    log_dim = math.log(basis_dim)
    n = vectors.shape[1]
    per = {q: np.empty(n) for q in qs}
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        p = vectors[:, start:stop].astype(np.float64) ** 2
        if check:
            _check_intensities(p)
        for q in qs:
            per[q][start:stop] = _gfd_columns(p, q, log_dim)
    mean = {q: float(per[q].mean()) for q in qs}
    var = {q: float(per[q].var(ddof=1)) if n > 1 else 0.0 for q in qs}
    for arr in per.values():
        arr.setflags(write=False)
    return GfdStats(qs, per, mean, var, basis_dim)


def goe_d1_prediction(dim: int) -> tuple:
    """Leading-order ensemble mean and variance of D_1 for GOE eigenvectors.

    mean = 1 - (2 - gamma - ln 2)/ln D and var = (3 pi^2 - 28)/(2 D ln^2 D),
    exactly as the leading orders read.
    """
    if dim < 8:
        raise ValueError(f"prediction needs dim >= 8, got {dim}")
    log_dim = math.log(dim)
    mean = 1.0 - (2.0 - EULER_GAMMA - math.log(2.0)) / log_dim
    var = (3.0 * math.pi ** 2 - 28.0) / (2.0 * dim * log_dim ** 2)
    return mean, var


@dataclass(frozen=True)
class GoeReference:
    """Benchmark constants for the orthogonal ensemble."""

    mean_r_analytic: float = MEAN_R_ANALYTIC
    mean_r_numeric: float = MEAN_R_NUMERIC
    euler_gamma: float = EULER_GAMMA

    def d1_mean(self, dim: int) -> float:
        return goe_d1_prediction(dim)[0]

    def d1_var(self, dim: int) -> float:
        return goe_d1_prediction(dim)[1]


# -- ensemble sampling -----------------------------------------------------

def sample_goe_vector(dim: int, seed) -> np.ndarray:
    """Intensities of one random unit vector (squared normalized Gaussians)."""
    if dim < 2:
        raise ValueError(f"need dim >= 2, got {dim}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    p = v * v
    return p / p.sum()


def sample_goe_gfd(dim: int, n_samples: int, q_values=(1.0, 2.0, math.inf),
                   seed=0, chunk: int = 128) -> dict:
    """Monte-Carlo D_q samples over random unit vectors, one array per q.

    Vectors are drawn in chunks from a single seeded generator, so the
    result is deterministic in (dim, n_samples, q_values, seed).
    """
    rng = np.random.default_rng(seed)
    qs = tuple(float(q) for q in q_values)
    out = {q: np.empty(n_samples) for q in qs}
    log_dim = math.log(dim)
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        block = rng.standard_normal((dim, m))
        p = block * block
        p /= p.sum(axis=0)
        for q in qs:
            out[q][done:done + m] = _gfd_columns(p, q, log_dim)
        done += m
    return out


def sample_goe_matrix(dim: int, seed) -> np.ndarray:
    """One dense GOE draw: exactly symmetric, off-diagonal variance 1/2.

    Built as (G + G^T)/2 from an i.i.d. standard-normal square matrix, so
    the diagonal variance is twice the off-diagonal one. The ratio
    statistics downstream do not depend on the overall scale.
    """
    if dim < 3:
        raise ValueError(f"need dim >= 3, got {dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim))
    return 0.5 * (g + g.T)


# -- energy-resolved aggregation -------------------------------------------

@dataclass(frozen=True)
class BinSummary:
    """Statistics of one rescaled-energy bin; empty when under 3 levels."""

    count: int
    ratio: RatioStats | None
    gfd: GfdStats | None

    @property
    def empty(self) -> bool:
        return self.ratio is None


@dataclass(frozen=True)
class EnergyBinning:
    """Uniform partition of epsilon in [0, 1] with per-bin statistics."""

    n_bins: int
    bin_edges: np.ndarray
    per_bin: list

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


def bin_by_energy(spectrum, n_bins: int = 100, q_values=(1.0,),
                  degeneracy_floor: float = DEGENERACY_FLOOR_DEFAULT,
                  kl_mode: str = "quadrature") -> EnergyBinning:
    """Aggregate a spectrum into rescaled-energy bins.

    Each level lands in exactly one of `n_bins` uniform epsilon bins;
    per-bin ratio statistics use only spacings internal to the bin, never
    spacings that straddle a bin edge. When the spectrum carries
    eigenvectors, per-bin fractal-dimension statistics are aggregated over
    the member states for every q in `q_values`. Bins holding fewer than 3
    levels are marked empty.
    """
    energies = np.asarray(spectrum.energies, dtype=np.float64)
    if energies.shape[0] < 3:
        raise ValueError("need at least 3 levels to bin")
    eps = rescaled_energy(energies, float(energies[0]), float(energies[-1]))
    idx = np.minimum((eps * n_bins).astype(np.int64), n_bins - 1)
    edges = np.linspace(0.0, 1.0, n_bins + 1)

    vectors = getattr(spectrum, "vectors", None)
    gfd_all = None
    if vectors is not None and len(q_values) > 0:
        gfd_all = gfd_stats(vectors, q_values, dim=spectrum.dim)

    starts = np.searchsorted(idx, np.arange(n_bins), side="left")
    ends = np.searchsorted(idx, np.arange(n_bins), side="right")
    summaries = []
    for b in range(n_bins):
        a, z = int(starts[b]), int(ends[b])
        count = z - a
        if count < 3:
            summaries.append(BinSummary(count, None, None))
            continue
        ratio = spacing_ratios(energies[a:z], degeneracy_floor, kl_mode)
        gfd_bin = None
        if gfd_all is not None:
            per = {q: gfd_all.per_state[q][a:z] for q in gfd_all.q_values}
            mean = {q: float(v.mean()) for q, v in per.items()}
            var = {q: float(v.var(ddof=1)) for q, v in per.items()}
            gfd_bin = GfdStats(gfd_all.q_values, per, mean, var, gfd_all.basis_dim)
        summaries.append(BinSummary(count, ratio, gfd_bin))
    edges.setflags(write=False)
    return EnergyBinning(n_bins, edges, summaries)
