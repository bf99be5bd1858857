import math

import numpy as np
import pytest
from scipy import integrate

from helpers import d1_loop, dq_loop, ratio_loop
from tiltbh.statistics import (MEAN_R_ANALYTIC, MEAN_R_NUMERIC,
                               POISSON_MEAN_R, EnergyBinning, bin_by_energy,
                               gfd, gfd_stats, goe_bin_masses,
                               goe_d1_prediction, goe_r_density,
                               inner_fraction, kl_divergence, rescaled_energy,
                               sample_goe_gfd, sample_goe_matrix,
                               sample_goe_vector, spacing_ratios)


def test_goe_density_normalized_and_positive():
    total, err = integrate.quad(goe_r_density, 0.0, 1.0, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-10)
    r = np.linspace(0.0, 1.0, 101)
    assert np.all(goe_r_density(r) >= 0.0)


def test_goe_density_mean_is_the_surmise():
    mean, err = integrate.quad(lambda r: r * goe_r_density(r), 0.0, 1.0,
                               epsabs=1e-12)
    assert mean == pytest.approx(MEAN_R_ANALYTIC, abs=1e-9)  # 4 - 2*sqrt(3)
    # the large-matrix benchmark sits ~5e-3 below the 3x3 surmise value
    assert abs(MEAN_R_ANALYTIC - MEAN_R_NUMERIC) < 6e-3


def test_goe_bin_masses_sum_to_one():
    for mode in ("quadrature", "midpoint"):
        masses = goe_bin_masses(25, mode)
        assert masses.shape == (25,)
        assert masses.sum() == pytest.approx(1.0, abs=2e-3 if mode == "midpoint" else 1e-10)
    with pytest.raises(ValueError):
        goe_bin_masses(25, "simpson")


def test_kl_divergence_zero_against_itself():
    q = goe_bin_masses(25, "quadrature")
    assert kl_divergence(q) == pytest.approx(0.0, abs=1e-12)
    # empty bins contribute nothing; mass elsewhere raises the divergence
    p = np.zeros(25)
    p[0] = 1.0
    assert kl_divergence(p) > 1.0


def test_spacing_ratios_match_loop_oracle(rng):
    energies = np.sort(rng.standard_normal(400))
    stats = spacing_ratios(energies)
    floor = 1e-12 * np.diff(energies).mean()
    expected, dropped = ratio_loop(energies, floor)
    assert np.allclose(stats.ratios, expected, rtol=0, atol=1e-15)
    assert stats.degenerate_dropped == dropped
    assert stats.mean_r == pytest.approx(expected.mean(), rel=1e-12)
    assert stats.histogram.sum() == pytest.approx(1.0, abs=1e-12)


def test_spacing_ratios_poisson_limit(rng):
    # i.i.d. exponential spacings give <r> = 2 ln 2 - 1
    levels = np.cumsum(rng.exponential(size=200_000))
    stats = spacing_ratios(levels)
    assert stats.mean_r == pytest.approx(POISSON_MEAN_R, abs=5e-3)


def test_spacing_ratios_drops_degenerate_pairs():
    energies = np.array([0.0, 1.0, 1.0, 2.0, 3.5])
    stats = spacing_ratios(energies)
    assert stats.degenerate_dropped == 2  # both pairs touching the zero spacing
    assert stats.ratios.shape[0] == 1


def test_spacing_ratios_all_degenerate_is_nan():
    stats = spacing_ratios(np.zeros(10))
    assert stats.ratios.shape[0] == 0
    assert math.isnan(stats.mean_r)
    assert math.isnan(stats.kl_to_goe)
    assert stats.degenerate_dropped == 8


def test_rescaled_energy_endpoints_and_monotonicity(rng):
    energies = np.sort(rng.standard_normal(50)) * 3.0
    eps = rescaled_energy(energies, energies[0], energies[-1])
    assert eps[0] == 0.0
    assert eps[-1] == 1.0
    assert np.all(np.diff(eps) >= 0.0)
    with pytest.raises(ValueError):
        rescaled_energy(np.array([-2.0, 5.0]), 0.0, 1.0)


def test_inner_fraction_counts():
    e = np.arange(10.0)
    assert inner_fraction(e, 0.8).shape[0] == 8  # exactly one from each end
    assert np.array_equal(inner_fraction(e, 0.8), e[1:9])
    assert inner_fraction(e, 1.0).shape[0] == 10
    big = np.arange(92378.0)
    assert inner_fraction(big, 0.8).shape[0] == 73904
    with pytest.raises(ValueError):
        inner_fraction(e, 0.0)


def test_gfd_limits():
    dim = 64
    localized = np.zeros(dim)
    localized[13] = 1.0
    uniform = np.full(dim, 1.0 / math.sqrt(dim))
    for q in (1.0, 2.0, math.inf):
        assert gfd(localized ** 2, q, dim) == pytest.approx(0.0, abs=1e-15)
        assert gfd(uniform ** 2, q, dim) == pytest.approx(1.0, abs=1e-12)


def test_gfd_matches_loop_oracles(rng):
    dim = 200
    p = sample_goe_vector(dim, rng)  # intensities, unit sum
    v = np.sqrt(p)
    assert gfd(p, 1.0, dim) == pytest.approx(d1_loop(v, dim), rel=1e-12)
    assert gfd(p, 2.0, dim) == pytest.approx(dq_loop(v, 2.0, dim), rel=1e-12)
    assert gfd(p, math.inf, dim) == pytest.approx(
        -math.log(p.max()) / math.log(dim), rel=1e-12)


def test_gfd_renyi_ordering(rng):
    # D_q is non-increasing in q for every state
    dim = 150
    for _ in range(20):
        p = sample_goe_vector(dim, rng)
        d1, d2, dinf = (gfd(p, q, dim) for q in (1.0, 2.0, math.inf))
        assert d1 >= d2 >= dinf
        assert 0.0 <= dinf and d1 <= 1.0


def test_gfd_stats_matches_scalar_calls(rng):
    dim = 120
    V = np.column_stack([np.sqrt(sample_goe_vector(dim, rng))
                         for _ in range(40)])
    stats = gfd_stats(V, (1.0, 2.0, math.inf), dim=dim)
    assert stats.n_states == 40
    for q in stats.q_values:
        per = np.array([gfd(V[:, i] ** 2, q, dim) for i in range(40)])
        assert np.allclose(stats.per_state[q], per, rtol=1e-12, atol=0)
        assert stats.mean[q] == pytest.approx(per.mean(), rel=1e-12)
        assert stats.variance[q] == pytest.approx(per.var(ddof=1), rel=1e-12)


def test_gfd_stats_rejects_unnormalized(rng):
    V = rng.standard_normal((50, 5))
    with pytest.raises(ValueError):
        gfd_stats(V, (1.0,), dim=50)


def test_goe_d1_prediction_reference_values():
    mean, var = goe_d1_prediction(92378)
    assert mean == pytest.approx(0.93618, abs=5e-5)
    assert var > 0.0
    m2, v2 = goe_d1_prediction(352716)
    assert m2 > mean and v2 < var
    with pytest.raises(ValueError):
        goe_d1_prediction(4)


def test_sample_goe_vector_statistics(rng):
    p = sample_goe_vector(4000, rng)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(p >= 0.0)
    mc = sample_goe_gfd(4000, 300, (1.0,), seed=7)
    mean, var = goe_d1_prediction(4000)
    assert mc[1.0].mean() == pytest.approx(mean, abs=3e-3)


def test_sample_goe_matrix_symmetric_and_seeded():
    a = sample_goe_matrix(80, 11)
    b = sample_goe_matrix(80, 11)
    c = sample_goe_matrix(80, 12)
    assert np.array_equal(a, a.T)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    # off-diagonal variance 1/2, diagonal variance 1
    off = a[np.triu_indices(80, 1)]
    assert off.var() == pytest.approx(0.5, rel=0.1)
    assert np.diag(a).var() == pytest.approx(1.0, rel=0.4)


def test_bin_by_energy_partitions_every_level(small_matrix):
    from tiltbh.eigensolve import full_spectrum
    _, _, matrix = small_matrix
    spectrum = full_spectrum(matrix)
    binning = bin_by_energy(spectrum, n_bins=6, q_values=(1.0,))
    assert isinstance(binning, EnergyBinning)
    assert sum(s.count for s in binning.per_bin) == spectrum.count
    for summary in binning.per_bin:
        if summary.empty:
            assert summary.count < 3
        else:
            assert summary.ratio.ratios.shape[0] <= max(summary.count - 2, 0)
            assert summary.gfd.n_states == summary.count


def test_bin_by_energy_ratios_never_straddle_edges(small_matrix):
    # a bin's ratio count uses only its own spacings: recompute per bin
    from tiltbh.eigensolve import full_spectrum
    _, _, matrix = small_matrix
    spectrum = full_spectrum(matrix, want_vectors=False)
    binning = bin_by_energy(spectrum, n_bins=5)
    eps = rescaled_energy(spectrum.energies, float(spectrum.energies[0]),
                          float(spectrum.energies[-1]))
    idx = np.minimum((eps * 5).astype(int), 4)
    for b, summary in enumerate(binning.per_bin):
        members = spectrum.energies[idx == b]
        assert summary.count == members.shape[0]
        if not summary.empty:
            expected = spacing_ratios(members)
            assert np.allclose(summary.ratio.ratios, expected.ratios,
                               rtol=0, atol=1e-15)
