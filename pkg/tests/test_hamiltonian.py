import numpy as np
import pytest

from helpers import brute_hamiltonian
from tiltbh.basis import BasisTable
from tiltbh.errors import ParityMixingWarning
from tiltbh.hamiltonian import (ModelParams, assemble, diagonal_energy,
                                site_offsets)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(1, 2, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams(4, -1, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams(4, 4, -1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams(4, 4, 1.0, float("nan"), 1.0)


def test_site_offsets_centered():
    for L in (2, 3, 8, 11):
        offs = site_offsets(L)
        assert offs.shape == (L,)
        assert offs.sum() == 0.0  # exact in floating point, not approximate
        assert np.array_equal(offs, -offs[::-1])
        assert np.all(np.diff(offs) == 1.0)


@pytest.mark.filterwarnings("ignore::tiltbh.errors.ParityMixingWarning")
@pytest.mark.parametrize("L,N,J,U,F", [
    (2, 2, 1.0, 0.0, 0.0),
    (4, 3, 0.7, 1.3, 0.21),
    (4, 4, 1.0, 2.3, 0.7),
    (5, 3, 2.07, 1.0, 0.5),
    (3, 6, 0.05, 1.0, 0.01),
    (6, 2, 1.0, 4.0, 2.0),
])
def test_assemble_matches_brute_force(L, N, J, U, F):
    table = BasisTable(L, N)
    matrix = assemble(ModelParams(L, N, J, U, F), table)
    dense, states = brute_hamiltonian(L, N, J, U, F)
    assert [tuple(map(int, s)) for s in table.occupations()] == states
    built = matrix.dense()
    # hop amplitudes are single correctly-rounded operations, so bit-exact;
    # the diagonal is a sum whose grouping differs from the oracle's
    assert np.array_equal(np.triu(built, 1), np.triu(dense, 1))
    scale = np.abs(np.diag(dense)).max() + 1.0
    assert np.allclose(np.diag(built), np.diag(dense), rtol=0, atol=1e-13 * scale)


def test_offdiagonal_strictly_upper_and_sorted(small_matrix):
    _, _, matrix = small_matrix
    assert np.all(matrix.rows < matrix.cols)
    order = np.lexsort((matrix.cols, matrix.rows))
    assert np.array_equal(order, np.arange(matrix.rows.shape[0]))


def test_apply_matches_dense(small_matrix, rng):
    _, _, matrix = small_matrix
    dense = matrix.dense()
    v = rng.standard_normal(matrix.dim)
    assert np.allclose(matrix.apply(v), dense @ v, rtol=0, atol=1e-13)
    block = rng.standard_normal((matrix.dim, 3))
    assert np.allclose(matrix.apply(block), dense @ block, rtol=0, atol=1e-13)


def test_csr_routes_agree(small_matrix):
    _, _, matrix = small_matrix
    full = matrix.full_csr().toarray()
    assert np.array_equal(full, matrix.dense())
    upper = matrix.upper_csr().toarray()
    assert np.array_equal(np.triu(full, 1), upper)


def test_one_norm_is_exact(small_matrix):
    _, _, matrix = small_matrix
    expected = np.abs(matrix.dense()).sum(axis=0).max()
    assert matrix.one_norm_estimate() == expected


def test_trace_matches_diagonal(small_matrix):
    _, _, matrix = small_matrix
    assert matrix.trace() == matrix.diag.sum()


def test_diagonal_energy_closed_form():
    params = ModelParams(4, 4, 0.9, 1.7, 0.6)
    state = np.array([2, 1, 1, 0])
    # U/2 * sum n(n-1) = 1.7; offsets (-1.5,-0.5,0.5,1.5) dot (2,1,1,0)
    expected = 0.5 * 1.7 * 2 + 0.6 * (-1.5 * 2 - 0.5 + 0.5)
    assert diagonal_energy(state, params) == pytest.approx(expected, rel=1e-15)


def test_zero_hopping_has_no_offdiagonal():
    table = BasisTable(4, 4)
    matrix = assemble(ModelParams(4, 4, 0.0, 1.3, 0.9), table)
    assert matrix.vals.shape[0] == 0
    assert np.array_equal(matrix.dense(), np.diag(matrix.diag))


def test_zero_tilt_warns():
    table = BasisTable(3, 3)
    with pytest.warns(ParityMixingWarning):
        assemble(ModelParams(3, 3, 1.0, 1.0, 0.0), table)


def test_tilt_term_antisymmetric_under_reflection():
    # mirroring the chain negates the tilt contribution, J and U unchanged
    L, N = 5, 4
    table = BasisTable(L, N)
    params = ModelParams(L, N, 0.0, 0.0, 0.83)
    occ = table.occupations()
    energies = np.array([diagonal_energy(s, params) for s in occ])
    mirrored = np.array([diagonal_energy(s[::-1], params) for s in occ])
    assert np.allclose(energies, -mirrored, rtol=0, atol=1e-14)


def test_dump_coo_roundtrips(small_matrix, tmp_path):
    _, _, matrix = small_matrix
    path = tmp_path / "matrix.coo"
    matrix.dump_coo(path)
    rebuilt = np.zeros((matrix.dim, matrix.dim))
    for line in path.read_text().splitlines():
        i, j, v = line.split()
        rebuilt[int(i), int(j)] += float(v)
        if i != j:
            rebuilt[int(j), int(i)] += float(v)
    assert np.array_equal(rebuilt, matrix.dense())  # 17 digits round-trip f64
