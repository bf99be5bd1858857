import numpy as np
import pytest

from helpers import enumerate_states
from tiltbh.basis import BasisTable, dimension
from tiltbh.errors import CapacityError


def test_dimension_known_values():
    assert dimension(2, 2) == 3
    assert dimension(7, 7) == 1716
    assert dimension(8, 8) == 6435
    assert dimension(10, 10) == 92378
    assert dimension(11, 11) == 352716
    assert dimension(13, 13) == 5200300


def test_dimension_edge_cases():
    assert dimension(1, 5) == 1
    assert dimension(5, 0) == 1
    with pytest.raises(ValueError):
        dimension(0, 3)
    with pytest.raises(ValueError):
        dimension(3, -1)


def test_dimension_overflow_guarded():
    with pytest.raises(CapacityError):
        dimension(200, 200)


@pytest.mark.parametrize("L,N", [(2, 2), (3, 4), (5, 3), (4, 6), (6, 1)])
def test_enumeration_matches_oracle(L, N):
    table = BasisTable(L, N)
    expected = np.array(enumerate_states(L, N))
    assert table.dim == expected.shape[0]
    assert np.array_equal(np.asarray(table.occupations(), dtype=np.int64), expected)


def test_enumeration_order_endpoints():
    table = BasisTable(5, 3)
    occ = table.occupations()
    assert list(occ[0]) == [3, 0, 0, 0, 0]
    assert list(occ[-1]) == [0, 0, 0, 0, 3]
    # strictly descending lexicographic throughout
    rows = [tuple(int(x) for x in row) for row in occ]
    assert rows == sorted(rows, reverse=True)


def test_rank_unrank_roundtrip_exhaustive():
    table = BasisTable(4, 5)
    for i in range(table.dim):
        state = table.unrank(i)
        assert table.rank(state) == i
    occ = table.occupations()
    for i in range(table.dim):
        assert np.array_equal(table.unrank(i), occ[i])


def test_rank_unrank_roundtrip_randomized(rng):
    # large enough that exhaustive enumeration is not what is being tested
    table = BasisTable(9, 9)
    for i in rng.integers(0, table.dim, size=200):
        assert table.rank(table.unrank(int(i))) == int(i)


def test_rank_rejects_bad_states():
    table = BasisTable(4, 3)
    with pytest.raises(ValueError):
        table.rank([1, 1, 1])  # wrong length
    with pytest.raises(ValueError):
        table.rank([1, 1, 1, 1])  # wrong sum
    with pytest.raises(ValueError):
        table.rank([2, 2, -1, 0])


def test_unrank_rejects_out_of_range():
    table = BasisTable(4, 3)
    with pytest.raises(ValueError):
        table.unrank(-1)
    with pytest.raises(ValueError):
        table.unrank(table.dim)


def test_occupations_read_only_and_cached():
    table = BasisTable(4, 4)
    occ = table.occupations()
    assert occ is table.occupations()
    with pytest.raises(ValueError):
        occ[0, 0] = 9


def test_ordering_hash_stable_and_distinct():
    a = BasisTable(5, 4).ordering_hash()
    b = BasisTable(5, 4).ordering_hash()
    c = BasisTable(4, 5).ordering_hash()
    assert a == b
    assert a != c
    assert len(a) == 64
