import numpy as np
import pytest

from tiltbh.basis import BasisTable
from tiltbh.hamiltonian import ModelParams, assemble


@pytest.fixture
def small_matrix():
    """A well-mixed 35-state problem reused by several modules."""
    params = ModelParams(4, 4, 1.0, 2.3, 0.7)
    table = BasisTable(4, 4)
    return params, table, assemble(params, table)


@pytest.fixture
def rng():
    return np.random.default_rng(20250817)
