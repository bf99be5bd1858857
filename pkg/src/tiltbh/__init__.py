"""Exact diagonalization and quantum-chaos statistics for the tilted
Bose-Hubbard chain with hard-wall boundaries.

The package covers the pipeline from occupation-number basis construction
through Hamiltonian assembly, full or interior eigensolves, level-spacing
ratio and fractal-dimension statistics against Gaussian-orthogonal-ensemble
references, and parameter-sweep drivers that emit machine-readable grids.
"""

__version__ = "0.1.0"

from .basis import BasisTable, dimension
from .errors import CapacityError, IntegrityError, ParityMixingWarning, SolverError
from .hamiltonian import ModelParams, SparseSymmetric, assemble, diagonal_energy, site_offsets
from .eigensolve import (
    Spectrum,
    extremal_energies,
    full_spectrum,
    interior_pairs,
    load_spectrum,
    save_spectrum,
)
from .statistics import (
    EnergyBinning,
    GfdStats,
    GoeReference,
    RatioStats,
    bin_by_energy,
    gfd,
    gfd_stats,
    goe_d1_prediction,
    goe_r_density,
    inner_fraction,
    kl_divergence,
    rescaled_energy,
    sample_goe_gfd,
    sample_goe_matrix,
    sample_goe_vector,
    spacing_ratios,
)
from .sweep import (
    ChaoticWindow,
    HomogeneousProbe,
    SweepGrid,
    chaotic_window,
    homogeneous_probe,
    run_e0_grid,
    run_energy_resolved,
    run_scaling,
    run_width,
)

__all__ = [
    "BasisTable",
    "CapacityError",
    "ChaoticWindow",
    "EnergyBinning",
    "GfdStats",
    "GoeReference",
    "HomogeneousProbe",
    "IntegrityError",
    "ModelParams",
    "ParityMixingWarning",
    "RatioStats",
    "SolverError",
    "SparseSymmetric",
    "Spectrum",
    "SweepGrid",
    "__version__",
    "assemble",
    "bin_by_energy",
    "chaotic_window",
    "diagonal_energy",
    "dimension",
    "extremal_energies",
    "full_spectrum",
    "gfd",
    "gfd_stats",
    "goe_d1_prediction",
    "goe_r_density",
    "homogeneous_probe",
    "inner_fraction",
    "interior_pairs",
    "kl_divergence",
    "load_spectrum",
    "rescaled_energy",
    "run_e0_grid",
    "run_energy_resolved",
    "run_scaling",
    "run_width",
    "sample_goe_gfd",
    "sample_goe_matrix",
    "sample_goe_vector",
    "save_spectrum",
    "site_offsets",
    "spacing_ratios",
]
