"""
Core Layer - 数值核心层

包含模型核心、谱求解、动力学、双原子组装、闭式基线与暴力校验路径。
"""

from rabi_esd.core.model import (
    ModelParams,
    ParityBlock,
    TruncationPolicy,
    displacement_overlap,
    displacement_matrix_element,
    displacement_matrix,
    overlap_matrix,
    build_parity_block,
)
from rabi_esd.core.spectral import (
    DisplacedSpectrum,
    OriginalBasisState,
    SpectralLevel,
    symmetric_eig,
    solve_subsystem,
    to_original_basis,
    parity_of,
)
from rabi_esd.core.dynamics import (
    SubsystemTrajectory,
    evolve_subsystem,
    mean_photon_number,
    mean_energy,
    photon_number_series,
    energy_series,
    norm_series,
    atomic_inversion_series,
)
from rabi_esd.core.bipartite import (
    BellSpec,
    TwoQubitDensity,
    ConcurrenceSeries,
    joint_density,
    wootters_concurrence,
    detect_esd,
    concurrence_series,
    photon_concurrence_correlation,
)
from rabi_esd.core.analytic import (
    EffectiveParams,
    effective_params,
    concurrence_bell1_transformed,
    concurrence_bell2_transformed,
    esd_predicate,
    concurrence_rwa,
    analytic_series,
    dressed_series,
    first_death_time,
)
from rabi_esd.core.oracle import (
    RawHamiltonian,
    build_raw_hamiltonian,
    propagate_eig,
    propagate_step,
    oracle_concurrence_series,
)
from rabi_esd.core.errors import (
    RabiError,
    NonConvergence,
    NormLoss,
    EigenSolverError,
    InvalidDensity,
    GridMismatch,
    StepUnderflow,
    ConfigError,
)

__all__ = [
    # model
    "ModelParams",
    "ParityBlock",
    "TruncationPolicy",
    "displacement_overlap",
    "displacement_matrix_element",
    "displacement_matrix",
    "overlap_matrix",
    "build_parity_block",
    # spectral
    "DisplacedSpectrum",
    "OriginalBasisState",
    "SpectralLevel",
    "symmetric_eig",
    "solve_subsystem",
    "to_original_basis",
    "parity_of",
    # dynamics
    "SubsystemTrajectory",
    "evolve_subsystem",
    "mean_photon_number",
    "mean_energy",
    "photon_number_series",
    "energy_series",
    "norm_series",
    "atomic_inversion_series",
    # bipartite
    "BellSpec",
    "TwoQubitDensity",
    "ConcurrenceSeries",
    "joint_density",
    "wootters_concurrence",
    "detect_esd",
    "concurrence_series",
    "photon_concurrence_correlation",
    # analytic
    "EffectiveParams",
    "effective_params",
    "concurrence_bell1_transformed",
    "concurrence_bell2_transformed",
    "esd_predicate",
    "concurrence_rwa",
    "analytic_series",
    "dressed_series",
    "first_death_time",
    # oracle
    "RawHamiltonian",
    "build_raw_hamiltonian",
    "propagate_eig",
    "propagate_step",
    "oracle_concurrence_series",
    # errors
    "RabiError",
    "NonConvergence",
    "NormLoss",
    "EigenSolverError",
    "InvalidDensity",
    "GridMismatch",
    "StepUnderflow",
    "ConfigError",
]
