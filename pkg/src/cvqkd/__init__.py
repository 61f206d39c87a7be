"""Secure key rate bounds for one-way Gaussian CV-QKD with trusted noise.

Layering: `gaussian` is the multimode covariance-matrix engine, `protocols`
builds the QKD scenarios and Holevo bounds, `analysis` optimizes and sweeps,
`cli`/`reproduce` provide the command-line surface and figure datasets.
"""

from .analysis import (
    FrontierPoint, SweepSpec, loss_distance_convert, max_tolerable_excess_noise,
    optimize_modulation, optimize_trusted_noise, run_sweep,
)
from .errors import (
    CVQKDError, ConfigError, DegenerateMeasurementError, DomainError,
    MonotonicityError, NonConvergedError, OptimizerAmbiguityError,
    PhysicalityError, UnsupportedModelError,
)
from .gaussian import (
    ALICE, ANCILLA, BOB, CLASSICAL, EVE, CovarianceMatrix, GaussianSystem,
    SymplecticSpectrum, apply_beamsplitter, apply_loss_channel, apply_squeezer,
    apply_symplectic, bosonic_entropy_g, condition_on_classical,
    condition_on_heterodyne, condition_on_homodyne, epr_source, partial_trace,
    squeezed_vacuum, symplectic_eigenvalues, tensor, vacuum, von_neumann_entropy,
)
from .protocols import (
    COHERENT, DR, INFINITE, METHOD_ASYMPTOTIC, METHOD_CLONER,
    METHOD_PURIFICATION, RR, SQUEEZED, ChannelParams, KeyRateReport,
    NoiseThresholds, ProtocolParams, PurificationConfig, asymptotic_key_rate,
    build_entangling_cloner, build_pure_loss_eve,
    build_trusted_noise_purification, holevo_bound, key_rate,
    mutual_information, trusted_noise_thresholds, with_params,
)

__all__ = [name for name in dir() if not name.startswith("_")]
