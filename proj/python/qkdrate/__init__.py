"""Finite-key rates for decoy-state BB84 with a passive basis choice."""

from ._qkdrate import (
    AgreementReport,
    Baseline,
    BoundCheck,
    ConfigError,
    DegenerateChannelError,
    DomainError,
    KeyRateResult,
    Mode,
    OptimizationResult,
    OptimizationSpec,
    PreconditionError,
    ProtocolParams,
    SecurityParams,
    SoundnessReport,
    SweepRow,
    binary_entropy,
    default_security,
    deviation_lower,
    deviation_upper,
    expected_counts,
    kato_lower,
    kato_upper,
    key_rate,
    make_grid,
    optimize,
    secrecy_epsilons,
    single_photon_prob,
    sweep,
    validate_bounds,
    validate_channel_model,
)

__all__ = [name for name in dir() if not name.startswith("_")]
