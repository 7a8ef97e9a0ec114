"""Hard-edge sample covariance laboratory.

Analytic Marchenko-Pastur machinery for the square (d=1) case together with
Monte Carlo harnesses that check the local spectral statements at desk scale:
window eigenvalue counts, local Stieltjes-transform convergence, eigenvector
delocalization, near-zero eigenvalue repulsion, and the concentration
inequalities behind them.
"""

from .concentration import (
    MassProbe,
    TailCurve,
    hw_tail_curve,
    projection_mass_probe,
    wilson_interval,
)
from .ensemble import (
    KINDS,
    EnsembleSpec,
    EntryDistribution,
    MatrixSample,
    check_entry_statistics,
    derive_trial_seed,
    read_sample,
    sample_matrix,
    write_sample,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    TheoremReport,
    Thresholds,
    derived_windows,
    run_apriori,
    run_delocalization,
    run_hard_edge_scaling,
    run_hw_experiment,
    run_identity_suite,
    run_local_law,
    run_projection_mass_experiment,
    run_wegner,
)
from .mp import (
    DeltaBoundsReport,
    LawEval,
    SpectralPoint,
    Window,
    check_delta_bounds,
    fixed_point_residual,
    law_eval,
    mp_cdf,
    mp_density,
    mp_moment_quadrature,
    mp_stieltjes,
    mp_window_mass,
)
from .reports import Manifest, file_digest, render_csv, render_json, write_report
from .resolvent import (
    ErrorTerms,
    KernelStats,
    ResolventDiagonal,
    consistency_residual,
    empirical_stieltjes,
    leave_one_out_errors,
    resolvent_diag_leave_one_out,
    resolvent_diag_schur,
    resolvent_diagonal,
    self_consistency_residual,
    trace_kernel_norm,
)
from .spectral import (
    CountResult,
    DecompositionError,
    IdentityResidual,
    SpectralDecomposition,
    count_in_window,
    counting_bound,
    decompose,
    eigenvalue_count,
    eigenvalues_only,
    eigenvector_identity_residual,
    eigenvector_identity_scan,
    interlacing_check,
    minor_eigenvalues,
    near_zero_count,
)

try:
    from importlib.metadata import PackageNotFoundError, version

    __version__ = version("hardedge")
except PackageNotFoundError:  # pragma: no cover - source tree without install
    __version__ = "0+unknown"

__all__ = [
    "__version__",
    # mp
    "SpectralPoint", "Window", "LawEval", "DeltaBoundsReport",
    "mp_density", "mp_cdf", "law_eval", "mp_window_mass", "mp_stieltjes",
    "fixed_point_residual", "check_delta_bounds", "mp_moment_quadrature",
    # ensemble
    "KINDS", "EntryDistribution", "EnsembleSpec", "MatrixSample",
    "derive_trial_seed", "sample_matrix", "check_entry_statistics",
    "write_sample", "read_sample",
    # spectral
    "SpectralDecomposition", "DecompositionError", "CountResult", "IdentityResidual",
    "decompose", "eigenvalues_only", "minor_eigenvalues", "eigenvalue_count",
    "count_in_window", "counting_bound", "interlacing_check",
    "eigenvector_identity_scan", "eigenvector_identity_residual", "near_zero_count",
    # resolvent
    "ResolventDiagonal", "ErrorTerms", "KernelStats",
    "empirical_stieltjes", "resolvent_diagonal", "resolvent_diag_leave_one_out",
    "resolvent_diag_schur", "leave_one_out_errors", "trace_kernel_norm",
    "consistency_residual", "self_consistency_residual",
    # concentration
    "TailCurve", "MassProbe", "wilson_interval", "hw_tail_curve", "projection_mass_probe",
    # experiments
    "ConfigError", "Thresholds", "ExperimentConfig", "TheoremReport", "derived_windows",
    "run_apriori", "run_local_law", "run_delocalization", "run_wegner",
    "run_hard_edge_scaling", "run_identity_suite", "run_hw_experiment",
    "run_projection_mass_experiment",
    # reports
    "Manifest", "render_csv", "render_json", "write_report", "file_digest",
]
