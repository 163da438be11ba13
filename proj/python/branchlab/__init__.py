from ._branchlab import (
    __version__,
    branch_count_ratio_log10,
    check_constraints,
    collapse_statistics,
    derive_born_coefficients,
    derive_seed,
    equivariance,
    fine_grain,
    macro_distribution,
    run_experiment,
    versions_count_digits,
)

__all__ = [
    "__version__",
    "branch_count_ratio_log10",
    "check_constraints",
    "collapse_statistics",
    "derive_born_coefficients",
    "derive_seed",
    "equivariance",
    "fine_grain",
    "macro_distribution",
    "run_experiment",
    "versions_count_digits",
]
