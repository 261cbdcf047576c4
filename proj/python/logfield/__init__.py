"""Log-correlated Gaussian field toolkit.

Covariance kernels and moduli of continuity for log-correlated fields and
their moving averages, exact Gaussian samplers, and the graph resistance
metric. Thin wrapper over the C++ core in ``logfield._logfield``.
"""

from ._logfield import (
    DegenerateModulus,
    DisconnectedGraph,
    DomainError,
    L,
    NonConvergence,
    NotPsd,
    RankDeficiency,
    TailBoundViolation,
    covering_number,
    double_integral_log_kernel,
    dudley_integral,
    f_log,
    g3d,
    g3d_small_r_constant,
    integrate_1d,
    lipschitz_statistic,
    metric_profile,
    resistance_matrix,
    resistance_mc,
    rho2,
    rho2_brownian_ma,
    rho2_log1d,
    rho2_powerlaw,
    sample_brownian,
    sample_cholesky,
    sample_circulant,
    sample_fourier_ma,
    scale_anomaly_check,
    variational_resistance,
)

__all__ = [
    "DegenerateModulus",
    "DisconnectedGraph",
    "DomainError",
    "L",
    "NonConvergence",
    "NotPsd",
    "RankDeficiency",
    "TailBoundViolation",
    "covering_number",
    "double_integral_log_kernel",
    "dudley_integral",
    "f_log",
    "g3d",
    "g3d_small_r_constant",
    "integrate_1d",
    "lipschitz_statistic",
    "metric_profile",
    "resistance_matrix",
    "resistance_mc",
    "rho2",
    "rho2_brownian_ma",
    "rho2_log1d",
    "rho2_powerlaw",
    "sample_brownian",
    "sample_cholesky",
    "sample_circulant",
    "sample_fourier_ma",
    "scale_anomaly_check",
    "variational_resistance",
]

__version__ = "0.1.0"
