"""Monte Carlo toolbox for a spatial restaurant-style point process.

The heavy lifting lives in the C++ extension ``_core``; this package
re-exports its functions. Every sampler takes an explicit ``seed`` and uses
one dedicated stream per replicate, so results are reproducible and
independent of any parallelism in the caller.
"""

from ._core import (
    arrival_times,
    crp_seatings,
    enumerate_seatings,
    expected_tables,
    fluct_samples,
    hydro_curve,
    kolmogorov_report,
    marginal_profile_law,
    mgf_report,
    profile_counts,
    sample_counts,
    sample_path_counts,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "arrival_times",
    "crp_seatings",
    "enumerate_seatings",
    "expected_tables",
    "fluct_samples",
    "hydro_curve",
    "kolmogorov_report",
    "marginal_profile_law",
    "mgf_report",
    "profile_counts",
    "sample_counts",
    "sample_path_counts",
    "verify",
]
