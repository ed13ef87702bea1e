"""Tensor-based channel estimation for a fluid-RIS assisted MISO uplink.

Thin Python layer over the C++ core: structured products, rank-1
factorizations, scenario synthesis and the Monte-Carlo sweep harness.
"""

import json as _json

from ._core import (  # noqa: F401
    ConfigError,
    ConvergenceError,
    DegenerateColumnError,
    DimensionError,
    SystemConfig,
    __version__,
    build_phase_matrix,
    build_pilot_matrix,
    estimate_theta_ls,
    estimate_z_ls,
    fold3,
    generate_channels,
    hadamard,
    hosvd_rank1,
    khatri_rao,
    kron_vec,
    krf2,
    krf3,
    matched_filter,
    nmse,
    parafac4_reconstruct,
    rank1_svd,
    simulate_trial,
    unfold_y1,
    unfold_y2,
)
from . import _core as _impl


def run_experiment(config, threads=1):
    """Run a Monte-Carlo sweep. `config` is a dict or a JSON string."""
    if isinstance(config, dict):
        config = _json.dumps(config)
    return _impl.run_experiment(config, threads)


def results_csv(config, threads=1):
    """Run a sweep and return the results CSV as a string."""
    if isinstance(config, dict):
        config = _json.dumps(config)
    return _impl.csv_from_rows(config, threads)
