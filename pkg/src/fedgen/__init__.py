"""fedgen: simulate multi-round federated SGD and measure its generalization.

The package provides a deterministic FL-SGD engine, Monte-Carlo estimators for
the expected generalization error and for a round-aware upper bound on it, a
brute-force enumeration oracle that verifies the bound's building blocks
exactly on finite-support data, and a config-driven experiment CLI.
"""

__version__ = "0.1.0"

from .kernels import BACKEND as kernel_backend  # noqa: F401
