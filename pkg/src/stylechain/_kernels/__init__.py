"""Kernel selection: compiled extension when built, numpy fallback otherwise."""

from . import _sampling_py

try:
    from . import _sampling_cy

    sample_paths = _sampling_cy.sample_paths
    BACKEND = "cython"
except ImportError:
    sample_paths = _sampling_py.sample_paths
    BACKEND = "python"


def available_backends():
    """Name -> sample_paths implementation, for tests and benchmarks."""
    backends = {"python": _sampling_py.sample_paths}
    if BACKEND == "cython":
        backends["cython"] = _sampling_cy.sample_paths
    return backends
