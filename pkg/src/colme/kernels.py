"""Backend dispatch for the hot per-step kernels.

Two interchangeable implementations exist: numba-compiled loops
(``_kernels_numba``) and pure numpy (``_kernels_numpy``). The active one
is chosen at import from the COLME_BACKEND environment variable:

    COLME_BACKEND=numba   force numba (error if unavailable)
    COLME_BACKEND=numpy   force the pure-numpy path
    COLME_BACKEND=auto    numba if importable, numpy otherwise (default)

``set_backend`` switches at runtime; benchmarks/backends.py compares the two.
"""

import os
import warnings

import numpy as np

from . import _kernels_numpy

_VALID = ("auto", "numba", "numpy")
_impl = None
_name = ""


def set_backend(name: str) -> str:
    """Select the kernel implementation; returns the resolved backend name."""
    global _impl, _name
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}; expected one of {_VALID}")
    if name == "numpy":
        _impl, _name = _kernels_numpy, "numpy"
        return _name
    try:
        from . import _kernels_numba
        _impl, _name = _kernels_numba, "numba"
    except ImportError:
        if name == "numba":
            raise
        warnings.warn("numba unavailable, falling back to numpy kernels")
        _impl, _name = _kernels_numpy, "numpy"
    return _name


def backend() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return _name


set_backend(os.environ.get("COLME_BACKEND", "auto").strip().lower() or "auto")


def metropolis_build(indptr, indices, degrees):
    return _impl.metropolis_build(indptr, indices, degrees)


def consensus_step_weighted(indptr, indices, wdata, wdiag, x, mu, alpha):
    return _impl.consensus_step_weighted(indptr, indices, wdata, wdiag, x, mu, alpha)


def consensus_step_laplacian(indptr, indices, degrees, x, mu, alpha, beta):
    return _impl.consensus_step_laplacian(indptr, indices, degrees, x, mu, alpha, beta)


def laplacian_matvec(indptr, indices, degrees, x):
    return _impl.laplacian_matvec(indptr, indices, degrees, x)


def warmup() -> None:
    """Trigger JIT compilation on tiny inputs so timings exclude compile cost."""
    indptr = np.array([0, 1, 2], dtype=np.int64)
    indices = np.array([1, 0], dtype=np.int64)
    deg = np.array([1, 1], dtype=np.int64)
    x = np.zeros(2)
    wdata, wdiag, _ = metropolis_build(indptr, indices, deg)
    consensus_step_weighted(indptr, indices, wdata, wdiag, x, x, 0.5)
    consensus_step_laplacian(indptr, indices, deg, x, x, 0.5, 0.1)
    laplacian_matvec(indptr, indices, deg, x)
