"""Backend selection for the Monte Carlo kernels.

Set ``NRNET_DISABLE_NUMBA=1`` to force the pure-numpy path. Both paths
consume the same random stream and return bit-identical results.
"""
import os

_DISABLED = os.environ.get("NRNET_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba  # noqa: F401
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False
else:
    HAVE_NUMBA = True

USE_NUMBA = HAVE_NUMBA and not _DISABLED

BACKENDS = ("numba", "numpy")


def resolve_backend(backend=None) -> str:
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
