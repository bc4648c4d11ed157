"""Backend selection for the exhaustive ML search.

The compiled extension is used when it was built; otherwise (or when the
environment variable ``IC_STBC_PURE`` is set to a non-empty value) the numpy
implementation is used.  ``BACKEND`` names the active one.
"""

import os

from . import _ml_fallback

MAX_CANDIDATES = 10**6

try:
    if os.environ.get("IC_STBC_PURE"):
        raise ImportError("pure backend requested")
    from ._ml_kernel import ml_search as _compiled_ml_search
except ImportError:
    _compiled_ml_search = None

BACKEND = "cython" if _compiled_ml_search is not None else "numpy"
_impl = _compiled_ml_search or _ml_fallback.ml_search


def ml_search(R, b, points):
    """Exhaustive minimum of ``||b[t] - R[t] @ points[d]||**2`` per instance ``t``.

    Parameters
    ----------
    R : array (instances, rows, n_symbols), complex
    b : array (instances, rows), complex
    points : array (q,), complex

    Returns
    -------
    index : int64 array
        Lexicographic candidate index ``sum_l d_l * q**(n-1-l)`` of the minimiser.
    metric : float64 array
        The minimum value.
    """
    from .codebook import GuardExceededError
    import numpy as np

    R = np.ascontiguousarray(R, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    points = np.ascontiguousarray(points, dtype=np.complex128)
    if R.ndim != 3:
        raise ValueError("R must be 3-D (instances, rows, n_symbols)")
    K = points.size ** R.shape[2]
    if K > MAX_CANDIDATES:
        raise GuardExceededError(f"{K} candidates exceed the exhaustive search guard {MAX_CANDIDATES}")
    return _impl(R, b, points)


def available_backends():
    out = {"numpy": _ml_fallback.ml_search}
    if _compiled_ml_search is not None:
        out["cython"] = _compiled_ml_search
    return out
