"""Dense complex matrix primitives.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``;
:func:`as_cmatrix` is the single validation point.
"""

import numpy as np

DEFAULT_RANK_TOL = 1e-9


class RankDeficientError(np.linalg.LinAlgError):
    """Raised when a matrix that must have full column rank does not."""


class SVDConvergenceError(np.linalg.LinAlgError):
    """Raised when the singular value decomposition fails to converge."""


def as_cmatrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex128 array (copying only if needed)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def conj_transpose(a) -> np.ndarray:
    return as_cmatrix(a).conj().T


def svd_singular_values(a) -> np.ndarray:
    """All ``min(rows, cols)`` singular values, in descending order."""
    m = as_cmatrix(a)
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SVDConvergenceError(str(exc)) from exc


def rank_from_singular_values(sv: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Numeric rank along the last axis of a (stack of) singular value vectors."""
    sv = np.asarray(sv)
    smax = sv.max(axis=-1, keepdims=True)
    counted = (sv > tol * smax) & (smax > 0)
    return counted.sum(axis=-1)


def numeric_rank(a, tol: float = DEFAULT_RANK_TOL) -> int:
    """Count singular values above ``tol * sigma_max`` (0 for the zero matrix)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return int(rank_from_singular_values(svd_singular_values(a), tol))


def column_space_split(g, tol: float = DEFAULT_RANK_TOL, rank: int | None = None):
    """Orthonormal bases of the column space of ``g`` and of its complement.

    ``rank`` is the expected dimension of the column space (default: the
    number of columns).  Returns ``(U, W, sv)`` with ``U`` of shape
    ``rows x rank``, ``W`` of shape ``rows x (rows - rank)`` and the singular
    values of ``g``.

    Raises
    ------
    RankDeficientError
        If ``g`` has fewer than ``rank`` rows or its numerical rank is below ``rank``.
    """
    g = as_cmatrix(g)
    rows, cols = g.shape
    rank = cols if rank is None else int(rank)
    if not 1 <= rank <= min(rows, cols):
        raise RankDeficientError(f"{rows}x{cols} matrix cannot have rank {rank}")
    try:
        u, sv, _ = np.linalg.svd(g, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise SVDConvergenceError(str(exc)) from exc
    if sv[0] == 0 or sv[rank - 1] <= tol * sv[0]:
        raise RankDeficientError(
            f"column rank {int(rank_from_singular_values(sv, tol))} < {rank} "
            f"(sigma_{rank}/sigma_1 = {sv[rank - 1] / sv[0] if sv[0] else 0.0:.3e})"
        )
    return u[:, :rank], u[:, rank:], sv


def projection_complement(g, tol: float = DEFAULT_RANK_TOL, rank: int | None = None) -> np.ndarray:
    """Projector onto the orthogonal complement of the column space of ``g``.

    Equal to ``I - g (g^H g)^{-1} g^H`` when ``g`` has full column rank, but
    formed as ``W W^H`` from an orthonormal complement basis, which avoids
    squaring the condition number and also covers a structurally
    rank-deficient ``g`` (pass its ``rank``).
    """
    _, w, _ = column_space_split(g, tol, rank)
    q = w @ w.conj().T
    # exact Hermitian symmetry
    return 0.5 * (q + q.conj().T)


def projection_complement_normal_eq(g) -> np.ndarray:
    """Literal normal-equations form of :func:`projection_complement`."""
    g = as_cmatrix(g)
    gh = g.conj().T
    return np.eye(g.shape[0]) - g @ np.linalg.solve(gh @ g, gh)
