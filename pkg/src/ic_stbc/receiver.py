"""Group zero-forcing cancellation, exhaustive ML decoding and the MMSE variant.

The per-instance functions work on explicit ``TN x TN`` matrices and are the
reference path.  :func:`batch_front_end` computes the same decision statistic
for a stack of trials in a reduced coordinate system (an orthonormal basis of
the surviving subspace), which is what the simulator feeds to the search
kernel.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .codebook import EquivalentChannel
from .modulation import Constellation
from .numerics import DEFAULT_RANK_TOL, RankDeficientError, as_cmatrix, projection_complement

ZF, AO, GENIE = "zf", "ao", "genie"
RECEIVERS = (ZF, AO, GENIE)


@dataclass(frozen=True)
class ProjectedSystem:
    """Decision statistic ``z``, effective channel ``A`` and the canceller ``Q``."""

    z: np.ndarray
    A: np.ndarray
    Q: np.ndarray


@dataclass(frozen=True)
class DecodeResult:
    symbols: np.ndarray
    labels: np.ndarray
    metric: float
    candidates_searched: int


def _matrix(eq) -> np.ndarray:
    return as_cmatrix(eq.matrix if isinstance(eq, EquivalentChannel) else eq)


def group_zf(y, H_eq, G_eq, rank: int | None = None) -> ProjectedSystem:
    """Null the interferer's column space.

    ``rank`` is the structural rank of ``G_eq`` (default: its column count).
    Raises :class:`~ic_stbc.numerics.RankDeficientError` if ``G_eq`` falls
    short of it.
    """
    H, G = _matrix(H_eq), _matrix(G_eq)
    y = np.asarray(y, dtype=np.complex128).ravel()
    Q = projection_complement(G, rank=rank)
    return ProjectedSystem(z=Q @ y, A=Q @ H, Q=Q)


def mmse_canceller(G_eq, rho: float, mu: float) -> np.ndarray:
    """``I - G (G^H G + (mu/rho) I)^{-1} G^H``; tends to the ZF projector as ``rho`` grows."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    G = _matrix(G_eq)
    gh = G.conj().T
    reg = (mu / rho) * np.eye(G.shape[1])
    Q = np.eye(G.shape[0]) - G @ np.linalg.solve(gh @ G + reg, gh)
    return 0.5 * (Q + Q.conj().T)


def _psd_sqrt(Q: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(Q)
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T


def ao_mmse(y, H_eq, G_eq, rho: float, mu: float) -> ProjectedSystem:
    """MMSE (interference-as-Gaussian) front end.

    ``Q_ao = mmse_canceller(G_eq, rho, mu)`` equals the inverse covariance
    ``(I + (rho/mu) G G^H)^{-1}`` of interference plus noise.  The returned statistic is whitened with
    ``Q_ao**(1/2)``, so the usual metric ``||z - scale * A s||**2`` is the
    Gaussian log-likelihood.  ``Q`` holds ``Q_ao`` itself.
    """
    H = _matrix(H_eq)
    y = np.asarray(y, dtype=np.complex128).ravel()
    Q = mmse_canceller(G_eq, rho, mu)
    W = _psd_sqrt(Q)
    return ProjectedSystem(z=W @ y, A=W @ H, Q=Q)


def _search(z, A, c: Constellation, L: int, scale: float) -> DecodeResult:
    z = np.asarray(z, dtype=np.complex128).ravel()
    A = as_cmatrix(A)
    if A.shape[1] != L:
        raise ValueError(f"effective channel has {A.shape[1]} columns, expected L={L}")
    idx, _ = kernels.ml_search((scale * A)[None], z[None], c.points)
    powers = c.order ** np.arange(L - 1, -1, -1)
    labels = (int(idx[0]) // powers) % c.order
    symbols = c.points[labels]
    resid = z - scale * (A @ symbols)
    return DecodeResult(
        symbols=symbols,
        labels=labels,
        metric=float(np.vdot(resid, resid).real),
        candidates_searched=c.order**L,
    )


def ml_decode(sys: ProjectedSystem, c: Constellation, L: int, scale: float = 1.0) -> DecodeResult:
    """Exhaustive minimiser of ``||z - scale * A s||**2`` over ``c.points**L``.

    Ties go to the lexicographically first label vector.
    """
    return _search(sys.z, sys.A, c, L, scale)


def genie_single_user(y_clean, H_eq, c: Constellation, L: int, scale: float = 1.0) -> DecodeResult:
    """ML decoding of an interference-free observation (no projection)."""
    return _search(y_clean, _matrix(H_eq), c, L, scale)


def decision_metric(sys: ProjectedSystem, s, scale: float = 1.0) -> float:
    r = sys.z - scale * (sys.A @ np.asarray(s, dtype=np.complex128))
    return float(np.vdot(r, r).real)


def batch_front_end(receiver: str, Hq: np.ndarray, Gq: np.ndarray, y: np.ndarray, noise_var: float,
                    tol: float = DEFAULT_RANK_TOL, rank: int | None = None):
    """Reduced decision statistics for a stack of trials.

    ``y`` is the received vector divided by ``sqrt(rho/mu)``, so the noise
    has variance ``noise_var = mu/rho`` per entry and the signal scale is 1.
    ``rank`` is the structural rank of the interferer channels (default:
    their column count).

    Returns ``(R, b, degenerate)`` with ``R`` of shape ``(B, r, n)``,
    ``r <= n``, such that ``||b - R s||**2`` differs from the full metric by
    a constant per trial.  ``degenerate`` flags interferer channels whose
    rank falls short of ``rank`` (their rows are meaningless).
    """
    B, TN, n = Hq.shape
    if receiver == GENIE:
        z, A = y, Hq
        degenerate = np.zeros(B, dtype=bool)
    elif receiver in (ZF, AO):
        k = Gq.shape[2] if rank is None else rank
        if TN <= k:
            raise RankDeficientError(f"interference of rank {k} fills all {TN} dimensions")
        if k == Gq.shape[2]:
            # G = Qf[:, :k] Rk; the trailing TN-k columns of Qf span the complement
            Qf, Rg = np.linalg.qr(Gq, mode="complete")
            Rk = Rg[:, :k, :]
            diag = np.abs(np.diagonal(Rk, axis1=1, axis2=2))
            degenerate = diag.min(axis=1) <= tol * diag.max(axis=1)
            Uh = np.conj(np.swapaxes(Qf, 1, 2))
            gram = Rk @ np.conj(np.swapaxes(Rk, 1, 2))  # G G^H in the range basis
        else:
            U, sv, _ = np.linalg.svd(Gq, full_matrices=True)
            degenerate = sv[:, k - 1] <= tol * sv[:, 0]
            Uh = np.conj(np.swapaxes(U, 1, 2))
            gram = np.einsum("bi,ij->bij", sv[:, :k] ** 2, np.eye(k))
        if receiver == ZF or noise_var == 0:
            W = Uh[:, k:, :]
        else:
            # inverse covariance (scaled by noise_var) restricted to span(G): noise_var (G G^H + noise_var I)^-1
            cov = gram + noise_var * np.eye(k)
            F = np.sqrt(noise_var) * np.linalg.inv(np.linalg.cholesky(cov))
            W = np.concatenate([Uh[:, k:, :], F @ Uh[:, :k, :]], axis=1)
        z = np.einsum("brt,bt->br", W, y)
        A = W @ Hq
    else:
        raise ValueError(f"unknown receiver {receiver!r}")

    if A.shape[1] > n:
        Qa, Ra = np.linalg.qr(A)
        b = np.einsum("btr,bt->br", Qa.conj(), z)
        return Ra, b, degenerate
    return A, z, degenerate
