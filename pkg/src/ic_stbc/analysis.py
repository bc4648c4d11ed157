"""Full-rank criterion checks, diversity constant, PEP bound and slope fitting.

Convention: ``lambda`` values are eigenvalues of the Gram matrix
``(Q (I_N kron dS))^H (Q (I_N kron dS))``, i.e. squared singular values, so
that ``||Q H_eq ds||**2 >= lambda_min * ||h||**2``.
"""

from dataclasses import asdict, dataclass, field
import json
import warnings

import numpy as np

from . import channel
from .codebook import (
    MAX_ENUMERATION,
    CodeSpec,
    GuardExceededError,
    encode_matrix,
    iter_difference_vectors,
    lift_batch,
    lift_channel,
)
from .modulation import Constellation, difference_set
from .numerics import DEFAULT_RANK_TOL, RankDeficientError, column_space_split, rank_from_singular_values


@dataclass
class RankReport:
    config: dict
    samples: int
    min_lambda_min: float
    deficient_witnesses: list = field(default_factory=list)
    deficient_count: int = 0
    redraws: int = 0
    per_draw_lambda_min: list = field(default_factory=list)
    lambda_convention: str = "squared singular values of Q (I_N kron dS)"

    @property
    def passed(self) -> bool:
        return not self.deficient_witnesses

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "RankReport":
        d = dict(d)
        d.pop("passed", None)
        return cls(**d)


@dataclass
class AlphaEstimate:
    alpha: float
    over_samples: int
    per_draw: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PepPoint:
    rho: float
    bound: float


def _kron_eye_apply(Q: np.ndarray, dS: np.ndarray, N: int) -> np.ndarray:
    """``Q @ kron(I_N, dS_k)`` for a stack ``dS`` of shape ``(K, T, M)``."""
    K, T, M = dS.shape
    blocks = Q.reshape(Q.shape[0], N, T)  # column block j is Q[:, jT:(j+1)T]
    out = np.einsum("rjt,ktm->krjm", blocks, dS)
    return out.reshape(K, Q.shape[0], N * M)


def lambda_min(Q, dS, N: int) -> np.ndarray:
    """Smallest Gram eigenvalue of ``Q (I_N kron dS)``; ``dS`` may be a stack."""
    dS = np.asarray(dS, dtype=np.complex128)
    single = dS.ndim == 2
    sv = np.linalg.svd(_kron_eye_apply(np.asarray(Q, np.complex128), dS.reshape((-1,) + dS.shape[-2:]), N),
                       compute_uv=False)
    lam = sv[:, -1] ** 2 if sv.shape[1] == N * dS.shape[-1] else np.zeros(sv.shape[0])
    return lam[0] if single else lam


def _interferer_projector(spec: CodeSpec, N: int, seed: int, draw: int, tol: float):
    """Projector for one draw; redraws degenerate interferer channels."""
    attempt = 0
    G = channel.draw_channel(spec.M, N, (seed, draw)).G1
    while True:
        try:
            _, W, _ = column_space_split(lift_channel(spec, G, user=2).matrix, tol, spec.interference_rank(N))
            return W @ W.conj().T, attempt
        except RankDeficientError:
            attempt += 1
            if attempt > 100:
                raise
            G = channel.redraw_channel(spec.M, N, seed, draw, attempt)[1]


def _scan(spec: CodeSpec, N: int, c: Constellation, channel_draws: int, rng_seed: int,
          tol: float, max_witnesses: int, stop_on_witness: bool, chunk: int = 1 << 14) -> RankReport:
    if channel_draws < 1:
        raise ValueError("channel_draws must be >= 1")
    diffs = difference_set(c)
    total = diffs.size**spec.n_symbols
    if total > MAX_ENUMERATION:
        raise GuardExceededError(f"{total} difference vectors exceed the guard {MAX_ENUMERATION}")
    MN = spec.M * N
    report = RankReport(
        config={"M": spec.M, "N": N, "L": spec.L, "constellation_order": c.order,
                "code": spec.kind, "seed": rng_seed, "tol": tol},
        samples=0,
        min_lambda_min=float("inf"),
    )
    for draw in range(channel_draws):
        Q, attempt = _interferer_projector(spec, N, rng_seed, draw, tol)
        report.redraws += attempt
        draw_min = np.inf
        for ds in iter_difference_vectors(diffs, spec.n_symbols, chunk):
            prod = _kron_eye_apply(Q, encode_matrix(spec, ds, user=1), N)
            sv = np.linalg.svd(prod, compute_uv=False)
            lam = sv[:, -1] ** 2 if sv.shape[1] == MN else np.zeros(len(sv))
            draw_min = min(draw_min, float(lam.min()))
            bad = np.flatnonzero(rank_from_singular_values(sv, tol) < MN)
            report.deficient_count += bad.size
            for i in bad[: max(0, max_witnesses - len(report.deficient_witnesses))]:
                report.deficient_witnesses.append({
                    "draw": draw,
                    "seed": rng_seed,
                    "attempt": attempt,
                    "delta_s": [[float(v.real), float(v.imag)] for v in ds[i]],
                    "sigma_ratio": float(sv[i, -1] / sv[i, 0]) if sv[i, 0] > 0 else 0.0,
                })
        report.samples += 1
        report.per_draw_lambda_min.append(draw_min)
        report.min_lambda_min = min(report.min_lambda_min, draw_min)
        if stop_on_witness and report.deficient_witnesses:
            break
    return report


def full_rank_check(spec: CodeSpec, N: int, c: Constellation, channel_draws: int, rng_seed: int,
                    tol: float = DEFAULT_RANK_TOL, max_witnesses: int = 100,
                    stop_on_witness: bool = False) -> RankReport:
    """Check ``rank(Q1 (I_N kron dS)) == M N`` for every nonzero error vector.

    ``Q1`` is rebuilt from each sampled interferer channel (stream
    ``(rng_seed, draw)``).  At most ``max_witnesses`` deficiencies are stored
    (``deficient_count`` has the total); with ``stop_on_witness`` the scan
    ends after the first draw that produced one.
    """
    return _scan(spec, N, c, channel_draws, rng_seed, tol, max_witnesses, stop_on_witness)


def estimate_alpha(spec: CodeSpec, N: int, c: Constellation, channel_draws: int, rng_seed: int,
                   tol: float = DEFAULT_RANK_TOL) -> AlphaEstimate:
    """Per-draw and overall minimum of ``lambda_min`` over all nonzero error vectors."""
    rep = _scan(spec, N, c, channel_draws, rng_seed, tol, max_witnesses=0, stop_on_witness=False)
    return AlphaEstimate(alpha=rep.min_lambda_min, over_samples=rep.samples, per_draw=rep.per_draw_lambda_min)


def pep_upper_bound(rho: float, alpha: float, mu: float, M: int, N: int = 1) -> PepPoint:
    """``0.5 * (2 mu / (2 mu + alpha rho)) ** (M N)``."""
    if rho < 0 or alpha <= 0 or mu <= 0 or M < 1 or N < 1:
        raise ValueError("need rho >= 0, alpha > 0, mu > 0, M, N >= 1")
    return PepPoint(rho=rho, bound=0.5 * (2 * mu / (2 * mu + alpha * rho)) ** (M * N))


def pep_asymptote(rho: float, alpha: float, mu: float, M: int, N: int = 1) -> float:
    """High-SNR form ``2**(MN-1) mu**MN / alpha**MN * rho**(-MN)``."""
    d = M * N
    return 2 ** (d - 1) * (mu / alpha) ** d * rho ** (-d)


def diversity_slope(points) -> float:
    """Negated least-squares slope of ``log10(ber)`` against ``snr_db / 10``.

    Points with zero BER are dropped with a warning.
    """
    pts = [(float(s), float(b)) for s, b in points]
    snr = np.array([p[0] for p in pts])
    if len(pts) < 2 or np.any(np.diff(snr) <= 0):
        raise ValueError("need at least two points with strictly increasing SNR")
    ber = np.array([p[1] for p in pts])
    keep = ber > 0
    if not keep.all():
        warnings.warn(f"dropping {int((~keep).sum())} zero-BER point(s); too few trials", stacklevel=2)
    if keep.sum() < 2:
        raise ValueError("fewer than two points with nonzero BER")
    x, y = snr[keep] / 10.0, np.log10(ber[keep])
    return -float(np.polyfit(x, y, 1)[0])


def monte_carlo_pep(spec: CodeSpec, N: int, c: Constellation, sent, wrong, rho: float,
                    trials: int, seed: int) -> tuple[float, float]:
    """Empirical probability that ``wrong`` beats ``sent`` in the ZF metric.

    ``sent`` and ``wrong`` are label vectors.  Returns ``(estimate, standard error)``.
    """
    s = c.points[np.asarray(sent)]
    sbar = c.points[np.asarray(wrong)]
    TN = spec.T * N
    scale_noise = np.sqrt(spec.mu / rho)
    basis1 = encode_matrix(spec, np.eye(spec.n_symbols), 1)
    basis2 = encode_matrix(spec, np.eye(spec.n_symbols), 2)
    events = 0
    done = 0
    block = 0
    while done < trials:
        ch = channel.draw_channel_block(spec.M, N, seed, block)
        noise = channel.draw_noise_block(TN, seed, block)
        labels = channel.draw_symbol_block(c.order, spec.n_symbols, seed, block)
        take = min(channel.TRIAL_BLOCK, trials - done)
        Hq = lift_batch(spec, ch[:take, 0], 1, basis1)
        Gq = lift_batch(spec, ch[:take, 1], 2, basis2)
        U, _, _ = np.linalg.svd(Gq, full_matrices=True)
        W = np.conj(np.swapaxes(U[:, :, spec.interference_rank(N):], 1, 2))
        cvec = c.points[labels[:take, 1]]
        y = Hq @ s + np.einsum("btk,bk->bt", Gq, cvec) + scale_noise * noise[:take]
        z = np.einsum("brt,bt->br", W, y)
        A = W @ Hq
        m_true = np.sum(np.abs(z - A @ s) ** 2, axis=1)
        m_wrong = np.sum(np.abs(z - A @ sbar) ** 2, axis=1)
        events += int(np.sum(m_wrong < m_true))
        done += take
        block += 1
    p = events / trials
    return p, float(np.sqrt(max(p * (1 - p), 1.0 / trials) / trials))
