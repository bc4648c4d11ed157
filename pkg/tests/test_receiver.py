import numpy as np
import pytest

from ic_stbc.codebook import CodeSpec, candidate_labels, lift_channel
from ic_stbc.modulation import make_qam
from ic_stbc.numerics import RankDeficientError, projection_complement
from ic_stbc.receiver import (
    ao_mmse,
    batch_front_end,
    decision_metric,
    genie_single_user,
    group_zf,
    ml_decode,
    mmse_canceller,
)

from conftest import crandn


def setup(rng, M=2, N=1, L=4, kind="proposed"):
    spec = CodeSpec(M, L, kind)
    H = lift_channel(spec, crandn(rng, M, N), 1).matrix
    G = lift_channel(spec, crandn(rng, M, N), 2).matrix
    return spec, H, G


def test_zf_removes_interference_exactly(rng):
    spec, H, G = setup(rng)
    c = make_qam(4)
    s = c.points[[0, 1, 2, 3]]
    y1 = H @ s + G @ c.points[[3, 3, 0, 1]]
    y2 = H @ s + G @ c.points[[1, 0, 2, 2]]
    assert np.allclose(group_zf(y1, H, G).z, group_zf(y2, H, G).z, atol=1e-12)


def test_zf_noiseless_decodes_correctly(rng):
    c = make_qam(4)
    for _ in range(20):
        spec, H, G = setup(rng, M=3)
        labels = rng.integers(0, 4, spec.L)
        y = H @ c.points[labels] + G @ c.points[rng.integers(0, 4, spec.L)]
        res = ml_decode(group_zf(y, H, G), c, spec.L)
        assert np.array_equal(res.labels, labels)
        assert res.metric < 1e-20 and res.candidates_searched == 4**spec.L


def test_ml_is_global_minimiser(rng):
    spec, H, G = setup(rng, L=2)
    c = make_qam(16)
    y = crandn(rng, H.shape[0])
    sys = group_zf(y, H, G)
    res = ml_decode(sys, c, 2, scale=0.7)
    all_metrics = [decision_metric(sys, c.points[lab], 0.7) for lab in candidate_labels(16, 2)]
    assert res.metric == pytest.approx(min(all_metrics), abs=1e-12)
    assert int(np.argmin(all_metrics)) == res.labels[0] * 16 + res.labels[1]


def test_mmse_tends_to_zf(rng):
    spec, H, G = setup(rng)
    Qzf = projection_complement(G)
    gaps = [np.linalg.norm(mmse_canceller(G, rho, spec.mu) - Qzf) for rho in (1e2, 1e4, 1e6, 1e8)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-6


def test_mmse_is_inverse_interference_plus_noise_covariance(rng):
    spec, H, G = setup(rng)
    rho, mu = 30.0, spec.mu
    cov = np.eye(G.shape[0]) + (rho / mu) * G @ G.conj().T
    assert np.allclose(mmse_canceller(G, rho, mu), np.linalg.inv(cov), atol=1e-10)
    with pytest.raises(ValueError):
        mmse_canceller(G, 0.0, mu)


def test_ao_statistic_has_white_disturbance(rng):
    spec, H, G = setup(rng)
    rho, mu = 10.0, spec.mu
    cov = np.eye(G.shape[0]) + (rho / mu) * G @ G.conj().T
    sys = ao_mmse(crandn(rng, H.shape[0]), H, G, rho, mu)
    w, V = np.linalg.eigh(sys.Q)
    root = (V * np.sqrt(w)) @ V.conj().T
    assert np.allclose(root @ cov @ root, np.eye(len(root)), atol=1e-10)
    assert np.allclose(sys.A, root @ H, atol=1e-12)


def test_zf_needs_full_rank_interferer(rng):
    spec, H, _ = setup(rng, M=2, L=2)
    g = crandn(rng, H.shape[0], 1)
    with pytest.raises(RankDeficientError):
        group_zf(np.zeros(H.shape[0]), H, np.hstack([g, g]))


def test_genie_decodes_clean_observation(rng):
    spec, H, _ = setup(rng)
    c = make_qam(4)
    labels = np.array([2, 0, 3, 1])
    assert np.array_equal(genie_single_user(H @ c.points[labels], H, c, 4).labels, labels)


@pytest.mark.parametrize("receiver", ["zf", "ao", "genie"])
@pytest.mark.parametrize("M,N,L,kind", [(2, 1, 4, "proposed"), (3, 2, 2, "proposed"), (2, 2, 2, "multilayer"),
                                         (2, 1, 2, "multilayer"), (3, 1, 2, "multilayer")])
def test_batch_front_end_matches_reference_metric(receiver, M, N, L, kind, rng):
    """Reduced metric equals the explicit-matrix metric up to a per-trial constant."""
    spec = CodeSpec(M, L, kind)
    c = make_qam(4)
    B, n = 6, spec.n_symbols
    H = np.stack([lift_channel(spec, crandn(rng, M, N), 1).matrix for _ in range(B)])
    G = np.stack([lift_channel(spec, crandn(rng, M, N), 2).matrix for _ in range(B)])
    y = crandn(rng, B, spec.T * N)
    noise_var = spec.mu / 20.0
    k = spec.interference_rank(N)
    R, b, degenerate = batch_front_end(receiver, H, G, y, noise_var, rank=k)
    assert not degenerate.any() and R.shape[1] <= n
    cands = c.points[candidate_labels(4, n)]
    for t in range(B):
        if receiver == "zf":
            sys = group_zf(y[t], H[t], G[t], rank=k)
        elif receiver == "ao":
            sys = ao_mmse(y[t], H[t], G[t], 1.0 / noise_var, 1.0)
        else:
            sys = None
        z, A = (y[t], H[t]) if sys is None else (sys.z, sys.A)
        full = np.sum(np.abs(z[None] - cands @ A.T) ** 2, axis=1)
        red = np.sum(np.abs(b[t][None] - cands @ R[t].T) ** 2, axis=1)
        assert np.allclose(full - red, (full - red)[0], atol=1e-9)


def test_batch_front_end_flags_degenerate_and_rejects_overload(rng):
    spec = CodeSpec(2, 2)
    H = lift_channel(spec, crandn(rng, 2, 1), 1).matrix[None]
    G = np.zeros_like(H)
    _, _, degenerate = batch_front_end("zf", H, G, np.zeros((1, spec.T)), 0.1)
    assert degenerate.all()
    ml = CodeSpec(2, 2, "multilayer")  # 4 interferer columns in 5 dimensions is fine, 4 in 4 is not
    H = np.zeros((1, 4, 4), complex)
    with pytest.raises(RankDeficientError):
        batch_front_end("zf", H, H, np.zeros((1, 4)), 0.1)
    with pytest.raises(ValueError):
        batch_front_end("bogus", H, H, np.zeros((1, 4)), 0.1)
    assert ml.T == 5


def test_rank_deficient_interferer_with_declared_rank(rng):
    spec = CodeSpec(2, 2, "multilayer")
    G = lift_channel(spec, crandn(rng, 2, 1), 2).matrix
    assert G.shape == (5, 4) and spec.interference_rank(1) == 3
    with pytest.raises(RankDeficientError):
        group_zf(np.zeros(5), G, G)
    Q = group_zf(np.zeros(5), G, G, rank=3).Q
    assert np.linalg.norm(Q @ G) < 1e-12 and np.allclose(Q @ Q, Q)
    # the interference fills rows M.. so only the first M rows survive
    assert np.allclose(Q, np.diag([1, 1, 0, 0, 0]), atol=1e-12)
