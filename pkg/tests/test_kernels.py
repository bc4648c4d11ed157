import numpy as np
import pytest

from ic_stbc import kernels
from ic_stbc.codebook import GuardExceededError, candidate_labels
from ic_stbc.modulation import make_qam

from conftest import crandn


def brute(R, b, points):
    n = R.shape[2]
    cands = points[candidate_labels(points.size, n)]  # (K, n)
    metric = np.sum(np.abs(b[:, None, :] - np.einsum("trn,kn->tkr", R, cands)) ** 2, axis=2)
    return metric.argmin(axis=1), metric.min(axis=1)


@pytest.mark.parametrize("rows,n,order", [(3, 4, 4), (5, 2, 16), (1, 1, 4), (6, 3, 4), (2, 3, 4)])
def test_matches_brute_force(backend, rows, n, order, rng):
    pts = make_qam(order).points
    R, b = crandn(rng, 50, rows, n), crandn(rng, 50, rows)
    idx, metric = backend(R, b, pts)
    ref_idx, ref_metric = brute(R, b, pts)
    assert np.array_equal(idx, ref_idx)
    assert np.allclose(metric, ref_metric, atol=1e-10)


def test_ties_resolve_to_first_candidate(backend):
    pts = make_qam(4).points
    idx, metric = backend(np.zeros((2, 3, 2), complex), np.ones((2, 3), complex), pts)
    assert idx.tolist() == [0, 0]
    # only the sum of the two symbols is observed; (0, 3), (1, 2), (2, 1), (3, 0) all sum to zero
    R = np.ones((1, 1, 2), complex)
    idx, _ = backend(R, np.zeros((1, 1), complex), pts)
    assert idx[0] == 0 * 4 + 3


def test_backends_agree(rng):
    backs = kernels.available_backends()
    pts = make_qam(4).points
    R, b = crandn(rng, 200, 4, 4), crandn(rng, 200, 4)
    results = [fn(R, b, pts) for fn in backs.values()]
    for idx, metric in results[1:]:
        assert np.array_equal(idx, results[0][0])
        assert np.allclose(metric, results[0][1], atol=1e-12)


def test_guard_and_shape_checks():
    pts = make_qam(64).points
    with pytest.raises(GuardExceededError):
        kernels.ml_search(np.zeros((1, 4, 4)), np.zeros((1, 4)), pts)
    with pytest.raises(ValueError):
        kernels.ml_search(np.zeros((4, 4)), np.zeros((1, 4)), pts)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "numpy")
