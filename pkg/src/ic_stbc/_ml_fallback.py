"""Pure numpy exhaustive ML search; same contract as the compiled kernel."""

import numpy as np

# complex entries materialised per chunk of instances x candidates x rows
_CHUNK_ENTRIES = 1 << 22


def ml_search(R, b, points):
    R = np.ascontiguousarray(R, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    points = np.ascontiguousarray(points, dtype=np.complex128)
    n_inst, r, n = R.shape
    if b.shape != (n_inst, r):
        raise ValueError("b must have shape (instances, rows)")
    q = points.size
    K = q**n
    powers = q ** np.arange(n - 1, -1, -1)
    cand = points[(np.arange(K)[:, None] // powers) % q].T  # (n, K)

    best_idx = np.empty(n_inst, dtype=np.int64)
    best_met = np.empty(n_inst, dtype=np.float64)
    step = max(1, _CHUNK_ENTRIES // max(1, K * r))
    for start in range(0, n_inst, step):
        sl = slice(start, min(start + step, n_inst))
        resid = b[sl, :, None] - R[sl] @ cand
        met = (resid.real**2 + resid.imag**2).sum(axis=1)
        k = np.argmin(met, axis=1)
        best_idx[sl] = k
        best_met[sl] = met[np.arange(k.size), k]
    return best_idx, best_met
