"""Rotated Toeplitz space-time block codes for two-user interference channels.

User 1 sends the ``T x M`` codeword whose column ``m`` is the rotated symbol
vector ``Theta @ s`` shifted down by ``m`` rows, followed by ``M`` zero rows;
user 2 uses the same band preceded by ``M`` zero rows.  ``T = L + 2M - 1``.

The comparison ``multilayer`` code puts layer ``l`` (``Theta @ s_l`` with
``Theta`` of size ``M``) on the ``l``-th diagonal, so its entries differ
across columns.  It is framed the same way as the Toeplitz code (trailing or
leading ``M`` zero rows) so both code kinds share ``T``.
"""

from dataclasses import dataclass, field
from functools import cached_property
import itertools

import numpy as np

PROPOSED = "proposed"
MULTILAYER = "multilayer"
CODE_KINDS = (PROPOSED, MULTILAYER)

MAX_ENUMERATION = 10**7


class GuardExceededError(ValueError):
    """An exhaustive enumeration or search would exceed its size guard."""


@dataclass(frozen=True)
class RotationMatrix:
    dim: int
    theta: np.ndarray = field(repr=False)


def make_rotation(L: int) -> RotationMatrix:
    """Vandermonde rotation ``Theta[l, k] = theta_l**k / sqrt(L)``.

    The ``theta_l`` are the ``L`` roots of ``x**L = exp(i*phi)``.  For ``L`` a
    power of two ``phi = pi/2`` (roots of ``x**L = i``, whose minimal
    polynomial over Q(i) has degree ``L``).  Otherwise ``x**L = i`` is
    reducible (``-i`` is a root when ``L = 3``), so ``phi = 1`` rad is used:
    ``exp(i)`` is transcendental, hence so are the roots, and no nonzero
    Gaussian-integer combination of their powers vanishes.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    phi = np.pi / 2 if L & (L - 1) == 0 else 1.0
    k = np.arange(L)
    roots = np.exp(1j * (2 * np.pi * k + phi) / L)
    theta = roots[:, None] ** k[None, :] / np.sqrt(L)
    theta.setflags(write=False)
    return RotationMatrix(dim=L, theta=theta)


def verify_product_distance(rot: RotationMatrix, diffs, L: int | None = None, chunk: int = 1 << 16) -> float:
    """Minimum of ``prod_l |(Theta ds)_l|`` over all nonzero ``ds`` in ``diffs**L``."""
    L = rot.dim if L is None else L
    if L != rot.dim:
        raise ValueError(f"L={L} does not match rotation dimension {rot.dim}")
    diffs = np.asarray(diffs, dtype=np.complex128)
    total = diffs.size**L
    if total > MAX_ENUMERATION:
        raise GuardExceededError(f"{total} difference vectors exceed the guard {MAX_ENUMERATION}")
    best = np.inf
    for block in iter_difference_vectors(diffs, L, chunk):
        pd = np.prod(np.abs(block @ rot.theta.T), axis=1)
        best = min(best, float(pd.min()))
    if not np.isfinite(best):
        raise ValueError("no nonzero difference vector to evaluate")
    return best


def iter_difference_vectors(diffs, n: int, chunk: int = 1 << 16):
    """Yield every nonzero vector of ``diffs**n`` in lexicographic order, in blocks."""
    diffs = np.asarray(diffs, dtype=np.complex128)
    q = diffs.size
    total = q**n
    powers = q ** np.arange(n - 1, -1, -1)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = (idx[:, None] // powers) % q
        block = diffs[digits]
        block = block[np.any(block != 0, axis=1)]
        if len(block):
            yield block


@dataclass(frozen=True)
class CodeSpec:
    """One code family: ``M`` antennas per user, ``L`` layers."""

    M: int
    L: int
    kind: str = PROPOSED

    def __post_init__(self):
        if self.M < 1 or self.L < 1:
            raise ValueError("M and L must be positive")
        if self.kind not in CODE_KINDS:
            raise ValueError(f"unknown code kind {self.kind!r}")

    @property
    def T(self) -> int:
        return self.L + 2 * self.M - 1

    @property
    def offset_user2(self) -> int:
        return self.M

    @property
    def n_symbols(self) -> int:
        """Information symbols carried by one codeword."""
        return self.L if self.kind == PROPOSED else self.L * self.M

    def interference_rank(self, N: int) -> int:
        """Generic rank of the lifted ``TN x n_symbols`` channel.

        The proposed code has full column rank ``L``.  The multilayer code has
        ``L * M`` free entries; row ``i`` of its bare codeword has ``w_i``
        nonzero columns and row ``i`` of ``X @ H`` then spans ``min(w_i, N)``
        dimensions, so the rank is the sum of those, below ``L * M`` when
        ``N < M`` and ``L > 1``.
        """
        if self.kind == PROPOSED:
            return self.L
        rows = np.arange(self.L + self.M - 1)[:, None] - np.arange(self.M)[None, :]
        widths = np.sum((rows >= 0) & (rows < self.L), axis=1)
        return int(np.minimum(widths, N).sum())

    @property
    def rate(self) -> float:
        return self.n_symbols / self.T

    @cached_property
    def rotation(self) -> RotationMatrix:
        return make_rotation(self.L if self.kind == PROPOSED else self.M)

    @property
    def mu(self) -> float:
        return compute_mu(self)

    def to_config(self, constellation_order: int = 4) -> str:
        return (
            f"M={self.M}\nL={self.L}\n"
            f"constellation_order={constellation_order}\ncode={self.kind}\n"
        )

    @classmethod
    def from_config(cls, text: str):
        """Parse ``key=value`` lines; returns ``(spec, constellation_order)``."""
        values = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed config line: {raw!r}")
            values[key.strip()] = value.strip()
        try:
            spec = cls(int(values["M"]), int(values["L"]), values.get("code", PROPOSED))
        except KeyError as exc:
            raise ValueError(f"missing config key {exc}") from None
        return spec, int(values.get("constellation_order", 4))


def compute_mu(spec: CodeSpec) -> float:
    """Energy normalization: expected ``||S||_F**2 / T`` for unit-energy symbols.

    Both code kinds carry total energy ``M * L`` per codeword (unitary
    rotation, every rotated entry repeated on ``M`` antennas or ``M`` layers
    of ``M`` entries), so ``mu = M * L / T``.
    """
    return spec.M * spec.L / spec.T


@dataclass(frozen=True)
class Codeword:
    matrix: np.ndarray
    user: int


def _check_user(user: int) -> int:
    if user not in (1, 2):
        raise ValueError(f"user must be 1 or 2, got {user}")
    return user


def _row_offset(spec: CodeSpec, user: int) -> int:
    _check_user(user)
    return 0 if user == 1 else spec.offset_user2


def place_toeplitz(rotated, M: int, T: int, offset: int) -> np.ndarray:
    """``T x M`` matrix with ``rotated`` down column ``m`` starting at row ``offset + m``."""
    rotated = np.asarray(rotated, dtype=np.complex128)
    L = rotated.shape[-1]
    out = np.zeros(rotated.shape[:-1] + (T, M), dtype=np.complex128)
    for m in range(M):
        out[..., offset + m : offset + m + L, m] = rotated
    return out


def encode_multilayer(M: int, L: int, symbols, rotation: RotationMatrix | None = None) -> np.ndarray:
    """Bare ``(L + M - 1) x M`` multilayer codeword.

    ``symbols`` holds ``L * M`` values; layer ``l`` uses ``symbols[l*M:(l+1)*M]``
    and its rotated vector ``x_l = Theta @ s_l`` fills diagonal ``l``:
    ``X[l + m, m] = x_l[m]``.
    """
    s = np.asarray(symbols, dtype=np.complex128)
    if s.shape[-1] != L * M:
        raise ValueError(f"expected {L * M} symbols, got {s.shape[-1]}")
    rot = rotation or make_rotation(M)
    if rot.dim != M:
        raise ValueError("multilayer rotation must be M x M")
    layers = s.reshape(s.shape[:-1] + (L, M)) @ rot.theta.T  # (..., L, M)
    out = np.zeros(s.shape[:-1] + (L + M - 1, M), dtype=np.complex128)
    for m in range(M):
        out[..., m : m + L, m] = layers[..., :, m]
    return out


def encode_matrix(spec: CodeSpec, symbols, user: int) -> np.ndarray:
    """Codeword matrix (or a stack of them) for symbol vectors on the last axis."""
    s = np.asarray(symbols, dtype=np.complex128)
    if s.shape[-1] != spec.n_symbols:
        raise ValueError(f"expected {spec.n_symbols} symbols, got {s.shape[-1]}")
    offset = _row_offset(spec, user)
    if spec.kind == PROPOSED:
        return place_toeplitz(s @ spec.rotation.theta.T, spec.M, spec.T, offset)
    bare = encode_multilayer(spec.M, spec.L, s, spec.rotation)
    out = np.zeros(s.shape[:-1] + (spec.T, spec.M), dtype=np.complex128)
    out[..., offset : offset + spec.L + spec.M - 1, :] = bare
    return out


def encode(spec: CodeSpec, symbols, user: int) -> Codeword:
    s = np.asarray(symbols, dtype=np.complex128)
    if s.ndim != 1:
        raise ValueError("encode takes one symbol vector; use encode_matrix for stacks")
    return Codeword(matrix=encode_matrix(spec, s, user), user=user)


def dispersion_basis(spec: CodeSpec, user: int) -> np.ndarray:
    """Matrices ``A_k`` with ``S(s) = sum_k s_k A_k``; shape ``(n_symbols, T, M)``."""
    return encode_matrix(spec, np.eye(spec.n_symbols), user)


def vec_by_antenna(Y) -> np.ndarray:
    """Stack the columns of a ``T x N`` block (antenna 1's samples first)."""
    Y = np.asarray(Y)
    return np.swapaxes(Y, -1, -2).reshape(Y.shape[:-2] + (-1,))


def unvec_by_antenna(y, T: int) -> np.ndarray:
    y = np.asarray(y)
    return np.swapaxes(y.reshape(y.shape[:-1] + (-1, T)), -1, -2)


@dataclass(frozen=True)
class EquivalentChannel:
    """``TN x n_symbols`` matrix mapping the symbol vector to the received vector."""

    matrix: np.ndarray
    user: int
    kind: str = PROPOSED


def channel_toeplitz(spec: CodeSpec, phys, user: int) -> np.ndarray:
    """Stacked per-antenna Toeplitz channel matrices before rotation.

    Block ``j`` is ``T x L`` with the coefficients ``phys[:, j]`` running down
    column ``l`` from row ``offset + l``.
    """
    if spec.kind != PROPOSED:
        raise ValueError("the Toeplitz factorization exists only for the proposed code")
    phys = np.asarray(phys, dtype=np.complex128)
    if phys.ndim != 2 or phys.shape[0] != spec.M:
        raise ValueError(f"channel must be {spec.M} x N, got {phys.shape}")
    N = phys.shape[1]
    offset = _row_offset(spec, user)
    blocks = np.zeros((N, spec.T, spec.L), dtype=np.complex128)
    for l in range(spec.L):
        blocks[:, offset + l : offset + l + spec.M, l] = phys.T
    return blocks.reshape(N * spec.T, spec.L)


def lift_channel(spec: CodeSpec, phys, user: int) -> EquivalentChannel:
    """Equivalent channel ``H_eq`` with ``vec_by_antenna(S(s) @ phys) == H_eq @ s``."""
    phys = np.asarray(phys, dtype=np.complex128)
    if phys.ndim != 2 or phys.shape[0] != spec.M:
        raise ValueError(f"channel must be {spec.M} x N, got {phys.shape}")
    if spec.kind == PROPOSED:
        mat = channel_toeplitz(spec, phys, user) @ spec.rotation.theta
    else:
        mat = lift_batch(spec, phys[None], user)[0]
    return EquivalentChannel(matrix=mat, user=user, kind=spec.kind)


def lift_batch(spec: CodeSpec, phys, user: int, basis: np.ndarray | None = None) -> np.ndarray:
    """Equivalent channels for a stack of ``M x N`` channels, shape ``(B, TN, n_symbols)``."""
    phys = np.asarray(phys, dtype=np.complex128)
    if phys.ndim != 3 or phys.shape[1] != spec.M:
        raise ValueError(f"channels must be B x {spec.M} x N, got {phys.shape}")
    A = dispersion_basis(spec, user) if basis is None else basis
    # column k is vec(A_k @ H); antenna-major stacking
    lifted = np.einsum("ktm,bmn->bntk", A, phys, optimize=True)
    B, N = phys.shape[0], phys.shape[2]
    return lifted.reshape(B, N * spec.T, spec.n_symbols)


def candidate_labels(order: int, n: int) -> np.ndarray:
    """All label vectors of length ``n`` in lexicographic order (first symbol most significant)."""
    return np.array(list(itertools.product(range(order), repeat=n)), dtype=np.int64).reshape(-1, n)
