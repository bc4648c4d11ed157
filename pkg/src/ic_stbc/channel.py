"""Quasi-static Rayleigh channels and noise with reproducible substreams.

Every random quantity is addressed by ``(master seed, trial index)``.  Trials
are grouped in fixed blocks of :data:`TRIAL_BLOCK`; each block and purpose
(channel, noise, symbols) owns its own :class:`numpy.random.SeedSequence`
child, so a trial's values never depend on execution order or worker count.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TRIAL_BLOCK = 1024

_CHANNEL, _NOISE, _SYMBOLS = 0, 1, 2


class Stream(NamedTuple):
    seed: int
    index: int


def _generator(seed: int, block: int, purpose: int, attempt: int = 0) -> np.random.Generator:
    key = (block, purpose) if attempt == 0 else (block, purpose, attempt)
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0, 1): real and imaginary parts each N(0, 1/2)."""
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


@dataclass(frozen=True)
class ChannelRealization:
    """Links at both receivers: ``H*`` from user 1, ``G*`` from user 2."""

    H1: np.ndarray
    G1: np.ndarray
    H2: np.ndarray
    G2: np.ndarray


def draw_channel_block(M: int, N: int, seed: int, block: int, attempt: int = 0) -> np.ndarray:
    """Channels of one trial block, shape ``(TRIAL_BLOCK, 4, M, N)`` ordered H1, G1, H2, G2."""
    return complex_normal(_generator(seed, block, _CHANNEL, attempt), (TRIAL_BLOCK, 4, M, N))


def draw_noise_block(TN: int, seed: int, block: int) -> np.ndarray:
    return complex_normal(_generator(seed, block, _NOISE), (TRIAL_BLOCK, TN))


def draw_symbol_block(order: int, n_symbols: int, seed: int, block: int) -> np.ndarray:
    """Label indices for both users, shape ``(TRIAL_BLOCK, 2, n_symbols)``."""
    rng = _generator(seed, block, _SYMBOLS)
    return rng.integers(0, order, size=(TRIAL_BLOCK, 2, n_symbols), dtype=np.int64)


def redraw_channel(M: int, N: int, seed: int, index: int, attempt: int) -> np.ndarray:
    """Replacement channels ``(4, M, N)`` for one trial after a degenerate draw."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index, _CHANNEL, 0, attempt)))
    return complex_normal(rng, (4, M, N))


def draw_channel(M: int, N: int, stream) -> ChannelRealization:
    """Channel realization of one trial; identical streams give identical draws."""
    seed, index = Stream(*stream)
    if M < 1 or N < 1:
        raise ValueError("M and N must be positive")
    block, row = divmod(index, TRIAL_BLOCK)
    h1, g1, h2, g2 = draw_channel_block(M, N, seed, block)[row]
    return ChannelRealization(H1=h1, G1=g1, H2=h2, G2=g2)


def draw_noise(TN: int, stream) -> np.ndarray:
    seed, index = Stream(*stream)
    block, row = divmod(index, TRIAL_BLOCK)
    return draw_noise_block(TN, seed, block)[row]


def draw_symbols(order: int, n_symbols: int, stream) -> tuple[np.ndarray, np.ndarray]:
    """Label vectors ``(user1, user2)`` of one trial."""
    seed, index = Stream(*stream)
    block, row = divmod(index, TRIAL_BLOCK)
    labels = draw_symbol_block(order, n_symbols, seed, block)[row]
    return labels[0], labels[1]
